//! Enumerate raw cycles modulo p^k and certify them.

use padic_periods::models::RationalMapP1;
use padic_periods::models::Model;
use padic_periods::{IntPolynomial, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = IntPolynomial::parse("x^2", &["x"], Some(7))?;
    let session = Session::new(Model::P1(RationalMapP1::polynomial(7, &f)?), 6)?;
    let found = session.certify_all()?;
    println!("{} raw cycles modulo 7^6", found.raw_count());
    for c in &found.certified {
        let pts: Vec<String> = c.points.iter().map(|p| p.to_string()).collect();
        println!(
            "  n = {}: {{{}}}  {} (radius {}, multiplier {})",
            c.period,
            pts.join(", "),
            c.certificate,
            c.radius,
            c.multiplier
        );
    }
    let points: usize = found.certified.iter().map(|c| c.period).sum();
    println!("{points} certified periodic points");
    Ok(())
}
