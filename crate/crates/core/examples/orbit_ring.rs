//! The orbit ring of a cycle and its period decomposition n = n0 * r * p^t.

use num_rational::BigRational;
use padic_periods::models::{ExactP1, RationalMapP1};
use padic_periods::models::{ExactPoint, Model};
use padic_periods::{IntPolynomial, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = IntPolynomial::parse("x^2 - 4*x + 3", &["x"], Some(3))?;
    let session = Session::new(Model::P1(RationalMapP1::polynomial(3, &f)?), 6)?;
    let zero = session.reduce_exact(&ExactPoint::P1(ExactP1::Finite(BigRational::from_integer(0.into()))))?;
    let raw = session.cycle_through(&zero)?;
    let padic_periods::engine::Certification::Certified(cycle) = session.certify(&raw)? else {
        return Err("cycle through 0 did not certify".into());
    };
    let dec = session.decompose(&cycle)?;
    println!("{dec}");
    let (n, n0, r, t) = dec.tuple();
    println!("(n, n0, r, t) = ({n}, {n0}, {r}, {t}); dims m/m^2 = {}, mbar/mbar^2 = {}", dec.dim_m, dec.dim_mbar);
    if let Some(orbit) = &dec.orbit {
        println!("u = {:?}, sigma(y) = {:?} (mod 3^{})", orbit.u, orbit.sigma, orbit.precision);
    }
    println!("sigma_bar = {:?}", dec.sigma_bar.to_rows());
    Ok(())
}
