//! Fixed points, multipliers and the cubic bound for z + z^2 + 3z^3 over Q_3.

use padic_periods::cubic::cubic_report;
use padic_periods::IntPolynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = IntPolynomial::parse("z + z^2 + 3*z^3", &["z"], Some(3))?;
    let report = cubic_report(&phi, 3, 6, None)?;
    println!("P^1 extension: {:?}", report.p1_extension);
    println!("window floor B = {}", report.floor);
    for fp in &report.fixed_points.records {
        println!("  fixed {:12} multiplier {:16} {:?}", fp.location.to_string(), fp.multiplier.to_string(), fp.class);
    }
    println!("bound {} ({:?}), hypothesis satisfied: {}", report.bound.value, report.bound.status, report.bound.hypothesis_satisfied);
    println!("max observed period {} (all within bound: {})", report.max_period(), report.all_within_bound());
    for d in &report.discrepancies {
        println!("discrepancy {}: {}", d.id, d.computed);
    }
    Ok(())
}
