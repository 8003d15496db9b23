//! A singular model: x*y = 3 over Z_3 with the coordinate swap.

use num_rational::BigRational;
use padic_periods::models::AffineModel;
use padic_periods::models::{ExactPoint, Model};
use padic_periods::{IntPolynomial, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = vec!["x".to_string(), "y".to_string()];
    let parse = |s: &str| IntPolynomial::parse(s, &vars, Some(3));
    let model = AffineModel::new(3, vars.clone(), vec![parse("x*y - 3")?], vec![parse("y")?, parse("x")?])?;
    let model = Model::Affine(model);
    for pt in model.special_fiber()? {
        println!("  {} cotangent dim {}", pt.coords, pt.cotangent_dimension);
    }
    let session = Session::new(model, 5)?;
    let stats = session.stats();
    println!("|X(F_3)| = {}, d' = {}", stats.count, stats.d_prime);

    let start = ExactPoint::Affine(vec![BigRational::from_integer(1.into()), BigRational::from_integer(3.into())]);
    let raw = session.cycle_through(&session.reduce_exact(&start)?)?;
    if let padic_periods::engine::Certification::Certified(c) = session.certify(&raw)? {
        println!("(1, 3): period {}, decomposition {:?}", c.period, session.decompose(&c)?.tuple());
    }
    Ok(())
}
