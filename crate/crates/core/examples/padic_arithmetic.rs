//! Arithmetic in Z/p^k, valuations, Hensel lifting and rational recognition.

use num_bigint::BigInt;
use num_rational::BigRational;
use padic_periods::padic::{hensel_refine, rational_reconstruct, Modulus, PAdicApprox};
use padic_periods::IntPolynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ring = Modulus::new(3, 8)?;
    println!("Z/3^8: modulus {}", ring.modulus());

    let a = ring.from_i64(-1);
    let b = ring.from_rational(&BigRational::new(BigInt::from(1), BigInt::from(4)))?;
    println!("-1 = {a}, 1/4 = {b}, product = {}", ring.mul(a, b));
    println!("v(54) = {:?}, v(0) = {:?}", ring.valuation(54), ring.valuation(0));

    // sqrt(7) in Z_3 from the residue 1
    let f = IntPolynomial::parse("x^2 - 7", &["x"], Some(3))?;
    let root = hensel_refine(&f, &PAdicApprox::new(ring, 1))?;
    let v = root.value();
    println!("sqrt(7) = {v} mod 3^8, check: {}", ring.mul(v, v));

    // -7/4 comes back from its residue
    let x = ring.from_rational(&BigRational::new(BigInt::from(-7), BigInt::from(4)))?;
    let q = rational_reconstruct(&ring, x, 50, 50);
    println!("{x} recognised as {}", q.map_or("?".into(), |q| q.to_string()));
    Ok(())
}
