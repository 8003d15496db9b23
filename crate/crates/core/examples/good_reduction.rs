//! Resultants and the good-reduction test on P^1.

use padic_periods::models::RationalMapP1;
use padic_periods::IntPolynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (3, "x^2 - 4*x + 3", "1"),
        (3, "x + x^2 + 3*x^3", "1"),
        (5, "x^2 + 1", "x"),
        (5, "x^2 - 1", "x - 1"),
        (7, "3*x^2", "7"),
    ];
    for (p, num, den) in cases {
        let n = IntPolynomial::parse(num, &["x"], Some(p))?;
        let d = IntPolynomial::parse(den, &["x"], Some(p))?;
        let f = match RationalMapP1::from_fraction(p, &n, &d) {
            Ok(f) => f,
            Err(e) => {
                println!("p={p} ({num})/({den}): {e}");
                continue;
            }
        };
        println!(
            "p={p} ({num})/({den}): Res = {}, v_p = {:?}, extends: {:?}",
            f.resultant(),
            f.resultant_valuation(),
            f.check_extends()
        );
    }
    Ok(())
}
