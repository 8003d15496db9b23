//! The map-description expression language: parse, print, reparse.

use padic_periods::IntPolynomial;

fn main() {
    for (text, vars, p) in [
        ("x^2 - 4*x + 3", vec!["x"], 3),
        ("x^2 - 29/16", vec!["x"], 3),
        ("-(x - y)^3 + x*y/5", vec!["x", "y"], 3),
        ("x/3", vec!["x"], 3),
        ("x + w", vec!["x"], 3),
        ("x^2 +* 1", vec!["x"], 3),
    ] {
        match IntPolynomial::parse(text, &vars, Some(p)) {
            Ok(q) => {
                let again = IntPolynomial::parse(&q.to_string(), &vars, Some(p)).expect("printed form parses");
                println!("{text:24} -> {q}   (round trip: {})", again == q);
            }
            Err(e) => println!("{text:24} -> error: {e}"),
        }
    }
}
