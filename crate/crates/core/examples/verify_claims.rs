//! Check each inequality of the period bound against a certified cycle.
//! The 3-cycle of x^2 - 29/16 over Q_3 breaks the t-bound.

use padic_periods::engine::verify_paper_claims;
use padic_periods::models::RationalMapP1;
use padic_periods::models::Model;
use padic_periods::{IntPolynomial, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = IntPolynomial::parse("x^2 - 29/16", &["x"], Some(3))?;
    let session = Session::new(Model::P1(RationalMapP1::polynomial(3, &f)?), 8)?;
    let stats = session.stats();
    for cycle in session.certify_all()?.certified {
        let dec = session.decompose(&cycle)?;
        let exact: Vec<String> = cycle.exact.iter().flatten().map(|x| x.to_string()).collect();
        println!("cycle {{{}}}: {:?}", exact.join(", "), dec.tuple());
        let set = verify_paper_claims(&dec, &stats);
        for v in &set.verdicts {
            println!(
                "  {} {:40} {} <= {}  {}",
                v.claim,
                v.claim.inequality(stats.p),
                show(v.lhs),
                show(v.rhs),
                v.status
            );
        }
    }
    Ok(())
}

fn show(x: Option<u128>) -> String {
    x.map_or("-".into(), |x| x.to_string())
}
