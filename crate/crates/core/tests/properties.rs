use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use padic_periods::bounds::{bound_general, BoundInputs};
use padic_periods::dynamics::find_cycles;
use padic_periods::engine::{verify_paper_claims, Claim, DecompositionMode, Status};
use padic_periods::models::{Model, RationalMapP1};
use padic_periods::padic::{rational_reconstruct, Modulus};
use padic_periods::{IntPolynomial, Session};

const VARS: [&str; 2] = ["x", "y"];

fn rational_coeff(p: u64) -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=12)
        .prop_filter("p-unit denominator", move |(_, d)| d % p as i64 != 0)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn polynomial() -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(((0u32..4, 0u32..4), rational_coeff(5)), 0..6).prop_map(|terms| {
        IntPolynomial::from_terms(&VARS, terms.into_iter().map(|((a, b), c)| (vec![a, b], c)))
    })
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

proptest! {
    #[test]
    fn printed_polynomials_parse_back(q in polynomial()) {
        let text = q.to_string();
        let again = IntPolynomial::parse(&text, &VARS, Some(5)).expect("printed form parses");
        prop_assert_eq!(again, q, "via {}", text);
    }

    #[test]
    fn arithmetic_mod_p_k(p in prime(), k in 1u32..8, a in any::<u64>(), b in any::<u64>()) {
        let ring = Modulus::new(p, k).unwrap();
        let m = ring.modulus() as u128;
        let (a, b) = (a % ring.modulus(), b % ring.modulus());
        prop_assert_eq!(ring.mul(a, b) as u128, (a as u128 * b as u128) % m);
        prop_assert_eq!(ring.add(ring.sub(a, b), b), a);
        if let Some(inv) = ring.inv(a) {
            prop_assert_eq!(ring.mul(a, inv), 1 % ring.modulus());
            prop_assert!(a % p != 0);
        } else {
            prop_assert!(a % p == 0);
        }
    }

    #[test]
    fn small_rationals_are_recognised(n in -30i64..=30, d in 1i64..=30) {
        prop_assume!(d % 7 != 0);
        let ring = Modulus::new(7, 8).unwrap();
        let x = BigRational::new(BigInt::from(n), BigInt::from(d));
        let residue = ring.from_rational(&x).unwrap();
        prop_assert_eq!(rational_reconstruct(&ring, residue, 30, 30), Some(x));
    }

    #[test]
    fn functional_graph_cycles(succ in prop::collection::vec(0u32..40, 1..40)) {
        let n = succ.len() as u32;
        let succ: Vec<u32> = succ.into_iter().map(|s| s % n).collect();
        let cycles = find_cycles(&succ);
        // brute force: a node is periodic iff it returns to itself within n steps
        let periodic: HashSet<u32> = (0..n)
            .filter(|&i| {
                let mut v = succ[i as usize];
                (0..n).any(|_| {
                    let hit = v == i;
                    v = succ[v as usize];
                    hit
                })
            })
            .collect();
        let found: HashSet<u32> = cycles.iter().flatten().copied().collect();
        prop_assert_eq!(&found, &periodic);
        for c in &cycles {
            for (i, &v) in c.iter().enumerate() {
                prop_assert_eq!(succ[v as usize], c[(i + 1) % c.len()]);
            }
            prop_assert_eq!(c[0], *c.iter().min().unwrap());
        }
        prop_assert_eq!(cycles.iter().map(Vec::len).sum::<usize>(), found.len());
    }

    #[test]
    fn bound_is_monotone(p in prime(), e in 1u32..4, count in 1u64..100, d in 1u32..4) {
        let b = |count, d| bound_general(&BoundInputs { count, p, e, q: p, dprime: d }).unwrap();
        prop_assert!(b(count, d) < b(count + 1, d));
        prop_assert!(b(count, d) < b(count, d + 1));
        let deeper = bound_general(&BoundInputs { count, p, e: e + 1, q: p, dprime: d }).unwrap();
        prop_assert!(b(count, d) <= deeper);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decomposition_invariants(
        p in prop::sample::select(vec![2u64, 3, 5]),
        a in -9i64..=9, b in -9i64..=9, c in -9i64..=9,
        cubic in any::<bool>(),
    ) {
        let text = if cubic { format!("x^3 + ({a})*x^2 + ({b})*x + ({c})") } else { format!("x^2 + ({b})*x + ({c})") };
        let f = IntPolynomial::parse(&text, &["x"], Some(p)).unwrap();
        let s = Session::new(Model::P1(RationalMapP1::polynomial(p, &f).unwrap()), 4).unwrap();
        for cycle in s.certify_all().unwrap().certified {
            let d = s.decompose(&cycle).unwrap();
            let n = cycle.period as u64;
            prop_assert_eq!(d.n, n);
            prop_assert_eq!(n % d.n0, 0);
            prop_assert_eq!(d.mode, DecompositionMode::OrbitRingExact);
            prop_assert_eq!(n, d.n0 * d.r * p.pow(d.t));
            prop_assert!(d.n0 <= p + 1);
            prop_assert!(d.r <= (p - 1).max(1));
            prop_assert!(d.dim_mbar <= 1 && d.dim_m <= 2);
            let set = verify_paper_claims(&d, &s.stats());
            prop_assert_eq!(set.get(Claim::C1).status, Status::Holds);
            prop_assert_eq!(set.get(Claim::C2).status, Status::Holds);
        }
    }
}
