//! Acceptance suite. One PASS/FAIL line per criterion; every comparison is an
//! exact integer or rational equality.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use padic_periods::bounds::{bound_general, BoundInputs};
use padic_periods::cubic::{cubic_report, FixedLocation, FixedMultiplier, MultiplierClass};
use padic_periods::engine::{
    verify_paper_claims, Certificate, Certification, Claim, DecompositionMode, Status, UncertifiedReason,
};
use padic_periods::models::{
    AffineModel, ExactP1, ExactPoint, FiberCoords, P1Residue, PolyChart, ProjPoint, RationalMapP1,
};
use padic_periods::models::ModelPoint;
use padic_periods::{report, CertifiedCycle, IntPolynomial, Model, Session};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn poly(text: &str, var: &str, p: u64) -> IntPolynomial {
    IntPolynomial::parse(text, &[var], Some(p)).expect("test polynomial parses")
}

fn p1_model(text: &str, p: u64) -> Model {
    Model::P1(RationalMapP1::polynomial(p, &poly(text, "x", p)).expect("valid map"))
}

fn node_model() -> Model {
    let vars = vec!["x".to_string(), "y".to_string()];
    let q = |s: &str| IntPolynomial::parse(s, &vars, Some(3)).unwrap();
    Model::Affine(AffineModel::new(3, vars.clone(), vec![q("x*y - 3")], vec![q("y"), q("x")]).unwrap())
}

fn cubic_chart() -> Model {
    Model::PolyChart(PolyChart::new(3, poly("z + z^2 + 3*z^3", "z", 3), None).unwrap())
}

fn session(model: Model, k: u32) -> Result<Session, String> {
    Session::new(model, k).map_err(|e| e.to_string())
}

fn certified(s: &Session) -> Result<Vec<CertifiedCycle>, String> {
    Ok(s.certify_all().map_err(|e| e.to_string())?.certified)
}

fn exact_set(c: &CertifiedCycle) -> BTreeSet<String> {
    c.exact.iter().flatten().map(|x| x.to_string()).collect()
}

fn finite(x: BigRational) -> ExactPoint {
    ExactPoint::P1(ExactP1::Finite(x))
}

/// The certified cycle through an exact point.
fn cycle_at(s: &Session, pt: &ExactPoint) -> Result<CertifiedCycle, String> {
    let start = s.reduce_exact(pt).map_err(|e| e.to_string())?;
    let raw = s.cycle_through(&start).map_err(|e| e.to_string())?;
    match s.certify(&raw).map_err(|e| e.to_string())? {
        Certification::Certified(c) => Ok(c),
        Certification::Uncertified(r) => Err(format!("cycle through {pt} uncertified: {r}")),
    }
}

fn timed(limit: Duration, elapsed: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"))
}

fn criterion_1() -> Outcome {
    // oracle: 0 -> 3 -> 0 over Q
    let f = |x: i64| x * x - 4 * x + 3;
    ensure(f(0) == 3 && f(3) == 0, || "exact iteration of {0, 3} failed".into())?;

    let start = Instant::now();
    let s = session(p1_model("x^2 - 4*x + 3", 3), 6)?;
    let c = cycle_at(&s, &finite(rat(0, 1)))?;
    let dec = s.decompose(&c).map_err(|e| e.to_string())?;
    let set = verify_paper_claims(&dec, &s.stats());
    let bound = bound_general(&s.stats().bound_inputs()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let want: BTreeSet<String> = ["0", "3"].map(String::from).into();
    ensure(exact_set(&c) == want, || format!("cycle {:?}", exact_set(&c)))?;
    ensure(dec.tuple() == (2, 1, 2, 0), || format!("(n, n0, r, t) = {:?}", dec.tuple()))?;
    ensure((dec.dim_m, dec.dim_mbar) == (2, 1), || format!("dims ({}, {})", dec.dim_m, dec.dim_mbar))?;
    ensure(bound == 8, || format!("bound {bound}"))?;
    ensure(set.all_hold(), || format!("verdicts {:?}", set.verdicts))?;
    timed(Duration::from_secs(1), elapsed)?;
    Ok(format!("(2,1,2,0), dims (2,1), bound 8, all Holds, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let s = session(p1_model("x^2", 7), 6)?;
    let cycles = certified(&s)?;
    let elapsed = start.elapsed();

    // oracle: the nonzero periodic points of x^2 in Z/7^6 solve x^3 = 1 or
    // x = 1, so exactly the cube roots of unity; count them by brute force
    let ring = s.ring();
    let cube_roots: Vec<u64> = (1..ring.modulus()).filter(|&x| ring.pow(x, 3) == 1).collect();
    ensure(cube_roots.len() == 3, || format!("{} cube roots of unity", cube_roots.len()))?;

    let points: usize = cycles.iter().map(|c| c.period).sum();
    ensure(points == 5, || format!("{points} certified periodic points"))?;
    let bound = bound_general(&BoundInputs { count: 8, p: 7, e: 1, q: 7, dprime: 1 }).unwrap();
    ensure(bound == 48, || format!("bound {bound}"))?;
    ensure(cycles.iter().all(|c| c.period as u128 <= bound), || "period above 48".into())?;

    let fixed: BTreeSet<ModelPoint> =
        cycles.iter().filter(|c| c.period == 1).map(|c| c.points[0].clone()).collect();
    let want: BTreeSet<ModelPoint> = [ProjPoint::Finite(0), ProjPoint::Finite(1), ProjPoint::AtInfinity(0)]
        .into_iter()
        .map(ModelPoint::P1)
        .collect();
    ensure(fixed == want, || format!("fixed points {fixed:?}"))?;

    let two: Vec<&CertifiedCycle> = cycles.iter().filter(|c| c.period == 2).collect();
    ensure(two.len() == 1, || format!("{} two-cycles", two.len()))?;
    let res: BTreeSet<FiberCoords> = s.residues(&two[0].points).into_iter().collect();
    let want: BTreeSet<FiberCoords> =
        [2, 4].map(|a| FiberCoords::P1(P1Residue::Finite(a))).into_iter().collect();
    ensure(res == want, || format!("2-cycle residues {res:?}"))?;
    ensure(two[0].certificate == Certificate::HenselQuadratic, || format!("{}", two[0].certificate))?;
    let on_roots = two[0].points.iter().all(|p| matches!(p, ModelPoint::P1(ProjPoint::Finite(a)) if cube_roots.contains(a)));
    ensure(on_roots, || "2-cycle is not the pair of primitive cube roots".into())?;
    timed(Duration::from_secs(5), elapsed)?;
    Ok(format!("5 periodic points, 2-cycle on residues {{2, 4}} HenselQuadratic, bound 48, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let s = session(p1_model("-x", 2), 5)?;
    let c = cycle_at(&s, &finite(rat(1, 1)))?;
    let dec = s.decompose(&c).map_err(|e| e.to_string())?;
    let set = verify_paper_claims(&dec, &s.stats());
    let bound = bound_general(&s.stats().bound_inputs()).map_err(|e| e.to_string())?;
    ensure(dec.tuple() == (2, 1, 1, 1), || format!("(n, n0, r, t) = {:?}", dec.tuple()))?;
    ensure(bound == 6, || format!("bound {bound}"))?;
    let c3 = set.get(Claim::C3);
    ensure(c3.lhs == Some(1) && c3.rhs == Some(1), || format!("C3 witness {:?} <= {:?}", c3.lhs, c3.rhs))?;
    ensure(set.all_hold(), || format!("verdicts {:?}", set.verdicts))?;
    Ok("(2,1,1,1), t = 1 <= v(2) = 1, bound 6, all Holds".into())
}

fn criterion_4() -> Outcome {
    // oracle: exact iteration over Q before anything p-adic
    let f = |x: &BigRational| x * x - rat(29, 16);
    let orbit = [rat(-1, 4), rat(-7, 4), rat(5, 4)];
    for i in 0..3 {
        ensure(f(&orbit[i]) == orbit[(i + 1) % 3], || format!("f({}) != {}", orbit[i], orbit[(i + 1) % 3]))?;
    }
    ensure(orbit[0] != orbit[1] && orbit[0] != orbit[2], || "orbit not primitive".into())?;

    let s = session(p1_model("x^2 - 29/16", 3), 8)?;
    let c = cycle_at(&s, &finite(orbit[0].clone()))?;
    let want: BTreeSet<String> = orbit.iter().map(|x| x.to_string()).collect();
    ensure(exact_set(&c) == want, || format!("cycle {:?}", exact_set(&c)))?;
    let dec = s.decompose(&c).map_err(|e| e.to_string())?;
    ensure(dec.tuple() == (3, 1, 1, 1), || format!("(n, n0, r, t) = {:?}", dec.tuple()))?;
    let set = verify_paper_claims(&dec, &s.stats());
    for claim in [Claim::C1, Claim::C2, Claim::C4] {
        ensure(set.get(claim).status == Status::Holds, || format!("{claim} {:?}", set.get(claim)))?;
    }
    let c3 = set.get(Claim::C3);
    ensure(c3.status == Status::Violated && c3.lhs == Some(1) && c3.rhs == Some(0), || format!("C3 {c3:?}"))?;
    let c4 = set.get(Claim::C4);
    ensure(c4.lhs == Some(3) && c4.rhs == Some(8), || format!("C4 {c4:?}"))?;

    let rep = report::verify(&s, "").map_err(|e| e.to_string())?;
    let has = rep.discrepancies().iter().any(|d| {
        d["id"].as_str().is_some_and(|id| id.starts_with("t-bound"))
            && d["computed"].as_str().is_some_and(|t| t.contains("-7/4") && t.contains("t = 1"))
    });
    ensure(has, || format!("discrepancies {:?}", rep.discrepancies()))?;
    Ok("{-1/4, -7/4, 5/4} certified, (3,1,1,1), C3 Violated 1 > 0, C4 3 <= 8, discrepancy in JSON".into())
}

fn criterion_5() -> Outcome {
    let model = node_model();
    // oracle: F_3-points of xy = 0 and their cotangent dimensions, by hand
    let mut fiber = Vec::new();
    for x in 0..3u64 {
        for y in 0..3u64 {
            if x * y % 3 == 0 {
                fiber.push((x, y));
            }
        }
    }
    ensure(fiber.len() == 5, || format!("brute force fiber has {} points", fiber.len()))?;
    for pt in model.special_fiber().map_err(|e| e.to_string())? {
        let want = if pt.coords == FiberCoords::Affine(vec![0, 0]) { 2 } else { 1 };
        ensure(pt.cotangent_dimension == want, || format!("cotangent dim at {}", pt.coords))?;
    }

    let k = 5;
    let s = session(model, k)?;
    let stats = s.stats();
    ensure(stats.count == 5 && stats.d_prime == 2, || format!("count {}, d' {}", stats.count, stats.d_prime))?;
    let bound = bound_general(&stats.bound_inputs()).map_err(|e| e.to_string())?;
    ensure(bound == 40, || format!("bound {bound}"))?;

    let pt = ExactPoint::Affine(vec![rat(1, 1), rat(3, 1)]);
    let c = cycle_at(&s, &pt)?;
    let dec = s.decompose(&c).map_err(|e| e.to_string())?;
    ensure(c.period == 2 && dec.n == 2 && dec.n0 == 2, || format!("period {}, {:?}", c.period, dec.tuple()))?;

    // no solution of xy = 3 in (Z/3^k)^2 reduces to the node
    let m = 3u64.pow(k);
    let hits = (0..m)
        .step_by(3)
        .flat_map(|x| (0..m).step_by(3).map(move |y| (x, y)))
        .filter(|&(x, y)| (x * y) % m == 3)
        .count();
    ensure(hits == 0, || format!("{hits} points mod 3^{k} over the node"))?;
    Ok("|X(F_3)| = 5, d' = 2, bound 40, (1,3) has n = n0 = 2, node has no Z_3-points".into())
}

fn criterion_6() -> Outcome {
    // oracle: phi(-1/3) = -1/3 and phi'(-1/3) = 4/3 exactly
    let phi = |z: &BigRational| z + z * z + rat(3, 1) * z * z * z;
    let dphi = |z: &BigRational| rat(1, 1) + rat(2, 1) * z + rat(9, 1) * z * z;
    ensure(phi(&rat(-1, 3)) == rat(-1, 3) && dphi(&rat(-1, 3)) == rat(4, 3), || "oracle".into())?;
    ensure(phi(&rat(0, 1)) == rat(0, 1) && dphi(&rat(0, 1)) == rat(1, 1), || "oracle".into())?;

    let rep = cubic_report(&poly("z + z^2 + 3*z^3", "z", 3), 3, 6, None).map_err(|e| e.to_string())?;
    ensure(rep.p1_extension.is_rejected(), || format!("P^1 extension {:?}", rep.p1_extension))?;
    let finite: Vec<_> = rep.fixed_points.records.iter().filter(|r| r.is_finite()).collect();
    ensure(finite.len() == 2, || format!("{} finite fixed points", finite.len()))?;
    let zero = finite.iter().find(|r| r.location == FixedLocation::Rational(rat(0, 1)));
    ensure(
        zero.is_some_and(|r| r.class == Some(MultiplierClass::Indifferent)),
        || format!("fixed point 0: {zero:?}"),
    )?;
    let third = finite.iter().find(|r| r.location == FixedLocation::Rational(rat(-1, 3)));
    ensure(
        third.is_some_and(|r| {
            r.multiplier == FixedMultiplier::Rational(rat(4, 3)) && r.class == Some(MultiplierClass::Repelling)
        }),
        || format!("fixed point -1/3: {third:?}"),
    )?;
    // the window enumeration must see the same two fixed points
    let window: BTreeSet<String> = rep.certified_fixed().iter().flat_map(|c| exact_set(c)).collect();
    let want: BTreeSet<String> = ["0", "-1/3"].map(String::from).into();
    ensure(window == want, || format!("window fixed points {window:?}"))?;
    ensure(rep.bound.value == 8, || format!("bound {}", rep.bound.value))?;
    ensure(!rep.discrepancies.is_empty(), || "no discrepancy annotation".into())?;
    ensure(rep.all_within_bound(), || format!("max period {}", rep.max_period()))?;
    Ok(format!("P^1 Rejected, fixed {{0 Indifferent, -1/3 (4/3)}}, bound 8, discrepancy, max period {}", rep.max_period()))
}

/// Monic, degree 1 to 3, constant term zero or a unit.
fn random_map(rng: &mut StdRng, p: u64) -> String {
    let d = rng.gen_range(1..=3u32);
    let span = (p * p) as i64;
    let mut terms = vec![format!("x^{d}")];
    for i in (1..d).rev() {
        terms.push(format!("({})*x^{i}", rng.gen_range(-span..=span)));
    }
    let c = if rng.gen_bool(0.25) {
        0
    } else {
        loop {
            let c = rng.gen_range(-span..=span);
            if c.rem_euclid(p as i64) != 0 {
                break c;
            }
        }
    };
    terms.push(format!("({c})"));
    terms.join(" + ")
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (mut maps, mut cycles, mut c4_violations) = (0, 0, 0);
    for p in [3u64, 5, 7] {
        let mut rng = StdRng::seed_from_u64(0x5eed + p);
        for _ in 0..200 {
            let text = random_map(&mut rng, p);
            let s = session(p1_model(&text, p), 6)?;
            maps += 1;
            for c in certified(&s)? {
                cycles += 1;
                let d = s.decompose(&c).map_err(|e| format!("{text} (p={p}): {e}"))?;
                let ctx = || format!("{text} (p={p}) cycle {:?}: {d:?}", c.points);
                let n = c.period as u64;
                ensure(d.n == n && n.is_multiple_of(d.n0), ctx)?;
                ensure(d.mode == DecompositionMode::OrbitRingExact, ctx)?;
                ensure(n == d.n0 * d.r * p.pow(d.t), ctx)?;
                ensure((n / d.n0).is_multiple_of(d.r), ctx)?;
                ensure(d.n0 <= p + 1 && d.r < p, ctx)?;
                ensure(d.dim_mbar <= 1 && d.dim_m <= 2, ctx)?;
                let c4 = verify_paper_claims(&d, &s.stats()).get(Claim::C4).clone();
                if c4.status == Status::Violated {
                    ensure(c4.lhs.is_some() && c4.rhs.is_some(), || format!("C4 without witness: {}", ctx()))?;
                    c4_violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    timed(Duration::from_secs(60), elapsed)?;
    Ok(format!("{maps} maps, {cycles} certified cycles, {c4_violations} C4 violations (witnessed), {elapsed:.2?}"))
}

type Fingerprint = BTreeSet<(Vec<ModelPoint>, (u64, u64, u64, u32))>;

/// Certified cycles as (reduced point set, decomposition tuple), with points
/// truncated to `p^k`.
fn fingerprint(model: &Model, k: u32, at: u32) -> Result<Fingerprint, String> {
    let s = session(model.clone(), at)?;
    let m = model.p().pow(k);
    let cut = |pt: &ModelPoint| match pt {
        ModelPoint::P1(ProjPoint::Finite(a)) => ModelPoint::P1(ProjPoint::Finite(a % m)),
        ModelPoint::P1(ProjPoint::AtInfinity(b)) => ModelPoint::P1(ProjPoint::AtInfinity(b % m)),
        ModelPoint::Affine(v) => ModelPoint::Affine(v.iter().map(|a| a % m).collect()),
        ModelPoint::Window(w) => ModelPoint::Window(w % m),
    };
    let mut out = BTreeSet::new();
    for c in certified(&s)? {
        let mut pts: Vec<ModelPoint> = c.points.iter().map(cut).collect();
        pts.sort();
        let d = s.decompose(&c).map_err(|e| e.to_string())?;
        out.insert((pts, d.tuple()));
    }
    Ok(out)
}

fn criterion_8() -> Outcome {
    let cases = [
        ("x^2 - 4x + 3", p1_model("x^2 - 4*x + 3", 3), 6),
        ("x^2 mod 7", p1_model("x^2", 7), 6),
        ("-x mod 2", p1_model("-x", 2), 5),
        ("x^2 - 29/16", p1_model("x^2 - 29/16", 3), 8),
        ("node", node_model(), 5),
        ("cubic window", cubic_chart(), 6),
    ];
    let mut summary = Vec::new();
    for (name, model, k) in cases {
        let low = fingerprint(&model, k, k)?;
        let high = fingerprint(&model, k, k + 2)?;
        ensure(low == high, || {
            let only_low: Vec<_> = low.difference(&high).collect();
            let only_high: Vec<_> = high.difference(&low).collect();
            format!("{name}: only at k {only_low:?}; only at k+2 {only_high:?}")
        })?;
        summary.push(format!("{name} {}", low.len()));
    }
    Ok(format!("k vs k+2 identical: {}", summary.join(", ")))
}

fn criterion_9() -> Outcome {
    let mut summary = Vec::new();
    for j in [2u32, 3] {
        let shift = 3i64.pow(j);
        let vars = vec!["x".to_string()];
        let map = IntPolynomial::parse(&format!("x + {shift}"), &vars, Some(3)).unwrap();
        let model = Model::Affine(AffineModel::new(3, vars, vec![], vec![map]).map_err(|e| e.to_string())?);
        let s = session(model, j + 2)?;
        let found = s.certify_all().map_err(|e| e.to_string())?;
        ensure(found.certified.is_empty(), || format!("j={j}: {} certified", found.certified.len()))?;
        ensure(!found.uncertified.is_empty(), || format!("j={j}: no raw cycles"))?;
        let all_ip = found.uncertified.iter().all(|(_, r)| *r == UncertifiedReason::IncreasePrecision);
        ensure(all_ip, || format!("j={j}: reasons {:?}", found.uncertified.iter().map(|u| u.1).collect::<Vec<_>>()))?;
        summary.push(format!("j={j}: {} raw, 0 certified", found.uncertified.len()));
    }
    Ok(summary.join("; "))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (i, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {i}: PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {i}: FAIL  {why}");
            }
        }
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
