//! Fixed points of polynomial maps over `Q_p` and the cubic workflow: find
//! the fixed points, classify their multipliers, and compare the observed
//! periods with the cubic bound.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bounds::{bound_cubic, BoundError};
use crate::engine::{CertifiedCycle, EngineError, Session};
use crate::models::{Extension, Model, ModelError, ModelPoint, PolyChart, RationalMapP1};
use crate::padic::{big_pow, rational_reconstruct, rational_valuation, Modulus, PAdicApprox, PadicError, QpValue};
use crate::poly::{DenseModPoly, IntPolynomial};
use crate::report::Discrepancy;

/// Numerator and denominator bound for recognizing rational fixed points.
const ROOT_HEIGHT: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubicError {
    #[error("every point is fixed: φ(z) = z")]
    AllPointsFixed,
    #[error("φ is constant")]
    Constant,
    #[error("the cubic workflow needs degree 3, got {0}")]
    NotCubic(u32),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MultiplierClass {
    Attracting,
    Indifferent,
    Repelling,
}

impl fmt::Display for MultiplierClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Class from the valuation of `λ`; `None` means `λ = 0`.
pub fn classify_valuation(v: Option<i64>) -> MultiplierClass {
    match v {
        None => MultiplierClass::Attracting,
        Some(v) if v > 0 => MultiplierClass::Attracting,
        Some(0) => MultiplierClass::Indifferent,
        Some(_) => MultiplierClass::Repelling,
    }
}

pub fn classify_multiplier(lambda: &BigRational, p: u64) -> MultiplierClass {
    classify_valuation(rational_valuation(lambda, p))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedLocation {
    Rational(BigRational),
    /// A root of `φ(z) - z` in `Q_p` not recognized as rational.
    Approx(QpValue),
    Infinity,
}

impl fmt::Display for FixedLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedLocation::Rational(x) => write!(f, "{x}"),
            FixedLocation::Approx(x) => write!(f, "{x} (p-adic)"),
            FixedLocation::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedMultiplier {
    Rational(BigRational),
    Approx(QpValue),
    Superattracting,
}

impl fmt::Display for FixedMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedMultiplier::Rational(x) => write!(f, "{x}"),
            FixedMultiplier::Approx(x) => write!(f, "{x}"),
            FixedMultiplier::Superattracting => write!(f, "superattracting"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointRecord {
    pub location: FixedLocation,
    pub multiplier: FixedMultiplier,
    /// `None` when the precision cannot resolve `v(λ)`.
    pub class: Option<MultiplierClass>,
}

impl FixedPointRecord {
    pub fn is_finite(&self) -> bool {
        !matches!(self.location, FixedLocation::Infinity)
    }
}

/// Root search outcome: records plus residue branches that did not separate
/// within the precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoints {
    pub records: Vec<FixedPointRecord>,
    pub unresolved: Vec<String>,
}

type Dense = Vec<BigRational>;

fn trim(mut a: Dense) -> Dense {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn divmod(a: &Dense, b: &Dense) -> (Dense, Dense) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn gcd(a: &Dense, b: &Dense) -> Dense {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = divmod(&a, &b).1;
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &Dense) -> Dense {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect()
}

/// Integer polynomial with coprime coefficients, same roots.
fn primitive(a: &Dense) -> Vec<BigInt> {
    let lcm = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = a.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn eval_int(g: &[BigInt], x: &BigInt) -> BigInt {
    g.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// `g(r + p y)`, divided by the largest power of `p` dividing every
/// coefficient.
fn expand(g: &[BigInt], r: u64, p: u64) -> Vec<BigInt> {
    // Taylor shift by r, then scale y by p
    let mut c: Vec<BigInt> = g.to_vec();
    let r = BigInt::from(r);
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * &r;
            c[j] += t;
        }
    }
    let pb = BigInt::from(p);
    let mut scale = BigInt::one();
    for coeff in c.iter_mut() {
        *coeff *= &scale;
        scale *= &pb;
    }
    remove_p_content(c, p)
}

fn remove_p_content(mut c: Vec<BigInt>, p: u64) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    while c.iter().all(|x| (x % &pb).is_zero()) && c.iter().any(|x| !x.is_zero()) {
        for x in c.iter_mut() {
            *x /= &pb;
        }
    }
    c
}

fn newton_simple(g: &[BigInt], ring: &Modulus, start: u64) -> Option<u64> {
    let coeffs: Vec<BigRational> = g.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let f = DenseModPoly::from_rationals(ring, &coeffs).ok()?;
    let df = f.derivative(ring);
    let mut y = start % ring.modulus();
    for _ in 0..128 {
        let fy = f.eval(ring, y);
        if fy == 0 {
            return Some(y);
        }
        y = ring.sub(y, ring.mul(fy, ring.inv(df.eval(ring, y))?));
    }
    None
}

/// Roots in `Z_p` (units only when `units_only`) of a squarefree integer
/// polynomial, modulo `p^k`.
fn roots_zp(g: &[BigInt], p: u64, k: u32, units_only: bool, unresolved: &mut Vec<String>) -> Vec<u64> {
    let mut out = Vec::new();
    let g = remove_p_content(g.to_vec(), p);
    search(&g, p, k, 0, 0, units_only, &mut out, unresolved);
    out.sort_unstable();
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &[BigInt],
    p: u64,
    k: u32,
    level: u32,
    prefix: u64,
    units_only: bool,
    out: &mut Vec<u64>,
    unresolved: &mut Vec<String>,
) {
    let pb = BigInt::from(p);
    let dg: Vec<BigInt> = g.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let pl = p.pow(level);
    for r in 0..p {
        if level == 0 && units_only && r == 0 {
            continue;
        }
        let rb = BigInt::from(r);
        if !(eval_int(g, &rb) % &pb).is_zero() {
            continue;
        }
        let here = prefix + pl * r;
        if !(eval_int(&dg, &rb) % &pb).is_zero() {
            let ring = Modulus::new(p, k - level).expect("valid precision");
            if let Some(y) = newton_simple(g, &ring, r) {
                out.push(here - pl * r + pl * y);
            }
        } else if level + 1 >= k {
            unresolved.push(format!("{here} mod {p}^{}", level + 1));
        } else {
            search(&expand(g, r, p), p, k, level + 1, here, false, out, unresolved);
        }
    }
}

/// All roots of `φ(x) - x` with `v(x) >= -floor`, each with its multiplier
/// `φ'(x)`, followed by the superattracting point at infinity.
pub fn fixed_points_affine(phi: &IntPolynomial, p: u64, floor: u32, k: u32) -> Result<FixedPoints, CubicError> {
    let ring = Modulus::new(p, k)?;
    let coeffs = phi.dense();
    if coeffs.len() < 2 {
        return Err(CubicError::Constant);
    }
    let mut h = coeffs.clone();
    h[1] -= BigRational::one();
    let h = trim(h);
    if h.is_empty() {
        return Err(CubicError::AllPointsFixed);
    }
    let dphi = phi.derivative(0);
    let mut records = Vec::new();
    let mut unresolved = Vec::new();
    if h.len() > 1 {
        let g = gcd(&h, &derivative(&h));
        let squarefree = divmod(&h, &g).0;
        let base = primitive(&squarefree);
        let d = base.len() - 1;
        for j in 0..=floor {
            // p^(jd) h(y / p^j)
            let scaled: Vec<BigInt> = base
                .iter()
                .enumerate()
                .map(|(i, c)| c * big_pow(p, j * (d - i) as u32))
                .collect();
            for y in roots_zp(&scaled, p, k, j > 0, &mut unresolved) {
                let location = locate(&ring, &h, y, j);
                let (multiplier, class) = match &location {
                    FixedLocation::Rational(x) => {
                        let lambda = dphi.eval_rational(std::slice::from_ref(x));
                        let class = classify_multiplier(&lambda, p);
                        (FixedMultiplier::Rational(lambda), Some(class))
                    }
                    _ => {
                        let lambda = approx_multiplier(&ring, &coeffs, y, j)?;
                        let class = match lambda.valuation() {
                            Some(v) => Some(classify_valuation(Some(v))),
                            None if lambda.valuation_lower_bound() > 0 => Some(MultiplierClass::Attracting),
                            None => None,
                        };
                        (FixedMultiplier::Approx(lambda), class)
                    }
                };
                records.push(FixedPointRecord { location, multiplier, class });
            }
        }
    }
    if coeffs.len() > 2 {
        records.push(FixedPointRecord {
            location: FixedLocation::Infinity,
            multiplier: FixedMultiplier::Superattracting,
            class: Some(MultiplierClass::Attracting),
        });
    }
    Ok(FixedPoints { records, unresolved })
}

/// Recognition height: `ROOT_HEIGHT`, capped where reconstruction stops being unique.
fn root_height(ring: &Modulus) -> u64 {
    ROOT_HEIGHT.min(((ring.modulus() - 1) / 2).isqrt())
}

fn locate(ring: &Modulus, h: &Dense, y: u64, j: u32) -> FixedLocation {
    let pj = BigRational::from_integer(big_pow(ring.p(), j));
    if let Some(q) = rational_reconstruct(ring, y, root_height(ring), root_height(ring)) {
        let x = q / &pj;
        let hx = h.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c);
        if hx.is_zero() {
            return FixedLocation::Rational(x);
        }
    }
    FixedLocation::Approx(QpValue { scale: -(j as i32), mantissa: PAdicApprox::new(*ring, y) })
}

/// `φ'(y / p^j) = p^(-j(D-1)) Σ i a_i y^(i-1) p^(j(D-i))`.
fn approx_multiplier(ring: &Modulus, coeffs: &[BigRational], y: u64, j: u32) -> Result<QpValue, PadicError> {
    let d = coeffs.len() - 1;
    let mut acc = 0;
    for i in (1..=d).rev() {
        let c = coeffs[i].clone()
            * BigRational::from_integer(BigInt::from(i) * big_pow(ring.p(), j * (d - i) as u32));
        acc = ring.add(ring.mul(acc, y), ring.from_rational(&c)?);
    }
    Ok(QpValue { scale: -((j as usize * (d - 1)) as i32), mantissa: PAdicApprox::new(*ring, acc) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// Rests on an external theorem the tool does not re-prove.
    Conditional,
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicBound {
    pub value: u128,
    pub status: BoundStatus,
    /// No rational repelling fixed point was found.
    pub hypothesis_satisfied: bool,
}

/// An observed cycle of the window enumeration against the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCheck {
    pub cycle: CertifiedCycle,
    pub within_bound: bool,
}

#[derive(Debug, Clone)]
pub struct CubicReport {
    pub p: u64,
    pub precision: u32,
    pub polynomial: IntPolynomial,
    pub floor: u32,
    pub derived_floor: u32,
    /// Whether the map extends to an endomorphism of `P^1` over `Z_p`.
    pub p1_extension: Extension,
    pub fixed_points: FixedPoints,
    pub has_rational_repelling: bool,
    pub bound: CubicBound,
    pub periods: Vec<PeriodCheck>,
    /// Raw cycles of the window map that were not certified.
    pub uncertified: usize,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
    /// The window session the periods were enumerated in.
    pub session: Session,
}

impl CubicReport {
    /// Certified fixed points of the window map, as `z` values mod `p^(k-B)`
    /// scaled back by the floor.
    pub fn certified_fixed(&self) -> Vec<&CertifiedCycle> {
        self.periods.iter().filter(|c| c.cycle.period == 1).map(|c| &c.cycle).collect()
    }

    pub fn max_period(&self) -> usize {
        self.periods.iter().map(|c| c.cycle.period).max().unwrap_or(0)
    }

    pub fn all_within_bound(&self) -> bool {
        self.periods.iter().all(|c| c.within_bound)
    }
}

/// Fixed points, the cubic bound, and the window enumeration for a cubic
/// polynomial over `Q_p`, `p > 2`.
pub fn cubic_report(
    phi: &IntPolynomial,
    p: u64,
    k: u32,
    floor_override: Option<u32>,
) -> Result<CubicReport, CubicError> {
    let degree = phi.total_degree().unwrap_or(0);
    if degree != 3 {
        return Err(CubicError::NotCubic(degree));
    }
    let value = bound_cubic(p, 1, p)?;
    let chart = PolyChart::new(p, phi.clone(), floor_override)?;
    let p1_extension = match RationalMapP1::polynomial(p, phi) {
        Ok(m) => m.check_extends(),
        Err(e) => Extension::Rejected(e.to_string()),
    };
    let fixed_points = fixed_points_affine(phi, p, chart.floor(), k)?;
    let has_rational_repelling = fixed_points
        .records
        .iter()
        .any(|r| r.is_finite() && r.class == Some(MultiplierClass::Repelling));

    let floor = chart.floor();
    let derived_floor = chart.derived_floor();
    let session = Session::new(Model::PolyChart(chart), k)?;
    let enumeration = session.certify_all()?;
    let periods = enumeration
        .certified
        .into_iter()
        .map(|cycle| PeriodCheck { within_bound: cycle.period as u128 <= value, cycle })
        .collect();

    let mut discrepancies = Vec::new();
    let family: Vec<BigRational> =
        [0, 1, 1, p as i64].iter().map(|&c| BigRational::from_integer(c.into())).collect();
    if phi.dense() == family && has_rational_repelling {
        let repelling = fixed_points
            .records
            .iter()
            .find(|r| r.is_finite() && r.class == Some(MultiplierClass::Repelling))
            .expect("flagged above");
        discrepancies.push(Discrepancy {
            id: "cubic-repelling-fixed-point".into(),
            claim: format!("z + z^2 + {p}z^3 admits no Q_{p}-rational repelling fixed point"),
            computed: format!(
                "z = {} is fixed with multiplier {} ({})",
                repelling.location,
                repelling.multiplier,
                repelling.class.expect("classified")
            ),
        });
    }
    let notes = vec![
        "repelling detection covers fixed points only, not longer repelling cycles".into(),
        format!("bound {value} is conditional on the cited cubic theorem and applies when no rational repelling fixed point exists"),
    ];
    Ok(CubicReport {
        p,
        precision: k,
        polynomial: phi.clone(),
        floor,
        derived_floor,
        p1_extension,
        fixed_points,
        has_rational_repelling,
        bound: CubicBound { value, status: BoundStatus::Conditional, hypothesis_satisfied: !has_rational_repelling },
        periods,
        uncertified: enumeration.uncertified.len(),
        discrepancies,
        notes,
        session,
    })
}

/// `z` for a window point `w = p^B z`, when it is rational and small.
pub fn window_value(session: &Session, pt: &ModelPoint) -> Option<BigRational> {
    let (Model::PolyChart(chart), ModelPoint::Window(w)) = (session.model(), pt) else {
        return None;
    };
    let ring = session.ring();
    let q = rational_reconstruct(ring, *w, root_height(ring), root_height(ring))?;
    Some(q / BigRational::from_integer(big_pow(chart.p(), chart.floor())))
}
