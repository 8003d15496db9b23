use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{EngineError, RawCycle, Session, Space};
use crate::linalg::FpMatrix;
use crate::models::{ExactP1, ExactPoint, Model, ModelPoint, ProjPoint};
use crate::padic::{rational_reconstruct, Modulus, PAdicApprox, QpValue, Valuation};

/// Largest numerator and denominator tried by rational reconstruction.
const EXACT_HEIGHT: u64 = 10;
/// Reference precision at which reconstruction of height-`H` values must be
/// unique; fixing it keeps the certified set stable as `k` grows.
const EXACT_REFERENCE_PRECISION: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// `Λ - 1` is a unit: Hensel's lemma gives a unique true cycle.
    HenselQuadratic,
    /// `Λ ≡ 0 mod p`: the return map contracts the residue tube.
    Contraction,
    /// Reconstructed rational points verified by exact iteration over `Q`.
    ExactRational,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::HenselQuadratic => "HenselQuadratic",
            Certificate::Contraction => "Contraction",
            Certificate::ExactRational => "ExactRational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertifiedReason {
    /// The multiplier tests are inconclusive at this precision.
    IncreasePrecision,
    /// Cycle points are not distinct modulo `p^(k-1)`.
    NoSeparation,
    /// The base residue is a singular point of the special fiber and no
    /// exact rational cycle was found.
    SingularPoint,
}

impl fmt::Display for UncertifiedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UncertifiedReason::IncreasePrecision => "IncreasePrecision",
            UncertifiedReason::NoSeparation => "NoSeparation",
            UncertifiedReason::SingularPoint => "SingularPoint",
        })
    }
}

/// Derivative of the return map along a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multiplier {
    Scalar(QpValue),
    /// Jacobian of `f^n` at the base point, modulo `p^k`.
    Matrix(Vec<Vec<u64>>),
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Scalar(x) => write!(f, "{x}"),
            Multiplier::Matrix(m) => write!(f, "{m:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedCycle {
    pub points: Vec<ModelPoint>,
    /// Primitive period of the true cycle.
    pub period: usize,
    pub certificate: Certificate,
    pub multiplier: Multiplier,
    /// Exact rational points, when reconstruction succeeded.
    pub exact: Option<Vec<ExactPoint>>,
    /// The true cycle agrees with `points` modulo `p^radius`.
    pub radius: u32,
    /// The points are pairwise distinct modulo `p^separation`.
    pub separation: u32,
}

#[derive(Debug, Clone)]
pub enum Certification {
    Certified(CertifiedCycle),
    Uncertified(UncertifiedReason),
}

/// The multiplier, and either a certificate with its radius or the reason
/// the multiplier test failed (`None`: inconclusive).
type MultiplierTest = (Multiplier, Result<(Certificate, u32), Option<UncertifiedReason>>);

/// Height bound for reconstruction at prime `p`.
pub(crate) fn exact_height(p: u64) -> u64 {
    let reference = (p as u128).saturating_pow(EXACT_REFERENCE_PRECISION);
    (1..=EXACT_HEIGHT)
        .rev()
        .find(|&h| 2 * (h as u128) * (h as u128) < reference)
        .unwrap_or(1)
}

fn reconstruct(ring: &Modulus, x: u64) -> Option<BigRational> {
    let h = exact_height(ring.p());
    if 2 * (h as u128) * (h as u128) >= ring.modulus() as u128 {
        return None;
    }
    rational_reconstruct(ring, x, h, h)
}

impl Session {
    /// Smallest `j` at which the cycle points are pairwise distinct modulo
    /// `p^j` (capped at `k`).
    fn separation(&self, points: &[ModelPoint]) -> u32 {
        let ring = &self.ring;
        if points.len() < 2 {
            return 0;
        }
        let key = |q: &ModelPoint, j: u32| -> Vec<u64> {
            match q {
                ModelPoint::P1(ProjPoint::Finite(a)) => vec![0, ring.truncate(*a, j)],
                ModelPoint::P1(ProjPoint::AtInfinity(b)) => vec![1, ring.truncate(*b, j)],
                ModelPoint::Affine(v) => v.iter().map(|x| ring.truncate(*x, j)).collect(),
                ModelPoint::Window(w) => vec![ring.truncate(*w, j)],
            }
        };
        (1..=ring.k())
            .find(|&j| {
                let mut seen = HashSet::with_capacity(points.len());
                points.iter().all(|q| seen.insert(key(q, j)))
            })
            .unwrap_or(ring.k())
    }

    /// Certify a raw cycle as the reduction of a true periodic cycle in
    /// `𝒳(Z_p)` with primitive period equal to its length.
    pub fn certify(&self, cycle: &RawCycle) -> Result<Certification, EngineError> {
        let (multiplier, verdict) = match &self.space {
            Space::P1(_) => self.p1_multiplier(cycle)?,
            Space::Affine { .. } => self.affine_multiplier(cycle)?,
            Space::Window(_) => self.window_multiplier(cycle),
        };
        let margin = self.ring.k() - 1;
        let separation = self.separation(&cycle.points);
        let mut reason = UncertifiedReason::IncreasePrecision;
        match verdict {
            Ok((certificate, radius)) => {
                if separation <= margin.min(radius) {
                    return Ok(Certification::Certified(CertifiedCycle {
                        period: cycle.len(),
                        points: cycle.points.clone(),
                        certificate,
                        multiplier,
                        exact: self.exact_cycle(cycle),
                        radius,
                        separation,
                    }));
                }
                reason = UncertifiedReason::NoSeparation;
            }
            Err(r) => {
                if let Some(r) = r {
                    reason = r;
                }
            }
        }
        if let Some(exact) = self.exact_cycle(cycle) {
            return Ok(Certification::Certified(CertifiedCycle {
                period: cycle.len(),
                points: cycle.points.clone(),
                certificate: Certificate::ExactRational,
                multiplier,
                exact: Some(exact),
                radius: self.ring.k(),
                separation,
            }));
        }
        Ok(Certification::Uncertified(reason))
    }

    fn p1_multiplier(&self, cycle: &RawCycle) -> Result<MultiplierTest, EngineError> {
        let Space::P1(kern) = &self.space else { unreachable!() };
        let ring = &self.ring;
        let pts: Vec<ProjPoint> = cycle
            .points
            .iter()
            .map(|p| match p {
                ModelPoint::P1(x) => *x,
                _ => unreachable!(),
            })
            .collect();
        let n = pts.len();
        let mut lambda = 1;
        for i in 0..n {
            let (src, dst) = (pts[i], pts[(i + 1) % n]);
            let d = kern
                .chart_derivative(src.is_finite(), src.chart_value(), dst.is_finite())
                .ok_or_else(|| EngineError::Internal(format!("chart derivative at {src}")))?;
            lambda = ring.mul(lambda, d);
        }
        // the multiplier is chart independent; check it on unit points
        if pts.iter().all(|x| x.is_finite() && ring.is_unit(x.chart_value())) {
            let mut other = 1;
            let mut ok = true;
            for i in 0..n {
                let w = ring.inv(pts[i].chart_value()).expect("unit");
                match kern.chart_derivative(false, w, false) {
                    Some(d) => other = ring.mul(other, d),
                    None => ok = false,
                }
            }
            if ok && other != lambda {
                return Err(EngineError::Internal(format!(
                    "multiplier differs between charts: {lambda} vs {other}"
                )));
            }
        }
        let k = ring.k();
        let multiplier = Multiplier::Scalar(QpValue::integral(PAdicApprox::new(*ring, lambda)));
        let verdict = if ring.valuation(lambda).lower_bound() >= 1 {
            Ok((Certificate::Contraction, k))
        } else if ring.valuation(ring.sub(lambda, 1)) == Valuation::Exact(0) {
            Ok((Certificate::HenselQuadratic, k))
        } else {
            Err(None)
        };
        Ok((multiplier, verdict))
    }

    fn affine_multiplier(&self, cycle: &RawCycle) -> Result<MultiplierTest, EngineError> {
        let Space::Affine { kernel, .. } = &self.space else { unreachable!() };
        let Model::Affine(model) = &self.model else { unreachable!() };
        let ring = &self.ring;
        let p = ring.p();
        let pts: Vec<&Vec<u64>> = cycle
            .points
            .iter()
            .map(|q| match q {
                ModelPoint::Affine(v) => v,
                _ => unreachable!(),
            })
            .collect();
        let dim = model.ambient_dimension();
        // D(f^n)(a_0) = Df(a_{n-1}) ··· Df(a_0)
        let mut df = identity(dim);
        for a in &pts {
            df = matmul(ring, &kernel.map_jacobian(a), &df);
        }
        let multiplier = Multiplier::Matrix(df.clone());
        let base: Vec<u64> = pts[0].iter().map(|x| x % p).collect();
        let jh = model.relation_jacobian(&base)?;
        if jh.rank() != model.relations().len() {
            return Ok((multiplier, Err(Some(UncertifiedReason::SingularPoint))));
        }
        let free: Vec<usize> = {
            let pivots = if jh.rows() == 0 { Vec::new() } else { jh.rref().1 };
            (0..dim).filter(|c| !pivots.contains(c)).collect()
        };
        let mut rows = jh.to_rows();
        for &c in &free {
            rows.push(
                (0..dim)
                    .map(|j| {
                        let id = u64::from(c == j);
                        (df[c][j] % p + p - id) % p
                    })
                    .collect(),
            );
        }
        let system = FpMatrix::from_rows(p, &rows);
        let contraction = df.iter().flatten().all(|x| x % p == 0);
        let verdict = if system.is_invertible() {
            let cert = if contraction { Certificate::Contraction } else { Certificate::HenselQuadratic };
            Ok((cert, ring.k()))
        } else {
            Err(None)
        };
        Ok((multiplier, verdict))
    }

    /// Certification in the scaled coordinate. The cycle equations
    /// `p^M w_(i+1) - Ñ(w_i) = 0` with `M = B(D-1)` hold modulo `p^(k+M)` at
    /// the representatives, and their Jacobian determinant is
    /// `± (Π Ñ'(w_i) - p^(nM))`; multivariate Hensel applies when its
    /// valuation `δ` satisfies `k + M > 2δ`.
    fn window_multiplier(&self, cycle: &RawCycle) -> MultiplierTest {
        let Space::Window(kern) = &self.space else { unreachable!() };
        let ring = &self.ring;
        let wide = kern.wide();
        let m = kern.shift();
        let n = cycle.len() as u32;
        let mut prod = 1;
        for q in &cycle.points {
            let ModelPoint::Window(w) = q else { unreachable!() };
            prod = wide.mul(prod, kern.scaled_derivative(*w));
        }
        let pnm = if n * m < wide.k() { wide.pow(ring.p(), (n * m) as u64) } else { 0 };
        let det = wide.sub(prod, pnm);
        let lambda = QpValue {
            scale: -((n * m) as i32),
            mantissa: PAdicApprox::new(*ring, prod % ring.modulus()),
        };
        let multiplier = Multiplier::Scalar(lambda);
        let verdict = match wide.valuation(det) {
            Valuation::Exact(delta) if ring.k() + m > 2 * delta => {
                let radius = (ring.k() + m - delta).min(ring.k());
                let cert = if lambda.valuation_lower_bound() >= 1 {
                    Certificate::Contraction
                } else {
                    Certificate::HenselQuadratic
                };
                Ok((cert, radius))
            }
            _ => Err(None),
        };
        (multiplier, verdict)
    }

    /// Reconstruct every point as a small-height rational and verify the
    /// cycle by exact iteration.
    pub(crate) fn exact_cycle(&self, cycle: &RawCycle) -> Option<Vec<ExactPoint>> {
        let ring = &self.ring;
        let mut exact = Vec::with_capacity(cycle.len());
        for q in &cycle.points {
            exact.push(match q {
                ModelPoint::P1(ProjPoint::Finite(a)) => ExactPoint::P1(ExactP1::Finite(reconstruct(ring, *a)?)),
                ModelPoint::P1(ProjPoint::AtInfinity(b)) => {
                    let w = reconstruct(ring, *b)?;
                    ExactPoint::P1(if w.is_zero() { ExactP1::Infinity } else { ExactP1::Finite(w.recip()) })
                }
                ModelPoint::Affine(v) => ExactPoint::Affine(
                    v.iter().map(|x| reconstruct(ring, *x)).collect::<Option<Vec<_>>>()?,
                ),
                ModelPoint::Window(w) => {
                    let Model::PolyChart(m) = &self.model else { return None };
                    let pb = BigRational::from_integer(num_traits::pow(BigInt::from(ring.p()), m.floor() as usize));
                    ExactPoint::Window(reconstruct(ring, *w)? / pb)
                }
            });
        }
        let n = exact.len();
        let distinct: HashSet<&ExactPoint> = exact.iter().collect();
        if distinct.len() != n {
            return None;
        }
        for i in 0..n {
            let image = self.apply_exact(&exact[i])?;
            if image != exact[(i + 1) % n] {
                return None;
            }
        }
        Some(exact)
    }

    /// `f` over `Q`; `None` off the model or where `f` is undefined.
    pub fn apply_exact(&self, x: &ExactPoint) -> Option<ExactPoint> {
        match (&self.model, x) {
            (Model::P1(m), ExactPoint::P1(q)) => Some(ExactPoint::P1(m.apply_exact(q))),
            (Model::Affine(m), ExactPoint::Affine(v)) => {
                if !m.on_model_exact(v) {
                    return None;
                }
                Some(ExactPoint::Affine(m.apply_exact(v)))
            }
            (Model::PolyChart(m), ExactPoint::Window(z)) => Some(ExactPoint::Window(m.apply_exact(z))),
            _ => None,
        }
    }
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub(crate) fn matmul(ring: &Modulus, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..b.len()).fold(0, |acc, l| ring.add(acc, ring.mul(a[i][l], b[l][j])))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tests::p1_session;

    fn certify_through(s: &Session, x: ProjPoint) -> Certification {
        let raw = s.cycle_through(&ModelPoint::P1(x)).unwrap();
        s.certify(&raw).unwrap()
    }

    #[test]
    fn contraction_on_x_squared_minus_one() {
        let s = p1_session("x^2 - 1", 3, 6);
        match certify_through(&s, ProjPoint::Finite(0)) {
            Certification::Certified(c) => {
                assert_eq!(c.certificate, Certificate::Contraction);
                assert_eq!(c.period, 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hensel_on_squaring_two_cycle() {
        let s = p1_session("x^2", 7, 4);
        let ring = Modulus::new(7, 4).unwrap();
        // ω = primitive cube root of unity ≡ 2 mod 7
        let omega = (0..ring.modulus()).find(|&x| x % 7 == 2 && ring.pow(x, 3) == 1).unwrap();
        match certify_through(&s, ProjPoint::Finite(omega)) {
            Certification::Certified(c) => {
                assert_eq!(c.certificate, Certificate::HenselQuadratic);
                assert_eq!(c.period, 2);
                match c.multiplier {
                    Multiplier::Scalar(l) => assert_eq!(l.mantissa.value(), 4),
                    _ => unreachable!(),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn translation_is_never_certified() {
        for j in 1..=3u32 {
            let s = p1_session(&format!("x + 3^{j}"), 3, j + 2);
            let all = s.certify_all().unwrap();
            let finite: Vec<_> = all
                .certified
                .iter()
                .filter(|c| !matches!(c.points[0], ModelPoint::P1(ProjPoint::AtInfinity(_))))
                .collect();
            assert!(finite.is_empty(), "j = {j}: {finite:?}");
            assert!(all
                .uncertified
                .iter()
                .all(|(_, r)| *r == UncertifiedReason::IncreasePrecision));
        }
    }

    #[test]
    fn exact_rational_two_cycle() {
        let s = p1_session("x^2 - 4*x + 3", 3, 6);
        match certify_through(&s, ProjPoint::Finite(0)) {
            Certification::Certified(c) => {
                assert_eq!(c.certificate, Certificate::ExactRational);
                assert_eq!(c.period, 2);
                let ex = c.exact.unwrap();
                assert_eq!(ex[1], ExactPoint::P1(ExactP1::Finite(BigRational::from_integer(3.into()))));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn height_bound_is_fixed_per_prime() {
        assert_eq!(exact_height(2), 3);
        assert_eq!(exact_height(3), 10);
        assert_eq!(exact_height(7), 10);
    }
}
