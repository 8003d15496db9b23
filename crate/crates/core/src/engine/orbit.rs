use std::fmt;

use super::{CertifiedCycle, EngineError, Session, Space};
use crate::linalg::FpMatrix;
use crate::models::{FiberCoords, Model, ModelPoint, P1Kernel, P1Residue};
use crate::padic::{Modulus, PadicError};
use crate::poly::DenseModPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionMode {
    /// Computed in the orbit ring; `n = n₀ r p^t` holds exactly.
    OrbitRingExact,
    /// Computed from the ambient Jacobian; only `n | n₀ r p^t_max` is claimed.
    AmbientCertificate,
}

impl fmt::Display for DecompositionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The orbit ring data behind an exact decomposition: `A = (Z/p^k)[y]/(u)`
/// with `y` centered at the residue, and `σ(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitData {
    /// Precision of `u` and `σ`.
    pub precision: u32,
    /// The residue the chart coordinate is centered at.
    pub center: u64,
    /// Monic `u`, low degree first.
    pub u: Vec<u64>,
    /// `σ(y)` reduced modulo `u`, low degree first.
    pub sigma: Vec<u64>,
}

/// `n = n₀ · r · p^t` for one certified cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodDecomposition {
    pub n: u64,
    pub n0: u64,
    pub s: u64,
    pub r: u64,
    pub t: u32,
    /// Equal to `t` in exact mode; the smallest `t` with `s | r p^t` otherwise.
    pub t_max: u32,
    /// `dim m/m²` for the orbit ring.
    pub dim_m: u32,
    /// `dim m̄/m̄²` for its special fiber.
    pub dim_mbar: u32,
    pub sigma_bar: FpMatrix,
    pub mode: DecompositionMode,
    /// Order of σ on `m/m²` when it differs from `r`.
    pub r_full: Option<u64>,
    pub orbit: Option<OrbitData>,
}

impl PeriodDecomposition {
    /// `(n, n₀, r, t)`.
    pub fn tuple(&self) -> (u64, u64, u64, u32) {
        (self.n, self.n0, self.r, self.t)
    }
}

impl fmt::Display for PeriodDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {} = n0 {} * r {} * p^{} (s = {}, dims {}/{}, {})",
            self.n, self.n0, self.r, self.t, self.s, self.dim_m, self.dim_mbar, self.mode
        )
    }
}

/// `(Z/p^k)[y]/(u)` for monic `u`. Elements are coefficient vectors of length
/// `deg u`.
#[derive(Debug, Clone)]
pub struct OrbitRing {
    ring: Modulus,
    u: Vec<u64>,
}

impl OrbitRing {
    /// The ring with `u = Π (y - root)`.
    pub fn from_roots(ring: Modulus, roots: &[u64]) -> Self {
        let mut u = vec![1];
        for &a in roots {
            let mut next = vec![0; u.len() + 1];
            for (i, &c) in u.iter().enumerate() {
                next[i + 1] = ring.add(next[i + 1], c);
                next[i] = ring.sub(next[i], ring.mul(c, a));
            }
            u = next;
        }
        OrbitRing { ring, u }
    }

    pub fn ring(&self) -> &Modulus {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.u.len() - 1
    }

    pub fn relation(&self) -> &[u64] {
        &self.u
    }

    pub fn constant(&self, c: u64) -> Vec<u64> {
        let mut e = vec![0; self.degree()];
        e[0] = c % self.ring.modulus();
        self.reduce(e)
    }

    pub fn generator(&self) -> Vec<u64> {
        let mut e = vec![0; self.degree().max(2)];
        e[1] = 1;
        self.reduce(e)
    }

    fn reduce(&self, mut e: Vec<u64>) -> Vec<u64> {
        let s = self.degree();
        let r = &self.ring;
        for d in (s..e.len()).rev() {
            let c = e[d];
            if c != 0 {
                for j in 0..s {
                    e[d - s + j] = r.sub(e[d - s + j], r.mul(c, self.u[j]));
                }
                e[d] = 0;
            }
        }
        e.resize(s, 0);
        e
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.ring.add(*x, *y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(*x, *y)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = &self.ring;
        let mut out = vec![0; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = r.add(out[i + j], r.mul(x, y));
            }
        }
        self.reduce(out)
    }

    /// Inverse of a unit, by Newton iteration from the inverse of the
    /// constant term. The ring is local with `m^(deg u · k) = 0`.
    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        let one = self.constant(1);
        let mut x = self.constant(self.ring.inv(a[0])?);
        for _ in 0..64 {
            let e = self.sub(&one, &self.mul(a, &x));
            if e.iter().all(|&c| c == 0) {
                return Some(x);
            }
            x = self.add(&x, &self.mul(&x, &e));
        }
        None
    }

    /// `poly(a)` by Horner's rule.
    pub fn eval(&self, poly: &DenseModPoly, a: &[u64]) -> Vec<u64> {
        let mut acc = self.constant(0);
        for &c in poly.coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, a), &self.constant(c));
        }
        acc
    }

    /// The element evaluated at `y = x`; a ring map when `u(x) = 0`.
    pub fn eval_at(&self, a: &[u64], x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.ring.add(self.ring.mul(acc, x), c))
    }
}

/// One step of the map between chart coordinates on a curve.
enum CurveMap<'a> {
    /// `charts[i]` is true when the i-th cycle point uses the finite chart.
    P1 { kern: &'a P1Kernel, charts: Vec<bool> },
    Poly { map: DenseModPoly, deriv: DenseModPoly },
}

impl CurveMap<'_> {
    fn step(&self, a: &OrbitRing, i: usize, t: &[u64]) -> Result<Vec<u64>, EngineError> {
        match self {
            CurveMap::P1 { kern, charts } => {
                let (src, dst) = (charts[i], charts[i + 1]);
                let (f, g) = if src { (&kern.fx, &kern.gx) } else { (&kern.fw, &kern.gw) };
                let (fv, gv) = (a.eval(f, t), a.eval(g, t));
                let (num, den) = if dst { (fv, gv) } else { (gv, fv) };
                let inv = a
                    .inverse(&den)
                    .ok_or_else(|| EngineError::Internal("chart denominator is not a unit".into()))?;
                Ok(a.mul(&num, &inv))
            }
            CurveMap::Poly { map, .. } => Ok(a.eval(map, t)),
        }
    }

    fn derivative(&self, ring: &Modulus, i: usize, t: u64) -> Option<u64> {
        match self {
            CurveMap::P1 { kern, charts } => kern.chart_derivative(charts[i], t, charts[i + 1]),
            CurveMap::Poly { deriv, .. } => Some(deriv.eval(ring, t)),
        }
    }
}

fn residue_period(res: &[FiberCoords]) -> usize {
    let n = res.len();
    (1..=n)
        .find(|d| n.is_multiple_of(*d) && (0..n).all(|i| res[i] == res[(i + d) % n]))
        .unwrap_or(n)
}

fn log_p(mut x: u64, p: u64) -> Option<u32> {
    let mut t = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        t += 1;
    }
    (x == 1).then_some(t)
}

impl Session {
    /// `n = n₀ · r · p^t` for a certified cycle.
    pub fn decompose(&self, cycle: &CertifiedCycle) -> Result<PeriodDecomposition, EngineError> {
        let n = cycle.points.len();
        let residues = self.residues(&cycle.points);
        let n0 = residue_period(&residues);
        if let Some(graph) = &self.graph {
            let (tail, len) = graph
                .residual_data(&residues[0])
                .ok_or_else(|| EngineError::Internal(format!("{} is not in the fiber", residues[0])))?;
            if tail != 0 || len != n0 {
                return Err(EngineError::Internal(format!(
                    "residue cycle length {len} (tail {tail}) disagrees with the reduced orbit ({n0})"
                )));
            }
        }
        let s = (n / n0) as u64;
        if s == 1 {
            return Ok(PeriodDecomposition {
                n: n as u64,
                n0: n0 as u64,
                s,
                r: 1,
                t: 0,
                t_max: 0,
                dim_m: 1,
                dim_mbar: 0,
                sigma_bar: FpMatrix::zeros(self.ring.p(), 0, 0),
                mode: DecompositionMode::OrbitRingExact,
                r_full: None,
                orbit: None,
            });
        }
        match (&self.space, &self.model) {
            (Space::P1(kern), _) => {
                let charts = (0..=n0)
                    .map(|i| match &cycle.points[i % n] {
                        ModelPoint::P1(x) => x.is_finite(),
                        _ => unreachable!(),
                    })
                    .collect();
                let coords: Vec<u64> = cycle
                    .points
                    .iter()
                    .map(|q| match q {
                        ModelPoint::P1(x) => x.chart_value(),
                        _ => unreachable!(),
                    })
                    .collect();
                let precision = cycle.radius.min(self.ring.k());
                self.curve(n0, &coords, self.ring, precision, CurveMap::P1 { kern, charts })
            }
            (Space::Affine { .. }, Model::Affine(m)) if m.ambient_dimension() == 1 && m.relations().is_empty() => {
                let coords: Vec<u64> = cycle
                    .points
                    .iter()
                    .map(|q| match q {
                        ModelPoint::Affine(v) => v[0],
                        _ => unreachable!(),
                    })
                    .collect();
                let map = DenseModPoly::from_rationals(&self.ring, &m.map()[0].dense())?;
                let deriv = map.derivative(&self.ring);
                let precision = cycle.radius.min(self.ring.k());
                self.curve(n0, &coords, self.ring, precision, CurveMap::Poly { map, deriv })
            }
            (Space::Affine { .. }, Model::Affine(_)) => self.ambient(n, n0, &residues),
            (Space::Window(_), Model::PolyChart(chart)) => {
                if residues[0] == FiberCoords::P1(P1Residue::Infinity) {
                    return Err(EngineError::Unsupported(
                        "decomposition of a window cycle with non-integral points".into(),
                    ));
                }
                let b = chart.floor();
                let zring = self.ring.with_precision(self.ring.k() - b)?;
                let pb = self.ring.p().pow(b);
                let coords: Vec<u64> = cycle
                    .points
                    .iter()
                    .map(|q| match q {
                        ModelPoint::Window(w) => (w / pb) % zring.modulus(),
                        _ => unreachable!(),
                    })
                    .collect();
                let map = DenseModPoly::from_rationals(&zring, &chart.polynomial().dense())?;
                let deriv = map.derivative(&zring);
                let precision = cycle.radius.min(self.ring.k()).saturating_sub(b);
                self.curve(n0, &coords, zring, precision, CurveMap::Poly { map, deriv })
            }
            _ => unreachable!("space and model kinds agree"),
        }
    }

    /// Orbit ring decomposition for a cycle on a curve, in one chart
    /// coordinate. `coords` hold the chart value of every cycle point.
    fn curve(
        &self,
        n0: usize,
        coords: &[u64],
        ring: Modulus,
        precision: u32,
        map: CurveMap<'_>,
    ) -> Result<PeriodDecomposition, EngineError> {
        let n = coords.len();
        let s = n / n0;
        let p = ring.p();
        if precision < 2 {
            return Err(PadicError::PrecisionExhausted(format!(
                "orbit ring needs the cycle to precision 2, have {precision}"
            ))
            .into());
        }
        let center = coords[0] % p;
        let roots: Vec<u64> = (0..s).map(|j| ring.sub(coords[j * n0], center)).collect();
        let a = OrbitRing::from_roots(ring, &roots);
        let u = a.relation().to_vec();
        if u[..s].iter().any(|c| c % p != 0) {
            return Err(EngineError::Internal("orbit polynomial does not reduce to y^s".into()));
        }

        // σ(y) = g(y + c) - c, chart by chart
        let mut t = a.add(&a.generator(), &a.constant(center));
        for i in 0..n0 {
            t = map.step(&a, i, &t)?;
        }
        let sigma = a.sub(&t, &a.constant(center));
        for j in 0..s {
            if a.eval_at(&sigma, roots[j]) != roots[(j + 1) % s] {
                return Err(EngineError::Internal(format!("σ does not permute the orbit at j = {j}")));
            }
        }
        if !sigma[0].is_multiple_of(p) {
            return Err(EngineError::Internal("σ does not preserve the maximal ideal".into()));
        }

        let alpha = sigma[1] % p;
        let mut check = 1;
        for (i, &x) in coords.iter().enumerate().take(n0) {
            let d = map
                .derivative(&ring, i, x)
                .ok_or_else(|| EngineError::Internal(format!("no chart derivative at step {i}")))?;
            check = check * (d % p) % p;
        }
        if check != alpha {
            return Err(EngineError::Internal(format!(
                "σ̄ = {alpha} but the derivative along the orbit is {check}"
            )));
        }
        let sigma_bar = FpMatrix::from_rows(p, &[vec![alpha]]);
        let r = sigma_bar.order()?;
        let s = s as u64;
        if !s.is_multiple_of(r) {
            return Err(EngineError::NotAPPower { s, r });
        }
        let t_exp = log_p(s / r, p).ok_or(EngineError::NotAPPower { s, r })?;

        // m/m² is spanned by [y] and [p], cut by the linear part of u
        let relation = vec![u[1] % p, (u[0] / p) % p];
        let relations = if relation.iter().all(|&c| c == 0) {
            FpMatrix::zeros(p, 0, 2)
        } else {
            FpMatrix::from_rows(p, &[relation])
        };
        let dim_m = 2 - relations.rank() as u32;
        let beta = (sigma[0] / p) % p;
        let full = FpMatrix::from_rows(p, &[vec![alpha, beta], vec![0, 1]]);
        let r_full = full
            .induced_on_quotient(&relations)
            .ok_or_else(|| EngineError::Internal("σ does not preserve the relation".into()))?
            .order()?;

        let keep = ring.with_precision(precision.min(ring.k()))?;
        let trunc = |v: &[u64]| v.iter().map(|c| c % keep.modulus()).collect();
        Ok(PeriodDecomposition {
            n: n as u64,
            n0: n0 as u64,
            s,
            r,
            t: t_exp,
            t_max: t_exp,
            dim_m,
            dim_mbar: 1,
            sigma_bar,
            mode: DecompositionMode::OrbitRingExact,
            r_full: (r_full != r).then_some(r_full),
            orbit: Some(OrbitData { precision: keep.k(), center, u: trunc(&u), sigma: trunc(&sigma) }),
        })
    }

    /// Jacobian of `g = f^n₀` on the cotangent space of the fiber at `P̄`.
    fn ambient(&self, n: usize, n0: usize, residues: &[FiberCoords]) -> Result<PeriodDecomposition, EngineError> {
        let Model::Affine(m) = &self.model else { unreachable!() };
        let p = self.ring.p();
        let base = match &residues[0] {
            FiberCoords::Affine(v) => v.clone(),
            other => return Err(EngineError::Internal(format!("affine residue expected, got {other}"))),
        };
        let dim = m.ambient_dimension();
        let mut dg = FpMatrix::identity(p, dim);
        for q in residues.iter().take(n0) {
            let FiberCoords::Affine(x) = q else { unreachable!() };
            // row convention: the pullback of dx_i is row i of the Jacobian
            dg = dg.mul(&m.map_jacobian(x)?);
        }
        let jh = m.relation_jacobian(&base)?;
        let sigma_bar = dg
            .induced_on_quotient(&jh)
            .ok_or_else(|| EngineError::Internal("Jacobian does not preserve the fiber".into()))?;
        let r = sigma_bar.order()?;
        let s = (n / n0) as u64;
        let t_max = (0..64u32)
            .find(|&t| (p as u128).checked_pow(t).is_some_and(|pt| (r as u128 * pt).is_multiple_of(s as u128)))
            .ok_or(EngineError::NotAPPower { s, r })?;
        let dim_mbar = self.model.cotangent_dim(&residues[0])?;
        Ok(PeriodDecomposition {
            n: n as u64,
            n0: n0 as u64,
            s,
            r,
            t: t_max,
            t_max,
            dim_m: dim_mbar + 1,
            dim_mbar,
            sigma_bar,
            mode: DecompositionMode::AmbientCertificate,
            r_full: None,
            orbit: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tests::p1_session;
    use crate::engine::{Certification, RawCycle};
    use crate::models::ProjPoint;

    fn certified(s: &Session, pts: &[ModelPoint]) -> CertifiedCycle {
        match s.certify(&RawCycle { points: pts.to_vec() }).unwrap() {
            Certification::Certified(c) => c,
            other => panic!("not certified: {other:?}"),
        }
    }

    fn fin(a: u64) -> ModelPoint {
        ModelPoint::P1(ProjPoint::Finite(a))
    }

    #[test]
    fn orbit_ring_arithmetic() {
        let ring = Modulus::new(3, 4).unwrap();
        let a = OrbitRing::from_roots(ring, &[0, 3]);
        // y^2 = 3y
        let y = a.generator();
        assert_eq!(a.mul(&y, &y), vec![0, 3]);
        let unit = a.add(&a.constant(2), &y);
        let inv = a.inverse(&unit).unwrap();
        assert_eq!(a.mul(&unit, &inv), a.constant(1));
    }

    #[test]
    fn orbit_ring_example() {
        let s = p1_session("x^2 - 4*x + 3", 3, 6);
        let c = certified(&s, &[fin(0), fin(3)]);
        let d = s.decompose(&c).unwrap();
        assert_eq!(d.tuple(), (2, 1, 2, 0));
        assert_eq!((d.dim_m, d.dim_mbar), (2, 1));
        assert_eq!(d.mode, DecompositionMode::OrbitRingExact);
        let orbit = d.orbit.unwrap();
        // u = y^2 - 3y, σ(y) = 3 - y
        let m = 729;
        assert_eq!(orbit.u, vec![0, m - 3, 1]);
        assert_eq!(orbit.sigma, vec![3, m - 1]);
        assert_eq!(d.r_full, None);
    }

    #[test]
    fn negation_over_q2() {
        let s = p1_session("-x", 2, 5);
        let c = certified(&s, &[fin(1), fin(31)]);
        assert_eq!(s.decompose(&c).unwrap().tuple(), (2, 1, 1, 1));
    }

    #[test]
    fn stress_three_cycle() {
        let s = p1_session("x^2 - 29/16", 3, 8);
        let ring = s.ring();
        let pts: Vec<ModelPoint> = [(-1, 4), (-7, 4), (5, 4)]
            .iter()
            .map(|&(a, b)| fin(ring.mul(ring.from_i64(a), ring.inv(b).unwrap())))
            .collect();
        let c = certified(&s, &pts);
        assert_eq!(s.decompose(&c).unwrap().tuple(), (3, 1, 1, 1));
    }

    #[test]
    fn fixed_points_are_trivial() {
        let s = p1_session("x^2 - 4*x + 3", 3, 6);
        let c = certified(&s, &[fin(0)]);
        let d = s.decompose(&c).unwrap();
        assert_eq!(d.tuple(), (1, 1, 1, 0));
        assert_eq!((d.dim_m, d.dim_mbar), (1, 0));
    }

    #[test]
    fn residue_cycle_gives_n0() {
        // {ω, ω²} for x^2 at 7: residues 2 and 4
        let s = p1_session("x^2", 7, 4);
        let raw = s
            .enumerate_periodic()
            .unwrap()
            .into_iter()
            .find(|c| c.len() == 2 && s.residue(&c.points[1]) != s.residue(&c.points[0]))
            .unwrap();
        let c = certified(&s, &raw.points);
        let d = s.decompose(&c).unwrap();
        assert_eq!(d.tuple(), (2, 2, 1, 0));
    }
}
