use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{resultant, Extension, ModelError, P1Residue, SpecialFiberPoint, FiberCoords};
use crate::padic::{Modulus, PadicError};
use crate::poly::{DenseModPoly, IntPolynomial};

/// A point of `P^1(Z/p^k)` in canonical two-chart form.
///
/// `Finite(a)` is `[a : 1]`; `AtInfinity(b)` is `[1 : b]` with `p | b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(u64),
    AtInfinity(u64),
}

impl ProjPoint {
    /// Canonical form of `[a : b]`, or `None` if neither coordinate is a unit.
    pub fn canonical(ring: &Modulus, a: u64, b: u64) -> Option<ProjPoint> {
        if let Some(binv) = ring.inv(b) {
            Some(ProjPoint::Finite(ring.mul(a, binv)))
        } else {
            ring.inv(a).map(|ainv| ProjPoint::AtInfinity(ring.mul(b, ainv)))
        }
    }

    pub fn coords(&self) -> (u64, u64) {
        match *self {
            ProjPoint::Finite(a) => (a, 1),
            ProjPoint::AtInfinity(b) => (1, b),
        }
    }

    pub fn residue(&self, ring: &Modulus) -> P1Residue {
        match *self {
            ProjPoint::Finite(a) => P1Residue::Finite(a % ring.p()),
            ProjPoint::AtInfinity(_) => P1Residue::Infinity,
        }
    }

    /// The chart coordinate: `x` in the finite chart, `w = 1/x` at infinity.
    pub fn chart_value(&self) -> u64 {
        match *self {
            ProjPoint::Finite(a) | ProjPoint::AtInfinity(a) => a,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ProjPoint::Finite(_))
    }

    /// Dense index in `[0, p^k + p^(k-1))`.
    pub fn index(&self, ring: &Modulus) -> usize {
        match *self {
            ProjPoint::Finite(a) => a as usize,
            ProjPoint::AtInfinity(b) => (ring.modulus() + b / ring.p()) as usize,
        }
    }

    pub fn from_index(ring: &Modulus, i: usize) -> ProjPoint {
        let m = ring.modulus() as usize;
        if i < m {
            ProjPoint::Finite(i as u64)
        } else {
            ProjPoint::AtInfinity((i - m) as u64 * ring.p())
        }
    }

    pub fn count(ring: &Modulus) -> usize {
        (ring.modulus() + ring.modulus() / ring.p()) as usize
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(a) => write!(f, "[{a}:1]"),
            ProjPoint::AtInfinity(b) => write!(f, "[1:{b}]"),
        }
    }
}

/// A point of `P^1(Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactP1 {
    Finite(BigRational),
    Infinity,
}

impl ExactP1 {
    /// Image in `P^1(Z/p^k)`.
    pub fn reduce(&self, ring: &Modulus) -> Result<ProjPoint, PadicError> {
        match self {
            ExactP1::Infinity => Ok(ProjPoint::AtInfinity(0)),
            ExactP1::Finite(x) => match ring.from_rational(x) {
                Ok(a) => Ok(ProjPoint::Finite(a)),
                Err(PadicError::NonIntegral(_)) => {
                    let w = x.recip();
                    Ok(ProjPoint::AtInfinity(ring.from_rational(&w)?))
                }
                Err(e) => Err(e),
            },
        }
    }
}

impl fmt::Display for ExactP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactP1::Finite(x) => write!(f, "{x}"),
            ExactP1::Infinity => write!(f, "inf"),
        }
    }
}

/// A rational map of `P^1` given by two binary forms of common degree.
#[derive(Debug, Clone)]
pub struct RationalMapP1 {
    p: u64,
    f: IntPolynomial,
    g: IntPolynomial,
    degree: u32,
    resultant: BigInt,
    resultant_valuation: Option<u32>,
}

fn valuation_of(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

impl RationalMapP1 {
    /// From homogeneous forms in `(X, Z)`.
    pub fn from_forms(p: u64, f: IntPolynomial, g: IntPolynomial) -> Result<Self, ModelError> {
        if f.arity() != 2 || g.arity() != 2 {
            return Err(ModelError::Malformed("binary forms expected".into()));
        }
        if f.is_zero() && g.is_zero() {
            return Err(ModelError::Malformed("F and G are both zero".into()));
        }
        if !f.is_homogeneous() || !g.is_homogeneous() {
            return Err(ModelError::Malformed("forms must be homogeneous".into()));
        }
        let degree = match (f.total_degree(), g.total_degree()) {
            (Some(a), Some(b)) if a != b => {
                return Err(ModelError::Malformed(format!("degrees differ: {a} vs {b}")))
            }
            (Some(a), _) | (_, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        if degree == 0 {
            return Err(ModelError::Malformed("constant maps are not endomorphisms of degree >= 1".into()));
        }
        for c in f.terms().chain(g.terms()).map(|(_, c)| c) {
            if (c.denom() % BigInt::from(p)).is_zero() {
                return Err(ModelError::Padic(PadicError::NonIntegral(c.denom().clone())));
            }
        }
        let res = resultant(&f, &g, degree);
        if res.is_zero() {
            return Err(ModelError::Degenerate);
        }
        let resultant_valuation = valuation_of(&res, p);
        Ok(RationalMapP1 {
            p,
            f: f.rename(&["X", "Z"]),
            g: g.rename(&["X", "Z"]),
            degree,
            resultant: res,
            resultant_valuation,
        })
    }

    /// Homogenize `x ↦ num(x)/den(x)` to degree `max(deg num, deg den)`.
    pub fn from_fraction(
        p: u64,
        num: &IntPolynomial,
        den: &IntPolynomial,
    ) -> Result<Self, ModelError> {
        if num.arity() != 1 || den.arity() != 1 {
            return Err(ModelError::Malformed("univariate numerator and denominator expected".into()));
        }
        if den.is_zero() {
            return Err(ModelError::Malformed("zero denominator".into()));
        }
        let d = num.degree_in(0).unwrap_or(0).max(den.degree_in(0).unwrap_or(0));
        let homogenize = |q: &IntPolynomial| {
            IntPolynomial::from_terms(
                &["X", "Z"],
                q.terms().map(|(e, c)| (vec![e[0], d - e[0]], c.clone())),
            )
        };
        Self::from_forms(p, homogenize(num), homogenize(den))
    }

    pub fn polynomial(p: u64, f: &IntPolynomial) -> Result<Self, ModelError> {
        Self::from_fraction(p, f, &IntPolynomial::from_int(f.vars(), 1))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn forms(&self) -> (&IntPolynomial, &IntPolynomial) {
        (&self.f, &self.g)
    }

    pub fn resultant(&self) -> &BigInt {
        &self.resultant
    }

    pub fn resultant_valuation(&self) -> Option<u32> {
        self.resultant_valuation
    }

    pub fn has_good_reduction(&self) -> bool {
        self.resultant_valuation == Some(0)
    }

    pub fn kernel(&self, ring: &Modulus) -> Result<P1Kernel, PadicError> {
        P1Kernel::new(ring, &self.f, &self.g, self.degree)
    }

    /// Common zeros of the reduced forms on `P^1(F_p)`.
    pub fn common_zeros_mod_p(&self) -> Vec<P1Residue> {
        let ring = Modulus::new(self.p, 1).expect("prime");
        let kern = self.kernel(&ring).expect("p-integral");
        let mut out = Vec::new();
        for a in 0..self.p {
            if kern.fx.eval(&ring, a) == 0 && kern.gx.eval(&ring, a) == 0 {
                out.push(P1Residue::Finite(a));
            }
        }
        if kern.fw.eval(&ring, 0) == 0 && kern.gw.eval(&ring, 0) == 0 {
            out.push(P1Residue::Infinity);
        }
        out
    }

    pub fn check_extends(&self) -> Extension {
        if self.has_good_reduction() {
            return Extension::GoodReductionP1;
        }
        let v = self.resultant_valuation.unwrap_or(0);
        match self.common_zeros_mod_p().first() {
            Some(q) => Extension::Rejected(format!(
                "v_p(Res) = {v}; reduced forms share the zero {} mod {}",
                match q {
                    P1Residue::Finite(a) => format!("[{a}:1]"),
                    P1Residue::Infinity => "[1:0]".into(),
                },
                self.p
            )),
            None => Extension::Rejected(format!(
                "v_p(Res) = {v}; reduced forms share a zero over an extension of F_{}",
                self.p
            )),
        }
    }

    pub fn projective_line_points(p: u64) -> Vec<SpecialFiberPoint> {
        (0..p)
            .map(P1Residue::Finite)
            .chain(std::iter::once(P1Residue::Infinity))
            .map(|r| SpecialFiberPoint { coords: FiberCoords::P1(r), cotangent_dimension: 1 })
            .collect()
    }

    pub fn special_fiber(&self) -> Vec<SpecialFiberPoint> {
        Self::projective_line_points(self.p)
    }

    pub fn apply_residue(&self, r: P1Residue) -> Result<P1Residue, ModelError> {
        let ring = Modulus::new(self.p, 1)?;
        let kern = self.kernel(&ring)?;
        let pt = match r {
            P1Residue::Finite(a) => ProjPoint::Finite(a),
            P1Residue::Infinity => ProjPoint::AtInfinity(0),
        };
        kern.apply(&pt)
            .map(|q| q.residue(&ring))
            .ok_or_else(|| ModelError::NormalizationFailed(r.to_string()))
    }

    pub fn apply_exact(&self, x: &ExactP1) -> ExactP1 {
        let (a, b) = match x {
            ExactP1::Finite(q) => (q.clone(), BigRational::one()),
            ExactP1::Infinity => (BigRational::one(), BigRational::zero()),
        };
        let fa = self.f.eval_rational(&[a.clone(), b.clone()]);
        let ga = self.g.eval_rational(&[a, b]);
        if ga.is_zero() {
            ExactP1::Infinity
        } else {
            ExactP1::Finite(fa / ga)
        }
    }
}

impl fmt::Display for RationalMapP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}] on P^1 over Z_{}", self.f, self.g, self.p)
    }
}

/// The map reduced modulo `p^k`, expanded in both affine charts.
#[derive(Debug, Clone)]
pub struct P1Kernel {
    ring: Modulus,
    /// `F(x, 1)`, `G(x, 1)`.
    pub fx: DenseModPoly,
    pub gx: DenseModPoly,
    /// `F(1, w)`, `G(1, w)`.
    pub fw: DenseModPoly,
    pub gw: DenseModPoly,
    dfx: DenseModPoly,
    dgx: DenseModPoly,
    dfw: DenseModPoly,
    dgw: DenseModPoly,
}

impl P1Kernel {
    fn new(ring: &Modulus, f: &IntPolynomial, g: &IntPolynomial, d: u32) -> Result<Self, PadicError> {
        let chart = |form: &IntPolynomial, finite: bool| -> Result<DenseModPoly, PadicError> {
            let coeffs: Vec<BigRational> = (0..=d)
                .map(|j| {
                    if finite {
                        form.coefficient(&[j, d - j])
                    } else {
                        form.coefficient(&[d - j, j])
                    }
                })
                .collect();
            DenseModPoly::from_rationals(ring, &coeffs)
        };
        let fx = chart(f, true)?;
        let gx = chart(g, true)?;
        let fw = chart(f, false)?;
        let gw = chart(g, false)?;
        Ok(P1Kernel {
            ring: *ring,
            dfx: fx.derivative(ring),
            dgx: gx.derivative(ring),
            dfw: fw.derivative(ring),
            dgw: gw.derivative(ring),
            fx,
            gx,
            fw,
            gw,
        })
    }

    pub fn ring(&self) -> &Modulus {
        &self.ring
    }

    /// `(F, G)` at the point.
    #[inline]
    pub fn eval_forms(&self, pt: &ProjPoint) -> (u64, u64) {
        match *pt {
            ProjPoint::Finite(a) => (self.fx.eval(&self.ring, a), self.gx.eval(&self.ring, a)),
            ProjPoint::AtInfinity(b) => (self.fw.eval(&self.ring, b), self.gw.eval(&self.ring, b)),
        }
    }

    #[inline]
    pub fn apply(&self, pt: &ProjPoint) -> Option<ProjPoint> {
        let (fv, gv) = self.eval_forms(pt);
        if gv == 1 {
            return Some(ProjPoint::Finite(fv));
        }
        ProjPoint::canonical(&self.ring, fv, gv)
    }

    /// Derivative of the local expression of the map from the chart
    /// `src_finite` around `t` to the chart `dst_finite`. `None` when the
    /// target chart is not defined at the image.
    pub fn chart_derivative(&self, src_finite: bool, t: u64, dst_finite: bool) -> Option<u64> {
        let r = &self.ring;
        let (fv, gv, df, dg) = if src_finite {
            (self.fx.eval(r, t), self.gx.eval(r, t), self.dfx.eval(r, t), self.dgx.eval(r, t))
        } else {
            (self.fw.eval(r, t), self.gw.eval(r, t), self.dfw.eval(r, t), self.dgw.eval(r, t))
        };
        let (num, den) = if dst_finite {
            (r.sub(r.mul(df, gv), r.mul(fv, dg)), gv)
        } else {
            (r.sub(r.mul(dg, fv), r.mul(gv, df)), fv)
        };
        let inv = r.inv(den)?;
        Some(r.mul(num, r.mul(inv, inv)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_map(p: u64, text: &str) -> RationalMapP1 {
        let f = IntPolynomial::parse(text, &["x"], Some(p)).unwrap();
        RationalMapP1::polynomial(p, &f).unwrap()
    }

    #[test]
    fn orbit_ring_example_has_good_reduction() {
        let m = poly_map(3, "x^2 - 4*x + 3");
        assert_eq!(m.resultant_valuation(), Some(0));
        assert_eq!(m.check_extends(), Extension::GoodReductionP1);
    }

    #[test]
    fn cubic_is_rejected_at_infinity() {
        let m = poly_map(3, "x + x^2 + 3*x^3");
        match m.check_extends() {
            Extension::Rejected(why) => assert!(why.contains("[1:0]"), "{why}"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(m.common_zeros_mod_p(), vec![P1Residue::Infinity]);
    }

    #[test]
    fn canonical_forms() {
        let ring = Modulus::new(3, 3).unwrap();
        assert_eq!(ProjPoint::canonical(&ring, 0, 1), Some(ProjPoint::Finite(0)));
        assert_eq!(ProjPoint::canonical(&ring, 1, 3), Some(ProjPoint::AtInfinity(3)));
        assert_eq!(ProjPoint::canonical(&ring, 2, 6), Some(ProjPoint::AtInfinity(3)));
        assert_eq!(ProjPoint::canonical(&ring, 3, 9), None);
        assert_eq!(ProjPoint::AtInfinity(3).residue(&ring), P1Residue::Infinity);
        for i in 0..ProjPoint::count(&ring) {
            assert_eq!(ProjPoint::from_index(&ring, i).index(&ring), i);
        }
    }

    #[test]
    fn exact_reduction_uses_chart_at_infinity() {
        let ring = Modulus::new(3, 4).unwrap();
        let third = ExactP1::Finite(BigRational::new(1.into(), 3.into()));
        assert_eq!(third.reduce(&ring).unwrap(), ProjPoint::AtInfinity(3));
    }

    #[test]
    fn reduced_map_values() {
        let m = poly_map(3, "x^2 - 1");
        let images: Vec<_> = m
            .special_fiber()
            .iter()
            .map(|q| match q.coords {
                FiberCoords::P1(r) => m.apply_residue(r).unwrap(),
                _ => unreachable!(),
            })
            .collect();
        use P1Residue::*;
        assert_eq!(images, vec![Finite(2), Finite(0), Finite(0), Infinity]);
    }

    #[test]
    fn rejects_p_adic_denominators_and_degenerate_pairs() {
        let x = ["X", "Z"];
        let f = IntPolynomial::parse("X^2 - X*Z", &x, None).unwrap();
        let g = IntPolynomial::parse("X*Z", &x, None).unwrap();
        assert_eq!(RationalMapP1::from_forms(3, f, g).unwrap_err(), ModelError::Degenerate);
        let f = IntPolynomial::parse("X/3", &x, None).unwrap();
        let g = IntPolynomial::parse("Z", &x, None).unwrap();
        assert!(RationalMapP1::from_forms(3, f, g).is_err());
    }
}
