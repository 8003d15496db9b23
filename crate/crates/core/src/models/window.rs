use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ModelError, P1Residue};
use crate::padic::{rational_valuation, Modulus, PadicError};
use crate::poly::{DenseModPoly, IntPolynomial};

/// How many extra shells past the floor the escape check samples.
const ESCAPE_SHELLS: u32 = 3;
const MAX_FLOOR: u32 = 64;

/// A polynomial map `z ↦ φ(z)` studied on the window `v(z) >= -B`, through
/// the scaled coordinate `w = p^B z`.
///
/// Used when `φ` has bad reduction at infinity, so the projective line is
/// not an available model.
#[derive(Debug, Clone)]
pub struct PolyChart {
    p: u64,
    poly: IntPolynomial,
    coeffs: Vec<BigRational>,
    floor: u32,
    derived_floor: u32,
}

impl PolyChart {
    pub fn new(p: u64, poly: IntPolynomial, floor_override: Option<u32>) -> Result<Self, ModelError> {
        Modulus::new(p, 1)?;
        if poly.arity() != 1 {
            return Err(ModelError::Malformed("poly-chart expects a univariate polynomial".into()));
        }
        let coeffs = poly.dense();
        if coeffs.len() < 3 {
            return Err(ModelError::Malformed("poly-chart requires degree >= 2".into()));
        }
        for c in &coeffs {
            if (c.denom() % BigInt::from(p)).is_zero() {
                return Err(ModelError::Padic(PadicError::NonIntegral(c.denom().clone())));
            }
        }
        let mut derived = formula_floor(p, &coeffs);
        while !escapes_beyond(p, &coeffs, derived) {
            derived += 1;
            if derived > MAX_FLOOR {
                return Err(ModelError::Malformed("no escape radius found".into()));
            }
        }
        let floor = floor_override.unwrap_or(derived);
        Ok(PolyChart { p, poly, coeffs, floor, derived_floor: derived })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    /// The floor `B` in use.
    pub fn floor(&self) -> u32 {
        self.floor
    }

    /// The floor derived from the Newton polygon and validated by sampling.
    pub fn derived_floor(&self) -> u32 {
        self.derived_floor
    }

    /// `B (D - 1)`: the power of `p` separating `Ñ(w)` from `p^B φ(z)`.
    pub fn shift(&self) -> u32 {
        self.floor * (self.degree() - 1)
    }

    pub fn apply_exact(&self, z: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * z + c)
    }

    pub fn derivative_exact(&self, z: &BigRational) -> BigRational {
        self.poly.derivative(0).eval_rational(std::slice::from_ref(z))
    }

    /// Residue in `P^1(F_p)` of `z = w / p^B`.
    pub fn residue(&self, ring: &Modulus, w: u64) -> P1Residue {
        let pb = self.p.pow(self.floor);
        if w.is_multiple_of(pb) && ring.k() > self.floor {
            P1Residue::Finite((w / pb) % self.p)
        } else {
            P1Residue::Infinity
        }
    }

    pub fn kernel(&self, ring: &Modulus) -> Result<WindowKernel, PadicError> {
        WindowKernel::new(ring, self)
    }
}

/// `max(0, max_i ceil((v(a_D) - v(a_i)) / (D - i))) + 1`, where the identity
/// term `z` is included among the lower terms so that `v(φ(z)) < v(z)` below
/// the floor even when `a_1` vanishes.
fn formula_floor(p: u64, coeffs: &[BigRational]) -> u32 {
    let d = coeffs.len() - 1;
    let vd = rational_valuation(&coeffs[d], p).expect("leading coefficient");
    let mut lower: Vec<(usize, i64)> = coeffs[..d]
        .iter()
        .enumerate()
        .filter_map(|(i, c)| rational_valuation(c, p).map(|v| (i, v)))
        .collect();
    lower.push((1, 0));
    let worst = lower
        .into_iter()
        .map(|(i, v)| {
            let num = vd - v;
            let den = (d - i) as i64;
            num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0)
        })
        .max()
        .unwrap_or(0);
    worst.max(0) as u32 + 1
}

/// Boundary sample: `v(φ(z)) < v(z)` for `z = u p^(-j)`, `j` just past the floor.
fn escapes_beyond(p: u64, coeffs: &[BigRational], floor: u32) -> bool {
    let units: Vec<i64> = vec![1, -1, (p as i64) - 1, 1 + p as i64, 2 * p as i64 - 1];
    let phi = |z: &BigRational| {
        coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * z + c)
    };
    (floor + 1..=floor + ESCAPE_SHELLS).all(|j| {
        let scale = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), j as usize));
        units.iter().filter(|&&u| u % p as i64 != 0).all(|&u| {
            let z = BigRational::from_integer(u.into()) * &scale;
            match rational_valuation(&phi(&z), p) {
                Some(v) => v < -(j as i64),
                None => false,
            }
        })
    })
}

impl fmt::Display for PolyChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on v(z) >= -{} over Z_{} (w = {}^{} z)",
            self.poly, self.floor, self.p, self.p, self.floor
        )
    }
}

/// The scaled map on `w` modulo `p^k`, computed through
/// `Ñ(w) = Σ a_i p^(B(D-i)) w^i = p^(B(D-1)) · p^B φ(w / p^B)` at precision
/// `k + B(D-1)`.
#[derive(Debug, Clone)]
pub struct WindowKernel {
    ring: Modulus,
    wide: Modulus,
    shift: u32,
    scale: u64,
    n: DenseModPoly,
    dn: DenseModPoly,
}

impl WindowKernel {
    fn new(ring: &Modulus, chart: &PolyChart) -> Result<Self, PadicError> {
        let d = chart.degree();
        let shift = chart.shift();
        let wide = ring.with_precision(ring.k() + shift)?;
        let p = BigInt::from(chart.p);
        let scaled: Vec<BigRational> = chart
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c * BigRational::from_integer(num_traits::pow(
                    p.clone(),
                    (chart.floor * (d - i as u32)) as usize,
                ))
            })
            .collect();
        let n = DenseModPoly::from_rationals(&wide, &scaled)?;
        Ok(WindowKernel {
            ring: *ring,
            wide,
            shift,
            scale: chart.p.pow(shift),
            dn: n.derivative(&wide),
            n,
        })
    }

    pub fn ring(&self) -> &Modulus {
        &self.ring
    }

    /// The precision `k + B(D-1)` at which `Ñ` is evaluated.
    pub fn wide(&self) -> &Modulus {
        &self.wide
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// The balanced lift of `w` to precision `k + B(D-1)`.
    ///
    /// The scaled map expands where `v(φ'(z)) < 0`, so its value depends on
    /// the chosen lift; the balanced one keeps small integers exact.
    #[inline]
    pub fn lift(&self, w: u64) -> u64 {
        let m = self.ring.modulus();
        if w > m / 2 {
            self.wide.sub(w, m)
        } else {
            w
        }
    }

    /// Image of `w`, or `None` when `φ(z)` leaves the window.
    #[inline]
    pub fn apply(&self, w: u64) -> Option<u64> {
        let v = self.n.eval(&self.wide, self.lift(w));
        if !v.is_multiple_of(self.scale) {
            None
        } else {
            Some((v / self.scale) % self.ring.modulus())
        }
    }

    /// `Ñ'(w)` modulo `p^(k + B(D-1))`; equals `p^(B(D-1)) φ'(z)`.
    pub fn scaled_derivative(&self, w: u64) -> u64 {
        self.dn.eval(&self.wide, self.lift(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(text: &str, p: u64) -> PolyChart {
        let f = IntPolynomial::parse(text, &["z"], Some(p)).unwrap();
        PolyChart::new(p, f, None).unwrap()
    }

    #[test]
    fn cubic_floor() {
        let c = chart("z + z^2 + 3*z^3", 3);
        assert_eq!(c.floor(), 2);
        assert_eq!(c.shift(), 4);
    }

    #[test]
    fn identity_term_enters_the_floor() {
        // 27 z^3 alone: v(φ(z)) < v(z) needs v(z) < -3/2
        let c = chart("27*z^3", 3);
        assert!(c.floor() >= 2);
        assert!(escapes_beyond(3, &c.coeffs, c.floor()));
    }

    #[test]
    fn scaled_map_matches_exact_iteration() {
        let c = chart("z + z^2 + 3*z^3", 3);
        let ring = Modulus::new(3, 6).unwrap();
        let kern = c.kernel(&ring).unwrap();
        // z = -1/3 is fixed: w = 9 z = -3
        let w = ring.from_i64(-3);
        assert_eq!(kern.apply(w), Some(w));
        assert_eq!(kern.apply(0), Some(0));
        // z = 1/9: w = 1, φ(z) = 1/9 + 1/81 + 3/729 has v = -4 < -2
        assert_eq!(kern.apply(1), None);
        for z in [1i64, 2, 5, -4] {
            let zq = BigRational::from_integer(z.into());
            let image = c.apply_exact(&zq);
            let expected = ring.from_rational(&(image * BigRational::from_integer(9.into()))).unwrap();
            assert_eq!(kern.apply(ring.from_i64(9 * z)), Some(expected));
        }
    }

    #[test]
    fn residues() {
        let c = chart("z + z^2 + 3*z^3", 3);
        let ring = Modulus::new(3, 6).unwrap();
        assert_eq!(c.residue(&ring, 18), P1Residue::Finite(2));
        assert_eq!(c.residue(&ring, ring.from_i64(-3)), P1Residue::Infinity);
    }

    #[test]
    fn rejects_linear_maps() {
        let f = IntPolynomial::parse("z + 3", &["z"], Some(3)).unwrap();
        assert!(PolyChart::new(3, f, None).is_err());
    }
}
