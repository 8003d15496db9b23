//! Finite-precision arithmetic in `Z/p^k`, used as a model of the p-adic
//! integers `Z_p`, together with one- and multi-dimensional Hensel refinement.
//!
//! Every statement made by this crate about a p-adic quantity is a statement
//! modulo `p^k` for a fixed absolute precision `k`. A residue that is zero
//! modulo `p^k` has an unresolved valuation, reported as [`Valuation::AtLeast`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::IntPolynomial;

pub const DEFAULT_PRECISION: u32 = 6;
pub const MIN_PRECISION: u32 = 2;

/// Largest modulus handled; products are formed in `u128`.
const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision k = {0} is below the minimum")]
    PrecisionTooSmall(u32),
    #[error("p^k = {p}^{k} exceeds the supported modulus")]
    ModulusTooLarge { p: u64, k: u32 },
    #[error("operands live in different rings (Z/{a}^{ka} vs Z/{b}^{kb})")]
    Mismatch { a: u64, ka: u32, b: u64, kb: u32 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("denominator {0} is divisible by p")]
    NonIntegral(BigInt),
    #[error("Hensel precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("Jacobian is singular modulo p")]
    SingularJacobian,
}

/// The p-adic valuation of a residue modulo `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u32),
    /// The residue is zero modulo `p^k`; the true valuation is at least `k`.
    AtLeast(u32),
}

impl Valuation {
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_resolved(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// `Some(true/false)` when the comparison `self >= bound` is decided.
    pub fn at_least(self, bound: u32) -> bool {
        self.lower_bound() >= bound
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring `Z/p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    k: u32,
    m: u64,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if k < 1 {
            return Err(PadicError::PrecisionTooSmall(k));
        }
        let mut m: u64 = 1;
        for _ in 0..k {
            m = m
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(PadicError::ModulusTooLarge { p, k })?;
        }
        Ok(Modulus { p, k, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `p^k`.
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// The same prime at another precision.
    pub fn with_precision(&self, k: u32) -> Result<Self, PadicError> {
        Modulus::new(self.p, k)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn valuation(&self, a: u64) -> Valuation {
        let a = a % self.m;
        if a == 0 {
            return Valuation::AtLeast(self.k);
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        Valuation::Exact(v)
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (mut old_r, mut r) = (a as i128, self.m as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        Some(old_s.rem_euclid(self.m as i128) as u64)
    }

    /// Reduce `x / p^j` for `x` divisible by `p^j`; the result is meaningful
    /// modulo `p^(k-j)` and is returned as a residue in `[0, p^(k-j))`.
    pub fn shift_down(&self, x: u64, j: u32) -> u64 {
        let pj = self.p.pow(j);
        debug_assert_eq!(x % pj, 0);
        (x / pj) % (self.m / pj)
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.m as i128) as u64
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.m)).to_u64().expect("residue fits")
    }

    /// Materialize a p-integral rational `a/b` as `a * b^-1 mod p^k`.
    pub fn from_rational(&self, x: &BigRational) -> Result<u64, PadicError> {
        let num = self.from_bigint(x.numer());
        let den = self.from_bigint(x.denom());
        let inv = self
            .inv(den)
            .ok_or_else(|| PadicError::NonIntegral(x.denom().clone()))?;
        Ok(self.mul(num, inv))
    }

    /// Reduce a residue modulo a smaller power `p^j`, `j <= k`.
    pub fn truncate(&self, x: u64, j: u32) -> u64 {
        x % self.p.pow(j)
    }

    /// Signed representative in `(-p^k/2, p^k/2]`.
    pub fn signed(&self, x: u64) -> i128 {
        if x > self.m / 2 {
            x as i128 - self.m as i128
        } else {
            x as i128
        }
    }
}

/// An element of `Z/p^k` standing for a coset of `Z_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PAdicApprox {
    ring: Modulus,
    value: u64,
}

impl fmt::Debug for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.ring.p, self.ring.k)
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PAdicApprox {
    pub fn new(ring: Modulus, value: u64) -> Self {
        PAdicApprox { ring, value: value % ring.m }
    }

    pub fn from_i64(ring: Modulus, x: i64) -> Self {
        PAdicApprox { ring, value: ring.from_i64(x) }
    }

    pub fn from_rational(ring: Modulus, x: &BigRational) -> Result<Self, PadicError> {
        Ok(PAdicApprox { ring, value: ring.from_rational(x)? })
    }

    pub fn ring(&self) -> Modulus {
        self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn k(&self) -> u32 {
        self.ring.k
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    fn check(&self, other: &Self) -> Result<(), PadicError> {
        if self.ring != other.ring {
            return Err(PadicError::Mismatch {
                a: self.ring.p,
                ka: self.ring.k,
                b: other.ring.p,
                kb: other.ring.k,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(Self::new(self.ring, self.ring.add(self.value, other.value)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(Self::new(self.ring, self.ring.sub(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(Self::new(self.ring, self.ring.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.ring, self.ring.neg(self.value))
    }

    pub fn valuation(&self) -> Valuation {
        self.ring.valuation(self.value)
    }

    pub fn invert_unit(&self) -> Result<Self, PadicError> {
        self.ring
            .inv(self.value)
            .map(|v| Self::new(self.ring, v))
            .ok_or(PadicError::NotAUnit)
    }

    /// Reduction to a lower precision `j <= k`.
    pub fn truncate(&self, j: u32) -> Result<Self, PadicError> {
        let ring = self.ring.with_precision(j.min(self.ring.k))?;
        Ok(Self::new(ring, self.value))
    }
}

/// An element `p^scale * mantissa` of `Q_p`, the mantissa known modulo `p^k`.
///
/// Used for fixed-point locations and multipliers that may have negative
/// valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QpValue {
    pub scale: i32,
    pub mantissa: PAdicApprox,
}

impl QpValue {
    pub fn integral(x: PAdicApprox) -> Self {
        QpValue { scale: 0, mantissa: x }
    }

    /// `None` when the mantissa is zero modulo `p^k`.
    pub fn valuation(&self) -> Option<i64> {
        match self.mantissa.valuation() {
            Valuation::Exact(v) => Some(self.scale as i64 + v as i64),
            Valuation::AtLeast(_) => None,
        }
    }

    /// A lower bound for the valuation, valid even when unresolved.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.scale as i64 + self.mantissa.valuation().lower_bound() as i64
    }
}

impl fmt::Display for QpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Move powers of p out of the mantissa first, so 81*3^-4 prints as 1.
        let (p, k) = (self.mantissa.p(), self.mantissa.k());
        let shift = match self.scale {
            s if s < 0 => self.mantissa.valuation().lower_bound().min(s.unsigned_abs()),
            _ => 0,
        };
        let value = self.mantissa.value / p.pow(shift);
        let scale = self.scale + shift as i32;
        if scale == 0 {
            write!(f, "{value}")?;
        } else {
            write!(f, "{value}*{p}^{scale}")?;
        }
        if shift > 0 {
            write!(f, " (mod {p}^{})", k - shift)?;
        }
        Ok(())
    }
}

/// Find `a/b` with `|a| <= num_bound`, `0 < b <= den_bound`, `p` not dividing
/// `b`, and `a ≡ b * x (mod p^k)`. Unique when `2 * num_bound * den_bound < p^k`.
pub fn rational_reconstruct(
    ring: &Modulus,
    x: u64,
    num_bound: u64,
    den_bound: u64,
) -> Option<BigRational> {
    let m = ring.modulus() as i128;
    let (mut r0, mut r1) = (m, (x % ring.modulus()) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > num_bound as i128 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 {
        return None;
    }
    let (mut a, mut b) = (r1, t1);
    if b < 0 {
        a = -a;
        b = -b;
    }
    if b as u64 > den_bound || (b as u64).is_multiple_of(ring.p()) || a.unsigned_abs() > num_bound as u128 {
        return None;
    }
    if (a - b * (x as i128)).rem_euclid(m) != 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(a), BigInt::from(b)))
}

/// p-adic valuation of a nonzero rational.
pub fn rational_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut v = 0i64;
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    Some(count(x.numer()) - count(x.denom()))
}

fn eval_univariate(f: &IntPolynomial, ring: &Modulus, x: u64) -> Result<u64, PadicError> {
    f.reduce(ring)?.eval(ring, &[x]).ok_or_else(|| {
        PadicError::PreconditionViolated("polynomial is not univariate".into())
    })
}

/// One-dimensional Hensel refinement.
///
/// Requires `v(F(a)) > 2 v(F'(a))`. Returns the unique root of `F` congruent
/// to `a` modulo `p^(v(F(a)) - v(F'(a)))`, reduced modulo `p^k`.
pub fn hensel_refine(f: &IntPolynomial, a: &PAdicApprox) -> Result<PAdicApprox, PadicError> {
    if f.arity() != 1 {
        return Err(PadicError::PreconditionViolated(
            "hensel_refine expects a univariate polynomial".into(),
        ));
    }
    let ring = a.ring();
    let k = ring.k();
    let df = f.derivative(0);
    let vf = ring.valuation(eval_univariate(f, &ring, a.value())?);
    let vd = ring.valuation(eval_univariate(&df, &ring, a.value())?);
    let d = match (vf, vd) {
        (_, Valuation::Exact(d)) => {
            if let Valuation::Exact(e) = vf {
                if e <= 2 * d {
                    return Err(PadicError::PreconditionViolated(format!(
                        "v(F(a)) = {e} is not > 2 v(F'(a)) = {}",
                        2 * d
                    )));
                }
            } else if k <= 2 * d {
                return Err(PadicError::PrecisionExhausted(format!(
                    "F(a) vanishes mod p^{k} but 2 v(F'(a)) = {} >= k",
                    2 * d
                )));
            }
            d
        }
        (Valuation::Exact(e), Valuation::AtLeast(_)) => {
            return Err(PadicError::PreconditionViolated(format!(
                "v(F(a)) = {e} while F'(a) vanishes mod p^{k}"
            )));
        }
        (Valuation::AtLeast(_), Valuation::AtLeast(_)) => {
            return Err(PadicError::PrecisionExhausted(
                "both F(a) and F'(a) vanish mod p^k".into(),
            ));
        }
    };

    // Newton at precision k + d; each step loses d digits to the division.
    let work = ring.with_precision(k + d)?;
    let fw = f.reduce(&work)?;
    let dfw = df.reduce(&work)?;
    let pd = ring.p().pow(d);
    let low = ring.with_precision(k)?;
    let mut x = a.value();
    for _ in 0..128 {
        let fx = fw.eval(&work, &[x]).expect("univariate");
        if fx == 0 {
            return Ok(PAdicApprox::new(ring, x));
        }
        let dx = dfw.eval(&work, &[x]).expect("univariate");
        if fx % pd != 0 || work.valuation(dx) != Valuation::Exact(d) {
            return Err(PadicError::PrecisionExhausted("Newton iteration left the basin".into()));
        }
        let num = work.shift_down(fx, d);
        let den = work.shift_down(dx, d);
        let step = low.mul(num % low.modulus(), low.inv(den % low.modulus()).expect("unit"));
        x = low.sub(x % low.modulus(), step);
    }
    Err(PadicError::PrecisionExhausted("Newton iteration did not converge".into()))
}

/// Solve `M x = b` over `Z/p^k` for `M` invertible modulo `p`.
pub fn solve_unimodular(
    ring: &Modulus,
    mut m: Vec<Vec<u64>>,
    mut b: Vec<u64>,
) -> Result<Vec<u64>, PadicError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| ring.is_unit(m[r][col]))
            .ok_or(PadicError::SingularJacobian)?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = ring.inv(m[col][col]).expect("unit pivot");
        for j in 0..n {
            m[col][j] = ring.mul(m[col][j], inv);
        }
        b[col] = ring.mul(b[col], inv);
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let factor = m[r][col];
                for j in 0..n {
                    let t = ring.mul(factor, m[col][j]);
                    m[r][j] = ring.sub(m[r][j], t);
                }
                let t = ring.mul(factor, b[col]);
                b[r] = ring.sub(b[r], t);
            }
        }
    }
    Ok(b)
}

/// Multivariate Newton refinement of a square system from a simple root
/// modulo `p`.
pub fn newton_refine_system(
    system: &[IntPolynomial],
    a: &[PAdicApprox],
) -> Result<Vec<PAdicApprox>, PadicError> {
    let n = a.len();
    if n == 0 || system.len() != n || system.iter().any(|f| f.arity() != n) {
        return Err(PadicError::PreconditionViolated(
            "system must be square in the number of variables".into(),
        ));
    }
    let ring = a[0].ring();
    for x in a {
        x.check(&a[0])?;
    }
    let reduced = system
        .iter()
        .map(|f| f.reduce(&ring))
        .collect::<Result<Vec<_>, _>>()?;
    let jac = system
        .iter()
        .map(|f| {
            (0..n)
                .map(|j| f.derivative(j).reduce(&ring))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut x: Vec<u64> = a.iter().map(|c| c.value()).collect();
    let eval_all = |x: &[u64]| -> Vec<u64> {
        reduced.iter().map(|f| f.eval(&ring, x).expect("arity checked")).collect()
    };

    let fx = eval_all(&x);
    if fx.iter().any(|&v| ring.is_unit(v)) {
        return Err(PadicError::PreconditionViolated(
            "F(a) is not zero modulo p".into(),
        ));
    }
    let jacobian_at = |x: &[u64]| -> Vec<Vec<u64>> {
        jac.iter()
            .map(|row| row.iter().map(|g| g.eval(&ring, x).expect("arity")).collect())
            .collect()
    };
    let mut fx = fx;
    for _ in 0..128 {
        if fx.iter().all(|&v| v == 0) {
            return Ok(x.into_iter().map(|v| PAdicApprox::new(ring, v)).collect());
        }
        let step = solve_unimodular(&ring, jacobian_at(&x), fx.clone())?;
        for (xi, si) in x.iter_mut().zip(step) {
            *xi = ring.sub(*xi, si);
        }
        fx = eval_all(&x);
    }
    Err(PadicError::PrecisionExhausted("multivariate Newton did not converge".into()))
}

pub fn big_pow(base: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPolynomial;

    fn ring(p: u64, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    fn uni(text: &str) -> IntPolynomial {
        IntPolynomial::parse(text, &["x"], None).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(PAdicApprox::new(ring(3, 5), 12).valuation(), Valuation::Exact(1));
        assert_eq!(PAdicApprox::new(ring(3, 5), 0).valuation(), Valuation::AtLeast(5));
        assert_eq!(PAdicApprox::new(ring(2, 4), 8).valuation(), Valuation::Exact(3));
    }

    #[test]
    fn unit_inversion() {
        let x = PAdicApprox::new(ring(3, 3), 2).invert_unit().unwrap();
        assert_eq!(x.value(), 14);
        assert_eq!(PAdicApprox::new(ring(5, 2), 1).invert_unit().unwrap().value(), 1);
        assert_eq!(
            PAdicApprox::new(ring(3, 3), 3).invert_unit(),
            Err(PadicError::NotAUnit)
        );
    }

    #[test]
    fn mixed_rings_rejected() {
        let a = PAdicApprox::new(ring(3, 3), 1);
        let b = PAdicApprox::new(ring(3, 4), 1);
        let c = PAdicApprox::new(ring(5, 3), 1);
        assert!(matches!(a.try_add(&b), Err(PadicError::Mismatch { .. })));
        assert!(matches!(a.try_mul(&c), Err(PadicError::Mismatch { .. })));
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(Modulus::new(4, 3), Err(PadicError::NotPrime(4)));
        assert!(matches!(Modulus::new(3, 80), Err(PadicError::ModulusTooLarge { .. })));
    }

    #[test]
    fn rational_materialization() {
        let r = ring(3, 4);
        let x = BigRational::new(29.into(), 16.into());
        let v = r.from_rational(&x).unwrap();
        assert_eq!(r.mul(v, 16), 29);
        let bad = BigRational::new(1.into(), 3.into());
        assert!(matches!(r.from_rational(&bad), Err(PadicError::NonIntegral(_))));
    }

    #[test]
    fn hensel_square_root_of_seven() {
        // brute force: squares congruent to 7 mod 81 are {13, 68}
        let brute: Vec<u64> = (0..81).filter(|x| (x * x) % 81 == 7).collect();
        assert_eq!(brute, vec![13, 68]);
        let a = PAdicApprox::new(ring(3, 4), 1);
        assert_eq!(hensel_refine(&uni("x^2 - 7"), &a).unwrap().value(), 13);
    }

    #[test]
    fn hensel_exact_root_and_violation() {
        let a = PAdicApprox::new(ring(5, 4), 0);
        assert_eq!(hensel_refine(&uni("x^2 - x"), &a).unwrap().value(), 0);
        let b = PAdicApprox::new(ring(5, 4), 1);
        assert!(matches!(
            hensel_refine(&uni("x^2 - 2"), &b),
            Err(PadicError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn hensel_with_nonunit_derivative() {
        // x^2 - 17 over Z_2: F'(1) = 2, F(1) = -16, v = 4 > 2
        let a = PAdicApprox::new(ring(2, 6), 1);
        let root = hensel_refine(&uni("x^2 - 17"), &a).unwrap();
        assert_eq!((root.value() * root.value()) % 64, 17);
        assert_eq!(root.value() % 8, 1);
    }

    #[test]
    fn hensel_unresolved_precision() {
        let a = PAdicApprox::new(ring(3, 2), 0);
        // F(0) = 0 and F'(0) = 9 ≡ 0 mod 9
        assert!(matches!(
            hensel_refine(&uni("x^2 + 9*x"), &a),
            Err(PadicError::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn newton_system_examples() {
        let r = ring(3, 4);
        let xy = ["x", "y"];
        let lin = [
            IntPolynomial::parse("x - 1", &xy, None).unwrap(),
            IntPolynomial::parse("y - 2", &xy, None).unwrap(),
        ];
        let out = newton_refine_system(&lin, &[PAdicApprox::new(r, 1), PAdicApprox::new(r, 2)])
            .unwrap();
        assert_eq!((out[0].value(), out[1].value()), (1, 2));

        let sys = [
            IntPolynomial::parse("x*y - 3", &xy, None).unwrap(),
            IntPolynomial::parse("x - 1", &xy, None).unwrap(),
        ];
        let out = newton_refine_system(&sys, &[PAdicApprox::new(r, 1), PAdicApprox::new(r, 0)])
            .unwrap();
        assert_eq!((out[0].value(), out[1].value()), (1, 3));

        let sing = [
            IntPolynomial::parse("x^2 - 3", &xy, None).unwrap(),
            IntPolynomial::parse("x - x", &xy, None).unwrap(),
        ];
        assert_eq!(
            newton_refine_system(&sing, &[PAdicApprox::new(r, 0), PAdicApprox::new(r, 0)]),
            Err(PadicError::SingularJacobian)
        );
    }

    #[test]
    fn reconstruction() {
        let r = ring(3, 8);
        let x = r.from_rational(&BigRational::new((-7).into(), 4.into())).unwrap();
        let q = rational_reconstruct(&r, x, 40, 40).unwrap();
        assert_eq!(q, BigRational::new((-7).into(), 4.into()));
        assert_eq!(rational_valuation(&BigRational::new(4.into(), 3.into()), 3), Some(-1));
    }
}
