//! Multivariate polynomials with p-integral rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::padic::{Modulus, PadicError};

/// Exponent vector; its length is the number of variables.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self} in {:?})", self.vars)
    }
}

impl IntPolynomial {
    pub fn zero(vars: &[impl AsRef<str>]) -> Self {
        IntPolynomial {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[impl AsRef<str>], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        let n = p.vars.len();
        p.insert(vec![0; n], c);
        p
    }

    pub fn from_int(vars: &[impl AsRef<str>], c: i64) -> Self {
        Self::constant(vars, BigRational::from_integer(c.into()))
    }

    pub fn var(vars: &[impl AsRef<str>], i: usize) -> Self {
        let mut p = Self::zero(vars);
        let mut e = vec![0; p.vars.len()];
        e[i] = 1;
        p.insert(e, BigRational::one());
        p
    }

    /// Build from `(exponents, coefficient)` pairs; zero coefficients are dropped
    /// and repeated monomials summed.
    pub fn from_terms(
        vars: &[impl AsRef<str>],
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent arity");
            p.insert(e, c);
        }
        p
    }

    /// Dense univariate constructor, `coeffs[i]` multiplying `x^i`.
    pub fn univariate(var: &str, coeffs: &[BigRational]) -> Self {
        Self::from_terms(
            &[var],
            coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())),
        )
    }

    fn insert(&mut self, e: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Same polynomial over a different variable list of the same arity.
    pub fn rename(&self, vars: &[impl AsRef<str>]) -> Self {
        assert_eq!(vars.len(), self.arity());
        IntPolynomial {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(&self.vars, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    pub fn derivative(&self, i: usize) -> Self {
        Self::from_terms(
            &self.vars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * BigRational::from_integer(e[i].into()))
            }),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::from_int(&self.vars, 1);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `images[i]` for variable `i`; all images share one variable list.
    pub fn compose(&self, images: &[IntPolynomial]) -> Self {
        assert_eq!(images.len(), self.arity());
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_default();
        let mut acc = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(&target, c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    term = &term * &img.pow(k);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.arity());
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficients materialized modulo `p^k`.
    pub fn reduce(&self, ring: &Modulus) -> Result<ModPoly, PadicError> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), ring.from_rational(c)?)))
            .collect::<Result<Vec<_>, PadicError>>()?;
        Ok(ModPoly {
            arity: self.arity(),
            terms: terms.into_iter().filter(|(_, c)| *c != 0).collect(),
        })
    }

    /// Dense coefficient list of a univariate polynomial.
    pub fn dense(&self) -> Vec<BigRational> {
        assert_eq!(self.arity(), 1);
        let deg = self.degree_in(0).unwrap_or(0) as usize;
        let mut out = vec![BigRational::zero(); deg + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn parse(
        text: &str,
        vars: &[impl AsRef<str>],
        p: Option<u64>,
    ) -> Result<Self, crate::parse::ParseError> {
        crate::parse::parse_polynomial(text, vars, p)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        assert_eq!(self.vars, rhs.vars, "variable lists differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        assert_eq!(self.vars, rhs.vars, "variable lists differ");
        let mut out = IntPolynomial::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1 * c2);
            }
        }
        out
    }
}

fn fmt_coeff(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Prints in the input grammar, so that printing and reparsing round-trips.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            let is_const = e.iter().all(|&k| k == 0);
            if !mag.is_one() || is_const {
                factors.push(fmt_coeff(&mag));
            }
            for (v, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A polynomial with coefficients reduced modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    arity: usize,
    terms: Vec<(Monomial, u64)>,
}

impl ModPoly {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    /// `None` on an arity mismatch.
    pub fn eval(&self, ring: &Modulus, x: &[u64]) -> Option<u64> {
        if x.len() != self.arity {
            return None;
        }
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = ring.mul(t, ring.pow(xi, k as u64));
                }
            }
            acc = ring.add(acc, t);
        }
        Some(acc)
    }
}

/// Dense univariate polynomial over `Z/p^k`, evaluated by Horner's rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseModPoly {
    pub coeffs: Vec<u64>,
}

impl DenseModPoly {
    pub fn from_rationals(ring: &Modulus, coeffs: &[BigRational]) -> Result<Self, PadicError> {
        let coeffs = coeffs
            .iter()
            .map(|c| ring.from_rational(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DenseModPoly { coeffs })
    }

    #[inline]
    pub fn eval(&self, ring: &Modulus, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| ring.add(ring.mul(acc, x), c))
    }

    pub fn derivative(&self, ring: &Modulus) -> Self {
        DenseModPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ring.mul(c, i as u64 % ring.modulus()))
                .collect(),
        }
    }
}
