use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{FiberCoords, ModelError, SpecialFiberPoint, VerificationMode, Extension, SEARCH_BUDGET};
use crate::linalg::FpMatrix;
use crate::padic::{Modulus, PadicError};
use crate::poly::{IntPolynomial, ModPoly, Monomial};

/// A closed subscheme of `A^N` over `Z_p` with a polynomial endomorphism.
#[derive(Debug, Clone)]
pub struct AffineModel {
    p: u64,
    vars: Vec<String>,
    relations: Vec<IntPolynomial>,
    map: Vec<IntPolynomial>,
}

impl AffineModel {
    pub fn new(
        p: u64,
        vars: Vec<String>,
        relations: Vec<IntPolynomial>,
        map: Vec<IntPolynomial>,
    ) -> Result<Self, ModelError> {
        let n = vars.len();
        if n == 0 {
            return Err(ModelError::Malformed("at least one variable required".into()));
        }
        if map.len() != n {
            return Err(ModelError::Malformed(format!(
                "map has {} components for {n} variables",
                map.len()
            )));
        }
        if relations.iter().chain(&map).any(|q| q.arity() != n) {
            return Err(ModelError::Malformed("arity mismatch".into()));
        }
        for q in relations.iter().chain(&map) {
            for (_, c) in q.terms() {
                if (c.denom() % BigInt::from(p)).is_zero() {
                    return Err(ModelError::Padic(PadicError::NonIntegral(c.denom().clone())));
                }
            }
        }
        crate::padic::Modulus::new(p, 1)?;
        Ok(AffineModel { p, vars, relations, map })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dimension(&self) -> usize {
        self.vars.len()
    }

    pub fn expected_dimension(&self) -> usize {
        self.vars.len().saturating_sub(self.relations.len())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn relations(&self) -> &[IntPolynomial] {
        &self.relations
    }

    pub fn map(&self) -> &[IntPolynomial] {
        &self.map
    }

    pub fn kernel(&self, ring: &Modulus) -> Result<AffineKernel, PadicError> {
        AffineKernel::new(ring, self)
    }

    fn budget_check(&self, count: u128) -> Result<(), ModelError> {
        if count > SEARCH_BUDGET as u128 {
            return Err(ModelError::SearchSpaceTooLarge { size: count, budget: SEARCH_BUDGET });
        }
        Ok(())
    }

    /// All points of the model modulo `p^k` in lexicographic order, by lifting
    /// solutions modulo `p^j` one digit at a time.
    pub fn points_mod(&self, ring: &Modulus) -> Result<Vec<Vec<u64>>, ModelError> {
        let n = self.vars.len();
        let p = self.p;
        let fan_out = (p as u128).pow(n as u32);
        self.budget_check(fan_out)?;
        let mut level: Vec<Vec<u64>> = vec![vec![0; n]];
        let mut work: u128 = 0;
        for j in 0..ring.k() {
            let next_ring = ring.with_precision(j + 1)?;
            let rels = self
                .relations
                .iter()
                .map(|r| r.reduce(&next_ring))
                .collect::<Result<Vec<_>, _>>()?;
            let step = p.pow(j);
            let mut next = Vec::new();
            for base in &level {
                work += fan_out;
                self.budget_check(work)?;
                let mut digits = vec![0u64; n];
                loop {
                    let cand: Vec<u64> =
                        base.iter().zip(&digits).map(|(b, d)| b + d * step).collect();
                    if rels.iter().all(|r| r.eval(&next_ring, &cand) == Some(0)) {
                        next.push(cand);
                    }
                    // odometer
                    let mut i = n;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < p {
                            break;
                        }
                        digits[i] = 0;
                    }
                    if digits.iter().all(|&d| d == 0) {
                        break;
                    }
                }
            }
            level = next;
        }
        level.sort();
        Ok(level)
    }

    fn jacobian_mod_p(&self, polys: &[IntPolynomial], x: &[u64]) -> Result<FpMatrix, ModelError> {
        let ring = Modulus::new(self.p, 1)?;
        let n = self.vars.len();
        let mut rows = Vec::with_capacity(polys.len());
        for q in polys {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(q.derivative(j).reduce(&ring)?.eval(&ring, x).expect("arity"));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Ok(FpMatrix::zeros(self.p, 0, n));
        }
        Ok(FpMatrix::from_rows(self.p, &rows))
    }

    /// Jacobian of the relations at a special-fiber point.
    pub fn relation_jacobian(&self, x: &[u64]) -> Result<FpMatrix, ModelError> {
        self.jacobian_mod_p(&self.relations, x)
    }

    /// Jacobian of the map at a special-fiber point, `D[i][j] = ∂f_i/∂x_j`.
    pub fn map_jacobian(&self, x: &[u64]) -> Result<FpMatrix, ModelError> {
        self.jacobian_mod_p(&self.map, x)
    }

    pub fn cotangent_dim(&self, x: &[u64]) -> Result<u32, ModelError> {
        let rank = self.relation_jacobian(x)?.rank();
        Ok((self.vars.len() - rank) as u32)
    }

    pub fn special_fiber(&self) -> Result<Vec<SpecialFiberPoint>, ModelError> {
        let ring = Modulus::new(self.p, 1)?;
        self.points_mod(&ring)?
            .into_iter()
            .map(|x| {
                Ok(SpecialFiberPoint {
                    cotangent_dimension: self.cotangent_dim(&x)?,
                    coords: FiberCoords::Affine(x),
                })
            })
            .collect()
    }

    pub fn apply_residue(&self, x: &[u64]) -> Result<Vec<u64>, ModelError> {
        let ring = Modulus::new(self.p, 1)?;
        Ok(self.kernel(&ring)?.apply(x))
    }

    pub fn apply_exact(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.map.iter().map(|q| q.eval_rational(x)).collect()
    }

    pub fn on_model_exact(&self, x: &[BigRational]) -> bool {
        self.relations.iter().all(|r| r.eval_rational(x).is_zero())
    }

    /// Verify that the map preserves the model.
    pub fn check_extends(&self, k: u32) -> Result<Extension, ModelError> {
        let composed: Vec<IntPolynomial> =
            self.relations.iter().map(|r| r.compose(&self.map)).collect();
        if self.relations.is_empty() {
            return Ok(Extension::AffineVerified(VerificationMode::Exact));
        }
        if self.relations.len() == 1 {
            if let Some(q) = exact_quotient(&composed[0], &self.relations[0]) {
                if q.terms().all(|(_, c)| !(c.denom() % BigInt::from(self.p)).is_zero()) {
                    return Ok(Extension::AffineVerified(VerificationMode::Exact));
                }
            }
        }
        let fiber_ring = Modulus::new(self.p, 1)?;
        for x in self.points_mod(&fiber_ring)? {
            if let Some(i) = first_nonvanishing(&composed, &fiber_ring, &x)? {
                return Ok(Extension::Rejected(format!(
                    "relation {} composed with the map is nonzero at {x:?} mod {}",
                    self.relations[i], self.p
                )));
            }
        }
        let ring = Modulus::new(self.p, k)?;
        for x in self.points_mod(&ring)? {
            if let Some(i) = first_nonvanishing(&composed, &ring, &x)? {
                return Ok(Extension::Rejected(format!(
                    "relation {} composed with the map is nonzero at {x:?} mod {}^{k}",
                    self.relations[i], self.p
                )));
            }
        }
        Ok(Extension::AffineVerified(VerificationMode::Sampled))
    }
}

fn first_nonvanishing(
    polys: &[IntPolynomial],
    ring: &Modulus,
    x: &[u64],
) -> Result<Option<usize>, ModelError> {
    for (i, q) in polys.iter().enumerate() {
        if q.reduce(ring)?.eval(ring, x) != Some(0) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn leading(q: &IntPolynomial) -> Option<(Monomial, BigRational)> {
    q.terms()
        .max_by(|(a, _), (b, _)| a.cmp(b))
        .map(|(e, c)| (e.clone(), c.clone()))
}

/// Quotient `a / b` over `Q` when `b` divides `a`, by lex-order division.
pub(crate) fn exact_quotient(a: &IntPolynomial, b: &IntPolynomial) -> Option<IntPolynomial> {
    let (lb_e, lb_c) = leading(b)?;
    let mut rem = a.clone();
    let mut quot = IntPolynomial::zero(a.vars());
    while let Some((e, c)) = leading(&rem) {
        if e.iter().zip(&lb_e).any(|(x, y)| x < y) {
            return None;
        }
        let shift: Monomial = e.iter().zip(&lb_e).map(|(x, y)| x - y).collect();
        let t = IntPolynomial::from_terms(a.vars(), [(shift, c / &lb_c)]);
        rem = &rem - &(&t * b);
        quot = &quot + &t;
    }
    Some(quot)
}

impl fmt::Display for AffineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relations.iter().map(|r| format!("{r} = 0")).collect();
        let map: Vec<String> = self.map.iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "({}) -> ({}) on {{{}}} in A^{} over Z_{}",
            self.vars.join(", "),
            map.join(", "),
            rels.join(", "),
            self.vars.len(),
            self.p
        )
    }
}

/// The affine model reduced modulo `p^k`.
#[derive(Debug, Clone)]
pub struct AffineKernel {
    ring: Modulus,
    map: Vec<ModPoly>,
    relations: Vec<ModPoly>,
    map_jacobian: Vec<Vec<ModPoly>>,
    relation_jacobian: Vec<Vec<ModPoly>>,
}

impl AffineKernel {
    fn new(ring: &Modulus, model: &AffineModel) -> Result<Self, PadicError> {
        let n = model.vars.len();
        let reduce_all = |qs: &[IntPolynomial]| -> Result<Vec<ModPoly>, PadicError> {
            qs.iter().map(|q| q.reduce(ring)).collect()
        };
        let jac = |qs: &[IntPolynomial]| -> Result<Vec<Vec<ModPoly>>, PadicError> {
            qs.iter()
                .map(|q| (0..n).map(|j| q.derivative(j).reduce(ring)).collect())
                .collect()
        };
        Ok(AffineKernel {
            ring: *ring,
            map: reduce_all(&model.map)?,
            relations: reduce_all(&model.relations)?,
            map_jacobian: jac(&model.map)?,
            relation_jacobian: jac(&model.relations)?,
        })
    }

    pub fn ring(&self) -> &Modulus {
        &self.ring
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.map.iter().map(|q| q.eval(&self.ring, x).expect("arity")).collect()
    }

    pub fn on_model(&self, x: &[u64]) -> bool {
        self.relations.iter().all(|r| r.eval(&self.ring, x) == Some(0))
    }

    fn eval_matrix(&self, m: &[Vec<ModPoly>], x: &[u64]) -> Vec<Vec<u64>> {
        m.iter()
            .map(|row| row.iter().map(|q| q.eval(&self.ring, x).expect("arity")).collect())
            .collect()
    }

    pub fn map_jacobian(&self, x: &[u64]) -> Vec<Vec<u64>> {
        self.eval_matrix(&self.map_jacobian, x)
    }

    pub fn relation_jacobian(&self, x: &[u64]) -> Vec<Vec<u64>> {
        self.eval_matrix(&self.relation_jacobian, x)
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node() -> AffineModel {
        let v = ["x", "y"];
        AffineModel::new(
            3,
            vec!["x".into(), "y".into()],
            vec![IntPolynomial::parse("x*y - 3", &v, Some(3)).unwrap()],
            vec![IntPolynomial::var(&v, 1), IntPolynomial::var(&v, 0)],
        )
        .unwrap()
    }

    #[test]
    fn node_special_fiber() {
        let m = node();
        // brute force over F_3^2: xy ≡ 0
        let brute: Vec<Vec<u64>> = (0..3)
            .flat_map(|x| (0..3).map(move |y| vec![x, y]))
            .filter(|v| (v[0] * v[1]) % 3 == 0)
            .collect();
        let fiber = m.special_fiber().unwrap();
        assert_eq!(fiber.len(), 5);
        assert_eq!(fiber.len(), brute.len());
        assert_eq!(m.cotangent_dim(&[0, 0]).unwrap(), 2);
        assert_eq!(m.cotangent_dim(&[1, 0]).unwrap(), 1);
        assert_eq!(m.check_extends(5).unwrap(), Extension::AffineVerified(VerificationMode::Exact));
    }

    #[test]
    fn lifting_tree_matches_brute_force() {
        let m = node();
        let ring = Modulus::new(3, 3).unwrap();
        let brute: Vec<Vec<u64>> = (0..27)
            .flat_map(|x| (0..27).map(move |y| vec![x, y]))
            .filter(|v| (v[0] * v[1]) % 27 == 3)
            .collect();
        assert_eq!(m.points_mod(&ring).unwrap(), brute);
        assert!(brute.iter().all(|v| v[0] % 3 != 0 || v[1] % 3 != 0));
    }

    #[test]
    fn smooth_parabola() {
        let v = ["x", "y"];
        let m = AffineModel::new(
            3,
            vec!["x".into(), "y".into()],
            vec![IntPolynomial::parse("y - x^2", &v, Some(3)).unwrap()],
            vec![IntPolynomial::var(&v, 0), IntPolynomial::var(&v, 1)],
        )
        .unwrap();
        let fiber = m.special_fiber().unwrap();
        assert_eq!(fiber.len(), 3);
        assert!(fiber.iter().all(|q| q.cotangent_dimension == 1));
    }

    #[test]
    fn sampled_and_rejected() {
        let v = ["x", "y"];
        let rels = vec![
            IntPolynomial::parse("x*y - 3", &v, Some(3)).unwrap(),
            IntPolynomial::parse("x - x", &v, Some(3)).unwrap(),
        ];
        let swap = vec![IntPolynomial::var(&v, 1), IntPolynomial::var(&v, 0)];
        let m = AffineModel::new(3, vec!["x".into(), "y".into()], rels.clone(), swap).unwrap();
        assert_eq!(m.check_extends(3).unwrap(), Extension::AffineVerified(VerificationMode::Sampled));

        let shift = vec![
            IntPolynomial::parse("x + 1", &v, Some(3)).unwrap(),
            IntPolynomial::var(&v, 1),
        ];
        let bad = AffineModel::new(3, vec!["x".into(), "y".into()], rels, shift).unwrap();
        assert!(bad.check_extends(3).unwrap().is_rejected());
    }

    #[test]
    fn exact_division() {
        let v = ["x", "y"];
        let a = IntPolynomial::parse("x^2*y - 3*x", &v, None).unwrap();
        let b = IntPolynomial::parse("x*y - 3", &v, None).unwrap();
        assert_eq!(exact_quotient(&a, &b), Some(IntPolynomial::var(&v, 0)));
        let c = IntPolynomial::parse("x^2 + y", &v, None).unwrap();
        assert_eq!(exact_quotient(&c, &b), None);
    }
}
