use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::IntPolynomial;

/// Coefficients `c_i` of `X^i Z^(d-i)` of a binary form of degree `d`,
/// scaled by the lcm of their denominators.
pub(crate) fn integral_form_coeffs(form: &IntPolynomial, d: u32) -> Vec<BigInt> {
    let lcm = form.denominator_lcm();
    (0..=d)
        .map(|i| {
            let c = form.coefficient(&[i, d - i]) * BigInt::clone(&lcm);
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two binary forms of common degree `d` via the `2d × 2d`
/// Sylvester determinant. Rational coefficients are cleared first; the
/// scaling factors are p-units for p-integral input, so `v_p` is unaffected.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial, d: u32) -> BigInt {
    let fc = integral_form_coeffs(f, d);
    let gc = integral_form_coeffs(g, d);
    let n = 2 * d as usize;
    if n == 0 {
        // constant forms: Res(a, b) = 1 by convention for degree 0
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(n);
    for coeffs in [&fc, &gc] {
        for shift in 0..d as usize {
            let mut row = vec![BigInt::zero(); n];
            // highest power of X first
            for (j, c) in coeffs.iter().rev().enumerate() {
                row[shift + j] = c.clone();
            }
            rows.push(row);
        }
    }
    bareiss_determinant(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn form(text: &str) -> IntPolynomial {
        IntPolynomial::parse(text, &["X", "Z"], None).unwrap()
    }

    #[test]
    fn disjoint_monomials() {
        for d in 1..5 {
            let f = form(&format!("X^{d}"));
            let g = form(&format!("Z^{d}"));
            assert!(resultant(&f, &g, d).abs().is_one());
        }
    }

    #[test]
    fn examples() {
        assert!(resultant(&form("X^2 - Z^2"), &form("Z^2"), 2).abs().is_one());
        assert_eq!(resultant(&form("3*X^2"), &form("Z^2"), 2).abs(), BigInt::from(9));
        assert!(resultant(&form("X^2 - X*Z"), &form("X*Z"), 2).is_zero());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m: Vec<Vec<BigInt>> = [[2, -1, 3], [0, 4, 5], [1, 1, -2]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        // 2(-8-5) +1(0-5) +3(0-4) = -26 - 5 - 12
        assert_eq!(bareiss_determinant(m), BigInt::from(-43));
    }
}
