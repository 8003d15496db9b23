//! Dense matrices over the prime field `F_p`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixOrderError {
    #[error("matrix is singular over F_p")]
    Singular,
    #[error("order search exceeded the cap p^D - 1 = {cap}")]
    CapExceeded { cap: u64 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} over F_{}", self.to_rows(), self.p)
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x % p);
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % self.p;
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let (a, b) = (m.get(row, j), m.get(piv, j));
                m.set(row, j, b);
                m.set(piv, j, a);
            }
            let inv = inv_mod(m.get(row, col), p);
            for j in 0..m.cols {
                let v = m.get(row, j) * inv % p;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r != row && factor != 0 {
                    for j in 0..m.cols {
                        let v = (m.get(r, j) + p * p - factor * m.get(row, j) % p) % p;
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Multiplicative order of an invertible square matrix. The search is
    /// capped at `p^D - 1`, the largest element order in `GL_D(F_p)`.
    pub fn order(&self) -> Result<u64, MatrixOrderError> {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let d = self.rows;
        if d == 0 {
            return Ok(1);
        }
        if !self.is_invertible() {
            return Err(MatrixOrderError::Singular);
        }
        let cap = (self.p as u128)
            .checked_pow(d as u32)
            .map(|x| (x - 1).min(u64::MAX as u128) as u64)
            .unwrap_or(u64::MAX);
        let mut acc = self.clone();
        let mut e = 1u64;
        while !acc.is_identity() {
            if e >= cap {
                return Err(MatrixOrderError::CapExceeded { cap });
            }
            acc = acc.mul(self);
            e += 1;
        }
        Ok(e)
    }

    /// Matrix of the linear map `v ↦ v·self` induced on the quotient
    /// `F_p^n / span(relations)`, in the basis of non-pivot unit vectors.
    ///
    /// Returns `None` when the subspace is not mapped into itself.
    pub fn induced_on_quotient(&self, relations: &FpMatrix) -> Option<FpMatrix> {
        let n = self.rows;
        assert_eq!(self.cols, n);
        let (echelon, pivots) = if relations.rows() == 0 {
            (FpMatrix::zeros(self.p, 0, n), Vec::new())
        } else {
            relations.rref()
        };
        let p = self.p;
        let reduce = |mut v: Vec<u64>| -> Vec<u64> {
            for (r, &c) in pivots.iter().enumerate() {
                let factor = v[c];
                if factor != 0 {
                    for (j, x) in v.iter_mut().enumerate() {
                        *x = (*x + p * p - factor * echelon.get(r, j) % p) % p;
                    }
                }
            }
            v
        };
        let row_times = |v: &[u64]| -> Vec<u64> {
            (0..n)
                .map(|j| (0..n).map(|i| v[i] * self.get(i, j) % p).sum::<u64>() % p)
                .collect()
        };
        for r in 0..pivots.len() {
            let row: Vec<u64> = (0..n).map(|j| echelon.get(r, j)).collect();
            if reduce(row_times(&row)).iter().any(|&x| x != 0) {
                return None;
            }
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut out = FpMatrix::zeros(p, free.len(), free.len());
        for (a, &c) in free.iter().enumerate() {
            let mut e = vec![0; n];
            e[c] = 1;
            let image = reduce(row_times(&e));
            for (b, &c2) in free.iter().enumerate() {
                // row-vector convention: image of basis vector a is row a
                out.set(a, b, image[c2]);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        assert_eq!(FpMatrix::from_rows(3, &[vec![2]]).order(), Ok(2));
        assert_eq!(FpMatrix::from_rows(5, &[vec![2]]).order(), Ok(4));
        assert_eq!(FpMatrix::from_rows(3, &[vec![1, 1], vec![0, 1]]).order(), Ok(3));
        assert_eq!(FpMatrix::from_rows(3, &[vec![0]]).order(), Err(MatrixOrderError::Singular));
        assert_eq!(FpMatrix::identity(7, 0).order(), Ok(1));
    }

    #[test]
    fn singer_cycle_reaches_cap() {
        // companion matrix of x^2 + x + 2, primitive over F_3: order 8 = 3^2 - 1
        let m = FpMatrix::from_rows(3, &[vec![0, 1], vec![1, 2]]);
        assert_eq!(m.order(), Ok(8));
    }

    #[test]
    fn rank_and_rref() {
        let m = FpMatrix::from_rows(3, &[vec![1, 2], vec![2, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(FpMatrix::from_rows(3, &[vec![0, 0]]).rank(), 0);
    }

    #[test]
    fn quotient_action() {
        // swap on F_3^2 modulo span(1,1): quotient spanned by e_2, acts by -1
        let swap = FpMatrix::from_rows(3, &[vec![0, 1], vec![1, 0]]);
        let rel = FpMatrix::from_rows(3, &[vec![1, 1]]);
        let q = swap.induced_on_quotient(&rel).unwrap();
        assert_eq!(q.to_rows(), vec![vec![2]]);
        // span(1,0) is not swap-invariant
        let bad = FpMatrix::from_rows(3, &[vec![1, 0]]);
        assert!(swap.induced_on_quotient(&bad).is_none());
    }
}
