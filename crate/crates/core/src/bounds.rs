//! Closed-form bounds on the primitive period.

use thiserror::Error;

use crate::padic::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("invalid bound inputs: {0}")]
    InvalidInputs(String),
    #[error("d' = 0 gives the bound 0: no cotangent direction")]
    DegenerateBound,
    #[error("the cubic bound assumes p > 2 (got p = {0})")]
    UnsupportedPrime(u64),
    #[error("bound does not fit in 128 bits")]
    Overflow,
}

/// `|X̄(k)|`, `p`, `e = v(p)`, `q = |k|` and `d'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInputs {
    pub count: u64,
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub dprime: u32,
}

impl BoundInputs {
    /// Inputs over `Q_p`: `e = 1`, `q = p`.
    pub fn over_qp(count: u64, p: u64, dprime: u32) -> Self {
        BoundInputs { count, p, e: 1, q: p, dprime }
    }

    fn validate(&self) -> Result<(), BoundError> {
        if !is_prime(self.p) {
            return Err(BoundError::InvalidInputs(format!("{} is not prime", self.p)));
        }
        if self.e == 0 {
            return Err(BoundError::InvalidInputs("e must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(BoundError::InvalidInputs("count must be at least 1".into()));
        }
        if !is_power_of(self.q, self.p) {
            return Err(BoundError::InvalidInputs(format!("q = {} is not a power of {}", self.q, self.p)));
        }
        Ok(())
    }
}

fn is_power_of(mut q: u64, p: u64) -> bool {
    if q < p {
        return false;
    }
    while q.is_multiple_of(p) {
        q /= p;
    }
    q == 1
}

fn pow(base: u64, e: u32) -> Result<u128, BoundError> {
    (base as u128).checked_pow(e).ok_or(BoundError::Overflow)
}

/// `count · p^(e-1) · (q^d' - 1)` for odd `p`, `count · 2^e · (q^d' - 1)`
/// for `p = 2`.
pub fn bound_general(b: &BoundInputs) -> Result<u128, BoundError> {
    b.validate()?;
    if b.dprime == 0 {
        return Err(BoundError::DegenerateBound);
    }
    let ramified = if b.p == 2 { pow(2, b.e)? } else { pow(b.p, b.e - 1)? };
    let linear = pow(b.q, b.dprime)? - 1;
    (b.count as u128)
        .checked_mul(ramified)
        .and_then(|x| x.checked_mul(linear))
        .ok_or(BoundError::Overflow)
}

/// `(q + 1) · p^(e-1) · (q - 1)`, the bound for cubic polynomials without a
/// rational repelling fixed point.
pub fn bound_cubic(p: u64, e: u32, q: u64) -> Result<u128, BoundError> {
    if p == 2 {
        return Err(BoundError::UnsupportedPrime(p));
    }
    let b = BoundInputs { count: q + 1, p, e, q, dprime: 1 };
    b.validate()?;
    ((q as u128) + 1)
        .checked_mul(pow(p, e - 1)?)
        .and_then(|x| x.checked_mul(q as u128 - 1))
        .ok_or(BoundError::Overflow)
}
