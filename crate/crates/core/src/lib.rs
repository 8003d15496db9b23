//! Periodic points of endomorphisms over the p-adic integers.
//!
//! The crate enumerates periodic points of a map with a model over `Z_p`
//! modulo `p^k`, certifies which of them come from genuine `Z_p`-points,
//! computes the period decomposition `n = n₀ · r · p^t` through the orbit
//! ring, and checks the resulting bounds on the primitive period.
//!
//! The dynamics engine works over `K = Q_p` only, so the ramification index
//! is `e = 1` throughout; the closed-form bounds in [`bounds`] accept any `e`.

pub mod bounds;
pub mod cli;
pub mod cubic;
pub mod dynamics;
pub mod engine;
pub mod linalg;
pub mod models;
pub mod padic;
pub mod parse;
pub mod poly;
pub mod report;

pub use engine::{CertifiedCycle, PeriodDecomposition, RawCycle, Session};
pub use models::Model;
pub use padic::{Modulus, PAdicApprox, Valuation};
pub use poly::IntPolynomial;
