use std::fmt;

use super::PeriodDecomposition;
use crate::bounds::{bound_general, BoundError, BoundInputs};

/// Special-fiber data feeding the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelStats {
    pub p: u64,
    /// Ramification index; always 1 for the dynamics engine.
    pub e: u32,
    /// `|X̄(F_p)|`.
    pub count: u64,
    pub d_prime: u32,
}

impl ModelStats {
    pub fn bound_inputs(&self) -> BoundInputs {
        BoundInputs { count: self.count, p: self.p, e: self.e, q: self.p, dprime: self.d_prime }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    /// `n₀ <= |X̄(k)|`
    C1,
    /// `r <= |k|^d' - 1`
    C2,
    /// `t <= v(p) - 1` for odd `p`, `t <= v(2)` for `p = 2`
    C3,
    /// `n <= |X̄(k)| p^(v(p)-1) (|k|^d' - 1)` (or `2^v(2)` for `p = 2`)
    C4,
}

impl Claim {
    pub const ALL: [Claim; 4] = [Claim::C1, Claim::C2, Claim::C3, Claim::C4];

    pub fn inequality(self, p: u64) -> &'static str {
        match self {
            Claim::C1 => "n0 <= |X(k)|",
            Claim::C2 => "r <= |k|^d' - 1",
            Claim::C3 if p == 2 => "t <= v(2)",
            Claim::C3 => "t <= v(p) - 1",
            Claim::C4 if p == 2 => "n <= |X(k)| * 2^v(2) * (|k|^d' - 1)",
            Claim::C4 => "n <= |X(k)| * p^(v(p)-1) * (|k|^d' - 1)",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One checked inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub claim: Claim,
    pub status: Status,
    pub lhs: Option<u128>,
    pub rhs: Option<u128>,
    pub note: Option<String>,
}

impl Verdict {
    fn compare(claim: Claim, lhs: u128, rhs: u128) -> Self {
        let status = if lhs <= rhs { Status::Holds } else { Status::Violated };
        Verdict { claim, status, lhs: Some(lhs), rhs: Some(rhs), note: None }
    }

    fn violated(claim: Claim, lhs: Option<u128>, rhs: Option<u128>, note: String) -> Self {
        Verdict { claim, status: Status::Violated, lhs, rhs, note: Some(note) }
    }
}

/// Verdicts C1-C4 for one decomposition, with the inputs they were checked
/// against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictSet {
    pub verdicts: Vec<Verdict>,
    pub decomposition: PeriodDecomposition,
    pub stats: ModelStats,
}

impl VerdictSet {
    pub fn get(&self, claim: Claim) -> &Verdict {
        self.verdicts.iter().find(|v| v.claim == claim).expect("all claims present")
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.status == Status::Holds)
    }
}

/// Evaluate each inequality of the period bound against a decomposition.
/// Violations are findings; nothing here fails.
pub fn verify_paper_claims(dec: &PeriodDecomposition, stats: &ModelStats) -> VerdictSet {
    let c1 = Verdict::compare(Claim::C1, dec.n0 as u128, stats.count as u128);
    let c2 = match (stats.p as u128).checked_pow(stats.d_prime) {
        Some(q) => Verdict::compare(Claim::C2, dec.r as u128, q - 1),
        None => Verdict::violated(Claim::C2, Some(dec.r as u128), None, "p^d' overflows".into()),
    };
    let t_cap = if stats.p == 2 { stats.e } else { stats.e - 1 } as u128;
    let c3 = Verdict::compare(Claim::C3, dec.t as u128, t_cap);
    let c4 = match bound_general(&stats.bound_inputs()) {
        Ok(b) => Verdict::compare(Claim::C4, dec.n as u128, b),
        Err(BoundError::DegenerateBound) => Verdict::violated(
            Claim::C4,
            Some(dec.n as u128),
            Some(0),
            "d' = 0: the bound degenerates to 0".into(),
        ),
        Err(e) => Verdict::violated(Claim::C4, Some(dec.n as u128), None, e.to_string()),
    };
    VerdictSet { verdicts: vec![c1, c2, c3, c4], decomposition: dec.clone(), stats: *stats }
}
