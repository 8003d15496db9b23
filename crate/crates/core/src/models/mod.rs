//! Models over `Z_p` with an endomorphism: the projective line, affine
//! subschemes of `A^N`, and the polynomial chart used for maps with bad
//! reduction at infinity.

mod affine;
mod p1;
pub mod resultant;
mod window;

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::padic::{Modulus, PadicError};
use crate::parse::ParseError;

pub use affine::{AffineKernel, AffineModel};
pub use p1::{ExactP1, P1Kernel, ProjPoint, RationalMapP1};
pub use resultant::resultant;
pub use window::{PolyChart, WindowKernel};

/// Candidate budget for exhaustive enumeration.
pub const SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("F and G have a common factor (zero resultant)")]
    Degenerate,
    #[error("search space of {size} candidates exceeds the budget {budget}")]
    SearchSpaceTooLarge { size: u128, budget: u64 },
    #[error("map is not defined at {0} modulo p (bad reduction)")]
    NormalizationFailed(String),
    #[error("image of {0} does not satisfy the model relations")]
    NotOnModel(String),
}

/// How the hypothesis "f extends to the model" was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationMode {
    /// Each relation composed with the map lies in the ideal of the relations.
    Exact,
    /// Vanishing checked at every special-fiber point and every point mod p^k.
    Sampled,
}

impl fmt::Display for VerificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerificationMode::Exact => "exact",
            VerificationMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    GoodReductionP1,
    AffineVerified(VerificationMode),
    /// Polynomial chart: no model-level claim, the window is justified by the
    /// escape radius instead.
    Window,
    Rejected(String),
}

impl Extension {
    pub fn is_rejected(&self) -> bool {
        matches!(self, Extension::Rejected(_))
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extension::GoodReductionP1 => write!(f, "good reduction on P^1"),
            Extension::AffineVerified(mode) => write!(f, "affine model verified ({mode})"),
            Extension::Window => write!(f, "polynomial chart window"),
            Extension::Rejected(why) => write!(f, "rejected: {why}"),
        }
    }
}

/// A residue point of `P^1(F_p)`. Finite points sort before infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1Residue {
    Finite(u64),
    Infinity,
}

impl fmt::Display for P1Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Residue::Finite(a) => write!(f, "{a}"),
            P1Residue::Infinity => write!(f, "inf"),
        }
    }
}

/// Coordinates of a point of the special fiber over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberCoords {
    P1(P1Residue),
    Affine(Vec<u64>),
}

impl fmt::Display for FiberCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberCoords::P1(r) => write!(f, "{r}"),
            FiberCoords::Affine(v) => write!(
                f,
                "({})",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpecialFiberPoint {
    pub coords: FiberCoords,
    pub cotangent_dimension: u32,
}

/// A point of the model modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelPoint {
    P1(ProjPoint),
    Affine(Vec<u64>),
    /// `w = p^B z` in the polynomial chart.
    Window(u64),
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPoint::P1(pt) => write!(f, "{pt}"),
            ModelPoint::Affine(v) => write!(
                f,
                "({})",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            ModelPoint::Window(w) => write!(f, "w={w}"),
        }
    }
}

/// A point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactPoint {
    P1(ExactP1),
    Affine(Vec<BigRational>),
    /// The chart coordinate `z` itself (not the scaled `w`).
    Window(BigRational),
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactPoint::P1(x) => write!(f, "{x}"),
            ExactPoint::Affine(v) => write!(
                f,
                "({})",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            ExactPoint::Window(z) => write!(f, "{z}"),
        }
    }
}

/// Which of the three supported shapes a model has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    P1,
    Affine,
    PolyChart,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::P1 => "p1",
            ModelKind::Affine => "affine",
            ModelKind::PolyChart => "poly-chart",
        })
    }
}

/// A model `𝒳/Z_p` together with its endomorphism.
#[derive(Debug, Clone)]
pub enum Model {
    P1(RationalMapP1),
    Affine(AffineModel),
    PolyChart(PolyChart),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::P1(_) => ModelKind::P1,
            Model::Affine(_) => ModelKind::Affine,
            Model::PolyChart(_) => ModelKind::PolyChart,
        }
    }

    pub fn p(&self) -> u64 {
        match self {
            Model::P1(m) => m.p(),
            Model::Affine(m) => m.p(),
            Model::PolyChart(m) => m.p(),
        }
    }

    /// Dimension of the generic fiber.
    pub fn dimension(&self) -> usize {
        match self {
            Model::P1(_) | Model::PolyChart(_) => 1,
            Model::Affine(m) => m.expected_dimension(),
        }
    }

    pub fn check_extends(&self, k: u32) -> Result<Extension, ModelError> {
        match self {
            Model::P1(m) => Ok(m.check_extends()),
            Model::Affine(m) => m.check_extends(k),
            Model::PolyChart(_) => Ok(Extension::Window),
        }
    }

    /// All `F_p`-points of the special fiber in canonical order.
    ///
    /// The polynomial chart has no special fiber of its own; the bound is
    /// evaluated on `P^1`, so its residue field points are listed instead.
    pub fn special_fiber(&self) -> Result<Vec<SpecialFiberPoint>, ModelError> {
        match self {
            Model::P1(m) => Ok(m.special_fiber()),
            Model::Affine(m) => m.special_fiber(),
            Model::PolyChart(m) => Ok(RationalMapP1::projective_line_points(m.p())),
        }
    }

    pub fn d_prime(&self) -> Result<u32, ModelError> {
        Ok(self
            .special_fiber()?
            .iter()
            .map(|q| q.cotangent_dimension)
            .max()
            .unwrap_or(0))
    }

    pub fn cotangent_dim(&self, q: &FiberCoords) -> Result<u32, ModelError> {
        match (self, q) {
            (Model::P1(_) | Model::PolyChart(_), FiberCoords::P1(_)) => Ok(1),
            (Model::Affine(m), FiberCoords::Affine(v)) => m.cotangent_dim(v),
            _ => Err(ModelError::Malformed("point does not belong to this model".into())),
        }
    }

    pub fn reduce_point(&self, ring: &Modulus, pt: &ModelPoint) -> FiberCoords {
        match pt {
            ModelPoint::P1(x) => FiberCoords::P1(x.residue(ring)),
            ModelPoint::Affine(v) => FiberCoords::Affine(v.iter().map(|x| x % ring.p()).collect()),
            ModelPoint::Window(w) => match self {
                Model::PolyChart(m) => FiberCoords::P1(m.residue(ring, *w)),
                _ => FiberCoords::P1(P1Residue::Infinity),
            },
        }
    }

    /// The reduced map on the special fiber.
    pub fn apply_fiber(&self, q: &FiberCoords) -> Result<FiberCoords, ModelError> {
        match (self, q) {
            (Model::P1(m), FiberCoords::P1(r)) => m.apply_residue(*r).map(FiberCoords::P1),
            (Model::Affine(m), FiberCoords::Affine(v)) => m.apply_residue(v).map(FiberCoords::Affine),
            _ => Err(ModelError::Malformed(
                "the reduced map is only defined for P^1 and affine models".into(),
            )),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::P1(m) => m.to_string(),
            Model::Affine(m) => m.to_string(),
            Model::PolyChart(m) => m.to_string(),
        }
    }
}
