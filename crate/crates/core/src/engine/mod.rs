//! Enumeration of periodic points modulo `p^k`, certification against the
//! p-adic integers, and the period decomposition `n = n₀ · r · p^t`.

mod certify;
mod orbit;
mod verdicts;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::dynamics::{find_cycles, FunctionalGraph, SINK};
use crate::linalg::MatrixOrderError;
use crate::models::{
    AffineKernel, ExactPoint, Extension, FiberCoords, Model, ModelError, ModelPoint, P1Kernel,
    ProjPoint, WindowKernel, SEARCH_BUDGET,
};
use crate::padic::{Modulus, PadicError, MIN_PRECISION};

pub use certify::{Certificate, Certification, CertifiedCycle, Multiplier, UncertifiedReason};
pub use orbit::{DecompositionMode, OrbitRing, PeriodDecomposition};
pub use verdicts::{verify_paper_claims, Claim, ModelStats, Status, Verdict, VerdictSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("model rejected: {0}")]
    Rejected(String),
    #[error("s/r = {s}/{r} is not a power of p")]
    NotAPPower { s: u64, r: u64 },
    #[error("matrix order: {0}")]
    MatrixOrder(#[from] MatrixOrderError),
    #[error("point {0} is not periodic modulo p^k")]
    NotPeriodic(String),
    #[error("point {0} leaves the polynomial-chart window")]
    Escaped(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl EngineError {
    /// Failures that more precision might cure, as opposed to bad input.
    pub fn is_precision_related(&self) -> bool {
        matches!(
            self,
            EngineError::Padic(PadicError::PrecisionExhausted(_))
                | EngineError::Internal(_)
                | EngineError::NotAPPower { .. }
                | EngineError::MatrixOrder(_)
        )
    }
}

/// A cycle of the finite map induced on points modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCycle {
    pub points: Vec<ModelPoint>,
}

impl RawCycle {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl fmt::Display for RawCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pts.join(", "))
    }
}

#[derive(Debug, Clone)]
enum Space {
    P1(P1Kernel),
    Affine {
        kernel: AffineKernel,
        points: Vec<Vec<u64>>,
        index: HashMap<Vec<u64>, u32>,
    },
    Window(WindowKernel),
}

/// Result of enumerating and certifying every raw cycle.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub certified: Vec<CertifiedCycle>,
    pub uncertified: Vec<(RawCycle, UncertifiedReason)>,
}

impl Enumeration {
    pub fn raw_count(&self) -> usize {
        self.certified.len() + self.uncertified.len()
    }
}

/// A model together with its reduction modulo `p^k`.
#[derive(Debug, Clone)]
pub struct Session {
    model: Model,
    ring: Modulus,
    extension: Extension,
    space: Space,
    graph: Option<FunctionalGraph>,
    stats: ModelStats,
}

impl Session {
    /// Fails with [`EngineError::Rejected`] when the map does not extend to
    /// the model.
    pub fn new(model: Model, k: u32) -> Result<Self, EngineError> {
        if k < MIN_PRECISION {
            return Err(PadicError::PrecisionTooSmall(k).into());
        }
        let ring = Modulus::new(model.p(), k)?;
        let extension = model.check_extends(k)?;
        if let Extension::Rejected(why) = &extension {
            return Err(EngineError::Rejected(why.clone()));
        }
        let space = match &model {
            Model::P1(m) => {
                let count = ring.modulus() as u128 + (ring.modulus() / ring.p()) as u128;
                budget(count)?;
                Space::P1(m.kernel(&ring)?)
            }
            Model::Affine(m) => {
                let points = m.points_mod(&ring)?;
                budget(points.len() as u128)?;
                let index = points.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect();
                Space::Affine { kernel: m.kernel(&ring)?, points, index }
            }
            Model::PolyChart(m) => {
                budget(ring.modulus() as u128)?;
                if k <= m.floor() {
                    return Err(EngineError::Unsupported(format!(
                        "precision k = {k} must exceed the valuation floor B = {}",
                        m.floor()
                    )));
                }
                Space::Window(m.kernel(&ring)?)
            }
        };
        let graph = match &model {
            Model::PolyChart(_) => None,
            _ => Some(FunctionalGraph::build(&model)?),
        };
        let fiber = model.special_fiber()?;
        let stats = ModelStats {
            p: model.p(),
            e: 1,
            count: fiber.len() as u64,
            d_prime: fiber.iter().map(|q| q.cotangent_dimension).max().unwrap_or(0),
        };
        Ok(Session { model, ring, extension, space, graph, stats })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn ring(&self) -> &Modulus {
        &self.ring
    }

    pub fn precision(&self) -> u32 {
        self.ring.k()
    }

    pub fn extension(&self) -> &Extension {
        &self.extension
    }

    /// `|X̄(F_p)|`, `d'`, `p`, and `e = 1`.
    pub fn stats(&self) -> ModelStats {
        self.stats
    }

    /// The reduced map on the special fiber (absent in the polynomial chart).
    pub fn fiber_graph(&self) -> Option<&FunctionalGraph> {
        self.graph.as_ref()
    }

    pub fn node_count(&self) -> usize {
        match &self.space {
            Space::P1(_) => ProjPoint::count(&self.ring),
            Space::Affine { points, .. } => points.len(),
            Space::Window(_) => self.ring.modulus() as usize,
        }
    }

    fn point(&self, i: u32) -> ModelPoint {
        match &self.space {
            Space::P1(_) => ModelPoint::P1(ProjPoint::from_index(&self.ring, i as usize)),
            Space::Affine { points, .. } => ModelPoint::Affine(points[i as usize].clone()),
            Space::Window(_) => ModelPoint::Window(i as u64),
        }
    }

    fn index(&self, pt: &ModelPoint) -> Option<u32> {
        match (&self.space, pt) {
            (Space::P1(_), ModelPoint::P1(x)) => Some(x.index(&self.ring) as u32),
            (Space::Affine { index, .. }, ModelPoint::Affine(v)) => index.get(v).copied(),
            (Space::Window(_), ModelPoint::Window(w)) if *w < self.ring.modulus() => Some(*w as u32),
            _ => None,
        }
    }

    fn successor(&self, i: u32) -> u32 {
        match &self.space {
            Space::P1(kern) => {
                let x = ProjPoint::from_index(&self.ring, i as usize);
                kern.apply(&x).map_or(SINK, |y| y.index(&self.ring) as u32)
            }
            Space::Affine { kernel, points, index } => {
                let image = kernel.apply(&points[i as usize]);
                index.get(&image).copied().unwrap_or(SINK)
            }
            Space::Window(kern) => kern.apply(i as u64).map_or(SINK, |w| w as u32),
        }
    }

    /// `f(P)` modulo `p^k`; `None` when the image leaves the window.
    pub fn apply(&self, pt: &ModelPoint) -> Result<Option<ModelPoint>, EngineError> {
        match (&self.space, pt) {
            (Space::P1(kern), ModelPoint::P1(x)) => kern
                .apply(x)
                .map(|y| Some(ModelPoint::P1(y)))
                .ok_or_else(|| EngineError::Internal(format!("cannot normalize f({x})"))),
            (Space::Affine { kernel, .. }, ModelPoint::Affine(v)) => {
                if !kernel.on_model(v) {
                    return Err(ModelError::NotOnModel(pt.to_string()).into());
                }
                Ok(Some(ModelPoint::Affine(kernel.apply(v))))
            }
            (Space::Window(kern), ModelPoint::Window(w)) => {
                Ok(kern.apply(*w % self.ring.modulus()).map(ModelPoint::Window))
            }
            _ => Err(ModelError::Malformed("point does not belong to this model".into()).into()),
        }
    }

    /// `f^n(P)` modulo `p^k`, canonicalized after every step.
    pub fn iterate(&self, pt: &ModelPoint, n: u64) -> Result<ModelPoint, EngineError> {
        let mut x = pt.clone();
        for _ in 0..n {
            x = self.apply(&x)?.ok_or_else(|| EngineError::Escaped(pt.to_string()))?;
        }
        Ok(x)
    }

    /// Reduction of an exact point into the finite set modulo `p^k`.
    pub fn reduce_exact(&self, pt: &ExactPoint) -> Result<ModelPoint, EngineError> {
        match (&self.model, pt) {
            (Model::P1(_), ExactPoint::P1(x)) => Ok(ModelPoint::P1(x.reduce(&self.ring)?)),
            (Model::Affine(_), ExactPoint::Affine(v)) => Ok(ModelPoint::Affine(
                v.iter()
                    .map(|c| self.ring.from_rational(c))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            (Model::PolyChart(m), ExactPoint::Window(z)) => {
                let pb = num_traits::pow(num_bigint::BigInt::from(m.p()), m.floor() as usize);
                let w = z * num_rational::BigRational::from_integer(pb);
                Ok(ModelPoint::Window(self.ring.from_rational(&w).map_err(|_| {
                    EngineError::Escaped(format!("{z} lies outside v(z) >= -{}", m.floor()))
                })?))
            }
            _ => Err(ModelError::Malformed("point does not match the model kind".into()).into()),
        }
    }

    pub fn residue(&self, pt: &ModelPoint) -> FiberCoords {
        self.model.reduce_point(&self.ring, pt)
    }

    /// Every cycle of the finite map on points modulo `p^k`, sorted by
    /// `(length, smallest point)` and starting at the smallest point.
    pub fn enumerate_periodic(&self) -> Result<Vec<RawCycle>, EngineError> {
        let n = self.node_count();
        let succ: Vec<u32> = (0..n as u32).map(|i| self.successor(i)).collect();
        Ok(find_cycles(&succ)
            .into_iter()
            .map(|c| RawCycle { points: c.into_iter().map(|i| self.point(i)).collect() })
            .collect())
    }

    /// The raw cycle through a point, if the point is periodic modulo `p^k`.
    pub fn cycle_through(&self, pt: &ModelPoint) -> Result<RawCycle, EngineError> {
        let start = self.index(pt).ok_or_else(|| ModelError::NotOnModel(pt.to_string()))?;
        let mut seen = std::collections::HashSet::from([start]);
        let mut points = vec![self.point(start)];
        let mut v = self.successor(start);
        while v != start {
            if v == SINK {
                return Err(EngineError::Escaped(pt.to_string()));
            }
            if !seen.insert(v) {
                return Err(EngineError::NotPeriodic(pt.to_string()));
            }
            points.push(self.point(v));
            v = self.successor(v);
        }
        Ok(RawCycle { points })
    }

    /// Enumerate and certify all raw cycles.
    pub fn certify_all(&self) -> Result<Enumeration, EngineError> {
        let mut certified = Vec::new();
        let mut uncertified = Vec::new();
        for raw in self.enumerate_periodic()? {
            match self.certify(&raw)? {
                Certification::Certified(c) => certified.push(c),
                Certification::Uncertified(reason) => uncertified.push((raw, reason)),
            }
        }
        Ok(Enumeration { certified, uncertified })
    }

    /// Residues along a cycle.
    pub fn residues(&self, points: &[ModelPoint]) -> Vec<FiberCoords> {
        points.iter().map(|p| self.residue(p)).collect()
    }
}

fn budget(count: u128) -> Result<(), EngineError> {
    if count > SEARCH_BUDGET as u128 {
        return Err(ModelError::SearchSpaceTooLarge { size: count, budget: SEARCH_BUDGET }.into());
    }
    Ok(())
}
