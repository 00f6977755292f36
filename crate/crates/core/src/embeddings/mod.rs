//! Explicit low-width maps of l^p balls and samplers for their fibers.
//!
//! Three maps are provided: the coordinate collapse `π_j`, which
//! soft-thresholds at the j-th smallest coordinate magnitude; the skeleton
//! projection `s`, which pushes a point along one generator until it reaches
//! the cone over the codimension-two skeleton; and the cascade `σ_j`, which
//! repeats that push along sums of generators.
//!
//! The generator-based maps work in conic coordinates. With `Σ μ_k p_k = 0`
//! and `μ > 0`, every point has coefficients `λ ≥ 0` with at least one zero,
//! unique once that zero is fixed; the zero set tells which cone the point
//! lies in.

mod collapse;
mod conic;
mod fibers;
mod generators;
mod hypothesis;
mod projection;

pub use collapse::{collapse_fiber_diameter, collapse_projection, sample_collapse_fiber, CollapseFiber};
pub use conic::{conic_coordinates, ConicCoordinates};
pub use fibers::{empirical_c, empirical_upper_record, sample_fiber, EMPIRICAL_TARGETS};
pub use generators::{balancing_weights, dim3_set, regular_simplex};
pub use hypothesis::{
    hypothesis_check, hypothesis_check_with, HemisphereTest, HypothesisOptions, HypothesisReport,
    NormConditionTest, NormWitness,
};
pub use projection::{cascade_projection, skeleton_projection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Exponent, LpVector, PointConfiguration};
use conic::ConicFrame;

/// Unit-norm tolerance on generator points.
const GENERATOR_NORM_TOL: f64 = 1e-9;
/// Projections may overshoot the unit sphere by at most this much.
const BALL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "map", content = "j")]
pub enum MapKind {
    Collapse(usize),
    Skeleton,
    Cascade(usize),
}

impl MapKind {
    /// Number of dimensions the map removes.
    pub fn depth(self) -> usize {
        match self {
            MapKind::Collapse(j) | MapKind::Cascade(j) => j,
            MapKind::Skeleton => 1,
        }
    }
}

/// A map together with the data it needs: the ambient space and, for the
/// generator-based maps, the generators and their balancing weights `μ`.
#[derive(Debug, Clone)]
pub struct EmbeddingSpec {
    kind: MapKind,
    dim: usize,
    exponent: Exponent,
    generators: Option<PointConfiguration>,
    mu: Vec<f64>,
    frame: Option<ConicFrame>,
}

impl EmbeddingSpec {
    pub fn collapse(n: usize, p: Exponent, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { min: 1, found: 0 });
        }
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, max: n });
        }
        Ok(Self {
            kind: MapKind::Collapse(j),
            dim: n,
            exponent: p,
            generators: None,
            mu: Vec::new(),
            frame: None,
        })
    }

    pub fn skeleton(generators: PointConfiguration) -> Result<Self> {
        Self::with_generators(MapKind::Skeleton, generators)
    }

    /// Cascade of depth `j`; needs `2j < n + 1`, beyond which fibers contain
    /// opposite points.
    pub fn cascade(generators: PointConfiguration, j: usize) -> Result<Self> {
        let n = generators.dim();
        if j == 0 || 2 * j > n {
            return Err(Error::RegimeViolation { n, j });
        }
        Self::with_generators(MapKind::Cascade(j), generators)
    }

    fn with_generators(kind: MapKind, generators: PointConfiguration) -> Result<Self> {
        let n = generators.dim();
        if n < 2 {
            return Err(Error::InvalidDimension { min: 2, found: n });
        }
        if generators.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: generators.len(),
            });
        }
        generators.check_unit_norm(GENERATOR_NORM_TOL)?;
        let mu = match generators.weights() {
            Some(w) if w.iter().all(|&x| x > 0.0) => w.to_vec(),
            _ => balancing_weights(&generators)?,
        };
        let frame = ConicFrame::new(&generators)?;
        Ok(Self {
            kind,
            dim: n,
            exponent: generators.exponent(),
            generators: Some(generators),
            mu,
            frame: Some(frame),
        })
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn generators(&self) -> Option<&PointConfiguration> {
        self.generators.as_ref()
    }

    /// Positive weights `μ` with `Σ μ_k p_k = 0`, `Σ μ_k = 1`; empty for the
    /// collapse map.
    pub fn certificate(&self) -> &[f64] {
        &self.mu
    }

    fn frame(&self) -> Result<&ConicFrame> {
        self.frame
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("the collapse map has no generators".into()))
    }

    /// Apply the map.
    pub fn apply(&self, x: &LpVector) -> Result<LpVector> {
        match self.kind {
            MapKind::Collapse(j) => collapse_projection(x, j),
            MapKind::Skeleton => skeleton_projection(x, self),
            MapKind::Cascade(j) => cascade_projection(x, self, j),
        }
    }

    fn check_input(&self, x: &LpVector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let norm = crate::lp::norm(x.coords(), self.exponent);
        if norm > 1.0 + 1e-12 {
            return Err(Error::OutsideBall { norm });
        }
        Ok(())
    }
}
