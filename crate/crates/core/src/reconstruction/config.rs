use serde::{Deserialize, Serialize};

use crate::optim::{Vector, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionKind {
    /// Piecewise constant (first-order scheme).
    None,
    /// Unlimited least-squares fit.
    Lsf,
    /// Least-squares fit scaled into the admissible set.
    LsfLimited,
    Lp,
    #[default]
    Qp,
    /// QP with bounds at the faces against intermediate states.
    QpPositive,
    /// Per-axis minmod on Cartesian grids.
    Minmod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    #[default]
    Uniform,
    InverseDistanceSquared,
}

impl WeightRule {
    pub fn weight(self, offset: &Vector) -> f64 {
        match self {
            WeightRule::Uniform => 1.0,
            WeightRule::InverseDistanceSquared => 1.0 / (offset[0] * offset[0] + offset[1] * offset[1] + offset[2] * offset[2]),
        }
    }
}

/// Where the positivity-preserving QP bounds the linear function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositiveConstraintPoint {
    #[default]
    FaceCentroid,
    NeighborCentroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructionConfig {
    pub kind: ReconstructionKind,
    pub weights: WeightRule,
    pub tol: f64,
    pub positive_point: PositiveConstraintPoint,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            kind: ReconstructionKind::default(),
            weights: WeightRule::default(),
            tol: DEFAULT_TOL,
            positive_point: PositiveConstraintPoint::default(),
        }
    }
}

impl ReconstructionConfig {
    pub fn with_kind(kind: ReconstructionKind) -> Self {
        Self { kind, ..Self::default() }
    }
}
