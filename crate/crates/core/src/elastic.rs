//! Elastic matching distances: NEM, NEM_r, and NEM_sigma.
//!
//! The solver runs the standard elastic-matching dynamic program over the
//! `m x n` grid. Entering a cell from above or from the left charges the
//! stretch penalty of the new edge; entering diagonally charges nothing
//! beyond the ground cost. On staircase mappings this reproduces the
//! stretch-edge rule exactly, so the DP minimum equals the minimum mapping
//! cost over all minimal mappings (and, costs being nonnegative, over all
//! valid mappings).

use serde::Serialize;
use thiserror::Error;

use crate::contour::{ContourError, FeatureSequence};
use crate::cost::{CostError, CostModel};
use crate::mapping::{mapping_cost, Edge, Mapping, MappingError};
use crate::mapping::enumerate_minimal_mappings;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ElasticError {
    #[error("sequence `{0}` is empty")]
    EmptySequence(String),
    #[error("stretch penalty must be nonnegative, got {0}")]
    NegativeStretch(f64),
    #[error("cyclic matching requires closed sequences; `{0}` is open")]
    OpenSequence(String),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// Result of one elastic match: the optimal total with its stretch/distance
/// split and the minimal mapping realizing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport<T> {
    pub total: T,
    pub stretch_part: T,
    pub distance_part: T,
    pub optimal_mapping: Mapping,
    pub m: usize,
    pub n: usize,
}

/// Result of a cyclic match: the best report over all rotations of `Y` and
/// the rotation index that achieved it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicReport<T> {
    pub report: DistanceReport<T>,
    pub best_rotation: usize,
}

const PARENT_START: u8 = 0;
const PARENT_DIAG: u8 = 1;
const PARENT_UP: u8 = 2;
const PARENT_LEFT: u8 = 3;

/// NEM_sigma: minimum total cost over all `(m,n)`-mappings under the given
/// cost model, with the optimal mapping recovered by backtrace
/// (tie-break: diagonal, then up, then left).
pub fn nem_sigma<T: Real>(
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
) -> Result<DistanceReport<T>, ElasticError> {
    let m = x.len();
    let n = y.len();
    if m == 0 {
        return Err(ElasticError::EmptySequence(x.source().to_string()));
    }
    if n == 0 {
        return Err(ElasticError::EmptySequence(y.source().to_string()));
    }

    let idx = |i: usize, j: usize| i * n + j;
    let mut cost = vec![T::zero(); m * n];
    let mut parent = vec![PARENT_START; m * n];

    cost[idx(0, 0)] = cm.ground(x, 0, y, 0)?;
    for i in 1..m {
        cost[idx(i, 0)] = cost[idx(i - 1, 0)] + cm.stretch(x, i, y, 0)? + cm.ground(x, i, y, 0)?;
        parent[idx(i, 0)] = PARENT_UP;
    }
    for j in 1..n {
        cost[idx(0, j)] = cost[idx(0, j - 1)] + cm.stretch(x, 0, y, j)? + cm.ground(x, 0, y, j)?;
        parent[idx(0, j)] = PARENT_LEFT;
    }
    for i in 1..m {
        for j in 1..n {
            let sigma = cm.stretch(x, i, y, j)?;
            let diag = cost[idx(i - 1, j - 1)];
            let up = cost[idx(i - 1, j)] + sigma;
            let left = cost[idx(i, j - 1)] + sigma;
            let (best, par) = if diag <= up && diag <= left {
                (diag, PARENT_DIAG)
            } else if up <= left {
                (up, PARENT_UP)
            } else {
                (left, PARENT_LEFT)
            };
            cost[idx(i, j)] = cm.ground(x, i, y, j)? + best;
            parent[idx(i, j)] = par;
        }
    }

    let mut edges = Vec::with_capacity(m + n);
    let (mut i, mut j) = (m - 1, n - 1);
    loop {
        edges.push(Edge::new(i + 1, j + 1));
        match parent[idx(i, j)] {
            PARENT_DIAG => {
                i -= 1;
                j -= 1;
            }
            PARENT_UP => i -= 1,
            PARENT_LEFT => j -= 1,
            _ => break,
        }
    }
    edges.reverse();
    let optimal_mapping = Mapping::new(m, n, edges)?;
    let breakdown = mapping_cost(&optimal_mapping, x, y, cm)?;

    Ok(DistanceReport {
        total: cost[idx(m - 1, n - 1)],
        stretch_part: breakdown.stretch_part,
        distance_part: breakdown.distance_part,
        optimal_mapping,
        m,
        n,
    })
}

/// Classic NEM: NEM_sigma with the angular ground cost and unit stretch.
pub fn nem<T: Real>(
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
) -> Result<DistanceReport<T>, ElasticError> {
    nem_sigma(x, y, &CostModel::nem())
}

/// NEM_r: NEM_sigma with the angular ground cost and constant stretch `r`.
pub fn nem_r<T: Real>(
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    r: T,
) -> Result<DistanceReport<T>, ElasticError> {
    if !(r.is_finite() && r >= T::zero()) {
        return Err(ElasticError::NegativeStretch(r.to_f64().unwrap_or(f64::NAN)));
    }
    nem_sigma(x, y, &CostModel::nem_r(r)?)
}

/// Exhaustive oracle: the minimum mapping cost over every enumerated minimal
/// mapping. Only feasible for sequence lengths up to the enumeration cap.
pub fn brute_force_nem_sigma<T: Real>(
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
) -> Result<T, ElasticError> {
    let mut best = T::infinity();
    for mapping in enumerate_minimal_mappings(x.len(), y.len())? {
        let cost = mapping_cost(&mapping, x, y, cm)?;
        if cost.total < best {
            best = cost.total;
        }
    }
    Ok(best)
}

/// Start-point-independent match: the minimum of [`nem_sigma`] over all
/// cyclic rotations of `y`, with the smallest minimizing rotation reported.
pub fn nem_sigma_cyclic<T: Real>(
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
) -> Result<CyclicReport<T>, ElasticError> {
    if !x.closed() {
        return Err(ElasticError::OpenSequence(x.source().to_string()));
    }
    if !y.closed() {
        return Err(ElasticError::OpenSequence(y.source().to_string()));
    }
    let mut best: Option<CyclicReport<T>> = None;
    for k in 0..y.len() {
        let rotated = y.rotated(k)?;
        let report = nem_sigma(x, &rotated, cm)?;
        let better = match &best {
            None => true,
            Some(b) => report.total < b.report.total,
        };
        if better {
            best = Some(CyclicReport {
                report,
                best_rotation: k,
            });
        }
    }
    best.ok_or_else(|| ElasticError::EmptySequence(y.source().to_string()))
}

/// Pointwise stretch penalty `sigma` between two sequence elements.
pub fn evaluate_sigma<T: Real>(
    cm: &CostModel<T>,
    x: &FeatureSequence<T>,
    i: usize,
    y: &FeatureSequence<T>,
    j: usize,
) -> Result<T, ElasticError> {
    Ok(cm.stretch(x, i, y, j)?)
}

/// Pointwise ground cost `B` between two sequence elements.
pub fn evaluate_ground<T: Real>(
    cm: &CostModel<T>,
    x: &FeatureSequence<T>,
    i: usize,
    y: &FeatureSequence<T>,
    j: usize,
) -> Result<T, ElasticError> {
    Ok(cm.ground(x, i, y, j)?)
}

/// Pointwise relaxation modulus `alpha` between two sequence elements.
pub fn evaluate_modulus<T: Real>(
    cm: &CostModel<T>,
    x: &FeatureSequence<T>,
    i: usize,
    y: &FeatureSequence<T>,
    j: usize,
) -> Result<T, ElasticError> {
    Ok(cm.modulus(x, i, y, j)?)
}
