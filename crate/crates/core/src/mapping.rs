//! (m,n)-mappings over the index grid: validity, minimality, stretch-edge
//! classification, exhaustive enumeration of minimal mappings, and cost
//! evaluation of a mapping against a pair of feature sequences.
//!
//! Edges use the 1-based index convention of the mapping framework; cost
//! evaluation translates to 0-based element indices internally.

use serde::Serialize;
use thiserror::Error;

use crate::contour::FeatureSequence;
use crate::cost::{CostError, CostModel};
use crate::scalar::{real, Real};

/// Largest `m`/`n` accepted by [`enumerate_minimal_mappings`]; guards against
/// combinatorial blowup (7x7 already yields 8989 paths).
pub const ENUMERATION_CAP: usize = 7;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("mapping must contain at least one edge")]
    Empty,
    #[error("edge <{i},{j}> out of bounds for a {m}x{n} mapping")]
    EdgeOutOfBounds { i: usize, j: usize, m: usize, n: usize },
    #[error("not a valid (m,n)-mapping: {0}")]
    InvalidMapping(String),
    #[error("dimensions {m}x{n} outside the enumerable range 1..={cap}")]
    AboveEnumerationCap { m: usize, n: usize, cap: usize },
    #[error("mapping is {m}x{n} but sequences have lengths {x_len} and {y_len}")]
    DimensionMismatch {
        m: usize,
        n: usize,
        x_len: usize,
        y_len: usize,
    },
    #[error("invalid subdivision: {0}")]
    InvalidSubdivision(String),
    #[error("weight list has {got} entries, sequence has {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("malformed mapping text: {0}")]
    Text(String),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// One correspondence edge `<i, j>`, with `1 <= i <= m` and `1 <= j <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
}

impl Edge {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// A set of edges over the `[1,m] x [1,n]` grid, stored sorted
/// lexicographically with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mapping {
    m: usize,
    n: usize,
    edges: Vec<Edge>,
}

impl Mapping {
    pub fn new(m: usize, n: usize, mut edges: Vec<Edge>) -> Result<Self, MappingError> {
        if edges.is_empty() {
            return Err(MappingError::Empty);
        }
        for e in &edges {
            if e.i == 0 || e.i > m || e.j == 0 || e.j > n {
                return Err(MappingError::EdgeOutOfBounds {
                    i: e.i,
                    j: e.j,
                    m,
                    n,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { m, n, edges })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&Edge::new(i, j)).is_ok()
    }

    /// The same correspondence viewed from the other sequence: every edge
    /// `<i,j>` becomes `<j,i>`.
    pub fn transpose(&self) -> Self {
        let edges = self.edges.iter().map(|e| Edge::new(e.j, e.i)).collect();
        Self::new(self.n, self.m, edges).expect("transpose preserves mapping invariants")
    }

    /// Fixture text form: a `"m n"` header line followed by one `"i j"` line
    /// per edge in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n);
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.i, e.j));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MappingError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MappingError::Text("missing header line".into()))?;
        let parse_pair = |line: &str| -> Result<(usize, usize), MappingError> {
            let mut parts = line.split_whitespace();
            let a = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| MappingError::Text(format!("bad line `{line}`")))?;
            let b = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| MappingError::Text(format!("bad line `{line}`")))?;
            if parts.next().is_some() {
                return Err(MappingError::Text(format!("bad line `{line}`")));
            }
            Ok((a, b))
        };
        let (m, n) = parse_pair(header)?;
        let mut edges = Vec::new();
        for line in lines {
            let (i, j) = parse_pair(line)?;
            edges.push(Edge::new(i, j));
        }
        Self::new(m, n, edges)
    }
}

/// Outcome of [`validate_mapping`]: which coverage indices are missing and
/// which edge pairs cross.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub missing_first_components: Vec<usize>,
    pub missing_second_components: Vec<usize>,
    pub crossing_pairs: Vec<(Edge, Edge)>,
}

/// Checks the three mapping conditions: every `i` in `[1,m]` appears as a
/// first component, every `j` in `[1,n]` as a second component, and no two
/// edges cross (`<i,j'>` and `<i',j>` with `i < i'` and `j < j'`).
pub fn validate_mapping(mapping: &Mapping) -> ValidityReport {
    let mut first = vec![false; mapping.m + 1];
    let mut second = vec![false; mapping.n + 1];
    for e in &mapping.edges {
        first[e.i] = true;
        second[e.j] = true;
    }
    let missing_first_components: Vec<usize> =
        (1..=mapping.m).filter(|&i| !first[i]).collect();
    let missing_second_components: Vec<usize> =
        (1..=mapping.n).filter(|&j| !second[j]).collect();

    let mut crossing_pairs = Vec::new();
    for (k, a) in mapping.edges.iter().enumerate() {
        for b in &mapping.edges[k + 1..] {
            // edges are sorted, so b.i >= a.i
            if a.i < b.i && b.j < a.j {
                crossing_pairs.push((*a, *b));
            }
        }
    }

    ValidityReport {
        valid: missing_first_components.is_empty()
            && missing_second_components.is_empty()
            && crossing_pairs.is_empty(),
        missing_first_components,
        missing_second_components,
        crossing_pairs,
    }
}

fn require_valid(mapping: &Mapping) -> Result<(), MappingError> {
    let report = validate_mapping(mapping);
    if report.valid {
        Ok(())
    } else {
        Err(MappingError::InvalidMapping(format!(
            "missing first {:?}, missing second {:?}, {} crossing pair(s)",
            report.missing_first_components,
            report.missing_second_components,
            report.crossing_pairs.len()
        )))
    }
}

/// True when no single-edge removal leaves a valid mapping. Because validity
/// is monotone under restoring edges, this matches the subset definition of
/// minimality.
pub fn is_minimal(mapping: &Mapping) -> Result<bool, MappingError> {
    require_valid(mapping)?;
    if mapping.edges.len() == 1 {
        return Ok(true);
    }
    for skip in 0..mapping.edges.len() {
        let edges: Vec<Edge> = mapping
            .edges
            .iter()
            .enumerate()
            .filter_map(|(k, e)| (k != skip).then_some(*e))
            .collect();
        let smaller = Mapping {
            m: mapping.m,
            n: mapping.n,
            edges,
        };
        if validate_mapping(&smaller).valid {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The stretched edges of a valid mapping: every `<i,j>` with `<i-1,j>` or
/// `<i,j-1>` also present. Returned in lexicographic order.
pub fn stretch_edges(mapping: &Mapping) -> Result<Vec<Edge>, MappingError> {
    require_valid(mapping)?;
    Ok(mapping
        .edges
        .iter()
        .filter(|e| {
            (e.i > 1 && mapping.contains(e.i - 1, e.j))
                || (e.j > 1 && mapping.contains(e.i, e.j - 1))
        })
        .copied()
        .collect())
}

/// Lazy enumeration of the staircase `(m,n)`-mappings: the monotone lattice
/// paths from `<1,1>` to `<m,n>` with unit right, up, and diagonal steps.
/// Their count is the Delannoy number `D(m-1, n-1)`.
///
/// Paths that turn a right-angle corner contain one removable edge and fail
/// [`is_minimal`]; with nonnegative costs such paths never beat a minimal
/// one, so minimizing over this family equals minimizing over all valid
/// mappings.
pub fn enumerate_minimal_mappings(
    m: usize,
    n: usize,
) -> Result<MinimalMappings, MappingError> {
    if m == 0 || n == 0 || m > ENUMERATION_CAP || n > ENUMERATION_CAP {
        return Err(MappingError::AboveEnumerationCap {
            m,
            n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(MinimalMappings {
        m,
        n,
        stack: vec![vec![Edge::new(1, 1)]],
    })
}

pub struct MinimalMappings {
    m: usize,
    n: usize,
    stack: Vec<Vec<Edge>>,
}

impl Iterator for MinimalMappings {
    type Item = Mapping;

    fn next(&mut self) -> Option<Mapping> {
        while let Some(path) = self.stack.pop() {
            let last = *path.last().expect("paths are nonempty");
            if last.i == self.m && last.j == self.n {
                // steps only increase (i,j), so the path is already sorted
                return Some(Mapping {
                    m: self.m,
                    n: self.n,
                    edges: path,
                });
            }
            for (di, dj) in [(1, 1), (0, 1), (1, 0)] {
                let (i, j) = (last.i + di, last.j + dj);
                if i <= self.m && j <= self.n {
                    let mut next = path.clone();
                    next.push(Edge::new(i, j));
                    self.stack.push(next);
                }
            }
        }
        None
    }
}

/// Cost of one mapping, split into its stretch and distance parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown<T> {
    pub total: T,
    pub stretch_part: T,
    pub distance_part: T,
}

fn cost_impl<T: Real>(
    mapping: &Mapping,
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
    weight: impl Fn(usize, usize) -> T,
) -> Result<CostBreakdown<T>, MappingError> {
    if mapping.m != x.len() || mapping.n != y.len() {
        return Err(MappingError::DimensionMismatch {
            m: mapping.m,
            n: mapping.n,
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    let stretched = stretch_edges(mapping)?;
    let mut distance_part = T::zero();
    let mut stretch_part = T::zero();
    // edges are sorted, so accumulation runs in i-major order
    for e in &mapping.edges {
        let w = weight(e.i, e.j);
        distance_part += cm.ground(x, e.i - 1, y, e.j - 1)? * w;
        if stretched.binary_search(e).is_ok() {
            stretch_part += cm.stretch(x, e.i - 1, y, e.j - 1)? * w;
        }
    }
    Ok(CostBreakdown {
        total: stretch_part + distance_part,
        stretch_part,
        distance_part,
    })
}

/// Total cost of a valid mapping: the ground cost summed over all edges plus
/// the stretch penalty summed over the stretched edges.
pub fn mapping_cost<T: Real>(
    mapping: &Mapping,
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
) -> Result<CostBreakdown<T>, MappingError> {
    cost_impl(mapping, x, y, cm, |_, _| T::one())
}

/// [`mapping_cost`] with each edge term scaled by `wx[i-1] * wy[j-1]`, for
/// non-unit subdivision lengths (see [`Subdivision::lengths`]).
pub fn mapping_cost_weighted<T: Real>(
    mapping: &Mapping,
    x: &FeatureSequence<T>,
    y: &FeatureSequence<T>,
    cm: &CostModel<T>,
    wx: &[T],
    wy: &[T],
) -> Result<CostBreakdown<T>, MappingError> {
    if wx.len() != x.len() {
        return Err(MappingError::WeightLength {
            got: wx.len(),
            expected: x.len(),
        });
    }
    if wy.len() != y.len() {
        return Err(MappingError::WeightLength {
            got: wy.len(),
            expected: y.len(),
        });
    }
    cost_impl(mapping, x, y, cm, |i, j| wx[i - 1] * wy[j - 1])
}

/// A subdivision of the interval `[1, n]`: strictly increasing breakpoints
/// from 1 to n. Consecutive differences are the subinterval lengths, which
/// always sum to `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision<T> {
    breakpoints: Vec<T>,
}

impl<T: Real> Subdivision<T> {
    /// The unit subdivision: breakpoints at every integer of `[1, n]`, all
    /// subinterval lengths 1.
    pub fn unit(n: usize) -> Result<Self, MappingError> {
        if n < 2 {
            return Err(MappingError::InvalidSubdivision(format!(
                "interval [1, {n}] has no room to subdivide"
            )));
        }
        Ok(Self {
            breakpoints: (1..=n).map(|i| real(i as f64)).collect(),
        })
    }

    pub fn new(n: usize, breakpoints: Vec<T>) -> Result<Self, MappingError> {
        if n < 2 || breakpoints.len() < 2 {
            return Err(MappingError::InvalidSubdivision(
                "need at least two breakpoints".into(),
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(MappingError::InvalidSubdivision(
                "non-finite breakpoint".into(),
            ));
        }
        if breakpoints[0] != T::one() || *breakpoints.last().unwrap() != real::<T>(n as f64) {
            return Err(MappingError::InvalidSubdivision(format!(
                "breakpoints must start at 1 and end at {n}"
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MappingError::InvalidSubdivision(
                "breakpoints must increase strictly".into(),
            ));
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn interval_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// The subinterval lengths, usable as per-element weights in
    /// [`mapping_cost_weighted`].
    pub fn lengths(&self) -> Vec<T> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Builds a [`Subdivision`] of `[1, n]`: the unit subdivision when no
/// breakpoints are given, otherwise the validated breakpoint list.
pub fn subdivide<T: Real>(
    n: usize,
    breakpoints: Option<Vec<T>>,
) -> Result<Subdivision<T>, MappingError> {
    match breakpoints {
        None => Subdivision::unit(n),
        Some(b) => Subdivision::new(n, b),
    }
}
