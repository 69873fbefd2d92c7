//! Cost models for elastic matching: the ground alignment cost `B`, its
//! relaxation modulus `alpha`, and the stretch penalty `sigma`.
//!
//! Evaluation is pointwise over elements of two [`FeatureSequence`]s,
//! addressed by 0-based element index. All three components are symmetric in
//! their arguments for the built-in kinds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{angular_difference, FeatureSequence};
use crate::scalar::{real, Real};

#[derive(Debug, Error)]
pub enum CostError {
    #[error("sequence `{sequence}` is missing feature `{feature}`")]
    MissingFeature { sequence: String, feature: String },
    #[error("{kind} needs exactly one feature on `{sequence}`, found {found}")]
    AmbiguousFeature {
        sequence: String,
        kind: &'static str,
        found: usize,
    },
    #[error("cost table is {rows}x{cols}, index ({i},{j}) is out of range")]
    TableIndex {
        rows: usize,
        cols: usize,
        i: usize,
        j: usize,
    },
    #[error("invalid cost table: {0}")]
    InvalidTable(String),
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
    #[error("cost model has no JSON form: {0}")]
    Unrepresentable(String),
    #[error("malformed cost-model document: {0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense table of values indexed by a pair of 0-based element indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Real> PairTable<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self, CostError> {
        if values.len() != rows * cols {
            return Err(CostError::InvalidTable(format!(
                "{rows}x{cols} table needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CostError::InvalidTable("non-finite entry".into()));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn value(&self, i: usize, j: usize) -> Result<T, CostError> {
        if i >= self.rows || j >= self.cols {
            return Err(CostError::TableIndex {
                rows: self.rows,
                cols: self.cols,
                i,
                j,
            });
        }
        Ok(self.values[i * self.cols + j])
    }

    fn min_value(&self) -> T {
        self.values
            .iter()
            .copied()
            .fold(T::infinity(), |a, b| a.min(b))
    }
}

fn resolve_feature<'a, T: Real>(
    seq: &'a FeatureSequence<T>,
    name: Option<&str>,
    kind: &'static str,
) -> Result<&'a [T], CostError> {
    match name {
        Some(name) => seq.feature(name).ok_or_else(|| CostError::MissingFeature {
            sequence: seq.source().to_string(),
            feature: name.to_string(),
        }),
        None => seq
            .sole_feature()
            .map(|(_, values)| values)
            .ok_or_else(|| CostError::AmbiguousFeature {
                sequence: seq.source().to_string(),
                kind,
                found: seq.features().len(),
            }),
    }
}

/// Ground alignment cost `B` between two sequence elements.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundCost<T> {
    /// Geodesic tangent-angle difference, in `[0, pi]`.
    AngularAbs,
    /// Squared tangent-angle difference.
    AngularSquared,
    /// Squared difference of a scalar feature; `feature: None` uses the
    /// sequence's sole feature.
    ScalarSquared { feature: Option<String> },
    /// Arbitrary per-index cost table.
    Custom(PairTable<T>),
}

impl<T: Real> GroundCost<T> {
    pub fn eval(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        match self {
            GroundCost::AngularAbs => Ok(angular_difference(x.angles()[i], y.angles()[j])),
            GroundCost::AngularSquared => {
                let d = angular_difference(x.angles()[i], y.angles()[j]);
                Ok(d * d)
            }
            GroundCost::ScalarSquared { feature } => {
                let fx = resolve_feature(x, feature.as_deref(), "scalar-squared ground cost")?;
                let fy = resolve_feature(y, feature.as_deref(), "scalar-squared ground cost")?;
                let d = fx[i] - fy[j];
                Ok(d * d)
            }
            GroundCost::Custom(table) => table.value(i, j),
        }
    }

    /// The modulus under which this ground cost is an extended b-metric:
    /// the angular geodesic is a true metric, its square is a b-metric with
    /// constant 2, and the squared scalar difference admits the scalar-sum
    /// modulus. Unknown for custom tables.
    pub fn natural_modulus(&self) -> Option<Modulus<T>> {
        match self {
            GroundCost::AngularAbs => Some(Modulus::Constant(T::one())),
            GroundCost::AngularSquared => Some(Modulus::Constant(real(2.0))),
            GroundCost::ScalarSquared { feature } => Some(Modulus::ScalarSum {
                feature: feature.clone(),
            }),
            GroundCost::Custom(_) => None,
        }
    }

    fn validate(&self) -> Result<(), CostError> {
        if let GroundCost::Custom(table) = self {
            if table.min_value() < T::zero() {
                return Err(CostError::InvalidTable(
                    "ground cost table has a negative entry".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Relaxation modulus `alpha >= 1` attached to the ground cost.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus<T> {
    Constant(T),
    /// `alpha(x, y) = g(x) + g(y) + 2` on a scalar feature; `feature: None`
    /// uses the sequence's sole feature.
    ScalarSum { feature: Option<String> },
    Custom(PairTable<T>),
}

impl<T: Real> Modulus<T> {
    pub fn eval(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        match self {
            Modulus::Constant(c) => Ok(*c),
            Modulus::ScalarSum { feature } => {
                let fx = resolve_feature(x, feature.as_deref(), "scalar-sum modulus")?;
                let fy = resolve_feature(y, feature.as_deref(), "scalar-sum modulus")?;
                Ok(fx[i] + fy[j] + real(2.0))
            }
            Modulus::Custom(table) => table.value(i, j),
        }
    }

    fn validate(&self) -> Result<(), CostError> {
        match self {
            Modulus::Constant(c) => {
                if !(c.is_finite() && *c >= T::one()) {
                    return Err(CostError::InvalidParameter(format!(
                        "modulus constant must be >= 1, got {c}"
                    )));
                }
            }
            Modulus::ScalarSum { .. } => {}
            Modulus::Custom(table) => {
                if table.min_value() < T::one() {
                    return Err(CostError::InvalidTable(
                        "modulus table has an entry below 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Stretch penalty `sigma >= 0` charged on stretched edges.
#[derive(Debug, Clone, PartialEq)]
pub enum StretchFn<T> {
    Constant(T),
    /// `sigma(x, y) = r0 + r1 * |g(x) - g(y)|` on a named scalar feature.
    FeatureScaled { r0: T, r1: T, feature: String },
    /// Arbitrary per-index penalty table.
    Position(PairTable<T>),
}

impl<T: Real> StretchFn<T> {
    pub fn eval(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        match self {
            StretchFn::Constant(r) => Ok(*r),
            StretchFn::FeatureScaled { r0, r1, feature } => {
                let fx = resolve_feature(x, Some(feature), "feature-scaled stretch")?;
                let fy = resolve_feature(y, Some(feature), "feature-scaled stretch")?;
                Ok(*r0 + *r1 * (fx[i] - fy[j]).abs())
            }
            StretchFn::Position(table) => table.value(i, j),
        }
    }

    fn validate(&self) -> Result<(), CostError> {
        match self {
            StretchFn::Constant(r) => {
                if !(r.is_finite() && *r >= T::zero()) {
                    return Err(CostError::InvalidParameter(format!(
                        "stretch constant must be >= 0, got {r}"
                    )));
                }
            }
            StretchFn::FeatureScaled { r0, r1, .. } => {
                if !(r0.is_finite() && *r0 >= T::zero() && r1.is_finite() && *r1 >= T::zero()) {
                    return Err(CostError::InvalidParameter(format!(
                        "feature-scaled stretch needs r0, r1 >= 0, got r0={r0}, r1={r1}"
                    )));
                }
            }
            StretchFn::Position(table) => {
                if table.min_value() < T::zero() {
                    return Err(CostError::InvalidTable(
                        "stretch table has a negative entry".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The full cost model consumed by the matchers and audits.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel<T> {
    ground: GroundCost<T>,
    modulus: Modulus<T>,
    stretch: StretchFn<T>,
}

impl<T: Real> CostModel<T> {
    pub fn new(
        ground: GroundCost<T>,
        modulus: Modulus<T>,
        stretch: StretchFn<T>,
    ) -> Result<Self, CostError> {
        ground.validate()?;
        modulus.validate()?;
        stretch.validate()?;
        Ok(Self {
            ground,
            modulus,
            stretch,
        })
    }

    /// The classic NEM model: angular ground cost, unit stretch penalty.
    pub fn nem() -> Self {
        Self {
            ground: GroundCost::AngularAbs,
            modulus: Modulus::Constant(T::one()),
            stretch: StretchFn::Constant(T::one()),
        }
    }

    /// Angular ground cost with a constant stretch penalty `r >= 0`.
    pub fn nem_r(r: T) -> Result<Self, CostError> {
        Self::new(
            GroundCost::AngularAbs,
            Modulus::Constant(T::one()),
            StretchFn::Constant(r),
        )
    }

    pub fn ground_kind(&self) -> &GroundCost<T> {
        &self.ground
    }

    pub fn modulus_kind(&self) -> &Modulus<T> {
        &self.modulus
    }

    pub fn stretch_kind(&self) -> &StretchFn<T> {
        &self.stretch
    }

    pub fn with_stretch(mut self, stretch: StretchFn<T>) -> Result<Self, CostError> {
        stretch.validate()?;
        self.stretch = stretch;
        Ok(self)
    }

    /// Ground cost `B` between element `i` of `x` and element `j` of `y`.
    pub fn ground(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        self.ground.eval(x, i, y, j)
    }

    /// Modulus `alpha` between element `i` of `x` and element `j` of `y`.
    pub fn modulus(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        self.modulus.eval(x, i, y, j)
    }

    /// Stretch penalty `sigma` between element `i` of `x` and element `j` of `y`.
    pub fn stretch(
        &self,
        x: &FeatureSequence<T>,
        i: usize,
        y: &FeatureSequence<T>,
        j: usize,
    ) -> Result<T, CostError> {
        self.stretch.eval(x, i, y, j)
    }
}

/// Wire form of a cost model. Custom tables have no document form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModelConfig {
    pub ground: GroundConfig,
    #[serde(default = "default_modulus")]
    pub modulus: ModulusConfig,
    #[serde(default = "default_stretch")]
    pub stretch: StretchConfig,
}

fn default_modulus() -> ModulusConfig {
    ModulusConfig::Constant { c: 1.0 }
}

fn default_stretch() -> StretchConfig {
    StretchConfig::Constant { r: 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundConfig {
    AngularAbs,
    AngularSquared,
    ScalarSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModulusConfig {
    Constant { c: f64 },
    ScalarSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StretchConfig {
    Constant { r: f64 },
    FeatureScaled { r0: f64, r1: f64, feature: String },
}

impl CostModelConfig {
    pub fn to_model<T: Real>(&self) -> Result<CostModel<T>, CostError> {
        let ground = match self.ground {
            GroundConfig::AngularAbs => GroundCost::AngularAbs,
            GroundConfig::AngularSquared => GroundCost::AngularSquared,
            GroundConfig::ScalarSquared => GroundCost::ScalarSquared { feature: None },
        };
        let modulus = match &self.modulus {
            ModulusConfig::Constant { c } => Modulus::Constant(real(*c)),
            ModulusConfig::ScalarSum => Modulus::ScalarSum { feature: None },
        };
        let stretch = match &self.stretch {
            StretchConfig::Constant { r } => StretchFn::Constant(real(*r)),
            StretchConfig::FeatureScaled { r0, r1, feature } => StretchFn::FeatureScaled {
                r0: real(*r0),
                r1: real(*r1),
                feature: feature.clone(),
            },
        };
        CostModel::new(ground, modulus, stretch)
    }

    pub fn from_model<T: Real>(model: &CostModel<T>) -> Result<Self, CostError> {
        let as_f64 = |v: T| v.to_f64().unwrap();
        let ground = match &model.ground {
            GroundCost::AngularAbs => GroundConfig::AngularAbs,
            GroundCost::AngularSquared => GroundConfig::AngularSquared,
            GroundCost::ScalarSquared { .. } => GroundConfig::ScalarSquared,
            GroundCost::Custom(_) => {
                return Err(CostError::Unrepresentable("custom ground table".into()))
            }
        };
        let modulus = match &model.modulus {
            Modulus::Constant(c) => ModulusConfig::Constant { c: as_f64(*c) },
            Modulus::ScalarSum { .. } => ModulusConfig::ScalarSum,
            Modulus::Custom(_) => {
                return Err(CostError::Unrepresentable("custom modulus table".into()))
            }
        };
        let stretch = match &model.stretch {
            StretchFn::Constant(r) => StretchConfig::Constant { r: as_f64(*r) },
            StretchFn::FeatureScaled { r0, r1, feature } => StretchConfig::FeatureScaled {
                r0: as_f64(*r0),
                r1: as_f64(*r1),
                feature: feature.clone(),
            },
            StretchFn::Position(_) => {
                return Err(CostError::Unrepresentable("positional stretch table".into()))
            }
        };
        Ok(Self {
            ground,
            modulus,
            stretch,
        })
    }
}

pub fn cost_model_from_json<T: Real>(json: &str) -> Result<CostModel<T>, CostError> {
    let config: CostModelConfig =
        serde_json::from_str(json).map_err(|e| CostError::Document(e.to_string()))?;
    config.to_model()
}

pub fn load_cost_model<T: Real>(path: impl AsRef<std::path::Path>) -> Result<CostModel<T>, CostError> {
    let json = std::fs::read_to_string(path)?;
    cost_model_from_json(&json)
}
