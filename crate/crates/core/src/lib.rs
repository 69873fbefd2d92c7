//! Elastic shape dissimilarities with metric-axiom auditing.
//!
//! This crate implements the nonlinear elastic matching family of shape
//! distances — NEM, NEM_r with a constant stretch penalty, and NEM_sigma
//! with a position/feature-dependent stretch penalty — over polygonal
//! contours, together with an audit suite that empirically checks identity,
//! symmetry, nonnegativity, and relaxed triangle inequalities (b-metric and
//! extended b-metric style) for any dissimilarity.
//!
//! The pieces:
//!
//! - [`contour`]: contour types, tangent-angle profiles, arc-length
//!   resampling, rotation, JSON I/O.
//! - [`shapes`]: seeded parametric shape generators.
//! - [`mapping`]: (m,n)-mappings as edge sets, validity/minimality checks,
//!   stretch-edge classification, exhaustive enumeration, cost evaluation.
//! - [`cost`]: ground costs, relaxation moduli, stretch penalties, and the
//!   JSON cost-model config.
//! - [`elastic`]: the dynamic-programming solvers and the brute-force
//!   oracle.
//! - [`audit`]: axiom checks, relaxation-modulus estimation, theoretical
//!   bounds, and the NEM_r bound experiment harness.
//! - [`retrieval`]: corpora, distance matrices, k-NN queries, and the
//!   three-robot triangle-inequality demonstration.
//!
//! All numeric code is generic over the [`Real`] scalar (`f32` or `f64`);
//! the `*32`/`*64` aliases below pin the common instantiations.

pub mod audit;
pub mod contour;
pub mod cost;
pub mod elastic;
pub mod mapping;
pub mod retrieval;
pub mod scalar;
pub mod shapes;

pub use audit::{
    audit_nem_r_bound, check_axioms, default_triples, exhaustive_triples, relaxation_modulus,
    sample_triples, theoretical_bound_nem_r, theta_surrogate_nem_sigma, verify_relaxed_triangle,
    AuditError, AuditReport, ModulusEstimate, TripleWitness,
};
pub use contour::{
    angular_difference, contour_from_json, contour_to_json, load_contour, resample_uniform,
    rotate_start, save_contour, tangent_profile, AttrValue, Contour, ContourError,
    FeatureSequence, Point2, TangentProfile,
};
pub use cost::{
    cost_model_from_json, load_cost_model, CostError, CostModel, CostModelConfig, GroundCost,
    Modulus, PairTable, StretchFn,
};
pub use elastic::{
    brute_force_nem_sigma, evaluate_ground, evaluate_modulus, evaluate_sigma, nem, nem_r,
    nem_sigma, nem_sigma_cyclic, CyclicReport, DistanceReport, ElasticError,
};
pub use mapping::{
    enumerate_minimal_mappings, is_minimal, mapping_cost, mapping_cost_weighted, stretch_edges,
    subdivide, validate_mapping, CostBreakdown, Edge, Mapping, MappingError, Subdivision,
    ValidityReport, ENUMERATION_CAP,
};
pub use retrieval::{
    build_corpus, distance_matrix, knn_query, load_matrix, manifest_from_json, robot_scenario,
    save_matrix, Corpus, CorpusEntry, CorpusManifest, DistanceMatrix, ManifestShape,
    RetrievalError, RobotScenarioReport, ScenePlacement, SceneSpec, ShapeSource,
};
pub use scalar::Real;
pub use shapes::{generate_shape, ShapeKind, ShapeSpec, DEFAULT_SEED};

pub type Point32 = Point2<f32>;
pub type Point64 = Point2<f64>;
pub type Contour32 = Contour<f32>;
pub type Contour64 = Contour<f64>;
pub type TangentProfile32 = TangentProfile<f32>;
pub type TangentProfile64 = TangentProfile<f64>;
pub type FeatureSequence32 = FeatureSequence<f32>;
pub type FeatureSequence64 = FeatureSequence<f64>;
pub type CostModel32 = CostModel<f32>;
pub type CostModel64 = CostModel<f64>;
pub type DistanceReport32 = DistanceReport<f32>;
pub type DistanceReport64 = DistanceReport<f64>;
pub type AuditReport32 = AuditReport<f32>;
pub type AuditReport64 = AuditReport<f64>;
pub type DistanceMatrix32 = DistanceMatrix<f32>;
pub type DistanceMatrix64 = DistanceMatrix<f64>;
