//! Corpus management and retrieval: build preprocessed shape corpora,
//! compute pairwise distance matrices, answer k-nearest-neighbor queries,
//! and run the three-robot demonstration of the triangle-inequality failure
//! of the boundary-gap dissimilarity and its relaxed repair under NEM_sigma.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{
    check_axioms, default_triples, pairwise_matrix, relaxation_modulus, theta_surrogate_nem_sigma,
    verify_relaxed_triangle, AuditError, AuditReport, ModulusEstimate, TRIANGLE_SLACK,
};
use crate::contour::{
    load_contour, resample_uniform, AttrValue, Contour, ContourError, FeatureSequence, Point2,
};
use crate::cost::{
    CostError, CostModel, CostModelConfig, GroundCost, Modulus, StretchFn,
};
use crate::elastic::{nem_sigma, nem_sigma_cyclic, ElasticError};
use crate::scalar::{real, Real};
use crate::shapes::{generate_shape, ShapeKind, ShapeSpec};

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("duplicate corpus entry name `{0}`")]
    DuplicateName(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("malformed distance-matrix CSV: {0}")]
    MatrixFormat(String),
    #[error("matrix asymmetric at ({i},{j}): {a} vs {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("matrix diagonal entry {i} is {value}, expected 0")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("matrix entry ({i},{j}) is negative: {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("shapes `{0}` and `{1}` overlap at t = 0")]
    OverlapAtStart(String, String),
    #[error("malformed corpus manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Elastic(#[from] ElasticError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One corpus member: the raw contour plus its preprocessed sequence.
#[derive(Debug, Clone)]
pub struct CorpusEntry<T> {
    name: String,
    contour: Contour<T>,
    sequence: FeatureSequence<T>,
}

impl<T: Real> CorpusEntry<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contour(&self) -> &Contour<T> {
        &self.contour
    }

    pub fn sequence(&self) -> &FeatureSequence<T> {
        &self.sequence
    }
}

/// A named set of consistently preprocessed shapes plus the cost model used
/// for every distance computed against it.
#[derive(Debug, Clone)]
pub struct Corpus<T> {
    entries: Vec<CorpusEntry<T>>,
    cost_model: CostModel<T>,
    resample_n: usize,
    cyclic: bool,
}

impl<T: Real> Corpus<T> {
    pub fn entries(&self) -> &[CorpusEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cost_model(&self) -> &CostModel<T> {
        &self.cost_model
    }

    pub fn resample_n(&self) -> usize {
        self.resample_n
    }

    pub fn cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }
}

/// Wire form of a corpus: shape sources plus the cost-model config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub resample_n: usize,
    #[serde(default)]
    pub cyclic: bool,
    pub cost_model: CostModelConfig,
    pub shapes: Vec<ManifestShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestShape {
    pub name: String,
    #[serde(flatten)]
    pub source: ShapeSource,
    /// Per-contour scalar attributes attached after generation or loading.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeSource {
    Spec { spec: ShapeSpec },
    File { file: String },
}

pub fn manifest_from_json(json: &str) -> Result<CorpusManifest, RetrievalError> {
    serde_json::from_str(json).map_err(|e| RetrievalError::Manifest(e.to_string()))
}

/// Builds a corpus from a manifest: every shape is generated or loaded
/// (file paths resolved against `base_dir`), given its scalar attributes,
/// uniformly resampled to `resample_n`, and preprocessed into a feature
/// sequence. Deterministic for a fixed manifest.
pub fn build_corpus<T: Real>(
    manifest: &CorpusManifest,
    base_dir: &Path,
) -> Result<Corpus<T>, RetrievalError> {
    let cost_model = manifest.cost_model.to_model()?;
    let mut entries: Vec<CorpusEntry<T>> = Vec::with_capacity(manifest.shapes.len());
    for shape in &manifest.shapes {
        if entries.iter().any(|e| e.name == shape.name) {
            return Err(RetrievalError::DuplicateName(shape.name.clone()));
        }
        let mut contour: Contour<T> = match &shape.source {
            ShapeSource::Spec { spec } => generate_shape(spec)?,
            ShapeSource::File { file } => load_contour(base_dir.join(file))?,
        };
        for (attr, value) in &shape.attrs {
            contour = contour.with_attr(attr.clone(), AttrValue::Scalar(real(*value)))?;
        }
        let contour = resample_uniform(&contour, manifest.resample_n)?.renamed(&shape.name);
        let sequence = FeatureSequence::from_contour(&contour)?;
        entries.push(CorpusEntry {
            name: shape.name.clone(),
            contour,
            sequence,
        });
    }
    Ok(Corpus {
        entries,
        cost_model,
        resample_n: manifest.resample_n,
        cyclic: manifest.cyclic,
    })
}

/// A symmetric, zero-diagonal, nonnegative matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix<T> {
    names: Vec<String>,
    values: Vec<Vec<T>>,
}

impl<T: Real> DistanceMatrix<T> {
    pub fn new(names: Vec<String>, values: Vec<Vec<T>>) -> Result<Self, RetrievalError> {
        let n = names.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(RetrievalError::MatrixFormat(format!(
                "expected a {n}x{n} value grid"
            )));
        }
        let tol = real::<T>(TRIANGLE_SLACK);
        let as_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
        for (i, row) in values.iter().enumerate() {
            if row[i].abs() > tol {
                return Err(RetrievalError::NonzeroDiagonal {
                    i,
                    value: as_f64(row[i]),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v < -tol || !v.is_finite() {
                    return Err(RetrievalError::NegativeEntry {
                        i,
                        j,
                        value: as_f64(v),
                    });
                }
                if (v - values[j][i]).abs() > tol {
                    return Err(RetrievalError::AsymmetricMatrix {
                        i,
                        j,
                        a: as_f64(v),
                        b: as_f64(values[j][i]),
                    });
                }
            }
        }
        Ok(Self { names, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }
}

/// Pairwise NEM_sigma over the corpus under its cost model. The fill is
/// parallel over rows; values land at fixed indices, so the result is
/// bit-identical to a sequential fill.
pub fn distance_matrix<T: Real>(corpus: &Corpus<T>) -> Result<DistanceMatrix<T>, RetrievalError> {
    if corpus.is_empty() {
        return Err(RetrievalError::EmptyCorpus);
    }
    let values = pairwise_matrix(corpus.len(), |i, j| {
        Ok(nem_sigma(
            corpus.entries[i].sequence(),
            corpus.entries[j].sequence(),
            &corpus.cost_model,
        )?
        .total)
    })?;
    DistanceMatrix::new(corpus.names(), values)
}

/// The `k` corpus entries closest to the query, sorted ascending by
/// distance with a deterministic name tie-break. The query is preprocessed
/// exactly like the corpus entries — resampled to the corpus point count,
/// unless it already has it (so a stored entry queries back at distance
/// zero). The cyclic matcher is used when the corpus is configured for it.
pub fn knn_query<T: Real>(
    corpus: &Corpus<T>,
    query: &Contour<T>,
    k: usize,
) -> Result<Vec<(String, T)>, RetrievalError> {
    if corpus.is_empty() {
        return Err(RetrievalError::EmptyCorpus);
    }
    if k == 0 || k > corpus.len() {
        return Err(RetrievalError::KOutOfRange {
            k,
            max: corpus.len(),
        });
    }
    let query = if query.len() == corpus.resample_n {
        query.clone()
    } else {
        resample_uniform(query, corpus.resample_n)?
    };
    let seq = FeatureSequence::from_contour(&query)?;
    let mut ranked: Vec<(String, T)> = Vec::with_capacity(corpus.len());
    for entry in &corpus.entries {
        let total = if corpus.cyclic {
            nem_sigma_cyclic(&seq, entry.sequence(), &corpus.cost_model)?
                .report
                .total
        } else {
            nem_sigma(&seq, entry.sequence(), &corpus.cost_model)?.total
        };
        ranked.push((entry.name.clone(), total));
    }
    ranked.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("distances are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(k);
    Ok(ranked)
}

/// Serializes a distance matrix as CSV: header `name,<n1>,<n2>,...`, then
/// one `<ni>,v1,v2,...` row per entry. Values round-trip exactly.
pub fn save_matrix<T: Real>(
    path: impl AsRef<Path>,
    matrix: &DistanceMatrix<T>,
) -> Result<(), RetrievalError> {
    for name in matrix.names() {
        if name.contains(',') || name.contains('\n') {
            return Err(RetrievalError::MatrixFormat(format!(
                "name `{name}` cannot appear in CSV"
            )));
        }
    }
    let mut out = String::from("name");
    for name in matrix.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, name) in matrix.names().iter().enumerate() {
        out.push_str(name);
        for j in 0..matrix.len() {
            out.push(',');
            out.push_str(&format!("{}", matrix.value(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Loads and validates a distance-matrix CSV written by [`save_matrix`].
pub fn load_matrix<T: Real>(path: impl AsRef<Path>) -> Result<DistanceMatrix<T>, RetrievalError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| RetrievalError::MatrixFormat("empty file".into()))?;
    let mut cols = header.split(',');
    if cols.next() != Some("name") {
        return Err(RetrievalError::MatrixFormat(
            "header must start with `name`".into(),
        ));
    }
    let names: Vec<String> = cols.map(|s| s.to_string()).collect();
    if names.is_empty() {
        return Err(RetrievalError::MatrixFormat("no columns".into()));
    }
    let mut values: Vec<Vec<T>> = Vec::with_capacity(names.len());
    for (i, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let row_name = fields
            .next()
            .ok_or_else(|| RetrievalError::MatrixFormat(format!("row {i} empty")))?;
        if row_name != names[i] {
            return Err(RetrievalError::MatrixFormat(format!(
                "row {i} labeled `{row_name}`, expected `{}`",
                names[i]
            )));
        }
        let row: Vec<T> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map(real::<T>)
                    .map_err(|_| RetrievalError::MatrixFormat(format!("bad value `{f}`")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != names.len() {
            return Err(RetrievalError::MatrixFormat(format!(
                "row {i} has {} values, expected {}",
                row.len(),
                names.len()
            )));
        }
        values.push(row);
    }
    if values.len() != names.len() {
        return Err(RetrievalError::MatrixFormat(format!(
            "{} rows for {} columns",
            values.len(),
            names.len()
        )));
    }
    DistanceMatrix::new(names, values)
}

/// One robot in the scene: a shape, its center on the x-axis, and its
/// velocity along that axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePlacement {
    pub kind: ShapeKind,
    pub center_x: f64,
    pub velocity: f64,
}

/// The three-robot scene: shapes on a line, advanced to time `t` by their
/// velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub green: ScenePlacement,
    pub blue: ScenePlacement,
    pub purple: ScenePlacement,
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_gap_samples")]
    pub gap_samples: usize,
    #[serde(default = "default_nem_samples")]
    pub nem_samples: usize,
}

fn default_gap_samples() -> usize {
    256
}

fn default_nem_samples() -> usize {
    64
}

/// Everything the robot demo measures: the boundary-gap dissimilarity with
/// its (expectedly failing) plain triangle audit, and NEM_sigma with its
/// relaxed-triangle audit under the endpoint-dependent surrogate.
#[derive(Debug, Clone, Serialize)]
pub struct RobotScenarioReport<T> {
    pub names: Vec<String>,
    pub gap_values: DistanceMatrix<T>,
    pub gap_audit: AuditReport<T>,
    pub gap_theta_hat: Option<ModulusEstimate<T>>,
    pub nem_values: DistanceMatrix<T>,
    pub nem_sigma_audit: AuditReport<T>,
    pub theta_hat: Option<ModulusEstimate<T>>,
    /// Pairs overlapping at time `t`; the gap is reported anyway but is not
    /// a meaningful dissimilarity for them.
    pub overlapping_pairs: Vec<(String, String)>,
}

fn orientation<T: Real>(p: Point2<T>, q: Point2<T>, r: Point2<T>) -> T {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

fn on_segment<T: Real>(p: Point2<T>, q: Point2<T>, r: Point2<T>) -> bool {
    r.x <= p.x.max(q.x) && r.x >= p.x.min(q.x) && r.y <= p.y.max(q.y) && r.y >= p.y.min(q.y)
}

fn segments_intersect<T: Real>(
    p1: Point2<T>,
    p2: Point2<T>,
    q1: Point2<T>,
    q2: Point2<T>,
) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    let zero = T::zero();
    if ((o1 > zero) != (o2 > zero) && o1 != zero && o2 != zero)
        && ((o3 > zero) != (o4 > zero) && o3 != zero && o4 != zero)
    {
        return true;
    }
    (o1 == zero && on_segment(p1, p2, q1))
        || (o2 == zero && on_segment(p1, p2, q2))
        || (o3 == zero && on_segment(q1, q2, p1))
        || (o4 == zero && on_segment(q1, q2, p2))
}

fn point_in_polygon<T: Real>(p: Point2<T>, c: &Contour<T>) -> bool {
    let pts = c.points();
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Polygon overlap: any boundary crossing, or one boundary contained in the
/// other.
fn polygons_overlap<T: Real>(a: &Contour<T>, b: &Contour<T>) -> bool {
    let pa = a.points();
    let pb = b.points();
    for i in 0..pa.len() {
        let a1 = pa[i];
        let a2 = pa[(i + 1) % pa.len()];
        for j in 0..pb.len() {
            if segments_intersect(a1, a2, pb[j], pb[(j + 1) % pb.len()]) {
                return true;
            }
        }
    }
    point_in_polygon(pa[0], b) || point_in_polygon(pb[0], a)
}

/// Minimal Euclidean distance between the two boundary point sets.
fn boundary_gap<T: Real>(a: &Contour<T>, b: &Contour<T>) -> T {
    let mut best = T::infinity();
    for p in a.points() {
        for q in b.points() {
            let d = p.distance(*q);
            if d < best {
                best = d;
            }
        }
    }
    best
}

fn scene_shapes_at<T: Real>(
    spec: &SceneSpec,
    t: f64,
    samples: usize,
) -> Result<Vec<Contour<T>>, RetrievalError> {
    let placements = [
        ("green", &spec.green),
        ("blue", &spec.blue),
        ("purple", &spec.purple),
    ];
    placements
        .iter()
        .map(|(name, placement)| {
            let base = generate_shape::<T>(&ShapeSpec::new(placement.kind.clone(), samples))?;
            let uniform = resample_uniform(&base, samples)?;
            let center = placement.center_x + t * placement.velocity;
            Ok(uniform
                .translated(real(center), T::zero())
                .renamed(*name)
                .with_attr("velocity", AttrValue::Scalar(real(placement.velocity)))?)
        })
        .collect()
}

/// Runs the three-robot scene at its time `t`.
///
/// The boundary-gap dissimilarity is audited against the plain triangle
/// inequality (a strict violation is the expected outcome for disjoint
/// collinear shapes); NEM_sigma with the velocity-scaled stretch penalty is
/// audited against the relaxed inequality with the endpoint-dependent
/// surrogate. Shapes must be disjoint at t = 0; overlaps at the evaluated
/// time are reported, not fatal.
pub fn robot_scenario<T: Real>(
    spec: &SceneSpec,
) -> Result<RobotScenarioReport<T>, RetrievalError> {
    let names: Vec<String> = vec!["green".into(), "blue".into(), "purple".into()];

    let at_start: Vec<Contour<T>> = scene_shapes_at(spec, 0.0, spec.gap_samples)?;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if polygons_overlap(&at_start[i], &at_start[j]) {
                return Err(RetrievalError::OverlapAtStart(
                    names[i].clone(),
                    names[j].clone(),
                ));
            }
        }
    }

    let gap_shapes: Vec<Contour<T>> = scene_shapes_at(spec, spec.t, spec.gap_samples)?;
    let mut overlapping_pairs = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            if polygons_overlap(&gap_shapes[i], &gap_shapes[j]) {
                overlapping_pairs.push((names[i].clone(), names[j].clone()));
            }
        }
    }

    let gap_grid: Vec<Vec<T>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| boundary_gap(&gap_shapes[i], &gap_shapes[j]))
                .collect()
        })
        .collect();
    let gap = |i: usize, j: usize| gap_grid[i][j];
    let triples = default_triples(3, 27, 0);
    let gap_audit = check_axioms(&names, gap, real(TRIANGLE_SLACK))
        .with_triangle(verify_relaxed_triangle(&names, gap, &triples, |_, _| {
            T::one()
        }));
    let mut gap_audit = gap_audit;
    gap_audit.bound = Some(T::one());
    let gap_theta_hat = relaxation_modulus(&names, gap, &triples).ok();

    let nem_shapes: Vec<Contour<T>> = scene_shapes_at(spec, spec.t, spec.nem_samples)?;
    let sequences: Vec<FeatureSequence<T>> = nem_shapes
        .iter()
        .map(FeatureSequence::from_contour)
        .collect::<Result<_, _>>()?;
    let cm = CostModel::new(
        GroundCost::AngularAbs,
        Modulus::ScalarSum {
            feature: Some("velocity".into()),
        },
        StretchFn::FeatureScaled {
            r0: T::one(),
            r1: T::one(),
            feature: "velocity".into(),
        },
    )?;
    let nem_grid = pairwise_matrix(3, |i, j| {
        Ok(nem_sigma(&sequences[i], &sequences[j], &cm)?.total)
    })?;
    let nem = |i: usize, j: usize| nem_grid[i][j];
    let mut thetas = vec![vec![T::one(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            thetas[i][j] = theta_surrogate_nem_sigma(&sequences[i], &sequences[j], &cm)?;
        }
    }
    let nem_sigma_audit = check_axioms(&names, nem, real(1e-12)).with_triangle(
        verify_relaxed_triangle(&names, nem, &triples, |i, k| thetas[i][k]),
    );
    let theta_hat = relaxation_modulus(&names, nem, &triples).ok();

    Ok(RobotScenarioReport {
        gap_values: DistanceMatrix::new(names.clone(), gap_grid)?,
        gap_audit,
        gap_theta_hat,
        nem_values: DistanceMatrix::new(names.clone(), nem_grid)?,
        nem_sigma_audit,
        theta_hat,
        names,
        overlapping_pairs,
    })
}
