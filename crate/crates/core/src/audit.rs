//! Empirical audits of metric, b-metric, and extended b-metric axioms for
//! arbitrary dissimilarities: identity, symmetry, nonnegativity, relaxed
//! triangle inequalities with constant or endpoint-dependent relaxation, and
//! estimation of the smallest feasible relaxation modulus.
//!
//! Audits never abort on violations; they report them. Instances are
//! addressed by index into a caller-supplied name list, and dissimilarities
//! are infallible closures (precompute a matrix first for fallible or
//! expensive distances).

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contour::{resample_uniform, Contour, ContourError, FeatureSequence};
use crate::cost::{CostError, CostModel};
use crate::elastic::{nem_sigma, ElasticError};
use crate::scalar::{real, Real};

/// Denominators at or below this floor are excluded from ratio estimation.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Additive slack applied when testing relaxed triangle inequalities.
pub const TRIANGLE_SLACK: f64 = 1e-9;

/// Number of instances up to which triple sampling is replaced by exhaustive
/// enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("every sampled triple had a denominator at or below {floor}; estimate undefined")]
    AllDenominatorsBelowFloor { floor: f64 },
    #[error("stretch penalty r must be positive, got {0}")]
    NonPositiveR(f64),
    #[error(transparent)]
    Elastic(#[from] ElasticError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// One triple `(x, y, z)` with the two sides of the relaxed triangle
/// inequality: `lhs = d(x,z)`, `rhs = d(x,y) + d(y,z)`. The ratio is
/// recorded only when the denominator clears [`DENOMINATOR_FLOOR`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleWitness<T> {
    pub x: String,
    pub y: String,
    pub z: String,
    pub lhs: T,
    pub rhs: T,
    pub ratio: Option<T>,
}

/// Outcome of an audit run: axiom checks with counterexamples, the observed
/// worst triple, and any violations of the supplied bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport<T> {
    pub identity_ok: bool,
    pub identity_failures: Vec<(String, T)>,
    pub symmetry_ok: bool,
    pub symmetry_failures: Vec<(String, String, T, T)>,
    pub nonneg_ok: bool,
    pub nonneg_failures: Vec<(String, String, T)>,
    pub max_ratio: Option<T>,
    pub worst: Option<TripleWitness<T>>,
    pub bound: Option<T>,
    pub violations: Vec<TripleWitness<T>>,
}

impl<T: Real> AuditReport<T> {
    fn clean() -> Self {
        Self {
            identity_ok: true,
            identity_failures: Vec::new(),
            symmetry_ok: true,
            symmetry_failures: Vec::new(),
            nonneg_ok: true,
            nonneg_failures: Vec::new(),
            max_ratio: None,
            worst: None,
            bound: None,
            violations: Vec::new(),
        }
    }

    /// Copies the triangle-side fields out of `other` into `self`.
    pub fn with_triangle(mut self, other: AuditReport<T>) -> Self {
        self.max_ratio = other.max_ratio;
        self.worst = other.worst;
        self.bound = other.bound;
        self.violations = other.violations;
        self
    }

    pub fn passed(&self) -> bool {
        self.identity_ok && self.symmetry_ok && self.nonneg_ok && self.violations.is_empty()
    }
}

/// Smallest observed feasible relaxation modulus over a triple sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusEstimate<T> {
    /// Max of `d(x,z) / (d(x,y) + d(y,z))` over triples with a denominator
    /// above the floor.
    pub theta_hat: T,
    /// Number of triples that entered the estimate.
    pub sample_count: usize,
    pub floor: T,
    pub worst: Option<TripleWitness<T>>,
}

/// Checks `d(x,x) <= tol`, `|d(x,y) - d(y,x)| <= tol`, and `d >= -tol` over
/// all ordered pairs of the sample, listing every counterexample.
pub fn check_axioms<T: Real>(
    names: &[String],
    d: impl Fn(usize, usize) -> T,
    tol: T,
) -> AuditReport<T> {
    let n = names.len();
    let mut report = AuditReport::clean();
    for (i, name) in names.iter().enumerate() {
        let dii = d(i, i);
        if dii.is_nan() || dii.abs() > tol {
            report.identity_failures.push((name.clone(), dii));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d(i, j);
            let dji = d(j, i);
            let gap = (dij - dji).abs();
            if gap.is_nan() || gap > tol {
                report
                    .symmetry_failures
                    .push((names[i].clone(), names[j].clone(), dij, dji));
            }
            if dij < -tol || !dij.is_finite() {
                report
                    .nonneg_failures
                    .push((names[i].clone(), names[j].clone(), dij));
            }
            if dji < -tol || !dji.is_finite() {
                report
                    .nonneg_failures
                    .push((names[j].clone(), names[i].clone(), dji));
            }
        }
    }
    report.identity_ok = report.identity_failures.is_empty();
    report.symmetry_ok = report.symmetry_failures.is_empty();
    report.nonneg_ok = report.nonneg_failures.is_empty();
    report
}

/// All `n^3` ordered triples over `0..n`.
pub fn exhaustive_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut triples = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                triples.push((x, y, z));
            }
        }
    }
    triples
}

/// `count` triples drawn uniformly with replacement under a fixed seed.
pub fn sample_triples(n: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            )
        })
        .collect()
}

/// Exhaustive triples for small samples, seeded uniform sampling otherwise.
pub fn default_triples(n: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    if n <= EXHAUSTIVE_LIMIT {
        exhaustive_triples(n)
    } else {
        sample_triples(n, count, seed)
    }
}

fn witness<T: Real>(
    names: &[String],
    (x, y, z): (usize, usize, usize),
    lhs: T,
    rhs: T,
) -> TripleWitness<T> {
    let floor = real::<T>(DENOMINATOR_FLOOR);
    TripleWitness {
        x: names[x].clone(),
        y: names[y].clone(),
        z: names[z].clone(),
        lhs,
        rhs,
        ratio: (rhs > floor).then(|| lhs / rhs),
    }
}

/// Estimates the smallest feasible relaxation modulus: the max of
/// `d(x,z) / (d(x,y) + d(y,z))` over the given triples, skipping
/// denominators at or below the floor.
pub fn relaxation_modulus<T: Real>(
    names: &[String],
    d: impl Fn(usize, usize) -> T,
    triples: &[(usize, usize, usize)],
) -> Result<ModulusEstimate<T>, AuditError> {
    let floor = real::<T>(DENOMINATOR_FLOOR);
    let mut best: Option<(T, TripleWitness<T>)> = None;
    let mut count = 0usize;
    for &(x, y, z) in triples {
        let lhs = d(x, z);
        let rhs = d(x, y) + d(y, z);
        if rhs <= floor {
            continue;
        }
        count += 1;
        let ratio = lhs / rhs;
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, witness(names, (x, y, z), lhs, rhs)));
        }
    }
    match best {
        Some((theta_hat, worst)) => Ok(ModulusEstimate {
            theta_hat,
            sample_count: count,
            floor,
            worst: Some(worst),
        }),
        None => Err(AuditError::AllDenominatorsBelowFloor {
            floor: DENOMINATOR_FLOOR,
        }),
    }
}

/// Flags every triple with `d(x,z) > theta(x,z) * (d(x,y) + d(y,z))` plus
/// slack, and records the worst observed ratio alongside.
pub fn verify_relaxed_triangle<T: Real>(
    names: &[String],
    d: impl Fn(usize, usize) -> T,
    triples: &[(usize, usize, usize)],
    theta: impl Fn(usize, usize) -> T,
) -> AuditReport<T> {
    let slack = real::<T>(TRIANGLE_SLACK);
    let floor = real::<T>(DENOMINATOR_FLOOR);
    let mut report = AuditReport::clean();
    for &(x, y, z) in triples {
        let lhs = d(x, z);
        let rhs = d(x, y) + d(y, z);
        if lhs > theta(x, z) * rhs + slack {
            report.violations.push(witness(names, (x, y, z), lhs, rhs));
        }
        if rhs > floor {
            let ratio = lhs / rhs;
            if report.max_ratio.is_none_or(|m| ratio > m) {
                report.max_ratio = Some(ratio);
                report.worst = Some(witness(names, (x, y, z), lhs, rhs));
            }
        }
    }
    report
}

/// The proven relaxation constant for NEM_r: `1 + pi/(2r)` when sample
/// points are uniformly distributed across all shapes, `1 + pi/r` otherwise.
pub fn theoretical_bound_nem_r<T: Real>(r: T, uniform: bool) -> Result<T, AuditError> {
    if !(r.is_finite() && r > T::zero()) {
        return Err(AuditError::NonPositiveR(r.to_f64().unwrap_or(f64::NAN)));
    }
    let pi = T::pi();
    Ok(if uniform {
        T::one() + pi / (real::<T>(2.0) * r)
    } else {
        T::one() + pi / r
    })
}

/// Discrete surrogate for the endpoint-dependent relaxation of NEM_sigma:
/// one plus the largest modulus value over all element pairs of the two
/// sequences.
pub fn theta_surrogate_nem_sigma<T: Real>(
    x: &FeatureSequence<T>,
    z: &FeatureSequence<T>,
    cm: &CostModel<T>,
) -> Result<T, AuditError> {
    let mut max_alpha = T::neg_infinity();
    for i in 0..x.len() {
        for k in 0..z.len() {
            let alpha = cm.modulus(x, i, z, k)?;
            if alpha > max_alpha {
                max_alpha = alpha;
            }
        }
    }
    Ok(T::one() + max_alpha)
}

/// Evaluates a full pairwise dissimilarity matrix in parallel. Values land
/// at fixed indices, so the result is identical to a sequential fill.
pub fn pairwise_matrix<T, F>(count: usize, d: F) -> Result<Vec<Vec<T>>, ElasticError>
where
    T: Real,
    F: Fn(usize, usize) -> Result<T, ElasticError> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| (0..count).map(|j| d(i, j)).collect())
        .collect()
}

/// Pairwise NEM_r over shapes uniformly resampled to `n_points`; the
/// preprocessing the uniform-case bound assumes.
pub fn nem_r_matrix<T: Real>(
    shapes: &[Contour<T>],
    r: T,
    n_points: usize,
) -> Result<(Vec<String>, Vec<Vec<T>>), AuditError> {
    let names: Vec<String> = shapes.iter().map(|c| c.name().to_string()).collect();
    let sequences: Vec<FeatureSequence<T>> = shapes
        .iter()
        .map(|c| FeatureSequence::from_contour(&resample_uniform(c, n_points)?))
        .collect::<Result<_, _>>()?;
    let cm = CostModel::nem_r(r)?;
    let matrix = pairwise_matrix(sequences.len(), |i, j| {
        Ok(nem_sigma(&sequences[i], &sequences[j], &cm)?.total)
    })?;
    Ok((names, matrix))
}

/// Experiment harness for the uniform-case NEM_r bound: resamples every
/// shape to `n_points`, computes pairwise NEM_r, and checks sampled triples
/// against `1 + pi/(2r)`. Exhaustive over triples when the shape set is
/// small; otherwise `trials` seeded samples.
pub fn audit_nem_r_bound<T: Real>(
    shapes: &[Contour<T>],
    r: T,
    n_points: usize,
    trials: usize,
    seed: u64,
) -> Result<AuditReport<T>, AuditError> {
    let bound = theoretical_bound_nem_r(r, true)?;
    let (names, matrix) = nem_r_matrix(shapes, r, n_points)?;
    let d = |i: usize, j: usize| matrix[i][j];

    let triples = default_triples(names.len(), trials, seed);
    let mut report = check_axioms(&names, d, real(TRIANGLE_SLACK))
        .with_triangle(verify_relaxed_triangle(&names, d, &triples, |_, _| bound));
    report.bound = Some(bound);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{generate_shape, ShapeKind, ShapeSpec};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn euclidean_on_points_passes_everything() {
        let points: Vec<f64> = vec![0.0, 1.25, 2.5, 4.0, 7.5];
        let names = names(points.len());
        let d = |i: usize, j: usize| (points[i] - points[j]).abs();
        let report = check_axioms(&names, d, 0.0);
        assert!(report.identity_ok && report.symmetry_ok && report.nonneg_ok);
        let triples = exhaustive_triples(points.len());
        let estimate = relaxation_modulus(&names, d, &triples).unwrap();
        assert!(estimate.theta_hat <= 1.0 + 1e-12);
        let triangle = verify_relaxed_triangle(&names, d, &triples, |_, _| 1.0);
        assert!(triangle.violations.is_empty());
    }

    #[test]
    fn antisymmetric_function_fails_symmetry() {
        let values: Vec<f64> = vec![1.0, 0.0];
        let names = names(2);
        let d = |i: usize, j: usize| values[i] - values[j];
        let report = check_axioms(&names, d, 1e-12);
        assert!(!report.symmetry_ok);
        assert_eq!(report.symmetry_failures.len(), 1);
        assert!(!report.nonneg_ok);
    }

    #[test]
    fn squared_difference_ratio_is_two_on_arithmetic_triple() {
        let points: Vec<f64> = vec![0.0, 1.0, 2.0];
        let names = names(3);
        let d = |i: usize, j: usize| (points[i] - points[j]).powi(2);
        let estimate = relaxation_modulus(&names, d, &[(0, 1, 2)]).unwrap();
        assert!((estimate.theta_hat - 2.0).abs() < 1e-12);
        assert_eq!(estimate.sample_count, 1);

        let strict = verify_relaxed_triangle(&names, d, &[(0, 1, 2)], |_, _| 1.0);
        assert_eq!(strict.violations.len(), 1);
        let witness = &strict.violations[0];
        assert_eq!(witness.lhs, 4.0);
        assert_eq!(witness.rhs, 2.0);
        assert_eq!(witness.ratio, Some(2.0));
    }

    #[test]
    fn scalar_sum_relaxation_holds_on_grid() {
        let grid: Vec<f64> = (0..21).map(|i| i as f64 * 0.5).collect();
        let names = names(grid.len());
        let d = |i: usize, j: usize| (grid[i] - grid[j]).powi(2);
        let triples = exhaustive_triples(grid.len());
        let report =
            verify_relaxed_triangle(&names, d, &triples, |i, k| grid[i] + grid[k] + 2.0);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn power_of_metric_respects_two_pow_p_minus_one() {
        let points: Vec<f64> = vec![0.0, 0.7, 1.1, 2.9, 4.2, 6.0];
        let names = names(points.len());
        let triples = exhaustive_triples(points.len());
        for p in [2i32, 3] {
            let d = |i: usize, j: usize| (points[i] - points[j]).abs().powi(p);
            let bound = 2f64.powi(p - 1);
            let report = verify_relaxed_triangle(&names, d, &triples, |_, _| bound);
            assert!(report.violations.is_empty(), "p={p}");
        }
    }

    proptest::proptest! {
        /// A true metric never yields a ratio above 1.
        #[test]
        fn euclidean_theta_hat_at_most_one(
            points in proptest::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 3..10)
        ) {
            let names = names(points.len());
            let d = |i: usize, j: usize| {
                let (xa, ya) = points[i];
                let (xb, yb) = points[j];
                ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
            };
            let triples = exhaustive_triples(points.len());
            if let Ok(estimate) = relaxation_modulus(&names, d, &triples) {
                proptest::prop_assert!(estimate.theta_hat <= 1.0 + 1e-12);
            }
        }
    }

    /// Checking against the estimated modulus itself can never report a
    /// violation: theta_hat is the max observed ratio.
    #[test]
    fn theta_hat_is_self_consistent() {
        let shapes = [
            (ShapeKind::Circle { radius: 1.0 }, 0u64),
            (ShapeKind::Ellipse { a: 1.6, b: 1.0 }, 1),
            (
                ShapeKind::Perturbed {
                    base: Box::new(ShapeKind::Circle { radius: 1.2 }),
                    noise: 0.1,
                },
                2,
            ),
            (
                ShapeKind::RegularPolygon {
                    circumradius: 1.0,
                    sides: 5,
                },
                3,
            ),
        ];
        let sequences: Vec<FeatureSequence<f64>> = shapes
            .iter()
            .map(|(kind, seed)| {
                let c = generate_shape::<f64>(
                    &ShapeSpec::new(kind.clone(), 24).with_seed(*seed),
                )
                .unwrap();
                FeatureSequence::from_contour(&c).unwrap()
            })
            .collect();
        let cm = CostModel::nem_r(0.25).unwrap();
        let matrix = pairwise_matrix(4, |i, j| {
            Ok(nem_sigma(&sequences[i], &sequences[j], &cm)?.total)
        })
        .unwrap();
        let names = names(4);
        let d = |i: usize, j: usize| matrix[i][j];
        let triples = exhaustive_triples(4);
        let estimate = relaxation_modulus(&names, d, &triples).unwrap();
        let report = verify_relaxed_triangle(&names, d, &triples, |_, _| {
            estimate.theta_hat + 1e-9
        });
        assert!(report.violations.is_empty());
    }

    #[test]
    fn angular_difference_passes_all_axioms_on_a_grid() {
        use crate::contour::angular_difference;
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.157).collect();
        let names = names(grid.len());
        let d = |i: usize, j: usize| angular_difference(grid[i], grid[j]);
        let report = check_axioms(&names, d, 0.0);
        assert!(report.identity_ok && report.symmetry_ok && report.nonneg_ok);
        let triples = sample_triples(grid.len(), 2000, 3);
        let triangle = verify_relaxed_triangle(&names, d, &triples, |_, _| 1.0);
        assert!(triangle.violations.is_empty());
    }

    #[test]
    fn large_r_bound_approaches_one_and_still_holds() {
        let shapes: Vec<Contour<f64>> = (0..6)
            .map(|i| {
                generate_shape(
                    &ShapeSpec::new(
                        ShapeKind::Perturbed {
                            base: Box::new(ShapeKind::Ellipse {
                                a: 1.0 + 0.3 * i as f64,
                                b: 1.0,
                            }),
                            noise: 0.04,
                        },
                        48,
                    )
                    .with_seed(700 + i),
                )
                .unwrap()
                .renamed(format!("s{i}"))
            })
            .collect();
        let report = audit_nem_r_bound(&shapes, 100.0, 24, 100, 4).unwrap();
        let bound = report.bound.unwrap();
        assert!((bound - (1.0 + std::f64::consts::PI / 200.0)).abs() < 1e-12);
        assert!(report.violations.is_empty());
        assert!(report.max_ratio.unwrap() <= bound);
    }

    #[test]
    fn all_degenerate_denominators_is_an_error() {
        let names = names(2);
        let d = |_: usize, _: usize| 0.0;
        let triples = exhaustive_triples(2);
        assert!(matches!(
            relaxation_modulus(&names, d, &triples),
            Err(AuditError::AllDenominatorsBelowFloor { .. })
        ));
    }

    #[test]
    fn theta_hat_at_least_one_on_exhaustive_triples() {
        // with y = x the denominator collapses onto d(x,z), forcing ratio 1
        let points: Vec<f64> = vec![0.0, 3.0, 5.0];
        let names = names(3);
        let d = |i: usize, j: usize| (points[i] - points[j]).abs().sqrt();
        let triples = exhaustive_triples(3);
        let estimate = relaxation_modulus(&names, d, &triples).unwrap();
        assert!(estimate.theta_hat >= 0.5);
        assert!(estimate.theta_hat >= 1.0 - 1e-12);
    }

    /// NEM itself is not a metric: with X = (0), Y = (0, pi/2), and
    /// Z = (0, pi/2, pi/2, pi/2), forced single-row mappings give
    /// d(X,Z) = 3 + 3pi/2 while d(X,Y) + d(Y,Z) = (1 + pi/2) + 2, a ratio
    /// of about 1.69. The audit must see it, and the r = 1 varying-count
    /// bound 1 + pi must still cover it.
    #[test]
    fn nem_triangle_violation_is_detected() {
        use crate::contour::TangentProfile;
        use crate::elastic::nem;
        use std::f64::consts::PI;
        let make = |angles: Vec<f64>| {
            FeatureSequence::from_angles("s", TangentProfile::new(angles).unwrap(), true)
        };
        let seqs = [
            make(vec![0.0]),
            make(vec![0.0, PI / 2.0]),
            make(vec![0.0, PI / 2.0, PI / 2.0, PI / 2.0]),
        ];
        let names = names(3);
        let mut grid = vec![vec![0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                grid[i][j] = nem(&seqs[i], &seqs[j]).unwrap().total;
            }
        }
        assert!((grid[0][2] - (3.0 + 1.5 * PI)).abs() < 1e-12);
        assert!((grid[0][1] - (1.0 + PI / 2.0)).abs() < 1e-12);
        assert!((grid[1][2] - 2.0).abs() < 1e-12);

        let d = |i: usize, j: usize| grid[i][j];
        let strict = verify_relaxed_triangle(&names, d, &[(0, 1, 2)], |_, _| 1.0);
        assert_eq!(strict.violations.len(), 1);
        let estimate = relaxation_modulus(&names, d, &[(0, 1, 2)]).unwrap();
        assert!((estimate.theta_hat - (3.0 + 1.5 * PI) / (3.0 + PI / 2.0)).abs() < 1e-12);
        assert!(estimate.theta_hat > 1.0);

        let bound = theoretical_bound_nem_r(1.0, false).unwrap();
        let relaxed = verify_relaxed_triangle(&names, d, &[(0, 1, 2)], |_, _| bound);
        assert!(relaxed.violations.is_empty());
    }

    #[test]
    fn theoretical_bounds_match_formula() {
        use std::f64::consts::PI;
        assert!((theoretical_bound_nem_r(PI, true).unwrap() - 1.5).abs() < 1e-12);
        assert!((theoretical_bound_nem_r(PI / 2.0, true).unwrap() - 2.0).abs() < 1e-12);
        assert!((theoretical_bound_nem_r(PI, false).unwrap() - 2.0).abs() < 1e-12);
        assert!(theoretical_bound_nem_r(0.0, true).is_err());
    }

    #[test]
    fn theta_surrogate_examples() {
        use crate::contour::TangentProfile;
        use crate::cost::{GroundCost, Modulus, StretchFn};
        let make = |v: Vec<f64>| {
            FeatureSequence::from_angles(
                "s",
                TangentProfile::new(vec![0.0; v.len()]).unwrap(),
                true,
            )
            .with_feature("velocity", v)
            .unwrap()
        };
        let x = make(vec![0.0, 0.5, 1.0]);
        let z = make(vec![0.25, 1.0]);

        let constant = CostModel::nem();
        assert_eq!(theta_surrogate_nem_sigma(&x, &z, &constant).unwrap(), 2.0);

        let scalar_sum = CostModel::new(
            GroundCost::AngularAbs,
            Modulus::ScalarSum { feature: None },
            StretchFn::Constant(1.0),
        )
        .unwrap();
        // max over pairs of (v_x + v_z + 2) = 1 + 1 + 2 = 4, so theta = 5
        assert_eq!(theta_surrogate_nem_sigma(&x, &z, &scalar_sum).unwrap(), 5.0);
    }

    #[test]
    fn nem_r_bound_harness_is_deterministic_and_within_bound() {
        let shapes: Vec<Contour<f64>> = (0..6)
            .map(|i| {
                generate_shape(
                    &ShapeSpec::new(
                        ShapeKind::Perturbed {
                            base: Box::new(ShapeKind::Ellipse {
                                a: 1.0 + 0.2 * i as f64,
                                b: 1.0,
                            }),
                            noise: 0.05,
                        },
                        48,
                    )
                    .with_seed(100 + i),
                )
                .unwrap()
                .renamed(format!("shape{i}"))
            })
            .collect();
        let a = audit_nem_r_bound(&shapes, std::f64::consts::FRAC_PI_2, 24, 100, 9).unwrap();
        let b = audit_nem_r_bound(&shapes, std::f64::consts::FRAC_PI_2, 24, 100, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "violations: {:?}", a.violations);
        assert!(a.max_ratio.unwrap() <= a.bound.unwrap());
    }

    #[test]
    fn single_shape_audit_reports_undefined_estimate() {
        let c = generate_shape::<f64>(&ShapeSpec::new(ShapeKind::Circle { radius: 1.0 }, 16))
            .unwrap();
        let report = audit_nem_r_bound(&[c], 1.0, 16, 10, 1).unwrap();
        // only degenerate triples exist, so no ratio is defined
        assert!(report.max_ratio.is_none());
        assert!(report.violations.is_empty());
    }
}
