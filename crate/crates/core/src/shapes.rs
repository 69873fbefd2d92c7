//! Parametric closed-shape generators: corpus sources and experiment
//! fixtures. All randomness flows through one seeded generator, so a spec
//! always produces the same contour.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contour::{Contour, ContourError, Point2};
use crate::scalar::{real, Real};

/// Default seed used by generators and the CLI when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Shape family plus its geometric parameters (always expressed in `f64`;
/// generation converts into the target scalar type).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeKind {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    RegularPolygon {
        circumradius: f64,
        sides: usize,
    },
    Superellipse {
        a: f64,
        b: f64,
        exponent: f64,
    },
    /// Radial noise applied to a base shape: each point is scaled by
    /// `1 + noise * u` with `u` drawn uniformly from `[-1, 1)`.
    Perturbed {
        base: Box<ShapeKind>,
        noise: f64,
    },
}

impl ShapeKind {
    fn slug(&self) -> String {
        match self {
            ShapeKind::Circle { .. } => "circle".into(),
            ShapeKind::Ellipse { .. } => "ellipse".into(),
            ShapeKind::RegularPolygon { .. } => "regular-polygon".into(),
            ShapeKind::Superellipse { .. } => "superellipse".into(),
            ShapeKind::Perturbed { base, .. } => format!("perturbed-{}", base.slug()),
        }
    }
}

/// A complete shape descriptor: family, sample count, and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    #[serde(flatten)]
    pub kind: ShapeKind,
    pub point_count: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind, point_count: usize) -> Self {
        Self {
            kind,
            point_count,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn ensure_positive(value: f64, what: &str) -> Result<(), ContourError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(ContourError::InvalidParameter(format!(
            "{what} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Generates a closed contour sampled counterclockwise from a shape spec.
/// Deterministic given the spec (including its seed).
pub fn generate_shape<T: Real>(spec: &ShapeSpec) -> Result<Contour<T>, ContourError> {
    if spec.point_count < 3 {
        return Err(ContourError::InvalidParameter(format!(
            "point_count must be at least 3, got {}",
            spec.point_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = generate_points(&spec.kind, spec.point_count, &mut rng)?;
    Contour::new(spec.kind.slug(), points, true)
}

fn generate_points<T: Real>(
    kind: &ShapeKind,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point2<T>>, ContourError> {
    let angle = |i: usize| real::<T>(std::f64::consts::TAU * i as f64 / n as f64);
    match kind {
        ShapeKind::Circle { radius } => {
            ensure_positive(*radius, "radius")?;
            let r = real::<T>(*radius);
            Ok((0..n)
                .map(|i| {
                    let t = angle(i);
                    Point2::new(r * t.cos(), r * t.sin())
                })
                .collect())
        }
        ShapeKind::Ellipse { a, b } => {
            ensure_positive(*a, "semi-axis a")?;
            ensure_positive(*b, "semi-axis b")?;
            let (a, b) = (real::<T>(*a), real::<T>(*b));
            Ok((0..n)
                .map(|i| {
                    let t = angle(i);
                    Point2::new(a * t.cos(), b * t.sin())
                })
                .collect())
        }
        ShapeKind::RegularPolygon {
            circumradius,
            sides,
        } => {
            ensure_positive(*circumradius, "circumradius")?;
            if *sides < 3 {
                return Err(ContourError::InvalidParameter(format!(
                    "regular polygon needs at least 3 sides, got {sides}"
                )));
            }
            let r = real::<T>(*circumradius);
            let corners: Vec<Point2<T>> = (0..*sides)
                .map(|j| {
                    let t = real::<T>(std::f64::consts::TAU * j as f64 / *sides as f64);
                    Point2::new(r * t.cos(), r * t.sin())
                })
                .collect();
            if n == *sides {
                return Ok(corners);
            }
            let poly = Contour::new("poly", corners, true)?;
            Ok(crate::contour::resample_uniform(&poly, n)?
                .points()
                .to_vec())
        }
        ShapeKind::Superellipse { a, b, exponent } => {
            ensure_positive(*a, "semi-axis a")?;
            ensure_positive(*b, "semi-axis b")?;
            ensure_positive(*exponent, "exponent")?;
            let (a, b) = (real::<T>(*a), real::<T>(*b));
            let power = real::<T>(2.0 / *exponent);
            let shaped = |v: T| -> T { v.abs().powf(power) * v.signum() };
            Ok((0..n)
                .map(|i| {
                    let t = angle(i);
                    Point2::new(a * shaped(t.cos()), b * shaped(t.sin()))
                })
                .collect())
        }
        ShapeKind::Perturbed { base, noise } => {
            if !(noise.is_finite() && (0.0..1.0).contains(noise)) {
                return Err(ContourError::InvalidParameter(format!(
                    "noise must lie in [0, 1), got {noise}"
                )));
            }
            let base_points = generate_points::<T>(base, n, rng)?;
            Ok(base_points
                .into_iter()
                .map(|p| {
                    let factor = real::<T>(1.0 + noise * rng.random_range(-1.0..1.0));
                    Point2::new(p.x * factor, p.y * factor)
                })
                .collect())
        }
    }
}
