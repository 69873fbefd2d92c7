//! Ordered contour-point sequences and their derived tangent-angle profiles.
//!
//! A [`Contour`] is a polygonal boundary: an ordered list of points, open or
//! closed, with optional named scalar attributes (per-contour or per-point).
//! [`FeatureSequence`] is the preprocessed form consumed by the elastic
//! matchers: tangent angles plus per-point feature values.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{real, Real};

#[derive(Debug, Error)]
pub enum ContourError {
    #[error("contour `{name}` needs at least {min} points, got {got}")]
    TooFewPoints { name: String, min: usize, got: usize },
    #[error("contour `{name}` repeats the point at index {index}")]
    DuplicatePoint { name: String, index: usize },
    #[error("contour `{name}` has a non-finite coordinate at index {index}")]
    NonFinitePoint { name: String, index: usize },
    #[error("attribute `{attr}` on `{name}` has {got} values, expected {expected}")]
    AttrLengthMismatch {
        name: String,
        attr: String,
        got: usize,
        expected: usize,
    },
    #[error("`{name}` is open; this operation requires a closed contour")]
    OpenContour { name: String },
    #[error("rotation index {k} out of range for {len} points")]
    RotationOutOfRange { k: usize, len: usize },
    #[error("angle {value} at index {index} outside [0, 2pi)")]
    AngleOutOfRange { index: usize, value: f64 },
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed contour document: {0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A named attribute attached to a contour: one scalar for the whole contour
/// or one value per point.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue<T> {
    Scalar(T),
    PerPoint(Vec<T>),
}

/// An ordered polygonal boundary.
///
/// Invariants, enforced at construction: no two consecutive points are
/// identical (including the wrap pair when closed), closed contours have at
/// least three points and do not repeat the first point at the end, all
/// coordinates are finite, and per-point attributes match the point count.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour<T> {
    name: String,
    points: Vec<Point2<T>>,
    closed: bool,
    attrs: BTreeMap<String, AttrValue<T>>,
}

impl<T: Real> Contour<T> {
    pub fn new(
        name: impl Into<String>,
        points: Vec<Point2<T>>,
        closed: bool,
    ) -> Result<Self, ContourError> {
        Self::with_attrs(name, points, closed, BTreeMap::new())
    }

    pub fn with_attrs(
        name: impl Into<String>,
        points: Vec<Point2<T>>,
        closed: bool,
        attrs: BTreeMap<String, AttrValue<T>>,
    ) -> Result<Self, ContourError> {
        let c = Self {
            name: name.into(),
            points,
            closed,
            attrs,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ContourError> {
        let n = self.points.len();
        let min = if self.closed { 3 } else { 2 };
        if n < min {
            return Err(ContourError::TooFewPoints {
                name: self.name.clone(),
                min,
                got: n,
            });
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(ContourError::NonFinitePoint {
                    name: self.name.clone(),
                    index: i,
                });
            }
        }
        let pairs = if self.closed { n } else { n - 1 };
        for i in 0..pairs {
            let j = (i + 1) % n;
            if self.points[i] == self.points[j] {
                return Err(ContourError::DuplicatePoint {
                    name: self.name.clone(),
                    index: j,
                });
            }
        }
        for (attr, value) in &self.attrs {
            if let AttrValue::PerPoint(values) = value {
                if values.len() != n {
                    return Err(ContourError::AttrLengthMismatch {
                        name: self.name.clone(),
                        attr: attr.clone(),
                        got: values.len(),
                        expected: n,
                    });
                }
            }
        }
        Ok(())
    }

    /// Returns a copy with one extra attribute attached.
    pub fn with_attr(
        mut self,
        name: impl Into<String>,
        value: AttrValue<T>,
    ) -> Result<Self, ContourError> {
        self.attrs.insert(name.into(), value);
        self.validate()?;
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn attrs(&self) -> &BTreeMap<String, AttrValue<T>> {
        &self.attrs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polygonal boundary length; includes the closing segment when closed.
    pub fn perimeter(&self) -> T {
        let n = self.points.len();
        let segs = if self.closed { n } else { n - 1 };
        let mut total = T::zero();
        for i in 0..segs {
            total += self.points[i].distance(self.points[(i + 1) % n]);
        }
        total
    }

    pub fn translated(&self, dx: T, dy: T) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| Point2::new(p.x + dx, p.y + dy))
            .collect();
        Self {
            name: self.name.clone(),
            points,
            closed: self.closed,
            attrs: self.attrs.clone(),
        }
    }
}

/// Tangent angles of a contour, one per point, each in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentProfile<T> {
    angles: Vec<T>,
}

impl<T: Real> TangentProfile<T> {
    pub fn new(angles: Vec<T>) -> Result<Self, ContourError> {
        for (i, &a) in angles.iter().enumerate() {
            if !(a.is_finite() && a >= T::zero() && a < T::tau()) {
                return Err(ContourError::AngleOutOfRange {
                    index: i,
                    value: a.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Tangent angles plus aligned per-point features: the input the elastic
/// matchers actually consume.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence<T> {
    angles: TangentProfile<T>,
    features: BTreeMap<String, Vec<T>>,
    source: String,
    closed: bool,
}

impl<T: Real> FeatureSequence<T> {
    /// Preprocesses a contour: tangent profile plus all attributes as
    /// per-point features (per-contour scalars broadcast to every point).
    pub fn from_contour(c: &Contour<T>) -> Result<Self, ContourError> {
        let angles = tangent_profile(c)?;
        let n = angles.len();
        let mut features = BTreeMap::new();
        for (name, value) in c.attrs() {
            let values = match value {
                AttrValue::Scalar(v) => vec![*v; n],
                AttrValue::PerPoint(vs) => vs.clone(),
            };
            features.insert(name.clone(), values);
        }
        Ok(Self {
            angles,
            features,
            source: c.name().to_string(),
            closed: c.closed(),
        })
    }

    pub fn from_angles(
        source: impl Into<String>,
        angles: TangentProfile<T>,
        closed: bool,
    ) -> Self {
        Self {
            angles,
            features: BTreeMap::new(),
            source: source.into(),
            closed,
        }
    }

    pub fn with_feature(
        mut self,
        name: impl Into<String>,
        values: Vec<T>,
    ) -> Result<Self, ContourError> {
        let name = name.into();
        if values.len() != self.len() {
            return Err(ContourError::AttrLengthMismatch {
                name: self.source.clone(),
                attr: name,
                got: values.len(),
                expected: self.len(),
            });
        }
        self.features.insert(name, values);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[T] {
        self.angles.angles()
    }

    pub fn feature(&self, name: &str) -> Option<&[T]> {
        self.features.get(name).map(|v| v.as_slice())
    }

    pub fn features(&self) -> &BTreeMap<String, Vec<T>> {
        &self.features
    }

    /// The single feature list, when exactly one is attached.
    pub fn sole_feature(&self) -> Option<(&str, &[T])> {
        if self.features.len() == 1 {
            let (name, values) = self.features.iter().next().unwrap();
            Some((name.as_str(), values.as_slice()))
        } else {
            None
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Cyclic rotation of the element order by `k`; closed sequences only.
    pub fn rotated(&self, k: usize) -> Result<Self, ContourError> {
        if !self.closed {
            return Err(ContourError::OpenContour {
                name: self.source.clone(),
            });
        }
        let n = self.len();
        if k >= n {
            return Err(ContourError::RotationOutOfRange { k, len: n });
        }
        let rot = |v: &[T]| -> Vec<T> {
            let mut out = Vec::with_capacity(v.len());
            out.extend_from_slice(&v[k..]);
            out.extend_from_slice(&v[..k]);
            out
        };
        Ok(Self {
            angles: TangentProfile {
                angles: rot(self.angles.angles()),
            },
            features: self
                .features
                .iter()
                .map(|(name, v)| (name.clone(), rot(v)))
                .collect(),
            source: self.source.clone(),
            closed: true,
        })
    }
}

fn normalize_angle<T: Real>(a: T) -> T {
    let tau = T::tau();
    let mut a = a % tau;
    if a < T::zero() {
        a += tau;
    }
    if a >= tau {
        a = T::zero();
    }
    a
}

/// Tangent angle at every point, from central differences.
///
/// Closed contours wrap the indices; open contours use one-sided differences
/// at the two endpoints. Angles are normalized to `[0, 2pi)`.
pub fn tangent_profile<T: Real>(c: &Contour<T>) -> Result<TangentProfile<T>, ContourError> {
    let pts = c.points();
    let n = pts.len();
    if n < 3 {
        return Err(ContourError::TooFewPoints {
            name: c.name().to_string(),
            min: 3,
            got: n,
        });
    }
    let mut angles = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = if c.closed() {
            (pts[(i + n - 1) % n], pts[(i + 1) % n])
        } else if i == 0 {
            (pts[0], pts[1])
        } else if i == n - 1 {
            (pts[n - 2], pts[n - 1])
        } else {
            (pts[i - 1], pts[i + 1])
        };
        let angle = (b.y - a.y).atan2(b.x - a.x);
        angles.push(normalize_angle(angle));
    }
    Ok(TangentProfile { angles })
}

/// Geodesic distance between two angles on the circle, in `[0, pi]`:
/// `min(|phi1 - phi2| mod 2pi, 2pi - |phi1 - phi2| mod 2pi)`.
///
/// Total on finite inputs; arguments need not lie in `[0, 2pi)`. Exactly
/// symmetric, since the absolute difference is taken before reduction.
pub fn angular_difference<T: Real>(phi1: T, phi2: T) -> T {
    let tau = T::tau();
    let d = (phi1 - phi2).abs() % tau;
    d.min(tau - d)
}

/// Resamples a closed contour to `n` points equally spaced in arc length
/// along the source boundary, starting at the original first point.
///
/// Per-point attributes are linearly interpolated at the sample positions;
/// per-contour scalars carry over unchanged.
pub fn resample_uniform<T: Real>(c: &Contour<T>, n: usize) -> Result<Contour<T>, ContourError> {
    if !c.closed() {
        return Err(ContourError::OpenContour {
            name: c.name().to_string(),
        });
    }
    if n < 3 {
        return Err(ContourError::TooFewPoints {
            name: c.name().to_string(),
            min: 3,
            got: n,
        });
    }
    let pts = c.points();
    let m = pts.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(T::zero());
    let mut total = T::zero();
    for i in 0..m {
        total += pts[i].distance(pts[(i + 1) % m]);
        cum.push(total);
    }

    let per_point: Vec<(&String, &Vec<T>)> = c
        .attrs()
        .iter()
        .filter_map(|(k, v)| match v {
            AttrValue::PerPoint(vs) => Some((k, vs)),
            AttrValue::Scalar(_) => None,
        })
        .collect();

    let mut points = Vec::with_capacity(n);
    let mut attr_out: Vec<Vec<T>> = vec![Vec::with_capacity(n); per_point.len()];
    let mut seg = 0usize;
    for k in 0..n {
        let target = total * real::<T>(k as f64) / real::<T>(n as f64);
        while seg + 1 < m && cum[seg + 1] <= target {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let frac = (target - cum[seg]) / seg_len;
        let a = pts[seg];
        let b = pts[(seg + 1) % m];
        points.push(Point2::new(
            a.x + (b.x - a.x) * frac,
            a.y + (b.y - a.y) * frac,
        ));
        for (slot, (_, vs)) in attr_out.iter_mut().zip(&per_point) {
            let va = vs[seg];
            let vb = vs[(seg + 1) % m];
            slot.push(va + (vb - va) * frac);
        }
    }

    let mut attrs: BTreeMap<String, AttrValue<T>> = c
        .attrs()
        .iter()
        .filter_map(|(k, v)| match v {
            AttrValue::Scalar(s) => Some((k.clone(), AttrValue::Scalar(*s))),
            AttrValue::PerPoint(_) => None,
        })
        .collect();
    for ((name, _), values) in per_point.iter().zip(attr_out) {
        attrs.insert((*name).clone(), AttrValue::PerPoint(values));
    }
    Contour::with_attrs(c.name(), points, true, attrs)
}

/// Cyclic rotation of the point order of a closed contour: point `k` becomes
/// the new start. Per-point attributes rotate with the points.
pub fn rotate_start<T: Real>(c: &Contour<T>, k: usize) -> Result<Contour<T>, ContourError> {
    if !c.closed() {
        return Err(ContourError::OpenContour {
            name: c.name().to_string(),
        });
    }
    let n = c.len();
    if k >= n {
        return Err(ContourError::RotationOutOfRange { k, len: n });
    }
    let mut points = Vec::with_capacity(n);
    points.extend_from_slice(&c.points()[k..]);
    points.extend_from_slice(&c.points()[..k]);
    let attrs = c
        .attrs()
        .iter()
        .map(|(name, v)| {
            let v = match v {
                AttrValue::Scalar(s) => AttrValue::Scalar(*s),
                AttrValue::PerPoint(vs) => {
                    let mut out = Vec::with_capacity(n);
                    out.extend_from_slice(&vs[k..]);
                    out.extend_from_slice(&vs[..k]);
                    AttrValue::PerPoint(out)
                }
            };
            (name.clone(), v)
        })
        .collect();
    Contour::with_attrs(c.name(), points, true, attrs)
}

#[derive(Serialize, Deserialize)]
struct ContourDoc {
    name: String,
    closed: bool,
    points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    attrs: BTreeMap<String, AttrDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AttrDoc {
    Scalar(f64),
    PerPoint(Vec<f64>),
}

/// Serializes a contour to its JSON document form.
pub fn contour_to_json<T: Real>(c: &Contour<T>) -> String {
    let doc = ContourDoc {
        name: c.name().to_string(),
        closed: c.closed(),
        points: c
            .points()
            .iter()
            .map(|p| [p.x.to_f64().unwrap(), p.y.to_f64().unwrap()])
            .collect(),
        attrs: c
            .attrs()
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    AttrValue::Scalar(s) => AttrDoc::Scalar(s.to_f64().unwrap()),
                    AttrValue::PerPoint(vs) => {
                        AttrDoc::PerPoint(vs.iter().map(|x| x.to_f64().unwrap()).collect())
                    }
                };
                (k.clone(), v)
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("contour document serializes");
    s.push('\n');
    s
}

/// Parses and validates a contour from its JSON document form.
pub fn contour_from_json<T: Real>(json: &str) -> Result<Contour<T>, ContourError> {
    let doc: ContourDoc =
        serde_json::from_str(json).map_err(|e| ContourError::Document(e.to_string()))?;
    let points = doc
        .points
        .iter()
        .map(|&[x, y]| Point2::new(real::<T>(x), real::<T>(y)))
        .collect();
    let attrs = doc
        .attrs
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                AttrDoc::Scalar(s) => AttrValue::Scalar(real::<T>(s)),
                AttrDoc::PerPoint(vs) => {
                    AttrValue::PerPoint(vs.into_iter().map(real::<T>).collect())
                }
            };
            (k, v)
        })
        .collect();
    Contour::with_attrs(doc.name, points, doc.closed, attrs)
}

pub fn save_contour<T: Real>(path: impl AsRef<Path>, c: &Contour<T>) -> Result<(), ContourError> {
    fs::write(path, contour_to_json(c))?;
    Ok(())
}

pub fn load_contour<T: Real>(path: impl AsRef<Path>) -> Result<Contour<T>, ContourError> {
    let json = fs::read_to_string(path)?;
    contour_from_json(&json)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{generate_shape, ShapeKind, ShapeSpec};
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn circle(radius: f64, n: usize) -> Contour<f64> {
        generate_shape(&ShapeSpec::new(ShapeKind::Circle { radius }, n)).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn contour_rejects_consecutive_duplicates() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(matches!(
            Contour::new("dup", pts, true),
            Err(ContourError::DuplicatePoint { index: 1, .. })
        ));
    }

    #[test]
    fn contour_rejects_closed_wrap_duplicate() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.0, 0.0),
        ];
        assert!(matches!(
            Contour::new("wrap", pts, true),
            Err(ContourError::DuplicatePoint { .. })
        ));
    }

    #[test]
    fn contour_rejects_bad_attr_length() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
        ];
        let c = Contour::new("a", pts, true).unwrap();
        let err = c.with_attr("velocity", AttrValue::PerPoint(vec![1.0, 2.0]));
        assert!(matches!(err, Err(ContourError::AttrLengthMismatch { .. })));
    }

    #[test]
    fn tangent_of_four_point_circle() {
        let c = circle(1.0, 4);
        let prof = tangent_profile(&c).unwrap();
        assert_close(prof.angles()[0], PI / 2.0, 1e-12);
    }

    #[test]
    fn tangent_steps_follow_rotational_symmetry() {
        for n in [5usize, 16, 37] {
            let c = circle(1.0, n);
            let prof = tangent_profile(&c).unwrap();
            let step = TAU / n as f64;
            for i in 0..n {
                let d = angular_difference(prof.angles()[(i + 1) % n], prof.angles()[i]);
                assert_close(d, step, 1e-9);
            }
        }
    }

    #[test]
    fn tangent_of_diamond_square() {
        // Square of side 2 rotated 45 degrees, corners on the axes.
        let r = 2.0f64.sqrt();
        let pts = vec![
            Point2::new(r, 0.0),
            Point2::new(0.0, r),
            Point2::new(-r, 0.0),
            Point2::new(0.0, -r),
        ];
        let c = Contour::new("square", pts, true).unwrap();
        let prof = tangent_profile(&c).unwrap();
        let expected = [PI / 2.0, PI, 3.0 * PI / 2.0, 0.0];
        for (a, e) in prof.angles().iter().zip(expected) {
            assert_close(*a, e, 1e-12);
        }
    }

    #[test]
    fn tangent_requires_three_points() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        let c = Contour::new("seg", pts, false).unwrap();
        assert!(matches!(
            tangent_profile(&c),
            Err(ContourError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn open_contour_uses_one_sided_differences() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 1.0),
        ];
        let c = Contour::new("open", pts, false).unwrap();
        let prof = tangent_profile(&c).unwrap();
        assert_close(prof.angles()[0], 0.0, 1e-12);
        assert_close(prof.angles()[2], PI / 4.0, 1e-12);
    }

    #[test]
    fn angular_difference_examples() {
        assert_close(angular_difference(0.0, 3.0 * PI / 2.0), PI / 2.0, 1e-12);
        assert_close(angular_difference(1.234, 1.234), 0.0, 0.0);
        assert_close(angular_difference(0.1, TAU - 0.1), 0.2, 1e-12);
    }

    #[test]
    fn angular_difference_symmetric_and_bounded_on_grid() {
        let grid: Vec<f64> = (0..629).map(|i| i as f64 * 0.01).collect();
        for &a in &grid {
            for &b in &grid {
                let d = angular_difference(a, b);
                assert!((0.0..=PI + 1e-12).contains(&d));
                assert_eq!(d, angular_difference(b, a));
            }
        }
    }

    #[test]
    fn angular_difference_triangle_inequality_on_grid() {
        let grid: Vec<f64> = (0..126).map(|i| i as f64 * 0.05).collect();
        for &a in &grid {
            for &b in &grid {
                let dab = angular_difference(a, b);
                for &c in &grid {
                    let dac = angular_difference(a, c);
                    let dcb = angular_difference(c, b);
                    assert!(dab <= dac + dcb + 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn angular_difference_triangle_random(
            a in -10.0..10.0f64,
            b in -10.0..10.0f64,
            c in -10.0..10.0f64,
        ) {
            let dab = angular_difference(a, b);
            prop_assert!(dab <= angular_difference(a, c) + angular_difference(c, b) + 1e-12);
            prop_assert!((0.0..=PI + 1e-12).contains(&dab));
        }

        #[test]
        fn tangent_profile_in_range(n in 3usize..40, radius in 0.1..10.0f64) {
            let c = circle(radius, n);
            let prof = tangent_profile(&c).unwrap();
            prop_assert_eq!(prof.len(), n);
            for &a in prof.angles() {
                prop_assert!((0.0..TAU).contains(&a));
            }
        }
    }

    #[test]
    fn resample_circle_keeps_unit_radius() {
        let c = circle(1.0, 64);
        let r = resample_uniform(&c, 32).unwrap();
        assert_eq!(r.len(), 32);
        for p in r.points() {
            assert_close((p.x * p.x + p.y * p.y).sqrt(), 1.0, 1e-6);
        }
    }

    #[test]
    fn resample_is_identity_on_uniform_input() {
        let c = circle(2.0, 48);
        let r = resample_uniform(&c, 48).unwrap();
        for (a, b) in c.points().iter().zip(r.points()) {
            assert_close(a.x, b.x, 1e-9);
            assert_close(a.y, b.y, 1e-9);
        }
    }

    #[test]
    fn resample_rectangle_has_unit_gaps() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        let c = Contour::new("rect", pts, true).unwrap();
        let r = resample_uniform(&c, 12).unwrap();
        for i in 0..12 {
            let gap = r.points()[i].distance(r.points()[(i + 1) % 12]);
            assert_close(gap, 1.0, 1e-9);
        }
    }

    /// Arc position of `p` along `c`'s boundary, found by locating the
    /// segment `p` lies on. Independent of the resampling walk.
    fn arc_position(c: &Contour<f64>, p: Point2<f64>) -> f64 {
        let pts = c.points();
        let m = pts.len();
        let mut cum = 0.0;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..m {
            let a = pts[i];
            let b = pts[(i + 1) % m];
            let len = a.distance(b);
            let t = (((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len))
                .clamp(0.0, 1.0);
            let proj = Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
            let d = p.distance(proj);
            if d < best.0 {
                best = (d, cum + t * len);
            }
            cum += len;
        }
        assert!(best.0 < 1e-9, "point not on boundary (off by {})", best.0);
        best.1
    }

    #[test]
    fn resample_gap_spread_is_tiny() {
        for (spec, n) in [
            (ShapeSpec::new(ShapeKind::Ellipse { a: 2.0, b: 1.0 }, 53), 31usize),
            (ShapeSpec::new(ShapeKind::Circle { radius: 1.5 }, 40), 17),
        ] {
            let c: Contour<f64> = generate_shape(&spec).unwrap();
            let total = c.perimeter();
            let r = resample_uniform(&c, n).unwrap();
            let mut positions: Vec<f64> =
                r.points().iter().map(|&p| arc_position(&c, p)).collect();
            positions.push(total);
            let gaps: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
            let expected = total / n as f64;
            for g in &gaps {
                assert!((g - expected).abs() / expected < 1e-6, "gap {g} vs {expected}");
            }
            let covered: f64 = gaps.iter().sum();
            assert!((covered - total).abs() / total < 1e-9);
        }
    }

    #[test]
    fn resample_interpolates_per_point_attrs() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        let c = Contour::new("rect", pts, true)
            .unwrap()
            .with_attr("w", AttrValue::PerPoint(vec![0.0, 2.0, 4.0, 6.0]))
            .unwrap();
        let r = resample_uniform(&c, 8).unwrap();
        match r.attrs().get("w") {
            Some(AttrValue::PerPoint(vs)) => {
                assert_eq!(vs.len(), 8);
                assert_close(vs[0], 0.0, 1e-12);
                assert_close(vs[1], 1.0, 1e-12);
            }
            other => panic!("expected per-point attr, got {other:?}"),
        }
    }

    #[test]
    fn resample_rejects_open_and_tiny() {
        let open = Contour::new(
            "open",
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)],
            false,
        )
        .unwrap();
        assert!(matches!(
            resample_uniform(&open, 8),
            Err(ContourError::OpenContour { .. })
        ));
        let c = circle(1.0, 8);
        assert!(matches!(
            resample_uniform(&c, 2),
            Err(ContourError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn rotate_start_identity_and_inverse() {
        let c = circle(1.0, 7);
        assert_eq!(rotate_start(&c, 0).unwrap(), c);
        let k = 3;
        let back = rotate_start(&rotate_start(&c, k).unwrap(), 7 - k).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rotate_four_point_circle() {
        let c = circle(1.0, 4);
        let r = rotate_start(&c, 1).unwrap();
        assert_close(r.points()[0].x, 0.0, 1e-12);
        assert_close(r.points()[0].y, 1.0, 1e-12);
        assert_close(r.points()[3].x, 1.0, 1e-12);
    }

    #[test]
    fn rotate_out_of_range() {
        let c = circle(1.0, 4);
        assert!(matches!(
            rotate_start(&c, 4),
            Err(ContourError::RotationOutOfRange { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = circle(1.0, 4)
            .with_attr("velocity", AttrValue::Scalar(1.25))
            .unwrap()
            .with_attr("heat", AttrValue::PerPoint(vec![0.1, 0.2, 0.3, 0.4]))
            .unwrap();
        let json = contour_to_json(&c);
        let back: Contour<f64> = contour_from_json(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn document_with_two_points_rejected() {
        let json = r#"{"name":"bad","closed":true,"points":[[0,0],[1,0]]}"#;
        assert!(matches!(
            contour_from_json::<f64>(json),
            Err(ContourError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn document_with_wrong_attr_length_rejected() {
        let json = r#"{"name":"bad","closed":true,
            "points":[[0,0],[1,0],[0.5,1]],
            "attrs":{"velocity":[1.0,2.0]}}"#;
        assert!(matches!(
            contour_from_json::<f64>(json),
            Err(ContourError::AttrLengthMismatch { .. })
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let c = circle(1.0, 4);
        save_contour(&path, &c).unwrap();
        let back: Contour<f64> = load_contour(&path).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn feature_sequence_broadcasts_scalars() {
        let c = circle(1.0, 8)
            .with_attr("velocity", AttrValue::Scalar(2.5))
            .unwrap();
        let seq = FeatureSequence::from_contour(&c).unwrap();
        assert_eq!(seq.feature("velocity").unwrap(), &[2.5; 8][..]);
        assert_eq!(seq.sole_feature().unwrap().0, "velocity");
        assert!(seq.closed());
    }

    #[test]
    fn feature_sequence_rotation_matches_contour_rotation() {
        let c = circle(1.0, 9)
            .with_attr(
                "w",
                AttrValue::PerPoint((0..9).map(|i| i as f64).collect()),
            )
            .unwrap();
        let a = FeatureSequence::from_contour(&rotate_start(&c, 4).unwrap()).unwrap();
        let b = FeatureSequence::from_contour(&c).unwrap().rotated(4).unwrap();
        assert_eq!(a.angles(), b.angles());
        assert_eq!(a.feature("w"), b.feature("w"));
    }
}
