//! Source configurations and the preferred-axis construction used to reduce
//! three-dimensional point sources to the plane.
//!
//! A configuration is an ordered set of distinct source locations strictly
//! inside the unit ball. Reduction from R³ to R² integrates along a chosen
//! axis, which must avoid every direction joining two sources (so the sources
//! stay distinct once projected), every source direction seen from the
//! origin (so no projection lands on the origin) and any extra directions the
//! caller cares about, typically dipole moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_R_MIN: f64 = 0.05;
pub const DEFAULT_R_MAX: f64 = 0.95;
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-3;
/// Default angular clearance of the preferred axis, radians.
pub const DEFAULT_AXIS_CLEARANCE: f64 = 1e-3;
pub const DEFAULT_AXIS_GRID: usize = 100_000;
/// Distinctness tolerance for projected points and projected dipoles.
pub const PROJECTION_TOLERANCE: f64 = 1e-9;
const DIRECTION_DEDUP_TOLERANCE: f64 = 1e-9;

/// A location in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct SourcePoint2 {
    pub x: f64,
    pub y: f64,
}

/// A location in space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct SourcePoint3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SourcePoint2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl SourcePoint3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 2]> for SourcePoint2 {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<SourcePoint2> for [f64; 2] {
    fn from(p: SourcePoint2) -> Self {
        [p.x, p.y]
    }
}

impl From<[f64; 3]> for SourcePoint3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<SourcePoint3> for [f64; 3] {
    fn from(p: SourcePoint3) -> Self {
        [p.x, p.y, p.z]
    }
}

/// Common behaviour of plane and space points.
pub trait Point: Copy + std::fmt::Debug + PartialEq {
    const DIM: usize;
    fn coords(&self) -> Vec<f64>;

    fn norm(&self) -> f64 {
        self.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn distance(&self, other: &Self) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

impl Point for SourcePoint2 {
    const DIM: usize = 2;
    fn coords(&self) -> Vec<f64> {
        vec![self.x, self.y]
    }
    fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Point for SourcePoint3 {
    const DIM: usize = 3;
    fn coords(&self) -> Vec<f64> {
        vec![self.x, self.y, self.z]
    }
}

/// Annulus bounds and separation used to validate a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub r_min: f64,
    pub r_max: f64,
    pub min_sep: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            min_sep: DEFAULT_MIN_SEPARATION,
        }
    }
}

impl Bounds {
    pub fn new(r_min: f64, r_max: f64, min_sep: f64) -> Result<Self> {
        let b = Self { r_min, r_max, min_sep };
        b.check()?;
        Ok(b)
    }

    fn check(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "annulus must satisfy 0 < r_min < r_max < 1, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !(self.min_sep > 0.0 && self.min_sep.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "min_sep must be positive, got {}",
                self.min_sep
            )));
        }
        Ok(())
    }
}

/// A validated, ordered set of distinct source locations.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfiguration<P: Point> {
    points: Vec<P>,
    bounds: Bounds,
}

pub type Configuration2 = SourceConfiguration<SourcePoint2>;
pub type Configuration3 = SourceConfiguration<SourcePoint3>;

impl<P: Point> SourceConfiguration<P> {
    /// Builds a configuration without checking any invariant. Only meant for
    /// deliberately degenerate inputs (near-duplicate nodes and the like).
    pub fn new_unchecked(points: Vec<P>, bounds: Bounds) -> Self {
        Self { points, bounds }
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Configuration2 {
    /// Source locations as complex numbers z_k = x_k + i y_k.
    pub fn nodes(&self) -> Vec<num_complex::Complex64> {
        self.points
            .iter()
            .map(|p| num_complex::Complex64::new(p.x, p.y))
            .collect()
    }
}

/// Checks bounds, annulus membership and pairwise separation, preserving the
/// input order.
pub fn validate_configuration<P: Point>(
    points: Vec<P>,
    r_min: f64,
    r_max: f64,
    min_sep: f64,
) -> Result<SourceConfiguration<P>> {
    let bounds = Bounds::new(r_min, r_max, min_sep)?;
    validate_with(points, bounds)
}

pub fn validate_with<P: Point>(points: Vec<P>, bounds: Bounds) -> Result<SourceConfiguration<P>> {
    bounds.check()?;
    if points.is_empty() {
        return Err(Error::Empty);
    }
    for (index, p) in points.iter().enumerate() {
        let radius = p.norm();
        if !p.is_finite() || radius < bounds.r_min || radius > bounds.r_max {
            return Err(Error::OutsideAnnulus {
                index,
                radius,
                r_min: bounds.r_min,
                r_max: bounds.r_max,
            });
        }
    }
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            let distance = points[j].distance(&points[k]);
            if distance < bounds.min_sep {
                return Err(Error::DuplicatePoint {
                    first: j,
                    second: k,
                    distance,
                });
            }
        }
    }
    Ok(SourceConfiguration { points, bounds })
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn normalize3(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(a);
    (n > 0.0 && n.is_finite()).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Unit directions, deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    directions: Vec<[f64; 3]>,
}

impl DirectionSet {
    /// Normalises and deduplicates the given vectors; zero vectors are dropped.
    pub fn from_vectors<I: IntoIterator<Item = [f64; 3]>>(vectors: I) -> Self {
        let mut set = Self::default();
        for v in vectors {
            if let Some(u) = normalize3(v) {
                set.insert(u);
            }
        }
        set
    }

    fn insert(&mut self, u: [f64; 3]) {
        let seen = self
            .directions
            .iter()
            .any(|d| norm3(sub3(*d, u)) < DIRECTION_DEDUP_TOLERANCE);
        if !seen {
            self.directions.push(u);
        }
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Both orientations of every line through two of the points.
pub fn pairwise_directions(points: &[SourcePoint3]) -> Result<DirectionSet> {
    if points.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least two points, got {}",
            points.len()
        )));
    }
    let mut set = DirectionSet::default();
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            let d = normalize3(sub3(points[j].to_array(), points[k].to_array()))
                .ok_or_else(|| Error::DegenerateInput(format!("points {j} and {k} coincide")))?;
            set.insert(d);
            set.insert([-d[0], -d[1], -d[2]]);
        }
    }
    Ok(set)
}

/// Options for the preferred-axis sweep.
#[derive(Debug, Clone, Copy)]
pub struct AxisOptions {
    pub clearance: f64,
    pub grid: usize,
}

impl Default for AxisOptions {
    fn default() -> Self {
        Self {
            clearance: DEFAULT_AXIS_CLEARANCE,
            grid: DEFAULT_AXIS_GRID,
        }
    }
}

/// Angle between `axis` and the line spanned by `direction`.
pub fn line_angle(axis: [f64; 3], direction: [f64; 3]) -> f64 {
    dot3(axis, direction).abs().min(1.0).acos()
}

/// Point `i` of an `n`-point Fibonacci lattice on the upper hemisphere.
fn fibonacci_hemisphere(i: usize, n: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (i as f64 + 0.5) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    [r * phi.cos(), r * phi.sin(), z]
}

/// Every direction the preferred axis must stay clear of.
pub fn forbidden_directions(points: &[SourcePoint3], extra_dirs: &DirectionSet) -> DirectionSet {
    let mut set = if points.len() >= 2 {
        pairwise_directions(points).unwrap_or_default()
    } else {
        DirectionSet::default()
    };
    for p in points {
        if let Some(u) = normalize3(p.to_array()) {
            set.insert(u);
        }
    }
    for d in extra_dirs.directions() {
        set.insert(*d);
    }
    set
}

/// Minimum angle between `axis` and any forbidden line.
pub fn axis_clearance(axis: [f64; 3], forbidden: &DirectionSet) -> f64 {
    forbidden
        .directions()
        .iter()
        .map(|d| line_angle(axis, *d))
        .fold(std::f64::consts::FRAC_PI_2, f64::min)
}

/// Deterministic sweep for an axis that clears every pair direction, every
/// origin direction and every extra direction by at least
/// `options.clearance`. Among `e_z` and a Fibonacci grid of candidates the
/// one with the largest clearance wins; ties go to the earliest candidate.
pub fn find_preferred_axis(
    points: &[SourcePoint3],
    extra_dirs: &DirectionSet,
    options: AxisOptions,
) -> Result<[f64; 3]> {
    for (j, p) in points.iter().enumerate() {
        for (k, q) in points.iter().enumerate().skip(j + 1) {
            if p == q {
                return Err(Error::DegenerateInput(format!("points {j} and {k} coincide")));
            }
        }
    }
    let forbidden = forbidden_directions(points, extra_dirs);
    let mut best = [0.0, 0.0, 1.0];
    let mut best_clearance = axis_clearance(best, &forbidden);
    for i in 0..options.grid {
        let candidate = fibonacci_hemisphere(i, options.grid);
        let c = axis_clearance(candidate, &forbidden);
        if c > best_clearance {
            best = candidate;
            best_clearance = c;
        }
    }
    if best_clearance < options.clearance {
        return Err(Error::ExhaustedCandidates { best_clearance });
    }
    Ok(best)
}

/// Orthonormal frame whose third vector is the reduction axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub axis: [f64; 3],
}

impl Frame {
    pub fn from_axis(axis: [f64; 3]) -> Result<Self> {
        let axis = normalize3(axis).ok_or_else(|| Error::InvalidParameter("axis must be a nonzero vector".into()))?;
        // helper: the coordinate vector least aligned with the axis
        let helper = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
            [1.0, 0.0, 0.0]
        } else if axis[1].abs() <= axis[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let h = dot3(helper, axis);
        let e1 = normalize3([
            helper[0] - h * axis[0],
            helper[1] - h * axis[1],
            helper[2] - h * axis[2],
        ])
        .expect("helper is not parallel to axis");
        let e2 = cross3(axis, e1);
        Ok(Self { e1, e2, axis })
    }

    /// Coordinates (in-plane x, in-plane y, height along the axis).
    pub fn to_local(&self, v: [f64; 3]) -> [f64; 3] {
        [dot3(v, self.e1), dot3(v, self.e2), dot3(v, self.axis)]
    }

    pub fn to_global(&self, local: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = local[0] * self.e1[i] + local[1] * self.e2[i] + local[2] * self.axis[i];
        }
        out
    }
}

/// Result of projecting a spatial configuration onto the plane orthogonal to
/// the reduction axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub frame: Frame,
    pub config: Configuration2,
    /// Heights of the sources along the axis.
    pub heights: Vec<f64>,
    pub dipoles: Vec<[f64; 2]>,
    /// Axial components of the dipoles.
    pub dipole_heights: Vec<f64>,
}

/// Projects sources (and optional dipole moments) onto the plane orthogonal
/// to `axis`. The projected configuration keeps the original `r_max` and
/// separates points only by [`PROJECTION_TOLERANCE`].
pub fn project_to_plane(config: &Configuration3, axis: [f64; 3], dipoles: Option<&[[f64; 3]]>) -> Result<Projection> {
    let frame = Frame::from_axis(axis)?;
    let mut planar = Vec::with_capacity(config.len());
    let mut heights = Vec::with_capacity(config.len());
    for p in config.points() {
        let local = frame.to_local(p.to_array());
        planar.push(SourcePoint2::new(local[0], local[1]));
        heights.push(local[2]);
    }
    for (j, p) in planar.iter().enumerate() {
        if p.norm() <= PROJECTION_TOLERANCE {
            return Err(Error::ProjectionCollision {
                first: j,
                second: j,
                distance: p.norm(),
            });
        }
        for (k, q) in planar.iter().enumerate().skip(j + 1) {
            let distance = p.distance(q);
            if distance <= PROJECTION_TOLERANCE {
                return Err(Error::ProjectionCollision {
                    first: j,
                    second: k,
                    distance,
                });
            }
        }
    }
    let mut projected = Vec::new();
    let mut dipole_heights = Vec::new();
    if let Some(ds) = dipoles {
        if ds.len() != config.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dipoles for {} sources",
                ds.len(),
                config.len()
            )));
        }
        for (index, d) in ds.iter().enumerate() {
            let local = frame.to_local(*d);
            let inplane = local[0].hypot(local[1]);
            if norm3(*d) > 0.0 && inplane <= PROJECTION_TOLERANCE * norm3(*d) {
                return Err(Error::ZeroProjection { index });
            }
            projected.push([local[0], local[1]]);
            dipole_heights.push(local[2]);
        }
    }
    let bounds = Bounds {
        r_min: PROJECTION_TOLERANCE,
        r_max: config.bounds().r_max,
        min_sep: PROJECTION_TOLERANCE,
    };
    Ok(Projection {
        frame,
        config: SourceConfiguration::new_unchecked(planar, bounds),
        heights,
        dipoles: projected,
        dipole_heights,
    })
}

/// JSON form of a configuration:
/// `{"dim": 2|3, "points": [[x,y(,z)],...], "r_min", "r_max", "min_sep"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationDocument {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_min_sep")]
    pub min_sep: f64,
}

fn default_r_min() -> f64 {
    DEFAULT_R_MIN
}
fn default_r_max() -> f64 {
    DEFAULT_R_MAX
}
fn default_min_sep() -> f64 {
    DEFAULT_MIN_SEPARATION
}

/// A configuration of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyConfiguration {
    Plane(Configuration2),
    Space(Configuration3),
}

impl AnyConfiguration {
    pub fn len(&self) -> usize {
        match self {
            Self::Plane(c) => c.len(),
            Self::Space(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ConfigurationDocument {
    pub fn validate(&self) -> Result<AnyConfiguration> {
        let bounds = Bounds::new(self.r_min, self.r_max, self.min_sep)?;
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::Parse(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.len(),
                    self.dim
                )));
            }
        }
        match self.dim {
            2 => validate_with(
                self.points.iter().map(|p| SourcePoint2::new(p[0], p[1])).collect(),
                bounds,
            )
            .map(AnyConfiguration::Plane),
            3 => validate_with(
                self.points
                    .iter()
                    .map(|p| SourcePoint3::new(p[0], p[1], p[2]))
                    .collect(),
                bounds,
            )
            .map(AnyConfiguration::Space),
            d => Err(Error::Parse(format!("dim must be 2 or 3, got {d}"))),
        }
    }
}

impl<P: Point> From<&SourceConfiguration<P>> for ConfigurationDocument {
    fn from(c: &SourceConfiguration<P>) -> Self {
        Self {
            dim: P::DIM,
            points: c.points().iter().map(|p| p.coords()).collect(),
            r_min: c.bounds().r_min,
            r_max: c.bounds().r_max,
            min_sep: c.bounds().min_sep,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interior_point_is_valid() {
        let c = validate_configuration(vec![SourcePoint2::new(0.5, 0.0)], 0.05, 0.95, 1e-3).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn exact_duplicate_is_rejected() {
        let pts = vec![SourcePoint2::new(0.5, 0.0), SourcePoint2::new(0.5, 0.0)];
        assert!(matches!(
            validate_configuration(pts, 0.05, 0.95, 1e-3),
            Err(Error::DuplicatePoint {
                first: 0,
                second: 1,
                ..
            })
        ));
    }

    #[test]
    fn point_outside_disk_is_rejected() {
        let pts = vec![SourcePoint2::new(1.2, 0.0)];
        assert!(matches!(
            validate_configuration(pts, 0.05, 0.95, 1e-3),
            Err(Error::OutsideAnnulus { index: 0, .. })
        ));
    }

    #[test]
    fn empty_and_bad_bounds() {
        assert_eq!(
            validate_configuration(Vec::<SourcePoint2>::new(), 0.05, 0.95, 1e-3),
            Err(Error::Empty)
        );
        assert!(matches!(
            validate_configuration(vec![SourcePoint2::new(0.5, 0.0)], 0.5, 0.4, 1e-3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            validate_configuration(vec![SourcePoint2::new(0.5, 0.0)], 0.05, 0.95, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn duplicate_detection_uses_distance() {
        let pts = vec![SourcePoint2::new(0.5, 0.0), SourcePoint2::new(0.5, 5e-4)];
        assert!(validate_configuration(pts, 0.05, 0.95, 1e-3).is_err());
    }

    #[test]
    fn two_points_give_two_directions() {
        let pts = [SourcePoint3::new(0.1, 0.2, 0.3), SourcePoint3::new(-0.4, 0.1, 0.2)];
        assert_eq!(pairwise_directions(&pts).unwrap().len(), 2);
    }

    #[test]
    fn collinear_points_give_two_directions() {
        let pts = [
            SourcePoint3::new(0.1, 0.0, 0.0),
            SourcePoint3::new(0.3, 0.0, 0.0),
            SourcePoint3::new(0.7, 0.0, 0.0),
        ];
        assert_eq!(pairwise_directions(&pts).unwrap().len(), 2);
    }

    #[test]
    fn generic_triangle_gives_six_directions() {
        let pts = [
            SourcePoint3::new(0.1, 0.2, 0.3),
            SourcePoint3::new(-0.4, 0.1, 0.2),
            SourcePoint3::new(0.3, -0.5, 0.1),
        ];
        // brute force: every ordered pair gives a direction, none parallel
        let mut brute: Vec<[f64; 3]> = Vec::new();
        for a in &pts {
            for b in &pts {
                if a != b {
                    let d = sub3(a.to_array(), b.to_array());
                    let n = norm3(d);
                    let u = [d[0] / n, d[1] / n, d[2] / n];
                    if !brute.iter().any(|v| norm3(sub3(*v, u)) < 1e-12) {
                        brute.push(u);
                    }
                }
            }
        }
        assert_eq!(brute.len(), 6);
        assert_eq!(pairwise_directions(&pts).unwrap().len(), 6);
    }

    #[test]
    fn directions_need_two_points() {
        assert!(matches!(
            pairwise_directions(&[SourcePoint3::new(0.1, 0.1, 0.1)]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(pairwise_directions(&[]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn x_axis_points_accept_returned_axis() {
        let pts = [SourcePoint3::new(0.2, 0.0, 0.0), SourcePoint3::new(0.6, 0.0, 0.0)];
        let axis = find_preferred_axis(&pts, &DirectionSet::default(), AxisOptions::default()).unwrap();
        let forbidden = forbidden_directions(&pts, &DirectionSet::default());
        assert!(axis_clearance(axis, &forbidden) >= DEFAULT_AXIS_CLEARANCE);
        // e_z itself is acceptable for this configuration
        assert!(axis_clearance([0.0, 0.0, 1.0], &forbidden) >= DEFAULT_AXIS_CLEARANCE);
    }

    #[test]
    fn axis_avoids_extra_directions() {
        let pts = [SourcePoint3::new(0.2, 0.1, 0.0), SourcePoint3::new(0.6, -0.2, 0.1)];
        let extra = DirectionSet::from_vectors([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]);
        let axis = find_preferred_axis(&pts, &extra, AxisOptions::default()).unwrap();
        assert!(line_angle(axis, [0.0, 0.0, 1.0]) >= DEFAULT_AXIS_CLEARANCE);
    }

    #[test]
    fn coordinate_drop_projection() {
        let config = validate_configuration(
            vec![SourcePoint3::new(0.1, 0.2, 0.3), SourcePoint3::new(0.4, 0.1, -0.2)],
            0.05,
            0.95,
            1e-3,
        )
        .unwrap();
        let proj = project_to_plane(&config, [0.0, 0.0, 1.0], None).unwrap();
        let frame = proj.frame;
        // frame is orthonormal and right-handed with e3 = axis
        assert!((dot3(frame.e1, frame.e2)).abs() < 1e-15);
        assert_eq!(frame.axis, [0.0, 0.0, 1.0]);
        let pts = proj.config.points();
        // up to the in-plane rotation of the frame, coordinates are dropped
        for (p, q) in pts.iter().zip(config.points()) {
            let back = frame.to_global([p.x, p.y, 0.0]);
            assert!((back[0] - q.x).abs() < 1e-15 && (back[1] - q.y).abs() < 1e-15);
        }
        assert!((proj.heights[0] - 0.3).abs() < 1e-15);
        assert!((proj.heights[1] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn parallel_dipole_has_zero_projection() {
        let config = validate_configuration(vec![SourcePoint3::new(0.1, 0.2, 0.3)], 0.05, 0.95, 1e-3).unwrap();
        assert_eq!(
            project_to_plane(&config, [0.0, 0.0, 1.0], Some(&[[0.0, 0.0, 1.0]])),
            Err(Error::ZeroProjection { index: 0 })
        );
    }

    #[test]
    fn validation_is_idempotent() {
        let c = validate_configuration(
            vec![SourcePoint2::new(0.5, 0.1), SourcePoint2::new(-0.2, 0.3)],
            0.05,
            0.95,
            1e-3,
        )
        .unwrap();
        let again = validate_with(c.points().to_vec(), c.bounds()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn document_round_trip() {
        let doc: ConfigurationDocument =
            serde_json::from_str(r#"{"dim":3,"points":[[0.1,0.2,0.3]],"r_min":0.05,"r_max":0.95,"min_sep":0.001}"#)
                .unwrap();
        let AnyConfiguration::Space(c) = doc.validate().unwrap() else {
            panic!("expected a 3D configuration")
        };
        assert_eq!(ConfigurationDocument::from(&c), doc);
        let bad: ConfigurationDocument = serde_json::from_str(r#"{"dim":4,"points":[]}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::Parse(_))));
    }
}
