//! R³ → R² reduction: integrating a spatial expansion along a line parallel
//! to a reduction axis yields twice the planar expansion at the projected
//! sources, once origin counter-terms remove the divergent parts.
//!
//! Point masses use the truncated antiderivative directly. Dipoles are
//! integrated by adaptive quadrature at L and 2L and combined by Richardson
//! extrapolation, since a symmetric window leaves an A/L² + O(L⁻⁴) tail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{find_preferred_axis, project_to_plane, AxisOptions, DirectionSet, Frame, Projection};
use crate::quadrature::integrate_line;
use crate::real_basis::{
    dipole_r3_raw, pm_r3_raw, psi_r2_raw, RealExpansionSpec2, RealExpansionSpec3, MASS_BALANCE_TOLERANCE,
};

pub const DEFAULT_HALF_LENGTH: f64 = 1e4;
pub const DEFAULT_PROBE_RADIUS: f64 = 2.0;
pub const DEFAULT_PROBES: usize = 20;
/// Absolute tolerance of the quadrature cross-check.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// Absolute tolerance of the dipole line integrals; tighter than the
/// cross-check because the axial parts are themselves O(L⁻²).
const DIPOLE_QUADRATURE_TOLERANCE: f64 = 1e-12;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::DomainViolation(format!(
            "{name} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}

/// ∫_{−L}^{L} (1/√(a²+z²) − 1/√(b²+z²)) dz in closed form.
pub fn line_integral_pm(a: f64, b: f64, half_length: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("L", half_length)?;
    // s(t) = √(1+t²) − 1 without cancellation for small t
    let s = |t: f64| t * t / ((t * t + 1.0).sqrt() + 1.0);
    let (sa, sb) = (s(a / half_length), s(b / half_length));
    Ok(2.0 * ((sa - sb) / (2.0 + sb)).ln_1p() - 2.0 * (a / b).ln())
}

/// ∫_{−L}^{L} (1/√(a²+(z−h)²) − 1/√(b²+z²)) dz: a source at height h
/// against the origin counter-term. Equals `line_integral_pm` at h = 0.
pub fn offset_line_integral_pm(a: f64, h: f64, b: f64, half_length: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("L", half_length)?;
    let origin = (half_length / b).asinh();
    Ok(((half_length - h) / a).asinh() - origin + ((half_length + h) / a).asinh() - origin)
}

/// One line integral evaluated three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub value_closed: f64,
    /// The L → ∞ limit 2 ln(b/a).
    pub value_limit: f64,
    pub value_quadrature: f64,
}

impl ReductionCheck {
    pub fn new(a: f64, b: f64, half_length: f64) -> Result<Self> {
        let value_closed = line_integral_pm(a, b, half_length)?;
        let f = |z: f64| 1.0 / a.hypot(z) - 1.0 / b.hypot(z);
        let q = integrate_line(&f, 0.0, half_length, QUADRATURE_TOLERANCE * 0.1)?;
        Ok(Self {
            a,
            b,
            half_length,
            value_closed,
            value_limit: 2.0 * (b / a).ln(),
            value_quadrature: q.value,
        })
    }

    pub fn truncation_error(&self) -> f64 {
        (self.value_closed - self.value_limit).abs()
    }

    pub fn quadrature_error(&self) -> f64 {
        (self.value_closed - self.value_quadrature).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionOptions {
    pub half_length: f64,
    pub probe_radius: f64,
    pub probes: usize,
    /// Reduction axis; `None` runs the preferred-axis search.
    pub axis: Option<[f64; 3]>,
    /// Cross-check the closed-form mass integrals by quadrature.
    pub quadrature: bool,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            half_length: DEFAULT_HALF_LENGTH,
            probe_radius: DEFAULT_PROBE_RADIUS,
            probes: DEFAULT_PROBES,
            axis: None,
            quadrature: true,
        }
    }
}

/// JSON report of one reduction run. `per_term` holds the defect of each
/// source's term on its own, maximised over probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    #[serde(rename = "L")]
    pub half_length: f64,
    pub probe_radius: f64,
    pub defect: f64,
    pub per_term: Vec<f64>,
    pub axis: [f64; 3],
    /// max |closed form − quadrature| over probes (masses).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quadrature_defect: Option<f64>,
    /// Defect of the unextrapolated integrals at L (dipoles).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raw_defect: Option<f64>,
    /// max |∫ axial dipole parts| over probes, extrapolated (dipoles).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub axial: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub axial_raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub spec2: RealExpansionSpec2,
    pub report: ReductionReport,
}

fn check_options(options: &ReductionOptions) -> Result<()> {
    check_positive("L", options.half_length)?;
    if !(options.probe_radius >= 1.0 && options.probe_radius.is_finite()) {
        return Err(Error::DomainViolation(format!(
            "probe radius {} lies inside the unit disc",
            options.probe_radius
        )));
    }
    if options.probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe point".into()));
    }
    Ok(())
}

fn choose_axis(spec: &RealExpansionSpec3, options: &ReductionOptions) -> Result<[f64; 3]> {
    match options.axis {
        Some(axis) => Ok(axis),
        None => {
            let dirs = DirectionSet::from_vectors(spec.dipoles.iter().copied().filter(|d| d.iter().any(|c| *c != 0.0)));
            find_preferred_axis(spec.sources.points(), &dirs, AxisOptions::default())
        }
    }
}

/// Probe points on a circle in the reduction plane, half a step off the
/// frame's first axis.
pub fn probe_points(radius: f64, count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|j| {
            let theta = std::f64::consts::TAU * (j as f64 + 0.5) / count as f64;
            [radius * theta.cos(), radius * theta.sin()]
        })
        .collect()
}

fn line_point(frame: &Frame, p: [f64; 2], t: f64) -> [f64; 3] {
    frame.to_global([p[0], p[1], t])
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn column_max(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    (0..n).map(|k| max_abs(rows.iter().map(|r| r[k]))).collect()
}

/// Reduces point masses along the axis. Each term m_k/|X − X_k| carries the
/// counter-term −m_k/|X| at the origin, so the per-term integrals converge
/// to 2 m_k Ψ_k; with Σ m_k = 0 the counter-terms cancel in the sum.
pub fn reduce_pm_r3(spec: &RealExpansionSpec3, options: &ReductionOptions) -> Result<Reduced> {
    check_options(options)?;
    let sum = spec.mass_sum();
    if sum.abs() > MASS_BALANCE_TOLERANCE {
        return Err(Error::MassImbalance { sum });
    }
    let axis = choose_axis(spec, options)?;
    let projection = project_to_plane(&spec.sources, axis, None)?;
    let spec2 = RealExpansionSpec2::new(projection.config.clone(), spec.masses.clone(), vec![], vec![])?;
    let n = spec.masses.len();
    let l = options.half_length;
    let probes = probe_points(options.probe_radius, options.probes);

    let rows: Vec<(Vec<f64>, f64, Option<f64>)> = probes
        .par_iter()
        .map(|&p| -> Result<_> {
            let b = p[0].hypot(p[1]);
            let mut per_term = Vec::with_capacity(n);
            let (mut closed, mut limit) = (0.0, 0.0);
            for k in 0..n {
                let q = projection.config.points()[k];
                let a = (p[0] - q.x).hypot(p[1] - q.y);
                let value = spec.masses[k] * offset_line_integral_pm(a, projection.heights[k], b, l)?;
                let target = 2.0 * spec.masses[k] * psi_r2_raw(p, [q.x, q.y]);
                per_term.push(value - target);
                closed += value;
                limit += target;
            }
            let quad = if options.quadrature && n > 0 {
                let sources: Vec<[f64; 3]> = spec.sources.points().iter().map(|s| s.to_array()).collect();
                let f = |t: f64| {
                    let x = line_point(&projection.frame, p, t);
                    let v: f64 = sources
                        .iter()
                        .zip(&spec.masses)
                        .map(|(s, m)| pm_r3_raw(x, *s, *m))
                        .sum();
                    v - sum / b.hypot(t)
                };
                let q = integrate_line(&f, 0.0, l, QUADRATURE_TOLERANCE)?;
                Some((q.value - closed).abs())
            } else {
                None
            };
            Ok((per_term, closed - limit, quad))
        })
        .collect::<Result<_>>()?;

    let per_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
    let report = ReductionReport {
        half_length: l,
        probe_radius: options.probe_radius,
        defect: max_abs(rows.iter().map(|r| r.1)),
        per_term: column_max(&per_rows, n),
        axis: projection.frame.axis,
        quadrature_defect: if options.quadrature && n > 0 {
            Some(max_abs(rows.iter().filter_map(|r| r.2)))
        } else {
            None
        },
        raw_defect: None,
        axial: None,
        axial_raw: None,
    };
    Ok(Reduced { spec2, report })
}

fn richardson(at_l: f64, at_2l: f64) -> f64 {
    (4.0 * at_2l - at_l) / 3.0
}

struct DipoleLine {
    total: f64,
    total_raw: f64,
    axial: f64,
    axial_raw: f64,
}

/// Integrates the dipole D at X_k (with its origin counter-term) along the
/// line through planar point p, and the same for its axial component alone.
fn dipole_line(frame: &Frame, p: [f64; 2], xk: [f64; 3], d: [f64; 3], l: f64) -> Result<DipoleLine> {
    let local = frame.to_local(d);
    let d_axial = frame.to_global([0.0, 0.0, local[2]]);
    let origin = [0.0; 3];
    let integrand = |dv: [f64; 3]| {
        move |t: f64| {
            let x = line_point(frame, p, t);
            dipole_r3_raw(x, xk, dv) - dipole_r3_raw(x, origin, dv)
        }
    };
    let run = |dv: [f64; 3]| -> Result<(f64, f64)> {
        if dv.iter().all(|c| *c == 0.0) {
            return Ok((0.0, 0.0));
        }
        let f = integrand(dv);
        let i1 = integrate_line(&f, 0.0, l, DIPOLE_QUADRATURE_TOLERANCE)?.value;
        let i2 = integrate_line(&f, 0.0, 2.0 * l, DIPOLE_QUADRATURE_TOLERANCE)?.value;
        Ok((richardson(i1, i2), i1))
    };
    let (total, total_raw) = run(d)?;
    let (axial, axial_raw) = run(d_axial)?;
    Ok(DipoleLine {
        total,
        total_raw,
        axial,
        axial_raw,
    })
}

/// ∇_P Ψ_k(P) = P/|P|² − (P − p_k)/|P − p_k|².
fn grad_psi(p: [f64; 2], pk: [f64; 2]) -> [f64; 2] {
    let r2 = p[0] * p[0] + p[1] * p[1];
    let (dx, dy) = (p[0] - pk[0], p[1] - pk[1]);
    let a2 = dx * dx + dy * dy;
    [p[0] / r2 - dx / a2, p[1] / r2 - dy / a2]
}

/// Reduces dipoles along the axis. Each D_k·∇|X − X_k|⁻¹ carries the
/// counter-term −D_k·∇|X|⁻¹, and its line integral tends to
/// 2 D_k^{(2)}·∇Ψ_k at the probe, where D_k^{(2)} is the in-plane part;
/// the axial part integrates to zero.
pub fn reduce_dipole_r3(spec: &RealExpansionSpec3, options: &ReductionOptions) -> Result<Reduced> {
    check_options(options)?;
    let axis = choose_axis(spec, options)?;
    let n = spec.dipoles.len();
    let dipoles = if n == 0 {
        vec![[0.0; 3]; spec.sources.len()]
    } else {
        spec.dipoles.clone()
    };
    let projection: Projection = project_to_plane(&spec.sources, axis, Some(&dipoles))?;
    let spec2 = RealExpansionSpec2::new(
        projection.config.clone(),
        vec![],
        if n == 0 { vec![] } else { projection.dipoles.clone() },
        vec![],
    )?;
    let l = options.half_length;
    let probes = probe_points(options.probe_radius, options.probes);
    let sources: Vec<[f64; 3]> = spec.sources.points().iter().map(|s| s.to_array()).collect();

    struct Row {
        per_term: Vec<f64>,
        defect: f64,
        raw: f64,
        axial: f64,
        axial_raw: f64,
    }
    let rows: Vec<Row> = probes
        .par_iter()
        .map(|&p| -> Result<Row> {
            let mut row = Row {
                per_term: Vec::with_capacity(n),
                defect: 0.0,
                raw: 0.0,
                axial: 0.0,
                axial_raw: 0.0,
            };
            for k in 0..n {
                let line = dipole_line(&projection.frame, p, sources[k], spec.dipoles[k], l)?;
                let q = projection.config.points()[k];
                let g = grad_psi(p, [q.x, q.y]);
                let d2 = projection.dipoles[k];
                let target = 2.0 * (d2[0] * g[0] + d2[1] * g[1]);
                row.per_term.push(line.total - target);
                row.defect += line.total - target;
                row.raw += line.total_raw - target;
                row.axial += line.axial;
                row.axial_raw += line.axial_raw;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let per_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.per_term.clone()).collect();
    let report = ReductionReport {
        half_length: l,
        probe_radius: options.probe_radius,
        defect: max_abs(rows.iter().map(|r| r.defect)),
        per_term: column_max(&per_rows, n),
        axis: projection.frame.axis,
        quadrature_defect: None,
        raw_defect: Some(max_abs(rows.iter().map(|r| r.raw))),
        axial: Some(max_abs(rows.iter().map(|r| r.axial))),
        axial_raw: Some(max_abs(rows.iter().map(|r| r.axial_raw))),
    };
    Ok(Reduced { spec2, report })
}

/// Line integral of the axial parts of the dipoles alone, with no
/// projection requirement: a dipole parallel to the axis is allowed here.
/// Returns (extrapolated, raw at L), maximised over probes.
pub fn axial_dipole_integral(
    spec: &RealExpansionSpec3,
    axis: [f64; 3],
    options: &ReductionOptions,
) -> Result<(f64, f64)> {
    check_options(options)?;
    let frame = Frame::from_axis(axis)?;
    let probes = probe_points(options.probe_radius, options.probes);
    let sources: Vec<[f64; 3]> = spec.sources.points().iter().map(|s| s.to_array()).collect();
    let per_probe: Vec<(f64, f64)> = probes
        .par_iter()
        .map(|&p| -> Result<(f64, f64)> {
            let mut acc = (0.0, 0.0);
            for (xk, d) in sources.iter().zip(&spec.dipoles) {
                let line = dipole_line(&frame, p, *xk, *d, options.half_length)?;
                acc.0 += line.axial;
                acc.1 += line.axial_raw;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok((
        max_abs(per_probe.iter().map(|v| v.0)),
        max_abs(per_probe.iter().map(|v| v.1)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bounds, SourceConfiguration, SourcePoint3};
    use proptest::prelude::*;

    fn space(points: &[[f64; 3]]) -> crate::geometry::Configuration3 {
        SourceConfiguration::new_unchecked(
            points.iter().map(|p| SourcePoint3::new(p[0], p[1], p[2])).collect(),
            Bounds::default(),
        )
    }

    #[test]
    fn equal_distances_give_zero() {
        for l in [1.0, 10.0, 1e4] {
            assert_eq!(line_integral_pm(1.3, 1.3, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_nonpositive_arguments() {
        assert!(matches!(
            line_integral_pm(0.0, 1.0, 1.0),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            line_integral_pm(1.0, -1.0, 1.0),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            line_integral_pm(1.0, 1.0, f64::INFINITY),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let c = ReductionCheck::new(1.5, 2.0, 1e3).unwrap();
        assert!(c.quadrature_error() < 1e-9, "{c:?}");
        let c = ReductionCheck::new(0.5, 3.0, 1e4).unwrap();
        assert!(c.truncation_error() < 1e-6, "{c:?}");
    }

    #[test]
    fn offset_form_reduces_at_zero_height() {
        for (a, b) in [(0.5, 3.0), (2.0, 1.1), (1.0, 1.0)] {
            let x = offset_line_integral_pm(a, 0.0, b, 1e4).unwrap();
            let y = line_integral_pm(a, b, 1e4).unwrap();
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetric_pair_reduces() {
        let spec =
            RealExpansionSpec3::new(space(&[[0.3, 0.1, 0.2], [-0.3, -0.1, -0.2]]), vec![1.0, -1.0], vec![]).unwrap();
        let r = reduce_pm_r3(&spec, &ReductionOptions::default()).unwrap();
        assert!(r.report.defect < 1e-6, "{:?}", r.report);
        assert!(r.report.quadrature_defect.unwrap() < 1e-9);
        assert_eq!(r.spec2.masses, vec![1.0, -1.0]);
        // linearity of the defect
        let total: f64 = r.report.per_term.iter().sum();
        assert!(r.report.defect <= total + 1e-15);
    }

    #[test]
    fn zero_masses_reduce_exactly() {
        let spec = RealExpansionSpec3::new(space(&[[0.3, 0.1, 0.2]]), vec![0.0], vec![]).unwrap();
        let r = reduce_pm_r3(&spec, &ReductionOptions::default()).unwrap();
        assert_eq!(r.report.defect, 0.0);
    }

    #[test]
    fn imbalance_is_rejected() {
        let spec =
            RealExpansionSpec3::new(space(&[[0.3, 0.1, 0.2], [0.1, 0.5, 0.0]]), vec![1.0, -0.5], vec![]).unwrap();
        assert!(matches!(
            reduce_pm_r3(&spec, &ReductionOptions::default()),
            Err(Error::MassImbalance { .. })
        ));
    }

    #[test]
    fn axial_dipole_integrates_to_zero() {
        let spec = RealExpansionSpec3::new(space(&[[0.2, 0.1, 0.7]]), vec![], vec![[0.0, 0.0, 1.0]]).unwrap();
        let (extrapolated, raw) = axial_dipole_integral(&spec, [0.0, 0.0, 1.0], &ReductionOptions::default()).unwrap();
        assert!(extrapolated <= 1e-8 && raw <= 1e-7, "{extrapolated} {raw}");
        // the same dipole cannot be projected onto that plane
        let opts = ReductionOptions {
            axis: Some([0.0, 0.0, 1.0]),
            ..Default::default()
        };
        assert!(matches!(
            reduce_dipole_r3(&spec, &opts),
            Err(Error::ZeroProjection { index: 0 })
        ));
    }

    #[test]
    fn x_dipole_matches_gradient() {
        let spec = RealExpansionSpec3::new(space(&[[0.1, 0.05, 0.0]]), vec![], vec![[1.0, 0.0, 0.0]]).unwrap();
        let opts = ReductionOptions {
            axis: Some([0.0, 0.0, 1.0]),
            ..Default::default()
        };
        let r = reduce_dipole_r3(&spec, &opts).unwrap();
        assert!(r.report.defect < 1e-6, "{:?}", r.report);
        assert!(r.report.axial.unwrap() < 1e-8);
    }

    #[test]
    fn zero_dipoles_reduce_exactly() {
        let spec = RealExpansionSpec3::new(space(&[[0.1, 0.05, 0.3]]), vec![], vec![[0.0; 3]]).unwrap();
        let r = reduce_dipole_r3(&spec, &ReductionOptions::default()).unwrap();
        assert_eq!(r.report.defect, 0.0);
    }

    #[test]
    fn dipole_integral_matches_closed_form() {
        // in-plane dipole at height h: ∫ −(d·u)/(ρ² + (t−h)²)^{3/2} dt
        //   = −(d·u)/ρ² · [s/√(ρ²+s²)] over s ∈ [−L−h, L−h]
        let (xk, d) = ([0.2, -0.1, 0.4], [0.3, 0.8, 0.0]);
        let frame = Frame::from_axis([0.0, 0.0, 1.0]).unwrap();
        let p = [1.2, 1.6];
        let l = 50.0;
        let line = dipole_line(&frame, p, xk, d, l).unwrap();
        let closed = |c: [f64; 3]| {
            let u = [p[0] - c[0], p[1] - c[1]];
            let rho2 = u[0] * u[0] + u[1] * u[1];
            let prim = |s: f64| s / (rho2 * (rho2 + s * s).sqrt());
            -(d[0] * u[0] + d[1] * u[1]) * (prim(l - c[2]) - prim(-l - c[2]))
        };
        let expected = closed(xk) - closed([0.0; 3]);
        assert!(
            (line.total_raw - expected).abs() < 1e-11,
            "{} {expected}",
            line.total_raw
        );
    }

    proptest! {
        #[test]
        fn antisymmetric(a in 0.5f64..3.0, b in 0.5f64..3.0, l in 1.0f64..1e5) {
            let s = line_integral_pm(a, b, l).unwrap() + line_integral_pm(b, a, l).unwrap();
            prop_assert!(s.abs() < 1e-14);
        }

        #[test]
        fn tail_decays_quadratically(a in 0.5f64..3.0, b in 0.5f64..3.0, e in 1.5f64..4.0) {
            let l = 10f64.powf(e);
            let err = (line_integral_pm(a, b, l).unwrap() - 2.0 * (b / a).ln()).abs();
            prop_assert!(err <= 0.5 * (a * a + b * b) / (l * l) + 1e-14);
        }
    }
}
