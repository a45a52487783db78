//! Real point sources in R² and R³ and the coefficient maps tying R²
//! multipoles to complex poles.
//!
//! Gradients are taken with respect to the field point X. With that
//! convention a complex simple pole μ = α + iβ has real part equal to the
//! dipole D = (−α, −β), and poles of order n ≤ 3 map to the multipole pair
//! (A^(n), B^(n)) by the fixed invertible rules in [`pole_to_multipole`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_basis::{ComplexExpansionSpec, PoleTerm};
use crate::error::{Error, Result};
use crate::geometry::{AnyConfiguration, Configuration2, Configuration3, ConfigurationDocument};

/// Tolerance on Σ m_k when a zero total mass is required.
pub const MASS_BALANCE_TOLERANCE: f64 = 1e-12;

fn check_field2(x: [f64; 2]) -> Result<()> {
    let r = x[0].hypot(x[1]);
    if !(r >= 1.0 - crate::complex_basis::DOMAIN_SLACK) {
        return Err(Error::DomainViolation(format!("field point {x:?} has |X| = {r} < 1")));
    }
    Ok(())
}

fn check_source2(xk: [f64; 2]) -> Result<()> {
    let r = xk[0].hypot(xk[1]);
    if !(r < 1.0) {
        return Err(Error::DomainViolation(format!("source {xk:?} has |X_k| = {r} >= 1")));
    }
    Ok(())
}

fn check_field3(x: [f64; 3]) -> Result<()> {
    let r = crate::geometry::norm3(x);
    if !(r >= 1.0 - crate::complex_basis::DOMAIN_SLACK) {
        return Err(Error::DomainViolation(format!("field point {x:?} has |X| = {r} < 1")));
    }
    Ok(())
}

fn check_source3(xk: [f64; 3]) -> Result<()> {
    let r = crate::geometry::norm3(xk);
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::DomainViolation(format!(
            "source {xk:?} has |X_k| = {r} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Ψ_k(X) = ln(|X|/|X − X_k|), written as −½·ln(1 + (|X_k|² − 2X·X_k)/|X|²)
/// so that sources near the origin do not cancel.
pub fn psi_r2(x: [f64; 2], xk: [f64; 2]) -> Result<f64> {
    check_field2(x)?;
    check_source2(xk)?;
    Ok(psi_r2_raw(x, xk))
}

pub(crate) fn psi_r2_raw(x: [f64; 2], xk: [f64; 2]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let t = xk[0] * xk[0] + xk[1] * xk[1] - 2.0 * (x[0] * xk[0] + x[1] * xk[1]);
    -0.5 * (t / r2).ln_1p()
}

/// The pair (A^(n), B^(n)) at X for a source at X_k, n ∈ {1, 2, 3}.
/// With (dx, dy) = X − X_k and r² = dx² + dy²:
///   n = 1: (−dx/r², −dy/r²)
///   n = 2: ((dx² − dy²)/r⁴, 2dx·dy/r⁴)
///   n = 3: (2dx(3dy² − dx²)/r⁶, 2dy(3dx² − dy²)/r⁶)
pub fn multipole_r2(x: [f64; 2], xk: [f64; 2], n: u32) -> Result<(f64, f64)> {
    if !(1..=3).contains(&n) {
        return Err(Error::BadOrder(n as i64));
    }
    let (dx, dy) = (x[0] - xk[0], x[1] - xk[1]);
    let r2 = dx * dx + dy * dy;
    if r2 == 0.0 {
        return Err(Error::DomainViolation("field point coincides with the source".into()));
    }
    Ok(match n {
        1 => (-dx / r2, -dy / r2),
        2 => {
            let r4 = r2 * r2;
            ((dx * dx - dy * dy) / r4, 2.0 * dx * dy / r4)
        }
        _ => {
            let r6 = r2 * r2 * r2;
            (
                2.0 * dx * (3.0 * dy * dy - dx * dx) / r6,
                2.0 * dy * (3.0 * dx * dx - dy * dy) / r6,
            )
        }
    })
}

/// Complex pole strength μ = α + iβ of order n to multipole coefficients.
pub fn pole_to_multipole(mu: Complex64, n: u32) -> Result<(f64, f64)> {
    match n {
        1 => Ok((-mu.re, -mu.im)),
        2 => Ok((mu.re, mu.im)),
        3 => Ok((-mu.re / 2.0, mu.im / 2.0)),
        _ => Err(Error::BadOrder(n as i64)),
    }
}

/// Inverse of [`pole_to_multipole`].
pub fn multipole_to_pole(a: f64, b: f64, n: u32) -> Result<Complex64> {
    match n {
        1 => Ok(Complex64::new(-a, -b)),
        2 => Ok(Complex64::new(a, b)),
        3 => Ok(Complex64::new(-2.0 * a, 2.0 * b)),
        _ => Err(Error::BadOrder(n as i64)),
    }
}

/// Dipole D = (−α, −β) whose potential is Re{μ/(z − z_k)}.
pub fn dipole_from_pole(mu: Complex64) -> [f64; 2] {
    [-mu.re, -mu.im]
}

pub fn pole_from_dipole(d: [f64; 2]) -> Complex64 {
    Complex64::new(-d[0], -d[1])
}

/// One multipole term a·A^(n) + b·B^(n) at source `k` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleTerm {
    pub k: usize,
    pub n: u32,
    pub a: f64,
    pub b: f64,
}

/// Masses, dipoles and multipoles in the plane. Each strength list is
/// either empty or has one entry per source.
#[derive(Debug, Clone, PartialEq)]
pub struct RealExpansionSpec2 {
    pub sources: Configuration2,
    pub masses: Vec<f64>,
    pub dipoles: Vec<[f64; 2]>,
    pub multipoles: Vec<MultipoleTerm>,
}

/// Masses and dipoles in space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealExpansionSpec3 {
    pub sources: Configuration3,
    pub masses: Vec<f64>,
    pub dipoles: Vec<[f64; 3]>,
}

fn check_lengths(what: &str, got: usize, n: usize) -> Result<()> {
    if got != 0 && got != n {
        return Err(Error::InvalidParameter(format!("{got} {what} for {n} sources")));
    }
    Ok(())
}

impl RealExpansionSpec2 {
    pub fn new(
        sources: Configuration2,
        masses: Vec<f64>,
        dipoles: Vec<[f64; 2]>,
        multipoles: Vec<MultipoleTerm>,
    ) -> Result<Self> {
        let n = sources.len();
        check_lengths("masses", masses.len(), n)?;
        check_lengths("dipoles", dipoles.len(), n)?;
        for t in &multipoles {
            if !(1..=3).contains(&t.n) {
                return Err(Error::BadOrder(t.n as i64));
            }
            if t.k >= n {
                return Err(Error::InvalidParameter(format!(
                    "multipole refers to source {} of {n}",
                    t.k + 1
                )));
            }
        }
        let finite = masses.iter().all(|m| m.is_finite())
            && dipoles.iter().flatten().all(|d| d.is_finite())
            && multipoles.iter().all(|t| t.a.is_finite() && t.b.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            sources,
            masses,
            dipoles,
            multipoles,
        })
    }

    pub fn mass_sum(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// The complex expansion whose real part is this spec: masses become
    /// log strengths, dipoles simple poles and multipoles poles of order n.
    pub fn to_complex(&self) -> Result<ComplexExpansionSpec> {
        let log = self.masses.iter().map(|&m| Complex64::new(m, 0.0)).collect();
        let mut poles: Vec<PoleTerm> = self
            .dipoles
            .iter()
            .enumerate()
            .map(|(k, d)| PoleTerm {
                k,
                m: 1,
                strength: pole_from_dipole(*d),
            })
            .collect();
        for t in &self.multipoles {
            poles.push(PoleTerm {
                k: t.k,
                m: t.n,
                strength: multipole_to_pole(t.a, t.b, t.n)?,
            });
        }
        ComplexExpansionSpec::new(self.sources.clone(), log, poles)
    }
}

impl RealExpansionSpec3 {
    pub fn new(sources: Configuration3, masses: Vec<f64>, dipoles: Vec<[f64; 3]>) -> Result<Self> {
        let n = sources.len();
        check_lengths("masses", masses.len(), n)?;
        check_lengths("dipoles", dipoles.len(), n)?;
        if !masses.iter().all(|m| m.is_finite()) || !dipoles.iter().flatten().all(|d| d.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            sources,
            masses,
            dipoles,
        })
    }

    pub fn mass_sum(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Σ m_k Ψ_k + Σ D_k·∇ln(1/|X − X_k|) + Σ (a A^(n) + b B^(n)).
pub fn eval_expansion_r2(spec: &RealExpansionSpec2, x: [f64; 2]) -> Result<f64> {
    check_field2(x)?;
    let pts = spec.sources.points();
    let mut acc = 0.0;
    for (m, p) in spec.masses.iter().zip(pts) {
        acc += m * psi_r2([x[0], x[1]], [p.x, p.y])?;
    }
    for (d, p) in spec.dipoles.iter().zip(pts) {
        // ∇ ln(1/r) = (A^(1), B^(1))
        let (gx, gy) = multipole_r2(x, [p.x, p.y], 1)?;
        acc += d[0] * gx + d[1] * gy;
    }
    for t in &spec.multipoles {
        let p = pts[t.k];
        let (a, b) = multipole_r2(x, [p.x, p.y], t.n)?;
        acc += t.a * a + t.b * b;
    }
    Ok(acc)
}

/// m/|X − X_k|.
pub fn pm_r3(x: [f64; 3], xk: [f64; 3], m: f64) -> Result<f64> {
    check_field3(x)?;
    check_source3(xk)?;
    Ok(pm_r3_raw(x, xk, m))
}

pub(crate) fn pm_r3_raw(x: [f64; 3], xk: [f64; 3], m: f64) -> f64 {
    let d = [x[0] - xk[0], x[1] - xk[1], x[2] - xk[2]];
    m / crate::geometry::norm3(d)
}

/// D·∇_X |X − X_k|^{−1} = −D·(X − X_k)/|X − X_k|³.
pub fn dipole_r3(x: [f64; 3], xk: [f64; 3], d: [f64; 3]) -> Result<f64> {
    check_field3(x)?;
    check_source3(xk)?;
    Ok(dipole_r3_raw(x, xk, d))
}

pub(crate) fn dipole_r3_raw(x: [f64; 3], xk: [f64; 3], d: [f64; 3]) -> f64 {
    let v = [x[0] - xk[0], x[1] - xk[1], x[2] - xk[2]];
    let r = crate::geometry::norm3(v);
    -crate::geometry::dot3(d, v) / (r * r * r)
}

/// Σ m_k/|X − X_k| + Σ D_k·∇|X − X_k|^{−1}.
pub fn eval_expansion_r3(spec: &RealExpansionSpec3, x: [f64; 3]) -> Result<f64> {
    check_field3(x)?;
    let pts = spec.sources.points();
    let mut acc = 0.0;
    for (m, p) in spec.masses.iter().zip(pts) {
        acc += pm_r3(x, p.to_array(), *m)?;
    }
    for (d, p) in spec.dipoles.iter().zip(pts) {
        acc += dipole_r3(x, p.to_array(), *d)?;
    }
    Ok(acc)
}

/// JSON multipole entry with a 1-based source index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleDocument {
    pub k: usize,
    pub n: u32,
    pub a: f64,
    pub b: f64,
}

/// `{"sources": …, "masses": […], "dipoles": [[…],…], "multipoles": [{"k","n","a","b"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSpecDocument {
    pub sources: ConfigurationDocument,
    #[serde(default)]
    pub masses: Vec<f64>,
    #[serde(default)]
    pub dipoles: Vec<Vec<f64>>,
    #[serde(default)]
    pub multipoles: Vec<MultipoleDocument>,
}

/// A real spec of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyRealSpec {
    Plane(RealExpansionSpec2),
    Space(RealExpansionSpec3),
}

impl RealSpecDocument {
    pub fn to_spec(&self) -> Result<AnyRealSpec> {
        let dim = self.sources.dim;
        for (i, d) in self.dipoles.iter().enumerate() {
            if d.len() != dim {
                return Err(Error::Parse(format!(
                    "dipole {i} has {} components, expected {dim}",
                    d.len()
                )));
            }
        }
        match self.sources.validate()? {
            AnyConfiguration::Plane(c) => {
                let multipoles = self
                    .multipoles
                    .iter()
                    .map(|t| {
                        if t.k == 0 {
                            return Err(Error::Parse("multipole index k is 1-based".into()));
                        }
                        Ok(MultipoleTerm {
                            k: t.k - 1,
                            n: t.n,
                            a: t.a,
                            b: t.b,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                RealExpansionSpec2::new(
                    c,
                    self.masses.clone(),
                    self.dipoles.iter().map(|d| [d[0], d[1]]).collect(),
                    multipoles,
                )
                .map(AnyRealSpec::Plane)
            }
            AnyConfiguration::Space(c) => {
                if !self.multipoles.is_empty() {
                    return Err(Error::Parse("multipoles are only supported in the plane".into()));
                }
                RealExpansionSpec3::new(
                    c,
                    self.masses.clone(),
                    self.dipoles.iter().map(|d| [d[0], d[1], d[2]]).collect(),
                )
                .map(AnyRealSpec::Space)
            }
        }
    }

    pub fn from_plane(spec: &RealExpansionSpec2) -> Self {
        Self {
            sources: ConfigurationDocument::from(&spec.sources),
            masses: spec.masses.clone(),
            dipoles: spec.dipoles.iter().map(|d| d.to_vec()).collect(),
            multipoles: spec
                .multipoles
                .iter()
                .map(|t| MultipoleDocument {
                    k: t.k + 1,
                    n: t.n,
                    a: t.a,
                    b: t.b,
                })
                .collect(),
        }
    }

    pub fn from_space(spec: &RealExpansionSpec3) -> Self {
        Self {
            sources: ConfigurationDocument::from(&spec.sources),
            masses: spec.masses.clone(),
            dipoles: spec.dipoles.iter().map(|d| d.to_vec()).collect(),
            multipoles: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_basis::{eval_expansion, pole, psi};
    use crate::geometry::{validate_configuration, SourcePoint2, SourcePoint3};
    use proptest::prelude::*;

    fn plane(points: &[[f64; 2]]) -> Configuration2 {
        validate_configuration(
            points.iter().map(|p| SourcePoint2::new(p[0], p[1])).collect(),
            0.05,
            0.95,
            1e-3,
        )
        .unwrap()
    }

    #[test]
    fn psi_r2_examples() {
        assert!(psi_r2([2.0, 0.0], [1e-15, 0.0]).unwrap().abs() < 1e-15);
        let v = psi_r2([2.0, 0.0], [0.5, 0.0]).unwrap();
        assert!((v - (2.0f64 / 1.5).ln()).abs() < 1e-15);
        assert!((v - 0.287_682_072_451_780_9).abs() < 1e-15);
        assert!(psi_r2([0.5, 0.0], [0.1, 0.0]).is_err());
    }

    #[test]
    fn multipole_examples() {
        assert_eq!(multipole_r2([1.5, 0.2], [0.5, 0.2], 2).unwrap(), (1.0, 0.0));
        let (a, b) = multipole_r2([1.5, 1.2], [0.5, 0.2], 2).unwrap();
        assert!(a.abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert_eq!(multipole_r2([2.0, 0.0], [0.5, 0.0], 4), Err(Error::BadOrder(4)));
        assert_eq!(multipole_r2([2.0, 0.0], [0.5, 0.0], 0), Err(Error::BadOrder(0)));
    }

    #[test]
    fn first_order_is_gradient_of_log() {
        let (x, xk) = ([1.3, -0.7], [0.2, 0.4]);
        let f = |p: [f64; 2]| -((p[0] - xk[0]).hypot(p[1] - xk[1])).ln();
        let h = 1e-6;
        let gx = (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h);
        let gy = (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h);
        let (a, b) = multipole_r2(x, xk, 1).unwrap();
        assert!((a - gx).abs() < 1e-6 && (b - gy).abs() < 1e-6);
    }

    #[test]
    fn pole_to_multipole_examples() {
        for n in 1..=3 {
            assert_eq!(pole_to_multipole(Complex64::new(0.0, 0.0), n).unwrap().0.abs(), 0.0);
        }
        assert_eq!(pole_to_multipole(Complex64::new(1.0, 2.0), 2).unwrap(), (1.0, 2.0));
        assert_eq!(pole_to_multipole(Complex64::new(1.0, 0.0), 3).unwrap(), (-0.5, 0.0));
        assert_eq!(pole_to_multipole(Complex64::new(1.0, 0.0), 4), Err(Error::BadOrder(4)));
    }

    #[test]
    fn third_order_pointwise() {
        // Re{1/(z − z_k)³} = −½ A^(3)
        let zk = Complex64::new(0.3, -0.4);
        for i in 0..100 {
            let z = Complex64::from_polar(1.0 + 0.05 * i as f64, 0.37 * i as f64);
            let lhs = pole(z, zk, 3).unwrap().re;
            let (a, _) = multipole_r2([z.re, z.im], [zk.re, zk.im], 3).unwrap();
            assert!((lhs + 0.5 * a).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn mass_pair_term_by_term() {
        let spec = RealExpansionSpec2::new(plane(&[[0.3, 0.0], [-0.3, 0.0]]), vec![1.0, -1.0], vec![], vec![]).unwrap();
        let v = eval_expansion_r2(&spec, [2.0, 0.0]).unwrap();
        let oracle = (2.0f64 / 1.7).ln() - (2.0f64 / 2.3).ln();
        assert!((v - oracle).abs() < 1e-15);
        let zero = RealExpansionSpec2::new(plane(&[[0.3, 0.0]]), vec![0.0], vec![[0.0, 0.0]], vec![]).unwrap();
        assert_eq!(eval_expansion_r2(&zero, [1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn dipole_matches_complex_pole() {
        let sources = plane(&[[0.3, 0.1], [-0.2, 0.5], [0.0, -0.7]]);
        let mu = [
            Complex64::new(1.0, -0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.7, 0.9),
        ];
        let complex = ComplexExpansionSpec::simple_poles(sources.clone(), &mu).unwrap();
        let dipoles = mu.iter().map(|m| dipole_from_pole(*m)).collect();
        let real = RealExpansionSpec2::new(sources, vec![], dipoles, vec![]).unwrap();
        for i in 0..50 {
            let z = Complex64::from_polar(1.0 + 0.1 * i as f64, 0.7 * i as f64);
            let a = eval_expansion(&complex, z).unwrap().re;
            let b = eval_expansion_r2(&real, [z.re, z.im]).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn r3_examples() {
        assert_eq!(pm_r3([2.0, 0.0, 0.0], [0.5, 0.0, 0.0], 0.0).unwrap(), 0.0);
        assert!((pm_r3([2.0, 0.0, 0.0], [0.5, 0.0, 0.0], 1.0).unwrap() - 1.0 / 1.5).abs() < 1e-15);
        let x = [1.2, -0.4, 0.9];
        let xk = [0.1, 0.3, -0.2];
        assert_eq!(pm_r3(x, xk, 2.0).unwrap(), 2.0 * pm_r3(x, xk, 1.0).unwrap());
        assert_eq!(dipole_r3(x, xk, [0.0; 3]).unwrap(), 0.0);
        let v = dipole_r3([2.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]).unwrap();
        assert!((v + 1.0 / 2.25).abs() < 1e-15);
        // finite difference of 1/|X − X_k| along D
        let d = [0.3, -0.8, 0.5];
        let h = 1e-6;
        let shift = |s: f64| [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]];
        let fd = (pm_r3(shift(h), xk, 1.0).unwrap() - pm_r3(shift(-h), xk, 1.0).unwrap()) / (2.0 * h);
        assert!((fd - dipole_r3(x, xk, d).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn r3_spec_sums_terms() {
        let config = validate_configuration(
            vec![SourcePoint3::new(0.1, 0.2, 0.3), SourcePoint3::new(-0.4, 0.1, 0.2)],
            0.05,
            0.95,
            1e-3,
        )
        .unwrap();
        let spec = RealExpansionSpec3::new(config, vec![1.0, -1.0], vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let x = [1.5, 0.0, 0.5];
        let oracle = pm_r3(x, [0.1, 0.2, 0.3], 1.0).unwrap() - pm_r3(x, [-0.4, 0.1, 0.2], 1.0).unwrap()
            + dipole_r3(x, [0.1, 0.2, 0.3], [0.0, 0.0, 1.0]).unwrap()
            + dipole_r3(x, [-0.4, 0.1, 0.2], [1.0, 0.0, 0.0]).unwrap();
        assert!((eval_expansion_r3(&spec, x).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn index_relations() {
        // swapping the offset components flips the sign of A^(2)
        let (a1, _) = multipole_r2([1.7, 0.4], [0.0, 0.0], 2).unwrap();
        let (a2, _) = multipole_r2([0.4, 1.7], [0.0, 0.0], 2).unwrap();
        assert!((a1 + a2).abs() < 1e-16);
        // second derivatives of ln(1/r): M22 = −M11
        let f = |x: f64, y: f64| -(x.hypot(y)).ln();
        let (x, y, h) = (1.3, 0.6, 1e-4);
        let m11 = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let m22 = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
        assert!((m11 + m22).abs() < 1e-6);
    }

    #[test]
    fn document_round_trip() {
        let json = r#"{"sources":{"dim":2,"points":[[0.5,0.0],[0.0,-0.3]]},
            "masses":[1.0,-1.0],"dipoles":[[0.1,0.2],[0.0,1.0]],"multipoles":[{"k":1,"n":3,"a":0.5,"b":-1.0}]}"#;
        let doc: RealSpecDocument = serde_json::from_str(json).unwrap();
        let AnyRealSpec::Plane(spec) = doc.to_spec().unwrap() else {
            panic!()
        };
        assert_eq!(RealSpecDocument::from_plane(&spec), doc);
        let bad = r#"{"sources":{"dim":3,"points":[[0.5,0.0,0.1]]},"dipoles":[[1.0,0.0]]}"#;
        let doc: RealSpecDocument = serde_json::from_str(bad).unwrap();
        assert!(matches!(doc.to_spec(), Err(Error::Parse(_))));
    }

    fn laplacian2(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
        (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
    }

    proptest! {
        #[test]
        fn correspondence_holds(
            n in 1u32..=3, re in -2.0f64..2.0, im in -2.0f64..2.0,
            r in 0.05f64..0.95, t in 0.0f64..6.3, zr in 1.0f64..3.0, zt in 0.0f64..6.3,
        ) {
            let mu = Complex64::new(re, im);
            let zk = Complex64::from_polar(r, t);
            let z = Complex64::from_polar(zr, zt);
            let lhs = (mu * pole(z, zk, n).unwrap()).re;
            let (a, b) = pole_to_multipole(mu, n).unwrap();
            let (ab, bb) = multipole_r2([z.re, z.im], [zk.re, zk.im], n).unwrap();
            let scale = mu.norm() * (z - zk).norm().powi(-(n as i32));
            prop_assert!((lhs - (a * ab + b * bb)).abs() <= 1e-12 * scale.max(1e-300));
            let back = multipole_to_pole(a, b, n).unwrap();
            prop_assert!((back - mu).norm() <= 1e-15 * mu.norm());
        }

        #[test]
        fn psi_r2_is_real_part_of_psi(r in 0.0f64..0.99, t in 0.0f64..6.3, zr in 1.0f64..10.0, zt in 0.0f64..6.3) {
            let zk = Complex64::from_polar(r, t);
            let z = Complex64::from_polar(zr, zt);
            let a = psi_r2([z.re, z.im], [zk.re, zk.im]).unwrap();
            let b = psi(z, zk).unwrap().re;
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-3));
        }

        #[test]
        fn basis_is_harmonic(r in 0.05f64..0.95, t in 0.0f64..6.3, zr in 1.0f64..3.0, zt in 0.0f64..6.3, n in 1u32..=3) {
            let xk = [r * t.cos(), r * t.sin()];
            let (x, y) = (zr * zt.cos(), zr * zt.sin());
            let h = 1e-4;
            let dist = (x - xk[0]).hypot(y - xk[1]);
            // O(h²) truncation with the (n+4)!/n! growth of fourth derivatives, plus
            // rounding of order eps/h² in the second differences
            let growth = ((n + 1) * (n + 2) * (n + 3) * (n + 4)) as f64;
            let scale = growth * dist.powi(-(n as i32) - 4) * h * h + 1e-16 / (h * h) * dist.powi(-(n as i32));
            let la = laplacian2(|x, y| multipole_r2([x, y], xk, n).unwrap().0, x, y, h);
            let lb = laplacian2(|x, y| multipole_r2([x, y], xk, n).unwrap().1, x, y, h);
            let lp = laplacian2(|x, y| psi_r2_raw([x, y], xk), x, y, h);
            prop_assert!(la.abs() <= 100.0 * scale, "{} {}", la, scale);
            prop_assert!(lb.abs() <= 100.0 * scale);
            prop_assert!(lp.abs() <= 100.0 * (dist.powi(-4) * h * h + 1e-16 / (h * h)));
        }
    }
}
