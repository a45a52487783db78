//! Numerical uniqueness checks: σ_min of the square moment system, σ_min of
//! the Gram matrix of sampled basis functions, and least-squares recovery of
//! known strengths from exterior field values.
//!
//! Finite precision can only exhibit near-dependence, never prove
//! dependence, so a verdict is either independent or flagged.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex_basis::{eval_expansion, pole, psi, ComplexExpansionSpec, PoleTerm};
use crate::error::{Error, Result};
use crate::geometry::{AnyConfiguration, Configuration2, Configuration3};
use crate::linalg::{least_squares, summarize, CMat, SvdSummary, SINGULAR_RELATIVE};
use crate::real_basis::{
    dipole_r3_raw, eval_expansion_r2, eval_expansion_r3, multipole_r2, pm_r3_raw, psi_r2_raw, MultipoleTerm,
    RealExpansionSpec2, RealExpansionSpec3,
};
use crate::sampling::{
    random_configuration2, random_configuration3, random_reals, random_strengths, trial_rng, Sampler,
};
use crate::structured::{
    c_matrix, log_moment_matrix, log_pole_block, mixed_block_system, pole_moment_block, BlockKind, MomentMatrix,
    DEFAULT_MAX_DOUBLE_NODES,
};

/// Absolute recovery tolerance for O(1) strengths.
pub const RECOVERY_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SAMPLE_RADIUS: f64 = 2.0;

/// A family of basis functions, one or more per source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// ψ_k in the complex plane.
    Log,
    /// 1/(z − z_k)^m.
    Pole(u32),
    /// Simple and second-order poles together.
    Mixed12,
    /// ψ_k and simple poles together.
    LogPole,
    /// Ψ_k in R².
    Mass2,
    /// ∇ln(1/|X − X_k|) in R², two per source.
    Dipole2,
    /// (A^(n), B^(n)) in R².
    Multipole2(u32),
    /// 1/|X − X_k| in R³.
    Mass3,
    /// ∇|X − X_k|⁻¹ in R³, three per source.
    Dipole3,
}

impl BasisKind {
    pub fn dim(self) -> usize {
        match self {
            BasisKind::Mass3 | BasisKind::Dipole3 => 3,
            _ => 2,
        }
    }

    pub fn per_source(self) -> usize {
        match self {
            BasisKind::Log | BasisKind::Pole(_) | BasisKind::Mass2 | BasisKind::Mass3 => 1,
            BasisKind::Dipole3 => 3,
            _ => 2,
        }
    }

    /// Whether strengths are complex (otherwise real).
    pub fn complex(self) -> bool {
        matches!(
            self,
            BasisKind::Log | BasisKind::Pole(_) | BasisKind::Mixed12 | BasisKind::LogPole
        )
    }

    /// Kinds whose uniqueness is a theorem; the open mixed cases are only
    /// reported, never asserted.
    pub fn theorem_backed(self) -> bool {
        !matches!(self, BasisKind::Mixed12 | BasisKind::LogPole)
    }

    fn check(self) -> Result<Self> {
        match self {
            BasisKind::Pole(0) => Err(Error::BadOrder(0)),
            BasisKind::Multipole2(n) if !(1..=3).contains(&n) => Err(Error::BadOrder(n as i64)),
            k => Ok(k),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Log => f.write_str("log"),
            BasisKind::Pole(m) => write!(f, "pole{m}"),
            BasisKind::Mixed12 => f.write_str("mixed12"),
            BasisKind::LogPole => f.write_str("log-pole"),
            BasisKind::Mass2 => f.write_str("mass2"),
            BasisKind::Dipole2 => f.write_str("dipole2"),
            BasisKind::Multipole2(n) => write!(f, "multipole{n}"),
            BasisKind::Mass3 => f.write_str("mass3"),
            BasisKind::Dipole3 => f.write_str("dipole3"),
        }
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "log" => BasisKind::Log,
            "mixed12" => BasisKind::Mixed12,
            "log-pole" => BasisKind::LogPole,
            "mass2" => BasisKind::Mass2,
            "dipole2" => BasisKind::Dipole2,
            "mass3" => BasisKind::Mass3,
            "dipole3" => BasisKind::Dipole3,
            _ => {
                let order = |rest: &str| {
                    rest.trim_start_matches('-')
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("unknown kind `{s}`")))
                };
                if let Some(rest) = s.strip_prefix("multipole") {
                    BasisKind::Multipole2(order(rest)?)
                } else if let Some(rest) = s.strip_prefix("pole") {
                    BasisKind::Pole(order(rest)?)
                } else {
                    return Err(Error::Parse(format!("unknown kind `{s}`")));
                }
            }
        };
        kind.check()
    }
}

impl Serialize for BasisKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The square moment system of a planar kind. Real R² kinds use the system
/// of their complex counterpart: masses are real log strengths, dipoles and
/// multipoles real-linear images of pole strengths.
pub fn moment_system(nodes: &[Complex64], kind: BasisKind) -> Result<MomentMatrix> {
    if nodes.len() > DEFAULT_MAX_DOUBLE_NODES {
        return Err(Error::TooManyNodes {
            n_k: nodes.len(),
            max: DEFAULT_MAX_DOUBLE_NODES,
        });
    }
    match kind.check()? {
        BasisKind::Log | BasisKind::Mass2 => log_moment_matrix(nodes),
        BasisKind::Pole(m) | BasisKind::Multipole2(m) => pole_moment_block(nodes, m),
        BasisKind::Dipole2 => pole_moment_block(nodes, 1),
        BasisKind::Mixed12 => mixed_block_system(nodes, &[BlockKind::Pole(1), BlockKind::Pole(2)], 2 * nodes.len()),
        BasisKind::LogPole => log_pole_block(nodes),
        BasisKind::Mass3 | BasisKind::Dipole3 => {
            Err(Error::InvalidParameter(format!("{kind} has no planar moment system")))
        }
    }
}

pub fn moment_rank_test(config: &Configuration2, kind: BasisKind) -> Result<SvdSummary> {
    moment_system(&config.nodes(), kind)?.svd()
}

/// Equispaced points on the circle of the given radius, half a step off the
/// real axis.
pub fn circle_samples(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * (j as f64 + 0.5) / n as f64))
        .collect()
}

/// Fibonacci points on the sphere of the given radius.
pub fn sphere_samples(radius: f64, n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|j| {
            let z = 1.0 - (2.0 * j as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * j as f64;
            [radius * s * phi.cos(), radius * s * phi.sin(), radius * z]
        })
        .collect()
}

fn dim_mismatch(kind: BasisKind) -> Error {
    Error::InvalidParameter(format!("kind {kind} needs a {}-dimensional configuration", kind.dim()))
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 1.0 && radius.is_finite()) {
        return Err(Error::DomainViolation(format!(
            "sample radius must exceed 1, got {radius}"
        )));
    }
    Ok(())
}

/// Sample points of a kind's dimension.
enum Samples {
    Plane(Vec<Complex64>),
    Space(Vec<[f64; 3]>),
}

impl Samples {
    fn new(kind: BasisKind, radius: f64, n: usize) -> Self {
        if kind.dim() == 3 {
            Samples::Space(sphere_samples(radius, n))
        } else {
            Samples::Plane(circle_samples(radius, n))
        }
    }
}

/// Design matrix: entry (j, c) is basis function c at sample j. Built from
/// the basis functions directly, not through the expansion evaluators.
fn design(config: &AnyConfiguration, kind: BasisKind, samples: &Samples) -> Result<CMat<f64>> {
    let re = |v: f64| Complex64::new(v, 0.0);
    match (config, samples) {
        (AnyConfiguration::Plane(cfg), Samples::Plane(zs)) if kind.dim() == 2 => {
            let nodes = cfg.nodes();
            let n = nodes.len();
            let mut a = CMat::<f64>::zeros(zs.len(), n * kind.per_source());
            for (j, &z) in zs.iter().enumerate() {
                let x = [z.re, z.im];
                for (k, &zk) in nodes.iter().enumerate() {
                    let xk = [zk.re, zk.im];
                    match kind {
                        BasisKind::Log => a[(j, k)] = psi(z, zk)?,
                        BasisKind::Pole(m) => a[(j, k)] = pole(z, zk, m)?,
                        BasisKind::Mixed12 => {
                            a[(j, k)] = pole(z, zk, 1)?;
                            a[(j, n + k)] = pole(z, zk, 2)?;
                        }
                        BasisKind::LogPole => {
                            a[(j, k)] = psi(z, zk)?;
                            a[(j, n + k)] = pole(z, zk, 1)?;
                        }
                        BasisKind::Mass2 => a[(j, k)] = re(psi_r2_raw(x, xk)),
                        BasisKind::Dipole2 | BasisKind::Multipole2(_) => {
                            let order = if let BasisKind::Multipole2(o) = kind { o } else { 1 };
                            let (p, q) = multipole_r2(x, xk, order)?;
                            a[(j, 2 * k)] = re(p);
                            a[(j, 2 * k + 1)] = re(q);
                        }
                        BasisKind::Mass3 | BasisKind::Dipole3 => unreachable!("guarded by dim"),
                    }
                }
            }
            Ok(a)
        }
        (AnyConfiguration::Space(cfg), Samples::Space(xs)) if kind.dim() == 3 => {
            let n = cfg.len();
            let mut a = CMat::<f64>::zeros(xs.len(), n * kind.per_source());
            for (j, x) in xs.iter().enumerate() {
                for (k, p) in cfg.points().iter().enumerate() {
                    let xk = p.to_array();
                    if kind == BasisKind::Mass3 {
                        a[(j, k)] = re(pm_r3_raw(*x, xk, 1.0));
                    } else {
                        for c in 0..3 {
                            let mut d = [0.0; 3];
                            d[c] = 1.0;
                            a[(j, 3 * k + c)] = re(dipole_r3_raw(*x, xk, d));
                        }
                    }
                }
            }
            Ok(a)
        }
        _ => Err(dim_mismatch(kind)),
    }
}

fn basis_count(config: &AnyConfiguration, kind: BasisKind) -> usize {
    config.len() * kind.per_source()
}

/// Singular values of the sampled Gram matrix AᴴA, which are the squares of
/// those of the design matrix A (taken from A to avoid squaring its
/// condition number).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramTest {
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl GramTest {
    pub fn relative(&self) -> f64 {
        if self.sigma_max > 0.0 {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }

    /// σ_min(Gram) ≤ (1e-10)²·σ_max(Gram), i.e. the design matrix itself is
    /// singular at the same relative threshold as the moment system.
    pub fn numerically_singular(&self) -> bool {
        self.sigma_min <= SINGULAR_RELATIVE * SINGULAR_RELATIVE * self.sigma_max
    }
}

pub fn sampled_gram_test(
    config: &AnyConfiguration,
    kind: BasisKind,
    n_samples: usize,
    radius: f64,
) -> Result<GramTest> {
    kind.check()?;
    check_radius(radius)?;
    let needed = 2 * basis_count(config, kind);
    if n_samples < needed {
        return Err(Error::InsufficientSamples { needed, got: n_samples });
    }
    let a = design(config, kind, &Samples::new(kind, radius, n_samples))?;
    let s = summarize(&a)?;
    Ok(GramTest {
        sigma_min: s.sigma_min * s.sigma_min,
        sigma_max: s.sigma_max * s.sigma_max,
    })
}

/// Field values of the expansion with the given strengths, through the
/// library evaluators. Layout of `coefficients` per kind: one block of N_k
/// per complex family (log/pole1 first); (x, y) or (x, y, z) pairs per
/// source for real vector kinds. Real kinds read only real parts.
pub fn expansion_values(
    config: &AnyConfiguration,
    kind: BasisKind,
    coefficients: &[Complex64],
    radius: f64,
    n_samples: usize,
) -> Result<Vec<Complex64>> {
    let count = basis_count(config, kind);
    if coefficients.len() != count {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients for {count} basis functions",
            coefficients.len()
        )));
    }
    let c = coefficients;
    let r: Vec<f64> = c.iter().map(|v| v.re).collect();
    match (config, Samples::new(kind, radius, n_samples)) {
        (AnyConfiguration::Plane(cfg), Samples::Plane(zs)) if kind.dim() == 2 => {
            let n = cfg.len();
            let poles = |m: u32, s: &[Complex64]| -> Vec<PoleTerm> {
                s.iter()
                    .enumerate()
                    .map(|(k, &strength)| PoleTerm { k, m, strength })
                    .collect()
            };
            let complex = |logs: Vec<Complex64>, terms: Vec<PoleTerm>| -> Result<Vec<Complex64>> {
                let spec = ComplexExpansionSpec::new(cfg.clone(), logs, terms)?;
                zs.iter().map(|z| eval_expansion(&spec, *z)).collect()
            };
            let real = |spec: RealExpansionSpec2| -> Result<Vec<Complex64>> {
                zs.iter()
                    .map(|z| eval_expansion_r2(&spec, [z.re, z.im]).map(|v| Complex64::new(v, 0.0)))
                    .collect()
            };
            let pairs = |v: &[f64]| -> Vec<[f64; 2]> { v.chunks(2).map(|p| [p[0], p[1]]).collect() };
            match kind {
                BasisKind::Log => complex(c.to_vec(), vec![]),
                BasisKind::Pole(m) => complex(vec![], poles(m, c)),
                BasisKind::Mixed12 => {
                    let mut terms = poles(1, &c[..n]);
                    terms.extend(poles(2, &c[n..]));
                    complex(vec![], terms)
                }
                BasisKind::LogPole => complex(c[..n].to_vec(), poles(1, &c[n..])),
                BasisKind::Mass2 => real(RealExpansionSpec2::new(cfg.clone(), r, vec![], vec![])?),
                BasisKind::Dipole2 => real(RealExpansionSpec2::new(cfg.clone(), vec![], pairs(&r), vec![])?),
                BasisKind::Multipole2(order) => {
                    let terms = pairs(&r)
                        .into_iter()
                        .enumerate()
                        .map(|(k, [a, b])| MultipoleTerm { k, n: order, a, b })
                        .collect();
                    real(RealExpansionSpec2::new(cfg.clone(), vec![], vec![], terms)?)
                }
                BasisKind::Mass3 | BasisKind::Dipole3 => unreachable!("guarded by dim"),
            }
        }
        (AnyConfiguration::Space(cfg), Samples::Space(xs)) if kind.dim() == 3 => {
            let spec = if kind == BasisKind::Mass3 {
                RealExpansionSpec3::new(cfg.clone(), r, vec![])?
            } else {
                let d = r.chunks(3).map(|p| [p[0], p[1], p[2]]).collect();
                RealExpansionSpec3::new(cfg.clone(), vec![], d)?
            };
            xs.iter()
                .map(|x| eval_expansion_r3(&spec, *x).map(|v| Complex64::new(v, 0.0)))
                .collect()
        }
        _ => Err(dim_mismatch(kind)),
    }
}

/// Outcome of a least-squares recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub recovered: Vec<Complex64>,
    pub max_error: f64,
    /// Condition number of the design matrix.
    pub cond: f64,
    /// The design matrix is singular at the 1e-10 relative threshold, so
    /// the fitted strengths are not meaningful.
    pub rank_deficient: bool,
}

/// Fits the kind's basis to sampled values of the expansion with the given
/// strengths (plus optional Gaussian noise of standard deviation `noise`)
/// and compares the fitted strengths with the originals.
pub fn recover_coefficients<R: Rng>(
    config: &AnyConfiguration,
    kind: BasisKind,
    coefficients: &[Complex64],
    n_samples: usize,
    radius: f64,
    noise: f64,
    rng: &mut R,
) -> Result<Recovery> {
    kind.check()?;
    check_radius(radius)?;
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise must be finite and non-negative, got {noise}"
        )));
    }
    let needed = basis_count(config, kind);
    if n_samples < needed {
        return Err(Error::InsufficientSamples { needed, got: n_samples });
    }
    let mut values = expansion_values(config, kind, coefficients, radius, n_samples)?;
    if noise > 0.0 {
        use rand_distr::StandardNormal;
        for v in values.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if kind.complex() {
                rng.sample(StandardNormal)
            } else {
                0.0
            };
            *v += Complex64::new(re, im) * noise;
        }
    }
    let a = design(config, kind, &Samples::new(kind, radius, n_samples))?;
    let summary = summarize(&a)?;
    let x = least_squares(&a, &DVector::from_vec(values))?;
    let recovered: Vec<Complex64> = x
        .iter()
        .map(|v| if kind.complex() { *v } else { Complex64::new(v.re, 0.0) })
        .collect();
    let max_error = recovered
        .iter()
        .zip(coefficients)
        .map(|(r, c)| {
            let c = if kind.complex() { *c } else { Complex64::new(c.re, 0.0) };
            (r - c).norm()
        })
        .fold(0.0, f64::max);
    Ok(Recovery {
        recovered,
        max_error,
        cond: summary.cond,
        rank_deficient: summary.numerically_singular(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Independent,
    Flagged,
}

/// One verdict line. `seed` and `trial` regenerate the configuration and
/// strengths through [`trial_rng`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub kind: BasisKind,
    pub n_k: usize,
    pub seed: u64,
    pub trial: u64,
    /// None for spatial kinds, which have no planar moment system.
    pub sigma_min_moment: Option<f64>,
    pub relative_moment: Option<f64>,
    pub sigma_min_gram: f64,
    /// σ_min/σ_max of the design matrix (the square root of the Gram ratio).
    pub relative_gram: f64,
    pub recovered_error: f64,
    /// σ_min(C) alongside the open mixed kinds.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma_min_c: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Sample count; `None` uses max(64, 4·basis count).
    pub n_samples: Option<usize>,
    pub radius: f64,
    pub sampler: Sampler,
    /// Relative σ_min at or below which the moment system and the design
    /// matrix count as singular.
    pub singular_relative: f64,
    pub recovery_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_samples: None,
            radius: DEFAULT_SAMPLE_RADIUS,
            sampler: Sampler::Annulus,
            singular_relative: SINGULAR_RELATIVE,
            recovery_tolerance: RECOVERY_TOLERANCE,
        }
    }
}

/// Runs all three checks on one configuration with the given strengths.
pub fn assess<R: Rng>(
    config: &AnyConfiguration,
    kind: BasisKind,
    coefficients: &[Complex64],
    options: &VerifyOptions,
    rng: &mut R,
) -> Result<IndependenceVerdict> {
    let count = basis_count(config, kind);
    let n_samples = options.n_samples.unwrap_or((4 * count).max(64));
    let moment = match config {
        AnyConfiguration::Plane(cfg) => Some(moment_rank_test(cfg, kind)?),
        AnyConfiguration::Space(_) => None,
    };
    let gram = sampled_gram_test(config, kind, n_samples, options.radius)?;
    let recovery = recover_coefficients(config, kind, coefficients, n_samples, options.radius, 0.0, rng)?;
    let sigma_min_c = match (config, kind) {
        (AnyConfiguration::Plane(cfg), BasisKind::Mixed12 | BasisKind::LogPole) => {
            Some(c_matrix(&cfg.nodes())?.sigma_min)
        }
        _ => None,
    };
    let scale = coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let tol = options.singular_relative;
    let independent = moment.map_or(true, |m| m.relative_sigma_min() > tol)
        && gram.relative().sqrt() > tol
        && recovery.max_error < options.recovery_tolerance * scale;
    Ok(IndependenceVerdict {
        kind,
        n_k: config.len(),
        seed: 0,
        trial: 0,
        sigma_min_moment: moment.map(|m| m.sigma_min),
        relative_moment: moment.map(|m| m.relative_sigma_min()),
        sigma_min_gram: gram.sigma_min,
        relative_gram: gram.relative().sqrt(),
        recovered_error: recovery.max_error,
        sigma_min_c,
        verdict: if independent {
            Verdict::Independent
        } else {
            Verdict::Flagged
        },
    })
}

pub fn random_configuration<R: Rng>(
    rng: &mut R,
    kind: BasisKind,
    n_k: usize,
    sampler: Sampler,
) -> Result<AnyConfiguration> {
    if kind.dim() == 3 {
        Ok(AnyConfiguration::Space(random_configuration3(rng, n_k)?))
    } else {
        Ok(AnyConfiguration::Plane(random_configuration2(rng, n_k, sampler)?))
    }
}

/// Random strengths in the layout of [`expansion_values`].
pub fn random_coefficients<R: Rng>(rng: &mut R, kind: BasisKind, n_k: usize) -> Vec<Complex64> {
    let count = n_k * kind.per_source();
    if kind.complex() {
        random_strengths(rng, count)
    } else {
        random_reals(rng, count)
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect()
    }
}

/// One seeded trial: a random configuration and random strengths.
pub fn verify_trial(
    kind: BasisKind,
    n_k: usize,
    seed: u64,
    trial: u64,
    options: &VerifyOptions,
) -> Result<IndependenceVerdict> {
    kind.check()?;
    if n_k == 0 {
        return Err(Error::Empty);
    }
    if n_k > DEFAULT_MAX_DOUBLE_NODES {
        return Err(Error::TooManyNodes {
            n_k,
            max: DEFAULT_MAX_DOUBLE_NODES,
        });
    }
    let mut rng = trial_rng(seed, trial);
    let config = random_configuration(&mut rng, kind, n_k, options.sampler)?;
    let coefficients = random_coefficients(&mut rng, kind, n_k);
    let mut v = assess(&config, kind, &coefficients, options, &mut rng)?;
    v.seed = seed;
    v.trial = trial;
    Ok(v)
}

/// `trials` seeded trials in parallel, returned in trial order.
pub fn verify(
    kind: BasisKind,
    n_k: usize,
    trials: u64,
    seed: u64,
    options: &VerifyOptions,
) -> Result<Vec<IndependenceVerdict>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| verify_trial(kind, n_k, seed, t, options))
        .collect()
}

pub fn write_jsonl<W: std::io::Write>(verdicts: &[IndependenceVerdict], mut out: W) -> Result<()> {
    for v in verdicts {
        serde_json::to_writer(&mut out, v)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Spatial configurations only enter through [`AnyConfiguration`]; this
/// shorthand keeps call sites short.
pub fn space(config: Configuration3) -> AnyConfiguration {
    AnyConfiguration::Space(config)
}

pub fn plane(config: Configuration2) -> AnyConfiguration {
    AnyConfiguration::Plane(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bounds, SourceConfiguration, SourcePoint2};

    fn cfg(points: &[[f64; 2]]) -> Configuration2 {
        SourceConfiguration::new_unchecked(
            points.iter().map(|p| SourcePoint2::new(p[0], p[1])).collect(),
            Bounds::default(),
        )
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            BasisKind::Log,
            BasisKind::Pole(3),
            BasisKind::Mixed12,
            BasisKind::LogPole,
            BasisKind::Mass2,
            BasisKind::Dipole2,
            BasisKind::Multipole2(2),
            BasisKind::Mass3,
            BasisKind::Dipole3,
        ] {
            assert_eq!(k.to_string().parse::<BasisKind>().unwrap(), k);
        }
        assert_eq!("pole-4".parse::<BasisKind>().unwrap(), BasisKind::Pole(4));
        assert!("pole0".parse::<BasisKind>().is_err());
        assert!("quadrupole".parse::<BasisKind>().is_err());
    }

    #[test]
    fn single_node_moment_is_first_moment() {
        let c = cfg(&[[0.3, 0.4]]);
        let s = moment_rank_test(&c, BasisKind::Log).unwrap();
        assert!((s.sigma_min - 0.5).abs() < 1e-15);
        for m in 1..=4 {
            assert_eq!(moment_rank_test(&c, BasisKind::Pole(m)).unwrap().sigma_min, 1.0);
        }
    }

    #[test]
    fn near_duplicate_nodes_are_flagged() {
        let c = cfg(&[[0.3, 0.4], [0.3 + 1e-9, 0.4], [-0.5, 0.1]]);
        let s = moment_rank_test(&c, BasisKind::Log).unwrap();
        assert!(s.relative_sigma_min() < 1e-9, "{s:?}");
        let coeffs = vec![Complex64::new(1.0, 0.0); 3];
        let v = assess(
            &plane(c),
            BasisKind::Log,
            &coeffs,
            &VerifyOptions::default(),
            &mut trial_rng(0, 0),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Flagged);
    }

    #[test]
    fn single_function_gram_is_squared_norm() {
        let c = plane(cfg(&[[0.2, -0.1]]));
        let g = sampled_gram_test(&c, BasisKind::Pole(1), 16, 2.0).unwrap();
        let zk = Complex64::new(0.2, -0.1);
        let norm2: f64 = circle_samples(2.0, 16)
            .iter()
            .map(|z| pole(*z, zk, 1).unwrap().norm_sqr())
            .sum();
        assert!((g.sigma_min - norm2).abs() < 1e-14 * norm2);
    }

    #[test]
    fn duplicated_column_is_singular() {
        let c = plane(cfg(&[[0.2, -0.1], [0.2, -0.1]]));
        let g = sampled_gram_test(&c, BasisKind::Pole(1), 16, 2.0).unwrap();
        assert!(g.sigma_min <= 1e-12, "{g:?}");
        assert!(matches!(
            sampled_gram_test(&c, BasisKind::Pole(1), 3, 2.0),
            Err(Error::InsufficientSamples { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn four_poles_have_positive_gram() {
        let c = plane(cfg(&[[0.5, 0.1], [-0.3, 0.6], [0.1, -0.7], [-0.4, -0.4]]));
        let g = sampled_gram_test(&c, BasisKind::Pole(1), 64, 2.0).unwrap();
        assert!(!g.numerically_singular(), "{g:?}");
    }

    #[test]
    fn zero_spec_recovers_zero() {
        let c = plane(cfg(&[[0.5, 0.1], [-0.3, 0.6]]));
        let zero = vec![Complex64::new(0.0, 0.0); 2];
        let r = recover_coefficients(&c, BasisKind::Log, &zero, 16, 2.0, 0.0, &mut trial_rng(0, 0)).unwrap();
        assert_eq!(r.max_error, 0.0);
        assert!(r.recovered.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn dipoles_round_trip() {
        let c = plane(cfg(&[[0.5, 0.1], [-0.3, 0.6], [0.1, -0.7]]));
        let mut rng = trial_rng(3, 0);
        let coeffs = random_coefficients(&mut rng, BasisKind::Dipole2, 3);
        let r = recover_coefficients(&c, BasisKind::Dipole2, &coeffs, 48, 2.0, 0.0, &mut rng).unwrap();
        assert!(r.max_error < 1e-8, "{r:?}");
        let noisy = recover_coefficients(&c, BasisKind::Dipole2, &coeffs, 48, 2.0, 1e-6, &mut rng).unwrap();
        assert!(noisy.max_error > 0.0 && noisy.max_error < 1e-6 * noisy.cond * 48.0);
    }

    #[test]
    fn seeded_trials_replay() {
        let opts = VerifyOptions::default();
        for kind in [BasisKind::Log, BasisKind::Dipole3, BasisKind::Mixed12] {
            let a = verify(kind, 3, 4, 9, &opts).unwrap();
            let b = verify(kind, 3, 4, 9, &opts).unwrap();
            assert_eq!(a, b);
            assert_eq!(a[2], verify_trial(kind, 3, 9, 2, &opts).unwrap());
        }
    }

    #[test]
    fn theorem_kinds_are_independent() {
        let opts = VerifyOptions::default();
        for kind in [
            BasisKind::Log,
            BasisKind::Pole(2),
            BasisKind::Mass2,
            BasisKind::Dipole2,
            BasisKind::Multipole2(3),
            BasisKind::Mass3,
            BasisKind::Dipole3,
        ] {
            for v in verify(kind, 4, 5, 1, &opts).unwrap() {
                assert_eq!(v.verdict, Verdict::Independent, "{v:?}");
            }
        }
    }

    #[test]
    fn verdict_serializes_as_json_line() {
        let v = verify_trial(BasisKind::Log, 2, 5, 0, &VerifyOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&[v.clone()], &mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert!(line.starts_with("{\"kind\":\"log\",\"n_k\":2,\"seed\":5"));
        let back: IndependenceVerdict = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back, v);
    }
}
