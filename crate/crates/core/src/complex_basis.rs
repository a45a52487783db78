//! Complex point-source basis: the regularised logarithm ψ_k, poles of any
//! order, their expansions in powers of 1/z and the branch-cut bound on the
//! exterior of the unit disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AnyConfiguration, Configuration2, ConfigurationDocument};

/// Points with |z| ≥ 1 − DOMAIN_SLACK count as exterior, so that samples
/// generated on the unit circle are not rejected for rounding.
pub const DOMAIN_SLACK: f64 = 1e-12;

fn check_exterior(z: Complex64) -> Result<()> {
    let r = z.norm();
    if !(r >= 1.0 - DOMAIN_SLACK) || !r.is_finite() {
        return Err(Error::DomainViolation(format!("field point {z} has |z| = {r} < 1")));
    }
    Ok(())
}

fn check_source(zk: Complex64) -> Result<()> {
    let r = zk.norm();
    if !(r < 1.0) {
        return Err(Error::DomainViolation(format!("source {zk} has |z_k| = {r} >= 1")));
    }
    Ok(())
}

/// log(1 + u) without cancellation for small |u|.
fn log1p(u: Complex64) -> Complex64 {
    let re = 0.5 * (u.re.mul_add(2.0, u.norm_sqr())).ln_1p();
    let im = u.im.atan2(1.0 + u.re);
    Complex64::new(re, im)
}

/// ψ_k(z) = ln 1/(1 − z_k/z), principal branch. For |z| ≥ 1 > |z_k| the
/// argument 1 − z_k/z has positive real part, so no branch cut is crossed.
pub fn psi(z: Complex64, zk: Complex64) -> Result<Complex64> {
    check_exterior(z)?;
    check_source(zk)?;
    Ok(-log1p(-zk / z))
}

/// dψ_k/dz = 1/z − 1/(z − z_k).
pub fn psi_derivative(z: Complex64, zk: Complex64) -> Result<Complex64> {
    check_exterior(z)?;
    check_source(zk)?;
    Ok(z.inv() - (z - zk).inv())
}

/// 1/(z − z_k)^m.
pub fn pole(z: Complex64, zk: Complex64, m: u32) -> Result<Complex64> {
    if m < 1 {
        return Err(Error::BadOrder(m as i64));
    }
    check_exterior(z)?;
    check_source(zk)?;
    Ok((z - zk).inv().powu(m))
}

/// S_{m,n} = (m+n−1)!/(n!(m−1)!), the coefficient of z_k^n z^{−(m+n)} in
/// 1/(z − z_k)^m. Built as a running product.
pub fn binomial_pole_coefficient(m: i64, n: i64) -> Result<f64> {
    if m < 1 {
        return Err(Error::BadOrder(m));
    }
    if n < 0 {
        return Err(Error::InvalidParameter(format!("n must be >= 0, got {n}")));
    }
    // C(m+n−1, n) with the smaller of n, m−1 as the loop length
    let top = m + n - 1;
    let k = n.min(m - 1);
    let mut s = 1.0;
    for i in 1..=k {
        s = s * (top - k + i) as f64 / i as f64;
    }
    Ok(s.round_if_exact())
}

trait RoundIfExact {
    fn round_if_exact(self) -> Self;
}

impl RoundIfExact for f64 {
    // the running product is an integer whenever it is below 2^53
    fn round_if_exact(self) -> f64 {
        if self < 9.007_199_254_740_992e15 {
            self.round()
        } else {
            self
        }
    }
}

/// One pole term μ/(z − z_k)^m attached to source `k` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub k: usize,
    pub m: u32,
    pub strength: Complex64,
}

/// A finite mixed expansion Σ_k ρ_k ψ_k + Σ μ/(z − z_k)^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexExpansionSpec {
    sources: Configuration2,
    log_strengths: Vec<Complex64>,
    poles: Vec<PoleTerm>,
}

impl ComplexExpansionSpec {
    /// `log_strengths` may be empty (no logarithmic terms) or hold one value
    /// per source.
    pub fn new(sources: Configuration2, log_strengths: Vec<Complex64>, poles: Vec<PoleTerm>) -> Result<Self> {
        if log_strengths.is_empty() && poles.is_empty() {
            return Err(Error::EmptyExpansion);
        }
        if !log_strengths.is_empty() && log_strengths.len() != sources.len() {
            return Err(Error::InvalidParameter(format!(
                "{} log strengths for {} sources",
                log_strengths.len(),
                sources.len()
            )));
        }
        if log_strengths.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        for p in &poles {
            if p.m < 1 {
                return Err(Error::BadOrder(p.m as i64));
            }
            if p.k >= sources.len() {
                return Err(Error::InvalidParameter(format!(
                    "pole refers to source {} of {}",
                    p.k + 1,
                    sources.len()
                )));
            }
            if !p.strength.re.is_finite() || !p.strength.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        for (index, z) in sources.nodes().into_iter().enumerate() {
            if z.norm() >= 1.0 {
                return Err(Error::OutsideAnnulus {
                    index,
                    radius: z.norm(),
                    r_min: sources.bounds().r_min,
                    r_max: 1.0,
                });
            }
        }
        Ok(Self {
            sources,
            log_strengths,
            poles,
        })
    }

    /// Only simple poles, one per source.
    pub fn simple_poles(sources: Configuration2, mu: &[Complex64]) -> Result<Self> {
        let poles = mu
            .iter()
            .enumerate()
            .map(|(k, &strength)| PoleTerm { k, m: 1, strength })
            .collect();
        Self::new(sources, Vec::new(), poles)
    }

    pub fn sources(&self) -> &Configuration2 {
        &self.sources
    }

    pub fn log_strengths(&self) -> &[Complex64] {
        &self.log_strengths
    }

    pub fn poles(&self) -> &[PoleTerm] {
        &self.poles
    }

    /// Term-by-term sum of two specs over the same sources.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.sources != other.sources {
            return Err(Error::InvalidParameter(
                "specs are defined over different sources".into(),
            ));
        }
        let log_strengths = match (self.log_strengths.is_empty(), other.log_strengths.is_empty()) {
            (true, _) => other.log_strengths.clone(),
            (_, true) => self.log_strengths.clone(),
            _ => self
                .log_strengths
                .iter()
                .zip(&other.log_strengths)
                .map(|(a, b)| a + b)
                .collect(),
        };
        let poles = self.poles.iter().chain(&other.poles).copied().collect();
        Self::new(self.sources.clone(), log_strengths, poles)
    }

    pub fn negated(&self) -> Self {
        Self {
            sources: self.sources.clone(),
            log_strengths: self.log_strengths.iter().map(|r| -r).collect(),
            poles: self
                .poles
                .iter()
                .map(|p| PoleTerm {
                    strength: -p.strength,
                    ..*p
                })
                .collect(),
        }
    }

    /// Σ |ρ_k| + Σ |strength| (the constant in the tail bound).
    pub fn total_strength(&self) -> f64 {
        self.log_strengths.iter().map(|r| r.norm()).sum::<f64>()
            + self.poles.iter().map(|p| p.strength.norm()).sum::<f64>()
    }

    pub fn max_order(&self) -> u32 {
        self.poles.iter().map(|p| p.m).max().unwrap_or(0)
    }

    /// Sum of the simple-pole strengths (the constant condition the mixed
    /// systems set aside).
    pub fn simple_pole_sum(&self) -> Complex64 {
        self.poles.iter().filter(|p| p.m == 1).map(|p| p.strength).sum()
    }
}

/// Σ_k [ρ_k ψ_k(z) + Σ_m μ/(z − z_k)^m].
pub fn eval_expansion(spec: &ComplexExpansionSpec, z: Complex64) -> Result<Complex64> {
    check_exterior(z)?;
    let nodes = spec.sources.nodes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (rho, zk) in spec.log_strengths.iter().zip(&nodes) {
        acc += rho * psi(z, *zk)?;
    }
    for p in &spec.poles {
        acc += p.strength * pole(z, nodes[p.k], p.m)?;
    }
    Ok(acc)
}

/// Coefficients b_j of z^{−j}, j = 1..n_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub b: Vec<Complex64>,
    /// Σ μ_k over simple poles, reported on its own.
    pub b0: Complex64,
}

impl SeriesCoefficients {
    pub fn n_max(&self) -> usize {
        self.b.len()
    }

    /// Σ_{j ≤ n_max} b_j z^{−j}, by Horner's rule in 1/z.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        for b in self.b.iter().rev() {
            acc = (acc + b) * w;
        }
        acc
    }
}

pub fn series_coefficients(spec: &ComplexExpansionSpec, n_max: usize) -> Result<SeriesCoefficients> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let nodes = spec.sources.nodes();
    let mut b = vec![Complex64::new(0.0, 0.0); n_max];
    for (rho, zk) in spec.log_strengths.iter().zip(&nodes) {
        // ψ_k = Σ_j z_k^j / (j z^j)
        let mut power = *zk;
        for (i, bj) in b.iter_mut().enumerate() {
            let j = (i + 1) as f64;
            *bj += rho * power / j;
            power *= zk;
        }
    }
    for p in &spec.poles {
        let m = p.m as usize;
        let zk = nodes[p.k];
        // coefficient of z^{−j} is S_{m, j−m} z_k^{j−m} for j ≥ m
        let mut power = Complex64::new(1.0, 0.0);
        let mut s = 1.0;
        for j in m..=n_max {
            let n = j - m;
            if n > 0 {
                s = s * (m + n - 1) as f64 / n as f64;
            }
            b[j - 1] += p.strength * s * power;
            power *= zk;
        }
    }
    Ok(SeriesCoefficients {
        b,
        b0: spec.simple_pole_sum(),
    })
}

/// Largest |z_k| over the sources the spec actually uses.
pub fn max_source_radius(spec: &ComplexExpansionSpec) -> f64 {
    spec.sources.nodes().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ⌈log(tol)/log(max|z_k|/|z|)⌉, the order at which the geometric factor of
/// the series falls below `tol`.
pub fn truncation_order(spec: &ComplexExpansionSpec, z_abs: f64, tol: f64) -> Result<usize> {
    let ratio = max_source_radius(spec) / z_abs;
    if !(ratio < 1.0) || !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need max|z_k|/|z| < 1 and 0 < tol < 1 (ratio {ratio}, tol {tol})"
        )));
    }
    if ratio == 0.0 {
        return Ok(1);
    }
    Ok(((tol.ln() / ratio.ln()).ceil() as usize).max(1))
}

/// Smallest order, at least [`truncation_order`], whose [`tail_bound`] is
/// within `tol` times [`ComplexExpansionSpec::total_strength`]. Pole
/// coefficients grow like j^{m−1}, so for m ≥ 3 this can exceed the purely
/// geometric order by a few terms.
pub fn sufficient_order(spec: &ComplexExpansionSpec, z_abs: f64, tol: f64) -> Result<usize> {
    const MAX_ORDER: usize = 100_000;
    let mut n = truncation_order(spec, z_abs, tol)?;
    let target = tol * spec.total_strength();
    while tail_bound(spec, n, z_abs) > target {
        n += 1;
        if n > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "tail bound stays above {target:e} up to order {MAX_ORDER}"
            )));
        }
    }
    Ok(n)
}

/// Conservative bound on |Σ_{j > n_max} b_j z^{−j}| at radius `z_abs`.
///
/// With q = |z_k|/|z|, a log term contributes Σ_{j>n} q^j/j ≤ q^{n+1}/((n+1)(1−q)).
/// A pole of order m contributes Σ_{j>n} C(j−1, m−1) r^{j−m}|z|^{−j}, whose
/// term ratio jq/(j−m+1) decreases towards q; once it drops below one the
/// remainder is closed with a geometric bound.
pub fn tail_bound(spec: &ComplexExpansionSpec, n_max: usize, z_abs: f64) -> f64 {
    let nodes = spec.sources.nodes();
    let mut total = 0.0;
    for (rho, zk) in spec.log_strengths.iter().zip(&nodes) {
        let q = zk.norm() / z_abs;
        let n1 = (n_max + 1) as f64;
        total += rho.norm() * q.powf(n1) / (n1 * (1.0 - q));
    }
    for p in &spec.poles {
        total += p.strength.norm() * pole_tail(p.m as usize, nodes[p.k].norm(), n_max, z_abs);
    }
    total
}

fn pole_tail(m: usize, r: f64, n_max: usize, z_abs: f64) -> f64 {
    let q = r / z_abs;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let mut j = (n_max + 1).max(m);
    // t_j = S_{m, j−m} r^{j−m} |z|^{−j}
    let mut t = binomial_pole_coefficient(m as i64, (j - m) as i64).unwrap_or(f64::INFINITY)
        * r.powi((j - m) as i32)
        * z_abs.powi(-(j as i32));
    let mut sum = 0.0;
    loop {
        if t == 0.0 {
            return sum;
        }
        let ratio = j as f64 * q / (j + 1 - m) as f64;
        sum += t;
        if ratio < 1.0 {
            return sum + t * ratio / (1.0 - ratio);
        }
        t *= ratio;
        j += 1;
    }
}

/// max |Im ψ(radius·e^{iθ}, z_k)| over `samples` equally spaced θ.
pub fn verify_branch_free(zk: Complex64, radius: f64, samples: usize) -> Result<f64> {
    if samples < 8 {
        return Err(Error::InvalidParameter(format!(
            "need at least 8 samples, got {samples}"
        )));
    }
    if !(radius >= 1.0) {
        return Err(Error::DomainViolation(format!("radius {radius} < 1")));
    }
    check_source(zk)?;
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let theta = std::f64::consts::TAU * i as f64 / samples as f64;
        let z = Complex64::from_polar(radius, theta);
        worst = worst.max(psi(z, zk)?.im.abs());
    }
    Ok(worst)
}

/// JSON pole entry: 1-based source index `k`, order `m`, strength re/im.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleDocument {
    pub k: usize,
    pub m: u32,
    pub re: f64,
    pub im: f64,
}

/// `{"sources": …, "log": [[re,im],…], "poles": [{"k","m","re","im"},…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpecDocument {
    pub sources: ConfigurationDocument,
    #[serde(default)]
    pub log: Vec<[f64; 2]>,
    #[serde(default)]
    pub poles: Vec<PoleDocument>,
}

impl ComplexSpecDocument {
    pub fn to_spec(&self) -> Result<ComplexExpansionSpec> {
        let AnyConfiguration::Plane(sources) = self.sources.validate()? else {
            return Err(Error::Parse("complex spec needs dim = 2 sources".into()));
        };
        let log = self.log.iter().map(|r| Complex64::new(r[0], r[1])).collect();
        let poles = self
            .poles
            .iter()
            .map(|p| {
                if p.k == 0 {
                    return Err(Error::Parse("pole index k is 1-based".into()));
                }
                Ok(PoleTerm {
                    k: p.k - 1,
                    m: p.m,
                    strength: Complex64::new(p.re, p.im),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ComplexExpansionSpec::new(sources, log, poles)
    }

    pub fn from_spec(spec: &ComplexExpansionSpec) -> Self {
        Self {
            sources: ConfigurationDocument::from(spec.sources()),
            log: spec.log_strengths.iter().map(|r| [r.re, r.im]).collect(),
            poles: spec
                .poles
                .iter()
                .map(|p| PoleDocument {
                    k: p.k + 1,
                    m: p.m,
                    re: p.strength.re,
                    im: p.strength.im,
                })
                .collect(),
        }
    }
}
