//! Seeded random source configurations. Every random draw in the crate goes
//! through [`trial_rng`], so trial `t` of a run with master seed `s` is
//! reproducible on its own, in any order and on any thread.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Bounds, Configuration2, Configuration3, Point, SourceConfiguration, SourcePoint2, SourcePoint3};

const MAX_REJECTIONS: usize = 100_000;

/// Counter-based stream: the master seed picks the key, the trial index the
/// stream, so trials never share random numbers.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Where nodes are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Area-uniform on the annulus r_min ≤ |z| ≤ r_max.
    Annulus,
    /// Radius uniform in [0.9, 0.95].
    NearBoundary,
    /// All nodes within a disc of radius 1e-2: near-confluent nodes.
    Clustered,
}

pub const NEAR_BOUNDARY: (f64, f64) = (0.9, 0.95);
pub const CLUSTER_RADIUS: f64 = 1e-2;

impl Sampler {
    pub const ALL: [Sampler; 3] = [Sampler::Annulus, Sampler::NearBoundary, Sampler::Clustered];

    /// Default bounds, with the separation loosened for clusters so that
    /// eight nodes fit comfortably in the cluster disc.
    pub fn bounds(self) -> Bounds {
        match self {
            Sampler::Clustered => Bounds {
                min_sep: 1e-4,
                ..Bounds::default()
            },
            _ => Bounds::default(),
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Annulus => "annulus",
            Sampler::NearBoundary => "near-boundary",
            Sampler::Clustered => "clustered",
        })
    }
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "annulus" | "annulus-uniform" => Ok(Sampler::Annulus),
            "near-boundary" => Ok(Sampler::NearBoundary),
            "clustered" => Ok(Sampler::Clustered),
            other => Err(Error::BadSampler(format!("unknown sampler `{other}`"))),
        }
    }
}

fn in_annulus<R: Rng>(rng: &mut R, r_min: f64, r_max: f64) -> Complex64 {
    let r = rng.gen_range(r_min * r_min..=r_max * r_max).sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

fn in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    in_annulus(rng, 0.0, radius)
}

fn separated(nodes: &[Complex64], z: Complex64, min_sep: f64) -> bool {
    nodes.iter().all(|w| (w - z).norm() >= min_sep)
}

/// Draws `n` nodes with the sampler, rejecting any closer than
/// `bounds.min_sep` to an earlier one.
pub fn sample_nodes<R: Rng>(rng: &mut R, n: usize, sampler: Sampler, bounds: Bounds) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let center = match sampler {
        Sampler::Clustered => Some(in_annulus(
            rng,
            bounds.r_min + CLUSTER_RADIUS,
            bounds.r_max - CLUSTER_RADIUS,
        )),
        _ => None,
    };
    let mut nodes = Vec::with_capacity(n);
    let mut rejections = 0;
    while nodes.len() < n {
        let z = match sampler {
            Sampler::Annulus => in_annulus(rng, bounds.r_min, bounds.r_max),
            Sampler::NearBoundary => in_annulus(rng, NEAR_BOUNDARY.0, NEAR_BOUNDARY.1),
            Sampler::Clustered => center.expect("clustered has a center") + in_disc(rng, CLUSTER_RADIUS),
        };
        if separated(&nodes, z, bounds.min_sep) {
            nodes.push(z);
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::BadSampler(format!(
                    "could not place {n} nodes {:e} apart with sampler {sampler}",
                    bounds.min_sep
                )));
            }
        }
    }
    Ok(nodes)
}

pub fn random_configuration2<R: Rng>(rng: &mut R, n: usize, sampler: Sampler) -> Result<Configuration2> {
    let bounds = sampler.bounds();
    let nodes = sample_nodes(rng, n, sampler, bounds)?;
    Ok(SourceConfiguration::new_unchecked(
        nodes.iter().map(|z| SourcePoint2::new(z.re, z.im)).collect(),
        bounds,
    ))
}

/// Uniform in the spherical shell r_min ≤ |X| ≤ r_max with rejection on
/// separation.
pub fn random_configuration3<R: Rng>(rng: &mut R, n: usize) -> Result<Configuration3> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let bounds = Bounds::default();
    let mut points: Vec<SourcePoint3> = Vec::with_capacity(n);
    let mut rejections = 0;
    while points.len() < n {
        let r = rng.gen_range(bounds.r_min.powi(3)..=bounds.r_max.powi(3)).cbrt();
        let u = random_unit3(rng);
        let p = SourcePoint3::new(r * u[0], r * u[1], r * u[2]);
        if points.iter().all(|q| q.distance(&p) >= bounds.min_sep) {
            points.push(p);
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::BadSampler(format!("could not place {n} separated points")));
            }
        }
    }
    Ok(SourceConfiguration::new_unchecked(points, bounds))
}

pub fn random_unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Standard normal complex strengths.
pub fn random_strengths<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    use rand_distr::StandardNormal;
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_reals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    use rand_distr::StandardNormal;
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_with;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        let (x, y): (u64, u64) = (trial_rng(7, 3).gen(), trial_rng(7, 4).gen());
        assert_ne!(x, y);
    }

    #[test]
    fn samplers_respect_their_regions() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let z = sample_nodes(&mut rng, 8, Sampler::NearBoundary, Bounds::default()).unwrap();
            assert!(z.iter().all(|w| (0.9..=0.95).contains(&w.norm())));
            let c = sample_nodes(&mut rng, 8, Sampler::Clustered, Sampler::Clustered.bounds()).unwrap();
            for w in &c {
                for v in &c {
                    assert!((w - v).norm() <= 2.0 * CLUSTER_RADIUS);
                }
            }
            let cfg = random_configuration2(&mut rng, 6, Sampler::Annulus).unwrap();
            validate_with(cfg.points().to_vec(), cfg.bounds()).unwrap();
            let cfg = random_configuration3(&mut rng, 6).unwrap();
            validate_with(cfg.points().to_vec(), cfg.bounds()).unwrap();
        }
    }

    #[test]
    fn sampler_names_round_trip() {
        for s in Sampler::ALL {
            assert_eq!(s.to_string().parse::<Sampler>().unwrap(), s);
        }
        assert!(matches!("gaussian".parse::<Sampler>(), Err(Error::BadSampler(_))));
    }
}
