//! Monte-Carlo and adversarial probing of σ_min(C), σ_min(C_m) and of the
//! square mixed block systems. Evidence only: nothing here asserts that C
//! is invertible.
//!
//! Trial `t` of a run with master seed `s` draws from `trial_rng(s, t)`, so
//! trials run in parallel and every record replays on its own. Records go to
//! an append-only JSON-lines log; a report is a pure fold over records, so
//! the report rebuilt from a log equals the live one.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::linalg::{lift, summarize, Precision, SvdSummary, SINGULAR_RELATIVE};
use crate::sampling::{sample_nodes, trial_rng, Sampler};
use crate::simplex::{nelder_mead, SimplexOptions};
use crate::structured::{
    c_m_matrix_with, c_matrix_with, mixed_block_system, vandermonde, BlockKind, CMatrixBundle, CMatrixOptions,
    DEFAULT_COND_THRESHOLD, DEFAULT_MAX_DOUBLE_NODES,
};

/// Relative σ_min below which a double-precision result is recomputed in
/// extended precision before it is recorded.
pub const RECHECK_RELATIVE: f64 = 1e-8;
/// Score of an infeasible search point is this plus its violation, above
/// any relative σ_min (which never exceeds 1).
const INFEASIBLE: f64 = 10.0;
const FAILED: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Order m of C_m; 1 probes C itself.
    pub m: u32,
    pub precision: Precision,
    pub max_nodes: usize,
    pub cond_threshold: f64,
    pub recheck_relative: f64,
    /// Relative σ_min at or below which a record is flagged.
    pub singular_relative: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            m: 1,
            precision: Precision::Double,
            max_nodes: DEFAULT_MAX_DOUBLE_NODES,
            cond_threshold: DEFAULT_COND_THRESHOLD,
            recheck_relative: RECHECK_RELATIVE,
            singular_relative: SINGULAR_RELATIVE,
        }
    }
}

impl ProbeOptions {
    fn check(&self, n_k: usize) -> Result<()> {
        if n_k == 0 {
            return Err(Error::Empty);
        }
        if n_k > self.max_nodes {
            return Err(Error::TooManyNodes {
                n_k,
                max: self.max_nodes,
            });
        }
        if self.m < 1 {
            return Err(Error::BadOrder(self.m as i64));
        }
        Ok(())
    }

    fn matrix_options(&self, precision: Precision) -> CMatrixOptions {
        CMatrixOptions {
            precision,
            fallback: true,
            max_double_nodes: self.max_nodes,
            cond_threshold: self.cond_threshold,
        }
    }
}

/// One probed configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub n_k: usize,
    /// Order of C_m (1 for C); 0 for block-system records.
    pub m: u32,
    pub seed: u64,
    pub trial: u64,
    pub sampler: Sampler,
    /// Column blocks, for block-system records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<BlockKind>>,
    pub nodes: Vec<[f64; 2]>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub relative_sigma_min: f64,
    #[serde(rename = "cond_G")]
    pub cond_g: f64,
    /// Arithmetic of the recorded values.
    pub precision: Precision,
    /// Recomputed in extended precision after a small double result.
    pub rechecked: bool,
    /// cond(G) above the threshold or relative σ_min at or below the
    /// singular threshold (1e-10 by default).
    pub flagged: bool,
    /// σ_min(C) next to block systems that reduce to C.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min_c: Option<f64>,
}

fn node_pairs(nodes: &[Complex64]) -> Vec<[f64; 2]> {
    nodes.iter().map(|z| [z.re, z.im]).collect()
}

fn c_bundle(nodes: &[Complex64], options: &ProbeOptions, precision: Precision) -> Result<CMatrixBundle> {
    let mo = options.matrix_options(precision);
    if options.m == 1 {
        c_matrix_with(nodes, &mo)
    } else {
        c_m_matrix_with(nodes, options.m, &mo)
    }
}

/// C (or C_m) for one node set with the precision guard applied: results
/// in double with relative σ_min below the recheck level are recomputed in
/// extended precision. Returns the bundle and whether it was rechecked.
pub fn evaluate_c(nodes: &[Complex64], options: &ProbeOptions) -> Result<(CMatrixBundle, bool)> {
    options.check(nodes.len())?;
    let b = c_bundle(nodes, options, options.precision)?;
    if b.precision == Precision::Double && b.relative_sigma_min() < options.recheck_relative {
        return Ok((c_bundle(nodes, options, Precision::Extended)?, true));
    }
    Ok((b, false))
}

fn flag(cond_g: f64, s: &SvdSummary, options: &ProbeOptions) -> bool {
    !(cond_g <= options.cond_threshold) || s.sigma_min <= options.singular_relative * s.sigma_max
}

fn record_of(
    bundle: &CMatrixBundle,
    rechecked: bool,
    seed: u64,
    trial: u64,
    sampler: Sampler,
    options: &ProbeOptions,
) -> ProbeRecord {
    let s = SvdSummary {
        sigma_min: bundle.sigma_min,
        sigma_max: bundle.sigma_max,
        cond: bundle.cond,
    };
    ProbeRecord {
        n_k: bundle.n_k(),
        m: options.m,
        seed,
        trial,
        sampler,
        kinds: None,
        nodes: node_pairs(&bundle.nodes),
        sigma_min: bundle.sigma_min,
        sigma_max: bundle.sigma_max,
        relative_sigma_min: s.relative_sigma_min(),
        cond_g: bundle.cond_g,
        precision: bundle.precision,
        rechecked,
        flagged: flag(bundle.cond_g, &s, options),
        sigma_min_c: None,
    }
}

/// Trial `trial` of a C probe.
pub fn probe_trial(n_k: usize, sampler: Sampler, seed: u64, trial: u64, options: &ProbeOptions) -> Result<ProbeRecord> {
    options.check(n_k)?;
    let mut rng = trial_rng(seed, trial);
    let nodes = sample_nodes(&mut rng, n_k, sampler, sampler.bounds())?;
    let (bundle, rechecked) = evaluate_c(&nodes, options)?;
    Ok(record_of(&bundle, rechecked, seed, trial, sampler, options))
}

/// Records of one probe run and their report.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRun {
    pub records: Vec<ProbeRecord>,
    pub report: ProbeReport,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

/// σ_min(C) (or C_m) over `trials` seeded configurations.
pub fn probe_c(n_k: usize, trials: u64, sampler: Sampler, seed: u64, options: &ProbeOptions) -> Result<ProbeRun> {
    check_trials(trials)?;
    options.check(n_k)?;
    let records: Vec<ProbeRecord> = (0..trials)
        .into_par_iter()
        .map(|t| probe_trial(n_k, sampler, seed, t, options))
        .collect::<Result<_>>()?;
    let report = ProbeReport::from_records(&records);
    Ok(ProbeRun { records, report })
}

/// Trial `trial` of a block-system probe: σ_min of the square system of
/// the selected blocks, N_k rows per block.
pub fn probe_block_trial(
    n_k: usize,
    kinds: &[BlockKind],
    sampler: Sampler,
    seed: u64,
    trial: u64,
    options: &ProbeOptions,
) -> Result<ProbeRecord> {
    if kinds.is_empty() {
        return Err(Error::BadSampler("no block kinds selected".into()));
    }
    options.check(n_k)?;
    let mut rng = trial_rng(seed, trial);
    let nodes = sample_nodes(&mut rng, n_k, sampler, sampler.bounds())?;
    let mut layout = kinds.to_vec();
    layout.sort();
    layout.dedup();
    let system = mixed_block_system(&nodes, &layout, n_k * layout.len())?;
    let cond_g = summarize(&vandermonde(&nodes, n_k)?.entries)?.cond;
    let mut s = match options.precision {
        Precision::Double => system.svd()?,
        Precision::Extended => summarize::<TwoFloat>(&lift(&system.entries))?,
    };
    let mut precision = options.precision;
    let mut rechecked = false;
    if precision == Precision::Double && s.relative_sigma_min() < options.recheck_relative {
        // entries are exact to rounding; the recheck guards the SVD
        s = summarize::<TwoFloat>(&lift(&system.entries))?;
        precision = Precision::Extended;
        rechecked = true;
    }
    let reduces_to_c = layout.contains(&BlockKind::Pole(1)) && layout.len() == 2;
    let sigma_min_c = if reduces_to_c {
        Some(evaluate_c(&nodes, &ProbeOptions { m: 1, ..*options })?.0.sigma_min)
    } else {
        None
    };
    Ok(ProbeRecord {
        n_k,
        m: 0,
        seed,
        trial,
        sampler,
        kinds: Some(layout),
        nodes: node_pairs(&nodes),
        sigma_min: s.sigma_min,
        sigma_max: s.sigma_max,
        relative_sigma_min: s.relative_sigma_min(),
        cond_g,
        precision,
        rechecked,
        flagged: flag(cond_g, &s, options),
        sigma_min_c,
    })
}

pub fn probe_blocks(
    n_k: usize,
    kinds: &[BlockKind],
    trials: u64,
    sampler: Sampler,
    seed: u64,
    options: &ProbeOptions,
) -> Result<ProbeRun> {
    check_trials(trials)?;
    if kinds.is_empty() {
        return Err(Error::BadSampler("no block kinds selected".into()));
    }
    let records: Vec<ProbeRecord> = (0..trials)
        .into_par_iter()
        .map(|t| probe_block_trial(n_k, kinds, sampler, seed, t, options))
        .collect::<Result<_>>()?;
    let report = ProbeReport::from_records(&records);
    Ok(ProbeRun { records, report })
}

/// Counts of records with 10^lo ≤ relative σ_min < 10^hi; the lowest bucket
/// also takes everything below 10^lo and the highest includes 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub log10_lo: i32,
    pub log10_hi: i32,
    pub count: u64,
}

pub const HISTOGRAM_LOWEST: i32 = -17;

fn bucket_index(relative: f64) -> usize {
    let top = -HISTOGRAM_LOWEST as usize - 1;
    if !(relative > 0.0) {
        return 0;
    }
    let e = relative.log10().floor() as i64;
    (e - HISTOGRAM_LOWEST as i64).clamp(0, top as i64) as usize
}

/// Aggregate of a set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: u64,
    pub min_sigma_min: Option<f64>,
    pub argmin_nodes: Option<Vec<[f64; 2]>>,
    pub argmin_trial: Option<u64>,
    pub min_relative_sigma_min: Option<f64>,
    pub argmin_relative_nodes: Option<Vec<[f64; 2]>>,
    pub histogram: Vec<HistogramBucket>,
    pub flagged_count: u64,
    pub rechecked_count: u64,
}

impl ProbeReport {
    /// Pure fold over records; ties for the minimum go to the earliest.
    pub fn from_records(records: &[ProbeRecord]) -> Self {
        let mut histogram: Vec<HistogramBucket> = (HISTOGRAM_LOWEST..0)
            .map(|lo| HistogramBucket {
                log10_lo: lo,
                log10_hi: lo + 1,
                count: 0,
            })
            .collect();
        let mut min: Option<&ProbeRecord> = None;
        let mut min_rel: Option<&ProbeRecord> = None;
        let (mut flagged, mut rechecked) = (0, 0);
        for r in records {
            histogram[bucket_index(r.relative_sigma_min)].count += 1;
            if min.map_or(true, |m| r.sigma_min < m.sigma_min) {
                min = Some(r);
            }
            if min_rel.map_or(true, |m| r.relative_sigma_min < m.relative_sigma_min) {
                min_rel = Some(r);
            }
            flagged += r.flagged as u64;
            rechecked += r.rechecked as u64;
        }
        Self {
            trials: records.len() as u64,
            min_sigma_min: min.map(|r| r.sigma_min),
            argmin_nodes: min.map(|r| r.nodes.clone()),
            argmin_trial: min.map(|r| r.trial),
            min_relative_sigma_min: min_rel.map(|r| r.relative_sigma_min),
            argmin_relative_nodes: min_rel.map(|r| r.nodes.clone()),
            histogram,
            flagged_count: flagged,
            rechecked_count: rechecked,
        }
    }

    /// Text histogram over log10 of the relative σ_min, empty buckets at
    /// either end trimmed.
    pub fn render_histogram(&self) -> String {
        let mut out = String::new();
        let first = self.histogram.iter().position(|b| b.count > 0);
        let last = self.histogram.iter().rposition(|b| b.count > 0);
        let (Some(first), Some(last)) = (first, last) else {
            out.push_str("(no records)\n");
            return out;
        };
        let peak = self.histogram[first..=last]
            .iter()
            .map(|b| b.count)
            .max()
            .unwrap_or(1)
            .max(1);
        for b in &self.histogram[first..=last] {
            let bar = "#".repeat(((b.count * 50 + peak - 1) / peak) as usize);
            let (lo, hi) = (format!("1e{}", b.log10_lo), format!("1e{}", b.log10_hi));
            let _ = writeln!(out, "{lo:>5} .. {hi:>5} | {bar:<50} {}", b.count);
        }
        out
    }
}

/// Appends records to a JSON-lines log through one buffered writer.
pub fn append_records(path: &Path, records: &[ProbeRecord]) -> Result<()> {
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut out = BufWriter::new(file);
    write_records(records, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[ProbeRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSON-lines log; blank lines are skipped.
pub fn read_records(path: &Path) -> Result<Vec<ProbeRecord>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        records.push(r);
    }
    Ok(records)
}

/// CSV for plotting: one row per record.
pub fn write_records_csv<W: Write>(records: &[ProbeRecord], mut out: W) -> Result<()> {
    writeln!(
        out,
        "n_k,m,seed,trial,sampler,sigma_min,sigma_max,relative_sigma_min,cond_G,precision,flagged"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{},{}",
            r.n_k,
            r.m,
            r.seed,
            r.trial,
            r.sampler,
            r.sigma_min,
            r.sigma_max,
            r.relative_sigma_min,
            r.cond_g,
            r.precision,
            r.flagged
        )?;
    }
    Ok(())
}

/// Outcome of the adversarial search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// The configuration with the smallest relative σ_min found; its
    /// `trial` is the restart that found it.
    pub worst: ProbeRecord,
    pub evaluations: usize,
    pub restarts: u64,
}

fn violation(nodes: &[Complex64], sampler: Sampler) -> f64 {
    let b = sampler.bounds();
    let mut v = 0.0;
    for (i, z) in nodes.iter().enumerate() {
        let r = z.norm();
        v += (b.r_min - r).max(0.0) + (r - b.r_max).max(0.0);
        for w in &nodes[i + 1..] {
            v += (b.min_sep - (z - w).norm()).max(0.0);
        }
    }
    v
}

fn unpack(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Minimises the relative σ_min of C (or C_m) over node sets in the
/// annulus by Nelder–Mead from `restarts` seeded annulus samples, each
/// restart spending at most `budget` evaluations. Infeasible points score
/// 10 + their constraint violation.
pub fn minimize_sigma_min(
    n_k: usize,
    restarts: u64,
    seed: u64,
    budget: usize,
    options: &ProbeOptions,
) -> Result<SearchResult> {
    options.check(n_k)?;
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let sampler = Sampler::Annulus;
    let objective = |x: &[f64]| {
        let nodes = unpack(x);
        let v = violation(&nodes, sampler);
        if v > 0.0 {
            return INFEASIBLE + v;
        }
        match evaluate_c(&nodes, options) {
            Ok((b, _)) => b.relative_sigma_min(),
            Err(_) => FAILED,
        }
    };
    let runs: Vec<(f64, Vec<f64>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let mut rng = trial_rng(seed, r);
            let start: Vec<f64> = sample_nodes(&mut rng, n_k, sampler, sampler.bounds())?
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect();
            let m = nelder_mead(
                objective,
                &start,
                SimplexOptions {
                    budget,
                    ..Default::default()
                },
            );
            Ok((m.value, m.point, m.evaluations))
        })
        .collect::<Result<_>>()?;
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best, run) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    let (bundle, rechecked) = evaluate_c(&unpack(&run.1), options)?;
    Ok(SearchResult {
        worst: record_of(&bundle, rechecked, seed, best as u64, sampler, options),
        evaluations,
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_c_is_one() {
        for sampler in Sampler::ALL {
            let run = probe_c(1, 50, sampler, 3, &ProbeOptions::default()).unwrap();
            assert!(run.records.iter().all(|r| r.sigma_min == 1.0 && r.sigma_max == 1.0));
        }
        let opts = ProbeOptions {
            m: 3,
            ..Default::default()
        };
        // C_m = m·1 − 1 + 1 for a single node
        let run = probe_c(1, 20, Sampler::Annulus, 3, &opts).unwrap();
        assert!(run.records.iter().all(|r| r.sigma_min == 3.0));
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(probe_c(2, 0, Sampler::Annulus, 1, &ProbeOptions::default()).is_err());
        assert!(probe_c(13, 1, Sampler::Annulus, 1, &ProbeOptions::default()).is_err());
        assert!(matches!(
            probe_blocks(2, &[], 1, Sampler::Annulus, 1, &ProbeOptions::default()),
            Err(Error::BadSampler(_))
        ));
    }

    #[test]
    fn replay_is_identical() {
        let a = probe_c(3, 40, Sampler::NearBoundary, 7, &ProbeOptions::default()).unwrap();
        let b = probe_c(3, 40, Sampler::NearBoundary, 7, &ProbeOptions::default()).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_records(&a.records, &mut x).unwrap();
        write_records(&b.records, &mut y).unwrap();
        assert_eq!(x, y);
        assert_eq!(
            a.records[17],
            probe_trial(3, Sampler::NearBoundary, 7, 17, &ProbeOptions::default()).unwrap()
        );
    }

    #[test]
    fn report_is_a_fold_over_the_log() {
        let run = probe_c(4, 30, Sampler::Clustered, 2, &ProbeOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        append_records(&path, &run.records[..10]).unwrap();
        append_records(&path, &run.records[10..]).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, run.records);
        assert_eq!(ProbeReport::from_records(&back), run.report);
        let min = run.records.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min);
        assert_eq!(run.report.min_sigma_min, Some(min));
        assert_eq!(run.report.histogram.iter().map(|b| b.count).sum::<u64>(), 30);
    }

    #[test]
    fn empty_report() {
        let r = ProbeReport::from_records(&[]);
        assert_eq!(r.trials, 0);
        assert_eq!(r.min_sigma_min, None);
        assert_eq!(r.render_histogram(), "(no records)\n");
    }

    #[test]
    fn unflagged_records_honour_the_guard() {
        for sampler in Sampler::ALL {
            let run = probe_c(6, 40, sampler, 5, &ProbeOptions::default()).unwrap();
            for r in &run.records {
                assert!(r.flagged || r.cond_g <= DEFAULT_COND_THRESHOLD);
                assert!(r.relative_sigma_min >= RECHECK_RELATIVE || r.precision == Precision::Extended);
            }
        }
    }

    #[test]
    fn pole_blocks_and_c_cross_reference() {
        let run = probe_blocks(
            3,
            &[BlockKind::Pole(1)],
            50,
            Sampler::Annulus,
            1,
            &ProbeOptions::default(),
        )
        .unwrap();
        assert!(run.records.iter().all(|r| r.sigma_min > 0.0 && r.sigma_min_c.is_none()));
        let run = probe_blocks(
            2,
            &[BlockKind::Log, BlockKind::Pole(1)],
            50,
            Sampler::Annulus,
            1,
            &ProbeOptions::default(),
        )
        .unwrap();
        for r in &run.records {
            let c = r.sigma_min_c.unwrap();
            assert_eq!(
                r.relative_sigma_min > SINGULAR_RELATIVE,
                c > SINGULAR_RELATIVE * r.sigma_max.max(1.0)
            );
        }
    }

    #[test]
    fn search_with_unit_budget_keeps_initial_samples() {
        let opts = ProbeOptions::default();
        let s = minimize_sigma_min(3, 4, 11, 1, &opts).unwrap();
        assert_eq!(s.evaluations, 4);
        let initial: Vec<f64> = (0..4)
            .map(|t| {
                probe_trial(3, Sampler::Annulus, 11, t, &opts)
                    .unwrap()
                    .relative_sigma_min
            })
            .collect();
        let best = initial.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(s.worst.relative_sigma_min, best);
        let one = minimize_sigma_min(1, 3, 11, 200, &opts).unwrap();
        assert_eq!(one.worst.sigma_min, 1.0);
    }
}
