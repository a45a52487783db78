//! Command-line front end. [`run`] takes the argument list and the two
//! output streams and returns the process exit code, so the binary is a
//! one-liner and tests can drive every command in-process.
//!
//! Exit codes: 0 success, 2 flagged verdict or failed check, 64 usage,
//! 65 bad input data, 74 I/O.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex_basis::{eval_expansion, verify_branch_free, ComplexSpecDocument};
use crate::config::{RunConfig, Tolerances};
use crate::error::{Error, Result};
use crate::independence::{self, BasisKind, Verdict, VerifyOptions};
use crate::linalg::Precision;
use crate::probe::{self, ProbeOptions, ProbeReport};
use crate::real_basis::{eval_expansion_r2, eval_expansion_r3, AnyRealSpec, RealExpansionSpec3, RealSpecDocument};
use crate::reduction::{self, ReductionOptions, ReductionReport};
use crate::sampling::Sampler;
use crate::structured::BlockKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

/// Spec reduced by `reduce3d` when none is given: three balanced masses
/// carrying dipoles off the coordinate axes.
pub const BUNDLED_REDUCE3D_SPEC: &str = include_str!("../data/reduce3d.json");

#[derive(Debug, Parser)]
#[command(
    name = "pointsource",
    version,
    about = "Point-source expansions and moment-matrix experiments"
)]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "double|extended")]
    pub precision: Option<Precision>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long = "nk", global = true, value_name = "N")]
    pub n_k: Option<usize>,
    /// log, pole1, pole2, pole-m, mixed12, log-pole (and the real kinds
    /// mass2, dipole2, multipoleN, mass3, dipole3).
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expansion spec at a list of points, as CSV.
    Eval(EvalArgs),
    /// Independence verdicts over seeded random configurations.
    Verify(VerifyArgs),
    /// σ_min of C (or C_m, or a block system) over seeded node sets.
    ProbeC(ProbeArgs),
    /// Adversarial search for node sets with small relative σ_min(C).
    Search(SearchArgs),
    /// Reduce a 3-D mass/dipole spec to the plane and report the defect.
    Reduce3d(ReduceArgs),
    /// Check max |Im ψ_k| on circles |z| = r against the branch bound.
    Branchcut(BranchcutArgs),
    /// Rebuild the probe report from a record log.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Pole order for `--kind pole-m`.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value = "annulus")]
    pub sampler: Sampler,
    /// Exterior sample count (default max(64, 4·basis size)).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value = "annulus")]
    pub sampler: Sampler,
    /// Order of C_m.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Probe a block system instead, e.g. `log,pole1`.
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<String>>,
    /// Append records to this JSON-lines log.
    #[arg(long, value_name = "PATH")]
    pub log: Option<PathBuf>,
    /// Also write the records as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 20)]
    pub restarts: u64,
    /// Evaluations per restart.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// 3-D real spec (the bundled example when absent).
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Half length L of the integration line.
    #[arg(long, default_value_t = reduction::DEFAULT_HALF_LENGTH)]
    pub length: f64,
    #[arg(long, default_value_t = reduction::DEFAULT_PROBES)]
    pub probes: usize,
    #[arg(long, default_value_t = reduction::DEFAULT_PROBE_RADIUS)]
    pub radius: f64,
    /// Skip the quadrature cross-check of the mass integrals.
    #[arg(long)]
    pub no_quadrature: bool,
}

#[derive(Debug, Args)]
pub struct BranchcutArgs {
    /// Source node as `0.9i`, `0.3+0.4i` or `re,im`.
    #[arg(long, value_name = "Z")]
    pub zk: String,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 10.0])]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_name = "PATH")]
    pub log: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::InvalidParameter(_)
        | Error::BadSampler(_)
        | Error::BadOrder(_)
        | Error::TooManyNodes { .. }
        | Error::InsufficientSamples { .. } => EXIT_USAGE,
        Error::SingularBlock(_) | Error::IllConditioned { .. } | Error::NonFinite => EXIT_FLAGGED,
        Error::Empty
        | Error::DuplicatePoint { .. }
        | Error::OutsideAnnulus { .. }
        | Error::DegenerateInput(_)
        | Error::ExhaustedCandidates { .. }
        | Error::ProjectionCollision { .. }
        | Error::ZeroProjection { .. }
        | Error::DomainViolation(_)
        | Error::DuplicateNodes { .. }
        | Error::ZeroNode { .. }
        | Error::MassImbalance { .. }
        | Error::EmptyExpansion
        | Error::Parse(_) => EXIT_DATA,
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => return clap_exit(e, stdout, stderr),
    };
    let config = match cli.config.as_deref().map(RunConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return fail(&e, stderr),
    };
    let cli = match (&cli.command, &config.command) {
        (None, Some(name)) => {
            // the command comes from the configuration file
            let mut with = args.clone();
            with.push(name.into());
            match Cli::try_parse_from(&with) {
                Ok(c) => c,
                Err(e) => return clap_exit(e, stdout, stderr),
            }
        }
        (None, None) => {
            let _ = writeln!(stderr, "error: no command given (see --help)");
            return EXIT_USAGE;
        }
        _ => cli,
    };
    let ctx = Context {
        cli: &cli,
        config: &config,
    };
    let outcome = match cli.command.as_ref().expect("command resolved above") {
        Command::Eval(a) => cmd_eval(&ctx, a, stdout),
        Command::Verify(a) => cmd_verify(&ctx, a, stdout, stderr),
        Command::ProbeC(a) => cmd_probe_c(&ctx, a, stdout, stderr),
        Command::Search(a) => cmd_search(&ctx, a, stdout),
        Command::Reduce3d(a) => cmd_reduce3d(&ctx, a, stdout),
        Command::Branchcut(a) => cmd_branchcut(&ctx, a, stdout),
        Command::Report(a) => cmd_report(&ctx, a, stdout, stderr),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => fail(&e, stderr),
    }
}

fn clap_exit(e: clap::Error, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    use clap::error::ErrorKind;
    let text = e.render().to_string();
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(stdout, "{text}");
            EXIT_OK
        }
        _ => {
            let _ = write!(stderr, "{text}");
            EXIT_USAGE
        }
    }
}

fn fail(e: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    exit_code(e)
}

struct Context<'a> {
    cli: &'a Cli,
    config: &'a RunConfig,
}

impl Context<'_> {
    fn seed(&self) -> u64 {
        self.cli.seed.or(self.config.seed).unwrap_or(0)
    }

    fn trials(&self) -> u64 {
        self.cli.trials.or(self.config.trials).unwrap_or(10)
    }

    fn n_k(&self) -> Result<usize> {
        let n = self.cli.n_k.or(self.config.n_k).unwrap_or(3);
        if n == 0 {
            return Err(Error::InvalidParameter("--nk must be at least 1".into()));
        }
        Ok(n)
    }

    fn precision(&self) -> Precision {
        self.cli.precision.or(self.config.precision).unwrap_or_default()
    }

    fn kind(&self) -> Option<&str> {
        self.cli.kind.as_deref().or(self.config.kind.as_deref())
    }

    fn tolerances(&self) -> Tolerances {
        self.config.tolerances
    }

    fn out(&self) -> Option<&Path> {
        self.cli.out.as_deref().or(self.config.out.as_deref())
    }

    fn input<'p>(&'p self, flag: &'p Option<PathBuf>, name: &str) -> Result<&'p Path> {
        flag.as_deref()
            .or_else(|| self.config.input(name))
            .ok_or_else(|| Error::InvalidParameter(format!("missing --{name}")))
    }

    fn probe_options(&self, m: u32) -> ProbeOptions {
        ProbeOptions {
            m,
            precision: self.precision(),
            singular_relative: self.tolerances().singular_relative,
            ..Default::default()
        }
    }

    /// Writes `bytes` to `--out` if given, else to stdout.
    fn emit(&self, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
        match self.out() {
            Some(path) => std::fs::write(path, bytes)?,
            None => stdout.write_all(bytes)?,
        }
        Ok(())
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

enum AnySpec {
    Complex(crate::complex_basis::ComplexExpansionSpec),
    Real(AnyRealSpec),
}

impl AnySpec {
    fn dim(&self) -> usize {
        match self {
            AnySpec::Complex(_) | AnySpec::Real(AnyRealSpec::Plane(_)) => 2,
            AnySpec::Real(AnyRealSpec::Space(_)) => 3,
        }
    }
}

/// Bad values inside a data file are data errors, whatever the library
/// calls them.
fn as_data_error(e: Error) -> Error {
    match e {
        Error::InvalidParameter(s) => Error::Parse(s),
        Error::BadOrder(m) => Error::Parse(format!("bad order {m}")),
        e => e,
    }
}

/// A spec with `log` or `poles` keys is complex, anything else real.
fn parse_spec(value: Value) -> Result<AnySpec> {
    let complex = value.get("log").is_some() || value.get("poles").is_some();
    let parse = |e: serde_json::Error| Error::Parse(format!("spec: {e}"));
    if complex {
        let doc: ComplexSpecDocument = serde_json::from_value(value).map_err(parse)?;
        doc.to_spec().map(AnySpec::Complex).map_err(as_data_error)
    } else {
        let doc: RealSpecDocument = serde_json::from_value(value).map_err(parse)?;
        doc.to_spec().map(AnySpec::Real).map_err(as_data_error)
    }
}

/// Points as `[[x, y], …]` or `{"points": [[x, y], …]}`.
fn parse_points(value: Value, dim: usize) -> Result<Vec<Vec<f64>>> {
    let rows = match value {
        Value::Object(mut o) => o.remove("points").unwrap_or(Value::Null),
        v => v,
    };
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows)
        .map_err(|e| Error::Parse(format!("points must be an array of coordinate arrays: {e}")))?;
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::Parse(format!(
                "row {i}: {} coordinates, expected {dim}",
                r.len()
            )));
        }
    }
    Ok(rows)
}

fn cmd_eval(ctx: &Context, a: &EvalArgs, stdout: &mut dyn Write) -> Result<i32> {
    let spec = parse_spec(read_json(ctx.input(&a.spec, "spec")?)?)?;
    let points = parse_points(read_json(ctx.input(&a.points, "points")?)?, spec.dim())?;
    let mut csv = String::from(match &spec {
        AnySpec::Complex(_) => "x,y,re,im\n",
        AnySpec::Real(AnyRealSpec::Plane(_)) => "x,y,value\n",
        AnySpec::Real(AnyRealSpec::Space(_)) => "x,y,z,value\n",
    });
    for (i, p) in points.iter().enumerate() {
        let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(r >= 1.0) {
            return Err(Error::DomainViolation(format!("row {i}: |X| = {r} < 1")));
        }
        let row_err = |e: Error| Error::DomainViolation(format!("row {i}: {e}"));
        let coords = p.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let value = match &spec {
            AnySpec::Complex(s) => {
                let w = eval_expansion(s, Complex64::new(p[0], p[1])).map_err(row_err)?;
                format!("{},{}", w.re, w.im)
            }
            AnySpec::Real(AnyRealSpec::Plane(s)) => eval_expansion_r2(s, [p[0], p[1]]).map_err(row_err)?.to_string(),
            AnySpec::Real(AnyRealSpec::Space(s)) => {
                eval_expansion_r3(s, [p[0], p[1], p[2]]).map_err(row_err)?.to_string()
            }
        };
        csv.push_str(&format!("{coords},{value}\n"));
    }
    ctx.emit(csv.as_bytes(), stdout)?;
    Ok(EXIT_OK)
}

fn resolve_kind(name: &str, m: u32) -> Result<BasisKind> {
    match name {
        "pole-m" => {
            if m == 0 {
                return Err(Error::BadOrder(0));
            }
            Ok(BasisKind::Pole(m))
        }
        other => other.parse().map_err(|e| match e {
            Error::Parse(s) => Error::InvalidParameter(s),
            e => e,
        }),
    }
}

fn cmd_verify(ctx: &Context, a: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let kind = resolve_kind(ctx.kind().unwrap_or("log"), a.m)?;
    let n_k = ctx.n_k()?;
    let trials = ctx.trials();
    if trials == 0 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }
    let seed = ctx.seed();
    let tol = ctx.tolerances();
    let options = VerifyOptions {
        n_samples: a.samples,
        sampler: a.sampler,
        singular_relative: tol.singular_relative,
        recovery_tolerance: tol.recovery,
        ..Default::default()
    };
    let verdicts = independence::verify(kind, n_k, trials, seed, &options)?;
    let independent = verdicts.iter().filter(|v| v.verdict == Verdict::Independent).count();
    let flagged = verdicts.len() - independent;
    let mut summary = json!({
        "kind": kind,
        "n_k": n_k,
        "trials": trials,
        "seed": seed,
        "independent": independent,
        "flagged": flagged,
        "min_relative_gram": verdicts.iter().map(|v| v.relative_gram).fold(f64::INFINITY, f64::min),
        "max_recovered_error": verdicts.iter().map(|v| v.recovered_error).fold(0.0, f64::max),
        "status": if kind.theorem_backed() { "theorem" } else { "open" },
    });
    if !kind.theorem_backed() {
        summary["note"] = json!(
            "independence of this kind is conjectured, not proven; flagged trials are evidence about the conjecture, not test failures"
        );
    }
    let mut lines = Vec::new();
    independence::write_jsonl(&verdicts, &mut lines)?;
    match ctx.out() {
        Some(path) => {
            std::fs::write(path, &lines)?;
            stdout.write_all(&json_line(&summary)?)?;
        }
        None => {
            stdout.write_all(&lines)?;
            stderr.write_all(&json_line(&summary)?)?;
        }
    }
    Ok(if flagged == 0 { EXIT_OK } else { EXIT_FLAGGED })
}

fn parse_block_kind(s: &str) -> Result<BlockKind> {
    match s.trim() {
        "log" => Ok(BlockKind::Log),
        t => t
            .strip_prefix("pole")
            .and_then(|m| m.trim_start_matches('-').parse::<u32>().ok())
            .filter(|m| *m >= 1)
            .map(BlockKind::Pole)
            .ok_or_else(|| Error::BadSampler(format!("unknown block kind `{t}` (use log or poleN)"))),
    }
}

fn cmd_probe_c(ctx: &Context, a: &ProbeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let n_k = ctx.n_k()?;
    let options = ctx.probe_options(a.m);
    let run = match &a.kinds {
        Some(names) => {
            let kinds = names.iter().map(|s| parse_block_kind(s)).collect::<Result<Vec<_>>>()?;
            probe::probe_blocks(n_k, &kinds, ctx.trials(), a.sampler, ctx.seed(), &options)?
        }
        None => probe::probe_c(n_k, ctx.trials(), a.sampler, ctx.seed(), &options)?,
    };
    if let Some(log) = a.log.as_deref().or_else(|| ctx.config.input("log")) {
        probe::append_records(log, &run.records)?;
    }
    if let Some(csv) = &a.csv {
        let mut bytes = Vec::new();
        probe::write_records_csv(&run.records, &mut bytes)?;
        std::fs::write(csv, bytes)?;
    }
    ctx.emit(&json_line(&run.report)?, stdout)?;
    stderr.write_all(run.report.render_histogram().as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_search(ctx: &Context, a: &SearchArgs, stdout: &mut dyn Write) -> Result<i32> {
    let result = probe::minimize_sigma_min(ctx.n_k()?, a.restarts, ctx.seed(), a.budget, &ctx.probe_options(a.m))?;
    ctx.emit(&json_line(&result)?, stdout)?;
    Ok(EXIT_OK)
}

fn load_space_spec(text: &str, origin: &str) -> Result<RealExpansionSpec3> {
    let doc: RealSpecDocument = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    match doc.to_spec().map_err(as_data_error)? {
        AnyRealSpec::Space(s) => Ok(s),
        AnyRealSpec::Plane(_) => Err(Error::Parse(format!("{origin}: reduce3d needs dim = 3 sources"))),
    }
}

#[derive(Serialize)]
struct ReduceOutput {
    mass: Option<ReductionReport>,
    dipole: Option<ReductionReport>,
    tolerance: f64,
    pass: bool,
}

fn cmd_reduce3d(ctx: &Context, a: &ReduceArgs, stdout: &mut dyn Write) -> Result<i32> {
    let spec = match a.spec.as_deref().or_else(|| ctx.config.input("spec")) {
        Some(path) => load_space_spec(&std::fs::read_to_string(path)?, &path.display().to_string())?,
        None => load_space_spec(BUNDLED_REDUCE3D_SPEC, "bundled spec")?,
    };
    let options = ReductionOptions {
        half_length: a.length,
        probes: a.probes,
        probe_radius: a.radius,
        quadrature: !a.no_quadrature,
        ..Default::default()
    };
    let has_mass = spec.masses.iter().any(|m| *m != 0.0);
    let has_dipole = spec.dipoles.iter().flatten().any(|c| *c != 0.0);
    if !has_mass && !has_dipole {
        return Err(Error::EmptyExpansion);
    }
    let mass = if has_mass {
        Some(reduction::reduce_pm_r3(&spec, &options)?.report)
    } else {
        None
    };
    let dipole = if has_dipole {
        Some(reduction::reduce_dipole_r3(&spec, &options)?.report)
    } else {
        None
    };
    let tolerance = ctx.tolerances().reduction;
    let pass = mass.iter().chain(&dipole).all(|r| r.defect < tolerance);
    let out = ReduceOutput {
        mass,
        dipole,
        tolerance,
        pass,
    };
    ctx.emit(&json_line(&out)?, stdout)?;
    Ok(if pass { EXIT_OK } else { EXIT_FLAGGED })
}

/// `0.9i`, `0.3-0.4i`, `0.5` or `re,im`.
pub fn parse_node(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let parsed = match s.split_once(',') {
        Some((re, im)) => re
            .trim()
            .parse::<f64>()
            .ok()
            .zip(im.trim().parse::<f64>().ok())
            .map(|(re, im)| Complex64::new(re, im)),
        None => s.parse::<Complex64>().ok(),
    };
    parsed.ok_or_else(|| Error::InvalidParameter(format!("cannot parse `{s}` as a complex number")))
}

#[derive(Serialize)]
struct BranchcutOutput {
    zk: [f64; 2],
    samples: usize,
    bound: f64,
    per_radius: Vec<(f64, f64)>,
    max_abs_im: f64,
    margin: f64,
    pass: bool,
}

fn cmd_branchcut(ctx: &Context, a: &BranchcutArgs, stdout: &mut dyn Write) -> Result<i32> {
    let zk = parse_node(&a.zk)?;
    let bound = ctx.tolerances().branch_bound;
    if a.radii.is_empty() {
        return Err(Error::InvalidParameter("need at least one radius".into()));
    }
    let per_radius = a
        .radii
        .iter()
        .map(|&r| verify_branch_free(zk, r, a.samples).map(|m| (r, m)))
        .collect::<Result<Vec<_>>>()?;
    let max_abs_im = per_radius.iter().map(|p| p.1).fold(0.0, f64::max);
    let margin = bound - max_abs_im;
    let pass = max_abs_im < bound;
    if ctx.out().is_some() {
        let out = BranchcutOutput {
            zk: [zk.re, zk.im],
            samples: a.samples,
            bound,
            per_radius: per_radius.clone(),
            max_abs_im,
            margin,
            pass,
        };
        ctx.emit(&json_line(&out)?, stdout)?;
    }
    for (r, m) in &per_radius {
        writeln!(stdout, "radius {r}: max |Im psi| = {m:.17e}")?;
    }
    writeln!(
        stdout,
        "{} max |Im psi| = {max_abs_im:.17e} < {bound} margin {margin:.17e}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_FLAGGED })
}

fn cmd_report(ctx: &Context, a: &ReportArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let path = ctx.input(&a.log, "log")?;
    let records = probe::read_records(path)?;
    let report = ProbeReport::from_records(&records);
    ctx.emit(&json_line(&report)?, stdout)?;
    stderr.write_all(report.render_histogram().as_bytes())?;
    Ok(EXIT_OK)
}
