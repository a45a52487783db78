//! Run configuration: a JSON file whose values command-line flags override.
//!
//! ```json
//! {
//!   "command": "verify",
//!   "seed": 7,
//!   "precision": "double",
//!   "trials": 10,
//!   "n_k": 3,
//!   "kind": "log",
//!   "inputs": {"spec": "spec.json", "points": "points.json"},
//!   "out": "verdicts.jsonl",
//!   "tolerances": {"singular_relative": 1e-10, "recovery": 1e-8,
//!                  "branch_bound": 1.5707963267948966, "reduction": 1e-6}
//! }
//! ```
//!
//! Every field is optional. Relative paths resolve against the directory
//! of the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Precision, SINGULAR_RELATIVE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// σ_min/σ_max at or below which a matrix counts as singular.
    pub singular_relative: f64,
    /// Absolute error allowed when recovering O(1) strengths.
    pub recovery: f64,
    /// Strict upper bound for max |Im ψ_k| on |z| ≥ 1.
    pub branch_bound: f64,
    /// Largest acceptable reduction defect.
    pub reduction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            singular_relative: SINGULAR_RELATIVE,
            recovery: crate::independence::RECOVERY_TOLERANCE,
            branch_bound: std::f64::consts::FRAC_PI_2,
            reduction: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("singular_relative", self.singular_relative),
            ("recovery", self.recovery),
            ("branch_bound", self.branch_bound),
            ("reduction", self.reduction),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    /// Named input files (`spec`, `points`, `log`).
    pub inputs: BTreeMap<String, PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<Precision>,
    pub trials: Option<u64>,
    pub n_k: Option<usize>,
    pub kind: Option<String>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Reads and validates a configuration file, resolving its relative
    /// paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for p in config.inputs.values_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(out) = config.out.as_mut() {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        config.tolerances.validate()?;
        Ok(config)
    }

    pub fn input(&self, name: &str) -> Option<&Path> {
        self.inputs.get(name).map(PathBuf::as_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_resolves_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"seed": 3, "inputs": {"spec": "s.json"}, "out": "/tmp/x.csv", "tolerances": {"recovery": 1e-9}}"#,
        )
        .unwrap();
        let c = RunConfig::load(&path).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.input("spec").unwrap(), dir.path().join("s.json"));
        assert_eq!(c.out.as_deref(), Some(Path::new("/tmp/x.csv")));
        assert_eq!(c.tolerances.recovery, 1e-9);
        assert_eq!(c.tolerances.singular_relative, 1e-10);
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"sed": 3}"#).unwrap();
        assert!(matches!(RunConfig::load(&path), Err(Error::Parse(_))));
        std::fs::write(&path, r#"{"tolerances": {"reduction": -1}}"#).unwrap();
        assert!(matches!(RunConfig::load(&path), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            RunConfig::load(&dir.path().join("missing.json")),
            Err(Error::Io(_))
        ));
    }
}
