//! JSON job configuration: parsing, validation with field-precise messages,
//! and conversion into the core domain types.
//!
//! All physical quantities are in lattice-length units.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use spinframe_core::dirac::{OperatorSpec, SolverOptions};
use spinframe_core::domain::{ConformalFactor, Grid, HarmonicTerm, Lattice, SpinStructure};

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub lattice: LatticeConfig,
    pub spin: [u8; 3],
    pub grid: [usize; 3],
    #[serde(default)]
    pub conformal: Option<FactorConfig>,
    /// Target rescale factor f for the framing command (fields pick up f⁻³).
    #[serde(default)]
    pub rescale: Option<FactorConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub framing: Option<FramingConfig>,
    #[serde(default)]
    pub thresholds: Option<ThresholdsConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// 3×3 basis, 9 reals row-major; the columns are the lattice generators.
    pub basis: [f64; 9],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub offset: f64,
    #[serde(default)]
    pub terms: Vec<TermConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub m: [i32; 3],
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_count() -> usize {
    6
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    400
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramingConfig {
    pub source: SourceConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    /// The eigenpair with the smallest strictly positive eigenvalue.
    SmallestPositive,
    /// A specific index into the ascending eigenpair list.
    Index { index: usize },
    /// Closed-form plane-wave eigenspinor, no solver involved.
    PlaneWave { k: [i64; 3], sign: i32 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsConfig {
    pub max_divergence: Option<f64>,
    pub max_orthogonality: Option<f64>,
    pub max_length_spread: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

/// Report thresholds after defaulting: tight for flat/closed-form sources,
/// looser for solver-produced conformal eigenspinors.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub max_divergence: f64,
    pub max_orthogonality: f64,
    pub max_length_spread: f64,
}

impl JobConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: JobConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!(
                "config {}: parse error at line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Semantic validation beyond JSON shape; message text names the field.
    pub fn validate(&self) -> CliResult<()> {
        if self.grid.iter().any(|&n| n % 2 != 0) {
            return Err(CliError::Config(format!(
                "grid: grid dimensions must be even, got {:?}",
                self.grid
            )));
        }
        if self.grid.iter().any(|&n| n < 4) {
            return Err(CliError::Config(format!(
                "grid: grid dimensions must be at least 4, got {:?}",
                self.grid
            )));
        }
        if self.spin.iter().any(|&f| f > 1) {
            return Err(CliError::Config(format!(
                "spin: flags must be 0 or 1, got {:?}",
                self.spin
            )));
        }
        if self.solver.tol.is_nan() || self.solver.tol <= 0.0 {
            return Err(CliError::Config(format!(
                "solver.tol: must be positive, got {}",
                self.solver.tol
            )));
        }
        if self.solver.count == 0 {
            return Err(CliError::Config("solver.count: must be at least 1".into()));
        }
        // Lattice / factor validation happens on construction below.
        self.build_spec().map(|_| ())
    }

    pub fn lattice(&self) -> CliResult<Lattice> {
        Lattice::from_row_major(self.lattice.basis)
            .map_err(|e| CliError::Config(format!("lattice.basis: {e}")))
    }

    pub fn grid_obj(&self) -> CliResult<Grid> {
        Grid::new(self.grid).map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn spin_obj(&self) -> CliResult<SpinStructure> {
        SpinStructure::from_flags(self.spin).map_err(|e| CliError::Config(format!("spin: {e}")))
    }

    pub fn conformal_factor(&self) -> Option<ConformalFactor> {
        self.conformal.as_ref().map(factor_from_config)
    }

    pub fn rescale_factor(&self) -> Option<ConformalFactor> {
        self.rescale.as_ref().map(factor_from_config)
    }

    pub fn build_spec(&self) -> CliResult<OperatorSpec> {
        let lattice = self.lattice()?;
        let grid = self.grid_obj()?;
        let spin = self.spin_obj()?;
        match self.conformal_factor() {
            Some(h) => OperatorSpec::conformal(lattice, spin, grid, h)
                .map_err(|e| CliError::Config(format!("conformal: {e}"))),
            None => Ok(OperatorSpec::flat(lattice, spin, grid)),
        }
    }

    pub fn solver_options(&self, seed_override: Option<u64>) -> SolverOptions {
        let mut opts = SolverOptions::new(
            self.solver.count,
            self.solver.tol,
            seed_override.unwrap_or(self.solver.seed),
        );
        opts.max_iter = self.solver.max_iter;
        opts
    }

    /// Effective thresholds for a framing report. `solver_conformal` selects
    /// the looser defaults used for solver-produced conformal eigenspinors.
    pub fn thresholds(&self, solver_conformal: bool) -> Thresholds {
        let (div, ortho, spread) = if solver_conformal {
            (1e-6, 1e-8, 1e-8)
        } else {
            (1e-10, 1e-12, 1e-12)
        };
        let t = self.thresholds.as_ref();
        Thresholds {
            max_divergence: t.and_then(|t| t.max_divergence).unwrap_or(div),
            max_orthogonality: t.and_then(|t| t.max_orthogonality).unwrap_or(ortho),
            max_length_spread: t.and_then(|t| t.max_length_spread).unwrap_or(spread),
        }
    }

    pub fn out_dir(&self, cli_out: Option<&Path>) -> PathBuf {
        cli_out
            .map(Path::to_path_buf)
            .or_else(|| self.output.as_ref().map(|o| o.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

fn factor_from_config(cfg: &FactorConfig) -> ConformalFactor {
    ConformalFactor::new(
        cfg.offset,
        cfg.terms
            .iter()
            .map(|t| HarmonicTerm {
                m: t.m,
                amplitude: t.amplitude,
                phase: t.phase,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> serde_json::Value {
        serde_json::json!({
            "lattice": {"basis": [1.0,0,0, 0,1.0,0, 0,0,1.0]},
            "spin": [0,0,0],
            "grid": [8,8,8],
            "solver": {"count": 4, "tol": 1e-8, "max_iter": 300, "seed": 7}
        })
    }

    #[test]
    fn parses_minimal_config() {
        let cfg: JobConfig = serde_json::from_value(base_json()).unwrap();
        cfg.validate().unwrap();
        assert!(cfg.build_spec().unwrap().is_flat());
    }

    #[test]
    fn rejects_odd_grid_with_precise_message() {
        let mut v = base_json();
        v["grid"] = serde_json::json!([7, 8, 8]);
        let cfg: JobConfig = serde_json::from_value(v).unwrap();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(
            err.message().contains("grid dimensions must be even"),
            "{err}"
        );
    }

    #[test]
    fn rejects_nonpositive_conformal_factor() {
        let mut v = base_json();
        v["conformal"] = serde_json::json!({
            "offset": 0.2,
            "terms": [{"m": [1,0,0], "amplitude": 1.0}]
        });
        let cfg: JobConfig = serde_json::from_value(v).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.message().contains("conformal"), "{err}");
    }

    #[test]
    fn threshold_defaults_follow_source_kind() {
        let cfg: JobConfig = serde_json::from_value(base_json()).unwrap();
        let tight = cfg.thresholds(false);
        assert_eq!(tight.max_divergence, 1e-10);
        let loose = cfg.thresholds(true);
        assert_eq!(loose.max_divergence, 1e-6);
    }
}
