//! Report structures and deterministic JSON output.
//!
//! Report files contain no timestamps, so identical config + seed produces
//! byte-identical bytes; run metadata (timestamp, version, command) goes to a
//! sibling `<name>.meta.json`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use spinframe_core::dirac::ClusterSummary;
use spinframe_core::verify::FramingReport;

use crate::config::Thresholds;
use crate::errors::CliResult;

#[derive(Serialize)]
pub struct ClusterEntry {
    pub lambda_mean: f64,
    pub multiplicity: usize,
    pub simple_over_h: bool,
}

impl From<&ClusterSummary> for ClusterEntry {
    fn from(c: &ClusterSummary) -> Self {
        Self {
            lambda_mean: c.lambda_mean,
            multiplicity: c.multiplicity,
            simple_over_h: c.simple_over_h,
        }
    }
}

#[derive(Serialize)]
pub struct OracleEntry {
    pub lambda: f64,
    pub lambda_oracle: f64,
    pub deviation: f64,
}

#[derive(Serialize)]
pub struct OracleComparison {
    pub max_abs_deviation: f64,
    pub entries: Vec<OracleEntry>,
}

#[derive(Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<ClusterEntry>,
    pub all_clusters_even: bool,
    pub kernel_dimension: usize,
    /// Present for flat metrics only.
    pub oracle_comparison: Option<OracleComparison>,
    pub solver: SolverEcho,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SolverEcho {
    pub count: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct SourceEcho {
    pub kind: String,
    pub lambda: Option<f64>,
    pub cluster_id: Option<usize>,
    pub rescaled: bool,
}

#[derive(Serialize)]
pub struct FramingMetrics {
    pub max_abs_divergence: f64,
    pub divergence_over_max_length: f64,
    pub max_orthogonality_defect: f64,
    pub max_length_spread: f64,
    pub min_g_length: f64,
    pub max_g_length: f64,
    pub degenerate: bool,
}

impl From<&FramingReport> for FramingMetrics {
    fn from(r: &FramingReport) -> Self {
        Self {
            max_abs_divergence: r.max_abs_divergence,
            divergence_over_max_length: r.divergence_over_max_length,
            max_orthogonality_defect: r.max_orthogonality_defect,
            max_length_spread: r.max_length_spread,
            min_g_length: r.min_g_length,
            max_g_length: r.max_g_length,
            degenerate: r.degenerate,
        }
    }
}

#[derive(Serialize)]
pub struct ThresholdsEcho {
    pub max_divergence: f64,
    pub max_orthogonality: f64,
    pub max_length_spread: f64,
}

impl From<Thresholds> for ThresholdsEcho {
    fn from(t: Thresholds) -> Self {
        Self {
            max_divergence: t.max_divergence,
            max_orthogonality: t.max_orthogonality,
            max_length_spread: t.max_length_spread,
        }
    }
}

#[derive(Serialize)]
pub struct FramingReportFile {
    pub source: SourceEcho,
    pub metrics: FramingMetrics,
    pub thresholds: ThresholdsEcho,
    pub warnings: Vec<String>,
    pub fields_file: String,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct CommutationSection {
    pub trials: usize,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct KernelSection {
    pub dimension: usize,
    pub expected: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct OracleSection {
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub commutation: CommutationSection,
    pub clusters: Vec<ClusterEntry>,
    pub all_clusters_even: bool,
    pub kernel: KernelSection,
    /// Dense cross-check; present when the grid is small enough or forced.
    pub dense_oracle: Option<OracleSection>,
    pub pass: bool,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    version: &'a str,
    timestamp_unix_seconds: u64,
}

/// Writes `<stem>.report.json` (deterministic) and `<stem>.meta.json`
/// (timestamped) into `dir`, returning the report path.
pub fn write_report<T: Serialize>(
    dir: &Path,
    stem: &str,
    command: &str,
    report: &T,
) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let report_path = dir.join(format!("{stem}.report.json"));
    let mut text = serde_json::to_string_pretty(report).expect("report serialization");
    text.push('\n');
    std::fs::write(&report_path, text)?;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = RunMeta {
        command,
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix_seconds: timestamp,
    };
    let mut meta_text = serde_json::to_string_pretty(&meta).expect("meta serialization");
    meta_text.push('\n');
    std::fs::write(dir.join(format!("{stem}.meta.json")), meta_text)?;
    Ok(report_path)
}
