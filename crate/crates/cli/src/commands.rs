//! The four subcommands: spectrum, framing, verify, export.
//!
//! Each returns the process exit code: 0 success, 1 a numerical threshold
//! failed, while hard errors (config 2, solver 3) surface as `CliError`.

use std::path::Path;

use spinframe_core::dirac::{
    cluster_multiplicities, dense_spectrum, eigensolve_with, flat_spectrum_on_grid,
    flat_spectrum_oracle, plane_wave_eigenspinor, EigenPair, OperatorSpec, DEFAULT_DENSE_CAP,
};
use spinframe_core::framing::{
    conformal_rescale, framing_from_eigenpair, framing_from_eigenspinor, Framing,
};
use spinframe_core::verify::{
    evenness_check, framing_report, kernel_dimension, quaternionic_commutation_check,
};

use crate::config::{JobConfig, SourceConfig};
use crate::errors::{CliError, CliResult};
use crate::fields_io::{read_fields_csv, write_fields_csv, write_fields_vtk};
use crate::report::{
    write_report, ClusterEntry, CommutationSection, FramingReportFile, KernelSection,
    OracleComparison, OracleEntry, OracleSection, SolverEcho, SourceEcho, SpectrumReport,
    VerifyReport,
};

const COMMUTATION_TOL: f64 = 1e-12;
const KERNEL_TOL: f64 = 1e-8;
const DENSE_ORACLE_TOL: f64 = 1e-10;
const DENSE_SOLVER_TOL: f64 = 1e-8;

fn relative_gap_tol(lambdas: &[f64]) -> f64 {
    let max_abs = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    1e-6 * max_abs.max(1.0)
}

fn expected_kernel(spec: &OperatorSpec) -> usize {
    // The kernel is a conformal invariant: constants for the periodic
    // structure, empty otherwise.
    if spec.spin.is_trivial() {
        2
    } else {
        0
    }
}

fn oracle_comparison(spec: &OperatorSpec, pairs: &[EigenPair]) -> CliResult<OracleComparison> {
    let max_abs = pairs.iter().fold(0.0f64, |m, p| m.max(p.lambda.abs()));
    let lambda_max = (1.05 * max_abs).max(1.0);
    let oracle =
        flat_spectrum_oracle(&spec.lattice, &spec.spin, lambda_max).map_err(CliError::from)?;
    let values: Vec<f64> = oracle.iter().map(|(l, _)| *l).collect();
    let mut entries = Vec::with_capacity(pairs.len());
    let mut worst: f64 = 0.0;
    for p in pairs {
        let nearest = values
            .iter()
            .cloned()
            .min_by(|a, b| {
                (a - p.lambda)
                    .abs()
                    .partial_cmp(&(b - p.lambda).abs())
                    .expect("finite")
            })
            .unwrap_or(0.0);
        let deviation = (nearest - p.lambda).abs();
        worst = worst.max(deviation);
        entries.push(OracleEntry {
            lambda: p.lambda,
            lambda_oracle: nearest,
            deviation,
        });
    }
    Ok(OracleComparison {
        max_abs_deviation: worst,
        entries,
    })
}

pub fn cmd_spectrum(cfg: &JobConfig, out: Option<&Path>, seed: Option<u64>) -> CliResult<i32> {
    let spec = cfg.build_spec()?;
    // Cluster completion keeps the multiplicity table honest when the
    // requested count would cut through a degenerate eigenspace.
    let mut opts = cfg.solver_options(seed);
    opts.complete_clusters = true;
    let pairs = eigensolve_with(&spec, &opts)?;

    let lambdas: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
    let residuals: Vec<f64> = pairs.iter().map(|p| p.residual).collect();
    let clusters = cluster_multiplicities(&pairs, relative_gap_tol(&lambdas));
    let evenness = evenness_check(&clusters);
    let kernel_dim = lambdas.iter().filter(|l| l.abs() < KERNEL_TOL).count();
    let oracle = if spec.is_flat() {
        Some(oracle_comparison(&spec, &pairs)?)
    } else {
        None
    };
    let pass = residuals.iter().all(|r| *r <= opts.tol);

    let report = SpectrumReport {
        eigenvalues: lambdas,
        residuals: residuals.clone(),
        clusters: clusters.iter().map(ClusterEntry::from).collect(),
        all_clusters_even: evenness,
        kernel_dimension: kernel_dim,
        oracle_comparison: oracle,
        solver: SolverEcho {
            count: opts.count,
            tol: opts.tol,
            max_iter: opts.max_iter,
            seed: opts.seed,
        },
        pass,
    };
    let dir = cfg.out_dir(out);
    let path = write_report(&dir, "spectrum", "spectrum", &report)?;
    let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "spectrum: {} eigenpairs, worst residual {worst:.2e}, {} clusters (even: {evenness}) -> {}",
        report.eigenvalues.len(),
        report.clusters.len(),
        path.display()
    );
    Ok(if pass { 0 } else { 1 })
}

struct SelectedSource {
    framing: Framing,
    echo: SourceEcho,
    warnings: Vec<String>,
    solver_conformal: bool,
}

fn select_source(
    cfg: &JobConfig,
    spec: &OperatorSpec,
    seed: Option<u64>,
) -> CliResult<SelectedSource> {
    let source = cfg
        .framing
        .as_ref()
        .map(|f| f.source.clone())
        .unwrap_or(SourceConfig::SmallestPositive);
    let mut warnings = Vec::new();
    match source {
        SourceConfig::PlaneWave { k, sign } => {
            if !spec.is_flat() {
                return Err(CliError::Config(
                    "framing.source: plane_wave sources require a flat metric".into(),
                ));
            }
            let (lambda, phi) =
                plane_wave_eigenspinor(&spec.lattice, &spec.spin, &spec.grid, k, sign)?;
            let framing = framing_from_eigenspinor(&phi, spec)?;
            Ok(SelectedSource {
                framing,
                echo: SourceEcho {
                    kind: format!("plane_wave k={k:?} sign={sign:+}"),
                    lambda: Some(lambda),
                    cluster_id: None,
                    rescaled: false,
                },
                warnings,
                solver_conformal: false,
            })
        }
        SourceConfig::SmallestPositive | SourceConfig::Index { .. } => {
            let opts = cfg.solver_options(seed);
            let pairs = eigensolve_with(spec, &opts)?;
            let pair = match source {
                SourceConfig::SmallestPositive => pairs
                    .iter()
                    .filter(|p| p.lambda > KERNEL_TOL)
                    .min_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"))
                    .ok_or_else(|| {
                        CliError::Config(
                            "framing.source: no strictly positive eigenvalue among the computed \
                             pairs; increase solver.count"
                                .into(),
                        )
                    })?,
                SourceConfig::Index { index } => pairs.get(index).ok_or_else(|| {
                    CliError::Config(format!(
                        "framing.source.index: {index} out of range (computed {})",
                        pairs.len()
                    ))
                })?,
                SourceConfig::PlaneWave { .. } => unreachable!(),
            };
            if pair.lambda.abs() <= KERNEL_TOL {
                warnings.push(
                    "harmonic source (lambda ~ 0): the divergence identity holds for any real \
                     eigenvalue, proceeding"
                        .into(),
                );
            }
            let framing = framing_from_eigenpair(pair, spec)?;
            Ok(SelectedSource {
                framing,
                echo: SourceEcho {
                    kind: "eigenpair".into(),
                    lambda: Some(pair.lambda),
                    cluster_id: Some(pair.cluster_id),
                    rescaled: false,
                },
                warnings,
                solver_conformal: !spec.is_flat(),
            })
        }
    }
}

pub fn cmd_framing(cfg: &JobConfig, out: Option<&Path>, seed: Option<u64>) -> CliResult<i32> {
    let spec = cfg.build_spec()?;
    let mut selected = select_source(cfg, &spec, seed)?;

    if let Some(f) = cfg.rescale_factor() {
        selected.framing = conformal_rescale(&selected.framing, &f)?;
        selected.echo.rescaled = true;
    }

    let metrics = framing_report(&selected.framing)?;
    let thresholds = cfg.thresholds(selected.solver_conformal);
    let pass = metrics.max_abs_divergence <= thresholds.max_divergence
        && metrics.max_orthogonality_defect <= thresholds.max_orthogonality
        && metrics.max_length_spread <= thresholds.max_length_spread;

    let dir = cfg.out_dir(out);
    std::fs::create_dir_all(&dir)?;
    let fields_file = "framing_fields.csv";
    let [x1, x2, x3] = selected.framing.fields();
    write_fields_csv(
        &dir.join(fields_file),
        selected.framing.lattice(),
        &selected.framing.grid(),
        &[("x1", x1), ("x2", x2), ("x3", x3)],
    )?;

    let report = FramingReportFile {
        source: selected.echo,
        metrics: (&metrics).into(),
        thresholds: thresholds.into(),
        warnings: selected.warnings.clone(),
        fields_file: fields_file.into(),
        pass,
    };
    let path = write_report(&dir, "framing", "framing", &report)?;
    for w in &selected.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "framing: max|div| {:.2e}, ortho {:.2e}, spread {:.2e}, min length {:.3e} ({}) -> {}",
        metrics.max_abs_divergence,
        metrics.max_orthogonality_defect,
        metrics.max_length_spread,
        metrics.min_g_length,
        if pass { "pass" } else { "FAIL" },
        path.display()
    );
    Ok(if pass { 0 } else { 1 })
}

pub fn cmd_verify(
    cfg: &JobConfig,
    out: Option<&Path>,
    seed: Option<u64>,
    force_dense: bool,
) -> CliResult<i32> {
    let spec = cfg.build_spec()?;
    let opts = cfg.solver_options(seed);

    let defect = quaternionic_commutation_check(&spec, 10, opts.seed)?;
    let commutation = CommutationSection {
        trials: 10,
        defect,
        tolerance: COMMUTATION_TOL,
        pass: defect <= COMMUTATION_TOL,
    };

    let mut opts = opts;
    opts.complete_clusters = true;
    let pairs = eigensolve_with(&spec, &opts)?;
    let lambdas: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
    let clusters = cluster_multiplicities(&pairs, relative_gap_tol(&lambdas));
    let evenness = evenness_check(&clusters);

    let kdim = kernel_dimension(&spec, KERNEL_TOL)?;
    let kernel = KernelSection {
        dimension: kdim,
        expected: expected_kernel(&spec),
        tolerance: KERNEL_TOL,
        pass: kdim == expected_kernel(&spec),
    };

    let dim = 2 * spec.grid.len();
    let dense = if force_dense && dim > DEFAULT_DENSE_CAP {
        return Err(CliError::Config(format!(
            "--dense-oracle: operator dimension {dim} exceeds the dense cap {DEFAULT_DENSE_CAP}"
        )));
    } else if dim <= DEFAULT_DENSE_CAP {
        let dense_vals = dense_spectrum(&spec)?;
        let (max_dev, tol) = if spec.is_flat() {
            let oracle = flat_spectrum_on_grid(&spec.lattice, &spec.spin, &spec.grid);
            let dev = dense_vals
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            (dev, DENSE_ORACLE_TOL)
        } else {
            // Conformal: the iterative pairs must sit inside the dense spectrum.
            let dev = pairs
                .iter()
                .map(|p| {
                    dense_vals
                        .iter()
                        .map(|d| (d - p.lambda).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0f64, f64::max);
            (dev, DENSE_SOLVER_TOL)
        };
        Some(OracleSection {
            max_abs_deviation: max_dev,
            tolerance: tol,
            pass: max_dev <= tol,
        })
    } else {
        None
    };

    let pass = commutation.pass
        && evenness
        && kernel.pass
        && dense.as_ref().map(|d| d.pass).unwrap_or(true);

    let report = VerifyReport {
        commutation,
        clusters: clusters.iter().map(ClusterEntry::from).collect(),
        all_clusters_even: evenness,
        kernel,
        dense_oracle: dense,
        pass,
    };
    let dir = cfg.out_dir(out);
    let path = write_report(&dir, "verify", "verify", &report)?;
    println!(
        "verify: commutation {defect:.2e}, clusters even: {evenness}, kernel {kdim} ({}) -> {}",
        if pass { "pass" } else { "FAIL" },
        path.display()
    );
    Ok(if pass { 0 } else { 1 })
}

pub fn cmd_export(cfg: &JobConfig, out: Option<&Path>) -> CliResult<i32> {
    let grid = cfg.grid_obj()?;
    let lattice = cfg.lattice()?;
    let dir = cfg.out_dir(out);
    let input = dir.join("framing_fields.csv");
    if !input.exists() {
        return Err(CliError::Config(format!(
            "export: missing input {}; run the framing command first",
            input.display()
        )));
    }
    let fields = read_fields_csv(&input, &grid)?;
    let named: Vec<(&str, &spinframe_core::domain::VectorField)> =
        fields.iter().map(|(n, f)| (n.as_str(), f)).collect();

    let csv_out = dir.join("export_fields.csv");
    write_fields_csv(&csv_out, &lattice, &grid, &named)?;
    let vtk_out = dir.join("framing_fields.vtk");
    write_fields_vtk(&vtk_out, &lattice, &grid, &named)?;
    println!(
        "export: {} fields, {} nodes -> {}, {}",
        named.len(),
        grid.len(),
        csv_out.display(),
        vtk_out.display()
    );
    Ok(0)
}
