//! End-to-end conformal runs on small grids: kernel invariance, framing
//! certification, and the rescale identity.

use spinframe_core::dirac::{cluster_multiplicities, eigensolve, OperatorSpec};
use spinframe_core::domain::{ConformalFactor, Grid, HarmonicTerm, Lattice, SpinStructure};
use spinframe_core::framing::{conformal_rescale, framing_from_eigenpair, min_pointwise_norm};
use spinframe_core::verify::{evenness_check, framing_report, kernel_dimension};

fn test_factor() -> ConformalFactor {
    ConformalFactor::new(
        1.5,
        vec![HarmonicTerm {
            m: [1, 0, 0],
            amplitude: 0.4,
            phase: 0.0,
        }],
    )
}

#[test]
fn kernel_dimension_flat_cases() {
    let grid = Grid::cubic(8).unwrap();
    let lattice = Lattice::unit_cube();
    let flat = OperatorSpec::flat(lattice, SpinStructure::trivial(), grid);
    assert_eq!(kernel_dimension(&flat, 1e-8).unwrap(), 2);

    let twisted = OperatorSpec::flat(lattice, SpinStructure::new([true, false, false]), grid);
    assert_eq!(kernel_dimension(&twisted, 1e-8).unwrap(), 0);
}

#[test]
fn kernel_dimension_survives_conformal_change() {
    let grid = Grid::cubic(8).unwrap();
    let lattice = Lattice::unit_cube();
    let spec =
        OperatorSpec::conformal(lattice, SpinStructure::trivial(), grid, test_factor()).unwrap();
    assert_eq!(kernel_dimension(&spec, 1e-8).unwrap(), 2);

    // The two smallest-|λ| pairs are exactly the harmonic ones.
    let pairs = eigensolve(&spec, 2, 1e-8, 4).unwrap();
    assert!(pairs.iter().all(|p| p.lambda.abs() <= 1e-8));

    let twisted = OperatorSpec::conformal(
        lattice,
        SpinStructure::new([true, false, false]),
        grid,
        test_factor(),
    )
    .unwrap();
    assert_eq!(kernel_dimension(&twisted, 1e-8).unwrap(), 0);
}

#[test]
fn conformal_eigenpairs_have_even_clusters_and_yield_certified_framings() {
    let grid = Grid::cubic(8).unwrap();
    let lattice = Lattice::unit_cube();
    let spec =
        OperatorSpec::conformal(lattice, SpinStructure::trivial(), grid, test_factor()).unwrap();
    // 2 kernel + the full 8-dim first nonzero shell.
    let pairs = eigensolve(&spec, 10, 1e-8, 11).unwrap();
    let w = spec.weight().unwrap();
    for p in &pairs {
        assert!(p.residual <= 1e-8, "residual {}", p.residual);
        let n = spinframe_core::domain::weighted_norm(&p.field, &w).unwrap();
        assert!((n - 1.0).abs() <= 1e-12, "weighted norm {n}");
    }
    let max_abs = pairs.iter().map(|p| p.lambda.abs()).fold(0.0f64, f64::max);
    let clusters = cluster_multiplicities(&pairs, 1e-6 * max_abs.max(1.0));
    assert!(evenness_check(&clusters), "clusters {clusters:?}");

    let first_nonzero = pairs.iter().find(|p| p.lambda > 1e-6).unwrap();
    let fr = framing_from_eigenpair(first_nonzero, &spec).unwrap();
    let report = framing_report(&fr).unwrap();
    // 8³ resolution: the h⁻¹ spectral tail at this Nyquist dominates (~5e-4);
    // the 16³ acceptance run pins the tight threshold.
    assert!(
        report.max_abs_divergence <= 5e-3,
        "div {}",
        report.max_abs_divergence
    );
    assert!(report.max_orthogonality_defect <= 1e-12);
    assert!(report.max_length_spread <= 1e-12);
    assert!(report.min_g_length > 0.0);
    assert!(!report.degenerate);
    assert!(min_pointwise_norm(&fr) > 0.0);
}

#[test]
fn report_divergence_is_monotone_in_solver_tolerance() {
    let grid = Grid::cubic(8).unwrap();
    let lattice = Lattice::unit_cube();
    let spec =
        OperatorSpec::conformal(lattice, SpinStructure::trivial(), grid, test_factor()).unwrap();
    let mut divs = Vec::new();
    for tol in [2e-7, 1e-7] {
        let pairs = eigensolve(&spec, 4, tol, 11).unwrap();
        let p = pairs.iter().find(|p| p.lambda > 1e-6).unwrap();
        let fr = framing_from_eigenpair(p, &spec).unwrap();
        divs.push(framing_report(&fr).unwrap().max_abs_divergence);
    }
    // Halving the tolerance may move the report only within a decade.
    assert!(divs[1] <= 10.0 * divs[0] + 1e-15, "divs {divs:?}");
}

#[test]
fn rescale_transports_divergence_freeness_exactly() {
    let grid = Grid::cubic(16).unwrap();
    let lattice = Lattice::unit_cube();
    let spec = OperatorSpec::flat(lattice, SpinStructure::trivial(), grid);
    let (_, phi) = spinframe_core::dirac::plane_wave_eigenspinor(
        &lattice,
        &SpinStructure::trivial(),
        &grid,
        [1, 1, 0],
        1,
    )
    .unwrap();
    let fr = spinframe_core::framing::framing_from_eigenspinor(&phi, &spec).unwrap();
    let base = framing_report(&fr).unwrap();
    assert!(base.max_abs_divergence <= 1e-10);

    let f = ConformalFactor::new(
        1.3,
        vec![HarmonicTerm {
            m: [0, 1, 0],
            amplitude: 0.25,
            phase: std::f64::consts::FRAC_PI_2,
        }],
    );
    let rescaled = conformal_rescale(&fr, &f).unwrap();
    let report = framing_report(&rescaled).unwrap();
    let scale = report.max_g_length.max(1.0);
    assert!(
        report.max_abs_divergence <= 1e-10 * scale,
        "rescaled divergence {}",
        report.max_abs_divergence
    );
    assert!(report.max_orthogonality_defect <= 1e-12);
    assert!(report.max_length_spread <= 1e-12);
}
