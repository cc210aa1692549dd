//! Cross-validation of the three spectral routes: plane-wave oracle, dense
//! matrix assembly, and the iterative solver, across lattices and all 8 spin
//! structures.

use nalgebra::{Matrix3, Vector3};
use spinframe_core::dirac::{
    dense_spectrum, eigensolve, flat_spectrum_on_grid, flat_spectrum_oracle, OperatorSpec,
};
use spinframe_core::domain::{ConformalFactor, Grid, Lattice, SpinStructure};

fn stretched_lattice() -> Lattice {
    Lattice::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap()
}

#[test]
fn dense_matches_oracle_all_spin_structures_two_lattices() {
    let grid = Grid::cubic(4).unwrap();
    for lattice in [Lattice::unit_cube(), stretched_lattice()] {
        for spin in SpinStructure::all() {
            let spec = OperatorSpec::flat(lattice, spin, grid);
            let dense = dense_spectrum(&spec).unwrap();
            let oracle = flat_spectrum_on_grid(&lattice, &spin, &grid);
            assert_eq!(dense.len(), oracle.len());
            let dev = dense
                .iter()
                .zip(oracle.iter())
                .map(|(d, o)| (d - o).abs())
                .fold(0.0f64, f64::max);
            assert!(dev <= 1e-10, "spin {:?}: max deviation {dev}", spin.flags());
        }
    }
}

#[test]
fn flat_spectrum_is_symmetric_under_negation() {
    for lattice in [Lattice::unit_cube(), stretched_lattice()] {
        for spin in SpinStructure::all() {
            let list = flat_spectrum_oracle(&lattice, &spin, 9.0).unwrap();
            // Mirror each (λ, mult) entry.
            for (lam, mult) in &list {
                let mirrored = list
                    .iter()
                    .find(|(l, _)| (l + lam).abs() <= 1e-10)
                    .unwrap_or_else(|| panic!("no mirror for λ = {lam}"));
                assert_eq!(mirrored.1, *mult);
            }
        }
    }
}

#[test]
fn eigensolve_matches_dense_on_6_cubed() {
    // count = 20 covers the ±π cluster (4) plus the full ±π√5 shell (16), so
    // the ascending lists are directly comparable with no cluster cut.
    let grid = Grid::cubic(6).unwrap();
    let lattice = Lattice::unit_cube();
    let spin = SpinStructure::new([true, false, false]);
    let spec = OperatorSpec::flat(lattice, spin, grid);
    let dense = dense_spectrum(&spec).unwrap();
    let mut by_abs: Vec<f64> = dense.clone();
    by_abs.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .unwrap()
            .then(a.partial_cmp(b).unwrap())
    });
    let mut expected: Vec<f64> = by_abs[..20].to_vec();
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let pairs = eigensolve(&spec, 20, 1e-8, 3).unwrap();
    for (p, e) in pairs.iter().zip(expected.iter()) {
        assert!(
            (p.lambda - e).abs() <= 1e-8,
            "solver {} vs dense {e}",
            p.lambda
        );
        assert!(p.residual <= 1e-8);
    }
}

#[test]
fn eigensolve_antiperiodic_x_first_shell() {
    let spec = OperatorSpec::flat(
        Lattice::unit_cube(),
        SpinStructure::new([true, false, false]),
        Grid::cubic(8).unwrap(),
    );
    let pairs = eigensolve(&spec, 4, 1e-8, 17).unwrap();
    let pi = std::f64::consts::PI;
    assert!((pairs[0].lambda + pi).abs() <= 1e-9);
    assert!((pairs[1].lambda + pi).abs() <= 1e-9);
    assert!((pairs[2].lambda - pi).abs() <= 1e-9);
    assert!((pairs[3].lambda - pi).abs() <= 1e-9);
}

#[test]
fn trivial_conformal_dense_equals_flat_dense() {
    let grid = Grid::cubic(4).unwrap();
    let lattice = stretched_lattice();
    let spin = SpinStructure::new([false, false, true]);
    let flat = dense_spectrum(&OperatorSpec::flat(lattice, spin, grid)).unwrap();
    let conf = dense_spectrum(
        &OperatorSpec::conformal(lattice, spin, grid, ConformalFactor::one()).unwrap(),
    )
    .unwrap();
    let dev = flat
        .iter()
        .zip(conf.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(dev <= 1e-11);
}
