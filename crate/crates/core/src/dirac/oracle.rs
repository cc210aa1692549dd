//! Closed-form and brute-force oracles for the flat operator: plane-wave
//! diagonalization of the symbol and a dense matrix assembly used to
//! cross-validate everything else on small grids.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::Spinor;
use crate::domain::{momentum_set, Grid, Lattice, SpinStructure, SpinorField};
use crate::error::{Error, Result};

use super::{DiracOperator, OperatorSpec};

/// Default cap on the complex dimension of dense solves (a 6³ grid).
pub const DEFAULT_DENSE_CAP: usize = 432;

fn group_magnitudes(mut mags: Vec<f64>) -> Vec<(f64, usize)> {
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitudes"));
    let mut grouped: Vec<(f64, usize)> = Vec::new();
    for r in mags {
        match grouped.last_mut() {
            Some((rep, count)) if (r - *rep).abs() <= 1e-9 * (1.0 + r) => *count += 1,
            _ => grouped.push((r, 1)),
        }
    }
    grouped
}

/// All eigenvalues of the flat operator with |λ| ≤ `lambda_max`, as
/// (eigenvalue, complex multiplicity) sorted ascending.
///
/// Each momentum ξ = B⁻ᵀ(k + ε̂) ≠ 0 contributes one eigenvalue at each of
/// ±2π|ξ|; ξ = 0 (periodic structure only) contributes the two-dimensional
/// space of constant spinors at λ = 0.
pub fn flat_spectrum_oracle(
    lattice: &Lattice,
    spin: &SpinStructure,
    lambda_max: f64,
) -> Result<Vec<(f64, usize)>> {
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    let tau = std::f64::consts::TAU;
    // |k + ε̂| = |Bᵀξ| ≤ ‖Bᵀ‖·|ξ|; the Frobenius norm bounds the 2-norm.
    let bnorm = lattice.basis().norm();
    let reach = (bnorm * lambda_max / tau).ceil() as i64 + 1;
    let shift = spin.shift();

    let mut zero_modes = 0usize;
    let mut mags = Vec::new();
    for k1 in -reach..=reach {
        for k2 in -reach..=reach {
            for k3 in -reach..=reach {
                let xi = lattice.momentum([
                    k1 as f64 + shift[0],
                    k2 as f64 + shift[1],
                    k3 as f64 + shift[2],
                ]);
                let r = xi.norm();
                if tau * r <= lambda_max * (1.0 + 1e-12) {
                    if r <= 1e-12 {
                        zero_modes += 1;
                    } else {
                        mags.push(r);
                    }
                }
            }
        }
    }

    let grouped = group_magnitudes(mags);
    let mut out = Vec::with_capacity(2 * grouped.len() + 1);
    for (r, c) in grouped.iter().rev() {
        out.push((-tau * r, *c));
    }
    if zero_modes > 0 {
        out.push((0.0, 2 * zero_modes));
    }
    for (r, c) in grouped.iter() {
        out.push((tau * r, *c));
    }
    Ok(out)
}

/// The full flat spectrum restricted to grid-representable momenta: exactly
/// the eigenvalue multiset of the discretized operator, sorted ascending.
pub fn flat_spectrum_on_grid(lattice: &Lattice, spin: &SpinStructure, grid: &Grid) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(2 * grid.len());
    for xi in momentum_set(lattice, spin, grid) {
        let r = tau * xi.norm();
        out.push(-r);
        out.push(r);
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    out
}

/// Unit eigenvector of the Hermitian matrix i·Σξᵢσᵢ = [[−ξ₁, −ξ₃−iξ₂],
/// [−ξ₃+iξ₂, ξ₁]] for the eigenvalue `sign`·|ξ|, with a deterministic phase
/// (largest component real positive).
fn symbol_eigenvector(xi: crate::clifford::Vec3, sign: i32) -> Spinor {
    let r = xi.norm();
    let a = -xi.c1;
    let b = Complex64::new(-xi.c3, -xi.c2);
    let mu = sign as f64 * r;
    // Two algebraic candidates; take the better-conditioned one.
    let v1 = (b, Complex64::new(mu - a, 0.0));
    let v2 = (Complex64::new(mu + a, 0.0), b.conj());
    let n1 = v1.0.norm_sqr() + v1.1.norm_sqr();
    let n2 = v2.0.norm_sqr() + v2.1.norm_sqr();
    let (va, vb) = if n1 >= n2 { v1 } else { v2 };
    let norm = (va.norm_sqr() + vb.norm_sqr()).sqrt();
    let (va, vb) = (va / norm, vb / norm);
    // Phase convention.
    let anchor = if va.norm() >= vb.norm() { va } else { vb };
    let phase = anchor / anchor.norm();
    Spinor::new(va * phase.conj(), vb * phase.conj())
}

/// Closed-form plane-wave eigenspinor for the integer frequency `k_index`
/// and spectral branch `sign` = ±1; returns (λ, field) with λ = sign·2π|ξ|.
///
/// The field is the periodic representative e^{2πi⟨k,u⟩}ψ₀ whose pointwise
/// norm is exactly 1 everywhere.
pub fn plane_wave_eigenspinor(
    lattice: &Lattice,
    spin: &SpinStructure,
    grid: &Grid,
    k_index: [i64; 3],
    sign: i32,
) -> Result<(f64, SpinorField)> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!(
            "sign must be ±1, got {sign}"
        )));
    }
    let shift = spin.shift();
    let xi = lattice.momentum([
        k_index[0] as f64 + shift[0],
        k_index[1] as f64 + shift[1],
        k_index[2] as f64 + shift[2],
    ]);
    let r = xi.norm();
    if r <= 1e-14 {
        return Err(Error::ZeroMomentum);
    }
    let psi0 = symbol_eigenvector(xi, sign);
    let lambda = sign as f64 * std::f64::consts::TAU * r;
    let field = SpinorField::from_fn(*grid, |i| {
        let u = grid.fractional(i);
        let phase = std::f64::consts::TAU
            * (k_index[0] as f64 * u[0] + k_index[1] as f64 * u[1] + k_index[2] as f64 * u[2]);
        psi0.scale(Complex64::from_polar(1.0, phase))
    });
    Ok((lambda, field))
}

/// Assembles the full matrix of the operator described by `spec` and returns
/// all eigenvalues sorted ascending. Verifies hermiticity of the assembled
/// matrix to 1e-10 as a consistency gate.
pub fn dense_spectrum(spec: &OperatorSpec) -> Result<Vec<f64>> {
    dense_spectrum_with_cap(spec, DEFAULT_DENSE_CAP)
}

pub fn dense_spectrum_with_cap(spec: &OperatorSpec, cap: usize) -> Result<Vec<f64>> {
    let op = DiracOperator::new(spec.clone())?;
    let dim = op.dim();
    if dim > cap {
        return Err(Error::DenseTooLarge { dim, cap });
    }
    let grid = spec.grid;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    let mut basis = SpinorField::zeros(grid);
    for col in 0..dim {
        let node = col / 2;
        if col % 2 == 0 {
            basis.data_mut()[node].alpha = Complex64::ONE;
        } else {
            basis.data_mut()[node].beta = Complex64::ONE;
        }
        let out = op.apply(&basis)?;
        for (i, s) in out.data().iter().enumerate() {
            mat[(2 * i, col)] = s.alpha;
            mat[(2 * i + 1, col)] = s.beta;
        }
        if col % 2 == 0 {
            basis.data_mut()[node].alpha = Complex64::ZERO;
        } else {
            basis.data_mut()[node].beta = Complex64::ZERO;
        }
    }

    let mut defect: f64 = 0.0;
    for i in 0..dim {
        for j in 0..=i {
            defect = defect.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    if defect > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "assembled operator is not hermitian (defect {defect:e})"
        )));
    }
    // Symmetrize the roundoff before the dense decomposition.
    let herm = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}
