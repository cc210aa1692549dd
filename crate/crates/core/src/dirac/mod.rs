//! The spin Dirac operator on flat and conformally-flat 3-tori.
//!
//! The flat operator is Fourier-diagonal: each momentum ξ = B⁻ᵀ(k + ε̂) acts
//! by the Hermitian symbol 2πi·Σᵢ ξᵢσᵢ. A conformal metric g = h²·(flat) is
//! handled through the dimension-3 covariance identity without assembling a
//! spin connection: S = h^{−1/2}·D·h^{−1/2} is symmetric for the unweighted
//! inner product and isospectral to the Dirac operator of g, and its
//! eigenvectors desymmetrize by h^{−3/2} into physical eigenspinors.

mod oracle;
mod solver;

pub use oracle::{
    dense_spectrum, dense_spectrum_with_cap, flat_spectrum_on_grid, flat_spectrum_oracle,
    plane_wave_eigenspinor, DEFAULT_DENSE_CAP,
};
pub use solver::{eigensolve, eigensolve_cluster_complete, eigensolve_with, SolverOptions};

use num_complex::Complex64;

use crate::clifford::apply_j;
use crate::domain::{
    momentum_set, weighted_inner, ConformalFactor, Grid, Lattice, SpinStructure, SpinorField,
    VolumeWeight,
};
use crate::error::{Error, Result};
use crate::fft::Fft3;

/// Full description of one operator instance: which torus, which spin
/// structure, which grid, and optionally a conformal factor (absent = flat).
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub lattice: Lattice,
    pub spin: SpinStructure,
    pub grid: Grid,
    pub conformal: Option<ConformalFactor>,
}

impl OperatorSpec {
    pub fn flat(lattice: Lattice, spin: SpinStructure, grid: Grid) -> Self {
        Self {
            lattice,
            spin,
            grid,
            conformal: None,
        }
    }

    pub fn conformal(
        lattice: Lattice,
        spin: SpinStructure,
        grid: Grid,
        h: ConformalFactor,
    ) -> Result<Self> {
        h.sample(&grid)?;
        Ok(Self {
            lattice,
            spin,
            grid,
            conformal: Some(h),
        })
    }

    /// Volume weight of the metric: h³ samples, or 1 when flat.
    pub fn weight(&self) -> Result<VolumeWeight> {
        match &self.conformal {
            Some(h) => VolumeWeight::from_factor(self.lattice, self.grid, h),
            None => Ok(VolumeWeight::uniform(self.lattice, self.grid)),
        }
    }

    pub fn is_flat(&self) -> bool {
        self.conformal.is_none()
    }
}

/// One certified eigenpair of the physical operator.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalue (units 1/length).
    pub lambda: f64,
    /// Eigenspinor of the physical operator, weighted-norm 1.
    pub field: SpinorField,
    /// Weighted relative residual ‖D·field − λ·field‖_w / ‖field‖_w.
    pub residual: f64,
    /// Index of the degenerate cluster this pair belongs to.
    pub cluster_id: usize,
}

/// Summary of one eigenvalue cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSummary {
    pub lambda_mean: f64,
    /// Complex multiplicity.
    pub multiplicity: usize,
    /// Multiplicity 2 = one quaternionic line.
    pub simple_over_h: bool,
}

/// Groups eigenvalues of sorted pairs whose consecutive gaps are below
/// `gap_tol` (absolute).
pub fn cluster_multiplicities(pairs: &[EigenPair], gap_tol: f64) -> Vec<ClusterSummary> {
    cluster_values(&pairs.iter().map(|p| p.lambda).collect::<Vec<_>>(), gap_tol)
}

/// Cluster grouping on a raw eigenvalue list (sorted internally).
pub fn cluster_values(lambdas: &[f64], gap_tol: f64) -> Vec<ClusterSummary> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut out = Vec::new();
    let mut start = 0usize;
    for i in 0..sorted.len() {
        let last_in_cluster = i + 1 == sorted.len() || sorted[i + 1] - sorted[i] >= gap_tol;
        if last_in_cluster {
            let members = &sorted[start..=i];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            out.push(ClusterSummary {
                lambda_mean: mean,
                multiplicity: members.len(),
                simple_over_h: members.len() == 2,
            });
            start = i + 1;
        }
    }
    out
}

/// The assembled spectral operator: symbol tables, FFT plans, and the
/// conformal samples when present. Application is pure and reentrant.
pub struct DiracOperator {
    spec: OperatorSpec,
    fft: Fft3,
    /// −2πξ₁ per bin (the 11-entry of the symbol; the 22-entry is its negative).
    sym_m11: Vec<f64>,
    /// −2π(ξ₃ + iξ₂) per bin (the 12-entry; the 21-entry is its conjugate).
    sym_m12: Vec<Complex64>,
    /// 4π²|ξ|² per bin.
    sym_sq: Vec<f64>,
    h: Option<Vec<f64>>,
    h_inv_sqrt: Option<Vec<f64>>,
}

impl DiracOperator {
    pub fn new(spec: OperatorSpec) -> Result<Self> {
        let momenta = momentum_set(&spec.lattice, &spec.spin, &spec.grid);
        let tau = std::f64::consts::TAU;
        let mut sym_m11 = Vec::with_capacity(momenta.len());
        let mut sym_m12 = Vec::with_capacity(momenta.len());
        let mut sym_sq = Vec::with_capacity(momenta.len());
        for xi in &momenta {
            sym_m11.push(-tau * xi.c1);
            sym_m12.push(Complex64::new(-tau * xi.c3, -tau * xi.c2));
            sym_sq.push(tau * tau * xi.dot(xi));
        }
        let (h, h_inv_sqrt) = match &spec.conformal {
            Some(factor) => {
                let hs = factor.sample(&spec.grid)?;
                let inv_sqrt = hs.iter().map(|v| 1.0 / v.sqrt()).collect();
                (Some(hs), Some(inv_sqrt))
            }
            None => (None, None),
        };
        let fft = Fft3::new(spec.grid);
        Ok(Self {
            spec,
            fft,
            sym_m11,
            sym_m12,
            sym_sq,
            h,
            h_inv_sqrt,
        })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn grid(&self) -> Grid {
        self.spec.grid
    }

    /// Complex dimension of the discretized operator (2 per node).
    pub fn dim(&self) -> usize {
        2 * self.spec.grid.len()
    }

    /// 4π²|ξ|² per bin — the flat symbol squared, used for preconditioning.
    pub(crate) fn symbol_squares(&self) -> &[f64] {
        &self.sym_sq
    }

    fn split(&self, f: &SpinorField) -> (Vec<Complex64>, Vec<Complex64>) {
        let a = f.data().iter().map(|s| s.alpha).collect();
        let b = f.data().iter().map(|s| s.beta).collect();
        (a, b)
    }

    fn join(&self, a: Vec<Complex64>, b: Vec<Complex64>) -> SpinorField {
        SpinorField::from_fn(self.spec.grid, |i| crate::clifford::Spinor::new(a[i], b[i]))
    }

    fn apply_symbol(&self, alpha: &mut [Complex64], beta: &mut [Complex64]) {
        self.fft.forward(alpha);
        self.fft.forward(beta);
        for i in 0..alpha.len() {
            let a = alpha[i];
            let b = beta[i];
            alpha[i] = self.sym_m11[i] * a + self.sym_m12[i] * b;
            beta[i] = self.sym_m12[i].conj() * a - self.sym_m11[i] * b;
        }
        self.fft.inverse(alpha);
        self.fft.inverse(beta);
    }

    /// Flat Dirac operator: Fourier multiply by 2πi·Σξᵢσᵢ.
    pub fn apply_flat(&self, f: &SpinorField) -> Result<SpinorField> {
        self.spec.grid.same_as(&f.grid())?;
        let (mut a, mut b) = self.split(f);
        self.apply_symbol(&mut a, &mut b);
        Ok(self.join(a, b))
    }

    /// Symmetrized conformal operator S = h^{−1/2}·D_flat·h^{−1/2}.
    pub fn apply_symmetrized(&self, f: &SpinorField) -> Result<SpinorField> {
        self.spec.grid.same_as(&f.grid())?;
        let w = self
            .h_inv_sqrt
            .as_ref()
            .ok_or(Error::MissingConformalFactor)?;
        let (mut a, mut b) = self.split(f);
        for i in 0..a.len() {
            a[i] *= w[i];
            b[i] *= w[i];
        }
        self.apply_symbol(&mut a, &mut b);
        for i in 0..a.len() {
            a[i] *= w[i];
            b[i] *= w[i];
        }
        Ok(self.join(a, b))
    }

    /// The canonical self-adjoint operator of this instance: S when conformal,
    /// the flat operator otherwise.
    pub fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        if self.spec.is_flat() {
            self.apply_flat(f)
        } else {
            self.apply_symmetrized(f)
        }
    }

    /// Physical Dirac operator of the metric: D_g φ = h^{−2}·D_flat(h·φ)
    /// (flat operator when no conformal factor is present).
    pub fn apply_physical(&self, f: &SpinorField) -> Result<SpinorField> {
        match &self.h {
            None => self.apply_flat(f),
            Some(h) => {
                self.spec.grid.same_as(&f.grid())?;
                let (mut a, mut b) = self.split(f);
                for i in 0..a.len() {
                    a[i] *= h[i];
                    b[i] *= h[i];
                }
                self.apply_symbol(&mut a, &mut b);
                for i in 0..a.len() {
                    let s = 1.0 / (h[i] * h[i]);
                    a[i] *= s;
                    b[i] *= s;
                }
                Ok(self.join(a, b))
            }
        }
    }

    /// Converts an eigenvector θ of S into the physical eigenspinor
    /// Φ = h^{−3/2}·θ with the same eigenvalue; weighted norm is preserved.
    pub fn desymmetrize(&self, theta: &SpinorField) -> Result<SpinorField> {
        self.spec.grid.same_as(&theta.grid())?;
        match &self.h {
            None => Ok(theta.clone()),
            Some(h) => {
                let grid = self.spec.grid;
                Ok(SpinorField::from_fn(grid, |i| {
                    let s = h[i].powf(-1.5);
                    theta.data()[i].scale(Complex64::new(s, 0.0))
                }))
            }
        }
    }

    /// The canonical operator on an interleaved [α₀, β₀, α₁, β₁, …] slice.
    pub(crate) fn apply_slice(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.spec.grid.len();
        let mut a: Vec<Complex64> = (0..n).map(|i| x[2 * i]).collect();
        let mut b: Vec<Complex64> = (0..n).map(|i| x[2 * i + 1]).collect();
        if let Some(w) = &self.h_inv_sqrt {
            for i in 0..n {
                a[i] *= w[i];
                b[i] *= w[i];
            }
        }
        self.apply_symbol(&mut a, &mut b);
        if let Some(w) = &self.h_inv_sqrt {
            for i in 0..n {
                a[i] *= w[i];
                b[i] *= w[i];
            }
        }
        for i in 0..n {
            y[2 * i] = a[i];
            y[2 * i + 1] = b[i];
        }
    }

    /// Flat inverse (4π²|ξ|² + σ)⁻¹ on an interleaved slice; the flat symbol
    /// square is a scalar per bin, so this acts componentwise in Fourier space.
    pub(crate) fn precondition_slice(&self, x: &[Complex64], y: &mut [Complex64], sigma: f64) {
        let n = self.spec.grid.len();
        let mut a: Vec<Complex64> = (0..n).map(|i| x[2 * i]).collect();
        let mut b: Vec<Complex64> = (0..n).map(|i| x[2 * i + 1]).collect();
        self.fft.forward(&mut a);
        self.fft.forward(&mut b);
        for i in 0..n {
            let s = 1.0 / (self.sym_sq[i] + sigma);
            a[i] *= s;
            b[i] *= s;
        }
        self.fft.inverse(&mut a);
        self.fft.inverse(&mut b);
        for i in 0..n {
            y[2 * i] = a[i];
            y[2 * i + 1] = b[i];
        }
    }

    /// Weighted relative residual of a candidate physical eigenpair.
    pub fn physical_residual(&self, field: &SpinorField, lambda: f64) -> Result<f64> {
        let w = self.spec.weight()?;
        let mut r = self.apply_physical(field)?;
        r.axpy(Complex64::new(-lambda, 0.0), field)?;
        let num = crate::domain::weighted_norm(&r, &w)?;
        let den = crate::domain::weighted_norm(field, &w)?;
        if den == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(num / den)
    }
}

/// Applies the flat Dirac operator to a field (convenience wrapper that
/// assembles the symbol tables for the field's grid).
pub fn flat_dirac_apply(
    f: &SpinorField,
    lattice: &Lattice,
    spin: &SpinStructure,
) -> Result<SpinorField> {
    let op = DiracOperator::new(OperatorSpec::flat(*lattice, *spin, f.grid()))?;
    op.apply_flat(f)
}

/// Applies the symmetrized conformal operator S (spec must be conformal).
pub fn conformal_dirac_apply_symmetrized(
    f: &SpinorField,
    spec: &OperatorSpec,
) -> Result<SpinorField> {
    if spec.is_flat() {
        return Err(Error::MissingConformalFactor);
    }
    DiracOperator::new(spec.clone())?.apply_symmetrized(f)
}

/// θ ↦ h^{−3/2}·θ for the conformal factor carried by `spec`.
pub fn desymmetrize(theta: &SpinorField, spec: &OperatorSpec) -> Result<SpinorField> {
    if spec.is_flat() {
        return Err(Error::MissingConformalFactor);
    }
    DiracOperator::new(spec.clone())?.desymmetrize(theta)
}

/// Field-level quaternionic structure.
///
/// Acts nodewise by j and additionally by the unit gauge factor
/// e^{−2πi·Σεᵢuᵢ} that maps the periodic representative of Ψ to the periodic
/// representative of Ψ·j under the momentum-shift gauge; the factor is 1 for
/// the periodic spin structure, so there this is plain nodewise j.
pub fn apply_j_field(f: &SpinorField, spin: &SpinStructure) -> SpinorField {
    let grid = f.grid();
    let flags = spin.flags();
    SpinorField::from_fn(grid, |i| {
        let u = grid.fractional(i);
        let arg = -std::f64::consts::TAU
            * (flags[0] as f64 * u[0] + flags[1] as f64 * u[1] + flags[2] as f64 * u[2]);
        apply_j(f.data()[i]).scale(Complex64::from_polar(1.0, arg))
    })
}

/// Unweighted L² inner product (uniform weight, vol(Λ)/N quadrature).
pub fn unweighted_inner(a: &SpinorField, b: &SpinorField, lattice: &Lattice) -> Result<Complex64> {
    let w = VolumeWeight::uniform(*lattice, a.grid());
    weighted_inner(a, b, &w)
}
