//! Geometric configuration: lattices, spin structures, sample grids, grid
//! fields, conformal factors and the weighted L² structure.
//!
//! Antiperiodic boundary conditions are carried as half-integer momentum
//! shifts on periodic sample data, so all stored arrays are plain periodic
//! grids and the discrete Fourier transform stays standard.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::clifford::{Spinor, Vec3};
use crate::error::{Error, Result};

/// A rank-3 lattice Λ ⊂ ℝ³; columns of `basis` are the generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    basis: Matrix3<f64>,
    dual: Matrix3<f64>,
    volume: f64,
}

impl Lattice {
    /// Builds a lattice from a basis matrix whose columns generate Λ.
    /// Requires det > 0 (orientation and nondegeneracy).
    pub fn new(basis: Matrix3<f64>) -> Result<Self> {
        let det = basis.determinant();
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::DegenerateLattice { det });
        }
        let dual = basis
            .try_inverse()
            .ok_or(Error::DegenerateLattice { det })?
            .transpose();
        Ok(Self {
            basis,
            dual,
            volume: det,
        })
    }

    /// Basis from a row-major list of 9 entries.
    pub fn from_row_major(rows: [f64; 9]) -> Result<Self> {
        Self::new(Matrix3::new(
            rows[0], rows[1], rows[2], rows[3], rows[4], rows[5], rows[6], rows[7], rows[8],
        ))
    }

    pub fn unit_cube() -> Self {
        Self::new(Matrix3::identity()).expect("identity basis")
    }

    pub fn basis(&self) -> &Matrix3<f64> {
        &self.basis
    }

    /// Dual basis B⁻ᵀ; its columns pair integrally with the generators.
    pub fn dual_basis(&self) -> &Matrix3<f64> {
        &self.dual
    }

    /// vol(Λ) = det(basis).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Physical momentum ξ = B⁻ᵀ·k for dual coordinates k.
    pub fn momentum(&self, k: [f64; 3]) -> Vec3 {
        let xi = self.dual * Vector3::new(k[0], k[1], k[2]);
        Vec3::new(xi[0], xi[1], xi[2])
    }

    /// Position of a fractional coordinate u ∈ [0,1)³ in ℝ³.
    pub fn position(&self, u: [f64; 3]) -> [f64; 3] {
        let x = self.basis * Vector3::new(u[0], u[1], u[2]);
        [x[0], x[1], x[2]]
    }
}

/// One of the 8 spin structures on the 3-torus: a periodic/antiperiodic flag
/// per lattice generator (true = antiperiodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinStructure {
    eps: [bool; 3],
}

impl SpinStructure {
    pub fn new(eps: [bool; 3]) -> Self {
        Self { eps }
    }

    pub fn from_flags(flags: [u8; 3]) -> Result<Self> {
        for f in flags {
            if f > 1 {
                return Err(Error::InvalidParameter(format!(
                    "spin structure flags must be 0 or 1, got {flags:?}"
                )));
            }
        }
        Ok(Self::new([flags[0] == 1, flags[1] == 1, flags[2] == 1]))
    }

    pub fn trivial() -> Self {
        Self::new([false; 3])
    }

    pub fn flags(&self) -> [u8; 3] {
        [self.eps[0] as u8, self.eps[1] as u8, self.eps[2] as u8]
    }

    /// Momentum shift ε̂ in dual coordinates: ½ per antiperiodic direction.
    pub fn shift(&self) -> [f64; 3] {
        [
            if self.eps[0] { 0.5 } else { 0.0 },
            if self.eps[1] { 0.5 } else { 0.0 },
            if self.eps[2] { 0.5 } else { 0.0 },
        ]
    }

    pub fn is_trivial(&self) -> bool {
        !self.eps[0] && !self.eps[1] && !self.eps[2]
    }

    /// All 8 spin structures, in lexicographic flag order.
    pub fn all() -> [SpinStructure; 8] {
        let mut out = [SpinStructure::trivial(); 8];
        for (i, s) in out.iter_mut().enumerate() {
            *s = SpinStructure::new([i & 1 == 1, i & 2 == 2, i & 4 == 4]);
        }
        out
    }
}

/// Uniform sample grid: nᵢ nodes per lattice direction, each even and ≥ 4.
/// Storage is node-major with the first axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: [usize; 3],
}

impl Grid {
    pub fn new(n: [usize; 3]) -> Result<Self> {
        if n.iter().any(|&ni| ni < 4 || ni % 2 != 0) {
            return Err(Error::InvalidGrid { n });
        }
        Ok(Self { n })
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n, n, n])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat storage index of node (i₀, i₁, i₂); axis 0 is fastest.
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    /// Inverse of `index`.
    pub fn node(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.n[0];
        let r = idx / self.n[0];
        [i0, r % self.n[1], r / self.n[1]]
    }

    /// Fractional coordinates of a node, in [0,1)³.
    pub fn fractional(&self, idx: usize) -> [f64; 3] {
        let i = self.node(idx);
        [
            i[0] as f64 / self.n[0] as f64,
            i[1] as f64 / self.n[1] as f64,
            i[2] as f64 / self.n[2] as f64,
        ]
    }

    /// Signed frequency of bin `b` along `axis`: b for b < n/2, b − n above,
    /// so the window is [−n/2, n/2) with the Nyquist index at −n/2.
    pub fn signed_freq(&self, axis: usize, b: usize) -> i64 {
        let n = self.n[axis];
        if b < n / 2 {
            b as i64
        } else {
            b as i64 - n as i64
        }
    }

    /// Signed integer frequency triple of a flat bin index.
    pub fn signed_freqs(&self, idx: usize) -> [i64; 3] {
        let i = self.node(idx);
        [
            self.signed_freq(0, i[0]),
            self.signed_freq(1, i[1]),
            self.signed_freq(2, i[2]),
        ]
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Grid-sampled section of the spinor bundle, stored as the periodic
/// representative (any antiperiodic twist lives in the momentum shift).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    data: Vec<Spinor>,
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![Spinor::zero(); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> Spinor) -> Self {
        Self {
            grid,
            data: (0..grid.len()).map(f).collect(),
        }
    }

    pub fn from_data(grid: Grid, data: Vec<Spinor>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "spinor data length {} does not match grid {:?}",
                data.len(),
                grid.dims()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[Spinor] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Spinor] {
        &mut self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.norm_sq() == 0.0)
    }

    /// Nodewise linear combination self + c·other.
    pub fn axpy(&mut self, c: Complex64, other: &SpinorField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a = a.add(&b.scale(c));
        }
        Ok(())
    }

    pub fn scale(&mut self, c: Complex64) {
        for s in &mut self.data {
            *s = s.scale(c);
        }
    }
}

/// Grid-sampled vector field with components in the Euclidean coordinate
/// frame ∂₁, ∂₂, ∂₃ of ℝ³.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    data: Vec<[f64; 3]>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![[0.0; 3]; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> [f64; 3]) -> Self {
        Self {
            grid,
            data: (0..grid.len()).map(f).collect(),
        }
    }

    pub fn from_data(grid: Grid, data: Vec<[f64; 3]>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "vector data length {} does not match grid {:?}",
                data.len(),
                grid.dims()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.data
    }
}

/// One cosine term of a conformal factor: amplitude·cos(2π⟨m, u⟩ + phase)
/// with u the fractional coordinates, so the term is periodic on any lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    pub m: [i32; 3],
    pub amplitude: f64,
    pub phase: f64,
}

/// A strictly positive trigonometric polynomial h defining g = h²·(flat).
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor {
    offset: f64,
    terms: Vec<HarmonicTerm>,
}

impl ConformalFactor {
    pub fn new(offset: f64, terms: Vec<HarmonicTerm>) -> Self {
        Self { offset, terms }
    }

    /// The trivial factor h ≡ 1.
    pub fn one() -> Self {
        Self::new(1.0, Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, Vec::new())
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    /// Pointwise value at fractional coordinates u.
    pub fn eval(&self, u: [f64; 3]) -> f64 {
        let mut v = self.offset;
        for t in &self.terms {
            let arg = std::f64::consts::TAU
                * (t.m[0] as f64 * u[0] + t.m[1] as f64 * u[1] + t.m[2] as f64 * u[2])
                + t.phase;
            v += t.amplitude * arg.cos();
        }
        v
    }

    /// Checks the bandlimit |mᵢ| < nᵢ/4 so that h·Ψ products stay resolvable.
    pub fn check_bandlimit(&self, grid: &Grid) -> Result<()> {
        let n = grid.dims();
        for t in &self.terms {
            for ax in 0..3 {
                if 4 * t.m[ax].unsigned_abs() as usize >= n[ax] {
                    return Err(Error::BandlimitExceeded { m: t.m, n });
                }
            }
        }
        Ok(())
    }

    /// Samples h on the grid; rejects factors that are not strictly positive
    /// there or that exceed the grid's bandlimit.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_bandlimit(grid)?;
        let samples: Vec<f64> = (0..grid.len())
            .map(|i| self.eval(grid.fractional(i)))
            .collect();
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        if min.is_nan() || min <= 0.0 {
            return Err(Error::NonPositiveFactor { min });
        }
        Ok(samples)
    }

    /// Exact product of two factors, expanded by the cosine product identity.
    pub fn product(&self, other: &ConformalFactor) -> ConformalFactor {
        let mut terms: Vec<HarmonicTerm> = Vec::new();
        for t in &self.terms {
            terms.push(HarmonicTerm {
                amplitude: t.amplitude * other.offset,
                ..*t
            });
        }
        for t in &other.terms {
            terms.push(HarmonicTerm {
                amplitude: t.amplitude * self.offset,
                ..*t
            });
        }
        for a in &self.terms {
            for b in &other.terms {
                let amp = 0.5 * a.amplitude * b.amplitude;
                terms.push(HarmonicTerm {
                    m: [a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2]],
                    amplitude: amp,
                    phase: a.phase + b.phase,
                });
                terms.push(HarmonicTerm {
                    m: [a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2]],
                    amplitude: amp,
                    phase: a.phase - b.phase,
                });
            }
        }
        ConformalFactor::new(self.offset * other.offset, terms)
    }
}

/// Grid samples of the volume density w (h³ for a conformal metric, 1 flat),
/// together with the quadrature cell volume vol(Λ)/N.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeWeight {
    lattice: Lattice,
    grid: Grid,
    w: Vec<f64>,
}

impl VolumeWeight {
    /// w ≡ 1 (flat volume form).
    pub fn uniform(lattice: Lattice, grid: Grid) -> Self {
        Self {
            lattice,
            grid,
            w: vec![1.0; grid.len()],
        }
    }

    /// w = h³ sampled on the grid.
    pub fn from_factor(lattice: Lattice, grid: Grid, h: &ConformalFactor) -> Result<Self> {
        let hs = h.sample(&grid)?;
        Ok(Self {
            lattice,
            grid,
            w: hs.iter().map(|v| v * v * v).collect(),
        })
    }

    pub fn from_samples(lattice: Lattice, grid: Grid, w: Vec<f64>) -> Result<Self> {
        if w.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "weight length {} does not match grid {:?}",
                w.len(),
                grid.dims()
            )));
        }
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        if min.is_nan() || min <= 0.0 {
            return Err(Error::NonPositiveFactor { min });
        }
        Ok(Self { lattice, grid, w })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.w
    }

    /// Quadrature weight per node: vol(Λ)/N.
    pub fn cell_volume(&self) -> f64 {
        self.lattice.volume() / self.grid.len() as f64
    }
}

/// Physical momenta ξ = B⁻ᵀ(k + ε̂) for every grid bin, in storage order.
///
/// The signed index k runs over [−nᵢ/2, nᵢ/2) per axis, so the map
/// bin ↔ momentum is a bijection.
pub fn momentum_set(lattice: &Lattice, spin: &SpinStructure, grid: &Grid) -> Vec<Vec3> {
    let shift = spin.shift();
    (0..grid.len())
        .map(|idx| {
            let k = grid.signed_freqs(idx);
            lattice.momentum([
                k[0] as f64 + shift[0],
                k[1] as f64 + shift[1],
                k[2] as f64 + shift[2],
            ])
        })
        .collect()
}

/// Weighted L² inner product (vol(Λ)/N)·Σ w·⟨a, b⟩, conjugate-linear in `a`.
pub fn weighted_inner(a: &SpinorField, b: &SpinorField, w: &VolumeWeight) -> Result<Complex64> {
    a.grid().same_as(&b.grid())?;
    a.grid().same_as(&w.grid())?;
    let mut acc = Complex64::ZERO;
    for ((sa, sb), wi) in a.data().iter().zip(b.data().iter()).zip(w.samples().iter()) {
        acc += (sa.alpha.conj() * sb.alpha + sa.beta.conj() * sb.beta) * *wi;
    }
    Ok(acc * w.cell_volume())
}

/// Weighted L² norm.
pub fn weighted_norm(a: &SpinorField, w: &VolumeWeight) -> Result<f64> {
    Ok(weighted_inner(a, a, w)?.re.max(0.0).sqrt())
}
