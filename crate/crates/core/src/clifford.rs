//! Pointwise spinor algebra: Pauli matrices, Clifford multiplication, the
//! quadratic map to vectors, and the right quaternionic action.
//!
//! Everything here is exact arithmetic on value types; no grids, no tolerances.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A single spinor value, the fibre of the rank-2 spinor bundle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Spinor {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// |alpha|² + |beta|².
    pub fn norm_sq(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(c * self.alpha, c * self.beta)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.alpha + other.alpha, self.beta + other.beta)
    }
}

/// A tangent vector expressed in a fixed oriented orthonormal frame (e1, e2, e3).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Vec3 {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Unit quaternion w + xi + yj + zk acting on spinors from the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

const UNIT_TOL: f64 = 1e-12;

impl UnitQuaternion {
    /// Builds a quaternion, rejecting it unless w² + x² + y² + z² = 1 to 1e-12.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let defect = (w * w + x * x + y * y + z * z - 1.0).abs();
        if defect > UNIT_TOL {
            return Err(Error::NonUnitQuaternion { defect });
        }
        Ok(Self { w, x, y, z })
    }

    /// Normalizes arbitrary coefficients into a unit quaternion.
    pub fn normalized(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n == 0.0 {
            return Err(Error::NonUnitQuaternion { defect: 1.0 });
        }
        Ok(Self {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn one() -> Self {
        Self {
            w: 1.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    pub fn i() -> Self {
        Self {
            w: 0.0,
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    }

    pub fn j() -> Self {
        Self {
            w: 0.0,
            x: 0.0,
            y: 1.0,
            z: 0.0,
        }
    }

    pub fn k() -> Self {
        Self {
            w: 0.0,
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    /// (1 + k)/√2, the second rotation of the frame triple.
    pub fn one_plus_k_over_sqrt2() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            w: s,
            x: 0.0,
            y: 0.0,
            z: s,
        }
    }

    /// (1 + j)/√2, the third rotation of the frame triple.
    pub fn one_plus_j_over_sqrt2() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            w: s,
            x: 0.0,
            y: s,
            z: 0.0,
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Hamilton product self * other.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (other.w, other.x, other.y, other.z);
        Self {
            w: a * e - b * f - c * g - d * h,
            x: a * f + b * e + c * h - d * g,
            y: a * g - b * h + c * e + d * f,
            z: a * h + b * g - c * f + d * e,
        }
    }
}

type Mat2 = [[Complex64; 2]; 2];

/// The three Clifford generators as 2×2 matrices.
///
/// Sign convention: each σᵢ squares to −Id and σ₁σ₂ = −σ₃ (cyclically); the
/// anticommutators are σᵢσⱼ + σⱼσᵢ = −2δᵢⱼ·Id with entries exactly 0, ±1, ±i.
pub fn pauli_matrices() -> [Mat2; 3] {
    let i = Complex64::i();
    let o = Complex64::ZERO;
    let one = Complex64::ONE;
    [[[i, o], [o, -i]], [[o, -one], [one, o]], [[o, i], [i, o]]]
}

/// Clifford multiplication (Σᵢ vᵢ σᵢ)·s.
pub fn clifford_mul(v: Vec3, s: Spinor) -> Spinor {
    let i = Complex64::i();
    // Σ vᵢσᵢ = [[i v₁, −v₂ + i v₃], [v₂ + i v₃, −i v₁]]
    let m12 = Complex64::new(-v.c2, v.c3);
    let m21 = Complex64::new(v.c2, v.c3);
    Spinor::new(
        i * v.c1 * s.alpha + m12 * s.beta,
        m21 * s.alpha - i * v.c1 * s.beta,
    )
}

/// The quadratic map s ↦ (½(|α|²−|β|²), Im(αβ̄), Re(αβ̄)).
///
/// The output norm is ½·(|α|²+|β|²); in particular it vanishes only at s = 0.
pub fn quadratic_map(s: Spinor) -> Vec3 {
    let ab = s.alpha * s.beta.conj();
    Vec3::new(0.5 * (s.alpha.norm_sqr() - s.beta.norm_sqr()), ab.im, ab.re)
}

/// The quaternionic structure j: (α, β) ↦ (−β̄, ᾱ). Antilinear, j² = −1.
pub fn apply_j(s: Spinor) -> Spinor {
    Spinor::new(-s.beta.conj(), s.alpha.conj())
}

/// Right action s·q under the identification (α, β) ≡ α + jβ.
///
/// Composition follows right-action order: quat_act(q₂, quat_act(q₁, s))
/// equals quat_act(q₁·q₂, s).
pub fn quat_act(q: UnitQuaternion, s: Spinor) -> Spinor {
    // s·q = (w+ix)·α − (y−iz)·β̄ , (w+ix)·β + (y−iz)·ᾱ
    let c1 = Complex64::new(q.w, q.x);
    let c2 = Complex64::new(q.y, -q.z);
    Spinor::new(
        c1 * s.alpha - c2 * s.beta.conj(),
        c1 * s.beta + c2 * s.alpha.conj(),
    )
}

/// The three pairwise-orthogonal vectors obtained from s, s·(1+k)/√2 and
/// s·(1+j)/√2 under the quadratic map. Each has norm ½·(|α|²+|β|²).
pub fn frame_triple(s: Spinor) -> (Vec3, Vec3, Vec3) {
    let s2 = quat_act(UnitQuaternion::one_plus_k_over_sqrt2(), s);
    let s3 = quat_act(UnitQuaternion::one_plus_j_over_sqrt2(), s);
    (quadratic_map(s), quadratic_map(s2), quadratic_map(s3))
}
