//! Turning eigenspinors into framings: the pointwise frame triple, conversion
//! from the metric-orthonormal frame to Euclidean coordinates, and the
//! conformal rescale X ↦ f⁻³·X that transports divergence-freeness between
//! volume forms.

use crate::clifford::frame_triple;
use crate::dirac::{EigenPair, OperatorSpec};
use crate::domain::{ConformalFactor, Grid, Lattice, SpinorField, VectorField};
use crate::error::{Error, Result};

/// How a framing came to be; carried along for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source: String,
    pub lambda: Option<f64>,
    pub cluster_id: Option<usize>,
    pub rescaled: bool,
}

impl Provenance {
    fn new(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            lambda: None,
            cluster_id: None,
            rescaled: false,
        }
    }
}

/// Relative floor below which the minimum length counts as a true zero
/// rather than roundoff.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Three grid-sampled vector fields adapted to a metric, with their
/// verification bookkeeping.
#[derive(Debug, Clone)]
pub struct Framing {
    x1: VectorField,
    x2: VectorField,
    x3: VectorField,
    metric_h: Option<ConformalFactor>,
    lattice: Lattice,
    provenance: Provenance,
    min_g_length: f64,
    degenerate: bool,
}

impl Framing {
    fn assemble(
        x1: VectorField,
        x2: VectorField,
        x3: VectorField,
        metric_h: Option<ConformalFactor>,
        lattice: Lattice,
        provenance: Provenance,
    ) -> Result<Self> {
        let grid = x1.grid();
        x1.grid().same_as(&x2.grid())?;
        x1.grid().same_as(&x3.grid())?;
        let h = sample_metric(&metric_h, &grid)?;
        let mut min_len = f64::INFINITY;
        let mut sum_len = 0.0;
        for (i, v) in x1.data().iter().enumerate() {
            let len = h[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            min_len = min_len.min(len);
            sum_len += len;
        }
        let mean = sum_len / grid.len() as f64;
        let degenerate = min_len < DEGENERACY_THRESHOLD * mean;
        Ok(Self {
            x1,
            x2,
            x3,
            metric_h,
            lattice,
            provenance,
            min_g_length: min_len,
            degenerate,
        })
    }

    pub fn fields(&self) -> [&VectorField; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn grid(&self) -> Grid {
        self.x1.grid()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The conformal factor of the metric this framing is adapted to
    /// (None = flat).
    pub fn metric_h(&self) -> Option<&ConformalFactor> {
        self.metric_h.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn min_g_length(&self) -> f64 {
        self.min_g_length
    }

    /// True when the minimum length is indistinguishable from a zero of the
    /// framing.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Metric samples h on the grid (1s when flat).
    pub fn metric_samples(&self) -> Result<Vec<f64>> {
        sample_metric(&self.metric_h, &self.grid())
    }
}

fn sample_metric(metric: &Option<ConformalFactor>, grid: &Grid) -> Result<Vec<f64>> {
    match metric {
        Some(h) => h.sample(grid),
        None => Ok(vec![1.0; grid.len()]),
    }
}

/// Builds the framing of an eigenspinor: the pointwise frame triple gives
/// components in the g-orthonormal frame ẽᵢ = h⁻¹∂ᵢ, so Euclidean coordinate
/// components divide by h exactly once (h ≡ 1 when flat).
pub fn framing_from_eigenspinor(phi: &SpinorField, spec: &OperatorSpec) -> Result<Framing> {
    if phi.is_zero() {
        return Err(Error::ZeroField);
    }
    spec.grid.same_as(&phi.grid())?;
    let grid = spec.grid;
    let h = sample_metric(&spec.conformal, &grid)?;
    let mut d1 = Vec::with_capacity(grid.len());
    let mut d2 = Vec::with_capacity(grid.len());
    let mut d3 = Vec::with_capacity(grid.len());
    for (i, s) in phi.data().iter().enumerate() {
        let (f1, f2, f3) = frame_triple(*s);
        let inv_h = 1.0 / h[i];
        d1.push([f1.c1 * inv_h, f1.c2 * inv_h, f1.c3 * inv_h]);
        d2.push([f2.c1 * inv_h, f2.c2 * inv_h, f2.c3 * inv_h]);
        d3.push([f3.c1 * inv_h, f3.c2 * inv_h, f3.c3 * inv_h]);
    }
    Framing::assemble(
        VectorField::from_data(grid, d1)?,
        VectorField::from_data(grid, d2)?,
        VectorField::from_data(grid, d3)?,
        spec.conformal.clone(),
        spec.lattice,
        Provenance::new("eigenspinor"),
    )
}

/// As `framing_from_eigenspinor`, recording the eigenpair in the provenance.
pub fn framing_from_eigenpair(pair: &EigenPair, spec: &OperatorSpec) -> Result<Framing> {
    let mut fr = framing_from_eigenspinor(&pair.field, spec)?;
    fr.provenance.lambda = Some(pair.lambda);
    fr.provenance.cluster_id = Some(pair.cluster_id);
    Ok(fr)
}

/// Rescales a framing built for g′ into one for g = f²·g′: fields pick up
/// f⁻³ nodewise and the metric factor multiplies by f. Divergence-freeness
/// transports to the new volume form f³·(old), and orthogonality and equal
/// length are preserved since conformal scaling preserves angles.
pub fn conformal_rescale(fr: &Framing, f: &ConformalFactor) -> Result<Framing> {
    let grid = fr.grid();
    let fs = f.sample(&grid)?;
    let rescale_one = |x: &VectorField| {
        VectorField::from_fn(grid, |i| {
            let s = 1.0 / (fs[i] * fs[i] * fs[i]);
            let v = x.data()[i];
            [v[0] * s, v[1] * s, v[2] * s]
        })
    };
    let metric = match &fr.metric_h {
        Some(h) => h.product(f),
        None => f.clone(),
    };
    let mut provenance = fr.provenance.clone();
    provenance.rescaled = true;
    Framing::assemble(
        rescale_one(&fr.x1),
        rescale_one(&fr.x2),
        rescale_one(&fr.x3),
        Some(metric),
        fr.lattice,
        provenance,
    )
}

/// The nowhere-vanishing certificate: the minimum over nodes of the g-length
/// of X₁ (equal to those of X₂, X₃ by construction).
pub fn min_pointwise_norm(fr: &Framing) -> f64 {
    fr.min_g_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Spinor;
    use crate::dirac::plane_wave_eigenspinor;
    use crate::domain::{HarmonicTerm, SpinStructure};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn flat_spec(n: usize) -> OperatorSpec {
        OperatorSpec::flat(
            Lattice::unit_cube(),
            SpinStructure::trivial(),
            Grid::cubic(n).unwrap(),
        )
    }

    #[test]
    fn rejects_zero_field() {
        let spec = flat_spec(4);
        let zero = SpinorField::zeros(spec.grid);
        assert!(matches!(
            framing_from_eigenspinor(&zero, &spec),
            Err(Error::ZeroField)
        ));
    }

    #[test]
    fn plane_wave_framing_closed_form() {
        let spec = flat_spec(16);
        let (_, phi) =
            plane_wave_eigenspinor(&spec.lattice, &spec.spin, &spec.grid, [1, 0, 0], 1).unwrap();
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();
        let [x1, x2, x3] = fr.fields();
        let tau = std::f64::consts::TAU;
        for i in 0..spec.grid.len() {
            let u = spec.grid.fractional(i);
            // X₁ is the constant (−½, 0, 0).
            assert_abs_diff_eq!(x1.data()[i][0], -0.5, epsilon = 1e-13);
            assert_abs_diff_eq!(x1.data()[i][1], 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(x1.data()[i][2], 0.0, epsilon = 1e-13);
            // X₂, X₃ rotate in the (e₂, e₃)-plane with frequency 2 in x.
            let (s, c) = (2.0 * tau * u[0]).sin_cos();
            assert_abs_diff_eq!(x2.data()[i][0], 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(x2.data()[i][1], 0.5 * c, epsilon = 1e-13);
            assert_abs_diff_eq!(x2.data()[i][2], 0.5 * s, epsilon = 1e-13);
            assert_abs_diff_eq!(x3.data()[i][0], 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(x3.data()[i][1], 0.5 * s, epsilon = 1e-13);
            assert_abs_diff_eq!(x3.data()[i][2], -0.5 * c, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(min_pointwise_norm(&fr), 0.5, epsilon = 1e-13);
        assert!(!fr.is_degenerate());
    }

    #[test]
    fn cluster_superposition_framing_closed_form() {
        // phi = (e^{−2πix}, e^{2πix}) lies in the λ = 2π eigenspace.
        let spec = flat_spec(16);
        let grid = spec.grid;
        let tau = std::f64::consts::TAU;
        let phi = SpinorField::from_fn(grid, |i| {
            let u = grid.fractional(i);
            Spinor::new(
                Complex64::from_polar(1.0, -tau * u[0]),
                Complex64::from_polar(1.0, tau * u[0]),
            )
        });
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();
        let x1 = fr.fields()[0];
        for i in 0..grid.len() {
            let u = grid.fractional(i);
            let (s, c) = (2.0 * tau * u[0]).sin_cos();
            assert_abs_diff_eq!(x1.data()[i][0], 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(x1.data()[i][1], -s, epsilon = 1e-13);
            assert_abs_diff_eq!(x1.data()[i][2], c, epsilon = 1e-13);
        }
    }

    #[test]
    fn constant_spinor_gives_constant_framing() {
        let spec = flat_spec(4);
        let a = 0.9;
        let phi = SpinorField::from_fn(spec.grid, |_| {
            Spinor::new(Complex64::new(a, 0.0), Complex64::ZERO)
        });
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();
        let half = a * a / 2.0;
        let [x1, x2, x3] = fr.fields();
        for i in 0..spec.grid.len() {
            assert_abs_diff_eq!(x1.data()[i][0], half, epsilon = 1e-14);
            assert_abs_diff_eq!(x2.data()[i][1], half, epsilon = 1e-14);
            assert_abs_diff_eq!(x3.data()[i][2], half, epsilon = 1e-14);
        }
    }

    #[test]
    fn rescale_identity_and_constant_cases() {
        let spec = flat_spec(8);
        let (_, phi) =
            plane_wave_eigenspinor(&spec.lattice, &spec.spin, &spec.grid, [0, 1, 0], 1).unwrap();
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();

        let same = conformal_rescale(&fr, &ConformalFactor::one()).unwrap();
        for (a, b) in fr.fields().iter().zip(same.fields().iter()) {
            for (va, vb) in a.data().iter().zip(b.data().iter()) {
                for c in 0..3 {
                    assert_abs_diff_eq!(va[c], vb[c], epsilon = 1e-15);
                }
            }
        }

        let doubled = conformal_rescale(&fr, &ConformalFactor::constant(2.0)).unwrap();
        for (a, b) in fr.fields().iter().zip(doubled.fields().iter()) {
            for (va, vb) in a.data().iter().zip(b.data().iter()) {
                for c in 0..3 {
                    assert_abs_diff_eq!(vb[c], va[c] / 8.0, epsilon = 1e-15);
                }
            }
        }
        // Volume weight h³ = 8.
        let h = doubled.metric_samples().unwrap();
        for v in h {
            assert_abs_diff_eq!(v * v * v, 8.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rescale_rejects_inadmissible_factor() {
        let spec = flat_spec(8);
        let (_, phi) =
            plane_wave_eigenspinor(&spec.lattice, &spec.spin, &spec.grid, [1, 0, 0], 1).unwrap();
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();
        let negative = ConformalFactor::new(
            0.1,
            vec![HarmonicTerm {
                m: [1, 0, 0],
                amplitude: 1.0,
                phase: 0.0,
            }],
        );
        assert!(conformal_rescale(&fr, &negative).is_err());
    }

    #[test]
    fn conformal_framing_lengths_track_spinor_norm() {
        let h = ConformalFactor::new(
            1.5,
            vec![HarmonicTerm {
                m: [1, 0, 0],
                amplitude: 0.4,
                phase: 0.0,
            }],
        );
        let grid = Grid::cubic(8).unwrap();
        let spec = OperatorSpec::conformal(
            Lattice::unit_cube(),
            SpinStructure::trivial(),
            grid,
            h.clone(),
        )
        .unwrap();
        // Any field works for the pointwise identity; use a smooth non-eigen one.
        let phi = SpinorField::from_fn(grid, |i| {
            let u = grid.fractional(i);
            Spinor::new(
                Complex64::new(1.0 + 0.3 * (std::f64::consts::TAU * u[1]).cos(), 0.2),
                Complex64::new(0.1, -0.4 * (std::f64::consts::TAU * u[2]).sin()),
            )
        });
        let fr = framing_from_eigenspinor(&phi, &spec).unwrap();
        let hs = h.sample(&grid).unwrap();
        for (i, v) in fr.fields()[0].data().iter().enumerate() {
            let g_len = hs[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let expect = 0.5 * phi.data()[i].norm_sq();
            assert!((g_len - expect).abs() <= 1e-12 * expect.max(1e-30));
        }
    }
}
