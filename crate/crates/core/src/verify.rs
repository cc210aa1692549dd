//! Numerical certification: weighted divergence, framing reports, the
//! quaternionic commutation check, multiplicity evenness, and kernel
//! dimension.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::clifford::Spinor;
use crate::dirac::{apply_j_field, eigensolve, ClusterSummary, DiracOperator, OperatorSpec};
use crate::domain::{Grid, SpinorField, VectorField, VolumeWeight};
use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::framing::Framing;

/// Weighted divergence w⁻¹·Σᵢ ∂ᵢ(w·Xⁱ) with spectral derivatives, returned
/// as one scalar per node.
///
/// Derivatives on the Nyquist planes are zeroed: for real data the Nyquist
/// bin represents a pure cosine whose derivative vanishes at every node, and
/// its reflected momentum is not representable on the grid.
pub fn divergence(x: &VectorField, w: &VolumeWeight) -> Result<Vec<f64>> {
    x.grid().same_as(&w.grid())?;
    let grid = x.grid();
    let n = grid.len();
    let fft = Fft3::new(grid);
    let dual = *w.lattice().dual_basis();
    let tau = std::f64::consts::TAU;
    let dims = grid.dims();

    let mut acc = vec![0.0; n];
    let mut buf = vec![Complex64::ZERO; n];
    for axis in 0..3 {
        for i in 0..n {
            buf[i] = Complex64::new(w.samples()[i] * x.data()[i][axis], 0.0);
        }
        fft.forward(&mut buf);
        for idx in 0..n {
            let k = grid.signed_freqs(idx);
            let nyquist = (0..3).any(|a| k[a] == -((dims[a] / 2) as i64));
            if nyquist {
                buf[idx] = Complex64::ZERO;
                continue;
            }
            // ξ = B⁻ᵀ·k; the derivative factor is 2πi·ξ_axis.
            let xi_axis = dual[(axis, 0)] * k[0] as f64
                + dual[(axis, 1)] * k[1] as f64
                + dual[(axis, 2)] * k[2] as f64;
            buf[idx] *= Complex64::new(0.0, tau * xi_axis);
        }
        fft.inverse(&mut buf);
        for i in 0..n {
            acc[i] += buf[i].re;
        }
    }
    for i in 0..n {
        acc[i] /= w.samples()[i];
    }
    Ok(acc)
}

/// All certified quantities of one framing, normalized by the maximum
/// g-length where a scale is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct FramingReport {
    /// max over the three fields and all nodes of |div w.r.t. h³·dx|.
    pub max_abs_divergence: f64,
    /// The same, divided by the maximum g-length.
    pub divergence_over_max_length: f64,
    /// max |g(Xₐ, X_b)| over nodes and pairs a ≠ b, divided by max length².
    pub max_orthogonality_defect: f64,
    /// max over nodes of (longest − shortest g-length), divided by max length.
    pub max_length_spread: f64,
    pub min_g_length: f64,
    pub max_g_length: f64,
    pub degenerate: bool,
}

/// Measures divergence, orthogonality, equal length and the
/// nowhere-vanishing certificate of a framing.
pub fn framing_report(fr: &Framing) -> Result<FramingReport> {
    let grid = fr.grid();
    let h = fr.metric_samples()?;
    let w = VolumeWeight::from_samples(*fr.lattice(), grid, h.iter().map(|v| v * v * v).collect())?;
    let fields = fr.fields();

    let mut max_div: f64 = 0.0;
    for x in fields {
        for d in divergence(x, &w)? {
            max_div = max_div.max(d.abs());
        }
    }

    let mut min_len = f64::INFINITY;
    let mut max_len: f64 = 0.0;
    let mut max_cross: f64 = 0.0;
    let mut max_spread: f64 = 0.0;
    let mut sum_len = 0.0;
    for i in 0..grid.len() {
        let g_scale = h[i] * h[i];
        let vs = [
            fields[0].data()[i],
            fields[1].data()[i],
            fields[2].data()[i],
        ];
        let mut lens = [0.0; 3];
        for (a, v) in vs.iter().enumerate() {
            lens[a] = (g_scale * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).sqrt();
        }
        for a in 0..3 {
            for b in (a + 1)..3 {
                let g = g_scale * (vs[a][0] * vs[b][0] + vs[a][1] * vs[b][1] + vs[a][2] * vs[b][2]);
                max_cross = max_cross.max(g.abs());
            }
        }
        let node_max = lens.iter().cloned().fold(0.0, f64::max);
        let node_min = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        max_spread = max_spread.max(node_max - node_min);
        min_len = min_len.min(node_min);
        max_len = max_len.max(node_max);
        sum_len += lens[0];
    }
    let mean = sum_len / grid.len() as f64;
    let scale = if max_len > 0.0 { max_len } else { 1.0 };
    Ok(FramingReport {
        max_abs_divergence: max_div,
        divergence_over_max_length: max_div / scale,
        max_orthogonality_defect: max_cross / (scale * scale),
        max_length_spread: max_spread / scale,
        min_g_length: min_len,
        max_g_length: max_len,
        degenerate: min_len < crate::framing::DEGENERACY_THRESHOLD * mean,
    })
}

/// A node-wise standard complex Gaussian spinor field with the Nyquist planes
/// removed (their reflected momenta do not exist on the grid, so spectral
/// symmetry tests would see a pure discretization artifact there).
pub fn random_bandlimited_field(grid: Grid, seed: u64) -> SpinorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bandlimited_from(grid, &mut rng)
}

fn random_bandlimited_from(grid: Grid, rng: &mut ChaCha8Rng) -> SpinorField {
    let normal = StandardNormal;
    let mut sample = || -> f64 { normal.sample(rng) };
    let n = grid.len();
    let mut alpha: Vec<Complex64> = (0..n).map(|_| Complex64::new(sample(), sample())).collect();
    let mut beta: Vec<Complex64> = (0..n).map(|_| Complex64::new(sample(), sample())).collect();
    let fft = Fft3::new(grid);
    let dims = grid.dims();
    for comp in [&mut alpha, &mut beta] {
        fft.forward(comp);
        for idx in 0..n {
            let k = grid.signed_freqs(idx);
            if (0..3).any(|a| k[a] == -((dims[a] / 2) as i64)) {
                comp[idx] = Complex64::ZERO;
            }
        }
        fft.inverse(comp);
    }
    SpinorField::from_fn(grid, |i| Spinor::new(alpha[i], beta[i]))
}

/// Max over `trials` random fields of ‖Op(f·j) − (Op f)·j‖ / ‖f‖ for the
/// spec's canonical operator.
///
/// Conformal test fields are h^{1/2}·(bandlimited Gaussian): the symmetrized
/// operator then works on exactly bandlimited data, so the check measures the
/// operator's spectral symmetry instead of the unrepresentable reflection of
/// Nyquist content that the nodewise h^{−1/2} factor would otherwise inject.
pub fn quaternionic_commutation_check(
    spec: &OperatorSpec,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "commutation check needs at least 1 trial".into(),
        ));
    }
    let op = DiracOperator::new(spec.clone())?;
    let uniform = VolumeWeight::uniform(spec.lattice, spec.grid);
    let h_sqrt: Option<Vec<f64>> = match &spec.conformal {
        Some(h) => Some(h.sample(&spec.grid)?.iter().map(|v| v.sqrt()).collect()),
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut f = random_bandlimited_from(spec.grid, &mut rng);
        if let Some(hs) = &h_sqrt {
            for (s, hv) in f.data_mut().iter_mut().zip(hs.iter()) {
                *s = s.scale(Complex64::new(*hv, 0.0));
            }
        }
        let lhs = op.apply(&apply_j_field(&f, &spec.spin))?;
        let rhs = apply_j_field(&op.apply(&f)?, &spec.spin);
        let mut diff = lhs;
        diff.axpy(Complex64::new(-1.0, 0.0), &rhs)?;
        let defect = crate::domain::weighted_norm(&diff, &uniform)?
            / crate::domain::weighted_norm(&f, &uniform)?;
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// True iff every cluster has even complex multiplicity (vacuously true for
/// an empty list).
pub fn evenness_check(clusters: &[ClusterSummary]) -> bool {
    clusters.iter().all(|c| c.multiplicity % 2 == 0)
}

/// Number of eigenvalues with |λ| < tol, computed with a solve that requests
/// comfortably more pairs than any expected kernel.
pub fn kernel_dimension(spec: &OperatorSpec, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let count = 6.min(2 * spec.grid.len());
    let pairs = eigensolve(spec, count, tol.min(1e-8), 20)?;
    Ok(pairs.iter().filter(|p| p.lambda.abs() < tol).count())
}
