//! Two-stage iterative eigensolver for the smallest-|λ| part of the spectrum.
//!
//! Stage 1 runs a block LOBPCG iteration on S² (positive semidefinite, so the
//! smallest-|λ| eigenspaces of S become the bottom of the spectrum), with a
//! flat spectral preconditioner (4π²|ξ|² + σ)⁻¹ and full reorthogonalization
//! of the trial basis every step. Stage 2 Rayleigh-Ritzes S itself on the
//! augmented span [V, S·V] of the converged block, which is S-invariant even
//! when a degenerate S²-cluster is only partially captured, and splits the
//! ±√μ branches. Every returned pair carries an independently recomputed
//! physical residual.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

use super::{DiracOperator, EigenPair, OperatorSpec};

type CMat = DMatrix<Complex64>;

/// Tunable solver knobs; `eigensolve` uses the defaults.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub count: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Extra block columns beyond `count` (discarded from the result).
    pub block_padding: usize,
    /// Extend the returned set past `count` whenever the smallest-|λ|
    /// selection would cut through a degenerate cluster, so every returned
    /// cluster is complete (the result may then hold more than `count`
    /// pairs). Off by default.
    pub complete_clusters: bool,
}

impl SolverOptions {
    pub fn new(count: usize, tol: f64, seed: u64) -> Self {
        Self {
            count,
            tol,
            max_iter: 400,
            seed,
            block_padding: 4,
            complete_clusters: false,
        }
    }
}

/// Computes the `count` eigenpairs of smallest |λ|, sorted ascending by λ.
pub fn eigensolve(
    spec: &OperatorSpec,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<EigenPair>> {
    eigensolve_with(spec, &SolverOptions::new(count, tol, seed))
}

/// `eigensolve` with cluster completion: at least `count` pairs, extended so
/// that no degenerate cluster is split at the selection boundary.
pub fn eigensolve_cluster_complete(
    spec: &OperatorSpec,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<EigenPair>> {
    let mut opts = SolverOptions::new(count, tol, seed);
    opts.complete_clusters = true;
    eigensolve_with(spec, &opts)
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a small Hermitian matrix with ascending eigenvalues.
fn eigh_sorted(m: CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let se = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Gram-based orthonormalization in the vol(Λ)/N-scaled inner product,
/// dropping directions whose Gram eigenvalue falls below `drop` relative to
/// the largest (rank-revealing, so nearly dependent columns are discarded
/// instead of amplified).
fn orthonormalize(b: &CMat, cv: f64, drop: f64) -> CMat {
    let gram = hermitian_part(&(b.ad_mul(b) * Complex64::new(cv, 0.0)));
    let (vals, vecs) = eigh_sorted(gram);
    let wmax = vals.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] > drop * wmax && vals[i] > 0.0)
        .collect();
    let mut mixer = CMat::zeros(b.ncols(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let scale = Complex64::new(1.0 / vals[i].sqrt(), 0.0);
        for r in 0..b.ncols() {
            mixer[(r, c)] = vecs[(r, i)] * scale;
        }
    }
    b * mixer
}

fn hstack(blocks: &[&CMat]) -> CMat {
    let nrows = blocks[0].nrows();
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(nrows, ncols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (nrows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

fn column_norm(m: &CMat, j: usize, cv: f64) -> f64 {
    m.column(j).norm() * cv.sqrt()
}

fn apply_block(op: &DiracOperator, x: &CMat, twice: bool) -> CMat {
    let dim = x.nrows();
    let mut out = CMat::zeros(dim, x.ncols());
    let mut tmp = vec![Complex64::ZERO; dim];
    for j in 0..x.ncols() {
        let src = &x.as_slice()[j * dim..(j + 1) * dim];
        let dst = &mut out.as_mut_slice()[j * dim..(j + 1) * dim];
        if twice {
            op.apply_slice(src, &mut tmp);
            op.apply_slice(&tmp, dst);
        } else {
            op.apply_slice(src, dst);
        }
    }
    out
}

fn precondition_block(op: &DiracOperator, r: &CMat, sigma: f64) -> CMat {
    let dim = r.nrows();
    let mut out = CMat::zeros(dim, r.ncols());
    for j in 0..r.ncols() {
        let src = &r.as_slice()[j * dim..(j + 1) * dim];
        let dst = &mut out.as_mut_slice()[j * dim..(j + 1) * dim];
        op.precondition_slice(src, dst, sigma);
    }
    out
}

struct Stage2 {
    lams: Vec<f64>,
    vecs: CMat,
    resids: Vec<f64>,
}

pub fn eigensolve_with(spec: &OperatorSpec, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    if opts.count == 0 {
        return Err(Error::InvalidParameter(
            "eigenpair count must be at least 1".into(),
        ));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "solver tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let op = DiracOperator::new(spec.clone())?;
    let dim = op.dim();
    if opts.count > dim {
        return Err(Error::CountTooLarge {
            count: opts.count,
            dim,
        });
    }
    let mut m = (opts.count + opts.block_padding).min(dim);
    let max_block = (opts.count + opts.block_padding + 24).min(dim);
    let cv = spec.lattice.volume() / spec.grid.len() as f64;

    // Shift for the flat preconditioner: a quarter of the smallest nonzero
    // symbol square keeps the kernel modes bounded without flattening the
    // spectral gaps near the bottom.
    let sigma = op
        .symbol_squares()
        .iter()
        .cloned()
        .filter(|&s| s > 1e-12)
        .fold(f64::INFINITY, f64::min)
        / 4.0;
    let sigma = if sigma.is_finite() { sigma } else { 1.0 };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = StandardNormal;
    let mut random_block = |rows: usize, cols: usize| {
        CMat::from_fn(rows, cols, |_, _| {
            Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
        })
    };
    let mut x = orthonormalize(&random_block(dim, m), cv, 1e-12);

    // Stage-1 target: S²-residuals two decades below the requested pair
    // tolerance translate into S-residuals comfortably below it.
    let inner_tol = (opts.tol * 1e-2).max(1e-13);
    let mut budget = opts.max_iter;

    let (stage2, selected, cluster_ids) = loop {
        stage1(
            &op,
            &mut x,
            m,
            cv,
            sigma,
            inner_tol,
            opts.count,
            &mut budget,
        );
        let stage2 = stage2_split(&op, &x, cv, opts.count)?;

        // Select the smallest-|λ| pairs deterministically.
        let mut order: Vec<usize> = (0..stage2.lams.len()).collect();
        order.sort_by(|&a, &b| {
            stage2.lams[a]
                .abs()
                .partial_cmp(&stage2.lams[b].abs())
                .expect("finite eigenvalues")
                .then(
                    stage2.lams[a]
                        .partial_cmp(&stage2.lams[b])
                        .expect("finite eigenvalues"),
                )
                .then(a.cmp(&b))
        });
        let mut take = opts.count;
        let mut need_growth = false;
        if opts.complete_clusters {
            let max_abs = order
                .iter()
                .map(|&j| stage2.lams[j].abs())
                .fold(0.0f64, f64::max);
            let gap_tol = 1e-6 * max_abs.max(1.0);
            while take < order.len() {
                let edge = stage2.lams[order[take - 1]].abs();
                let probe = stage2.lams[order[take]].abs();
                if probe - edge >= gap_tol {
                    break;
                }
                if stage2.resids[order[take]] > opts.tol {
                    need_growth = true;
                    break;
                }
                take += 1;
            }
            // The boundary cluster may extend past everything stage 2 can see.
            if take == order.len() && take < dim {
                need_growth = true;
            }
        }
        if need_growth && m + 4 <= max_block && budget > 0 {
            m += 4;
            let fresh = random_block(dim, 4);
            x = orthonormalize(&hstack(&[&x, &fresh]), cv, 1e-12);
            continue;
        }

        let mut selected: Vec<usize> = order[..take].to_vec();
        selected.sort_by(|&a, &b| {
            stage2.lams[a]
                .partial_cmp(&stage2.lams[b])
                .expect("finite eigenvalues")
                .then(a.cmp(&b))
        });

        // Cluster ids on the selected eigenvalues (relative gap tolerance).
        let max_abs = selected
            .iter()
            .map(|&j| stage2.lams[j].abs())
            .fold(0.0, f64::max);
        let gap_tol = 1e-6 * max_abs.max(1.0);
        let mut cluster_ids = vec![0usize; selected.len()];
        for i in 1..selected.len() {
            let gap = stage2.lams[selected[i]] - stage2.lams[selected[i - 1]];
            cluster_ids[i] = cluster_ids[i - 1] + usize::from(gap >= gap_tol);
        }
        break (stage2, selected, cluster_ids);
    };

    let mut pairs = Vec::with_capacity(selected.len());
    let mut worst: f64 = 0.0;
    for (pos, &j) in selected.iter().enumerate() {
        let lambda = stage2.lams[j];
        // θ column → field.
        let theta = crate::domain::SpinorField::from_fn(spec.grid, |i| {
            crate::clifford::Spinor::new(stage2.vecs[(2 * i, j)], stage2.vecs[(2 * i + 1, j)])
        });
        let field = op.desymmetrize(&theta)?;
        let residual = op.physical_residual(&field, lambda)?;
        worst = worst.max(residual);
        pairs.push(EigenPair {
            lambda,
            field,
            residual,
            cluster_id: cluster_ids[pos],
        });
    }

    if worst > opts.tol {
        return Err(Error::NotConverged {
            tol: opts.tol,
            iterations: opts.max_iter,
            achieved: worst,
        });
    }
    Ok(pairs)
}

/// Block LOBPCG on S² with full reorthogonalization; drives the first
/// `count` Ritz residuals below `inner_tol` or exhausts the budget.
#[allow(clippy::too_many_arguments)]
fn stage1(
    op: &DiracOperator,
    x: &mut CMat,
    m: usize,
    cv: f64,
    sigma: f64,
    inner_tol: f64,
    count: usize,
    budget: &mut usize,
) {
    let dim = x.nrows();
    let mut p: Option<CMat> = None;
    while *budget > 0 {
        *budget -= 1;
        let ax = apply_block(op, x, true);
        let t = hermitian_part(&(x.ad_mul(&ax) * Complex64::new(cv, 0.0)));
        let (theta, q) = eigh_sorted(t);
        *x = &*x * &q;
        let axq = &ax * &q;

        let mut resid = axq;
        for j in 0..x.ncols() {
            let th = Complex64::new(theta[j], 0.0);
            for i in 0..dim {
                resid[(i, j)] -= th * x[(i, j)];
            }
        }
        let rnorms: Vec<f64> = (0..x.ncols()).map(|j| column_norm(&resid, j, cv)).collect();
        let achieved = rnorms
            .iter()
            .take(count.min(rnorms.len()))
            .cloned()
            .fold(0.0, f64::max);
        if achieved <= inner_tol {
            return;
        }

        // Preconditioned residual directions for the still-active columns.
        let active: Vec<usize> = (0..x.ncols())
            .filter(|&j| rnorms[j] > 0.1 * inner_tol)
            .collect();
        let mut w = CMat::zeros(dim, active.len());
        for (c, &j) in active.iter().enumerate() {
            w.set_column(c, &resid.column(j).clone_owned());
        }
        let mut w = precondition_block(op, &w, sigma);
        for c in 0..w.ncols() {
            let n = column_norm(&w, c, cv);
            if n > 0.0 {
                let s = Complex64::new(1.0 / n, 0.0);
                for i in 0..dim {
                    w[(i, c)] *= s;
                }
            }
        }

        let basis = match &p {
            Some(pm) => hstack(&[x, &w, pm]),
            None => hstack(&[x, &w]),
        };
        let b = orthonormalize(&basis, cv, 1e-8);
        let ab = apply_block(op, &b, true);
        let t2 = hermitian_part(&(b.ad_mul(&ab) * Complex64::new(cv, 0.0)));
        let (_, q2) = eigh_sorted(t2);
        let take = m.min(b.ncols());
        let xn = (&b * q2.view((0, 0), (b.ncols(), take))).clone_owned();

        // Next search direction: what of the new block is orthogonal to the
        // previous one.
        let overlap = x.ad_mul(&xn) * Complex64::new(cv, 0.0);
        let pnew = &xn - &*x * overlap;
        let pn = orthonormalize(&pnew, cv, 1e-8);
        p = if pn.ncols() > 0 { Some(pn) } else { None };
        *x = xn;
    }
}

/// Rayleigh-Ritz of S on the S-closed span [X, SX]: splits the ±√μ branches
/// and yields per-candidate unweighted residuals.
fn stage2_split(op: &DiracOperator, x: &CMat, cv: f64, count: usize) -> Result<Stage2> {
    let sx = apply_block(op, x, false);
    let u = orthonormalize(&hstack(&[x, &sx]), cv, 1e-10);
    if u.ncols() < count {
        return Err(Error::InvalidParameter(format!(
            "converged subspace rank {} is below the requested count {}",
            u.ncols(),
            count
        )));
    }
    let su = apply_block(op, &u, false);
    let t = hermitian_part(&(u.ad_mul(&su) * Complex64::new(cv, 0.0)));
    let (lams, q) = eigh_sorted(t);
    let vecs = &u * &q;
    let svq = &su * &q;
    let mut resids = Vec::with_capacity(lams.len());
    for j in 0..lams.len() {
        let mut r = svq.column(j).clone_owned();
        let lam = Complex64::new(lams[j], 0.0);
        for i in 0..r.nrows() {
            r[i] -= lam * vecs[(i, j)];
        }
        resids.push(r.norm() * cv.sqrt());
    }
    Ok(Stage2 { lams, vecs, resids })
}
