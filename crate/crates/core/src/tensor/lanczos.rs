//! Lanczos with explicit restarts and locking, for the low end of a
//! Hermitian spectrum.
//!
//! Each eigenpair is found by its own restarted Lanczos run, kept orthogonal
//! to the already-locked vectors, so exactly degenerate levels are resolved
//! one at a time. A Rayleigh-Ritz step on the locked basis finishes the job.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    inner, vec_norm, LinalgError, OperatorMatrix, SolveMethod, SpectrumResult, HERMITIAN_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    pub seed: u64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Convergence threshold relative to the Gershgorin bound of the matrix.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            krylov_dim: 80,
            max_restarts: 300,
            tol: 1e-10,
        }
    }
}

pub fn eig_lowest_sparse(m: &OperatorMatrix, k: usize) -> Result<SpectrumResult, LinalgError> {
    eig_lowest_sparse_with(m, k, &LanczosOptions::default())
}

pub fn eig_lowest_sparse_with(
    m: &OperatorMatrix,
    k: usize,
    opts: &LanczosOptions,
) -> Result<SpectrumResult, LinalgError> {
    let dim = m.dim();
    if k >= dim {
        return Err(LinalgError::TooManyEigenvalues { k, dim });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    if k == 0 {
        return Ok(SpectrumResult {
            eigenvalues: Vec::new(),
            dim,
            method: SolveMethod::SparseIterative,
            residual_bound: 0.0,
        });
    }

    let scale = m.gershgorin_radius().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut iterations = 0usize;

    for _ in 0..k {
        let mut v = random_start(&mut rng, dim, &locked);
        let mut best = f64::INFINITY;
        let mut done = false;
        for _ in 0..opts.max_restarts {
            let krylov = opts.krylov_dim.min(dim - locked.len()).max(1);
            let (u, res, steps) = lanczos_pass(m, &v, &locked, krylov, scale);
            iterations += steps;
            best = best.min(res);
            if res <= opts.tol * scale {
                locked.push(u);
                done = true;
                break;
            }
            v = u;
        }
        if !done {
            return Err(LinalgError::NoConvergence {
                iterations,
                best_residual: best,
            });
        }
    }

    rayleigh_ritz(m, &locked)
}

fn random_start(rng: &mut ChaCha8Rng, dim: usize, locked: &[Vec<C64>]) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        orthogonalize(&mut v, locked.iter());
        orthogonalize(&mut v, locked.iter());
        let n = vec_norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|z| *z /= n);
            return v;
        }
    }
}

fn orthogonalize<'a, I>(v: &mut [C64], basis: I)
where
    I: Iterator<Item = &'a Vec<C64>>,
{
    for q in basis {
        let overlap = inner(q, v);
        v.iter_mut().zip(q).for_each(|(x, y)| *x -= overlap * y);
    }
}

/// One Lanczos sweep from `start`; returns the lowest Ritz vector, its true
/// residual norm and the number of matrix-vector products used.
fn lanczos_pass(
    m: &OperatorMatrix,
    start: &[C64],
    locked: &[Vec<C64>],
    krylov: usize,
    scale: f64,
) -> (Vec<C64>, f64, usize) {
    let dim = start.len();
    let mut basis: Vec<Vec<C64>> = vec![start.to_vec()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut steps = 0;

    for j in 0..krylov {
        m.matvec_into(&basis[j], &mut w);
        steps += 1;
        let alpha = inner(&basis[j], &w).re;
        alphas.push(alpha);
        for _ in 0..2 {
            orthogonalize(&mut w, locked.iter());
            orthogonalize(&mut w, basis.iter());
        }
        let beta = vec_norm(&w);
        if j + 1 == krylov || beta < 1e-12 * scale {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
    }

    let n = alphas.len();
    let t = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            alphas[r]
        } else if r + 1 == c {
            betas[r]
        } else if c + 1 == r {
            betas[c]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");

    let mut u = vec![C64::new(0.0, 0.0); dim];
    for (i, q) in basis.iter().enumerate().take(n) {
        let y = eig.eigenvectors[(i, imin)];
        u.iter_mut().zip(q).for_each(|(a, b)| *a += b * y);
    }
    orthogonalize(&mut u, locked.iter());
    let nu = vec_norm(&u);
    u.iter_mut().for_each(|z| *z /= nu);

    m.matvec_into(&u, &mut w);
    steps += 1;
    let theta = inner(&u, &w).re;
    let res = w
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - b * theta).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (u, res, steps)
}

fn rayleigh_ritz(m: &OperatorMatrix, vecs: &[Vec<C64>]) -> Result<SpectrumResult, LinalgError> {
    let k = vecs.len();
    let images: Vec<Vec<C64>> = vecs.iter().map(|v| m.matvec(v)).collect();
    let g = DMatrix::from_fn(k, k, |r, c| inner(&vecs[r], &images[c]));
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let dim = m.dim();
    let mut residual_bound: f64 = 0.0;
    let mut eigenvalues = Vec::with_capacity(k);
    for &col in &order {
        let lambda = eig.eigenvalues[col];
        let mut w = vec![C64::new(0.0, 0.0); dim];
        let mut hw = vec![C64::new(0.0, 0.0); dim];
        for i in 0..k {
            let y = eig.eigenvectors[(i, col)];
            for t in 0..dim {
                w[t] += vecs[i][t] * y;
                hw[t] += images[i][t] * y;
            }
        }
        let r = hw
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual_bound = residual_bound.max(r);
        eigenvalues.push(lambda);
    }
    Ok(SpectrumResult {
        eigenvalues,
        dim,
        method: SolveMethod::SparseIterative,
        residual_bound,
    })
}
