//! Complex operator matrices shared by every phase space.
//!
//! Dense storage is an `nalgebra` matrix, sparse storage is CSR. Dense
//! Hermitian diagonalization is capped at [`DENSE_MAX_DIM`]; larger problems go
//! through the Lanczos solver in [`eig_lowest_sparse`].

mod lanczos;
mod sparse;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub use lanczos::{eig_lowest_sparse, eig_lowest_sparse_with, LanczosOptions};
pub use sparse::SparseMatrix;

/// Largest dimension handed to the dense eigensolver.
pub const DENSE_MAX_DIM: usize = 4096;

/// Default ceiling on Hilbert-space dimension for any realized operator.
pub const DEFAULT_MAX_DIM: usize = 1 << 22;

/// Relative tolerance (against the spectral width) used to call two
/// eigenvalues degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-6;

/// Absolute tolerance, scaled by `max(1, max|M_ij|)`, for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension {requested} exceeds the configured maximum {max}")]
    Capacity { requested: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("Lanczos did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NoConvergence { iterations: usize, best_residual: f64 },
    #[error("cannot request {k} eigenvalues of a {dim}-dimensional matrix")]
    TooManyEigenvalues { k: usize, dim: usize },
    #[error("entry ({row}, {col}) is outside a {dim}x{dim} matrix")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
    #[error("ground space fills all {k} computed eigenvalues; degeneracy is at least {k}")]
    DegeneracySaturated { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(SparseMatrix),
}

/// A square complex matrix together with a flag recording whether it has
/// been checked to be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    storage: Storage,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    pub fn from_dense(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        Self {
            storage: Storage::Dense(m),
            hermitian_hint: false,
        }
    }

    pub fn from_sparse(m: SparseMatrix) -> Self {
        Self {
            storage: Storage::Sparse(m),
            hermitian_hint: false,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            storage: Storage::Sparse(SparseMatrix::identity(dim)),
            hermitian_hint: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            storage: Storage::Sparse(SparseMatrix::zeros(dim)),
            hermitian_hint: true,
        }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let hermitian = diag.iter().all(|z| z.im == 0.0);
        Self {
            storage: Storage::Sparse(SparseMatrix::from_diagonal(diag)),
            hermitian_hint: hermitian,
        }
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        SparseMatrix::from_triplets(dim, triplets).map(Self::from_sparse)
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.dim(),
        }
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Checks Hermiticity within [`HERMITIAN_TOL`] and records the result.
    pub fn checked_hermitian(mut self) -> Result<Self, LinalgError> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(LinalgError::NotHermitian { deviation: dev });
        }
        self.hermitian_hint = true;
        Ok(self)
    }

    /// `max |M - M^dagger|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                let mut dev: f64 = 0.0;
                for r in 0..n {
                    for c in r..n {
                        dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
                    }
                }
                dev
            }
            Storage::Sparse(m) => m
                .triplets()
                .map(|(r, c, v)| (v - m.get(c, r).conj()).norm())
                .fold(0.0, f64::max),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(m) => m.get(r, c),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        match &self.storage {
            Storage::Dense(m) => SparseMatrix::from_dense(m),
            Storage::Sparse(m) => m.clone(),
        }
    }

    pub fn into_dense(self) -> Self {
        Self {
            storage: Storage::Dense(self.to_dense()),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
        };
        Self {
            storage,
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * alpha),
            Storage::Sparse(m) => Storage::Sparse(m.scale(alpha)),
        };
        Self {
            storage,
            hermitian_hint: self.hermitian_hint && alpha.im == 0.0,
        }
    }

    /// `self + alpha * other`; stays sparse when both operands are sparse.
    pub fn add_scaled(&self, other: &Self, alpha: C64) -> Result<Self, LinalgError> {
        self.same_dim(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.add_scaled(b, alpha)),
            _ => Storage::Dense(self.to_dense() + other.to_dense() * alpha),
        };
        Ok(Self {
            storage,
            hermitian_hint: false,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_dim(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a * b),
            (Storage::Dense(a), Storage::Sparse(b)) => Storage::Dense(a * b.to_dense()),
            (Storage::Sparse(a), Storage::Dense(b)) => Storage::Dense(a.to_dense() * b),
        };
        Ok(Self {
            storage,
            hermitian_hint: false,
        })
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        match &self.storage {
            Storage::Sparse(m) => m.matvec(x, y),
            Storage::Dense(m) => {
                let n = m.nrows();
                for (r, out) in y.iter_mut().enumerate().take(n) {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..n {
                        acc += m[(r, c)] * x[c];
                    }
                    *out = acc;
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Sparse(m) => m.max_abs(),
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.max_row_sum(),
            Storage::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, LinalgError> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Expectation value `<v|M|v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    fn same_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Kronecker product with the default dimension ceiling.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix, LinalgError> {
    kron_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_capped(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    max_dim: usize,
) -> Result<OperatorMatrix, LinalgError> {
    let requested = a
        .dim()
        .checked_mul(b.dim())
        .ok_or(LinalgError::Capacity {
            requested: usize::MAX,
            max: max_dim,
        })?;
    if requested > max_dim {
        return Err(LinalgError::Capacity {
            requested,
            max: max_dim,
        });
    }
    let storage = match (&a.storage, &b.storage) {
        (Storage::Dense(x), Storage::Dense(y)) => Storage::Dense(x.kronecker(y)),
        _ => Storage::Sparse(a.to_sparse().kron(&b.to_sparse())),
    };
    Ok(OperatorMatrix {
        storage,
        hermitian_hint: a.hermitian_hint && b.hermitian_hint,
    })
}

/// Kronecker product of a sequence of factors, first factor most significant.
pub fn kron_all<'a, I>(factors: I, max_dim: usize) -> Result<OperatorMatrix, LinalgError>
where
    I: IntoIterator<Item = &'a OperatorMatrix>,
{
    let mut acc = OperatorMatrix::identity(1);
    for f in factors {
        acc = kron_capped(&acc, f, max_dim)?;
    }
    Ok(acc)
}

/// Largest entry magnitude of `AB - BA`.
pub fn comm_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64, LinalgError> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.max_abs_diff(&ba)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Dense,
    SparseIterative,
}

/// Eigenvalues in ascending order plus the largest residual
/// `|M v - lambda v|` over the returned eigenpairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub dim: usize,
    pub method: SolveMethod,
    pub residual_bound: f64,
}

/// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
    pub residual_bound: f64,
}

impl Eigensystem {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }
}

fn require_dense_hermitian(m: &OperatorMatrix) -> Result<DMatrix<C64>, LinalgError> {
    if m.dim() > DENSE_MAX_DIM {
        return Err(LinalgError::Capacity {
            requested: m.dim(),
            max: DENSE_MAX_DIM,
        });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    let d = m.to_dense();
    Ok((&d + d.adjoint()) * C64::new(0.5, 0.0))
}

/// Full diagonalization of a Hermitian matrix with eigenvectors.
pub fn eigh(m: &OperatorMatrix) -> Result<Eigensystem, LinalgError> {
    let d = require_dense_hermitian(m)?;
    let n = d.nrows();
    if n == 0 {
        return Ok(Eigensystem {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            residual_bound: 0.0,
        });
    }
    let eig = d.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        eigenvalues.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let resid = &d * &eigenvectors - &eigenvectors * lambda;
    let residual_bound = resid
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
        residual_bound,
    })
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eig_hermitian(m: &OperatorMatrix) -> Result<SpectrumResult, LinalgError> {
    let es = eigh(m)?;
    Ok(SpectrumResult {
        eigenvalues: es.eigenvalues,
        dim: m.dim(),
        method: SolveMethod::Dense,
        residual_bound: es.residual_bound,
    })
}

/// Lowest `k` eigenvalues, dense when small enough, Lanczos otherwise.
pub fn eig_lowest(m: &OperatorMatrix, k: usize, seed: u64) -> Result<SpectrumResult, LinalgError> {
    if m.dim() <= DENSE_MAX_DIM.min(1024) || k >= m.dim() {
        let mut s = eig_hermitian(m)?;
        s.eigenvalues.truncate(k.min(m.dim()));
        return Ok(s);
    }
    eig_lowest_sparse_with(
        m,
        k,
        &LanczosOptions {
            seed,
            ..LanczosOptions::default()
        },
    )
}

/// `exp(i t H)` for Hermitian `H`, via eigendecomposition.
pub fn exp_i_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix, LinalgError> {
    let es = eigh(h)?;
    let n = es.eigenvalues.len();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        es.eigenvalues.iter().map(|&x| C64::from_polar(1.0, t * x)),
    ));
    let v = &es.eigenvectors;
    Ok(OperatorMatrix::from_dense(v * phases * v.adjoint()))
}

/// Number of eigenvalues within `DEGENERACY_REL_TOL * width` of the minimum.
///
/// `eigenvalues` must be sorted ascending. When every supplied value is
/// degenerate and `saturating` is set, the count is only a lower bound and an
/// error is returned.
pub fn ground_degeneracy(
    eigenvalues: &[f64],
    width: f64,
    saturating: bool,
) -> Result<usize, LinalgError> {
    let Some(&e0) = eigenvalues.first() else {
        return Ok(0);
    };
    let tol = DEGENERACY_REL_TOL * width.abs().max(f64::MIN_POSITIVE);
    let count = eigenvalues.iter().take_while(|&&e| e - e0 <= tol).count();
    if saturating && count == eigenvalues.len() {
        return Err(LinalgError::DegeneracySaturated { k: count });
    }
    Ok(count)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
