//! Single-site operator families for the three kinds of phase space, plus
//! the discrete and continuous Wigner functions.
//!
//! DV basis index `i` stands for the two-sided label `s = two_sided(i, N)`.
//! Rotor basis index `i` stands for the ladder label `n = i - cutoff`.
//! Fock index is the photon number.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::tensor::{exp_i_hermitian, eigh, LinalgError, OperatorMatrix};
use crate::weyl::{half_angle, two_sided};

/// Irrational flux used when none is given: the inverse golden ratio.
pub const GOLDEN_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("N must be at least 2, got {0}")]
    InvalidN(u32),
    #[error("the discrete Wigner function is defined for odd N only, got N={0}")]
    EvenN(u32),
    #[error("cutoff must be at least 1")]
    InvalidCutoff,
    #[error("hop distance {k} exceeds twice the cutoff {cutoff}")]
    HopTooLong { k: i64, cutoff: usize },
    #[error("phi must lie in (0, 1), got {0}")]
    InvalidPhi(f64),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RotorVariant {
    /// Clock powers become ladder phases, shift powers become hops.
    One,
    /// Clock powers become hops, shift powers become ladder phases.
    Two,
}

impl RotorVariant {
    pub fn index(self) -> u8 {
        match self {
            RotorVariant::One => 1,
            RotorVariant::Two => 2,
        }
    }
}

/// Which kinematics a Hamiltonian lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpace {
    Dv { n: u32 },
    Rotor {
        variant: RotorVariant,
        cutoff: usize,
        phi: f64,
    },
    Cv { cutoff: usize },
}

impl PhaseSpace {
    pub fn dv(n: u32) -> Result<Self, SpaceError> {
        if n < 2 {
            return Err(SpaceError::InvalidN(n));
        }
        Ok(PhaseSpace::Dv { n })
    }

    pub fn rotor(variant: RotorVariant, cutoff: usize, phi: f64) -> Result<Self, SpaceError> {
        if cutoff < 1 {
            return Err(SpaceError::InvalidCutoff);
        }
        if !(phi > 0.0 && phi < 1.0) {
            return Err(SpaceError::InvalidPhi(phi));
        }
        Ok(PhaseSpace::Rotor {
            variant,
            cutoff,
            phi,
        })
    }

    pub fn cv(cutoff: usize) -> Result<Self, SpaceError> {
        if cutoff < 1 {
            return Err(SpaceError::InvalidCutoff);
        }
        Ok(PhaseSpace::Cv { cutoff })
    }

    /// Dimension of one site.
    pub fn site_dim(&self) -> usize {
        match *self {
            PhaseSpace::Dv { n } => n as usize,
            PhaseSpace::Rotor { cutoff, .. } => 2 * cutoff + 1,
            PhaseSpace::Cv { cutoff } => cutoff + 1,
        }
    }

    pub fn dv_n(&self) -> Option<u32> {
        match *self {
            PhaseSpace::Dv { n } => Some(n),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PhaseSpace::Dv { .. } => "dv",
            PhaseSpace::Rotor {
                variant: RotorVariant::One,
                ..
            } => "rotor1",
            PhaseSpace::Rotor {
                variant: RotorVariant::Two,
                ..
            } => "rotor2",
            PhaseSpace::Cv { .. } => "cv",
        }
    }
}

impl fmt::Display for PhaseSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSpace::Dv { n } => write!(f, "dv N={n}"),
            PhaseSpace::Rotor {
                variant,
                cutoff,
                phi,
            } => write!(f, "rotor{} cutoff={cutoff} phi={phi}", variant.index()),
            PhaseSpace::Cv { cutoff } => write!(f, "cv cutoff={cutoff}"),
        }
    }
}

/// A validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: OperatorMatrix,
}

impl DensityMatrix {
    pub fn new(mat: OperatorMatrix) -> Result<Self, SpaceError> {
        let dev = mat.hermitian_deviation();
        if dev > 1e-12 {
            return Err(SpaceError::NotDensity(format!("Hermitian deviation {dev:.3e}")));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(SpaceError::NotDensity(format!("trace {tr}")));
        }
        let min = eigh(&mat)?.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(SpaceError::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self {
            mat: mat.checked_hermitian()?,
        })
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self, SpaceError> {
        let norm = crate::tensor::vec_norm(psi);
        if norm == 0.0 {
            return Err(SpaceError::NotDensity("zero state vector".into()));
        }
        let n = psi.len();
        let m = DMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() / (norm * norm));
        Self::new(OperatorMatrix::from_dense(m))
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self, SpaceError> {
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[index] = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, SpaceError> {
        Self::new(OperatorMatrix::real_diagonal(&vec![1.0 / dim as f64; dim]))
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

fn check_n(n: u32) -> Result<(), SpaceError> {
    if n < 2 {
        Err(SpaceError::InvalidN(n))
    } else {
        Ok(())
    }
}

/// `X |s> = |s + 1 mod N>`.
pub fn dv_shift(n: u32) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let n = n as usize;
    Ok(OperatorMatrix::from_triplets(
        n,
        (0..n).map(|i| ((i + 1) % n, i, C64::new(1.0, 0.0))),
    )?)
}

/// `Z = diag(w^s)`.
pub fn dv_clock(n: u32) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let d: Vec<C64> = (0..n).map(|i| half_angle(2 * i as i64, n)).collect();
    Ok(OperatorMatrix::diagonal(&d))
}

/// `F[s, s'] = e^{2 pi i s s' / N} / sqrt(N)`.
pub fn dv_fourier(n: u32) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let norm = 1.0 / (n as f64).sqrt();
    let m = DMatrix::from_fn(n as usize, n as usize, |r, c| {
        let k = 2 * ((r * c) % n as usize) as i64;
        half_angle(k, n) * norm
    });
    Ok(OperatorMatrix::from_dense(m))
}

/// `|s> -> |-s mod N>`.
pub fn dv_parity(n: u32) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let n = n as usize;
    Ok(OperatorMatrix::from_triplets(
        n,
        (0..n).map(|i| ((n - i) % n, i, C64::new(1.0, 0.0))),
    )?)
}

/// Position operator, diagonal in the two-sided labels.
pub fn dv_position(n: u32) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let d: Vec<f64> = (0..n).map(|i| two_sided(i as i64, n) as f64).collect();
    Ok(OperatorMatrix::real_diagonal(&d))
}

/// Momentum operator `F c F^dagger`.
pub fn dv_momentum(n: u32) -> Result<OperatorMatrix, SpaceError> {
    let f = dv_fourier(n)?;
    let c = dv_position(n)?;
    Ok(f.matmul(&c)?.matmul(&f.adjoint())?.into_dense())
}

/// `D(S, M) = e^{-i pi S M / N} Z^M X^S`.
pub fn dv_displacement(n: u32, s: i64, m: i64) -> Result<OperatorMatrix, SpaceError> {
    check_n(n)?;
    let nn = n as usize;
    let trips = (0..nn).map(|i| {
        let row = (i as i64 + s).rem_euclid(n as i64) as usize;
        let k = -s * m + 2 * m * row as i64;
        (row, i, half_angle(k, n))
    });
    Ok(OperatorMatrix::from_triplets(nn, trips)?)
}

/// `Tr(rho D P D^dagger) / N` without discarding the imaginary part.
pub fn dv_wigner_complex(rho: &DensityMatrix, s: i64, m: i64) -> Result<C64, SpaceError> {
    let n = rho.dim() as u32;
    if n.is_multiple_of(2) {
        return Err(SpaceError::EvenN(n));
    }
    let d = dv_displacement(n, s, m)?;
    let p = dv_parity(n)?;
    let kernel = d.matmul(&p)?.matmul(&d.adjoint())?;
    let tr = rho.matrix().matmul(&kernel)?.trace();
    Ok(tr / n as f64)
}

pub fn dv_wigner(rho: &DensityMatrix, s: i64, m: i64) -> Result<f64, SpaceError> {
    Ok(dv_wigner_complex(rho, s, m)?.re)
}

/// Wigner values over the full two-sided grid, rows `(S, M, W)` in
/// ascending `S` then `M`.
pub fn dv_wigner_grid(rho: &DensityMatrix) -> Result<Vec<(i64, i64, f64)>, SpaceError> {
    let n = rho.dim() as u32;
    if n.is_multiple_of(2) {
        return Err(SpaceError::EvenN(n));
    }
    let half = (n / 2) as i64;
    let mut out = Vec::with_capacity((n * n) as usize);
    for s in -half..=half {
        for m in -half..=half {
            out.push((s, m, dv_wigner(rho, s, m)?));
        }
    }
    Ok(out)
}

/// Truncated rotor ladder with labels `-cutoff..=cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorOperators {
    cutoff: usize,
    phi: f64,
}

impl RotorOperators {
    pub fn new(cutoff: usize, phi: f64) -> Result<Self, SpaceError> {
        if cutoff < 1 {
            return Err(SpaceError::InvalidCutoff);
        }
        Ok(Self { cutoff, phi })
    }

    pub fn from_space(space: &PhaseSpace) -> Option<Self> {
        match *space {
            PhaseSpace::Rotor { cutoff, phi, .. } => Some(Self { cutoff, phi }),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn labels(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(move |i| i as f64 - self.cutoff as f64)
    }

    pub fn number(&self) -> OperatorMatrix {
        let d: Vec<f64> = self.labels().collect();
        OperatorMatrix::real_diagonal(&d)
    }

    /// `sum_n |n + k><n|`, entries leaving the ladder dropped.
    pub fn hop(&self, k: i64) -> Result<OperatorMatrix, SpaceError> {
        if k.unsigned_abs() as usize > 2 * self.cutoff {
            return Err(SpaceError::HopTooLong {
                k,
                cutoff: self.cutoff,
            });
        }
        let dim = self.dim() as i64;
        let trips = (0..dim).filter_map(|i| {
            let r = i + k;
            (0..dim)
                .contains(&r)
                .then_some((r as usize, i as usize, C64::new(1.0, 0.0)))
        });
        Ok(OperatorMatrix::from_triplets(self.dim(), trips)?)
    }

    /// `(hop(k) + hop(k)^dagger) / 2`.
    pub fn cos_hop(&self, k: i64) -> Result<OperatorMatrix, SpaceError> {
        let h = self.hop(k)?;
        Ok(h.add(&h.adjoint())?.scale(C64::new(0.5, 0.0)).checked_hermitian()?)
    }

    pub fn cos_number(&self, gamma: f64) -> OperatorMatrix {
        let d: Vec<f64> = self.labels().map(|n| (gamma * n).cos()).collect();
        OperatorMatrix::real_diagonal(&d)
    }

    /// `e^{2 pi i phi j n}`.
    pub fn phase(&self, j: i64) -> OperatorMatrix {
        let d: Vec<C64> = self
            .labels()
            .map(|n| C64::from_polar(1.0, 2.0 * PI * self.phi * j as f64 * n))
            .collect();
        OperatorMatrix::diagonal(&d)
    }
}

/// Truncated oscillator with photon numbers `0..=cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockOperators {
    cutoff: usize,
}

impl FockOperators {
    pub fn new(cutoff: usize) -> Result<Self, SpaceError> {
        if cutoff < 1 {
            return Err(SpaceError::InvalidCutoff);
        }
        Ok(Self { cutoff })
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn a(&self) -> OperatorMatrix {
        OperatorMatrix::from_triplets(
            self.dim(),
            (1..self.dim()).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
        )
        .expect("indices in range")
    }

    pub fn a_dag(&self) -> OperatorMatrix {
        self.a().adjoint()
    }

    pub fn number(&self) -> OperatorMatrix {
        let d: Vec<f64> = (0..self.dim()).map(|n| n as f64).collect();
        OperatorMatrix::real_diagonal(&d)
    }

    /// `(a + a^dagger) / sqrt(2)`.
    pub fn x(&self) -> OperatorMatrix {
        let a = self.a();
        a.add(&a.adjoint())
            .expect("same dim")
            .scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
            .checked_hermitian()
            .expect("x is Hermitian")
    }

    /// `-i (a - a^dagger) / sqrt(2)`.
    pub fn p(&self) -> OperatorMatrix {
        let a = self.a();
        a.sub(&a.adjoint())
            .expect("same dim")
            .scale(C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2))
            .checked_hermitian()
            .expect("p is Hermitian")
    }

    /// `e^{i pi n / 2}`.
    pub fn fourier(&self) -> OperatorMatrix {
        let d: Vec<C64> = (0..self.dim()).map(|n| half_angle(n as i64, 2)).collect();
        OperatorMatrix::diagonal(&d)
    }

    /// `(-1)^n`.
    pub fn parity(&self) -> OperatorMatrix {
        let d: Vec<f64> = (0..self.dim())
            .map(|n| if n.is_multiple_of(2) { 1.0 } else { -1.0 })
            .collect();
        OperatorMatrix::real_diagonal(&d)
    }

    /// `exp(alpha a^dagger - alpha* a)` on the truncated space.
    pub fn displacement(&self, alpha: C64) -> Result<OperatorMatrix, SpaceError> {
        let a = self.a();
        // alpha a^dag - alpha* a = i G with G Hermitian
        let g = a
            .adjoint()
            .scale(alpha)
            .sub(&a.scale(alpha.conj()))?
            .scale(C64::new(0.0, -1.0));
        Ok(exp_i_hermitian(&g, 1.0)?)
    }
}

/// CV Wigner value plus the population that the displaced state leaves in
/// the top tenth of the Fock ladder; a large weight means the cutoff is too
/// small for the requested point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvWigner {
    pub value: f64,
    pub truncation_weight: f64,
}

/// `W(X, P) = (2/pi) Tr(rho D P D^dagger)`, with `D` the displacement by
/// `alpha = X + iP` in quadratures `x = (a + a^dagger)/2`, `p = (a - a^dagger)/2i`.
pub fn cv_wigner(rho: &DensityMatrix, x: f64, p: f64) -> Result<CvWigner, SpaceError> {
    let fock = FockOperators::new(rho.dim() - 1)?;
    let d = fock.displacement(C64::new(x, p))?;
    let kernel = d.matmul(&fock.parity())?.matmul(&d.adjoint())?;
    let value = 2.0 / PI * rho.matrix().matmul(&kernel)?.trace().re;

    let shifted = d.adjoint().matmul(rho.matrix())?.matmul(&d)?;
    let dim = fock.dim();
    let top = (dim - dim.div_ceil(10)).min(dim - 1);
    let truncation_weight = (top..dim).map(|n| shifted.get(n, n).re.abs()).sum();
    Ok(CvWigner {
        value,
        truncation_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: usize) -> OperatorMatrix {
        OperatorMatrix::identity(n)
    }

    #[test]
    fn qubit_fourier_is_hadamard() {
        let f = dv_fourier(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.get(0, 0).re - h).abs() < 1e-15);
        assert!((f.get(1, 1).re + h).abs() < 1e-15);
        assert!(dv_parity(2).unwrap().max_abs_diff(&id(2)).unwrap() == 0.0);
    }

    #[test]
    fn parity_reflects_shift() {
        let p = dv_parity(5).unwrap();
        let x = dv_shift(5).unwrap();
        let lhs = p.matmul(&x).unwrap().matmul(&p.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&x.adjoint()).unwrap() < 1e-15);
    }

    #[test]
    fn position_momentum_fourier_relations() {
        for n in [3u32, 5, 7] {
            let f = dv_fourier(n).unwrap();
            let c = dv_position(n).unwrap();
            let m = dv_momentum(n).unwrap();
            let fd = f.adjoint();
            let a = fd.matmul(&m).unwrap().matmul(&f).unwrap();
            assert!(a.max_abs_diff(&c).unwrap() < 1e-12);
            let b = fd.matmul(&c).unwrap().matmul(&f).unwrap();
            assert!(b.max_abs_diff(&m.scale(C64::new(-1.0, 0.0))).unwrap() < 1e-12);
        }
    }

    #[test]
    fn shift_is_exponential_of_momentum() {
        let n = 6;
        let m = dv_momentum(n).unwrap().checked_hermitian().unwrap();
        let x = exp_i_hermitian(&m, -2.0 * PI / n as f64).unwrap();
        assert!(x.max_abs_diff(&dv_shift(n).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn wigner_of_maximally_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        for (_, _, w) in dv_wigner_grid(&rho).unwrap() {
            assert!((w - 1.0 / 9.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wigner_marginal_gives_position_population() {
        let rho = DensityMatrix::basis_state(3, 0).unwrap();
        let sum: f64 = (-1..=1).map(|m| dv_wigner(&rho, 0, m).unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-14);
        let off: f64 = (-1..=1).map(|m| dv_wigner(&rho, 1, m).unwrap()).sum();
        assert!(off.abs() < 1e-14);
    }

    #[test]
    fn even_n_wigner_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(dv_wigner(&rho, 0, 0).unwrap_err(), SpaceError::EvenN(4));
    }

    #[test]
    fn rotor_hops() {
        let r = RotorOperators::new(1, GOLDEN_PHI).unwrap();
        let h = r.hop(1).unwrap();
        assert_eq!(h.get(1, 0), C64::new(1.0, 0.0));
        assert_eq!(h.get(2, 1), C64::new(1.0, 0.0));
        assert_eq!(h.to_sparse().nnz(), 2);
        assert!(r.cos_number(0.0).max_abs_diff(&id(3)).unwrap() == 0.0);
        assert!(matches!(r.hop(3), Err(SpaceError::HopTooLong { .. })));
    }

    #[test]
    fn hop_pair_is_interior_projector() {
        let r = RotorOperators::new(4, GOLDEN_PHI).unwrap();
        let k = 2;
        let prod = r.hop(k).unwrap().matmul(&r.hop(-k).unwrap()).unwrap();
        for i in 0..r.dim() {
            let want = if i >= k as usize { 1.0 } else { 0.0 };
            assert_eq!(prod.get(i, i).re, want);
        }
    }

    #[test]
    fn fock_quadratures() {
        let f = FockOperators::new(20).unwrap();
        let x = f.x();
        let p = f.p();
        let comm = x.matmul(&p).unwrap().sub(&p.matmul(&x).unwrap()).unwrap();
        for i in 0..20 {
            assert!((comm.get(i, i) - C64::new(0.0, 1.0)).norm() < 1e-12);
        }
        assert!((comm.get(20, 20) - C64::new(0.0, 1.0)).norm() > 1.0);
        let pa = f.parity().matmul(&f.a()).unwrap().matmul(&f.parity()).unwrap();
        assert_eq!(pa, f.a().scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn vacuum_and_single_photon_wigner_at_origin() {
        let vac = DensityMatrix::basis_state(41, 0).unwrap();
        let w = cv_wigner(&vac, 0.0, 0.0).unwrap();
        assert!((w.value - 2.0 / PI).abs() < 1e-12);
        let one = DensityMatrix::basis_state(41, 1).unwrap();
        assert!((cv_wigner(&one, 0.0, 0.0).unwrap().value + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn vacuum_wigner_is_gaussian() {
        let vac = DensityMatrix::basis_state(41, 0).unwrap();
        for &(x, p) in &[(0.5, 0.0), (1.0, -1.0), (-2.0, 2.0)] {
            let w = cv_wigner(&vac, x, p).unwrap();
            let want = 2.0 / PI * (-2.0 * (x * x + p * p)).exp();
            assert!((w.value - want).abs() < 1e-8, "{x} {p}: {}", w.value);
            assert!(w.value > 0.0);
        }
    }
}
