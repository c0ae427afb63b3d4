//! Clock-and-shift strings over Z_N with exact integer bookkeeping.
//!
//! A [`WeylString`] is `coeff * e^{i pi k / N} * prod_j X_j^{a_j} Z_j^{b_j}`,
//! each site factor written shift-first. On a single site
//! `X |s> = |s+1>` and `Z |s> = w^s |s>` with `w = e^{2 pi i / N}`, so
//! `Z X = w X Z`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::tensor::{LinalgError, OperatorMatrix, DEFAULT_MAX_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeylError {
    #[error("N must be at least 2, got {0}")]
    InvalidNLevel(u32),
    #[error("cannot combine strings over Z_{left} and Z_{right}")]
    NLevelMismatch { left: u32, right: u32 },
    #[error("site {site} is out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Reduces `v` into `[0, n)`.
pub fn reduce(v: i64, n: u32) -> u32 {
    v.rem_euclid(n as i64) as u32
}

/// Representative of `v mod n` in `[-floor(n/2), floor((n-1)/2)]`.
pub fn two_sided(v: i64, n: u32) -> i64 {
    let n = n as i64;
    let r = v.rem_euclid(n);
    if r > (n - 1) / 2 {
        r - n
    } else {
        r
    }
}

/// `PQ = w^exponent QP`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CommutationPhase {
    exponent: u32,
    n_level: u32,
}

impl CommutationPhase {
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn n_level(&self) -> u32 {
        self.n_level
    }

    /// Exponent in the two-sided range.
    pub fn signed(&self) -> i64 {
        two_sided(self.exponent as i64, self.n_level)
    }

    pub fn commutes(&self) -> bool {
        self.exponent == 0
    }

    pub fn phase(&self) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.exponent as f64 / self.n_level as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylString {
    n_level: u32,
    sites: BTreeMap<usize, (u32, u32)>,
    phase_exp: u32,
    coeff: C64,
}

impl WeylString {
    pub fn identity(n_level: u32) -> Result<Self, WeylError> {
        if n_level < 2 {
            return Err(WeylError::InvalidNLevel(n_level));
        }
        Ok(Self {
            n_level,
            sites: BTreeMap::new(),
            phase_exp: 0,
            coeff: C64::new(1.0, 0.0),
        })
    }

    /// Normal-ordered string from `(site, a, b)` triples; repeated sites are
    /// multiplied in the given order.
    pub fn from_factors<I>(n_level: u32, factors: I) -> Result<Self, WeylError>
    where
        I: IntoIterator<Item = (usize, i64, i64)>,
    {
        let mut s = Self::identity(n_level)?;
        for (site, a, b) in factors {
            let mut f = Self::identity(n_level)?;
            f.set_site(site, reduce(a, n_level), reduce(b, n_level));
            s = s.mul(&f)?;
        }
        Ok(s)
    }

    pub fn shift(n_level: u32, site: usize, power: i64) -> Result<Self, WeylError> {
        Self::from_factors(n_level, [(site, power, 0)])
    }

    pub fn clock(n_level: u32, site: usize, power: i64) -> Result<Self, WeylError> {
        Self::from_factors(n_level, [(site, 0, power)])
    }

    pub fn with_coeff(mut self, coeff: C64) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn with_phase_exp(mut self, k: i64) -> Self {
        self.phase_exp = reduce(k, 2 * self.n_level);
        self
    }

    fn set_site(&mut self, site: usize, a: u32, b: u32) {
        if a == 0 && b == 0 {
            self.sites.remove(&site);
        } else {
            self.sites.insert(site, (a, b));
        }
    }

    pub fn n_level(&self) -> u32 {
        self.n_level
    }

    pub fn coeff(&self) -> C64 {
        self.coeff
    }

    /// Exponent `k` of the prefactor `e^{i pi k / N}`, in `[0, 2N)`.
    pub fn phase_exp(&self) -> u32 {
        self.phase_exp
    }

    /// `(a, b)` at `site`, reduced mod N.
    pub fn exponents(&self, site: usize) -> (u32, u32) {
        self.sites.get(&site).copied().unwrap_or((0, 0))
    }

    pub fn signed_exponents(&self, site: usize) -> (i64, i64) {
        let (a, b) = self.exponents(site);
        (two_sided(a as i64, self.n_level), two_sided(b as i64, self.n_level))
    }

    pub fn sites(&self) -> impl Iterator<Item = (usize, u32, u32)> + '_ {
        self.sites.iter().map(|(&s, &(a, b))| (s, a, b))
    }

    pub fn support(&self) -> Vec<usize> {
        self.sites.keys().copied().collect()
    }

    pub fn weight(&self) -> usize {
        self.sites.len()
    }

    pub fn is_identity(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.sites.keys().next_back().copied()
    }

    /// `coeff * e^{i pi k / N}`.
    pub fn scalar(&self) -> C64 {
        self.coeff * half_angle(self.phase_exp as i64, self.n_level)
    }

    /// Same operator content with coefficient 1 and phase 0.
    pub fn bare(&self) -> Self {
        Self {
            n_level: self.n_level,
            sites: self.sites.clone(),
            phase_exp: 0,
            coeff: C64::new(1.0, 0.0),
        }
    }

    fn check_level(&self, other: &Self) -> Result<(), WeylError> {
        if self.n_level != other.n_level {
            return Err(WeylError::NLevelMismatch {
                left: self.n_level,
                right: other.n_level,
            });
        }
        Ok(())
    }

    /// Normal-ordered product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, WeylError> {
        self.check_level(other)?;
        let n = self.n_level as i64;
        let mut out = Self {
            n_level: self.n_level,
            sites: self.sites.clone(),
            phase_exp: 0,
            coeff: self.coeff * other.coeff,
        };
        // X^a Z^b X^c Z^d = w^{bc} X^{a+c} Z^{b+d}; one power of w is 2 in half-angle units.
        let mut k = self.phase_exp as i64 + other.phase_exp as i64;
        for (site, c, d) in other.sites() {
            let (a, b) = self.exponents(site);
            k += 2 * (b as i64) * (c as i64);
            out.set_site(
                site,
                reduce(a as i64 + c as i64, self.n_level),
                reduce(b as i64 + d as i64, self.n_level),
            );
        }
        out.phase_exp = reduce(k, 2 * n as u32);
        Ok(out)
    }

    pub fn commutation_exponent(&self, other: &Self) -> Result<CommutationPhase, WeylError> {
        self.check_level(other)?;
        let mut e: i64 = 0;
        for (site, a_p, b_p) in self.sites() {
            let (a_q, b_q) = other.exponents(site);
            e += b_p as i64 * a_q as i64 - a_p as i64 * b_q as i64;
        }
        Ok(CommutationPhase {
            exponent: reduce(e, self.n_level),
            n_level: self.n_level,
        })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool, WeylError> {
        Ok(self.commutation_exponent(other)?.commutes())
    }

    pub fn dagger(&self) -> Self {
        let n = self.n_level;
        // (X^a Z^b)^dagger = Z^{-b} X^{-a} = w^{ab} X^{-a} Z^{-b}
        let mut k = -(self.phase_exp as i64);
        let mut sites = BTreeMap::new();
        for (site, a, b) in self.sites() {
            k += 2 * a as i64 * b as i64;
            sites.insert(site, (reduce(-(a as i64), n), reduce(-(b as i64), n)));
        }
        Self {
            n_level: n,
            sites,
            phase_exp: reduce(k, 2 * n),
            coeff: self.coeff.conj(),
        }
    }

    /// Whether `dagger(self)` is the same operator, compared exactly.
    pub fn is_self_adjoint(&self) -> bool {
        let d = self.dagger();
        d.sites == self.sites && (d.scalar() - self.scalar()).norm() <= 1e-14 * self.coeff.norm().max(1.0)
    }

    /// Matrix on `n_sites` qudits, site 0 the most significant tensor factor.
    pub fn to_matrix(&self, n_sites: usize) -> Result<OperatorMatrix, WeylError> {
        self.to_matrix_capped(n_sites, DEFAULT_MAX_DIM)
    }

    pub fn to_matrix_capped(&self, n_sites: usize, max_dim: usize) -> Result<OperatorMatrix, WeylError> {
        if let Some(site) = self.max_site().filter(|&s| s >= n_sites) {
            return Err(WeylError::SiteOutOfRange { site, n_sites });
        }
        let dim = dimension(self.n_level, n_sites, max_dim)?;
        let n = self.n_level as usize;
        let strides: Vec<(usize, u32, u32)> = self
            .sites()
            .map(|(s, a, b)| (n.pow((n_sites - 1 - s) as u32), a, b))
            .collect();
        let table: Vec<C64> = (0..2 * n)
            .map(|k| self.coeff * half_angle(k as i64, self.n_level))
            .collect();
        let trips = (0..dim).map(|col| {
            let mut row = col;
            let mut k = self.phase_exp as usize;
            for &(stride, a, b) in &strides {
                let d = (col / stride) % n;
                let d2 = (d + a as usize) % n;
                row = row + d2 * stride - d * stride;
                k += 2 * b as usize * d;
            }
            (row, col, table[k % (2 * n)])
        });
        Ok(OperatorMatrix::from_triplets(dim, trips)?)
    }
}

/// `e^{i pi k / N}`, exact at the quarter turns.
pub fn half_angle(k: i64, n: u32) -> C64 {
    let two_n = 2 * n as i64;
    let k = k.rem_euclid(two_n);
    if 4 * k % two_n == 0 {
        return match 4 * k / two_n {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, PI * k as f64 / n as f64)
}

/// `N^n_sites`, or a capacity error.
pub fn dimension(n_level: u32, n_sites: usize, max_dim: usize) -> Result<usize, LinalgError> {
    let mut dim: usize = 1;
    for _ in 0..n_sites {
        dim = dim
            .checked_mul(n_level as usize)
            .filter(|&d| d <= max_dim)
            .ok_or(LinalgError::Capacity {
                requested: (n_level as f64).powi(n_sites as i32).min(usize::MAX as f64) as usize,
                max: max_dim,
            })?;
    }
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::comm_norm;

    fn x(n: u32, site: usize, p: i64) -> WeylString {
        WeylString::shift(n, site, p).unwrap()
    }

    fn z(n: u32, site: usize, p: i64) -> WeylString {
        WeylString::clock(n, site, p).unwrap()
    }

    #[test]
    fn inverse_gives_identity() {
        let p = x(5, 0, 1).mul(&x(5, 0, -1)).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.scalar(), C64::new(1.0, 0.0));
    }

    #[test]
    fn qubit_xz_anticommute() {
        let xz = x(2, 0, 1).mul(&z(2, 0, 1)).unwrap();
        let zx = z(2, 0, 1).mul(&x(2, 0, 1)).unwrap();
        assert_eq!(xz.bare(), zx.bare());
        assert!((zx.scalar() + xz.scalar()).norm() < 1e-15);
    }

    #[test]
    fn qubit_matrices_are_paulis() {
        let mx = x(2, 0, 1).to_matrix(1).unwrap();
        let mz = z(2, 0, 1).to_matrix(1).unwrap();
        assert_eq!(mx.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(mx.get(1, 0), C64::new(1.0, 0.0));
        assert_eq!(mz.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(mz.get(1, 1), C64::new(-1.0, 0.0));
    }

    #[test]
    fn order_n_powers_are_identity() {
        let x3 = WeylString::from_factors(3, [(0, 1, 0), (0, 1, 0), (0, 1, 0)]).unwrap();
        assert!(x3.is_identity());
        let m = x(3, 0, 3).to_matrix(1).unwrap();
        assert!(m.max_abs_diff(&OperatorMatrix::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn mixed_product_matches_matrices() {
        let p = WeylString::from_factors(3, [(0, 1, 2)]).unwrap();
        let q = WeylString::from_factors(3, [(0, 2, 1)]).unwrap();
        let lhs = p.mul(&q).unwrap().to_matrix(1).unwrap();
        let rhs = p.to_matrix(1).unwrap().matmul(&q.to_matrix(1).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn commutation_sign_matches_matrix_phase() {
        // X Z = w^{-1} Z X
        let e = x(3, 0, 1).commutation_exponent(&z(3, 0, 1)).unwrap();
        assert_eq!(e.signed(), -1);
        let mx = x(3, 0, 1).to_matrix(1).unwrap();
        let mz = z(3, 0, 1).to_matrix(1).unwrap();
        let lhs = mx.matmul(&mz).unwrap();
        let rhs = mz.matmul(&mx).unwrap().scale(e.phase());
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn dagger_matches_adjoint() {
        let p = WeylString::from_factors(3, [(0, 1, 1), (1, 2, 0)])
            .unwrap()
            .with_coeff(C64::new(0.3, -1.2))
            .with_phase_exp(1);
        let lhs = p.dagger().to_matrix(2).unwrap();
        let rhs = p.to_matrix(2).unwrap().adjoint();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        let xd = x(4, 0, 1).dagger();
        assert_eq!(xd.exponents(0), (3, 0));
        assert_eq!(xd.phase_exp(), 0);
    }

    #[test]
    fn site_out_of_range() {
        let err = x(2, 3, 1).to_matrix(2).unwrap_err();
        assert_eq!(err, WeylError::SiteOutOfRange { site: 3, n_sites: 2 });
    }

    #[test]
    fn kron_of_x3_z3_matches_index_formula() {
        let p = WeylString::from_factors(3, [(0, 1, 0), (1, 0, 1)]).unwrap();
        let m = p.to_matrix(2).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        for i1 in 0..3 {
            for i2 in 0..3 {
                for j1 in 0..3 {
                    for j2 in 0..3 {
                        let xa = if i1 == (j1 + 1) % 3 { 1.0 } else { 0.0 };
                        let zb = if i2 == j2 { w.powu(j2 as u32) } else { C64::new(0.0, 0.0) };
                        let want = zb * xa;
                        assert!((m.get(3 * i1 + i2, 3 * j1 + j2) - want).norm() < 1e-12);
                    }
                }
            }
        }
        assert!(comm_norm(&m, &m).unwrap() < 1e-15);
    }

    #[test]
    fn two_sided_range() {
        assert_eq!(two_sided(3, 4), -1);
        assert_eq!(two_sided(2, 4), -2);
        assert_eq!(two_sided(1, 3), 1);
        assert_eq!(two_sided(2, 3), -1);
    }
}
