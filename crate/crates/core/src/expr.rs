//! Symbolic Hamiltonians: a phase space, a lattice and a list of terms.
//!
//! A term is `coeff * core * bosons`, plus its adjoint when `hc` is set.
//! The core is a Weyl string on DV spaces, an ordered product of ladder
//! factors on rotor spaces, or a product of quadratures on CV spaces. Boson
//! factors act on a single truncated oscillator that sits after all sites in
//! the tensor product.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::lattice::Lattice;
use crate::spaces::{FockOperators, PhaseSpace, RotorOperators, SpaceError};
use crate::tensor::{kron_all, LinalgError, OperatorMatrix, DEFAULT_MAX_DIM, HERMITIAN_TOL};
use crate::weyl::{WeylError, WeylString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("term {term}: site {site} is out of range for {n_sites} sites")]
    SiteOutOfRange {
        term: usize,
        site: usize,
        n_sites: usize,
    },
    #[error("term {term}: boson mode {mode} is not declared")]
    UndeclaredBoson { term: usize, mode: usize },
    #[error("term {term}: a {core} factor cannot live in a {space} space")]
    SpaceMismatch {
        term: usize,
        core: &'static str,
        space: &'static str,
    },
    #[error("term {term}: {message}")]
    InvalidFactor { term: usize, message: String },
    #[error("realized matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Lower,
    Raise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BosonFactor {
    pub mode: usize,
    pub op: Ladder,
}

impl BosonFactor {
    pub fn lower(mode: usize) -> Self {
        Self {
            mode,
            op: Ladder::Lower,
        }
    }

    pub fn raise(mode: usize) -> Self {
        Self {
            mode,
            op: Ladder::Raise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotorFactor {
    /// `e^{i k theta}`, a ladder hop by `k`.
    Hop { site: usize, k: i64 },
    /// `e^{2 pi i phi j n}`.
    Phase { site: usize, j: i64 },
    /// `cos(gamma n)`.
    CosN { site: usize, gamma: f64 },
}

impl RotorFactor {
    pub fn site(&self) -> usize {
        match *self {
            RotorFactor::Hop { site, .. }
            | RotorFactor::Phase { site, .. }
            | RotorFactor::CosN { site, .. } => site,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CvFactor {
    pub site: usize,
    pub quad: Quadrature,
    pub power: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Core {
    Weyl(WeylString),
    Rotor(Vec<RotorFactor>),
    Cv(Vec<CvFactor>),
}

impl Core {
    fn name(&self) -> &'static str {
        match self {
            Core::Weyl(_) => "dv",
            Core::Rotor(_) => "rotor",
            Core::Cv(_) => "cv",
        }
    }

    fn sites(&self) -> Vec<usize> {
        match self {
            Core::Weyl(w) => w.support(),
            Core::Rotor(fs) => fs.iter().map(RotorFactor::site).collect(),
            Core::Cv(fs) => fs.iter().map(|f| f.site).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Core::Weyl(w) => w.is_identity() && w.phase_exp() == 0,
            Core::Rotor(fs) => fs.is_empty(),
            Core::Cv(fs) => fs.is_empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub hc: bool,
    pub core: Core,
    pub bosons: Vec<BosonFactor>,
}

impl Term {
    /// DV term; the string's own coefficient is folded into `coeff`.
    pub fn weyl(coeff: C64, hc: bool, w: WeylString) -> Self {
        let c = coeff * w.coeff();
        Self {
            coeff: c,
            hc,
            core: Core::Weyl(w.with_coeff(C64::new(1.0, 0.0))),
            bosons: Vec::new(),
        }
    }

    /// Rotor term; factors are stably sorted by site.
    pub fn rotor(coeff: C64, hc: bool, mut factors: Vec<RotorFactor>) -> Self {
        factors.sort_by_key(RotorFactor::site);
        Self {
            coeff,
            hc,
            core: Core::Rotor(factors),
            bosons: Vec::new(),
        }
    }

    /// CV term; factors are stably sorted by site.
    pub fn cv(coeff: C64, hc: bool, mut factors: Vec<CvFactor>) -> Self {
        factors.sort_by_key(|f| f.site);
        Self {
            coeff,
            hc,
            core: Core::Cv(factors),
            bosons: Vec::new(),
        }
    }

    pub fn with_bosons(mut self, bosons: Vec<BosonFactor>) -> Self {
        self.bosons = bosons;
        self
    }

    pub fn weyl_core(&self) -> Option<&WeylString> {
        match &self.core {
            Core::Weyl(w) => Some(w),
            _ => None,
        }
    }

    /// The core with the coefficient attached, for DV terms.
    pub fn weyl_with_coeff(&self) -> Option<WeylString> {
        self.weyl_core().map(|w| w.clone().with_coeff(self.coeff))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianExpr {
    pub space: PhaseSpace,
    pub lattice: Lattice,
    pub boson_cutoff: Option<usize>,
    pub terms: Vec<Term>,
}

impl HamiltonianExpr {
    pub fn new(space: PhaseSpace, lattice: Lattice) -> Self {
        Self {
            space,
            lattice,
            boson_cutoff: None,
            terms: Vec::new(),
        }
    }

    pub fn with_boson(mut self, cutoff: usize) -> Self {
        self.boson_cutoff = Some(cutoff);
        self
    }

    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn has_bosons(&self) -> bool {
        self.terms.iter().any(|t| !t.bosons.is_empty())
    }

    /// Total Hilbert-space dimension, or a capacity error past `max_dim`.
    pub fn dimension(&self, max_dim: usize) -> Result<usize, LinalgError> {
        let site = self.space.site_dim();
        let mut dim: usize = 1;
        let over = || LinalgError::Capacity {
            requested: usize::MAX,
            max: max_dim,
        };
        for _ in 0..self.n_sites() {
            dim = dim.checked_mul(site).ok_or_else(over)?;
            if dim > max_dim {
                return Err(LinalgError::Capacity {
                    requested: estimate(site, self.n_sites(), self.boson_cutoff),
                    max: max_dim,
                });
            }
        }
        if let Some(c) = self.boson_cutoff {
            dim = dim.checked_mul(c + 1).ok_or_else(over)?;
        }
        if dim > max_dim {
            return Err(LinalgError::Capacity {
                requested: dim,
                max: max_dim,
            });
        }
        Ok(dim)
    }

    /// Checks indices, boson declarations and that every core matches the space.
    pub fn validate(&self) -> Result<(), ExprError> {
        let n_sites = self.n_sites();
        for (i, t) in self.terms.iter().enumerate() {
            let ok = matches!(
                (&t.core, &self.space),
                (Core::Weyl(_), PhaseSpace::Dv { .. })
                    | (Core::Rotor(_), PhaseSpace::Rotor { .. })
                    | (Core::Cv(_), PhaseSpace::Cv { .. })
            );
            if !ok {
                return Err(ExprError::SpaceMismatch {
                    term: i,
                    core: t.core.name(),
                    space: self.space.kind_name(),
                });
            }
            if let (Core::Weyl(w), PhaseSpace::Dv { n }) = (&t.core, &self.space) {
                if w.n_level() != *n {
                    return Err(ExprError::Weyl(WeylError::NLevelMismatch {
                        left: w.n_level(),
                        right: *n,
                    }));
                }
            }
            if let Some(&site) = t.core.sites().iter().find(|&&s| s >= n_sites) {
                return Err(ExprError::SiteOutOfRange {
                    term: i,
                    site,
                    n_sites,
                });
            }
            if let Core::Cv(fs) = &t.core {
                if let Some(f) = fs.iter().find(|f| f.power == 0 || f.power > 2) {
                    return Err(ExprError::InvalidFactor {
                        term: i,
                        message: format!("quadrature power {} is outside 1..=2", f.power),
                    });
                }
            }
            if let Core::Rotor(fs) = &t.core {
                if let PhaseSpace::Rotor { cutoff, .. } = self.space {
                    for f in fs {
                        if let RotorFactor::Hop { k, .. } = f {
                            if k.unsigned_abs() as usize > 2 * cutoff {
                                return Err(SpaceError::HopTooLong { k: *k, cutoff }.into());
                            }
                        }
                    }
                }
            }
            for b in &t.bosons {
                if b.mode != 0 || self.boson_cutoff.is_none() {
                    return Err(ExprError::UndeclaredBoson {
                        term: i,
                        mode: b.mode,
                    });
                }
            }
        }
        Ok(())
    }

    /// Matrix of one term without its adjoint partner.
    pub fn term_matrix(&self, idx: usize, max_dim: usize) -> Result<OperatorMatrix, ExprError> {
        let t = &self.terms[idx];
        let n_sites = self.n_sites();
        let core = match (&t.core, &self.space) {
            (Core::Weyl(w), _) => w.to_matrix_capped(n_sites, max_dim)?,
            (Core::Rotor(fs), PhaseSpace::Rotor { cutoff, phi, .. }) => {
                let ops = RotorOperators::new(*cutoff, *phi)?;
                let mut per_site: BTreeMap<usize, OperatorMatrix> = BTreeMap::new();
                for f in fs {
                    let m = match *f {
                        RotorFactor::Hop { k, .. } => ops.hop(k)?,
                        RotorFactor::Phase { j, .. } => ops.phase(j),
                        RotorFactor::CosN { gamma, .. } => ops.cos_number(gamma),
                    };
                    multiply_into(&mut per_site, f.site(), m)?;
                }
                site_product(n_sites, ops.dim(), per_site, max_dim)?
            }
            (Core::Cv(fs), PhaseSpace::Cv { cutoff }) => {
                let ops = FockOperators::new(*cutoff)?;
                let mut per_site: BTreeMap<usize, OperatorMatrix> = BTreeMap::new();
                for f in fs {
                    let q = match f.quad {
                        Quadrature::X => ops.x(),
                        Quadrature::P => ops.p(),
                    };
                    for _ in 0..f.power {
                        multiply_into(&mut per_site, f.site, q.clone())?;
                    }
                }
                site_product(n_sites, ops.dim(), per_site, max_dim)?
            }
            _ => {
                self.validate()?;
                unreachable!("validate rejects mismatched cores")
            }
        };
        let full = match self.boson_cutoff {
            None => core,
            Some(c) => {
                let ops = FockOperators::new(c)?;
                let mut b = OperatorMatrix::identity(ops.dim());
                for f in &t.bosons {
                    let m = match f.op {
                        Ladder::Lower => ops.a(),
                        Ladder::Raise => ops.a_dag(),
                    };
                    b = b.matmul(&m)?;
                }
                kron_all([&core, &b], max_dim)?
            }
        };
        Ok(full.scale(t.coeff))
    }

    pub fn realize(&self) -> Result<OperatorMatrix, ExprError> {
        self.realize_capped(DEFAULT_MAX_DIM)
    }

    /// Sum of all terms and requested adjoints. When every term either
    /// carries `hc` or is self-adjoint on its own, the result is checked and
    /// flagged Hermitian.
    pub fn realize_capped(&self, max_dim: usize) -> Result<OperatorMatrix, ExprError> {
        self.validate()?;
        let dim = self.dimension(max_dim)?;
        let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
        let mut promised = true;
        for (i, t) in self.terms.iter().enumerate() {
            let m = self.term_matrix(i, max_dim)?.to_sparse();
            if t.hc {
                triplets.extend(m.triplets().map(|(r, c, v)| (c, r, v.conj())));
            } else {
                let scale = m.max_abs().max(1.0);
                let dev = OperatorMatrix::from_sparse(m.clone()).hermitian_deviation();
                promised &= dev <= HERMITIAN_TOL * scale;
            }
            triplets.extend(m.triplets());
        }
        let total = OperatorMatrix::from_triplets(dim, triplets)?;
        if promised {
            let dev = total.hermitian_deviation();
            if dev > HERMITIAN_TOL * total.max_abs().max(1.0) {
                return Err(ExprError::NotHermitian { deviation: dev });
            }
            return Ok(total.checked_hermitian()?);
        }
        Ok(total)
    }
}

fn estimate(site: usize, n: usize, boson: Option<usize>) -> usize {
    let d = (site as f64).powi(n as i32) * boson.map_or(1.0, |c| (c + 1) as f64);
    if d >= usize::MAX as f64 {
        usize::MAX
    } else {
        d as usize
    }
}

fn multiply_into(
    per_site: &mut BTreeMap<usize, OperatorMatrix>,
    site: usize,
    m: OperatorMatrix,
) -> Result<(), LinalgError> {
    let next = match per_site.remove(&site) {
        Some(prev) => prev.matmul(&m)?,
        None => m,
    };
    per_site.insert(site, next);
    Ok(())
}

fn site_product(
    n_sites: usize,
    site_dim: usize,
    per_site: BTreeMap<usize, OperatorMatrix>,
    max_dim: usize,
) -> Result<OperatorMatrix, LinalgError> {
    let id = OperatorMatrix::identity(site_dim);
    let factors: Vec<&OperatorMatrix> = (0..n_sites)
        .map(|s| per_site.get(&s).unwrap_or(&id))
        .collect();
    kron_all(factors, max_dim)
}
