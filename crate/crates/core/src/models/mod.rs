//! The six worked models: Harper, Baxter chain, qudit Rabi, toric code,
//! cubic code and qudit honeycomb.
//!
//! Each model is first generated as a list of [`Monomial`]s (site, shift
//! power, clock power, in multiplication order). [`build`] turns these into
//! Weyl strings; [`direct_matrix`] multiplies explicit clock and shift
//! matrices instead, giving an independent route to the same operator.

mod geometry;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::expr::{BosonFactor, CvFactor, ExprError, HamiltonianExpr, Ladder, Quadrature, Term};
use crate::lattice::Lattice;
use crate::limits::{dv_to_cv, dv_to_rotor, LimitError};
use crate::spaces::{dv_clock, dv_fourier, dv_shift, FockOperators, PhaseSpace, RotorVariant, SpaceError, GOLDEN_PHI};
use crate::tensor::{
    comm_norm, eig_hermitian, eig_lowest, ground_degeneracy as count_degenerate, kron, kron_all, LinalgError,
    OperatorMatrix, DEFAULT_MAX_DIM, DENSE_MAX_DIM,
};
use crate::weyl::{CommutationPhase, WeylError, WeylString};

pub use geometry::StringId;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("unknown parameter '{key}' for model {model}")]
    UnknownParam { model: ModelKind, key: String },
    #[error("cannot parse value '{value}' for parameter '{key}'")]
    BadValue { key: String, value: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("model {model} is not available in the {space} space")]
    IncompatibleSpace { model: ModelKind, space: &'static str },
    #[error("string {id} is not defined for model {model}")]
    UndefinedString { model: ModelKind, id: StringId },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Harper,
    Baxter,
    Rabi,
    Toric,
    Cubic,
    Honeycomb,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Harper,
        ModelKind::Baxter,
        ModelKind::Rabi,
        ModelKind::Toric,
        ModelKind::Cubic,
        ModelKind::Honeycomb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Harper => "harper",
            ModelKind::Baxter => "baxter",
            ModelKind::Rabi => "rabi",
            ModelKind::Toric => "toric",
            ModelKind::Cubic => "cubic",
            ModelKind::Honeycomb => "honeycomb",
        }
    }

    /// Parameter keys accepted by [`ModelSpec::set`].
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            ModelKind::Harper => &["N", "M", "L"],
            ModelKind::Baxter => &["N", "M", "L", "K", "Omega", "g", "periodic"],
            ModelKind::Rabi => &["N", "M", "L", "omega", "Omega", "g", "cutoff"],
            ModelKind::Toric => &["N", "M", "L", "Lx", "Ly", "size", "Jx", "Jz"],
            ModelKind::Cubic => &["N", "M", "L", "size", "Jx", "Jz"],
            ModelKind::Honeycomb => &["N", "M", "L", "Lx", "Ly", "size", "J", "Jx", "Jy", "Jz"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

/// Target phase space for [`build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceChoice {
    Dv,
    Rotor {
        variant: RotorVariant,
        cutoff: usize,
        phi: f64,
    },
    Cv {
        cutoff: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: u32,
    pub m: i64,
    pub l: i64,
    /// Chain length (Baxter).
    pub k: usize,
    pub lx: usize,
    pub ly: usize,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub big_omega: f64,
    pub g: f64,
    pub omega: f64,
    pub boson_cutoff: usize,
    pub periodic: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 3,
            m: 1,
            l: 1,
            k: 4,
            lx: 2,
            ly: 2,
            jx: 1.0,
            jy: 1.0,
            jz: 1.0,
            big_omega: 1.0,
            g: 1.0,
            omega: 1.0,
            boson_cutoff: 30,
            periodic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub space: SpaceChoice,
}

impl ModelSpec {
    /// Model with its default parameters in the DV space.
    pub fn new(kind: ModelKind) -> Self {
        let mut params = ModelParams::default();
        match kind {
            ModelKind::Harper => params.n = 8,
            ModelKind::Baxter => {}
            ModelKind::Rabi => params.g = 0.2,
            ModelKind::Toric | ModelKind::Cubic => params.n = 2,
            ModelKind::Honeycomb => {}
        }
        Self {
            kind,
            params,
            space: SpaceChoice::Dv,
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> Result<Self, ModelError> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn in_space(mut self, space: SpaceChoice) -> Self {
        self.space = space;
        self
    }

    /// Sets one parameter from text. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ModelError> {
        if !self.kind.keys().contains(&key) {
            return Err(ModelError::UnknownParam {
                model: self.kind,
                key: key.to_string(),
            });
        }
        let bad = || ModelError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        let uint = || value.parse::<usize>().map_err(|_| bad());
        let int = || value.parse::<i64>().map_err(|_| bad());
        let real = || crate::dsl::parse_real(value).ok_or_else(bad);
        let p = &mut self.params;
        match key {
            "N" => p.n = value.parse::<u32>().map_err(|_| bad())?,
            "M" => p.m = int()?,
            "L" => p.l = int()?,
            "K" => p.k = uint()?,
            "Lx" => p.lx = uint()?,
            "Ly" => p.ly = uint()?,
            "size" => {
                p.lx = uint()?;
                p.ly = p.lx;
            }
            "J" => {
                p.jx = real()?;
                p.jy = p.jx;
                p.jz = p.jx;
            }
            "Jx" => p.jx = real()?,
            "Jy" => p.jy = real()?,
            "Jz" => p.jz = real()?,
            "Omega" => p.big_omega = real()?,
            "omega" => p.omega = real()?,
            "g" => p.g = real()?,
            "cutoff" => p.boson_cutoff = uint()?,
            "periodic" => p.periodic = value.parse::<bool>().map_err(|_| bad())?,
            _ => unreachable!("key list checked above"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let p = &self.params;
        let inv = |m: String| Err(ModelError::Invalid(m));
        if p.n < 2 {
            return inv(format!("N = {} must be at least 2", p.n));
        }
        let n = p.n as i64;
        for (name, v) in [("M", p.m), ("L", p.l)] {
            if v <= 0 || v >= n {
                return inv(format!("{name} = {v} must satisfy 0 < {name} < N = {n}"));
            }
        }
        let all = [p.jx, p.jy, p.jz, p.big_omega, p.g, p.omega];
        if all.iter().any(|x| !x.is_finite()) {
            return inv("couplings must be finite".into());
        }
        match self.kind {
            ModelKind::Baxter if p.k < 2 => inv(format!("K = {} must be at least 2", p.k)),
            ModelKind::Baxter if p.periodic && p.k < 3 => inv("a periodic chain needs K >= 3".into()),
            ModelKind::Toric | ModelKind::Honeycomb if p.lx < 2 || p.ly < 2 => {
                inv(format!("torus extents {}x{} must be at least 2", p.lx, p.ly))
            }
            ModelKind::Cubic if p.lx < 2 => inv(format!("cube size {} must be at least 2", p.lx)),
            ModelKind::Rabi if p.boson_cutoff == 0 => inv("boson cutoff must be positive".into()),
            _ => Ok(()),
        }
    }

    pub fn lattice(&self) -> Lattice {
        let p = &self.params;
        match self.kind {
            ModelKind::Harper | ModelKind::Rabi => Lattice::Free(1),
            ModelKind::Baxter if p.periodic => Lattice::Ring(p.k),
            ModelKind::Baxter => Lattice::Chain(p.k),
            ModelKind::Toric => Lattice::SquareTorus { lx: p.lx, ly: p.ly },
            ModelKind::Cubic => Lattice::CubicTorus { l: p.lx },
            ModelKind::Honeycomb => Lattice::HoneycombTorus { lx: p.lx, ly: p.ly },
        }
    }
}

/// One Hamiltonian term before it is committed to a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub hc: bool,
    /// `(site, a, b)` meaning `X^a Z^b` on `site`, multiplied left to right.
    pub factors: Vec<(usize, i64, i64)>,
    pub bosons: Vec<Ladder>,
}

impl Monomial {
    fn new(coeff: f64, hc: bool, factors: Vec<(usize, i64, i64)>) -> Self {
        Self {
            coeff: C64::new(coeff, 0.0),
            hc,
            factors,
            bosons: Vec::new(),
        }
    }

    fn with_bosons(mut self, b: Vec<Ladder>) -> Self {
        self.bosons = b;
        self
    }

    pub fn weyl(&self, n: u32) -> Result<WeylString, WeylError> {
        WeylString::from_factors(n, self.factors.iter().copied())
    }
}

/// The model's terms in its native DV form.
pub fn monomials(spec: &ModelSpec) -> Result<Vec<Monomial>, ModelError> {
    spec.validate()?;
    let p = &spec.params;
    let (m, l) = (p.m, p.l);
    let lat = spec.lattice();
    let mut out = Vec::new();
    match spec.kind {
        ModelKind::Harper => {
            out.push(Monomial::new(-0.5, true, vec![(0, 0, m)]));
            out.push(Monomial::new(-0.5, true, vec![(0, l, 0)]));
        }
        ModelKind::Baxter => {
            for k in 0..p.k {
                out.push(Monomial::new(-p.big_omega / 2.0, true, vec![(k, 0, m)]));
            }
            let bonds = if p.periodic { p.k } else { p.k - 1 };
            for k in 0..bonds {
                let next = (k + 1) % p.k;
                out.push(Monomial::new(-p.g / 2.0, true, vec![(k, l, 0), (next, -l, 0)]));
            }
        }
        ModelKind::Rabi => {
            out.push(Monomial::new(p.omega, false, vec![]).with_bosons(vec![Ladder::Raise, Ladder::Lower]));
            out.push(Monomial::new(p.omega / 2.0, false, vec![]));
            out.push(Monomial::new(-p.big_omega / 2.0, true, vec![(0, 0, m)]));
            out.push(Monomial::new(p.g, true, vec![(0, l, 0)]).with_bosons(vec![Ladder::Lower]));
        }
        ModelKind::Toric => {
            for j in 0..p.ly as i64 {
                for i in 0..p.lx as i64 {
                    let f = geometry::toric_plaquette(&lat, i, j, m);
                    out.push(Monomial::new(-p.jz / 2.0, true, f));
                }
            }
            for j in 0..p.ly as i64 {
                for i in 0..p.lx as i64 {
                    let f = geometry::toric_star(&lat, i, j, l);
                    out.push(Monomial::new(-p.jx / 2.0, true, f));
                }
            }
        }
        ModelKind::Cubic => {
            let s = p.lx as i64;
            for z in 0..s {
                for y in 0..s {
                    for x in 0..s {
                        out.push(Monomial::new(-p.jz / 2.0, true, geometry::cube_a(&lat, x, y, z, m)));
                        out.push(Monomial::new(-p.jx / 2.0, true, geometry::cube_b(&lat, x, y, z, l)));
                    }
                }
            }
        }
        ModelKind::Honeycomb => {
            for j in 0..p.ly as i64 {
                for i in 0..p.lx as i64 {
                    let [bx, by, bz] = geometry::honeycomb_bonds(&lat, i, j, m, l);
                    out.push(Monomial::new(-p.jx / 2.0, true, bx));
                    out.push(Monomial::new(-p.jy / 2.0, true, by));
                    out.push(Monomial::new(-p.jz / 2.0, true, bz));
                }
            }
        }
    }
    Ok(out)
}

fn dv_expr(spec: &ModelSpec) -> Result<HamiltonianExpr, ModelError> {
    let n = spec.params.n;
    let mut e = HamiltonianExpr::new(PhaseSpace::dv(n)?, spec.lattice());
    if spec.kind == ModelKind::Rabi {
        e = e.with_boson(spec.params.boson_cutoff);
    }
    for mono in monomials(spec)? {
        let bosons = mono
            .bosons
            .iter()
            .map(|&op| BosonFactor { mode: 0, op })
            .collect();
        e.push(Term::weyl(mono.coeff, mono.hc, mono.weyl(n)?).with_bosons(bosons));
    }
    Ok(e)
}

/// Two-mode CV Rabi Hamiltonian; see [`crate::limits::rabi_cv_limit`].
fn rabi_cv_expr(spec: &ModelSpec, cutoff: usize) -> Result<HamiltonianExpr, ModelError> {
    let p = &spec.params;
    let mut e = HamiltonianExpr::new(PhaseSpace::cv(cutoff)?, Lattice::Free(1)).with_boson(p.boson_cutoff);
    let re = |x: f64| C64::new(x, 0.0);
    let xq = |power| CvFactor {
        site: 0,
        quad: Quadrature::X,
        power,
    };
    let pq = CvFactor {
        site: 0,
        quad: Quadrature::P,
        power: 2,
    };
    let (b, bd) = (BosonFactor::lower(0), BosonFactor::raise(0));
    e.push(Term::cv(re(p.omega), false, vec![]).with_bosons(vec![bd, b]));
    e.push(Term::cv(re(p.omega / 2.0 - p.big_omega), false, vec![]));
    e.push(Term::cv(re(2.0 * PI * PI * p.big_omega), false, vec![pq]));
    // sqrt2 g 2 pi x q with q = i (b^dag - b) / sqrt2
    e.push(Term::cv(C64::new(0.0, 2.0 * PI * p.g), true, vec![xq(1)]).with_bosons(vec![bd]));
    // sqrt2 g y (1 - 2 pi^2 x^2) with y = (b + b^dag) / sqrt2
    e.push(Term::cv(re(p.g), true, vec![]).with_bosons(vec![b]));
    e.push(Term::cv(re(-2.0 * PI * PI * p.g), true, vec![xq(2)]).with_bosons(vec![b]));
    Ok(e)
}

/// The model as a symbolic expression in the requested space.
pub fn build(spec: &ModelSpec) -> Result<HamiltonianExpr, ModelError> {
    let dv = dv_expr(spec)?;
    match spec.space {
        SpaceChoice::Dv => Ok(dv),
        SpaceChoice::Rotor { variant, cutoff, phi } => Ok(dv_to_rotor(&dv, variant, phi, cutoff)?),
        SpaceChoice::Cv { cutoff } => {
            if spec.kind == ModelKind::Rabi {
                return rabi_cv_expr(spec, cutoff);
            }
            let (q, _) = dv_to_cv(&dv)?;
            Ok(q.to_expr(dv.n_sites(), cutoff)?)
        }
    }
}

/// Default rotor space used when a model is asked for without parameters.
pub fn default_rotor(variant: RotorVariant) -> SpaceChoice {
    SpaceChoice::Rotor {
        variant,
        cutoff: 20,
        phi: GOLDEN_PHI,
    }
}

fn local(n: u32, a: i64, b: i64) -> Result<OperatorMatrix, ModelError> {
    let pow = |m: &OperatorMatrix, e: i64| -> Result<OperatorMatrix, ModelError> {
        let e = e.rem_euclid(n as i64);
        let mut out = OperatorMatrix::identity(n as usize);
        for _ in 0..e {
            out = out.matmul(m)?;
        }
        Ok(out)
    };
    let m = pow(&dv_shift(n)?, a)?.matmul(&pow(&dv_clock(n)?, b)?)?;
    Ok(OperatorMatrix::from_sparse(m.to_sparse()))
}

/// DV matrix assembled from explicit clock and shift matrices, bypassing
/// the Weyl-string arithmetic used by [`build`].
pub fn direct_matrix(spec: &ModelSpec) -> Result<OperatorMatrix, ModelError> {
    let n = spec.params.n;
    let n_sites = spec.lattice().n_sites();
    let boson = (spec.kind == ModelKind::Rabi).then(|| FockOperators::new(spec.params.boson_cutoff));
    let boson = boson.transpose()?;
    let mut total: Option<OperatorMatrix> = None;
    for mono in monomials(spec)? {
        let mut per_site: Vec<OperatorMatrix> = vec![OperatorMatrix::identity(n as usize); n_sites];
        for &(site, a, b) in &mono.factors {
            per_site[site] = per_site[site].matmul(&local(n, a, b)?)?;
        }
        if let Some(ops) = &boson {
            let mut bm = OperatorMatrix::identity(ops.dim());
            for op in &mono.bosons {
                bm = bm.matmul(&match op {
                    Ladder::Lower => ops.a(),
                    Ladder::Raise => ops.a_dag(),
                })?;
            }
            per_site.push(bm);
        }
        let mut t = kron_all(per_site.iter(), DEFAULT_MAX_DIM)?.scale(mono.coeff);
        if mono.hc {
            t = t.add(&t.adjoint())?;
        }
        total = Some(match total {
            None => t,
            Some(acc) => acc.add(&t)?,
        });
    }
    Ok(total.expect("every model has terms"))
}

/// A conserved quantity.
#[derive(Debug, Clone)]
pub enum SymmetryOp {
    Weyl(WeylString),
    Unitary(OperatorMatrix),
    /// `psi -> unitary * conj(psi)`, conjugation taken in the computational
    /// basis.
    Antiunitary { unitary: OperatorMatrix, recipe: String },
}

#[derive(Debug, Clone)]
pub struct Symmetry {
    pub name: String,
    pub op: SymmetryOp,
}

impl Symmetry {
    fn weyl(name: impl Into<String>, w: WeylString) -> Self {
        Self {
            name: name.into(),
            op: SymmetryOp::Weyl(w),
        }
    }

    /// Zero when the operator is conserved. Weyl strings are checked term by
    /// term with integer arithmetic and return the number of offending
    /// terms; matrices return a max-abs commutator entry.
    pub fn residual(&self, spec: &ModelSpec) -> Result<f64, ModelError> {
        match &self.op {
            SymmetryOp::Weyl(w) => {
                let n = spec.params.n;
                let mut bad = 0;
                for mono in monomials(spec)? {
                    if !mono.weyl(n)?.commutes_with(w)? {
                        bad += 1;
                    }
                }
                Ok(bad as f64)
            }
            SymmetryOp::Unitary(u) => Ok(comm_norm(&build(spec)?.realize()?, u)?),
            SymmetryOp::Antiunitary { unitary, .. } => {
                let h = build(spec)?.realize()?;
                let conj = OperatorMatrix::from_dense(h.to_dense().map(|z| z.conj()));
                let image = unitary.matmul(&conj)?.matmul(&unitary.adjoint())?;
                Ok(image.max_abs_diff(&h)?)
            }
        }
    }
}

/// Conserved quantities of the DV model.
pub fn symmetries(spec: &ModelSpec) -> Result<Vec<Symmetry>, ModelError> {
    spec.validate()?;
    let p = &spec.params;
    let n = p.n;
    let lat = spec.lattice();
    let mut out = Vec::new();
    match spec.kind {
        ModelKind::Harper => {
            let f2 = dv_fourier(n)?.matmul(&dv_fourier(n)?)?;
            out.push(Symmetry {
                name: "parity".into(),
                op: SymmetryOp::Unitary(f2),
            });
        }
        ModelKind::Baxter => {
            let w = WeylString::from_factors(n, (0..p.k).map(|k| (k, 0, 1)))?;
            out.push(Symmetry::weyl("Z^K", w));
        }
        ModelKind::Rabi => {
            let (v, u) = rabi_symmetries(spec)?;
            out.push(Symmetry {
                name: "V".into(),
                op: SymmetryOp::Unitary(v),
            });
            out.push(Symmetry {
                name: "U".into(),
                op: SymmetryOp::Antiunitary {
                    unitary: u,
                    recipe: "F^2 on the qudit after complex conjugation in the X eigenbasis".into(),
                },
            });
        }
        ModelKind::Toric => {
            for id in geometry::toric_string_ids(p.lx, p.ly) {
                out.push(Symmetry::weyl(id.to_string(), geometry::string(&lat, id, n, p.m, p.l)?));
            }
        }
        ModelKind::Cubic => {
            let a = WeylString::from_factors(n, geometry::cube_a(&lat, 0, 0, 0, p.m))?;
            let b = WeylString::from_factors(n, geometry::cube_b(&lat, 0, 0, 0, p.l))?;
            out.push(Symmetry::weyl("A(0,0,0)", a));
            out.push(Symmetry::weyl("B(0,0,0)", b));
        }
        ModelKind::Honeycomb => {
            for j in 0..p.ly as i64 {
                for i in 0..p.lx as i64 {
                    let w = WeylString::from_factors(n, geometry::honeycomb_plaquette(&lat, i, j, p.m, p.l))?;
                    out.push(Symmetry::weyl(format!("W({i},{j})"), w));
                }
            }
            for id in geometry::honeycomb_string_ids(p.lx, p.ly) {
                out.push(Symmetry::weyl(id.to_string(), geometry::string(&lat, id, n, p.m, p.l)?));
            }
        }
    }
    Ok(out)
}

/// `V = e^{2 pi i L b^dag b / N} Z` and the unitary part of the antiunitary
/// `U = F^2 K_x`, where `K_x` conjugates in the eigenbasis of `X`.
pub fn rabi_symmetries(spec: &ModelSpec) -> Result<(OperatorMatrix, OperatorMatrix), ModelError> {
    let p = &spec.params;
    let n = p.n;
    let ops = FockOperators::new(p.boson_cutoff)?;
    let phases: Vec<C64> = (0..ops.dim())
        .map(|k| C64::from_polar(1.0, 2.0 * PI * (p.l * k as i64) as f64 / n as f64))
        .collect();
    let v = kron(&dv_clock(n)?, &OperatorMatrix::diagonal(&phases))?;
    // K_x psi = F conj(F^dag psi) = F F^T conj(psi); with F symmetric this is F^2 conj(psi).
    let f = dv_fourier(n)?;
    let ft = OperatorMatrix::from_dense(f.to_dense().transpose());
    let f2 = f.matmul(&f)?;
    let u_qudit = f2.matmul(&f)?.matmul(&ft)?;
    let u = kron(&u_qudit, &OperatorMatrix::identity(ops.dim()))?;
    Ok((v, u))
}

/// Ground-state multiplicity. Dense when the dimension allows; otherwise the
/// `sparse_k` lowest eigenvalues are computed by Lanczos, and a capacity
/// error is returned when no `sparse_k` is given.
pub fn ground_degeneracy(spec: &ModelSpec, sparse_k: Option<usize>) -> Result<usize, ModelError> {
    let h = build(spec)?.realize()?;
    if h.dim() <= DENSE_MAX_DIM {
        let ev = eig_hermitian(&h)?.eigenvalues;
        let width = ev.last().unwrap() - ev[0];
        return Ok(count_degenerate(&ev, width, false)?);
    }
    let Some(k) = sparse_k else {
        return Err(LinalgError::Capacity {
            requested: h.dim(),
            max: DENSE_MAX_DIM,
        }
        .into());
    };
    let ev = eig_lowest(&h, k, 0x5eed)?.eigenvalues;
    // full width is not available; 2 x Gershgorin radius bounds it
    let width = 2.0 * h.gershgorin_radius();
    Ok(count_degenerate(&ev, width, true)?)
}

/// Commutation phase between two named strings, `s1 s2 = w^e s2 s1`.
pub fn string_phase(spec: &ModelSpec, s1: StringId, s2: StringId) -> Result<CommutationPhase, ModelError> {
    spec.validate()?;
    let p = &spec.params;
    let lat = spec.lattice();
    let ok = |id: StringId| match spec.kind {
        ModelKind::Toric => geometry::toric_string_ids(p.lx, p.ly).contains(&id),
        ModelKind::Honeycomb => geometry::honeycomb_string_ids(p.lx, p.ly).contains(&id),
        _ => false,
    };
    for id in [s1, s2] {
        if !ok(id) {
            return Err(ModelError::UndefinedString { model: spec.kind, id });
        }
    }
    let a = geometry::string(&lat, s1, p.n, p.m, p.l)?;
    let b = geometry::string(&lat, s2, p.n, p.m, p.l)?;
    Ok(a.commutation_exponent(&b)?)
}

/// Weyl string of a named string operator.
pub fn string_operator(spec: &ModelSpec, id: StringId) -> Result<WeylString, ModelError> {
    let p = &spec.params;
    Ok(geometry::string(&spec.lattice(), id, p.n, p.m, p.l)?)
}

pub use geometry::{cube_a, cube_b, honeycomb_bonds, honeycomb_plaquette, toric_plaquette, toric_star};
