//! Rewrites between phase spaces.
//!
//! Every Hermitian pair `c (W + W^dagger)` is read as `c e^{i theta} + c.c.`
//! with `theta = 2 pi sum_v r_v v / u`, where `v` runs over the continuum
//! variables, `r_v` are the integer exponents attached to them and `u` is the
//! gcd of all nonzero exponents in the expression. A shift power `a` on site
//! `j` contributes `r_{x_j} = -a`; a clock power `b` contributes `r_{p_j} = b`.
//! The pair is expanded to second order about the origin and the whole
//! Hamiltonian is divided by `(2 pi)^2`. Reordering phases of a string are
//! dropped: strings are treated as symmetric Weyl operators, so
//! `c e^{i theta}` is taken literally.
//!
//! The DV and rotor paths both reduce their input to the same list of
//! [`PhasePair`]s and share [`expand_pairs`], so the two routes to the
//! continuum agree bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::dsl::serialize;
use crate::expr::{Core, CvFactor, ExprError, HamiltonianExpr, Quadrature, RotorFactor, Term};
use crate::lattice::Lattice;
use crate::spaces::{FockOperators, PhaseSpace, RotorVariant, SpaceError};
use crate::tensor::{kron, LinalgError, OperatorMatrix};
use crate::weyl::two_sided;

/// Scale divided out of every continuum limit.
pub const LIMIT_SCALE: f64 = 4.0 * PI * PI;

/// Largest allowed `|phi - 2 pi / length_scale|` for the rotor limit.
pub const PHI_SCALE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("expected a {expected} expression, got {found}")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },
    #[error("term {0} carries boson factors; use the dedicated Rabi limit")]
    BosonTerm(usize),
    #[error("term {0} is neither marked hc nor self-adjoint")]
    NonHermitianTerm(usize),
    #[error("term {0} has a factor with no continuum image ({1})")]
    Unsupported(usize, String),
    #[error("phi = {phi} does not match 2 pi / L = {expected} for length scale L = {length_scale}")]
    PhiScaleMismatch {
        phi: f64,
        expected: f64,
        length_scale: f64,
    },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A continuum variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(usize),
    P(usize),
}

impl Var {
    pub fn mode(&self) -> usize {
        match *self {
            Var::X(j) | Var::P(j) => j,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(j) => write!(f, "x{j}"),
            Var::P(j) => write!(f, "p{j}"),
        }
    }
}

/// `constant + sum_v l_v v + sum_{u,v} B_uv (uv + vu)/2` with `B` symmetric.
/// Only the upper triangle (`u <= v`) is stored; exact zeros are dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadraticForm {
    pub constant: f64,
    linear: BTreeMap<Var, f64>,
    bilinear: BTreeMap<(Var, Var), f64>,
}

impl QuadraticForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, v: Var, c: f64) {
        let e = self.linear.entry(v).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.linear.remove(&v);
        }
    }

    /// Adds `c` to the matrix entries `B_uv` and `B_vu`.
    pub fn add_bilinear(&mut self, u: Var, v: Var, c: f64) {
        let key = if u <= v { (u, v) } else { (v, u) };
        let e = self.bilinear.entry(key).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.bilinear.remove(&key);
        }
    }

    pub fn linear(&self, v: Var) -> f64 {
        self.linear.get(&v).copied().unwrap_or(0.0)
    }

    /// Matrix entry `B_uv`.
    pub fn bilinear(&self, u: Var, v: Var) -> f64 {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.bilinear.get(&key).copied().unwrap_or(0.0)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (Var, f64)> + '_ {
        self.linear.iter().map(|(&v, &c)| (v, c))
    }

    pub fn bilinear_terms(&self) -> impl Iterator<Item = (Var, Var, f64)> + '_ {
        self.bilinear.iter().map(|(&(u, v), &c)| (u, v, c))
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.linear
            .keys()
            .copied()
            .chain(self.bilinear.keys().flat_map(|&(u, v)| [u, v]))
            .collect()
    }

    pub fn n_modes(&self) -> usize {
        self.variables().iter().map(|v| v.mode() + 1).max().unwrap_or(0)
    }

    /// Sum of `B_uv` over `v` restricted to position variables.
    pub fn x_row_sum(&self, u: Var) -> f64 {
        (0..self.n_modes()).map(|j| self.bilinear(u, Var::X(j))).sum()
    }

    /// CV expression on `n_modes` modes with per-mode Fock cutoff.
    pub fn to_expr(&self, n_modes: usize, cutoff: usize) -> Result<HamiltonianExpr, LimitError> {
        let space = PhaseSpace::cv(cutoff)?;
        let mut e = HamiltonianExpr::new(space, Lattice::Free(n_modes.max(self.n_modes())));
        let re = |x: f64| C64::new(x, 0.0);
        if self.constant != 0.0 {
            e.push(Term::cv(re(self.constant), false, vec![]));
        }
        let fac = |v: Var, power: u8| match v {
            Var::X(site) => CvFactor {
                site,
                quad: Quadrature::X,
                power,
            },
            Var::P(site) => CvFactor {
                site,
                quad: Quadrature::P,
                power,
            },
        };
        for (v, c) in self.linear_terms() {
            e.push(Term::cv(re(c), false, vec![fac(v, 1)]));
        }
        for (u, v, c) in self.bilinear_terms() {
            if u == v {
                e.push(Term::cv(re(c), false, vec![fac(u, 2)]));
            } else if u.mode() != v.mode() {
                e.push(Term::cv(re(2.0 * c), false, vec![fac(u, 1), fac(v, 1)]));
            } else {
                // 2c (uv + vu)/2 = c uv + h.c.
                e.push(Term::cv(re(c), true, vec![fac(u, 1), fac(v, 1)]));
            }
        }
        Ok(e)
    }

    pub fn to_matrix(&self, n_modes: usize, cutoff: usize) -> Result<OperatorMatrix, LimitError> {
        Ok(self.to_expr(n_modes, cutoff)?.realize()?)
    }

    /// JSON text with keys in a fixed order; bilinear keys are `"u,v"` with
    /// `u <= v` and values are matrix entries `B_uv`.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        write!(s, "{{\n  \"constant\": {},\n  \"linear\": {{", num(self.constant)).unwrap();
        let lin: Vec<String> = self
            .linear_terms()
            .map(|(v, c)| format!("\"{v}\": {}", num(c)))
            .collect();
        s.push_str(&lin.join(", "));
        s.push_str("},\n  \"bilinear\": {");
        let bil: Vec<String> = self
            .bilinear_terms()
            .map(|(u, v, c)| format!("\"{u},{v}\": {}", num(c)))
            .collect();
        s.push_str(&bil.join(", "));
        s.push_str("}\n}\n");
        s
    }
}

fn num(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (v, c) in self.linear_terms() {
            write!(f, " + {c}*{v}")?;
        }
        for (u, v, c) in self.bilinear_terms() {
            if u == v {
                write!(f, " + {c}*{u}^2")?;
            } else {
                write!(f, " + {}*sym({u}{v})", 2.0 * c)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    DvToCv,
    DvToRotor(RotorVariant),
    RotorToCv,
    RabiCv,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::DvToCv => f.write_str("dv->cv"),
            LimitKind::DvToRotor(v) => write!(f, "dv->rotor{}", v.index()),
            LimitKind::RotorToCv => f.write_str("rotor->cv"),
            LimitKind::RabiCv => f.write_str("rabi dv->cv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    pub from: String,
    pub to: String,
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub input_hash: u64,
    pub kind: LimitKind,
    /// Global factor divided out of the result.
    pub scale: f64,
    /// Gcd of the exponents, the unit in which they were read.
    pub unit: i64,
    /// Bound on the magnitude of the first dropped order, after scaling.
    pub dropped_order_bound: f64,
    pub substitutions: Vec<Substitution>,
    pub notes: Vec<String>,
}

impl fmt::Display for LimitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.kind)?;
        writeln!(f, "input hash: {:016x}", self.input_hash)?;
        writeln!(f, "scale: {}", self.scale)?;
        writeln!(f, "unit: {}", self.unit)?;
        writeln!(f, "dropped-order bound: {}", self.dropped_order_bound)?;
        for s in &self.substitutions {
            writeln!(f, "substitution: {} -> {} [{}]", s.from, s.to, s.source)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// 64-bit FNV-1a of the serialized expression.
pub fn expr_hash(expr: &HamiltonianExpr) -> u64 {
    serialize(expr).bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `coeff e^{i theta} + c.c.` with `theta` read from integer exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePair {
    pub coeff: C64,
    pub exponents: BTreeMap<Var, i64>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Second-order expansion of a list of pairs, divided by `(2 pi)^2`.
pub fn expand_pairs(pairs: &[PhasePair]) -> (QuadraticForm, i64, f64) {
    let unit = pairs
        .iter()
        .flat_map(|p| p.exponents.values().copied())
        .fold(0, gcd)
        .max(1);
    let mut q = QuadraticForm::new();
    let mut bound = 0.0;
    for p in pairs {
        let (re, im) = (p.coeff.re, p.coeff.im);
        q.add_constant(2.0 * re / LIMIT_SCALE);
        let r: Vec<(Var, f64)> = p
            .exponents
            .iter()
            .filter(|(_, &e)| e != 0)
            .map(|(&v, &e)| (v, e as f64 / unit as f64))
            .collect();
        for &(v, rv) in &r {
            // -2 Im(c) * 2 pi r_v v / (2 pi)^2
            q.add_linear(v, -2.0 * im * rv / (2.0 * PI));
        }
        for (i, &(u, ru)) in r.iter().enumerate() {
            for &(v, rv) in &r[i..] {
                q.add_bilinear(u, v, -re * ru * rv);
            }
        }
        let n: f64 = r.iter().map(|(_, x)| x.abs()).sum();
        let tp = 2.0 * PI * n;
        bound += (2.0 * re.abs() * tp.powi(4) / 24.0 + 2.0 * im.abs() * tp.powi(3) / 6.0) / LIMIT_SCALE;
    }
    (q, unit, bound)
}

fn dv_pairs(expr: &HamiltonianExpr) -> Result<(Vec<PhasePair>, bool), LimitError> {
    let PhaseSpace::Dv { n } = expr.space else {
        return Err(LimitError::WrongSpace {
            expected: "dv",
            found: expr.space.kind_name(),
        });
    };
    expr.validate()?;
    let mut pairs = Vec::with_capacity(expr.terms.len());
    let mut dropped_phase = false;
    for (i, t) in expr.terms.iter().enumerate() {
        if !t.bosons.is_empty() {
            return Err(LimitError::BosonTerm(i));
        }
        let w = t.weyl_core().expect("validated dv term");
        let coeff = if t.hc {
            t.coeff
        } else if t.weyl_with_coeff().expect("dv").is_self_adjoint() {
            t.coeff * 0.5
        } else {
            return Err(LimitError::NonHermitianTerm(i));
        };
        dropped_phase |= w.phase_exp() != 0;
        let mut exponents = BTreeMap::new();
        for (site, a, b) in w.sites() {
            let a = two_sided(a as i64, n);
            let b = two_sided(b as i64, n);
            if a != 0 {
                exponents.insert(Var::X(site), -a);
            }
            if b != 0 {
                exponents.insert(Var::P(site), b);
            }
        }
        pairs.push(PhasePair { coeff, exponents });
    }
    Ok((pairs, dropped_phase))
}

const SRC_DV_CV: &str = "dv->cv conjugate rescaling";
const SRC_ROTOR: &str = "dv->rotor variable substitution";
const SRC_ROTOR_CV: &str = "rotor->cv length-scale substitution";
const SRC_RABI: &str = "rabi dv->cv expansion";

/// Taylor expansion of a DV Hamiltonian about the phase-space origin.
pub fn dv_to_cv(expr: &HamiltonianExpr) -> Result<(QuadraticForm, LimitReport), LimitError> {
    let (pairs, dropped_phase) = dv_pairs(expr)?;
    let (q, unit, bound) = expand_pairs(&pairs);
    let mut notes = Vec::new();
    if dropped_phase {
        notes.push("reordering phases of normal-ordered strings were dropped".to_string());
    }
    let report = LimitReport {
        input_hash: expr_hash(expr),
        kind: LimitKind::DvToCv,
        scale: LIMIT_SCALE,
        unit,
        dropped_order_bound: bound,
        substitutions: vec![
            Substitution {
                from: "X_j^a".into(),
                to: format!("exp(-2 pi i a x_j / {unit})"),
                source: SRC_DV_CV,
            },
            Substitution {
                from: "Z_j^b".into(),
                to: format!("exp(2 pi i b p_j / {unit})"),
                source: SRC_DV_CV,
            },
        ],
        notes,
    };
    Ok((q, report))
}

/// Rewrites a DV Hamiltonian on a truncated rotor ladder. Variant one sends
/// `X^a` to a hop by `-a` and `Z^b` to `e^{2 pi i phi b n}`; variant two
/// sends `Z^b` to a hop by `b` and `X^a` to `e^{-2 pi i phi a n}`.
/// Coefficients are kept; reordering phases are dropped.
pub fn dv_to_rotor(
    expr: &HamiltonianExpr,
    variant: RotorVariant,
    phi: f64,
    cutoff: usize,
) -> Result<HamiltonianExpr, LimitError> {
    let PhaseSpace::Dv { n } = expr.space else {
        return Err(LimitError::WrongSpace {
            expected: "dv",
            found: expr.space.kind_name(),
        });
    };
    expr.validate()?;
    let space = PhaseSpace::rotor(variant, cutoff, phi)?;
    let mut out = HamiltonianExpr::new(space, expr.lattice);
    out.boson_cutoff = expr.boson_cutoff;
    for (i, t) in expr.terms.iter().enumerate() {
        let w = t.weyl_core().expect("validated dv term");
        let (coeff, hc) = if t.hc {
            (t.coeff, true)
        } else if w.is_identity() {
            (t.coeff, false)
        } else if t.weyl_with_coeff().expect("dv").is_self_adjoint() {
            (t.coeff * 0.5, true)
        } else {
            return Err(LimitError::NonHermitianTerm(i));
        };
        let mut factors = Vec::new();
        for (site, a, b) in w.sites() {
            let a = two_sided(a as i64, n);
            let b = two_sided(b as i64, n);
            match variant {
                RotorVariant::One => {
                    if a != 0 {
                        factors.push(RotorFactor::Hop { site, k: -a });
                    }
                    if b != 0 {
                        factors.push(RotorFactor::Phase { site, j: b });
                    }
                }
                RotorVariant::Two => {
                    if a != 0 {
                        factors.push(RotorFactor::Phase { site, j: -a });
                    }
                    if b != 0 {
                        factors.push(RotorFactor::Hop { site, k: b });
                    }
                }
            }
        }
        out.push(Term::rotor(coeff, hc, factors).with_bosons(t.bosons.clone()));
    }
    Ok(out)
}

/// Substitution record for [`dv_to_rotor`].
pub fn dv_to_rotor_substitutions(variant: RotorVariant) -> Vec<Substitution> {
    let (x, z) = match variant {
        RotorVariant::One => ("exp(-i a theta_j)", "exp(2 pi i phi b n_j)"),
        RotorVariant::Two => ("exp(-2 pi i phi a n_j)", "exp(i b theta_j)"),
    };
    vec![
        Substitution {
            from: "X_j^a".into(),
            to: x.into(),
            source: SRC_ROTOR,
        },
        Substitution {
            from: "Z_j^b".into(),
            to: z.into(),
            source: SRC_ROTOR,
        },
    ]
}

/// Continuum limit of a rotor Hamiltonian with `phi = 2 pi / length_scale`.
/// Hop distances and phase multiples are read in the same gcd unit as the
/// DV route; in variant one angles become positions, in variant two momenta.
pub fn rotor_to_cv(
    expr: &HamiltonianExpr,
    length_scale: f64,
) -> Result<(QuadraticForm, LimitReport), LimitError> {
    let PhaseSpace::Rotor { variant, phi, .. } = expr.space else {
        return Err(LimitError::WrongSpace {
            expected: "rotor",
            found: expr.space.kind_name(),
        });
    };
    let expected = 2.0 * PI / length_scale;
    if (phi - expected).abs() > PHI_SCALE_TOL {
        return Err(LimitError::PhiScaleMismatch {
            phi,
            expected,
            length_scale,
        });
    }
    expr.validate()?;
    let mut pairs = Vec::with_capacity(expr.terms.len());
    for (i, t) in expr.terms.iter().enumerate() {
        if !t.bosons.is_empty() {
            return Err(LimitError::BosonTerm(i));
        }
        let Core::Rotor(fs) = &t.core else {
            unreachable!("validated rotor term")
        };
        let coeff = if t.hc {
            t.coeff
        } else if fs.is_empty() && t.coeff.im == 0.0 {
            t.coeff * 0.5
        } else {
            return Err(LimitError::NonHermitianTerm(i));
        };
        let mut exponents: BTreeMap<Var, i64> = BTreeMap::new();
        for f in fs {
            let (var, e) = match (*f, variant) {
                (RotorFactor::Hop { site, k }, RotorVariant::One) => (Var::X(site), k),
                (RotorFactor::Phase { site, j }, RotorVariant::One) => (Var::P(site), j),
                (RotorFactor::Hop { site, k }, RotorVariant::Two) => (Var::P(site), k),
                (RotorFactor::Phase { site, j }, RotorVariant::Two) => (Var::X(site), j),
                (RotorFactor::CosN { .. }, _) => {
                    return Err(LimitError::Unsupported(i, "CosN".into()));
                }
            };
            *exponents.entry(var).or_insert(0) += e;
        }
        exponents.retain(|_, e| *e != 0);
        pairs.push(PhasePair { coeff, exponents });
    }
    let (q, unit, bound) = expand_pairs(&pairs);
    let (theta, n) = match variant {
        RotorVariant::One => ("x", "p"),
        RotorVariant::Two => ("p", "x"),
    };
    let report = LimitReport {
        input_hash: expr_hash(expr),
        kind: LimitKind::RotorToCv,
        scale: LIMIT_SCALE,
        unit,
        dropped_order_bound: bound,
        substitutions: vec![
            Substitution {
                from: "theta_j".into(),
                to: format!("2 pi {theta}_j / {unit}"),
                source: SRC_ROTOR_CV,
            },
            Substitution {
                from: "phi n_j".into(),
                to: format!("{n}_j / {unit}"),
                source: SRC_ROTOR_CV,
            },
        ],
        notes: vec![format!("phi = 2 pi / {length_scale}")],
    };
    Ok((q, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub omega: f64,
    pub big_omega: f64,
    pub g: f64,
    /// Fock cutoff of the mode that replaces the qudit.
    pub qudit_cutoff: usize,
    /// Fock cutoff of the original oscillator.
    pub boson_cutoff: usize,
    pub displaced: bool,
}

/// Output of [`rabi_cv_limit`]. Mode 0 carries `(x, p)` from the qudit,
/// mode 1 carries `(y, q)` from the oscillator.
#[derive(Debug, Clone)]
pub struct RabiLimit {
    pub matrix: OperatorMatrix,
    pub form: QuadraticForm,
    /// Cubic `c * x0^2 * x1` coefficient, outside the quadratic form.
    pub cubic_x2y: f64,
    pub warnings: Vec<String>,
    pub report: LimitReport,
}

/// Two-mode continuum limit of the qudit Rabi model with unit hop scales.
///
/// Undisplaced:
/// `w/2 (q^2 + y^2) + 2 Om pi^2 p^2 + sqrt2 g (2 pi x q + y - 2 pi^2 x^2 y) - Om`.
/// Displaced by `y -> y - sqrt2 g / w`:
/// `w/2 (q^2 + y^2) + 2 pi^2 (Om p^2 + 2 g^2/w x^2) + 2 sqrt2 g pi x (q - pi x y) - (Om + g^2/w)`.
/// The oscillator part is realized as `w (n + 1/2)`.
pub fn rabi_cv_limit(p: &RabiParams) -> Result<RabiLimit, LimitError> {
    let RabiParams {
        omega,
        big_omega,
        g,
        qudit_cutoff,
        boson_cutoff,
        displaced,
    } = *p;
    let r2 = std::f64::consts::SQRT_2;
    let mut warnings = Vec::new();
    let shift = r2 * g / omega;
    if shift.abs() > boson_cutoff as f64 / 4.0 {
        warnings.push(format!(
            "displacement amplitude {shift:.4} exceeds a quarter of the boson cutoff {boson_cutoff}"
        ));
    }

    let (x, y) = (Var::X(0), Var::X(1));
    let (pp, q) = (Var::P(0), Var::P(1));
    let mut form = QuadraticForm::new();
    form.add_bilinear(q, q, omega / 2.0);
    form.add_bilinear(y, y, omega / 2.0);
    form.add_bilinear(pp, pp, 2.0 * PI * PI * big_omega);
    form.add_bilinear(x, q, r2 * g * PI);
    let cubic = -2.0 * r2 * g * PI * PI;
    if displaced {
        form.add_bilinear(x, x, 2.0 * PI * PI * 2.0 * g * g / omega);
        form.add_constant(-(big_omega + g * g / omega));
    } else {
        form.add_linear(y, r2 * g);
        form.add_constant(-big_omega);
    }

    let m0 = FockOperators::new(qudit_cutoff)?;
    let m1 = FockOperators::new(boson_cutoff)?;
    let id0 = OperatorMatrix::identity(m0.dim());
    let id1 = OperatorMatrix::identity(m1.dim());
    let re = |v: f64| C64::new(v, 0.0);
    let x0 = m0.x();
    let p0 = m0.p();
    let x0sq = x0.matmul(&x0)?;
    let p0sq = p0.matmul(&p0)?;
    let osc: Vec<f64> = (0..m1.dim()).map(|n| omega * (n as f64 + 0.5)).collect();

    let mut h = kron(&id0, &OperatorMatrix::real_diagonal(&osc))?;
    h = h.add(&kron(&p0sq, &id1)?.scale(re(form.bilinear(pp, pp))))?;
    if form.bilinear(x, x) != 0.0 {
        h = h.add(&kron(&x0sq, &id1)?.scale(re(form.bilinear(x, x))))?;
    }
    h = h.add(&kron(&x0, &m1.p())?.scale(re(2.0 * form.bilinear(x, q))))?;
    if form.linear(y) != 0.0 {
        h = h.add(&kron(&id0, &m1.x())?.scale(re(form.linear(y))))?;
    }
    h = h.add(&kron(&x0sq, &m1.x())?.scale(re(cubic)))?;
    h = h.add(&OperatorMatrix::identity(h.dim()).scale(re(form.constant)))?;
    let matrix = h.checked_hermitian()?;

    let mut notes = vec![format!("cubic term {cubic} * x0^2 x1 kept in the matrix")];
    if displaced {
        notes.push(format!("oscillator displaced by {}", -shift));
    }
    let report = LimitReport {
        input_hash: 0,
        kind: LimitKind::RabiCv,
        scale: 1.0,
        unit: 1,
        dropped_order_bound: rabi_bound(big_omega, g),
        substitutions: vec![
            Substitution {
                from: "X^L".into(),
                to: "exp(-2 pi i x0)".into(),
                source: SRC_RABI,
            },
            Substitution {
                from: "Z^M".into(),
                to: "exp(2 pi i p0)".into(),
                source: SRC_RABI,
            },
        ],
        notes,
    };
    Ok(RabiLimit {
        matrix,
        form,
        cubic_x2y: cubic,
        warnings,
        report,
    })
}

fn rabi_bound(big_omega: f64, g: f64) -> f64 {
    let tp = 2.0 * PI;
    big_omega.abs() * tp.powi(4) / 24.0 + std::f64::consts::SQRT_2 * g.abs() * tp.powi(3) / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::tensor::eig_hermitian;

    fn harper() -> HamiltonianExpr {
        parse("space dv N=8\nsites 1\nterm -0.5 hc : Z(0)^1\nterm -0.5 hc : X(0)^1\n").unwrap()
    }

    #[test]
    fn harper_goes_to_oscillator() {
        let (q, rep) = dv_to_cv(&harper()).unwrap();
        assert_eq!(q.bilinear(Var::X(0), Var::X(0)), 0.5);
        assert_eq!(q.bilinear(Var::P(0), Var::P(0)), 0.5);
        assert_eq!(q.bilinear(Var::X(0), Var::P(0)), 0.0);
        assert_eq!(q.linear_terms().count(), 0);
        assert!((q.constant + 2.0 / LIMIT_SCALE).abs() < 1e-15);
        assert!(rep.dropped_order_bound > 0.0);
        assert_eq!(rep.unit, 1);
    }

    #[test]
    fn identity_only_gives_constant() {
        let e = parse("space dv N=5\nsites 2\nterm 3 :\n").unwrap();
        let (q, rep) = dv_to_cv(&e).unwrap();
        assert_eq!(q.constant, 3.0 / LIMIT_SCALE);
        assert!(q.variables().is_empty());
        assert_eq!(rep.dropped_order_bound, 0.0);
    }

    #[test]
    fn boson_and_non_hermitian_terms_are_rejected() {
        let e = parse("space dv N=3\nsites 1\nboson cutoff=3\nterm 1 hc : X(0)^1 B(0)\n").unwrap();
        assert_eq!(dv_to_cv(&e).unwrap_err(), LimitError::BosonTerm(0));
        let e = parse("space dv N=3\nsites 1\nterm 1 : X(0)^1\n").unwrap();
        assert_eq!(dv_to_cv(&e).unwrap_err(), LimitError::NonHermitianTerm(0));
    }

    #[test]
    fn rotor_route_matches_direct_route() {
        let h = harper();
        let (direct, _) = dv_to_cv(&h).unwrap();
        for v in [RotorVariant::One, RotorVariant::Two] {
            let l = 50.0;
            let r = dv_to_rotor(&h, v, 2.0 * PI / l, 10).unwrap();
            let (via, _) = rotor_to_cv(&r, l).unwrap();
            assert_eq!(via, direct);
        }
    }

    #[test]
    fn phi_must_match_length_scale() {
        let r = dv_to_rotor(&harper(), RotorVariant::One, 0.3, 10).unwrap();
        assert!(matches!(
            rotor_to_cv(&r, 10.0),
            Err(LimitError::PhiScaleMismatch { .. })
        ));
    }

    #[test]
    fn harper_rotor_is_almost_mathieu() {
        let phi = crate::spaces::GOLDEN_PHI;
        let r = dv_to_rotor(&harper(), RotorVariant::One, phi, 6).unwrap();
        let h = r.realize().unwrap();
        let ops = crate::spaces::RotorOperators::new(6, phi).unwrap();
        let want = ops
            .cos_hop(1)
            .unwrap()
            .add(&ops.cos_number(2.0 * PI * phi))
            .unwrap()
            .scale(C64::new(-1.0, 0.0));
        assert!(h.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn quadratic_form_realizes_hermitian() {
        let mut q = QuadraticForm::new();
        q.add_bilinear(Var::X(0), Var::P(0), 0.7);
        q.add_bilinear(Var::P(0), Var::P(0), 0.5);
        q.add_linear(Var::X(1), -0.2);
        let m = q.to_matrix(2, 6).unwrap();
        assert!(m.hermitian_hint());
        let json = q.to_json();
        assert!(json.contains("\"x0,p0\": 0.7"), "{json}");
    }

    #[test]
    fn rabi_without_coupling_is_decoupled() {
        let p = RabiParams {
            omega: 1.0,
            big_omega: 1.0,
            g: 0.0,
            qudit_cutoff: 12,
            boson_cutoff: 8,
            displaced: false,
        };
        let lim = rabi_cv_limit(&p).unwrap();
        let full = eig_hermitian(&lim.matrix).unwrap().eigenvalues;
        let f = FockOperators::new(12).unwrap();
        let pp = f.p().matmul(&f.p()).unwrap().scale(C64::new(2.0 * PI * PI, 0.0));
        let part = eig_hermitian(&pp).unwrap().eigenvalues;
        let mut sums: Vec<f64> = part
            .iter()
            .flat_map(|a| (0..9).map(move |n| a + n as f64 + 0.5 - 1.0))
            .collect();
        sums.sort_by(f64::total_cmp);
        for (a, b) in full.iter().zip(&sums) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
