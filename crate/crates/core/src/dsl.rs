//! Line-oriented text format for Hamiltonians.
//!
//! ```text
//! # comment
//! space dv N=<int>
//! space rotor cutoff=<int> phi=<real|golden> [variant=1|2]
//! space cv cutoff=<int>
//! sites <int> [ring|chain|torus <Lx> <Ly>|cubic <L>|honeycomb <Lx> <Ly>]
//! boson cutoff=<int>
//! term <coeff> [hc] : <factor>*
//! ```
//!
//! Factors: `X(s)^k`, `Z(s)^k`, `Phase(k)` (global `e^{i pi k/N}`) on dv;
//! `HopN(s)^k`, `PhaseN(s)^k`, `CosN(s,gamma)` on rotor; `Xq(s)^k`, `Pq(s)^k`
//! with `k <= 2` on cv; `B(m)`, `Bd(m)` anywhere a boson is declared.
//! Coefficients are decimals, rational multiples of `pi` (`-pi/4`, `2*pi`),
//! or complex pairs `(re,im)`. An empty factor list is the identity.

use std::fmt::{self, Write as _};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::expr::{BosonFactor, Core, CvFactor, HamiltonianExpr, Ladder, Quadrature, RotorFactor, Term};
use crate::lattice::Lattice;
use crate::spaces::{PhaseSpace, RotorVariant, GOLDEN_PHI};
use crate::weyl::WeylString;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A message anchored at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.severity, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseDiagnostics(pub Vec<ParseDiagnostic>);

impl fmt::Display for ParseDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl ParseDiagnostics {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }
}

/// Parses a document, discarding warnings.
pub fn parse(source: &str) -> Result<HamiltonianExpr, ParseDiagnostics> {
    parse_with_warnings(source).map(|(e, _)| e)
}

/// Parses a document and returns any warnings alongside the expression.
pub fn parse_with_warnings(
    source: &str,
) -> Result<(HamiltonianExpr, Vec<ParseDiagnostic>), ParseDiagnostics> {
    let mut p = Parser::default();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        p.line(i + 1, line);
    }
    p.finish()
}

#[derive(Default)]
struct Parser {
    space: Option<PhaseSpace>,
    lattice: Option<Lattice>,
    boson_cutoff: Option<usize>,
    terms: Vec<Term>,
    diags: Vec<ParseDiagnostic>,
    last_line: usize,
}

type Tok<'a> = (usize, &'a str);

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

fn column(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

impl Parser {
    fn err(&mut self, line: usize, col: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            line,
            column: col,
            message: message.into(),
            severity: Severity::Error,
        });
    }

    fn warn(&mut self, line: usize, col: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            line,
            column: col,
            message: message.into(),
            severity: Severity::Warning,
        });
    }

    fn line(&mut self, ln: usize, text: &str) {
        self.last_line = ln;
        let toks = tokenize(text);
        let (off, head) = toks[0];
        let col = column(text, off);
        match head {
            "space" => self.space_line(ln, text, &toks),
            "sites" => self.sites_line(ln, text, &toks),
            "boson" => self.boson_line(ln, text, &toks),
            "term" => self.term_line(ln, text),
            other => self.err(ln, col, format!("unknown directive '{other}'")),
        }
    }

    fn key_values<'a>(
        &mut self,
        ln: usize,
        text: &str,
        toks: &[Tok<'a>],
    ) -> Vec<(usize, &'a str, &'a str)> {
        let mut out = Vec::new();
        for &(off, t) in toks {
            match t.split_once('=') {
                Some((k, v)) => out.push((column(text, off), k, v)),
                None => self.err(ln, column(text, off), format!("expected key=value, found '{t}'")),
            }
        }
        out
    }

    fn space_line(&mut self, ln: usize, text: &str, toks: &[Tok]) {
        let col0 = column(text, toks[0].0);
        if self.space.is_some() {
            self.err(ln, col0, "duplicate space declaration");
            return;
        }
        let Some(&(koff, kind)) = toks.get(1) else {
            self.err(ln, col0, "expected space kind (dv, rotor or cv)");
            return;
        };
        let kcol = column(text, koff);
        let kvs = self.key_values(ln, text, &toks[2..]);
        let mut n = None;
        let mut cutoff = None;
        let mut phi = None;
        let mut variant = RotorVariant::One;
        for (col, k, v) in kvs {
            match (kind, k) {
                ("dv", "N") => n = self.uint(ln, col, v),
                ("rotor" | "cv", "cutoff") => cutoff = self.uint(ln, col, v),
                ("rotor", "phi") => {
                    phi = if v == "golden" {
                        Some(GOLDEN_PHI)
                    } else {
                        let r = parse_real(v);
                        if r.is_none() {
                            self.err(ln, col, format!("invalid phi '{v}'"));
                        }
                        r
                    }
                }
                ("rotor", "variant") => match v {
                    "1" => variant = RotorVariant::One,
                    "2" => variant = RotorVariant::Two,
                    _ => self.err(ln, col, format!("rotor variant must be 1 or 2, got '{v}'")),
                },
                _ => self.err(ln, col, format!("unknown key '{k}' for space {kind}")),
            }
        }
        let space = match kind {
            "dv" => match n {
                Some(n) => PhaseSpace::dv(n as u32).map_err(|e| e.to_string()),
                None => Err("dv space needs N=<int>".to_string()),
            },
            "rotor" => match cutoff {
                Some(c) => PhaseSpace::rotor(variant, c, phi.unwrap_or(GOLDEN_PHI)).map_err(|e| e.to_string()),
                None => Err("rotor space needs cutoff=<int>".to_string()),
            },
            "cv" => match cutoff {
                Some(c) => PhaseSpace::cv(c).map_err(|e| e.to_string()),
                None => Err("cv space needs cutoff=<int>".to_string()),
            },
            other => Err(format!("unknown space kind '{other}'")),
        };
        match space {
            Ok(s) => self.space = Some(s),
            Err(m) => self.err(ln, kcol, m),
        }
    }

    fn uint(&mut self, ln: usize, col: usize, v: &str) -> Option<usize> {
        match v.parse::<usize>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(ln, col, format!("expected a non-negative integer, found '{v}'"));
                None
            }
        }
    }

    fn sites_line(&mut self, ln: usize, text: &str, toks: &[Tok]) {
        let col0 = column(text, toks[0].0);
        if self.lattice.is_some() {
            self.err(ln, col0, "duplicate sites declaration");
            return;
        }
        let Some(&(noff, ntext)) = toks.get(1) else {
            self.err(ln, col0, "expected site count");
            return;
        };
        let Some(n) = self.uint(ln, column(text, noff), ntext) else {
            return;
        };
        let mut nums = Vec::new();
        for &(off, t) in toks.iter().skip(3) {
            match self.uint(ln, column(text, off), t) {
                Some(v) => nums.push(v),
                None => return,
            }
        }
        let geom = toks.get(2).map(|&(off, t)| (column(text, off), t));
        let lattice = match geom {
            None => Ok(Lattice::Free(n)),
            Some((col, g)) => {
                let arity = match g {
                    "ring" | "chain" => 0,
                    "cubic" => 1,
                    "torus" | "honeycomb" => 2,
                    _ => {
                        self.err(ln, col, format!("unknown geometry '{g}'"));
                        return;
                    }
                };
                if nums.len() != arity {
                    self.err(ln, col, format!("geometry '{g}' takes {arity} extents, got {}", nums.len()));
                    return;
                }
                let l = match g {
                    "ring" => Lattice::Ring(n),
                    "chain" => Lattice::Chain(n),
                    "cubic" => Lattice::CubicTorus { l: nums[0] },
                    "torus" => Lattice::SquareTorus { lx: nums[0], ly: nums[1] },
                    _ => Lattice::HoneycombTorus { lx: nums[0], ly: nums[1] },
                };
                if l.n_sites() != n {
                    Err((col, format!("geometry '{g}' has {} sites, but {n} were declared", l.n_sites())))
                } else {
                    Ok(l)
                }
            }
        };
        match lattice {
            Ok(l) => self.lattice = Some(l),
            Err((col, m)) => self.err(ln, col, m),
        }
    }

    fn boson_line(&mut self, ln: usize, text: &str, toks: &[Tok]) {
        let col0 = column(text, toks[0].0);
        if self.boson_cutoff.is_some() {
            self.err(ln, col0, "duplicate boson declaration");
            return;
        }
        let kvs = self.key_values(ln, text, &toks[1..]);
        let mut found = false;
        for (col, k, v) in kvs {
            if k == "cutoff" {
                if let Some(c) = self.uint(ln, col, v) {
                    if c == 0 {
                        self.err(ln, col, "boson cutoff must be at least 1");
                    } else {
                        self.boson_cutoff = Some(c);
                    }
                }
                found = true;
            } else {
                self.err(ln, col, format!("unknown key '{k}' for boson"));
            }
        }
        if !found {
            self.err(ln, col0, "boson declaration needs cutoff=<int>");
        }
    }

    fn term_line(&mut self, ln: usize, text: &str) {
        let (Some(space), Some(lattice)) = (self.space, self.lattice) else {
            self.err(ln, 1, "term before space and sites declarations");
            return;
        };
        let Some(colon) = text.find(':') else {
            self.err(ln, text.len() + 1, "expected ':' after the coefficient");
            return;
        };
        let head = tokenize(&text[..colon]);
        let Some(&(coff, ctext)) = head.get(1) else {
            self.err(ln, column(text, colon), "expected a coefficient");
            return;
        };
        let ccol = column(text, coff);
        let Some(coeff) = parse_coeff(ctext) else {
            self.err(ln, ccol, format!("invalid coefficient '{ctext}'"));
            return;
        };
        let mut hc = false;
        for &(off, t) in &head[2..] {
            if t == "hc" && !hc {
                hc = true;
            } else {
                self.err(ln, column(text, off), format!("unexpected '{t}' before ':'"));
                return;
            }
        }
        if coeff == C64::new(0.0, 0.0) {
            self.warn(ln, ccol, "term has a zero coefficient");
        }

        let n_sites = lattice.n_sites();
        let mut weyl = match space {
            PhaseSpace::Dv { n } => Some(WeylString::identity(n).expect("validated N")),
            _ => None,
        };
        let mut phase_k: i64 = 0;
        let mut rotor = Vec::new();
        let mut cv = Vec::new();
        let mut bosons = Vec::new();
        let body_off = colon + 1;
        for (off, ftext) in tokenize(&text[body_off..]) {
            let col = column(text, body_off + off);
            let f = match parse_factor(ftext) {
                Ok(f) => f,
                Err(m) => {
                    self.err(ln, col, m);
                    return;
                }
            };
            let allowed = match f.name {
                "B" | "Bd" => true,
                "X" | "Z" | "Phase" => matches!(space, PhaseSpace::Dv { .. }),
                "HopN" | "PhaseN" | "CosN" => matches!(space, PhaseSpace::Rotor { .. }),
                "Xq" | "Pq" => matches!(space, PhaseSpace::Cv { .. }),
                other => {
                    self.err(ln, col, format!("unknown factor '{other}'"));
                    return;
                }
            };
            if !allowed {
                self.err(ln, col, format!("factor '{}' is not allowed in a {} space", f.name, space.kind_name()));
                return;
            }
            let want_args = match f.name {
                "CosN" => 2,
                _ => 1,
            };
            if f.args.len() != want_args {
                self.err(ln, col, format!("'{}' takes {want_args} argument(s)", f.name));
                return;
            }
            if f.name == "Phase" {
                if f.power.is_some() {
                    self.err(ln, col, "Phase takes no exponent");
                    return;
                }
                match f.args[0].parse::<i64>() {
                    Ok(k) => phase_k += k,
                    Err(_) => {
                        self.err(ln, col, format!("invalid phase exponent '{}'", f.args[0]));
                        return;
                    }
                }
                continue;
            }
            let Ok(index) = f.args[0].parse::<usize>() else {
                self.err(ln, col, format!("invalid index '{}'", f.args[0]));
                return;
            };
            if matches!(f.name, "B" | "Bd") {
                if f.power.is_some() {
                    self.err(ln, col, "boson factors take no exponent");
                    return;
                }
                if self.boson_cutoff.is_none() {
                    self.err(ln, col, "boson factor used without a 'boson cutoff=' declaration");
                    return;
                }
                if index != 0 {
                    self.err(ln, col, format!("boson mode {index} out of range (one mode, index 0)"));
                    return;
                }
                bosons.push(BosonFactor {
                    mode: index,
                    op: if f.name == "B" { Ladder::Lower } else { Ladder::Raise },
                });
                continue;
            }
            if index >= n_sites {
                self.err(ln, col, format!("site {index} out of range for {n_sites} sites"));
                return;
            }
            let power = f.power.unwrap_or(1);
            match (f.name, &mut weyl, space) {
                ("X" | "Z", Some(w), PhaseSpace::Dv { n }) => {
                    if power.unsigned_abs() >= n as u64 {
                        self.warn(ln, col, format!("exponent {power} reduced mod {n}"));
                    }
                    let (a, b) = if f.name == "X" { (power, 0) } else { (0, power) };
                    let fac = WeylString::from_factors(n, [(index, a, b)]).expect("validated N");
                    *w = w.mul(&fac).expect("same N");
                }
                ("HopN", _, _) => rotor.push(RotorFactor::Hop { site: index, k: power }),
                ("PhaseN", _, _) => rotor.push(RotorFactor::Phase { site: index, j: power }),
                ("CosN", _, _) => {
                    if f.power.is_some() {
                        self.err(ln, col, "CosN takes no exponent");
                        return;
                    }
                    match parse_real(f.args[1]) {
                        Some(gamma) => rotor.push(RotorFactor::CosN { site: index, gamma }),
                        None => {
                            self.err(ln, col, format!("invalid gamma '{}'", f.args[1]));
                            return;
                        }
                    }
                }
                ("Xq" | "Pq", _, _) => {
                    if !(1..=2).contains(&power) {
                        self.err(ln, col, format!("quadrature power must be 1 or 2, got {power}"));
                        return;
                    }
                    cv.push(CvFactor {
                        site: index,
                        quad: if f.name == "Xq" { Quadrature::X } else { Quadrature::P },
                        power: power as u8,
                    });
                }
                _ => unreachable!("factor kinds are filtered above"),
            }
        }
        if let PhaseSpace::Rotor { cutoff, .. } = space {
            if let Some(RotorFactor::Hop { k, .. }) = rotor
                .iter()
                .find(|f| matches!(f, RotorFactor::Hop { k, .. } if k.unsigned_abs() as usize > 2 * cutoff))
            {
                self.err(ln, column(text, body_off), format!("hop distance {k} exceeds twice the cutoff {cutoff}"));
                return;
            }
        }
        let term = match space {
            PhaseSpace::Dv { .. } => {
                let w = weyl.expect("dv space");
                let k = w.phase_exp() as i64 + phase_k;
                Term::weyl(coeff, hc, w.with_phase_exp(k))
            }
            PhaseSpace::Rotor { .. } => Term::rotor(coeff, hc, rotor),
            PhaseSpace::Cv { .. } => Term::cv(coeff, hc, cv),
        };
        self.terms.push(term.with_bosons(bosons));
    }

    fn finish(self) -> Result<(HamiltonianExpr, Vec<ParseDiagnostic>), ParseDiagnostics> {
        let mut diags = self.diags;
        let end = self.last_line.max(1);
        if self.space.is_none() {
            diags.push(ParseDiagnostic {
                line: end,
                column: 1,
                message: "missing space declaration".into(),
                severity: Severity::Error,
            });
        }
        if self.lattice.is_none() {
            diags.push(ParseDiagnostic {
                line: end,
                column: 1,
                message: "missing sites declaration".into(),
                severity: Severity::Error,
            });
        }
        if diags.iter().any(|d| d.severity == Severity::Error) {
            return Err(ParseDiagnostics(diags));
        }
        let mut expr = HamiltonianExpr::new(self.space.expect("checked"), self.lattice.expect("checked"));
        expr.boson_cutoff = self.boson_cutoff;
        expr.terms = self.terms;
        Ok((expr, diags))
    }
}

struct RawFactor<'a> {
    name: &'a str,
    args: Vec<&'a str>,
    power: Option<i64>,
}

fn parse_factor(t: &str) -> Result<RawFactor<'_>, String> {
    let open = t.find('(').ok_or_else(|| format!("malformed factor '{t}'"))?;
    let close = t.find(')').ok_or_else(|| format!("missing ')' in '{t}'"))?;
    if close < open {
        return Err(format!("malformed factor '{t}'"));
    }
    let name = &t[..open];
    let args: Vec<&str> = t[open + 1..close].split(',').map(str::trim).collect();
    let rest = &t[close + 1..];
    let power = if rest.is_empty() {
        None
    } else {
        let p = rest
            .strip_prefix('^')
            .ok_or_else(|| format!("unexpected '{rest}' after factor"))?;
        Some(p.parse::<i64>().map_err(|_| format!("invalid exponent '{p}'"))?)
    };
    Ok(RawFactor { name, args, power })
}

/// Real literal: decimal, `a/b`, or a multiple of `pi` such as `-pi/4` or `2*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b.parse::<f64>().ok()?)),
        None => (s, None),
    };
    let value = if let Some(prefix) = num.strip_suffix("pi") {
        let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
        let k = match prefix {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p.parse::<f64>().ok()?,
        };
        k * std::f64::consts::PI
    } else {
        num.parse::<f64>().ok()?
    };
    Some(match den {
        Some(d) => value / d,
        None => value,
    })
}

pub fn parse_coeff(s: &str) -> Option<C64> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',')?;
        return Some(C64::new(parse_real(re.trim())?, parse_real(im.trim())?));
    }
    parse_real(s).map(|x| C64::new(x, 0.0))
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({},{})", c.re, c.im)
    }
}

/// Deterministic text form; `parse(serialize(e)) == e`.
pub fn serialize(expr: &HamiltonianExpr) -> String {
    let mut out = String::new();
    match expr.space {
        PhaseSpace::Dv { n } => writeln!(out, "space dv N={n}"),
        PhaseSpace::Rotor {
            variant,
            cutoff,
            phi,
        } => {
            let phi = if phi == GOLDEN_PHI {
                "golden".to_string()
            } else {
                format!("{phi}")
            };
            writeln!(out, "space rotor cutoff={cutoff} phi={phi} variant={}", variant.index())
        }
        PhaseSpace::Cv { cutoff } => writeln!(out, "space cv cutoff={cutoff}"),
    }
    .expect("writing to a String");
    writeln!(out, "sites {}", expr.lattice).expect("writing to a String");
    if let Some(c) = expr.boson_cutoff {
        writeln!(out, "boson cutoff={c}").expect("writing to a String");
    }
    for t in &expr.terms {
        out.push_str("term ");
        out.push_str(&fmt_coeff(t.coeff));
        if t.hc {
            out.push_str(" hc");
        }
        out.push_str(" :");
        for f in factor_strings(t) {
            out.push(' ');
            out.push_str(&f);
        }
        out.push('\n');
    }
    out
}

fn factor_strings(t: &Term) -> Vec<String> {
    let mut fs = Vec::new();
    match &t.core {
        Core::Weyl(w) => {
            if w.phase_exp() != 0 {
                fs.push(format!("Phase({})", w.phase_exp()));
            }
            for (s, a, b) in w.sites() {
                if a != 0 {
                    fs.push(format!("X({s})^{a}"));
                }
                if b != 0 {
                    fs.push(format!("Z({s})^{b}"));
                }
            }
        }
        Core::Rotor(rs) => {
            let mut rs = rs.clone();
            rs.sort_by_key(RotorFactor::site);
            for r in rs {
                fs.push(match r {
                    RotorFactor::Hop { site, k } => format!("HopN({site})^{k}"),
                    RotorFactor::Phase { site, j } => format!("PhaseN({site})^{j}"),
                    RotorFactor::CosN { site, gamma } => format!("CosN({site},{gamma})"),
                });
            }
        }
        Core::Cv(cs) => {
            let mut cs = cs.clone();
            cs.sort_by_key(|c| c.site);
            for c in cs {
                let name = match c.quad {
                    Quadrature::X => "Xq",
                    Quadrature::P => "Pq",
                };
                fs.push(format!("{name}({})^{}", c.site, c.power));
            }
        }
    }
    for b in &t.bosons {
        fs.push(match b.op {
            Ladder::Lower => format!("B({})", b.mode),
            Ladder::Raise => format!("Bd({})", b.mode),
        });
    }
    fs
}
