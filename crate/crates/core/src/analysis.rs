//! Numerical studies: oscillator convergence of the Harper spectrum,
//! symmetry-sector decomposition and a deterministic verification report.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::models::{self, ModelError, ModelKind, ModelSpec, StringId};
use crate::spaces::{
    cv_wigner, dv_clock, dv_fourier, dv_parity, dv_shift, dv_wigner_complex, DensityMatrix, FockOperators,
    RotorOperators, SpaceError, GOLDEN_PHI,
};
use crate::tensor::{comm_norm, eig_hermitian, eigh, LinalgError, OperatorMatrix, SpectrumResult};
use crate::weyl::{half_angle, WeylString};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("convergence sweep needs N >= 4, got {0}")]
    SweepTooSmall(u32),
    #[error("{levels} levels requested but the smallest N is {n}")]
    TooManyLevels { levels: usize, n: u32 },
    #[error("operators do not commute (max-abs commutator {0:e})")]
    NonCommuting(f64),
    #[error("symmetry eigenvalue {0} is not an order-{1} root of unity")]
    NotFiniteOrder(C64, u32),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
}

/// Shift applied before scaling: the Harper Hamiltonian is bounded below by -2.
pub const HARPER_SHIFT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: u32,
    pub level: usize,
    pub raw: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub note: String,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,level,raw,scaled\n");
        for r in &self.rows {
            writeln!(s, "{},{},{:.16e},{:.16e}", r.n, r.level, r.raw, r.scaled).unwrap();
        }
        s
    }

    /// `scaled - (level + 1/2)` for one row.
    pub fn deviation(&self, n: u32, level: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.level == level)
            .map(|r| r.scaled - (level as f64 + 0.5))
    }
}

/// Lowest `levels` eigenvalues of Harper (`M = L = 1`) for each `N`, scaled
/// by `(N / 2 pi)(lambda + 2)` so that they approach `n + 1/2`.
pub fn harper_convergence(sweep: &[u32], levels: usize) -> Result<ConvergenceStudy, AnalysisError> {
    if let Some(&n) = sweep.iter().find(|&&n| n < 4) {
        return Err(AnalysisError::SweepTooSmall(n));
    }
    if let Some(&n) = sweep.iter().min() {
        if levels > n as usize {
            return Err(AnalysisError::TooManyLevels { levels, n });
        }
    }
    let per_n: Result<Vec<Vec<ConvergenceRow>>, AnalysisError> = sweep
        .par_iter()
        .map(|&n| {
            let spec = ModelSpec::new(ModelKind::Harper).with("N", &n.to_string())?;
            let h = models::build(&spec)?.realize()?;
            let ev = eig_hermitian(&h)?.eigenvalues;
            Ok((0..levels)
                .map(|level| ConvergenceRow {
                    n,
                    level,
                    raw: ev[level],
                    scaled: n as f64 / (2.0 * PI) * (ev[level] + HARPER_SHIFT),
                })
                .collect())
        })
        .collect();
    Ok(ConvergenceStudy {
        rows: per_n?.into_iter().flatten().collect(),
        note: "scaled = (N/2pi)(raw + 2); the shift is +2 because the spectrum is bounded below by -2".into(),
    })
}

/// One symmetry sector: label `k` for eigenvalue `e^{2 pi i k / order}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub label: u32,
    pub spectrum: SpectrumResult,
}

/// Splits `h` into the eigenspaces of a unitary `sym` with `sym^order = 1`
/// and diagonalizes each block.
pub fn sector_decompose(h: &OperatorMatrix, sym: &OperatorMatrix, order: u32) -> Result<Vec<Sector>, AnalysisError> {
    let c = comm_norm(h, sym)?;
    if c > 1e-10 {
        return Err(AnalysisError::NonCommuting(c));
    }
    // Hermitian with the same eigenvectors as sym and distinct values per sector
    let alpha = 1.0 / GOLDEN_PHI;
    let herm = sym.add(&sym.adjoint())?.scale(C64::new(0.5, 0.0));
    let anti = sym.sub(&sym.adjoint())?.scale(C64::new(0.0, -0.5 * alpha));
    let k = herm.add(&anti)?.checked_hermitian()?;
    let es = eigh(&k)?;
    let dim = h.dim();
    let mut groups: Vec<Vec<Vec<C64>>> = vec![Vec::new(); order as usize];
    for i in 0..dim {
        let v = es.vector(i);
        let lam = sym.expectation(&v);
        let angle = lam.arg() * order as f64 / (2.0 * PI);
        let label = (angle.round() as i64).rem_euclid(order as i64) as u32;
        if (lam - half_angle(2 * label as i64, order)).norm() > 1e-8 {
            return Err(AnalysisError::NotFiniteOrder(lam, order));
        }
        groups[label as usize].push(v);
    }
    let hd = h.to_dense();
    let mut out = Vec::new();
    for (label, vs) in groups.into_iter().enumerate() {
        if vs.is_empty() {
            continue;
        }
        let basis = nalgebra::DMatrix::from_fn(dim, vs.len(), |r, c| vs[c][r]);
        let block = basis.adjoint() * &hd * &basis;
        let block = OperatorMatrix::from_dense(block).checked_hermitian()?;
        out.push(Sector {
            label: label as u32,
            spectrum: eig_hermitian(&block)?,
        });
    }
    Ok(out)
}

/// Random full-rank density matrix `A A^dagger / Tr`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix, SpaceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = nalgebra::DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut rho = &a * a.adjoint();
    let tr = rho.trace();
    rho /= tr;
    DensityMatrix::new(OperatorMatrix::from_dense(rho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub anchor: &'static str,
}

impl Check {
    fn le(name: impl Into<String>, measured: f64, tolerance: f64, anchor: &'static str) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            anchor,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n  \"checks\": [\n");
        for (i, c) in self.checks.iter().enumerate() {
            write!(
                s,
                "    {{\"name\": \"{}\", \"status\": \"{}\", \"measured\": {:.16e}, \"tolerance\": {:.16e}, \"anchor\": \"{}\"}}",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.measured,
                c.tolerance,
                c.anchor
            )
            .unwrap();
            s.push_str(if i + 1 < self.checks.len() { ",\n" } else { "\n" });
        }
        writeln!(s, "  ],\n  \"passed\": {}\n}}", self.all_passed()).unwrap();
        s
    }
}

/// Negative controls for the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flips the sign of one Fourier entry.
    CorruptFourier,
    /// Flips the sign of one exponent in a toric star term.
    FlipExponent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub n_list: Vec<u32>,
    pub rotor_cutoff: usize,
    pub fock_cutoff: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_list: vec![2, 3, 4, 5, 8],
            rotor_cutoff: 50,
            fock_cutoff: 40,
            fault: None,
        }
    }
}

const TOL: f64 = 1e-12;

fn pow(m: &OperatorMatrix, k: u32) -> Result<OperatorMatrix, LinalgError> {
    (0..k).try_fold(OperatorMatrix::identity(m.dim()), |acc, _| acc.matmul(m))
}

fn dv_checks(n: u32, fault: Option<Fault>) -> Result<Vec<Check>, AnalysisError> {
    let x = dv_shift(n)?;
    let z = dv_clock(n)?;
    let mut f = dv_fourier(n)?;
    if fault == Some(Fault::CorruptFourier) {
        let mut d = f.to_dense();
        d[(0, 0)] = -d[(0, 0)];
        f = OperatorMatrix::from_dense(d);
    }
    let id = OperatorMatrix::identity(n as usize);
    let par = dv_parity(n)?;
    let mut out = Vec::new();

    let lhs = x.matmul(&z)?.matmul(&x.adjoint())?.matmul(&z.adjoint())?;
    let w = id.scale(half_angle(-2, n));
    out.push(Check::le(format!("weyl_relation[N={n}]"), lhs.max_abs_diff(&w)?, TOL, "XZX^-1Z^-1 = exp(-2 pi i/N)"));

    let fu = f.matmul(&f.adjoint())?.max_abs_diff(&id)?;
    out.push(Check::le(format!("fourier_unitary[N={n}]"), fu, TOL, "F F^dagger = 1"));
    let f2 = f.matmul(&f)?;
    out.push(Check::le(format!("fourier_square_parity[N={n}]"), f2.max_abs_diff(&par)?, TOL, "F^2 = parity"));
    out.push(Check::le(format!("fourier_fourth_power[N={n}]"), pow(&f, 4)?.max_abs_diff(&id)?, TOL, "F^4 = 1"));
    if n == 2 {
        out.push(Check::le("parity_trivial[N=2]".to_string(), par.max_abs_diff(&id)?, 0.0, "F^2 = 1 for a qubit"));
    }

    let px = par.matmul(&x)?.matmul(&par)?.max_abs_diff(&x.adjoint())?;
    let pz = par.matmul(&z)?.matmul(&par)?.max_abs_diff(&z.adjoint())?;
    out.push(Check::le(format!("parity_conjugation[N={n}]"), px.max(pz), TOL, "P X P = X^-1, P Z P = Z^-1"));

    let fd = f.to_dense();
    let mub = fd.iter().map(|e| (e.norm_sqr() - 1.0 / n as f64).abs()).fold(0.0, f64::max);
    out.push(Check::le(format!("mutually_unbiased[N={n}]"), mub, TOL, "|<s|m>|^2 = 1/N"));
    let rows = (0..n as usize)
        .map(|r| (fd.row(r).iter().map(|e| e.norm_sqr()).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(Check::le(format!("completeness_row_sums[N={n}]"), rows, TOL, "sum_m |<s|m>|^2 = 1"));

    if n % 2 == 1 {
        let mut worst_imag: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        for seed in 0..3 {
            let rho = random_density(n as usize, seed)?;
            let half = (n / 2) as i64;
            let mut total = 0.0;
            for s in -half..=half {
                for m in -half..=half {
                    let w = dv_wigner_complex(&rho, s, m)?;
                    worst_imag = worst_imag.max(w.im.abs());
                    total += w.re;
                }
            }
            worst_norm = worst_norm.max((total - 1.0).abs());
        }
        out.push(Check::le(format!("dv_wigner_real[N={n}]"), worst_imag, TOL, "Wigner function is real"));
        out.push(Check::le(format!("dv_wigner_normalized[N={n}]"), worst_norm, 1e-10, "sum of W over the grid is 1"));
    }
    Ok(out)
}

fn rotor_checks(cutoff: usize) -> Result<Vec<Check>, AnalysisError> {
    let ops = RotorOperators::new(cutoff, GOLDEN_PHI)?;
    let n = ops.number();
    let mut worst_nk: f64 = 0.0;
    let mut worst_pk: f64 = 0.0;
    for k in [-2i64, -1, 1, 3] {
        let hop = ops.hop(k)?;
        let c = n.matmul(&hop)?.sub(&hop.matmul(&n)?)?;
        worst_nk = worst_nk.max(c.max_abs_diff(&hop.scale(C64::new(k as f64, 0.0)))?);
        for j in [1i64, 2] {
            let ph = ops.phase(j);
            let lhs = ph.matmul(&hop)?;
            let rhs = hop.matmul(&ph)?.scale(C64::from_polar(1.0, 2.0 * PI * GOLDEN_PHI * (j * k) as f64));
            worst_pk = worst_pk.max(lhs.max_abs_diff(&rhs)?);
        }
    }
    Ok(vec![
        Check::le(format!("rotor_number_hop[cutoff={cutoff}]"), worst_nk, TOL, "[n, e^{ik theta}] = k e^{ik theta}"),
        Check::le(format!("rotor_phase_hop[cutoff={cutoff}]"), worst_pk, 1e-10, "phase-hop exchange relation"),
    ])
}

fn cv_checks(cutoff: usize) -> Result<Vec<Check>, AnalysisError> {
    let ops = FockOperators::new(cutoff)?;
    let (x, p) = (ops.x(), ops.p());
    let c = x.matmul(&p)?.sub(&p.matmul(&x)?)?.to_dense();
    // the top level is corrupted by truncation
    let sub = cutoff;
    let mut worst: f64 = 0.0;
    for r in 0..sub {
        for col in 0..sub {
            let want = if r == col { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((c[(r, col)] - want).norm());
        }
    }
    let vac = DensityMatrix::basis_state(ops.dim(), 0)?;
    let w = cv_wigner(&vac, 0.0, 0.0)?;
    Ok(vec![
        Check::le(format!("cv_commutator_subspace[cutoff={cutoff}]"), worst, TOL, "[x, p] = i below the cutoff"),
        Check::le(format!("cv_vacuum_wigner[cutoff={cutoff}]"), (w.value - 2.0 / PI).abs(), 1e-6, "W_vac(0,0) = 2/pi"),
    ])
}

/// Kinematic identities across the three phase spaces.
pub fn verify_kinematics(opts: &VerifyOptions) -> Result<VerificationReport, AnalysisError> {
    let dv: Result<Vec<Vec<Check>>, AnalysisError> = opts.n_list.par_iter().map(|&n| dv_checks(n, opts.fault)).collect();
    let mut checks: Vec<Check> = dv?.into_iter().flatten().collect();
    checks.extend(rotor_checks(opts.rotor_cutoff)?);
    checks.extend(cv_checks(opts.fock_cutoff)?);
    Ok(VerificationReport { checks })
}

fn weyls(spec: &ModelSpec, fault: Option<Fault>) -> Result<Vec<WeylString>, AnalysisError> {
    let mut monos = models::monomials(spec)?;
    if fault == Some(Fault::FlipExponent) && spec.kind == ModelKind::Toric {
        let star = monos.len() / 2;
        let f = monos[star].factors.last_mut().expect("star has factors");
        f.1 = -f.1;
    }
    let n = spec.params.n;
    Ok(monos.iter().map(|m| m.weyl(n)).collect::<Result<_, _>>().map_err(ModelError::from)?)
}

fn count_noncommuting(a: &[WeylString], b: &[WeylString]) -> usize {
    a.iter()
        .map(|p| b.iter().filter(|q| !p.commutes_with(q).expect("same N")).count())
        .sum()
}

/// Number of non-commuting term pairs in toric codes up to `max_size` x
/// `max_size`, over `N` in `ns` and all `0 < M, L < N`.
pub fn toric_frustration_sweep(max_size: usize, ns: &[u32], fault: Option<Fault>) -> Result<usize, AnalysisError> {
    let mut jobs = Vec::new();
    for &n in ns {
        for m in 1..n {
            for l in 1..n {
                for lx in 2..=max_size {
                    for ly in 2..=max_size {
                        jobs.push((n, m, l, lx, ly));
                    }
                }
            }
        }
    }
    let counts: Result<Vec<usize>, AnalysisError> = jobs
        .par_iter()
        .map(|&(n, m, l, lx, ly)| {
            let mut s = ModelSpec::new(ModelKind::Toric);
            s.params.n = n;
            s.params.m = m as i64;
            s.params.l = l as i64;
            s.params.lx = lx;
            s.params.ly = ly;
            let ws = weyls(&s, fault)?;
            Ok(count_noncommuting(&ws, &ws))
        })
        .collect();
    Ok(counts?.into_iter().sum())
}

/// Non-commuting pairs between each cube's terms and those of its 26
/// neighbors (and itself) on an `l^3` torus, over the same `(N, M, L)` grid.
pub fn cubic_frustration_sweep(l: usize, ns: &[u32]) -> Result<usize, AnalysisError> {
    let mut jobs = Vec::new();
    for &n in ns {
        for m in 1..n {
            for hop in 1..n {
                jobs.push((n, m as i64, hop as i64));
            }
        }
    }
    let counts: Result<Vec<usize>, AnalysisError> = jobs
        .par_iter()
        .map(|&(n, m, hop)| {
            let lat = crate::lattice::Lattice::CubicTorus { l };
            let cube = |x: i64, y: i64, z: i64| -> Result<[WeylString; 2], AnalysisError> {
                let a = WeylString::from_factors(n, models::cube_a(&lat, x, y, z, m)).map_err(ModelError::from)?;
                let b = WeylString::from_factors(n, models::cube_b(&lat, x, y, z, hop)).map_err(ModelError::from)?;
                Ok([a, b])
            };
            let mut bad = 0;
            let s = l as i64;
            for x in 0..s {
                for y in 0..s {
                    for z in 0..s {
                        let here = cube(x, y, z)?;
                        for dx in -1..=1 {
                            for dy in -1..=1 {
                                for dz in -1..=1 {
                                    bad += count_noncommuting(&here, &cube(x + dx, y + dy, z + dz)?);
                                }
                            }
                        }
                    }
                }
            }
            Ok(bad)
        })
        .collect();
    Ok(counts?.into_iter().sum())
}

/// Frustration-freeness, conserved quantities and string phases of the models.
pub fn verify_models(fault: Option<Fault>) -> Result<VerificationReport, AnalysisError> {
    let ns: Vec<u32> = (2..=6).collect();
    let mut checks = Vec::new();
    let toric = toric_frustration_sweep(4, &ns, fault)?;
    checks.push(Check::le("toric_frustration_free", toric as f64, 0.0, "all toric terms commute"));
    let cubic = cubic_frustration_sweep(3, &ns)?;
    checks.push(Check::le("cubic_frustration_free", cubic as f64, 0.0, "each cube commutes with its 26 neighbors"));

    for n in 2..=5u32 {
        let mut hc = ModelSpec::new(ModelKind::Honeycomb);
        hc.params.n = n;
        hc.params.lx = 3;
        hc.params.ly = 3;
        let mut bad = 0.0;
        for sym in models::symmetries(&hc)? {
            bad += sym.residual(&hc)?;
        }
        checks.push(Check::le(format!("honeycomb_conserved[N={n}]"), bad, 0.0, "plaquettes and strings commute with H"));
        let ws = weyls(&hc, None)?;
        let frustrated = count_noncommuting(&ws, &ws) as f64;
        checks.push(Check {
            name: format!("honeycomb_frustrated[N={n}]"),
            passed: frustrated > 0.0,
            measured: frustrated,
            tolerance: 1.0,
            anchor: "some bond terms fail to commute",
        });
        let e = models::string_phase(&hc, StringId::VRow(0), StringId::VZig(0))?;
        let ok = e.exponent() == 2 % n || e.exponent() == (n - 2 % n) % n;
        checks.push(Check {
            name: format!("honeycomb_string_phase[N={n}]"),
            passed: ok,
            measured: e.signed() as f64,
            tolerance: 0.0,
            anchor: "string exponent is 2 mod N up to sign",
        });
    }

    for n in 2..=4u32 {
        for k in 2..=4usize {
            let mut b = ModelSpec::new(ModelKind::Baxter);
            b.params.n = n;
            b.params.k = k;
            let mut bad = 0.0;
            for sym in models::symmetries(&b)? {
                bad += sym.residual(&b)?;
            }
            checks.push(Check::le(format!("baxter_clock_product[N={n},K={k}]"), bad, 0.0, "Z^K commutes with H"));
        }
    }

    for n in 2..=4u32 {
        let mut t = ModelSpec::new(ModelKind::Toric);
        t.params.n = n;
        t.params.lx = 3;
        t.params.ly = 3;
        let cross = models::string_phase(&t, StringId::XRow(0), StringId::ZCol(0))?;
        checks.push(Check::le(format!("toric_crossing_strings[N={n}]"), (cross.signed().abs() - 1).abs() as f64, 0.0, "crossing strings pick up exp(-2 pi i/N)"));
        let par = models::string_phase(&t, StringId::XRow(0), StringId::ZRow(1))?;
        checks.push(Check::le(format!("toric_parallel_strings[N={n}]"), par.exponent() as f64, 0.0, "parallel strings commute"));
    }

    let mut rabi = ModelSpec::new(ModelKind::Rabi);
    rabi.params.boson_cutoff = 30;
    for sym in models::symmetries(&rabi)? {
        let r = sym.residual(&rabi)?;
        checks.push(Check::le(format!("rabi_symmetry_{}", sym.name), r, TOL, "V and U leave H invariant"));
    }
    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harper_scaled_levels_approach_half_integers() {
        let study = harper_convergence(&[8, 16, 32, 64, 128], 5).unwrap();
        assert_eq!(study.rows.len(), 25);
        assert!(study.deviation(128, 0).unwrap().abs() < 0.01);
        // higher levels converge more slowly: level 4 is still 0.125 low at N=128
        let d4 = study.deviation(128, 4).unwrap();
        assert!(d4 < 0.0 && d4.abs() < study.deviation(64, 4).unwrap().abs());
        let d: Vec<f64> = [8, 16, 32, 64, 128].iter().map(|&n| study.deviation(n, 0).unwrap().abs()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(study.to_csv().starts_with("N,level,raw,scaled\n"));
        assert!(harper_convergence(&[3], 1).is_err());
    }

    #[test]
    fn sectors_of_identity_are_all_ones() {
        let h = OperatorMatrix::identity(6);
        let u = OperatorMatrix::from_dense(kron_dense(&dv_clock(3).unwrap(), 2));
        let secs = sector_decompose(&h, &u, 3).unwrap();
        assert_eq!(secs.len(), 3);
        for s in secs {
            assert!(s.spectrum.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-12));
        }
    }

    fn kron_dense(a: &OperatorMatrix, k: usize) -> nalgebra::DMatrix<C64> {
        a.to_dense().kronecker(&nalgebra::DMatrix::identity(k, k))
    }

    #[test]
    fn baxter_parity_sectors() {
        let mut b = ModelSpec::new(ModelKind::Baxter);
        b.params.n = 2;
        b.params.k = 3;
        let h = models::build(&b).unwrap().realize().unwrap();
        let models::SymmetryOp::Weyl(w) = &models::symmetries(&b).unwrap()[0].op else {
            panic!()
        };
        let secs = sector_decompose(&h, &w.to_matrix(3).unwrap(), 2).unwrap();
        assert_eq!(secs.iter().map(|s| s.spectrum.dim).collect::<Vec<_>>(), vec![4, 4]);
        let mut all: Vec<f64> = secs.iter().flat_map(|s| s.spectrum.eigenvalues.clone()).collect();
        all.sort_by(f64::total_cmp);
        let full = eig_hermitian(&h).unwrap().eigenvalues;
        for (a, b) in all.iter().zip(&full) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn non_commuting_symmetry_is_rejected() {
        let h = dv_shift(3).unwrap().add(&dv_shift(3).unwrap().adjoint()).unwrap();
        assert!(matches!(sector_decompose(&h, &dv_clock(3).unwrap(), 3), Err(AnalysisError::NonCommuting(_))));
    }

    #[test]
    fn kinematics_pass_and_faults_are_caught() {
        let opts = VerifyOptions {
            n_list: vec![2, 3, 4, 5],
            rotor_cutoff: 10,
            fock_cutoff: 20,
            fault: None,
        };
        let r = verify_kinematics(&opts).unwrap();
        assert!(r.all_passed(), "{}", r.to_json());
        assert_eq!(r.to_json(), verify_kinematics(&opts).unwrap().to_json());
        let bad = verify_kinematics(&VerifyOptions {
            fault: Some(Fault::CorruptFourier),
            ..opts
        })
        .unwrap();
        assert!(bad.failures().any(|c| c.name.starts_with("fourier_unitary")));
    }

    #[test]
    fn flipped_exponent_breaks_toric() {
        assert_eq!(toric_frustration_sweep(2, &[3], None).unwrap(), 0);
        assert!(toric_frustration_sweep(2, &[3], Some(Fault::FlipExponent)).unwrap() > 0);
    }
}
