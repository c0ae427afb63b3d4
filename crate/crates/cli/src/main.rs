//! `phasekit` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 input or parse error, 3 dimension cap
//! exceeded, 4 verification failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use phasekit::analysis::{self, Fault, VerificationReport, VerifyOptions};
use phasekit::dsl::{parse_with_warnings, serialize};
use phasekit::expr::HamiltonianExpr;
use phasekit::limits::{dv_to_cv, dv_to_rotor, rotor_to_cv};
use phasekit::models::{self, ModelKind, ModelSpec, SpaceChoice};
use phasekit::spaces::{cv_wigner, dv_wigner_grid, DensityMatrix, PhaseSpace, RotorVariant, GOLDEN_PHI};
use phasekit::tensor::{eig_hermitian, eig_lowest, DEFAULT_MAX_DIM, DENSE_MAX_DIM};
use phasekit::Error;

#[derive(Parser, Debug)]
#[command(name = "phasekit", version, about = "Phase-space Hamiltonians: spectra, limits, checks")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Eigenvalues as "index,eigenvalue" CSV.
    Spectrum(SpectrumArgs),
    /// Harper oscillator convergence as "N,level,raw,scaled" CSV.
    Converge(ConvergeArgs),
    /// Rewrite a DV or rotor Hamiltonian in another phase space.
    Limit(LimitArgs),
    /// Run the verification suite; exit 4 when a check fails.
    Verify(VerifyArgs),
    /// Wigner function on a grid.
    Wigner(WignerArgs),
    /// Emit a named model as DSL text.
    Build(BuildArgs),
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Built-in model: harper, baxter, rabi, toric, cubic, honeycomb.
    #[arg(long, conflicts_with = "file")]
    model: Option<String>,
    /// DSL file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Model parameter as key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Shorthand for --param N=<value>.
    #[arg(long = "N")]
    n: Option<u32>,
    /// Shorthand for --param size=<value> (lattice extent).
    #[arg(long = "L")]
    size: Option<usize>,
    /// Phase space for a named model.
    #[arg(long, value_enum, default_value = "dv")]
    space: SpaceArg,
    /// Rotor ladder or Fock cutoff for --space rotor1|rotor2|cv.
    #[arg(long, default_value_t = 20)]
    cutoff: usize,
    /// Rotor flux, a real number or "golden".
    #[arg(long, default_value = "golden")]
    phi: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpaceArg {
    Dv,
    Rotor1,
    Rotor2,
    Cv,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    input: Input,
    /// Only the k lowest eigenvalues; required past the dense limit.
    #[arg(long)]
    k: Option<usize>,
    /// Seed for the iterative solver.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Largest Hilbert-space dimension to build.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    /// Comma-separated N values.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
    sweep: Vec<u32>,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum LimitKindArg {
    Cv,
    Rotor1,
    Rotor2,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    kind: LimitKindArg,
    /// Length scale for rotor input; defaults to 2 pi / phi of the input.
    #[arg(long)]
    length_scale: Option<f64>,
    /// Write the limit report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CheckArg {
    All,
    Kinematics,
    Models,
    Degeneracy,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FaultArg {
    Fourier,
    Exponent,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "all")]
    check: CheckArg,
    /// Eigenvalues requested from the sparse solver for degeneracy checks.
    #[arg(long, default_value_t = 12)]
    k: usize,
    /// Negative control: corrupt the input of one check.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WignerArgs {
    /// Odd qudit dimension for a discrete Wigner function.
    #[arg(long = "N", conflicts_with = "cv")]
    n: Option<u32>,
    /// Oscillator Wigner function with this Fock cutoff.
    #[arg(long)]
    cv: Option<usize>,
    /// basis:<s>, mixed, random:<seed> (DV); vacuum, fock:<n> (CV).
    #[arg(long, default_value = "basis:0")]
    state: String,
    /// CV grid range in both quadratures.
    #[arg(long, value_delimiter = ',', default_value = "-2,2", allow_hyphen_values = true)]
    range: Vec<f64>,
    /// CV grid points per axis.
    #[arg(long, default_value_t = 11)]
    points: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Capacity(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Capacity(m) | CliError::Verification(m) => m,
        }
    }
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e: Error = e.into();
        if e.is_capacity() {
            CliError::Capacity(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Spectrum(a) => spectrum(a),
        Cmd::Converge(a) => converge(a),
        Cmd::Limit(a) => limit(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Wigner(a) => wigner(a),
        Cmd::Build(a) => build(a),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_phi(s: &str) -> Result<f64> {
    if s == "golden" {
        return Ok(GOLDEN_PHI);
    }
    phasekit::dsl::parse_real(s).ok_or_else(|| CliError::Usage(format!("cannot parse phi '{s}'")))
}

fn model_spec(input: &Input) -> Result<ModelSpec> {
    let name = input.model.as_deref().ok_or_else(|| CliError::Usage("--model is required here".into()))?;
    let kind: ModelKind = name.parse().map_err(|e: models::ModelError| CliError::Usage(e.to_string()))?;
    let mut spec = ModelSpec::new(kind);
    let usage = |e: models::ModelError| CliError::Usage(e.to_string());
    if let Some(n) = input.n {
        spec.set("N", &n.to_string()).map_err(usage)?;
    }
    if let Some(l) = input.size {
        spec.set("size", &l.to_string()).map_err(usage)?;
    }
    for kv in &input.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("parameter '{kv}' is not key=value")))?;
        spec.set(k.trim(), v.trim()).map_err(usage)?;
    }
    let phi = parse_phi(&input.phi)?;
    spec.space = match input.space {
        SpaceArg::Dv => SpaceChoice::Dv,
        SpaceArg::Rotor1 | SpaceArg::Rotor2 => SpaceChoice::Rotor {
            variant: if input.space == SpaceArg::Rotor1 { RotorVariant::One } else { RotorVariant::Two },
            cutoff: input.cutoff,
            phi,
        },
        SpaceArg::Cv => SpaceChoice::Cv { cutoff: input.cutoff },
    };
    Ok(spec)
}

fn load(input: &Input) -> Result<HamiltonianExpr> {
    match (&input.model, &input.file) {
        (Some(_), None) => Ok(models::build(&model_spec(input)?)?),
        (None, Some(path)) => {
            if !input.params.is_empty() || input.n.is_some() || input.size.is_some() {
                return Err(CliError::Usage("model parameters cannot be combined with --file".into()));
            }
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let (expr, warnings) = parse_with_warnings(&text).map_err(|d| {
                CliError::Input(format!("{}:\n{d}", path.display()))
            })?;
            for w in warnings {
                eprintln!("{}: {w}", path.display());
            }
            Ok(expr)
        }
        _ => Err(CliError::Usage("exactly one of --model or --file is required".into())),
    }
}

fn spectrum(a: SpectrumArgs) -> Result<()> {
    let expr = load(&a.input)?;
    let h = expr.realize_capped(a.max_dim)?;
    let eigs = match a.k {
        Some(k) => eig_lowest(&h, k, a.seed)?.eigenvalues,
        None if h.dim() <= DENSE_MAX_DIM => eig_hermitian(&h)?.eigenvalues,
        None => {
            return Err(CliError::Capacity(format!(
                "dimension {} exceeds the dense limit {DENSE_MAX_DIM}; pass --k for the sparse solver",
                h.dim()
            )))
        }
    };
    let mut out = String::from("index,eigenvalue\n");
    for (i, e) in eigs.iter().enumerate() {
        writeln!(out, "{i},{e:.16e}").unwrap();
    }
    emit(&a.output, &out)
}

fn converge(a: ConvergeArgs) -> Result<()> {
    let study = analysis::harper_convergence(&a.sweep, a.levels).map_err(|e| CliError::Usage(e.to_string()))?;
    eprintln!("note: {}", study.note);
    emit(&a.output, &study.to_csv())
}

fn limit(a: LimitArgs) -> Result<()> {
    let expr = load(&a.input)?;
    let (text, report) = match (a.kind, expr.space) {
        (LimitKindArg::Cv, PhaseSpace::Dv { .. }) => {
            let (q, r) = dv_to_cv(&expr)?;
            (q.to_json(), Some(r))
        }
        (LimitKindArg::Cv, PhaseSpace::Rotor { phi, .. }) => {
            let length = a.length_scale.unwrap_or(2.0 * std::f64::consts::PI / phi);
            let (q, r) = rotor_to_cv(&expr, length)?;
            (q.to_json(), Some(r))
        }
        (LimitKindArg::Rotor1 | LimitKindArg::Rotor2, PhaseSpace::Dv { .. }) => {
            let variant = if a.kind == LimitKindArg::Rotor1 { RotorVariant::One } else { RotorVariant::Two };
            let phi = parse_phi(&a.input.phi)?;
            (serialize(&dv_to_rotor(&expr, variant, phi, a.input.cutoff)?), None)
        }
        (_, space) => {
            return Err(CliError::Input(format!("no {:?} limit from a {} expression", a.kind, space.kind_name())));
        }
    };
    if let (Some(path), Some(r)) = (&a.report, report) {
        fs::write(path, r.to_string()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    emit(&a.output, &text)
}

fn verify(a: VerifyArgs) -> Result<()> {
    let fault = a.inject_fault.map(|f| match f {
        FaultArg::Fourier => Fault::CorruptFourier,
        FaultArg::Exponent => Fault::FlipExponent,
    });
    let mut report = VerificationReport::default();
    match a.check {
        CheckArg::Degeneracy => {
            let spec = model_spec(&a.input)?;
            let count = models::ground_degeneracy(&spec, Some(a.k))?;
            let expected = match spec.kind {
                ModelKind::Toric => Some((spec.params.n * spec.params.n) as usize),
                _ => None,
            };
            report.checks.push(analysis::Check {
                name: format!("ground_degeneracy[{} N={}]", spec.kind, spec.params.n),
                passed: expected.is_none_or(|e| e == count),
                measured: count as f64,
                tolerance: 0.0,
                anchor: "ground multiplicity at 1e-6 relative width",
            });
        }
        CheckArg::All | CheckArg::Kinematics | CheckArg::Models => {
            if a.check != CheckArg::Models {
                let opts = VerifyOptions {
                    fault,
                    ..VerifyOptions::default()
                };
                report.extend(analysis::verify_kinematics(&opts)?);
            }
            if a.check != CheckArg::Kinematics {
                report.extend(analysis::verify_models(fault)?);
            }
        }
    }
    emit(&a.output, &report.to_json())?;
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(format!("failed checks: {}", names.join(", "))))
    }
}

fn wigner(a: WignerArgs) -> Result<()> {
    let mut out = String::new();
    match (a.n, a.cv) {
        (Some(n), None) => {
            let rho = dv_state(n, &a.state)?;
            out.push_str("S,M,W\n");
            for (s, m, w) in dv_wigner_grid(&rho)? {
                writeln!(out, "{s},{m},{w:.16e}").unwrap();
            }
        }
        (None, Some(cutoff)) => {
            let rho = cv_state(cutoff, &a.state)?;
            let [lo, hi] = a.range[..] else {
                return Err(CliError::Usage("--range takes two values".into()));
            };
            if a.points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let step = (hi - lo) / (a.points - 1) as f64;
            out.push_str("X,P,W\n");
            let mut worst: f64 = 0.0;
            for i in 0..a.points {
                for j in 0..a.points {
                    let (x, p) = (lo + i as f64 * step, lo + j as f64 * step);
                    let w = cv_wigner(&rho, x, p)?;
                    worst = worst.max(w.truncation_weight);
                    writeln!(out, "{x:.16e},{p:.16e},{:.16e}", w.value).unwrap();
                }
            }
            if worst > 1e-6 {
                eprintln!("warning: cutoff {cutoff} leaves weight {worst:.3e} near the top of the ladder; raise --cv");
            }
        }
        _ => return Err(CliError::Usage("pass exactly one of --N or --cv".into())),
    }
    emit(&a.output, &out)
}

fn dv_state(n: u32, state: &str) -> Result<DensityMatrix> {
    if n.is_multiple_of(2) {
        return Err(CliError::Input(format!(
            "the discrete Wigner function needs odd N, got N={n}: even N has no well-defined phase-point midpoints"
        )));
    }
    let dim = n as usize;
    let bad = || CliError::Usage(format!("unknown state '{state}'"));
    let rho = match state.split_once(':') {
        Some(("basis", s)) => {
            let s: i64 = s.parse().map_err(|_| bad())?;
            DensityMatrix::basis_state(dim, s.rem_euclid(n as i64) as usize)?
        }
        Some(("random", seed)) => analysis::random_density(dim, seed.parse().map_err(|_| bad())?)?,
        None if state == "mixed" => DensityMatrix::maximally_mixed(dim)?,
        _ => return Err(bad()),
    };
    Ok(rho)
}

fn cv_state(cutoff: usize, state: &str) -> Result<DensityMatrix> {
    let bad = || CliError::Usage(format!("unknown state '{state}'"));
    let n = match state.split_once(':') {
        Some(("fock", k)) => k.parse::<usize>().map_err(|_| bad())?,
        None if state == "vacuum" => 0,
        _ => return Err(bad()),
    };
    if n > cutoff {
        return Err(CliError::Input(format!("Fock state {n} lies above the cutoff {cutoff}")));
    }
    let mut psi = vec![C64::new(0.0, 0.0); cutoff + 1];
    psi[n] = C64::new(1.0, 0.0);
    Ok(DensityMatrix::pure(&psi)?)
}

fn build(a: BuildArgs) -> Result<()> {
    let spec = model_spec(&a.input)?;
    emit(&a.output, &serialize(&models::build(&spec)?))
}
