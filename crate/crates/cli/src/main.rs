//! `skewsharp` command-line front end.
//!
//! Exit codes: 0 when every requested relation holds or saturates, 1 when one
//! is violated, 2 on any input or parameter error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use skewsharp_core::fuzz::{run_fuzz, strength_study, FuzzConfig, RankChoice};
use skewsharp_core::gaussian::{
    exact_moments, fock_truncate_thermal, nongaussianity, to_quadrature, QuadraticHamiltonian, MIN_CUTOFF,
};
use skewsharp_core::gcov::{big_f_curve, lambda_f, MonotoneFunction};
use skewsharp_core::io::{from_json, to_json, InputEcho, ObservablesFile, ReportFile, SplitMatrix, StateFile};
use skewsharp_core::relations::{evaluate, RelationSet};
use skewsharp_core::{Tolerances, Verdict};

const TOL_ENV: &str = "SKEWSHARP_TOL";

#[derive(Parser)]
#[command(name = "skewsharp", version, about = "Uncertainty relations with Wigner-Yanase skew information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate uncertainty relations for a state and a set of observables.
    Check(CheckArgs),
    /// Compute lambda_f for a monotone function.
    Lambda(LambdaArgs),
    /// Compare exact and Fock-space moments of a Gaussian thermal state.
    Gaussian(GaussianArgs),
    /// Print the non-Gaussianity measure of a Fock-space state.
    Nongauss(NongaussArgs),
    /// Run randomized relation checks.
    Fuzz(FuzzArgs),
    /// Compare the strength of the two-observable bounds on random instances.
    Strength(StrengthArgs),
}

#[derive(Args)]
struct CheckArgs {
    state: PathBuf,
    observables: PathBuf,
    /// Monotone function label for eq16, eq18, eq19 and wy-strongest.
    #[arg(long)]
    f: Vec<String>,
    /// Also check the two-observable relations (needs exactly two observables).
    #[arg(long)]
    two_obs: bool,
    /// Relation ids or groups; overrides the default selection.
    #[arg(long, value_delimiter = ',')]
    relations: Vec<String>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Violation tolerance (relative).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long)]
    f: String,
    /// Write `x,F(x)` samples on a log grid to this CSV file.
    #[arg(long)]
    grid_dump: Option<PathBuf>,
    #[arg(long, default_value_t = 401)]
    grid_points: usize,
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, default_value_t = 1)]
    modes: usize,
    /// Mode frequencies, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    omega: Vec<f64>,
    /// Squeezing per mode, complex such as `0.3+0.1i`, comma separated.
    #[arg(long, value_delimiter = ',')]
    xi: Vec<Complex64>,
    /// Beam-splitter coupling between two modes.
    #[arg(long, default_value = "0")]
    coupling: Complex64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    /// Allowed |Delta_G| for the exact moments (relative to |sigma+c||sigma-c|).
    #[arg(long, default_value_t = 1e-10)]
    tol_exact: f64,
    /// Allowed |Delta_G| for the Fock-space moments, on top of the tail mass.
    #[arg(long, default_value_t = 1e-6)]
    tol_numeric: f64,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct NongaussArgs {
    state: PathBuf,
    #[arg(long, default_value_t = 1)]
    modes: usize,
    #[arg(long)]
    cutoff: usize,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    n_obs: Vec<usize>,
    /// `1`, `full` or a fixed rank.
    #[arg(long, value_delimiter = ',', default_value = "1,full")]
    ranks: Vec<RankChoice>,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    relations: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "wy,sld,wyd:0.3")]
    f: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "sld")]
    wy_strongest: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 16)]
    max_reproducers: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Write each reproducer as its own JSON file into this directory.
    #[arg(long)]
    reproducer_dir: Option<PathBuf>,
}

#[derive(Args)]
struct StrengthArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "wy,sld,wyd:0.3")]
    f: Vec<String>,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

/// Failure carrying the exit code.
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(2, e.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Lambda(a) => cmd_lambda(a),
        Command::Gaussian(a) => cmd_gaussian(a),
        Command::Nongauss(a) => cmd_nongauss(a),
        Command::Fuzz(a) => cmd_fuzz(a),
        Command::Strength(a) => cmd_strength(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn tolerances(flag: Option<f64>) -> Result<Tolerances, Fail> {
    let ineq = match (flag, std::env::var(TOL_ENV)) {
        (Some(t), _) => t,
        (None, Ok(v)) => v.trim().parse::<f64>().map_err(|_| Fail(2, format!("{TOL_ENV}=`{v}` is not a number")))?,
        (None, Err(_)) => Tolerances::DEFAULT.ineq,
    };
    if !(ineq > 0.0 && ineq.is_finite()) {
        return Err(Fail(2, format!("tolerance {ineq} must be positive and finite")));
    }
    Ok(Tolerances::DEFAULT.with_ineq(ineq))
}

fn read(path: &Path) -> Result<(String, String), Fail> {
    let bytes = fs::read(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| Fail(2, format!("{}: not UTF-8", path.display())))?;
    Ok((text, hash))
}

fn parse_file<T: for<'de> serde::Deserialize<'de>>(path: &Path, text: &str) -> Result<T, Fail> {
    from_json(text).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Fail> {
    fs::write(path, to_json(value) + "\n").map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn fmt_margin(v: Option<f64>) -> String {
    v.map_or_else(|| "vacuous".to_string(), |x| format!("{x:.6e}"))
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let tol = tolerances(a.tol)?;
    let (state_text, state_hash) = read(&a.state)?;
    let (obs_text, obs_hash) = read(&a.observables)?;
    let state: StateFile = parse_file(&a.state, &state_text)?;
    let obs: ObservablesFile = parse_file(&a.observables, &obs_text)?;
    let rho = state.to_density().map_err(|e| Fail(2, format!("state {}: {e}", a.state.display())))?;
    let x = obs.to_set().map_err(|e| Fail(2, format!("observables {}: {e}", a.observables.display())))?;
    if x.dim() != rho.dim() {
        return Err(Fail(2, format!("dimension mismatch: state has dim {}, observables have dim {}", rho.dim(), x.dim())));
    }
    if a.two_obs && x.len() != 2 {
        return Err(Fail(2, format!("--two-obs needs exactly 2 observables, got {}", x.len())));
    }
    let mut tokens = a.relations.clone();
    if tokens.is_empty() {
        tokens = vec!["rs".into(), "refined".into(), "weak-chain".into(), "g-psd".into()];
        if a.two_obs {
            tokens.push("two-obs".into());
        }
        if !a.f.is_empty() {
            tokens.extend(["eq18".into(), "eq19".into(), "wy-strongest".into()]);
        }
    }
    let set = RelationSet::parse(&tokens, &a.f, &a.f)?;
    let ev = evaluate(&rho, &x, &set, &tol)?;
    let echo = InputEcho {
        state,
        observables: obs,
        state_sha256: Some(state_hash),
        observables_sha256: Some(obs_hash),
    };
    let f_label = (!a.f.is_empty()).then(|| a.f.join(","));
    let report = ReportFile::new(&ev, echo, &tol, f_label);

    println!("dim={} observables={} rank_l={} delta_g={:.6e}", rho.dim(), x.len(), report.rank_l, report.delta_g);
    for (k, m) in &report.margins {
        let verdict = match m.verdict {
            Verdict::Holds => "holds",
            Verdict::Saturated => "saturated",
            Verdict::Violated => "VIOLATED",
        };
        println!("{k:<22} {verdict:<10} margin={}", fmt_margin(m.value));
    }
    for (k, why) in &report.skipped {
        println!("{k:<22} skipped    {why}");
    }
    if let Some(path) = &a.json_out {
        write_json(path, &report)?;
    }
    Ok(if report.any_violated() { 1 } else { 0 })
}

fn cmd_lambda(a: LambdaArgs) -> Outcome {
    let f = MonotoneFunction::from_label(&a.f)?;
    let r = lambda_f(&f);
    println!("lambda={} lower={} upper={} conjecture_match={}", r.lambda, r.lower_bound, r.upper_bound, r.conjecture_match);
    if let Some(path) = &a.grid_dump {
        if a.grid_points < 2 {
            return Err(Fail(2, "--grid-points must be at least 2".into()));
        }
        let mut csv = String::from("x,F\n");
        for (x, v) in big_f_curve(&f, -8.0, 8.0, a.grid_points) {
            csv.push_str(&format!("{x:e},{v}\n"));
        }
        fs::write(path, csv).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct MomentsOut {
    sigma: SplitMatrix,
    classical: SplitMatrix,
    skew: SplitMatrix,
    delta: SplitMatrix,
    delta_g: f64,
}

#[derive(Serialize)]
struct GaussianReport {
    tool: &'static str,
    version: &'static str,
    modes: usize,
    beta: f64,
    cutoff: usize,
    generator: SplitMatrix,
    exact: MomentsOut,
    numeric: MomentsOut,
    exact_condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
    tail_mass: f64,
    exact_ok: bool,
    numeric_ok: bool,
}

fn build_hamiltonian(a: &GaussianArgs) -> Result<QuadraticHamiltonian, Fail> {
    let zero = Complex64::new(0.0, 0.0);
    let per_mode = |v: &[Complex64]| -> Result<Vec<Complex64>, Fail> {
        match v.len() {
            0 => Ok(vec![zero; a.modes]),
            1 => Ok(vec![v[0]; a.modes]),
            n if n == a.modes => Ok(v.to_vec()),
            n => Err(Fail(2, format!("expected 1 or {} values per mode, got {n}", a.modes))),
        }
    };
    let omega: Vec<Complex64> = a.omega.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let omega: Vec<f64> = per_mode(&omega)?.iter().map(|z| z.re).collect();
    let xi = per_mode(&a.xi)?;
    Ok(match a.modes {
        1 => {
            if a.coupling != zero {
                return Err(Fail(2, "--coupling needs two modes".into()));
            }
            QuadraticHamiltonian::single_mode(omega[0], xi[0], a.beta)?
        }
        2 => QuadraticHamiltonian::two_mode([omega[0], omega[1]], [xi[0], xi[1]], a.coupling, a.beta)?,
        n => return Err(Fail(2, format!("Fock-space comparison supports 1 or 2 modes, got {n}"))),
    })
}

fn cmd_gaussian(a: GaussianArgs) -> Outcome {
    if a.cutoff < MIN_CUTOFF {
        return Err(Fail(2, format!("cutoff {} is below the minimum {MIN_CUTOFF}", a.cutoff)));
    }
    let h = build_hamiltonian(&a)?;
    let exact = to_quadrature(&exact_moments(&h)?)?;
    let fock = fock_truncate_thermal(&h, a.cutoff)?;
    let x = skewsharp_core::gaussian::quadrature_observables(h.n_modes(), a.cutoff)?;
    let num = skewsharp_core::skew::check_refined_rs(&fock.rho, &x)?;

    let exact_scale = {
        let plus = (&exact.sigma + &exact.classical).determinant().norm();
        let minus = exact.skew().determinant().norm();
        (plus * minus).max(1.0)
    };
    let exact_dg = exact.delta_g();
    let numeric_dg = nongaussianity(&fock.rho, h.n_modes(), a.cutoff)?;
    let exact_ok = exact_dg.abs() <= a.tol_exact * exact_scale;
    let numeric_ok = numeric_dg.abs() <= a.tol_numeric + fock.tail_mass;

    println!("modes={} beta={} cutoff={}", h.n_modes(), h.beta(), a.cutoff);
    println!("delta_g_exact={exact_dg:.6e} ({})", if exact_ok { "ok" } else { "FAIL" });
    println!("delta_g_numeric={numeric_dg:.6e} ({})", if numeric_ok { "ok" } else { "FAIL" });
    println!("tail_mass={:.3e}", fock.tail_mass);
    if let Some(w) = &exact.warning {
        println!("warning: {w}");
    }

    if let Some(path) = &a.json_out {
        let report = GaussianReport {
            tool: "skewsharp",
            version: env!("CARGO_PKG_VERSION"),
            modes: h.n_modes(),
            beta: h.beta(),
            cutoff: a.cutoff,
            generator: SplitMatrix::from_complex(h.s()),
            exact: MomentsOut {
                sigma: SplitMatrix::from_complex(&exact.sigma),
                classical: SplitMatrix::from_complex(&exact.classical),
                skew: SplitMatrix::from_complex(&exact.skew()),
                delta: SplitMatrix::from_complex(&exact.delta),
                delta_g: exact_dg,
            },
            numeric: MomentsOut {
                sigma: SplitMatrix::from_real(&num.sigma),
                classical: SplitMatrix::from_real(&num.classical),
                skew: SplitMatrix::from_real(&num.skew),
                delta: SplitMatrix::from_real(&num.delta),
                delta_g: numeric_dg,
            },
            exact_condition: exact.condition,
            warning: exact.warning.clone(),
            tail_mass: fock.tail_mass,
            exact_ok,
            numeric_ok,
        };
        write_json(path, &report)?;
    }
    Ok(if exact_ok && numeric_ok { 0 } else { 1 })
}

fn cmd_nongauss(a: NongaussArgs) -> Outcome {
    let (text, _) = read(&a.state)?;
    let state: StateFile = parse_file(&a.state, &text)?;
    let rho = state.to_density().map_err(|e| Fail(2, format!("state {}: {e}", a.state.display())))?;
    let dg = nongaussianity(&rho, a.modes, a.cutoff)?;
    println!("{dg:.12}");
    Ok(0)
}

fn cmd_fuzz(a: FuzzArgs) -> Outcome {
    let tol = tolerances(a.tol)?;
    let config = FuzzConfig {
        dims: a.dims,
        n_obs: a.n_obs,
        ranks: a.ranks,
        trials: a.trials,
        seed: a.seed,
        relations: a.relations,
        f: a.f,
        wy_strongest: a.wy_strongest,
        tol_ineq: tol.ineq,
        max_reproducers: a.max_reproducers,
        threads: a.threads,
    };
    let stats = run_fuzz(&config)?;
    println!("seed={} trials={} errors={} violations={}", config.seed, config.trials, stats.errors, stats.total_violations());
    for (k, s) in &stats.relations {
        let min = s.min_margin.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        println!("{k:<22} checked={:<7} violations={:<5} vacuous={:<6} min_margin={min}", s.trials, s.violations, s.vacuous);
    }
    if let Some(path) = &a.json_out {
        write_json(path, &stats)?;
    }
    if let Some(dir) = &a.reproducer_dir {
        fs::create_dir_all(dir).map_err(|e| Fail(2, format!("{}: {e}", dir.display())))?;
        for (i, r) in stats.reproducers.iter().enumerate() {
            let tag = r.f.as_deref().map(|f| format!("-{}", f.replace(':', "_"))).unwrap_or_default();
            write_json(&dir.join(format!("{i:03}-trial{}-{}{tag}.json", r.trial, r.relation)), r)?;
        }
    }
    Ok(if stats.passed() { 0 } else { 1 })
}

fn cmd_strength(a: StrengthArgs) -> Outcome {
    let config = FuzzConfig {
        dims: a.dims,
        n_obs: vec![2],
        trials: a.trials,
        seed: a.seed,
        f: a.f,
        ..FuzzConfig::default()
    };
    let study = strength_study(&config)?;
    println!("rows={}", study.rows.len());
    println!("refined stricter than rs: {:.1}%", 100.0 * study.refined_stricter_than_rs);
    println!("eq9a stricter than refined: {:.1}%", 100.0 * study.eq9a_stricter_than_refined);
    println!("provable ordering failures={}", study.provable_failures);
    println!("wy-strongest ordering failures={}", study.wy_strongest_failures);
    if let Some(path) = &a.json_out {
        write_json(path, &study)?;
    }
    Ok(if study.provable_failures == 0 && study.wy_strongest_failures == 0 { 0 } else { 1 })
}
