//! Acceptance criteria 1 to 10. Runs as a plain binary so that every verdict
//! line is printed; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use skewsharp_core::fixtures::q1;
use skewsharp_core::fuzz::{random_density, random_observables, run_fuzz, trial_rng, FuzzConfig, RankChoice};
use skewsharp_core::gaussian::{
    exact_moments, fock_state, fock_truncate_thermal, generator_from_covariance, nongaussianity,
    quadrature_observables, to_quadrature, QuadraticHamiltonian,
};
use skewsharp_core::gcov::{
    alpha_inequality_check, check_metric_adjusted, g_covariance, lambda_f, log_grid, BivariateKernel,
    MonotoneFunction,
};
use skewsharp_core::linalg::max_abs;
use skewsharp_core::skew::{check_refined_rs, commutator_matrix, covariance_matrix, two_obs_from_report, wy_skew_matrix};
use skewsharp_core::{DensityMatrix, RMatrix, Tolerances};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

fn diag_err(m: &RMatrix, v: f64) -> f64 {
    let mut e = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let want = if i == j { v } else { 0.0 };
            e = e.max((m[(i, j)] - want).abs());
        }
    }
    e
}

fn criterion1() -> Outcome {
    let (rho, x) = q1();
    let tol = Tolerances::DEFAULT;
    // warm-up
    let _ = check_refined_rs(&rho, &x).and_then(|r| two_obs_from_report(&r, &tol));
    let start = Instant::now();
    let report = check_refined_rs(&rho, &x).unwrap();
    let two = two_obs_from_report(&report, &tol).unwrap();
    let elapsed = start.elapsed();

    // σ = I₂ and ⟨[σx, σy]⟩/2i = ⟨σz⟩ = 1/2, so |δ|² = (1/2)⁴
    let want = 0.5_f64.powi(4);
    let d = &report.dets;
    let lhs = d.sigma_plus_c * d.sigma_minus_c;
    let rhs = d.delta * d.delta;
    let ok_values = (lhs - want).abs() <= 1e-10 && (rhs - want).abs() <= 1e-10;
    let sat = [report.margins.eq3, two.eq9a, two.eq9b[0], two.eq9b[1], two.furuichi];
    let ok_sat = sat.iter().all(|m| !m.is_vacuous() && m.value.abs() <= 1e-10);
    let ok_time = elapsed < Duration::from_millis(1);
    outcome(
        ok_values && ok_sat && ok_time,
        format!(
            "|s+c||s-c|={lhs:.3e} |d|^2={rhs:.3e} max|margin|={:.1e} time={:?}",
            sat.iter().map(|m| m.value.abs()).fold(0.0, f64::max),
            elapsed
        ),
    )
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let q = 0.25_f64;
    let cutoff = 60;
    let h = QuadraticHamiltonian::single_mode(1.0, Complex64::new(0.0, 0.0), -q.ln()).unwrap();
    let fock = fock_truncate_thermal(&h, cutoff).unwrap();
    let x = quadrature_observables(1, cutoff).unwrap();
    let r = check_refined_rs(&fock.rho, &x).unwrap();

    // Boltzmann weights p_n = (1−q)qⁿ: σ_x = Σ p_n (n + ½),
    // I_x = Σ_n (n+1)/2 · (√p_n − √p_{n+1})², c = σ − I
    let p: Vec<f64> = (0..400).map(|n| (1.0 - q) * q.powi(n)).collect();
    let sigma_o: f64 = p.iter().enumerate().map(|(n, pn)| pn * (n as f64 + 0.5)).sum();
    let skew_o: f64 =
        (0..399).map(|n| (n as f64 + 1.0) / 2.0 * (p[n].sqrt() - p[n + 1].sqrt()).powi(2)).sum();
    let class_o = sigma_o - skew_o;
    let closed = [(5.0 / 6.0, sigma_o), (1.0 / 6.0, skew_o), (2.0 / 3.0, class_o)];
    let ok_oracle = closed.iter().all(|(a, b)| (a - b).abs() < 1e-12);
    let errs = [diag_err(&r.sigma, 5.0 / 6.0), diag_err(&r.skew, 1.0 / 6.0), diag_err(&r.classical, 2.0 / 3.0)];
    let ok_entries = errs.iter().all(|&e| e <= 1e-6);

    let exact = to_quadrature(&exact_moments(&h).unwrap()).unwrap().delta_g();
    let numeric = nongaussianity(&fock.rho, 1, cutoff).unwrap();
    let elapsed = start.elapsed();
    let pass = ok_oracle && ok_entries && exact.abs() <= 1e-10 && numeric.abs() <= 1e-6 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "entry err (s,I,c)=({:.1e},{:.1e},{:.1e}) dG exact={exact:.1e} fock={numeric:.1e} tail={:.1e} time={elapsed:?}",
            errs[0], errs[1], errs[2], fock.tail_mass
        ),
    )
}

fn criterion3() -> Outcome {
    // |1⟩: σ = diag(3/2, 3/2), c = 0, δ = J/2, so Δ_G = (9/4)² − (1/4)²
    let want = 2.25_f64.powi(2) - 0.25_f64.powi(2);
    let mut worst = 0.0_f64;
    for cutoff in [20, 24, 40] {
        let rho = fock_state(cutoff, 1).unwrap();
        worst = worst.max((nongaussianity(&rho, 1, cutoff).unwrap() - want).abs());
    }
    outcome(worst <= 1e-8 && (want - 5.0).abs() < 1e-15, format!("max |dG - 5| over cutoffs 20,24,40 = {worst:.1e}"))
}

fn criterion4() -> Outcome {
    let mut pass = true;
    let mut slowest = Duration::ZERO;
    let mut notes = Vec::new();
    let sld = lambda_f(&MonotoneFunction::sld());
    pass &= (sld.lambda - 0.5).abs() <= 1e-9;
    notes.push(format!("sld={:.12}", sld.lambda));
    for alpha in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let f = MonotoneFunction::wyd(alpha).unwrap();
        let r = lambda_f(&f);
        pass &= (r.lambda - 1.0).abs() <= 1e-6;
        notes.push(format!("{}={:.9}", f.label(), r.lambda));
    }
    let mut catalog = vec![MonotoneFunction::sld(), MonotoneFunction::wy()];
    catalog.extend((1..10).map(|k| MonotoneFunction::wyd(0.05 * k as f64).unwrap()));
    for f in &catalog {
        let start = Instant::now();
        let r = lambda_f(f);
        slowest = slowest.max(start.elapsed());
        let lower = 1.0 - f.f0();
        let upper = (1.0 / (4.0 * f.f0())).min(1.0);
        pass &= lower - 1e-9 <= r.lambda && r.lambda <= upper + 1e-9;
    }
    pass &= slowest < Duration::from_secs(1);
    outcome(pass, format!("{} bounds ok for {} members, slowest={slowest:?}", notes.join(" "), catalog.len()))
}

fn criterion5() -> Outcome {
    let relations = [
        "eq1", "eq3", "eq4a", "eq4b", "eq7-psd", "eq8-schur", "eq9a", "eq9b", "eq10", "furuichi", "eq16", "eq17",
        "eq18", "eq19", "wy-strongest",
    ];
    let config = FuzzConfig {
        dims: (2..=6).collect(),
        n_obs: vec![1, 2, 3, 4],
        ranks: vec![RankChoice::One, RankChoice::Full],
        trials: 10_000,
        seed: 42,
        relations: relations.iter().map(|s| s.to_string()).collect(),
        f: vec!["wy".into(), "sld".into(), "wyd:0.3".into()],
        wy_strongest: vec!["sld".into()],
        tol_ineq: 1e-8,
        max_reproducers: 16,
        threads: Some(1),
    };
    let start = Instant::now();
    let single = run_fuzz(&config).unwrap();
    let elapsed = start.elapsed();
    let parallel = run_fuzz(&FuzzConfig { threads: None, ..config.clone() }).unwrap();
    let deterministic = serde_json::to_string(&single).unwrap() == serde_json::to_string(&parallel).unwrap();
    let checked: u64 = single.relations.values().map(|s| s.trials).sum();
    let pass = single.passed() && deterministic && elapsed < Duration::from_secs(600);
    let first = single.reproducers.first().map(|r| format!(" first failure: {} trial {}", r.relation, r.trial));
    outcome(
        pass,
        format!(
            "violations={} errors={} margins checked={checked} deterministic={deterministic} single-thread time={elapsed:.1?}{}",
            single.total_violations(),
            single.errors,
            first.unwrap_or_default()
        ),
    )
}

fn criterion6() -> Outcome {
    let mut worst_c = 0.0_f64;
    let mut worst_rel = 0.0_f64;
    for t in 0..1000u64 {
        let mut rng = trial_rng(6, t);
        let dim = rng.random_range(2..=6);
        let n = rng.random_range(1..=4);
        let rho = random_density(dim, 1, &mut rng).unwrap();
        let x = random_observables(dim, n, &mut rng).unwrap();
        let r = check_refined_rs(&rho, &x).unwrap();
        worst_c = worst_c.max(max_abs_real(&r.classical));
        let d = &r.dets;
        let refined = d.sigma_plus_c * d.sigma_minus_c;
        let rs2 = d.sigma * d.sigma;
        worst_rel = worst_rel.max((refined - rs2).abs() / rs2.max(1.0));
    }
    outcome(worst_c <= 1e-8 && worst_rel <= 1e-8, format!("max|c|={worst_c:.1e} max rel gap to |s|^2={worst_rel:.1e}"))
}

fn classical_root(rho: &DensityMatrix, x: &skewsharp_core::ObservableSet) -> f64 {
    let r = check_refined_rs(rho, x).unwrap();
    r.dets.classical.max(0.0).powf(1.0 / x.len() as f64)
}

fn criterion7() -> Outcome {
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for t in 0..1000u64 {
        let mut rng = trial_rng(7, t);
        let dim = rng.random_range(2..=5);
        let n = rng.random_range(1..=3);
        let r1 = rng.random_range(1..=dim);
        let r2 = rng.random_range(1..=dim);
        let a = random_density(dim, r1, &mut rng).unwrap();
        let b = random_density(dim, r2, &mut rng).unwrap();
        let x = random_observables(dim, n, &mut rng).unwrap();
        let w: f64 = rng.random_range(0.0..1.0);
        let mix = DensityMatrix::mix(w, &a, &b).unwrap();
        let gap = classical_root(&mix, &x) - (w * classical_root(&a, &x) + (1.0 - w) * classical_root(&b, &x));
        worst = worst.min(gap);
        if gap < -1e-9 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("failures={failures} smallest concavity gap={worst:.2e}"))
}

fn criterion8() -> Outcome {
    let mut worst_sat = 0.0_f64;
    let mut worst_round = 0.0_f64;
    for t in 0..100u64 {
        let mut rng = trial_rng(8, t);
        let n = 1 + (t % 3) as usize;
        let beta = rng.random_range(0.5..2.0);
        let h = QuadraticHamiltonian::random_admissible(n, beta, &mut rng).unwrap();
        let m = exact_moments(&h).unwrap();
        worst_sat = worst_sat.max(m.delta_g().abs());
        let back = generator_from_covariance(&m.correlation, n).unwrap();
        let m2 = exact_moments(&back).unwrap();
        worst_round = worst_round.max(max_abs(&(&m2.correlation - &m.correlation)));
    }
    outcome(
        worst_sat <= 1e-10 && worst_round <= 1e-6,
        format!("max|dG|={worst_sat:.1e} max round-trip |C' - C|={worst_round:.1e}"),
    )
}

fn criterion9() -> Outcome {
    let mut worst_red = 0.0_f64;
    let mut worst_wy = 0.0_f64;
    let wy = MonotoneFunction::wyd(0.5).unwrap();
    for t in 0..100u64 {
        let mut rng = trial_rng(9, t);
        let dim = rng.random_range(2..=6);
        let n = rng.random_range(1..=4);
        let rank = if rng.random_bool(0.5) { 1 } else { dim };
        let rho = random_density(dim, rank, &mut rng).unwrap();
        let x = random_observables(dim, n, &mut rng).unwrap();
        let re = |m: skewsharp_core::CMatrix| m.map(|z| z.re);
        let s = re(g_covariance(&rho, &x, &BivariateKernel::mean()).unwrap());
        let d = re(g_covariance(&rho, &x, &BivariateKernel::eps()).unwrap());
        let i = re(g_covariance(&rho, &x, &BivariateKernel::m_f_star(&wy)).unwrap());
        worst_red = worst_red
            .max(max_abs_real(&(s - covariance_matrix(&rho, &x).unwrap())))
            .max(max_abs_real(&(d - commutator_matrix(&rho, &x).unwrap())))
            .max(max_abs_real(&(i - wy_skew_matrix(&rho, &x).unwrap())));

        // σ(m_f) = (σ + c)/2 for f_{1/2} and 2f(0) = ½, so 2ⁿ·margin18 = margin of the refined relation
        let r = check_refined_rs(&rho, &x).unwrap();
        let ma = check_metric_adjusted(&rho, &x, &wy).unwrap();
        let scale = r.margins.eq3.scale.max(1.0);
        let m18 = ma.margin18.value * 2f64.powi(n as i32);
        worst_wy = worst_wy
            .max((m18 - r.margins.eq3.value).abs() / scale)
            .max((ma.margin19.value - r.margins.eq3.value).abs() / scale);
    }
    outcome(
        worst_red <= 1e-10 && worst_wy <= 1e-8,
        format!("max kernel reduction err={worst_red:.1e} max wy vs refined gap={worst_wy:.1e}"),
    )
}

fn criterion10() -> Outcome {
    let grid = log_grid(-8.0, 8.0, 10_000);
    let alphas = [0.1, 0.25, 0.4, 0.5];
    let failures: Vec<f64> = alphas.iter().copied().filter(|&a| !alpha_inequality_check(a, &grid)).collect();
    outcome(failures.is_empty(), format!("grid 1e-8..1e8, {} points, failing alphas {failures:?}", grid.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("qubit saturation fixture", criterion1),
        ("thermal mode closed forms", criterion2),
        ("Fock |1> non-Gaussianity", criterion3),
        ("lambda_f table and bounds", criterion4),
        ("fuzz gate, 10^4 trials", criterion5),
        ("pure states have c = 0", criterion6),
        ("concavity of |c|^(1/n)", criterion7),
        ("Gaussian exact identities", criterion8),
        ("kernel reductions", criterion9),
        ("alpha inequality on log grid", criterion10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {name}: {} [{:.2?}]", k + 1, o.detail, start.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
