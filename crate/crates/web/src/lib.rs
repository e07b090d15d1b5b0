//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string. Failures come
//! back as `{"error": "..."}` so the page never has to catch exceptions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use skewsharp_core::gaussian::{fock_mixture, nongaussianity, MIN_CUTOFF};
use skewsharp_core::gcov::{big_f_curve, lambda_f, MonotoneFunction};
use skewsharp_core::linalg::{c, CMatrix, DensityMatrix, HermitianMatrix};
use skewsharp_core::relations::{evaluate, RelationSet};
use skewsharp_core::{ObservableSet, Tolerances, Verdict};

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&ErrorOut { error }),
    }
    .expect("demo payloads serialize")
}

#[derive(Debug, Serialize)]
pub struct CurveOut {
    pub label: String,
    pub lambda: f64,
    pub argmin_x: f64,
    pub lower: f64,
    pub upper: f64,
    pub conjecture_match: bool,
    pub x: Vec<f64>,
    pub big_f: Vec<f64>,
}

/// `F(x)` on a log grid over `[10^lo, 10^hi]` with `λ_f` and its bounds.
pub fn lambda_curve(label: &str, lo_exp: f64, hi_exp: f64, points: usize) -> Result<CurveOut, String> {
    if !(lo_exp < hi_exp) || !(2..=5000).contains(&points) {
        return Err(format!("need lo < hi and 2..=5000 points, got [{lo_exp}, {hi_exp}] with {points}"));
    }
    let f = MonotoneFunction::from_label(label).map_err(|e| e.to_string())?;
    let r = lambda_f(&f);
    let (x, big_f) = big_f_curve(&f, lo_exp, hi_exp, points).into_iter().unzip();
    Ok(CurveOut {
        label: f.label().to_string(),
        lambda: r.lambda,
        argmin_x: r.argmin_x,
        lower: r.lower_bound,
        upper: r.upper_bound,
        conjecture_match: r.conjecture_match,
        x,
        big_f,
    })
}

#[wasm_bindgen(js_name = lambdaCurve)]
pub fn lambda_curve_js(label: &str, lo_exp: f64, hi_exp: f64, points: usize) -> String {
    respond(lambda_curve(label, lo_exp, hi_exp, points))
}

#[derive(Debug, Serialize)]
pub struct MarginOut {
    pub value: Option<f64>,
    pub relative: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize)]
pub struct QubitOut {
    pub delta_g: f64,
    pub sigma_det: f64,
    pub skew_det: f64,
    pub classical_det: f64,
    pub margins: BTreeMap<String, MarginOut>,
    pub skipped: BTreeMap<String, String>,
}

fn bloch(r: f64, theta: f64, phi: f64) -> [f64; 3] {
    [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()]
}

/// `n·σ` for a Bloch vector `n`.
fn spin(n: [f64; 3]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0)])
}

/// Qubit state with Bloch vector `(r, θ, φ)` and spin observables along
/// `(θ_a, φ_a)` and `(θ_b, φ_b)`. Angles are in degrees.
#[allow(clippy::too_many_arguments)]
pub fn qubit_margins(
    r: f64,
    theta: f64,
    phi: f64,
    a_theta: f64,
    a_phi: f64,
    b_theta: f64,
    b_phi: f64,
    f_label: &str,
) -> Result<QubitOut, String> {
    if !(0.0..=1.0).contains(&r) {
        return Err(format!("Bloch radius {r} outside [0, 1]"));
    }
    let rad = PI / 180.0;
    let v = bloch(r, theta * rad, phi * rad);
    let s = spin(v);
    let rho_m = (CMatrix::identity(2, 2) + s) * Complex64::new(0.5, 0.0);
    let rho = DensityMatrix::new(rho_m).map_err(|e| e.to_string())?;
    let obs = [bloch(1.0, a_theta * rad, a_phi * rad), bloch(1.0, b_theta * rad, b_phi * rad)]
        .into_iter()
        .map(|n| HermitianMatrix::new(spin(n)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let x = ObservableSet::new(obs).map_err(|e| e.to_string())?;
    let labels: Vec<String> = if f_label.is_empty() { vec![] } else { vec![f_label.to_string()] };
    let set = RelationSet::parse(&["all".to_string()], &labels, &labels).map_err(|e| e.to_string())?;
    let tol = Tolerances::DEFAULT;
    let ev = evaluate(&rho, &x, &set, &tol).map_err(|e| e.to_string())?;
    let margins = ev
        .margins
        .iter()
        .map(|(k, m)| {
            let vac = m.is_vacuous();
            let out = MarginOut {
                value: (!vac).then_some(m.value),
                relative: (!vac).then(|| m.relative()),
                verdict: m.verdict(&tol),
            };
            (k.clone(), out)
        })
        .collect();
    let d = &ev.report.dets;
    Ok(QubitOut {
        delta_g: ev.report.delta_g,
        sigma_det: d.sigma,
        skew_det: d.skew,
        classical_det: d.classical,
        margins,
        skipped: ev.skipped,
    })
}

#[wasm_bindgen(js_name = qubitMargins)]
#[allow(clippy::too_many_arguments)]
pub fn qubit_margins_js(
    r: f64,
    theta: f64,
    phi: f64,
    a_theta: f64,
    a_phi: f64,
    b_theta: f64,
    b_phi: f64,
    f_label: &str,
) -> String {
    respond(qubit_margins(r, theta, phi, a_theta, a_phi, b_theta, b_phi, f_label))
}

#[derive(Debug, Serialize)]
pub struct MixtureOut {
    pub k: usize,
    pub cutoff: usize,
    pub t: Vec<f64>,
    pub delta_g: Vec<f64>,
}

/// `Δ_G` of `t|0⟩⟨0| + (1−t)|k⟩⟨k|` for `t` on a uniform grid over `[0, 1]`.
pub fn delta_g_mixture(k: usize, cutoff: usize, points: usize) -> Result<MixtureOut, String> {
    if !(2..=501).contains(&points) {
        return Err(format!("points {points} outside 2..=501"));
    }
    if !(MIN_CUTOFF..=64).contains(&cutoff) {
        return Err(format!("cutoff {cutoff} outside {MIN_CUTOFF}..=64"));
    }
    let mut t = Vec::with_capacity(points);
    let mut delta_g = Vec::with_capacity(points);
    for i in 0..points {
        let ti = i as f64 / (points - 1) as f64;
        let rho = fock_mixture(cutoff, k, ti).map_err(|e| e.to_string())?;
        t.push(ti);
        delta_g.push(nongaussianity(&rho, 1, cutoff).map_err(|e| e.to_string())?);
    }
    Ok(MixtureOut { k, cutoff, t, delta_g })
}

#[wasm_bindgen(js_name = deltaGMixture)]
pub fn delta_g_mixture_js(k: usize, cutoff: usize, points: usize) -> String {
    respond(delta_g_mixture(k, cutoff, points))
}
