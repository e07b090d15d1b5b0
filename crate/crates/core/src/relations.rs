//! One entry point that evaluates a chosen set of relations for a state and
//! observable set, shared by the command line, the fuzzer and the demo.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gcov::{
    check_g_triple, check_metric_adjusted_with_lambda, lambda_f, lg_psd_margin, metric_adjusted_pair,
    product_kernels, wy_strongest_check, BivariateKernel, MonotoneFunction,
};
use crate::linalg::{DensityMatrix, Tolerances};
use crate::margin::{Margin, RelationId};
use crate::skew::{check_refined_rs_with, two_obs_from_report, ObservableSet, TwoObsReport, UncertaintyReport};

/// A monotone function with its `λ_f` computed once.
#[derive(Debug, Clone)]
pub struct FChoice {
    pub f: MonotoneFunction,
    pub lambda: f64,
}

impl FChoice {
    pub fn new(f: MonotoneFunction) -> Self {
        let lambda = lambda_f(&f).lambda;
        FChoice { f, lambda }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Ok(Self::new(MonotoneFunction::from_label(label)?))
    }

    pub fn label(&self) -> &str {
        self.f.label()
    }
}

/// Which relations to evaluate and with which monotone functions.
#[derive(Debug, Clone)]
pub struct RelationSet {
    pub ids: BTreeSet<RelationId>,
    /// Functions for eq16 (metric-adjusted pair), eq18 and eq19.
    pub f: Vec<FChoice>,
    /// Functions for the strongest-relation comparison.
    pub wy_strongest: Vec<FChoice>,
}

impl RelationSet {
    /// Parses relation tokens (ids or group aliases) and f labels.
    pub fn parse(tokens: &[String], f_labels: &[String], wy_labels: &[String]) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for t in tokens {
            ids.extend(RelationId::expand(t)?);
        }
        Ok(RelationSet {
            ids,
            f: f_labels.iter().map(|l| FChoice::from_label(l)).collect::<Result<_>>()?,
            wy_strongest: wy_labels.iter().map(|l| FChoice::from_label(l)).collect::<Result<_>>()?,
        })
    }

    pub fn all(f_labels: &[&str], wy_labels: &[&str]) -> Result<Self> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self::parse(&["all".to_string()], &own(f_labels), &own(wy_labels))
    }
}

/// Margins keyed by relation id, with `[label]` suffixes for variants.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: UncertaintyReport,
    pub two_obs: Option<TwoObsReport>,
    pub margins: BTreeMap<String, Margin>,
    /// Relations requested but not applicable, with the reason.
    pub skipped: BTreeMap<String, String>,
}

impl Evaluation {
    /// Relation keys whose margins fall below `−tol_ineq·scale`.
    pub fn violations(&self, tol: &Tolerances) -> Vec<&str> {
        self.margins.iter().filter(|(_, m)| !m.holds(tol.ineq)).map(|(k, _)| k.as_str()).collect()
    }
}

fn keyed(id: RelationId, variant: &str) -> String {
    format!("{}[{}]", id.as_str(), variant)
}

pub fn evaluate(rho: &DensityMatrix, x: &ObservableSet, set: &RelationSet, tol: &Tolerances) -> Result<Evaluation> {
    use RelationId::*;
    let report = check_refined_rs_with(rho, x, tol)?;
    let mut margins = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for (id, m) in report.margins.iter() {
        if set.ids.contains(&id) {
            margins.insert(id.as_str().to_string(), m);
        }
    }

    let wants_two = [Eq9a, Eq9b, Eq10, Furuichi].iter().any(|id| set.ids.contains(id));
    let two_obs = if x.len() == 2 { Some(two_obs_from_report(&report, tol)?) } else { None };
    if wants_two {
        for id in [Eq9a, Eq9b, Eq10, Furuichi] {
            if !set.ids.contains(&id) {
                continue;
            }
            match &two_obs {
                Some(t) => {
                    margins.insert(id.as_str().to_string(), t.get(id).expect("two-observable id"));
                }
                None => {
                    skipped.insert(id.as_str().to_string(), format!("needs exactly 2 observables, got {}", x.len()));
                }
            }
        }
    }

    if set.ids.contains(&Eq16) {
        let m = lg_psd_margin(rho, x, &BivariateKernel::mean(), &BivariateKernel::eps())?;
        margins.insert(Eq16.as_str().to_string(), m);
        for fc in &set.f {
            let (g1, g2) = metric_adjusted_pair(&fc.f);
            margins.insert(keyed(Eq16, fc.label()), lg_psd_margin(rho, x, &g1, &g2)?);
        }
    }
    if set.ids.contains(&Eq17) {
        let mean = BivariateKernel::mean();
        margins.insert(Eq17.as_str().to_string(), check_g_triple(rho, x, &mean, &mean, &BivariateKernel::eps())?);
        let (gp, gm, g0) = product_kernels(|v: f64| v.powf(0.25), |v: f64| v.powf(0.75), 1.0);
        margins.insert(keyed(Eq17, "product"), check_g_triple(rho, x, &gp, &gm, &g0)?);
    }
    if set.ids.contains(&Eq18) || set.ids.contains(&Eq19) {
        if set.f.is_empty() {
            for id in [Eq18, Eq19] {
                if set.ids.contains(&id) {
                    skipped.insert(id.as_str().to_string(), "no monotone function selected".into());
                }
            }
        }
        for fc in &set.f {
            let m = check_metric_adjusted_with_lambda(rho, x, &fc.f, fc.lambda)?;
            if set.ids.contains(&Eq18) {
                margins.insert(keyed(Eq18, fc.label()), m.margin18);
            }
            if set.ids.contains(&Eq19) {
                margins.insert(keyed(Eq19, fc.label()), m.margin19);
            }
        }
    }
    if set.ids.contains(&WyStrongest) {
        for fc in &set.wy_strongest {
            match wy_strongest_check(rho, x, &fc.f) {
                Ok(m) => {
                    margins.insert(keyed(WyStrongest, fc.label()), m);
                }
                Err(Error::Precondition(reason)) => {
                    skipped.insert(keyed(WyStrongest, fc.label()), reason);
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Evaluation { report, two_obs, margins, skipped })
}
