//! Seeded randomized verification of every relation, and a comparison of the
//! bounds the relations place on `δ²` for pairs of observables.
//!
//! Trial `i` draws from a ChaCha8 generator seeded with the master seed on
//! stream `i`, so results do not depend on scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcov::check_metric_adjusted_with_lambda;
use crate::io::{encode_matrix, Reproducer};
use crate::linalg::{c, CMatrix, DensityMatrix, HermitianMatrix, Tolerances};
use crate::margin::Margin;
use crate::relations::{evaluate, FChoice, RelationSet};
use crate::skew::{check_refined_rs, two_obs_from_report, ObservableSet};

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre state `GG†/Tr GG†` with `G` of size `dim × rank`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={dim}")));
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m / c(tr, 0.0))
}

/// `n` GUE observables `(G + G†)/2`.
pub fn random_observables<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<ObservableSet> {
    if n == 0 {
        return Err(Error::Empty("observable count"));
    }
    let obs = (0..n)
        .map(|_| {
            let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
            HermitianMatrix::new((&g + g.adjoint()) * c(0.5, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservableSet::new(obs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankChoice {
    One,
    Full,
    Fixed(usize),
}

impl RankChoice {
    pub fn resolve(self, dim: usize) -> usize {
        match self {
            RankChoice::One => 1,
            RankChoice::Full => dim,
            RankChoice::Fixed(k) => k,
        }
    }
}

impl std::str::FromStr for RankChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" | "pure" => Ok(RankChoice::One),
            "full" => Ok(RankChoice::Full),
            other => other
                .parse()
                .map(RankChoice::Fixed)
                .map_err(|_| Error::InvalidParameter(format!("rank `{other}` is not 1, full or an integer"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub dims: Vec<usize>,
    pub n_obs: Vec<usize>,
    pub ranks: Vec<RankChoice>,
    pub trials: u64,
    pub seed: u64,
    /// Relation ids or group aliases.
    pub relations: Vec<String>,
    /// Functions for eq16, eq18 and eq19.
    pub f: Vec<String>,
    /// Functions for the strongest-relation comparison.
    pub wy_strongest: Vec<String>,
    pub tol_ineq: f64,
    pub max_reproducers: usize,
    /// Worker threads; `None` uses the global pool, `Some(1)` runs inline.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            dims: (2..=6).collect(),
            n_obs: (1..=4).collect(),
            ranks: vec![RankChoice::One, RankChoice::Full],
            trials: 10_000,
            seed: 42,
            relations: vec!["all".into()],
            f: vec!["wy".into(), "sld".into(), "wyd:0.3".into()],
            wy_strongest: vec!["sld".into()],
            tol_ineq: Tolerances::DEFAULT.ineq,
            max_reproducers: 16,
            threads: None,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|d| !(2..=8).contains(d)) {
            return bad(format!("dims {:?} must be non-empty within 2..=8", self.dims));
        }
        if self.n_obs.is_empty() || self.n_obs.iter().any(|n| !(1..=5).contains(n)) {
            return bad(format!("observable counts {:?} must be non-empty within 1..=5", self.n_obs));
        }
        if self.ranks.is_empty() {
            return bad("at least one rank choice is required".into());
        }
        let min_dim = *self.dims.iter().min().expect("non-empty");
        for r in &self.ranks {
            if let RankChoice::Fixed(k) = r {
                if *k == 0 || *k > min_dim {
                    return bad(format!("rank {k} must lie in 1..={min_dim} for every dim"));
                }
            }
        }
        if !(self.tol_ineq > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tol_ineq));
        }
        if self.relations.is_empty() {
            return bad("no relations selected".into());
        }
        if let Some(0) = self.threads {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances::DEFAULT.with_ineq(self.tol_ineq)
    }
}

/// Upper edges of the histogram bins for relative margins; the last bin is
/// open and vacuous margins are counted separately.
pub const HISTOGRAM_EDGES: [f64; 8] = [-1e-8, -1e-12, 1e-12, 1e-9, 1e-6, 1e-3, 1.0, f64::INFINITY];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationStats {
    pub trials: u64,
    pub violations: u64,
    pub vacuous: u64,
    /// Smallest relative margin seen.
    pub min_margin: Option<f64>,
    pub histogram: Vec<u64>,
}

impl Default for RelationStats {
    fn default() -> Self {
        RelationStats { trials: 0, violations: 0, vacuous: 0, min_margin: None, histogram: vec![0; HISTOGRAM_EDGES.len()] }
    }
}

impl RelationStats {
    fn record(&mut self, m: &Margin, tol: f64) {
        self.trials += 1;
        if m.is_vacuous() {
            self.vacuous += 1;
            return;
        }
        if !m.holds(tol) {
            self.violations += 1;
        }
        let r = m.relative();
        self.min_margin = Some(match self.min_margin {
            Some(v) if !(r < v) => v,
            _ => r,
        });
        let bin = HISTOGRAM_EDGES.iter().position(|&e| r < e).unwrap_or(HISTOGRAM_EDGES.len() - 1);
        self.histogram[bin] += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzStats {
    pub version: String,
    pub config: FuzzConfig,
    pub relations: BTreeMap<String, RelationStats>,
    /// Trials whose evaluation raised an error.
    pub errors: u64,
    pub reproducers: Vec<Reproducer>,
}

impl FuzzStats {
    pub fn total_violations(&self) -> u64 {
        self.relations.values().map(|s| s.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0 && self.errors == 0
    }
}

struct TrialOutcome {
    margins: BTreeMap<String, Margin>,
    failures: Vec<Reproducer>,
    error: bool,
}

fn draw_instance(config: &FuzzConfig, rng: &mut ChaCha8Rng) -> Result<(DensityMatrix, ObservableSet)> {
    let dim = config.dims[rng.random_range(0..config.dims.len())];
    let n = config.n_obs[rng.random_range(0..config.n_obs.len())];
    let rank = config.ranks[rng.random_range(0..config.ranks.len())].resolve(dim);
    let rho = random_density(dim, rank, rng)?;
    let x = random_observables(dim, n, rng)?;
    Ok((rho, x))
}

/// The `(ρ, X)` instance drawn for one trial.
pub fn trial_instance(config: &FuzzConfig, trial: u64) -> Result<(DensityMatrix, ObservableSet)> {
    draw_instance(config, &mut trial_rng(config.seed, trial))
}

fn reproducer(config: &FuzzConfig, trial: u64, rho: &DensityMatrix, x: &ObservableSet, key: &str) -> Reproducer {
    let (relation, f) = match key.split_once('[') {
        Some((id, rest)) => (id.to_string(), Some(rest.trim_end_matches(']').to_string())),
        None => (key.to_string(), None),
    };
    Reproducer {
        dim: rho.dim(),
        matrix: encode_matrix(rho.matrix()),
        observables: x.iter().map(|o| encode_matrix(o.matrix())).collect(),
        relation,
        f,
        seed: config.seed,
        trial,
        margin: None,
        error: None,
    }
}

fn run_trial(config: &FuzzConfig, set: &RelationSet, tol: &Tolerances, trial: u64) -> TrialOutcome {
    let (rho, x) = match trial_instance(config, trial) {
        Ok(v) => v,
        Err(_) => return TrialOutcome { margins: BTreeMap::new(), failures: vec![], error: true },
    };
    match evaluate(&rho, &x, set, tol) {
        Ok(ev) => {
            let failures = ev
                .margins
                .iter()
                .filter(|(_, m)| !m.holds(tol.ineq))
                .map(|(k, m)| Reproducer { margin: Some(m.value), ..reproducer(config, trial, &rho, &x, k) })
                .collect();
            TrialOutcome { margins: ev.margins, failures, error: false }
        }
        Err(e) => TrialOutcome {
            margins: BTreeMap::new(),
            failures: vec![Reproducer { error: Some(e.to_string()), ..reproducer(config, trial, &rho, &x, "error") }],
            error: true,
        },
    }
}

fn run_all(config: &FuzzConfig, set: &RelationSet, tol: &Tolerances) -> Vec<TrialOutcome> {
    let work = |t: u64| run_trial(config, set, tol, t);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match config.threads {
            Some(1) => (0..config.trials).map(work).collect(),
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map(|pool| pool.install(|| (0..config.trials).into_par_iter().map(work).collect()))
                .unwrap_or_else(|_| (0..config.trials).map(work).collect()),
            None => (0..config.trials).into_par_iter().map(work).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..config.trials).map(work).collect()
    }
}

/// Runs every trial and aggregates in trial order.
pub fn run_fuzz(config: &FuzzConfig) -> Result<FuzzStats> {
    config.validate()?;
    let set = RelationSet::parse(&config.relations, &config.f, &config.wy_strongest)?;
    let tol = config.tolerances();
    let outcomes = run_all(config, &set, &tol);
    let mut relations: BTreeMap<String, RelationStats> = BTreeMap::new();
    let mut reproducers = Vec::new();
    let mut errors = 0;
    for o in outcomes {
        if o.error {
            errors += 1;
        }
        for (k, m) in &o.margins {
            relations.entry(k.clone()).or_default().record(m, tol.ineq);
        }
        for r in o.failures {
            if reproducers.len() < config.max_reproducers {
                reproducers.push(r);
            }
        }
    }
    Ok(FuzzStats { version: env!("CARGO_PKG_VERSION").into(), config: config.clone(), relations, errors, reproducers })
}

/// Upper bounds on `δ²` implied by each relation for one pair of observables;
/// smaller is stronger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthRow {
    pub trial: u64,
    pub delta2: f64,
    /// `|σ|`.
    pub rs: f64,
    /// `√(|σ+c|·|σ−c|)`.
    pub refined: f64,
    /// `A − √(A² − B)`.
    pub eq9a: f64,
    /// `√(|σ−c^f|·|σ+c^f|) / (4λ_f f(0))` per function label.
    pub eq19: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthStudy {
    pub rows: Vec<StrengthRow>,
    /// Trials where `δ² ≤ eq9a ≤ refined` failed beyond tolerance.
    pub provable_failures: u64,
    /// Trials where an in-class function beat the refined bound.
    pub wy_strongest_failures: u64,
    /// Fraction of trials with `refined < rs` strictly (reported only).
    pub refined_stricter_than_rs: f64,
    /// Fraction of trials with `eq9a < refined` strictly (reported only).
    pub eq9a_stricter_than_refined: f64,
}

/// Compares the `δ²` bounds on random pairs of observables.
pub fn strength_study(config: &FuzzConfig) -> Result<StrengthStudy> {
    let mut cfg = config.clone();
    cfg.n_obs = vec![2];
    cfg.validate()?;
    let fs: Vec<FChoice> = cfg.f.iter().map(|l| FChoice::from_label(l)).collect::<Result<_>>()?;
    let tol = cfg.tolerances();
    let mut rows = Vec::new();
    let (mut provable, mut strongest, mut strict_rs, mut strict_9a) = (0u64, 0u64, 0u64, 0u64);
    for trial in 0..cfg.trials {
        let (rho, x) = trial_instance(&cfg, trial)?;
        let row = strength_row(&rho, &x, &fs, trial)?;
        let scale = row.rs.abs().max(1.0);
        let slack = tol.ineq * scale;
        if row.delta2 > row.eq9a + slack || row.eq9a > row.refined + slack {
            provable += 1;
        }
        for fc in &fs {
            if fc.f.in_wy_class() && row.eq19[fc.label()] < row.refined - slack {
                strongest += 1;
            }
        }
        if row.refined < row.rs - slack {
            strict_rs += 1;
        }
        if row.eq9a < row.refined - slack {
            strict_9a += 1;
        }
        rows.push(row);
    }
    let n = cfg.trials as f64;
    Ok(StrengthStudy {
        rows,
        provable_failures: provable,
        wy_strongest_failures: strongest,
        refined_stricter_than_rs: strict_rs as f64 / n,
        eq9a_stricter_than_refined: strict_9a as f64 / n,
    })
}

/// Bounds for a single instance with two observables.
pub fn strength_row(rho: &DensityMatrix, x: &ObservableSet, fs: &[FChoice], trial: u64) -> Result<StrengthRow> {
    let report = check_refined_rs(rho, x)?;
    let two = two_obs_from_report(&report, &Tolerances::DEFAULT)?;
    let d = &report.dets;
    let mut eq19 = BTreeMap::new();
    for fc in fs {
        let m = check_metric_adjusted_with_lambda(rho, x, &fc.f, fc.lambda)?;
        // margin19 + rhs19 recovers the left side |σ−c^f|·|σ+c^f|
        let d2 = d.delta * d.delta;
        let factor = 4.0 * fc.lambda * fc.f.f0();
        let lhs = m.margin19.value + factor * factor * d2;
        eq19.insert(fc.label().to_string(), lhs.max(0.0).sqrt() / factor);
    }
    Ok(StrengthRow {
        trial,
        delta2: two.delta_scalar * two.delta_scalar,
        rs: d.sigma,
        refined: (d.sigma_plus_c * d.sigma_minus_c).max(0.0).sqrt(),
        eq9a: two.eq9a_bound(),
        eq19,
    })
}
