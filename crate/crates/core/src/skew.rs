//! Covariance, commutator, Wigner-Yanase skew information and classical
//! uncertainty matrices of a set of observables, the 2n×2n matrix `L_X`,
//! and the margins of every relation built from them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    c, det_numerical, from_real, max_abs, max_abs_real, numerical_rank, pseudo_inverse, scale_of,
    spectral_decompose, trace_product, CMatrix, DensityMatrix, HermitianMatrix, RMatrix, Tolerances,
    C64,
};
use crate::margin::{Margin, RelationId};

/// Ordered list of Hermitian observables of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    observables: Vec<HermitianMatrix>,
}

impl ObservableSet {
    pub fn new(observables: Vec<HermitianMatrix>) -> Result<Self> {
        let first = observables.first().ok_or(Error::Empty("observable set"))?;
        let dim = first.dim();
        for x in &observables {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: x.dim() });
            }
        }
        Ok(ObservableSet { observables })
    }

    pub fn from_matrices(ms: Vec<CMatrix>) -> Result<Self> {
        Self::new(ms.into_iter().map(HermitianMatrix::new).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn get(&self, k: usize) -> &HermitianMatrix {
        &self.observables[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.observables.iter()
    }

    pub fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: self.dim() });
        }
        Ok(())
    }

    /// `X'_k = X_k - ⟨X_k⟩`.
    pub fn centered(&self, rho: &DensityMatrix) -> Result<Vec<CMatrix>> {
        self.check_state(rho)?;
        let d = self.dim();
        Ok(self
            .observables
            .iter()
            .map(|x| {
                let mean = rho.expectation(x.matrix()).re;
                x.matrix() - CMatrix::identity(d, d) * c(mean, 0.0)
            })
            .collect())
    }

    /// `U X_k U†` for every observable.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        Self::from_matrices(self.observables.iter().map(|x| u * x.matrix() * u.adjoint()).collect())
    }
}

/// `[[σ]]_kj = ½⟨X_k X_j + X_j X_k⟩ − ⟨X_k⟩⟨X_j⟩`.
pub fn covariance_matrix(rho: &DensityMatrix, x: &ObservableSet) -> Result<RMatrix> {
    x.check_state(rho)?;
    let n = x.len();
    let means: Vec<f64> = x.iter().map(|o| rho.expectation(o.matrix()).re).collect();
    let mut s = RMatrix::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            let xk = x.get(k).matrix();
            let xj = x.get(j).matrix();
            let sym = (rho.expectation(&(xk * xj)) + rho.expectation(&(xj * xk))) * 0.5;
            let v = sym.re - means[k] * means[j];
            s[(k, j)] = v;
            s[(j, k)] = v;
        }
    }
    Ok(s)
}

/// `[[δ]]_kj = (i/2)⟨[X_k, X_j]⟩`, a real antisymmetric matrix.
pub fn commutator_matrix(rho: &DensityMatrix, x: &ObservableSet) -> Result<RMatrix> {
    x.check_state(rho)?;
    let n = x.len();
    let mut d = RMatrix::zeros(n, n);
    for k in 0..n {
        for j in (k + 1)..n {
            let xk = x.get(k).matrix();
            let xj = x.get(j).matrix();
            let comm = rho.expectation(&(xk * xj - xj * xk));
            let v = (C64::new(0.0, 0.5) * comm).re;
            d[(k, j)] = v;
            d[(j, k)] = -v;
        }
    }
    Ok(d)
}

/// The Hermitian matrix `iδ`.
pub fn i_delta(delta: &RMatrix) -> HermitianMatrix {
    HermitianMatrix::new(delta.map(|v| c(0.0, v))).expect("i times a real antisymmetric matrix is Hermitian")
}

/// Wigner-Yanase skew information matrix from the spectral form
/// `Σ_ab ½(√λ_a − √λ_b)² Re⟨a|X_k|b⟩⟨b|X_j|a⟩`.
pub fn wy_skew_matrix(rho: &DensityMatrix, x: &ObservableSet) -> Result<RMatrix> {
    x.check_state(rho)?;
    let eig = rho.eigen();
    let roots: Vec<f64> = eig.values.iter().map(|v| v.sqrt()).collect();
    let in_basis: Vec<CMatrix> = x.iter().map(|o| eig.to_eigenbasis(o.matrix())).collect();
    let d = rho.dim();
    let n = x.len();
    let mut out = RMatrix::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let w = 0.5 * (roots[a] - roots[b]).powi(2);
                    if w != 0.0 {
                        acc += w * (in_basis[k][(a, b)] * in_basis[j][(b, a)]).re;
                    }
                }
            }
            out[(k, j)] = acc;
            out[(j, k)] = acc;
        }
    }
    Ok(out)
}

/// Skew information matrix from the commutator form `−½ Re Tr[√ρ, X_k][√ρ, X_j]`.
pub fn wy_skew_matrix_commutator(rho: &DensityMatrix, x: &ObservableSet) -> Result<RMatrix> {
    x.check_state(rho)?;
    let s = rho.sqrt();
    let comms: Vec<CMatrix> = x.iter().map(|o| s * o.matrix() - o.matrix() * s).collect();
    let n = x.len();
    Ok(RMatrix::from_fn(n, n, |k, j| -0.5 * trace_product(&comms[k], &comms[j]).re))
}

/// `c = σ − I`, checked positive semidefinite.
pub fn classical_matrix(sigma: &RMatrix, skew: &RMatrix) -> Result<RMatrix> {
    if sigma.shape() != skew.shape() {
        return Err(Error::DimensionMismatch { expected: sigma.nrows(), found: skew.nrows() });
    }
    let cl = sigma - skew;
    let h = HermitianMatrix::from_real_symmetric(&cl)?;
    let min = spectral_decompose(&h).min();
    let floor = -Tolerances::DEFAULT.psd * max_abs_real(sigma).max(1.0);
    if min < floor {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(cl)
}

/// Gram matrix of `Y_{k±} = [√ρ, X'_k]_± / √2` under `⟨A, B⟩ = Tr A†B`,
/// ordered `(1+, …, n+, 1−, …, n−)`.
pub fn l_gram(rho: &DensityMatrix, x: &ObservableSet) -> Result<CMatrix> {
    let centered = x.centered(rho)?;
    let s = rho.sqrt();
    let n = x.len();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut ys: Vec<CMatrix> = Vec::with_capacity(2 * n);
    for xk in &centered {
        ys.push((s * xk + xk * s) * c(inv_sqrt2, 0.0));
    }
    for xk in &centered {
        ys.push((s * xk - xk * s) * c(inv_sqrt2, 0.0));
    }
    let adj: Vec<CMatrix> = ys.iter().map(|y| y.adjoint()).collect();
    Ok(CMatrix::from_fn(2 * n, 2 * n, |p, q| trace_product(&adj[p], &ys[q])))
}

/// Block assembly `[[σ + c, iδ], [(iδ)†, σ − c]]`.
pub fn l_blocks(sigma: &RMatrix, classical: &RMatrix, delta: &RMatrix) -> CMatrix {
    let n = sigma.nrows();
    let mut l = CMatrix::zeros(2 * n, 2 * n);
    let id = delta.map(|v| c(0.0, v));
    let id_adj = id.adjoint();
    l.view_mut((0, 0), (n, n)).copy_from(&from_real(&(sigma + classical)));
    l.view_mut((n, n), (n, n)).copy_from(&from_real(&(sigma - classical)));
    l.view_mut((0, n), (n, n)).copy_from(&id);
    l.view_mut((n, 0), (n, n)).copy_from(&id_adj);
    l
}

const CONSTRUCTION_TOL: f64 = 1e-8;

/// `L_X`, built as a Gram matrix and cross-checked against the block assembly.
pub fn build_l(rho: &DensityMatrix, x: &ObservableSet) -> Result<HermitianMatrix> {
    let sigma = covariance_matrix(rho, x)?;
    let delta = commutator_matrix(rho, x)?;
    let skew = wy_skew_matrix(rho, x)?;
    let classical = &sigma - &skew;
    let gram = l_gram(rho, x)?;
    let blocks = l_blocks(&sigma, &classical, &delta);
    check_construction(&gram, &blocks)?;
    HermitianMatrix::new(gram)
}

fn check_construction(gram: &CMatrix, blocks: &CMatrix) -> Result<()> {
    let difference = max_abs(&(gram - blocks));
    if difference > CONSTRUCTION_TOL * scale_of(blocks) {
        return Err(Error::ConstructionMismatch { difference });
    }
    Ok(())
}

/// Determinants entering the relations. `delta` is `|det δ|`, which is zero for odd n.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Determinants {
    pub sigma: f64,
    pub delta: f64,
    pub skew: f64,
    pub classical: f64,
    pub sigma_plus_c: f64,
    pub sigma_minus_c: f64,
}

/// Margins of the n-observable relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedMargins {
    /// `|σ| − |δ|`.
    pub rs: Margin,
    /// `|σ+c|·|σ−c| − |δ|²`.
    pub eq3: Margin,
    /// `(|σ|^{2/n} − |δ|^{2/n}) − (|σ|^{1/n} − |I|^{1/n})²`.
    pub eq4a: Margin,
    /// `(|σ|^{1/n} − |I|^{1/n})² − |c|^{2/n}`.
    pub eq4b: Margin,
    /// Minimum eigenvalue of `L_X`.
    pub eq7_psd: Margin,
    /// Minimum eigenvalue of the Schur complement of `σ − c` in `L_X`.
    pub eq8_schur: Margin,
}

impl RefinedMargins {
    pub fn get(&self, id: RelationId) -> Option<Margin> {
        Some(match id {
            RelationId::Rs => self.rs,
            RelationId::Eq3 => self.eq3,
            RelationId::Eq4a => self.eq4a,
            RelationId::Eq4b => self.eq4b,
            RelationId::Eq7Psd => self.eq7_psd,
            RelationId::Eq8Schur => self.eq8_schur,
            _ => return None,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelationId, Margin)> + '_ {
        [
            RelationId::Rs,
            RelationId::Eq3,
            RelationId::Eq4a,
            RelationId::Eq4b,
            RelationId::Eq7Psd,
            RelationId::Eq8Schur,
        ]
        .into_iter()
        .map(move |id| (id, self.get(id).unwrap()))
    }
}

/// Every matrix, determinant and margin of the refined relation for one
/// state and observable set. All matrices refer to centered observables.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyReport {
    pub sigma: RMatrix,
    /// Real antisymmetric `δ_X`.
    pub delta: RMatrix,
    pub skew: RMatrix,
    pub classical: RMatrix,
    pub l: HermitianMatrix,
    pub dets: Determinants,
    pub margins: RefinedMargins,
    /// `|L⁺L⁻| − |δ|²`.
    pub delta_g: f64,
    pub rank_l: usize,
    /// `‖(I − Π)(iδ)†‖` with `Π` the range projector of `σ − c`.
    pub schur_range_residual: f64,
}

impl UncertaintyReport {
    pub fn n(&self) -> usize {
        self.sigma.nrows()
    }
}

fn sym_det(m: &RMatrix) -> Result<f64> {
    Ok(det_numerical(&HermitianMatrix::from_real_symmetric(m)?))
}

/// `|A|^{p}` for a determinant that is non-negative up to roundoff.
fn det_pow(d: f64, p: f64) -> f64 {
    d.max(0.0).powf(p)
}

/// All matrices and margins of the n-observable relations.
pub fn check_refined_rs(rho: &DensityMatrix, x: &ObservableSet) -> Result<UncertaintyReport> {
    check_refined_rs_with(rho, x, &Tolerances::DEFAULT)
}

pub fn check_refined_rs_with(
    rho: &DensityMatrix,
    x: &ObservableSet,
    tol: &Tolerances,
) -> Result<UncertaintyReport> {
    let n = x.len();
    let sigma = covariance_matrix(rho, x)?;
    let delta = commutator_matrix(rho, x)?;
    let skew = wy_skew_matrix(rho, x)?;
    let classical = classical_matrix(&sigma, &skew)?;
    let gram = l_gram(rho, x)?;
    let blocks = l_blocks(&sigma, &classical, &delta);
    check_construction(&gram, &blocks)?;
    let l = HermitianMatrix::new(gram)?;

    let splus = &sigma + &classical;
    let sminus = &sigma - &classical;
    let idelta = i_delta(&delta);
    let det_delta = if n % 2 == 1 { 0.0 } else { det_numerical(&idelta).abs() };
    let dets = Determinants {
        sigma: sym_det(&sigma)?,
        delta: det_delta,
        skew: sym_det(&skew)?,
        classical: sym_det(&classical)?,
        sigma_plus_c: sym_det(&splus)?,
        sigma_minus_c: sym_det(&sminus)?,
    };

    let rs = Margin::new(dets.sigma - dets.delta, dets.sigma.abs().max(dets.delta));
    let lhs3 = dets.sigma_plus_c * dets.sigma_minus_c;
    let rhs3 = dets.delta * dets.delta;
    let eq3 = Margin::new(lhs3 - rhs3, lhs3.abs().max(rhs3));

    let p = 1.0 / n as f64;
    let s1 = det_pow(dets.sigma, p);
    let i1 = det_pow(dets.skew, p);
    let d2 = det_pow(dets.delta, 2.0 * p);
    let c2 = det_pow(dets.classical, 2.0 * p);
    let middle = (s1 - i1).powi(2);
    let chain_scale = (s1 * s1).max(d2);
    let eq4a = Margin::new(s1 * s1 - d2 - middle, chain_scale);
    let eq4b = Margin::new(middle - c2, chain_scale);

    let l_eig = spectral_decompose(&l);
    let eq7_psd = Margin::new(l_eig.min(), l.scale());
    let rank_l = numerical_rank(&l, tol.psd);

    let (eq8_schur, schur_range_residual) = schur_margin(&splus, &sminus, &idelta, tol)?;

    Ok(UncertaintyReport {
        sigma,
        delta,
        skew,
        classical,
        l,
        dets,
        margins: RefinedMargins { rs, eq3, eq4a, eq4b, eq7_psd, eq8_schur },
        delta_g: lhs3 - rhs3,
        rank_l,
        schur_range_residual,
    })
}

/// Minimum eigenvalue of `P − B Q⁺ B†` for `L = [[P, B], [B†, Q]]`, with the
/// pseudo-inverse taken on the numerical range of `Q`.
fn schur_margin(
    p: &RMatrix,
    q: &RMatrix,
    b: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<(Margin, f64)> {
    let qh = HermitianMatrix::from_real_symmetric(q)?;
    let (q_pinv, proj) = pseudo_inverse(&qh, tol.psd);
    let bm = b.matrix();
    let n = p.nrows();
    let schur = from_real(p) - bm * &q_pinv * bm.adjoint();
    let sh = HermitianMatrix::with_tolerance(schur, 1e-6)?;
    let min = spectral_decompose(&sh).min();
    let outside = (CMatrix::identity(n, n) - &proj) * bm.adjoint();
    let residual = max_abs(&outside);
    let scale = sh.scale().max(max_abs_real(p));
    // A component of size √(q·p) along a discarded eigenvalue q ≤ cut is consistent with L ≥ 0.
    let cut = tol.psd * qh.scale();
    let allowed = (tol.ineq * scale).max(2.0 * (cut * max_abs_real(p).max(1.0)).sqrt());
    let value = if residual > allowed { min.min(-residual) } else { min };
    Ok((Margin::new(value, scale), residual))
}

/// Scalar relations for a pair of observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoObsReport {
    /// `δ` with `δ² = |δ_X|`; equals `⟨[X₁, X₂]⟩ / 2i`.
    pub delta_scalar: f64,
    pub lp: [[f64; 2]; 2],
    pub lm: [[f64; 2]; 2],
    /// `|σ| − |c|`.
    pub a: f64,
    /// `|L⁺|·|L⁻|`.
    pub b: f64,
    pub u1: f64,
    pub u2: f64,
    pub eq9a: Margin,
    pub eq9b: [Margin; 2],
    pub eq10: Margin,
    /// Refined bound `U₁U₂ ≥ δ² + √(L₁⁺L₂⁺/(L₁⁻L₂⁻))(L₁₂⁻)²`.
    pub furuichi: Margin,
    /// Original bound `U₁U₂ ≥ δ² + (L₁₂⁻)²`.
    pub furuichi_original: Margin,
    /// `A − δ²`; non-negative, which rules out the second root branch.
    pub impossibility: Margin,
}

impl TwoObsReport {
    pub fn eq9b_min(&self) -> Margin {
        self.eq9b[0].min(self.eq9b[1])
    }

    pub fn get(&self, id: RelationId) -> Option<Margin> {
        Some(match id {
            RelationId::Eq9a => self.eq9a,
            RelationId::Eq9b => self.eq9b_min(),
            RelationId::Eq10 => self.eq10,
            RelationId::Furuichi => self.furuichi,
            _ => return None,
        })
    }

    /// Lower bound on `δ²`-side quantity from the 9a relation: `A − √(A² − B)`.
    pub fn eq9a_bound(&self) -> f64 {
        self.eq9a.value + self.delta_scalar * self.delta_scalar
    }
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn to2(m: &RMatrix) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// `√(A² − B)` for 2×2 σ and c, which equals `|σ|·|r₁ − r₂|` where `r` are the
/// eigenvalues of `σ^{-1/2} c σ^{-1/2}`; computed without cancellation.
fn discriminant_root(sigma: &[[f64; 2]; 2], cl: &[[f64; 2]; 2]) -> f64 {
    let ds = det2(sigma);
    let scale = sigma[0][0].abs().max(sigma[1][1].abs()).max(1.0);
    if sigma[0][0] > 0.0 && ds > 1e-12 * scale * scale {
        let l11 = sigma[0][0].sqrt();
        let l21 = sigma[1][0] / l11;
        let l22 = (sigma[1][1] - l21 * l21).sqrt();
        // K = L⁻¹ c L⁻ᵀ
        let y11 = cl[0][0] / l11;
        let y12 = cl[0][1] / l11;
        let y21 = (cl[1][0] - l21 * y11) / l22;
        let y22 = (cl[1][1] - l21 * y12) / l22;
        let k11 = y11 / l11;
        let k12 = (y12 - l21 * k11) / l22;
        let k21 = y21 / l11;
        let k22 = (y22 - l21 * k21) / l22;
        let koff = 0.5 * (k12 + k21);
        ds * ((k11 - k22).powi(2) + 4.0 * koff * koff).sqrt()
    } else {
        let k = sigma[0][0] * cl[1][1] + sigma[1][1] * cl[0][0] - 2.0 * sigma[0][1] * cl[0][1];
        (k * k - 4.0 * ds * det2(cl)).max(0.0).sqrt()
    }
}

/// Two-observable scalar relations for `(X₁, X₂)`.
pub fn two_obs_relations(
    rho: &DensityMatrix,
    x1: &HermitianMatrix,
    x2: &HermitianMatrix,
) -> Result<TwoObsReport> {
    let set = ObservableSet::new(vec![x1.clone(), x2.clone()])?;
    let report = check_refined_rs(rho, &set)?;
    two_obs_from_report(&report, &Tolerances::DEFAULT)
}

pub fn two_obs_from_report(report: &UncertaintyReport, tol: &Tolerances) -> Result<TwoObsReport> {
    if report.n() != 2 {
        return Err(Error::Precondition(format!(
            "two-observable relations need exactly 2 observables, got {}",
            report.n()
        )));
    }
    let sigma = to2(&report.sigma);
    let cl = to2(&report.classical);
    let lp = to2(&(&report.sigma + &report.classical));
    let lm = to2(&(&report.sigma - &report.classical));
    let delta_scalar = report.delta[(1, 0)];
    let d2 = delta_scalar * delta_scalar;

    let det_s = det2(&sigma);
    let det_c = det2(&cl);
    let det_p = det2(&lp);
    let det_m = det2(&lm);
    let a = det_s - det_c;
    let b = det_p * det_m;
    let root = discriminant_root(&sigma, &cl);
    let scale = det_s.abs().max(b.abs().sqrt()).max(d2);
    let eq9a = Margin::new(a - root - d2, scale);

    let zero = tol.psd * sigma[0][0].abs().max(sigma[1][1].abs()).max(1.0);
    let eq9b = [0, 1].map(|k| {
        if lm[k][k] <= zero {
            Margin::vacuous()
        } else {
            let v = lp[k][k] / lm[k][k] * det_m;
            Margin::new(v - d2, v.abs().max(d2))
        }
    });

    let u1 = (lp[0][0] * lm[0][0]).max(0.0).sqrt();
    let u2 = (lp[1][1] * lm[1][1]).max(0.0).sqrt();
    let uu = u1 * u2;
    let eq10 = Margin::new(
        uu - b.max(0.0).sqrt() - (lp[0][1] * lm[0][1]).abs(),
        uu.max(b.abs().sqrt()),
    );
    let furuichi = if lm[0][0] <= zero || lm[1][1] <= zero {
        Margin::vacuous()
    } else {
        let w = (lp[0][0] * lp[1][1] / (lm[0][0] * lm[1][1])).sqrt();
        let rhs = d2 + w * lm[0][1] * lm[0][1];
        Margin::new(uu - rhs, uu.max(rhs))
    };
    let rhs_orig = d2 + lm[0][1] * lm[0][1];
    let furuichi_original = Margin::new(uu - rhs_orig, uu.max(rhs_orig));
    let impossibility = Margin::new(a - d2, a.abs().max(d2));

    Ok(TwoObsReport {
        delta_scalar,
        lp,
        lm,
        a,
        b,
        u1,
        u2,
        eq9a,
        eq9b,
        eq10,
        furuichi,
        furuichi_original,
        impossibility,
    })
}

/// Δ_G for a state and observable set.
pub fn delta_g(rho: &DensityMatrix, x: &ObservableSet) -> Result<f64> {
    Ok(check_refined_rs(rho, x)?.delta_g)
}

/// Maximum entry of a real matrix difference, for tests and reports.
pub fn max_abs_diff(a: &RMatrix, b: &RMatrix) -> f64 {
    max_abs_real(&(a - b))
}

pub fn zeros(n: usize) -> RMatrix {
    DMatrix::zeros(n, n)
}
