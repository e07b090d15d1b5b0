//! Bosonic Gaussian states: quadratic Hamiltonians, exact thermal moments,
//! the quadrature transform, Fock-space truncation and `Δ_G`.
//!
//! The ladder vector is `Λ = (a†₁, …, a†ₙ, a₁, …, aₙ)` and `H = ½ Λ S Λᵀ`.
//! With `J = [[0, I], [−I, 0]]` one has `[Λ_i, Λ_j] = −J_ij`, `N = −SJ`,
//! `M = e^{−βN}`, and the correlation matrix `C_ij = ⟨Λ_i Λ_j⟩` equals
//! `J(M − I)⁻¹`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    c, condition_number, identity, inverse, matrix_sign, max_abs, principal_log, scale_of, CMatrix, DensityMatrix,
    HermitianMatrix, RMatrix, C64,
};
use crate::skew::{check_refined_rs, ObservableSet};

const GENERATOR_TOL: f64 = 1e-10;
const SINGULAR_CONDITION: f64 = 1e12;
pub const PERTURBATION: f64 = 1e-8;
pub const MIN_CUTOFF: usize = 8;

/// `J = [[0, I], [−I, 0]]` for `n` modes.
pub fn symplectic_form(n: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = c(1.0, 0.0);
        j[(n + k, k)] = c(-1.0, 0.0);
    }
    j
}

/// Block swap `Π = [[0, I], [I, 0]]`.
pub fn swap_pi(n: usize) -> CMatrix {
    let mut p = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        p[(k, n + k)] = c(1.0, 0.0);
        p[(n + k, k)] = c(1.0, 0.0);
    }
    p
}

/// `u = (1/√2)[[I, iI], [I, −iI]]`, so that `(x, p) = Λu`.
pub fn quadrature_u(n: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        u[(k, k)] = c(s, 0.0);
        u[(k, n + k)] = c(0.0, s);
        u[(n + k, k)] = c(s, 0.0);
        u[(n + k, n + k)] = c(0.0, -s);
    }
    u
}

/// A quadratic Hamiltonian `H = ½ Λ S Λᵀ` at inverse temperature `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    n_modes: usize,
    s: CMatrix,
    beta: f64,
}

/// Checks `Sᵀ = S` and `ΠS̄Π = S` and attaches `β`.
pub fn validate_quadratic(s: CMatrix, n_modes: usize, beta: f64) -> Result<QuadraticHamiltonian> {
    QuadraticHamiltonian::new(s, n_modes, beta)
}

impl QuadraticHamiltonian {
    pub fn new(s: CMatrix, n_modes: usize, beta: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidGenerator("at least one mode is required".into()));
        }
        if s.nrows() != 2 * n_modes || s.ncols() != 2 * n_modes {
            return Err(Error::InvalidGenerator(format!(
                "S is {}x{}, expected {}x{}",
                s.nrows(),
                s.ncols(),
                2 * n_modes,
                2 * n_modes
            )));
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGenerator("S has a non-finite entry".into()));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidGenerator(format!("beta = {beta} must be positive and finite")));
        }
        let bound = GENERATOR_TOL * scale_of(&s);
        let asym = max_abs(&(&s - s.transpose()));
        if asym > bound {
            return Err(Error::InvalidGenerator(format!("S is not symmetric (deviation {asym:.3e})")));
        }
        let pi = swap_pi(n_modes);
        let herm = max_abs(&(&pi * s.conjugate() * &pi - &s));
        if herm > bound {
            return Err(Error::InvalidGenerator(format!(
                "Pi conj(S) Pi != S, so H is not Hermitian (deviation {herm:.3e})"
            )));
        }
        Ok(QuadraticHamiltonian { n_modes, s, beta })
    }

    /// `S = [[B, A], [Aᵀ, B̄]]` from Hermitian `A` and symmetric `B`.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, beta: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n {
            return Err(Error::InvalidGenerator("A and B must be square of equal size".into()));
        }
        let mut s = CMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(b);
        s.view_mut((0, n), (n, n)).copy_from(a);
        s.view_mut((n, 0), (n, n)).copy_from(&a.transpose());
        s.view_mut((n, n), (n, n)).copy_from(&b.conjugate());
        Self::new(s, n, beta)
    }

    /// `H = ω a†a + ½(ξ a†² + ξ̄ a²)` up to a constant.
    pub fn single_mode(omega: f64, xi: C64, beta: f64) -> Result<Self> {
        Self::from_blocks(&CMatrix::from_element(1, 1, c(omega, 0.0)), &CMatrix::from_element(1, 1, xi), beta)
    }

    /// Two modes with frequencies `ω`, squeezing `ξ` and beamsplitter-type
    /// coupling `g (a†₁a₂ + h.c.)`.
    pub fn two_mode(omega: [f64; 2], xi: [C64; 2], coupling: C64, beta: f64) -> Result<Self> {
        let a = CMatrix::from_row_slice(2, 2, &[c(omega[0], 0.0), coupling, coupling.conj(), c(omega[1], 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[xi[0], c(0.0, 0.0), c(0.0, 0.0), xi[1]]);
        Self::from_blocks(&a, &b, beta)
    }

    /// Random admissible generator scaled so that the spectral radius of
    /// `βN` lies in `[0.6, 3]`. It need not be bounded below.
    pub fn random_admissible<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<Self> {
        let a = random_hermitian(n, rng);
        let g = random_complex(n, n, rng);
        let b = (&g + g.transpose()) * c(0.5, 0.0);
        let raw = Self::from_blocks(&a, &b, beta)?;
        let radius = spectral_radius(&raw.n_matrix());
        let target = 3.0 * rng.random_range(0.2..1.0);
        let factor = if radius > 0.0 { target / (beta * radius) } else { 1.0 };
        Self::new(raw.s * c(factor, 0.0), n, beta)
    }

    /// Random generator whose quadrature form `u†Sū` is positive definite, so
    /// the thermal state exists.
    pub fn random_thermal<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<Self> {
        let g = RMatrix::from_fn(2 * n, 2 * n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let h = &g * g.transpose() / (2.0 * n as f64) + RMatrix::identity(2 * n, 2 * n) * 0.2;
        let u = quadrature_u(n);
        let s = &u * h.map(|v| c(v, 0.0)) * u.transpose();
        let s = symmetrize_admissible(&s, n);
        Self::new(s, n, beta)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.s.clone(), self.n_modes, beta)
    }

    /// `N = −SJ`.
    pub fn n_matrix(&self) -> CMatrix {
        -(&self.s * symplectic_form(self.n_modes))
    }

    /// Real symmetric `h = u†Sū`, with `H = ½ (x,p) h (x,p)ᵀ`.
    pub fn quadrature_form(&self) -> RMatrix {
        let u = quadrature_u(self.n_modes);
        (u.adjoint() * &self.s * u.conjugate()).map(|z| z.re)
    }

    /// Whether `H` is bounded below, i.e. `u†Sū > 0`.
    pub fn is_bounded_below(&self) -> bool {
        let h = self.quadrature_form();
        let h = (&h + h.transpose()) * 0.5;
        let scale = h.amax().max(1.0);
        let min = h.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        min > 1e-12 * scale
    }
}

fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = random_complex(n, n, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

fn spectral_radius(a: &CMatrix) -> f64 {
    a.clone()
        .schur()
        .eigenvalues()
        .map(|e| e.iter().fold(0.0_f64, |m, z| m.max(z.norm())))
        .unwrap_or_else(|| max_abs(a) * a.nrows() as f64)
}

/// Projects onto generators with `Sᵀ = S` and `ΠS̄Π = S`.
fn symmetrize_admissible(s: &CMatrix, n: usize) -> CMatrix {
    let sym = (s + s.transpose()) * c(0.5, 0.0);
    let pi = swap_pi(n);
    (&sym + &pi * sym.conjugate() * &pi) * c(0.5, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Ladder,
    Quadrature,
}

/// Residuals of the identities that exact moments must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IdentityResiduals {
    /// `‖Cᵀ − CM‖`, checked on each spectral half so that no overflowing
    /// power of `M` is formed.
    pub ct_equals_cm: f64,
    /// `‖Cᵀ − C − J‖`.
    pub ct_minus_c: f64,
    /// `||(σ+c)(σ−c)| − |δ|²|`.
    pub saturation: f64,
}

/// Second moments `C`, `σ = (C + Cᵀ)/2`, `c = C√M` and `δ = J/2` of a
/// Gaussian thermal state in either basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    pub n_modes: usize,
    pub basis: Basis,
    pub correlation: CMatrix,
    pub sigma: CMatrix,
    pub classical: CMatrix,
    pub delta: CMatrix,
    /// Condition number of the matrix inverted in place of `M − I`.
    pub condition: f64,
    pub residuals: IdentityResiduals,
    pub warning: Option<String>,
}

impl GaussianMoments {
    /// `σ − c`, the skew-information block.
    pub fn skew(&self) -> CMatrix {
        &self.sigma - &self.classical
    }

    /// `|(σ+c)(σ−c)| − |δ|²` from determinant magnitudes.
    pub fn delta_g(&self) -> f64 {
        let plus = (&self.sigma + &self.classical).determinant().norm();
        let minus = (&self.sigma - &self.classical).determinant().norm();
        let d = self.delta.determinant().norm();
        plus * minus - d * d
    }

    /// Real parts, valid in the quadrature basis.
    pub fn sigma_real(&self) -> RMatrix {
        self.sigma.map(|z| z.re)
    }

    pub fn classical_real(&self) -> RMatrix {
        self.classical.map(|z| z.re)
    }

    pub fn skew_real(&self) -> RMatrix {
        self.skew().map(|z| z.re)
    }
}

struct Split {
    corr: CMatrix,
    classical: CMatrix,
    condition: f64,
    ct_cm: f64,
}

/// Sign of `N + εI`: eigenvalues on the imaginary axis, where `e^{−βN}` is
/// bounded, join the positive half.
fn spectral_split(n_mat: &CMatrix) -> Option<CMatrix> {
    let dim = n_mat.nrows();
    let scale = max_abs(n_mat).max(1.0);
    let shifted = n_mat + identity(dim) * c(1e-6 * scale, 0.0);
    let sign = matrix_sign(&shifted)?;
    let commute = max_abs(&(&sign * n_mat - n_mat * &sign));
    if commute > 1e-8 * scale * max_abs(&sign).max(1.0) {
        return None;
    }
    Some(sign)
}

/// `(M − I)⁻¹` and `(M − I)⁻¹√M` assembled from the spectral halves of `N`
/// so that `e^{β|ν|}` never appears.
fn split_moments(n_mat: &CMatrix, beta: f64, j: &CMatrix) -> Option<Split> {
    let dim = n_mat.nrows();
    let id = identity(dim);
    let (p_plus, p_minus) = match spectral_split(n_mat) {
        Some(sign) => ((&id + &sign) * c(0.5, 0.0), (&id - &sign) * c(0.5, 0.0)),
        None => (id.clone(), CMatrix::zeros(dim, dim)),
    };
    let np = n_mat * &p_plus;
    let nm = n_mat * &p_minus;
    let e_plus = (&np * c(-beta, 0.0)).exp();
    let e_minus = (&nm * c(beta, 0.0)).exp();
    let g_plus = (&np * c(-0.5 * beta, 0.0)).exp();
    let g_minus = (&nm * c(0.5 * beta, 0.0)).exp();

    let a_plus = &e_plus - &id + &p_minus;
    let a_minus = &id - &e_minus + &p_plus;
    let inv_plus = inverse(&a_plus)?;
    let inv_minus = inverse(&a_minus)?;
    let condition = condition_number(&a_plus).max(condition_number(&a_minus));

    let resolvent = (&inv_plus - &p_minus) + (&e_minus * &inv_minus - &p_plus);
    let half = (&g_plus * &inv_plus - &p_minus) + (&g_minus * &inv_minus - &p_plus);
    let corr = j * resolvent;
    let classical = j * half;

    let ct = corr.transpose();
    let r1 = max_abs(&(&ct * &p_plus - &corr * &e_plus * &p_plus));
    let r2 = max_abs(&(&ct * &e_minus * &p_minus - &corr * &p_minus));
    Some(Split { corr, classical, condition, ct_cm: r1.max(r2) })
}

/// Exact moments of `e^{−βH}/Z` in the ladder basis.
///
/// When `M − I` is numerically singular, `N` is perturbed by `1e-8` along a
/// random admissible direction and a warning is attached.
pub fn exact_moments(h: &QuadraticHamiltonian) -> Result<GaussianMoments> {
    let n = h.n_modes;
    let j = symplectic_form(n);
    let n_mat = h.n_matrix();
    let mut warning = None;
    let mut split = split_moments(&n_mat, h.beta, &j);
    let singular = |s: &Option<Split>| s.as_ref().is_none_or(|s| !(s.condition < SINGULAR_CONDITION));
    if singular(&split) {
        let before = split.as_ref().map_or(f64::INFINITY, |s| s.condition);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let dir = QuadraticHamiltonian::random_admissible(n, 1.0, &mut rng)?;
        let dir_n = dir.n_matrix();
        let scale = PERTURBATION * max_abs(&n_mat).max(1.0) / max_abs(&dir_n).max(f64::MIN_POSITIVE);
        let perturbed = &n_mat + dir_n * c(scale, 0.0);
        split = split_moments(&perturbed, h.beta, &j);
        if singular(&split) {
            return Err(Error::SingularM { condition: split.map_or(f64::INFINITY, |s| s.condition) });
        }
        warning = Some(format!(
            "M - I was singular (condition {before:.3e}); N perturbed by relative {PERTURBATION:e}"
        ));
    }
    let s = split.expect("checked above");
    let corr = s.corr;
    let sigma = (&corr + corr.transpose()) * c(0.5, 0.0);
    let delta = &j * c(0.5, 0.0);
    let ct_minus_c = max_abs(&(corr.transpose() - &corr - &j));
    let mut m = GaussianMoments {
        n_modes: n,
        basis: Basis::Ladder,
        correlation: corr,
        sigma,
        classical: s.classical,
        delta,
        condition: s.condition,
        residuals: IdentityResiduals { ct_equals_cm: s.ct_cm, ct_minus_c, saturation: 0.0 },
        warning,
    };
    m.residuals.saturation = m.delta_g().abs();
    Ok(m)
}

/// Congruence by `u`: `σ_X = uᵀσ_Λu` and likewise for `C`, `c`, `δ`.
pub fn to_quadrature(m: &GaussianMoments) -> Result<GaussianMoments> {
    if m.basis == Basis::Quadrature {
        return Err(Error::AlreadyQuadrature);
    }
    let u = quadrature_u(m.n_modes);
    let ut = u.transpose();
    let tr = |a: &CMatrix| &ut * a * &u;
    Ok(GaussianMoments {
        n_modes: m.n_modes,
        basis: Basis::Quadrature,
        correlation: tr(&m.correlation),
        sigma: tr(&m.sigma),
        classical: tr(&m.classical),
        delta: tr(&m.delta),
        condition: m.condition,
        residuals: m.residuals,
        warning: m.warning.clone(),
    })
}

/// Truncated annihilation operator on `cutoff` Fock levels.
pub fn annihilation(cutoff: usize) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff, cutoff);
    for m in 1..cutoff {
        a[(m - 1, m)] = c((m as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation operators of each mode on the `cutoffⁿ` product space;
/// mode 1 is the most significant tensor factor.
pub fn mode_operators(n_modes: usize, cutoff: usize) -> Vec<CMatrix> {
    let a = annihilation(cutoff);
    let id = identity(cutoff);
    (0..n_modes)
        .map(|k| {
            let mut op = CMatrix::identity(1, 1);
            for slot in 0..n_modes {
                op = op.kronecker(if slot == k { &a } else { &id });
            }
            op
        })
        .collect()
}

/// `x_k = (a†_k + a_k)/√2` and `p_k = i(a†_k − a_k)/√2`, ordered
/// `(x₁, …, xₙ, p₁, …, pₙ)`.
pub fn quadrature_observables(n_modes: usize, cutoff: usize) -> Result<ObservableSet> {
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall { cutoff, minimum: 2 });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ops = mode_operators(n_modes, cutoff);
    let mut xs = Vec::with_capacity(2 * n_modes);
    for a in &ops {
        xs.push((a.adjoint() + a) * c(s, 0.0));
    }
    for a in &ops {
        xs.push((a.adjoint() - a) * c(0.0, s));
    }
    ObservableSet::from_matrices(xs)
}

/// A thermal state on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct TruncatedThermal {
    pub rho: DensityMatrix,
    pub cutoff: usize,
    /// Estimated weight of the untruncated state beyond the cutoff.
    pub tail_mass: f64,
}

fn check_fock_args(n_modes: usize, cutoff: usize) -> Result<()> {
    if !(1..=2).contains(&n_modes) {
        return Err(Error::UnsupportedModeCount(n_modes));
    }
    if cutoff < MIN_CUTOFF {
        return Err(Error::CutoffTooSmall { cutoff, minimum: MIN_CUTOFF });
    }
    Ok(())
}

/// Tail estimate `Σ_k r_k^cutoff` with `r_k = m_k/(m_k + 1)` and
/// `m_k = ⟨a†_k a_k⟩ + |⟨a_k²⟩|`; exact for thermal states without squeezing.
pub fn tail_estimate(moments: &GaussianMoments, cutoff: usize) -> f64 {
    let n = moments.n_modes;
    (0..n)
        .map(|k| {
            let occ = moments.correlation[(k, n + k)].re.max(0.0);
            let anomalous = moments.correlation[(n + k, n + k)].norm();
            let m = occ + anomalous;
            (m / (m + 1.0)).powi(cutoff as i32)
        })
        .sum()
}

/// `e^{−βH_trunc}/Z` with `H_trunc` assembled from truncated ladder matrices.
pub fn fock_truncate_thermal(h: &QuadraticHamiltonian, cutoff: usize) -> Result<TruncatedThermal> {
    check_fock_args(h.n_modes, cutoff)?;
    if !h.is_bounded_below() {
        return Err(Error::InvalidGenerator("H is not bounded below, so no thermal state exists".into()));
    }
    let n = h.n_modes;
    let ops = mode_operators(n, cutoff);
    let ladder: Vec<CMatrix> = ops.iter().map(|a| a.adjoint()).chain(ops.iter().cloned()).collect();
    let dim = ops[0].nrows();
    let mut ham = CMatrix::zeros(dim, dim);
    for i in 0..2 * n {
        for k in 0..2 * n {
            let s = h.s[(i, k)];
            if s != c(0.0, 0.0) {
                ham += (&ladder[i] * &ladder[k]) * (s * 0.5);
            }
        }
    }
    let ham = HermitianMatrix::with_tolerance(ham, 1e-9)?;
    let eig = ham.eigen();
    let e0 = eig.min();
    let beta = h.beta;
    let z: f64 = eig.values.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    let rho = eig.apply(|e| (-beta * (e - e0)).exp() / z);
    let rho = DensityMatrix::new(rho)?;
    let tail_mass = tail_estimate(&exact_moments(h)?, cutoff);
    Ok(TruncatedThermal { rho, cutoff, tail_mass })
}

/// `Δ_G` of an arbitrary state on the truncated Fock space, using the `2n`
/// quadratures as observables.
pub fn nongaussianity(rho: &DensityMatrix, n_modes: usize, cutoff: usize) -> Result<f64> {
    let expected = cutoff.checked_pow(n_modes as u32).unwrap_or(usize::MAX);
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: rho.dim() });
    }
    let x = quadrature_observables(n_modes, cutoff)?;
    Ok(check_refined_rs(rho, &x)?.delta_g)
}

/// Exact and Fock-space values of `Δ_G` for a thermal state.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SaturationResult {
    pub delta_g_exact: f64,
    pub delta_g_numeric: f64,
    pub tail_mass: f64,
}

pub fn saturation_check(h: &QuadraticHamiltonian, cutoff: usize) -> Result<SaturationResult> {
    check_fock_args(h.n_modes, cutoff)?;
    let exact = to_quadrature(&exact_moments(h)?)?;
    let fock = fock_truncate_thermal(h, cutoff)?;
    let numeric = nongaussianity(&fock.rho, h.n_modes, cutoff)?;
    Ok(SaturationResult { delta_g_exact: exact.delta_g(), delta_g_numeric: numeric, tail_mass: fock.tail_mass })
}

/// Ladder-basis correlation matrix `C_ij = Tr ρ Λ_i Λ_j` of a Fock-space state.
pub fn fock_correlation(rho: &DensityMatrix, n_modes: usize, cutoff: usize) -> Result<CMatrix> {
    let expected = cutoff.checked_pow(n_modes as u32).unwrap_or(usize::MAX);
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: rho.dim() });
    }
    let ops = mode_operators(n_modes, cutoff);
    let ladder: Vec<CMatrix> = ops.iter().map(|a| a.adjoint()).chain(ops.iter().cloned()).collect();
    Ok(CMatrix::from_fn(2 * n_modes, 2 * n_modes, |i, k| rho.expectation(&(&ladder[i] * &ladder[k]))))
}

/// Recovers a generator with `β = 1` from a correlation matrix through
/// `M′ = C⁻¹Cᵀ` and `N′ = −log M′` on the principal branch.
pub fn generator_from_covariance(corr: &CMatrix, n_modes: usize) -> Result<QuadraticHamiltonian> {
    let dim = 2 * n_modes;
    if corr.nrows() != dim || corr.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: corr.nrows() });
    }
    let j = symplectic_form(n_modes);
    let scale = scale_of(corr);
    let ccr = max_abs(&(corr.transpose() - corr - &j));
    if ccr > 1e-8 * scale {
        return Err(Error::NonSymplectic(format!("C^T - C differs from J by {ccr:.3e}")));
    }
    let cond = condition_number(corr);
    if !(cond < SINGULAR_CONDITION) {
        return Err(Error::NonSymplectic(format!("C is numerically singular (condition {cond:.3e})")));
    }
    let inv = inverse(corr).ok_or_else(|| Error::NonSymplectic("C is singular".into()))?;
    let m = inv * corr.transpose();
    let sympl = max_abs(&(m.transpose() * &j * &m - &j));
    if sympl > 1e-8 * scale_of(&m).powi(2) {
        return Err(Error::NonSymplectic(format!("M' is not symplectic (deviation {sympl:.3e})")));
    }
    let n_prime = -principal_log(&m)?;
    let s = &n_prime * &j;
    QuadraticHamiltonian::new(symmetrize_admissible(&s, n_modes), n_modes, 1.0)
}

/// Mixture `t|0⟩⟨0| + (1−t)|k⟩⟨k|` of Fock states, single mode.
pub fn fock_mixture(cutoff: usize, k: usize, t: f64) -> Result<DensityMatrix> {
    if k >= cutoff {
        return Err(Error::InvalidParameter(format!("Fock level {k} needs cutoff > {k}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("mixing weight {t} outside [0, 1]")));
    }
    let mut p = vec![0.0; cutoff];
    p[0] += t;
    p[k] += 1.0 - t;
    DensityMatrix::from_diagonal(&p)
}

/// Single-mode Fock state `|k⟩`.
pub fn fock_state(cutoff: usize, k: usize) -> Result<DensityMatrix> {
    fock_mixture(cutoff, k, 0.0)
}

/// Real-matrix helper used by reports: `DMatrix<f64>` from the real part.
pub fn real_of(m: &CMatrix) -> RMatrix {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}
