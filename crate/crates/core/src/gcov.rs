//! Generalized covariance: the superoperator `J_ρ^g`, g-covariance matrices,
//! metric-adjusted skew information and the constant `λ_f`.
//!
//! Every kernel is evaluated only at eigenvalue pairs of the state at hand.
//! Observables are centered before use, so the kernel `(x+y)/2` reproduces the
//! covariance matrix exactly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, det_numerical, CMatrix, DensityMatrix, HermitianMatrix, RMatrix, Tolerances, C64};
use crate::margin::Margin;
use crate::skew::{commutator_matrix, covariance_matrix, i_delta, wy_skew_matrix, ObservableSet};

type KernelFn = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;

/// A complex function `g(x, y)` on `[0, ∞)²`.
#[derive(Clone)]
pub struct BivariateKernel {
    label: String,
    eval: KernelFn,
    nonnegative: bool,
    symmetric: bool,
}

impl fmt::Debug for BivariateKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateKernel")
            .field("label", &self.label)
            .field("nonnegative", &self.nonnegative)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

/// Sample points used to validate kernel flags and monotone functions.
fn validation_points() -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend((-12..=12).map(|k| 10f64.powf(k as f64 / 2.0)));
    pts.extend([0.25, 0.5, 0.75, 1.5, 2.0, 3.0]);
    pts
}

impl BivariateKernel {
    /// Builds a kernel and checks the claimed flags on a sample grid.
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
        nonnegative: bool,
        symmetric: bool,
    ) -> Result<Self> {
        let k = Self::trusted(label, eval, nonnegative, symmetric);
        k.validate()?;
        Ok(k)
    }

    fn trusted(
        label: impl Into<String>,
        eval: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
        nonnegative: bool,
        symmetric: bool,
    ) -> Self {
        BivariateKernel { label: label.into(), eval: Arc::new(eval), nonnegative, symmetric }
    }

    fn validate(&self) -> Result<()> {
        let pts = validation_points();
        for &x in &pts {
            for &y in &pts {
                let v = self.eval(x, y);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::KernelDomain { label: self.label.clone(), x, y });
                }
                let scale = v.norm().max(1.0);
                if self.nonnegative && (v.re < -1e-12 * scale || v.im.abs() > 1e-12 * scale) {
                    return Err(Error::KernelContract(format!(
                        "{} flagged nonnegative but g({x}, {y}) = {v}",
                        self.label
                    )));
                }
                if self.symmetric && (v - self.eval(y, x)).norm() > 1e-12 * scale {
                    return Err(Error::KernelContract(format!("{} flagged symmetric but is not", self.label)));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        (self.eval)(x, y)
    }

    /// `g ≡ v`.
    pub fn constant(v: f64) -> Self {
        Self::trusted(format!("const:{v}"), move |_, _| c(v, 0.0), v >= 0.0, true)
    }

    /// `(x + y)/2`: reproduces the covariance matrix.
    pub fn mean() -> Self {
        Self::trusted("mean", |x, y| c(0.5 * (x + y), 0.0), true, true)
    }

    /// `ε(x, y) = i(y − x)/2`: reproduces the commutator matrix.
    pub fn eps() -> Self {
        Self::trusted("eps", |x, y| c(0.0, 0.5 * (y - x)), false, false)
    }

    /// `xy`.
    pub fn product() -> Self {
        Self::trusted("product", |x, y| c(x * y, 0.0), true, true)
    }

    /// `m_f(x, y) = y f(x/y)`.
    pub fn m_f(f: &MonotoneFunction) -> Self {
        let f = f.clone();
        Self::trusted(format!("m_f[{}]", f.label()), move |x, y| c(f.mean(x, y), 0.0), true, true)
    }

    /// `m_{f*}(x, y) = f(0)(x − y)² / (2 m_f(x, y))`: reproduces `I^f`.
    pub fn m_f_star(f: &MonotoneFunction) -> Self {
        let f = f.clone();
        Self::trusted(format!("m_f*[{}]", f.label()), move |x, y| c(f.skew_kernel(x, y), 0.0), true, true)
    }

    /// `√m_f`.
    pub fn sqrt_m_f(f: &MonotoneFunction) -> Self {
        let f = f.clone();
        Self::trusted(format!("sqrt_m_f[{}]", f.label()), move |x, y| c(f.mean(x, y).sqrt(), 0.0), true, true)
    }

    /// Pointwise conjugate.
    pub fn conj(&self) -> Self {
        let g = self.eval.clone();
        Self::trusted(format!("conj({})", self.label), move |x, y| g(x, y).conj(), self.nonnegative, self.symmetric)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &BivariateKernel) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::trusted(
            format!("{}*{}", self.label, other.label),
            move |x, y| a(x, y) * b(x, y),
            self.nonnegative && other.nonnegative,
            self.symmetric && other.symmetric,
        )
    }

    /// `|g|²`.
    pub fn abs2(&self) -> Self {
        let g = self.eval.clone();
        Self::trusted(format!("|{}|^2", self.label), move |x, y| c(g(x, y).norm_sqr(), 0.0), true, self.symmetric)
    }

    /// `ḡ₁·g₂`, the kernel of the off-diagonal Gram block.
    pub fn conj_mul(g1: &BivariateKernel, g2: &BivariateKernel) -> Self {
        g1.conj().mul(g2)
    }

    pub fn scaled(&self, s: C64) -> Self {
        let g = self.eval.clone();
        let nonneg = self.nonnegative && s.im == 0.0 && s.re >= 0.0;
        Self::trusted(format!("{s}*{}", self.label), move |x, y| s * g(x, y), nonneg, self.symmetric)
    }

    pub fn add(&self, other: &BivariateKernel) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::trusted(
            format!("{}+{}", self.label, other.label),
            move |x, y| a(x, y) + b(x, y),
            self.nonnegative && other.nonnegative,
            self.symmetric && other.symmetric,
        )
    }

    /// `num / den` with `0/0 := 0`; a zero denominator under a nonzero
    /// numerator evaluates to NaN and is reported as a domain error on use.
    pub fn quotient(num: &BivariateKernel, den: &BivariateKernel) -> Self {
        let (a, b) = (num.eval.clone(), den.eval.clone());
        Self::trusted(
            format!("{}/{}", num.label, den.label),
            move |x, y| {
                let n = a(x, y);
                let d = b(x, y);
                if d == C64::new(0.0, 0.0) {
                    if n == C64::new(0.0, 0.0) {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::new(f64::NAN, f64::NAN)
                    }
                } else {
                    n / d
                }
            },
            num.nonnegative && den.nonnegative,
            num.symmetric && den.symmetric,
        )
    }

    /// Resolves a catalog label: `mean`, `eps`, or a monotone-function label
    /// (`wy`, `wyd:<α>`, `sld`) which names its skew kernel `m_{f*}`.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "mean" => Ok(Self::mean()),
            "eps" => Ok(Self::eps()),
            other => Ok(Self::m_f_star(&MonotoneFunction::from_label(other)?)),
        }
    }

    /// Matrix `G_ab = g(λ_a, λ_b)` over the spectrum of `rho`.
    fn on_spectrum(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        let lam = &rho.eigen().values;
        let d = lam.len();
        let mut g = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let v = self.eval(lam[a], lam[b]);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::KernelDomain { label: self.label.clone(), x: lam[a], y: lam[b] });
                }
                g[(a, b)] = v;
            }
        }
        Ok(g)
    }
}

/// Kernels `g± = (a_x ± a_y)(b_x ± b_y)` and `g₀ = μ(a_x b_y − a_y b_x)` built
/// from two scalar functions.
pub fn product_kernels(
    a: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    b: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    mu: f64,
) -> (BivariateKernel, BivariateKernel, BivariateKernel) {
    let (a1, b1) = (a.clone(), b.clone());
    let plus = BivariateKernel::trusted("g+", move |x, y| c((a1(x) + a1(y)) * (b1(x) + b1(y)), 0.0), false, true);
    let (a2, b2) = (a.clone(), b.clone());
    let minus = BivariateKernel::trusted("g-", move |x, y| c((a2(x) - a2(y)) * (b2(x) - b2(y)), 0.0), false, true);
    let zero = BivariateKernel::trusted("g0", move |x, y| c(mu * (a(x) * b(y) - a(y) * b(x)), 0.0), false, false);
    (plus, minus, zero)
}

/// `J_ρ^g(Z) = Σ g(λ_j, λ_k) P_j Z P_k`.
pub fn apply_superop(rho: &DensityMatrix, g: &BivariateKernel, z: &CMatrix) -> Result<CMatrix> {
    if z.nrows() != rho.dim() || z.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: z.nrows() });
    }
    let weights = g.on_spectrum(rho)?;
    let eig = rho.eigen();
    let zb = eig.to_eigenbasis(z).component_mul(&weights);
    Ok(eig.from_eigenbasis(&zb))
}

/// `[[σ_X(g)]]_kj = Tr X'_k J_ρ^g(X'_j)` over centered observables.
pub fn g_covariance(rho: &DensityMatrix, x: &ObservableSet, g: &BivariateKernel) -> Result<CMatrix> {
    let centered = x.centered(rho)?;
    let weights = g.on_spectrum(rho)?;
    let eig = rho.eigen();
    let zs: Vec<CMatrix> = centered.iter().map(|m| eig.to_eigenbasis(m)).collect();
    let n = x.len();
    let d = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    acc += zs[k][(b, a)] * weights[(a, b)] * zs[j][(a, b)];
                }
            }
            out[(k, j)] = acc;
        }
    }
    Ok(out)
}

/// Which member of the regular symmetric operator monotone family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneFamily {
    /// `f_α(x) = α(1−α)(1−x)² / ((1−x^α)(1−x^{1−α}))`, `0 < α ≤ ½`.
    Wyd(f64),
    /// `f_M(x) = (1+x)/2`.
    Sld,
    /// User-supplied member, validated on a grid only.
    Custom,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A normalized, symmetric, regular operator monotone function `f`.
#[derive(Clone)]
pub struct MonotoneFunction {
    label: String,
    family: MonotoneFamily,
    f0: f64,
    eval: ScalarFn,
}

impl fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFunction")
            .field("label", &self.label)
            .field("family", &self.family)
            .field("f0", &self.f0)
            .finish()
    }
}

fn wyd_eval(alpha: f64, x: f64) -> f64 {
    if x == 1.0 {
        return 1.0;
    }
    if x == 0.0 {
        return alpha * (1.0 - alpha);
    }
    if alpha == 0.5 {
        let r = 1.0 + x.sqrt();
        return 0.25 * r * r;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let lx = x.ln();
    let d1 = -(alpha * lx).exp_m1();
    let d2 = -((1.0 - alpha) * lx).exp_m1();
    alpha * (1.0 - alpha) * (1.0 - x) * (1.0 - x) / (d1 * d2)
}

impl MonotoneFunction {
    /// Wigner-Yanase-Dyson member `f_α`.
    pub fn wyd(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::InvalidParameter(format!("WYD parameter α = {alpha} outside (0, 1/2]")));
        }
        let label = if alpha == 0.5 { "wy".to_string() } else { format!("wyd:{alpha}") };
        Ok(MonotoneFunction {
            label,
            family: MonotoneFamily::Wyd(alpha),
            f0: alpha * (1.0 - alpha),
            eval: Arc::new(move |x| wyd_eval(alpha, x)),
        })
    }

    /// Wigner-Yanase, `f_{1/2}(x) = (1+√x)²/4`.
    pub fn wy() -> Self {
        Self::wyd(0.5).expect("1/2 is in range")
    }

    /// `f_M(x) = (1+x)/2`.
    pub fn sld() -> Self {
        MonotoneFunction {
            label: "sld".into(),
            family: MonotoneFamily::Sld,
            f0: 0.5,
            eval: Arc::new(|x| 0.5 * (1.0 + x)),
        }
    }

    /// A user-supplied member; rejected unless it passes [`Self::validate`].
    /// Operator monotonicity itself cannot be checked from samples.
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let f0 = f(0.0);
        let m = MonotoneFunction { label: label.into(), family: MonotoneFamily::Custom, f0, eval: Arc::new(f) };
        m.validate()?;
        Ok(m)
    }

    /// `wy`, `sld`, or `wyd:<α>`.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "wy" => Ok(Self::wy()),
            "sld" => Ok(Self::sld()),
            other => match other.strip_prefix("wyd:") {
                Some(a) => {
                    let alpha: f64 =
                        a.parse().map_err(|_| Error::InvalidParameter(format!("cannot parse α in `{other}`")))?;
                    Self::wyd(alpha)
                }
                None => Err(Error::UnknownLabel(other.to_string())),
            },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn family(&self) -> MonotoneFamily {
        self.family
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `m_f(x, y) = y f(x/y)`, evaluated with the larger argument outside.
    pub fn mean(&self, x: f64, y: f64) -> f64 {
        if x == 0.0 && y == 0.0 {
            0.0
        } else if x >= y {
            x * self.eval(y / x)
        } else {
            y * self.eval(x / y)
        }
    }

    /// `f_*(x) = f(0)(1−x)² / (2 f(x))`.
    pub fn f_star(&self, x: f64) -> f64 {
        self.f0 * (1.0 - x) * (1.0 - x) / (2.0 * self.eval(x))
    }

    /// `m_{f*}(x, y)`; zero on the diagonal, including at the origin.
    pub fn skew_kernel(&self, x: f64, y: f64) -> f64 {
        if x == y {
            return 0.0;
        }
        self.f0 * (x - y) * (x - y) / (2.0 * self.mean(x, y))
    }

    /// `F(x) = (1 + x − f_*(x)) / (2 f(x))`, whose minimum is `λ_f`.
    pub fn big_f(&self, x: f64) -> f64 {
        (1.0 + x - self.f_star(x)) / (2.0 * self.eval(x))
    }

    /// Grid checks: normalization, symmetry, regularity, midpoint concavity and
    /// the bounds `f(0)(1+x) ≤ f(x) ≤ (1+x)/2`.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidMonotone { label: self.label.clone(), reason });
        if !(self.f0 > 0.0) || !self.f0.is_finite() {
            return fail(format!("f(0) = {} is not positive", self.f0));
        }
        if (self.eval(1.0) - 1.0).abs() > 1e-12 {
            return fail(format!("f(1) = {} is not 1", self.eval(1.0)));
        }
        let grid: Vec<f64> = (-60..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        for &x in &grid {
            let fx = self.eval(x);
            let tol = 1e-10 * fx.abs().max(1.0);
            if !fx.is_finite() {
                return fail(format!("f({x}) is not finite"));
            }
            if (x * self.eval(1.0 / x) - fx).abs() > tol {
                return fail(format!("x f(1/x) != f(x) at x = {x}"));
            }
            if fx < self.f0 * (1.0 + x) - tol || fx > 0.5 * (1.0 + x) + tol {
                return fail(format!("f({x}) = {fx} outside [f(0)(1+x), (1+x)/2]"));
            }
        }
        for w in grid.windows(3) {
            let (a, b) = (w[0], w[2]);
            let mid = 0.5 * (a + b);
            let chord = 0.5 * (self.eval(a) + self.eval(b));
            if self.eval(mid) < chord - 1e-10 * chord.abs().max(1.0) {
                return fail(format!("not concave on [{a}, {b}]"));
            }
        }
        Ok(())
    }

    /// Grid test of `f(x) ≤ f(0)(1+√x)²`, equivalent to `λ_f = 1/(4f(0))`.
    pub fn in_wy_class(&self) -> bool {
        (-80..=80).map(|k| 10f64.powf(k as f64 / 10.0)).all(|x| {
            let bound = self.f0 * (1.0 + x.sqrt()).powi(2);
            self.eval(x) <= bound + 1e-10 * bound.max(1.0)
        })
    }
}

/// Metric-adjusted skew information matrix `I_X^f` from the spectral sum
/// `(f(0)/2) Σ_jk (λ_k − λ_j)² / (λ_j f(λ_k/λ_j)) Re Tr P_k X_a P_j X_b`.
pub fn f_skew_matrix(rho: &DensityMatrix, x: &ObservableSet, f: &MonotoneFunction) -> Result<RMatrix> {
    x.check_state(rho)?;
    let eig = rho.eigen();
    let lam = &eig.values;
    let d = lam.len();
    let zs: Vec<CMatrix> = x.iter().map(|o| eig.to_eigenbasis(o.matrix())).collect();
    let mut coef = vec![vec![0.0; d]; d];
    for k in 0..d {
        for j in 0..d {
            let diff = lam[k] - lam[j];
            if diff == 0.0 {
                continue;
            }
            let denom = if lam[j] > 0.0 { lam[j] * f.eval(lam[k] / lam[j]) } else { lam[k] * f.f0() };
            coef[k][j] = 0.5 * f.f0() * diff * diff / denom;
        }
    }
    let n = x.len();
    let mut out = RMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for k in 0..d {
                for j in 0..d {
                    if coef[k][j] != 0.0 {
                        acc += coef[k][j] * (zs[a][(k, j)] * zs[b][(j, k)]).re;
                    }
                }
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc;
        }
    }
    Ok(out)
}

/// Minimum of `F` with its bounds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LambdaResult {
    pub lambda: f64,
    /// Minimizer; `0` when the infimum is the endpoint value `F(0) = F(∞)`.
    pub argmin_x: f64,
    /// `1 − f(0)`.
    pub lower_bound: f64,
    /// `min{1, 1/(4 f(0))}`.
    pub upper_bound: f64,
    /// Whether `λ_f = min{1, 1/(4f(0))}` to within 1e-6 (reported, never asserted).
    pub conjecture_match: bool,
}

pub const LAMBDA_GRID_POINTS: usize = 4097;

/// `λ_f = min_{x ≥ 0} F(x)`: log grid on `[1e-8, 1e8]`, the analytic endpoint
/// value `1/(4f(0))`, then golden-section refinement around the best cell.
pub fn lambda_f(f: &MonotoneFunction) -> LambdaResult {
    let lo = -8.0_f64;
    let hi = 8.0_f64;
    let step = (hi - lo) / (LAMBDA_GRID_POINTS - 1) as f64;
    let ff = |t: f64| f.big_f(10f64.powf(t));
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for i in 0..LAMBDA_GRID_POINTS {
        let v = ff(lo + step * i as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(LAMBDA_GRID_POINTS - 1) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = ff(x1);
    let mut f2 = ff(x2);
    // |Δ log10 x| < 4e-11 is a relative change in x below 1e-10
    while b - a > 4e-11 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ff(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ff(x2);
        }
    }
    let (t_ref, v_ref) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let (mut lambda, mut argmin) = if v_ref <= best_val {
        (v_ref, 10f64.powf(t_ref))
    } else {
        (best_val, 10f64.powf(lo + step * best as f64))
    };
    let endpoint = 1.0 / (4.0 * f.f0());
    if endpoint <= lambda {
        lambda = endpoint;
        argmin = 0.0;
    }
    let upper = endpoint.min(1.0);
    LambdaResult {
        lambda,
        argmin_x: argmin,
        lower_bound: 1.0 - f.f0(),
        upper_bound: upper,
        conjecture_match: (lambda - upper).abs() <= 1e-6,
    }
}

/// `F` sampled on a log grid, for plotting.
pub fn big_f_curve(f: &MonotoneFunction, lo_exp: f64, hi_exp: f64, points: usize) -> Vec<(f64, f64)> {
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let x = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (points - 1) as f64);
            (x, f.big_f(x))
        })
        .collect()
}

/// `L_X^g = [[σ(|g₁|²), σ(ḡ₁g₂)], [σ(ḡ₂g₁), σ(|g₂|²)]]`.
pub fn build_lg(
    rho: &DensityMatrix,
    x: &ObservableSet,
    g1: &BivariateKernel,
    g2: &BivariateKernel,
) -> Result<HermitianMatrix> {
    let n = x.len();
    let b11 = g_covariance(rho, x, &g1.abs2())?;
    let b12 = g_covariance(rho, x, &BivariateKernel::conj_mul(g1, g2))?;
    let b21 = g_covariance(rho, x, &BivariateKernel::conj_mul(g2, g1))?;
    let b22 = g_covariance(rho, x, &g2.abs2())?;
    let mut l = CMatrix::zeros(2 * n, 2 * n);
    l.view_mut((0, 0), (n, n)).copy_from(&b11);
    l.view_mut((0, n), (n, n)).copy_from(&b12);
    l.view_mut((n, 0), (n, n)).copy_from(&b21);
    l.view_mut((n, n), (n, n)).copy_from(&b22);
    HermitianMatrix::with_tolerance(l, 1e-9)
}

/// The pair `g₁ = √m_f`, `g₂ = ε/g₁`.
pub fn metric_adjusted_pair(f: &MonotoneFunction) -> (BivariateKernel, BivariateKernel) {
    let g1 = BivariateKernel::sqrt_m_f(f);
    let g2 = BivariateKernel::quotient(&BivariateKernel::eps(), &g1);
    (g1, g2)
}

/// Margin of `|σ(g₊)|·|σ(g₋)| ≥ |σ(g₀)|²`.
///
/// The pointwise contract `g₊, g₋ ≥ 0` and `g₊g₋ ≥ |g₀|²` is verified on the
/// eigenvalue pairs of `rho`.
pub fn check_g_triple(
    rho: &DensityMatrix,
    x: &ObservableSet,
    g_plus: &BivariateKernel,
    g_minus: &BivariateKernel,
    g0: &BivariateKernel,
) -> Result<Margin> {
    let gp = g_plus.on_spectrum(rho)?;
    let gm = g_minus.on_spectrum(rho)?;
    let gz = g0.on_spectrum(rho)?;
    for (idx, ((p, m), z)) in gp.iter().zip(gm.iter()).zip(gz.iter()).enumerate() {
        let scale = (p.norm() * m.norm()).max(z.norm_sqr()).max(1.0);
        let tol = 1e-12 * scale;
        if p.re < -tol || m.re < -tol || p.im.abs() > tol || m.im.abs() > tol {
            return Err(Error::KernelContract(format!("g+ or g- negative at spectrum pair {idx}")));
        }
        if p.re * m.re < z.norm_sqr() - tol {
            return Err(Error::KernelContract(format!("g+ g- < |g0|^2 at spectrum pair {idx}")));
        }
    }
    let sp = HermitianMatrix::with_tolerance(g_covariance(rho, x, g_plus)?, 1e-9)?;
    let sm = HermitianMatrix::with_tolerance(g_covariance(rho, x, g_minus)?, 1e-9)?;
    let s0 = g_covariance(rho, x, g0)?;
    let lhs = det_numerical(&sp) * det_numerical(&sm);
    let rhs = s0.determinant().norm_sqr();
    Ok(Margin::new(lhs - rhs, lhs.abs().max(rhs)))
}

/// Margins of the two metric-adjusted relations for one monotone function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAdjustedMargins {
    /// `|σ(m_f)|·|I^f| − [2f(0)]^n |δ|²`.
    pub margin18: Margin,
    /// `|σ − c^f|·|σ + c^f| − [4λ_f f(0)]^n |δ|²`.
    pub margin19: Margin,
    pub lambda: f64,
}

pub fn check_metric_adjusted(
    rho: &DensityMatrix,
    x: &ObservableSet,
    f: &MonotoneFunction,
) -> Result<MetricAdjustedMargins> {
    check_metric_adjusted_with_lambda(rho, x, f, lambda_f(f).lambda)
}

/// As [`check_metric_adjusted`] with a precomputed `λ_f`.
pub fn check_metric_adjusted_with_lambda(
    rho: &DensityMatrix,
    x: &ObservableSet,
    f: &MonotoneFunction,
    lambda: f64,
) -> Result<MetricAdjustedMargins> {
    let n = x.len() as i32;
    let sigma = covariance_matrix(rho, x)?;
    let delta = commutator_matrix(rho, x)?;
    let det_delta = if n % 2 == 1 { 0.0 } else { det_numerical(&i_delta(&delta)).abs() };
    let d2 = det_delta * det_delta;
    let skew_f = f_skew_matrix(rho, x, f)?;
    let m_f = g_covariance(rho, x, &BivariateKernel::m_f(f))?;
    let det_mf = det_numerical(&HermitianMatrix::with_tolerance(m_f, 1e-9)?);
    let det_if = det_numerical(&HermitianMatrix::from_real_symmetric(&skew_f)?);
    let det_plus = det_numerical(&HermitianMatrix::from_real_symmetric(&(&sigma * 2.0 - &skew_f))?);

    let lhs18 = det_mf * det_if;
    let rhs18 = (2.0 * f.f0()).powi(n) * d2;
    let lhs19 = det_if * det_plus;
    let rhs19 = (4.0 * lambda * f.f0()).powi(n) * d2;
    Ok(MetricAdjustedMargins {
        margin18: Margin::new(lhs18 - rhs18, lhs18.abs().max(rhs18)),
        margin19: Margin::new(lhs19 - rhs19, lhs19.abs().max(rhs19)),
        lambda,
    })
}

/// `|σ−c^f|·|σ+c^f| − |σ−c|·|σ+c|` for `f` with `λ_f = 1/(4f(0))`.
pub fn wy_strongest_check(rho: &DensityMatrix, x: &ObservableSet, f: &MonotoneFunction) -> Result<Margin> {
    if !f.in_wy_class() {
        return Err(Error::Precondition(format!("{} violates f(x) <= f(0)(1+sqrt x)^2", f.label())));
    }
    let sigma = covariance_matrix(rho, x)?;
    let skew = wy_skew_matrix(rho, x)?;
    let skew_f = f_skew_matrix(rho, x, f)?;
    let det = |m: &RMatrix| -> Result<f64> { Ok(det_numerical(&HermitianMatrix::from_real_symmetric(m)?)) };
    let lhs = det(&skew_f)? * det(&(&sigma * 2.0 - &skew_f))?;
    let rhs = det(&skew)? * det(&(&sigma * 2.0 - &skew))?;
    Ok(Margin::new(lhs - rhs, lhs.abs().max(rhs)))
}

/// Minimum eigenvalue of `L_X^g` for the metric-adjusted pair of `f`.
pub fn lg_psd_margin(rho: &DensityMatrix, x: &ObservableSet, g1: &BivariateKernel, g2: &BivariateKernel) -> Result<Margin> {
    let l = build_lg(rho, x, g1, g2)?;
    let min = l.eigen().min();
    Ok(Margin::new(min, l.scale()))
}

/// `|x^α − x^{1−α}| ≤ (1−2α)|1−x|` at every grid point, within 1e-12
/// relative to `max(1, x)`. Returns false for `α` outside `(0, ½]`.
pub fn alpha_inequality_check(alpha: f64, grid: &[f64]) -> bool {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return false;
    }
    grid.iter().all(|&x| {
        if x < 0.0 || !x.is_finite() {
            return false;
        }
        let lhs = if x == 0.0 {
            0.0
        } else {
            // x^α − x^{1−α} = −x^α · expm1((1−2α) ln x)
            (x.powf(alpha) * ((1.0 - 2.0 * alpha) * x.ln()).exp_m1()).abs()
        };
        let rhs = (1.0 - 2.0 * alpha) * (1.0 - x).abs();
        lhs <= rhs + 1e-12 * x.max(1.0)
    })
}

/// Log-spaced grid on `[10^lo, 10^hi]`.
pub fn log_grid(lo_exp: f64, hi_exp: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (points - 1) as f64))
        .collect()
}

/// Real part of a matrix that should be real up to roundoff.
pub fn real_checked(m: &CMatrix, tol: f64) -> Result<RMatrix> {
    let scale = crate::linalg::scale_of(m);
    if m.iter().any(|z| z.im.abs() > tol * scale) {
        return Err(Error::Precondition("matrix expected real has an imaginary part".into()));
    }
    Ok(m.map(|z| z.re))
}

pub fn default_tolerances() -> Tolerances {
    Tolerances::DEFAULT
}
