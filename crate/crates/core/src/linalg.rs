//! Dense complex Hermitian linear algebra with a fixed tolerance policy.
//!
//! All matrices are small (dimension up to a few hundred) and dense. Every
//! routine is pure; validated types are immutable after construction.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Tolerance policy shared by every module.
///
/// `herm`, `eig` and `psd` are relative to `max(1, max|A|)` of the matrix
/// under test; `ineq` and `sat` are relative to the magnitude of the largest
/// determinant entering a margin.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub eig: f64,
    pub psd: f64,
    pub trace: f64,
    pub ineq: f64,
    pub sat: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        eig: 1e-10,
        psd: 1e-9,
        trace: 1e-9,
        ineq: 1e-8,
        sat: 1e-7,
    };

    pub fn with_ineq(mut self, ineq: f64) -> Self {
        self.ineq = ineq;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn max_abs_real(a: &RMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.abs()))
}

/// `max(1, max|A|)`, the scale every relative tolerance is measured against.
pub fn scale_of(a: &CMatrix) -> f64 {
    max_abs(a).max(1.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn from_real(a: &RMatrix) -> CMatrix {
    a.map(|x| c(x, 0.0))
}

pub fn real_part(a: &CMatrix) -> RMatrix {
    a.map(|z| z.re)
}

pub fn imag_part(a: &CMatrix) -> RMatrix {
    a.map(|z| z.im)
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.nrows() == 0 {
        return Err(Error::Empty("matrix has zero dimension"));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// A square complex matrix equal to its adjoint within `tol_herm`.
///
/// The stored matrix is the exact Hermitian part `(A + A†)/2` of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(a: CMatrix) -> Result<Self> {
        Self::with_tolerance(a, Tolerances::DEFAULT.herm)
    }

    pub fn with_tolerance(a: CMatrix, tol_herm: f64) -> Result<Self> {
        check_square(&a)?;
        let deviation = hermiticity_deviation(&a);
        let bound = tol_herm * scale_of(&a);
        if deviation > bound {
            return Err(Error::NonHermitianInput { deviation, bound });
        }
        let sym = (&a + a.adjoint()) * c(0.5, 0.0);
        Ok(HermitianMatrix(sym))
    }

    pub fn from_real_symmetric(a: &RMatrix) -> Result<Self> {
        Self::new(from_real(a))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        HermitianMatrix(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self) -> f64 {
        scale_of(&self.0)
    }

    pub fn eigen(&self) -> EigenSystem {
        spectral_decompose(self)
    }
}

impl AsRef<CMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.vectors;
        let mut scaled = v.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(k).scale_mut(w);
        }
        let mut out = scaled * v.adjoint();
        // Exact Hermiticity of the result.
        let adj = out.adjoint();
        out = (out + adj) * c(0.5, 0.0);
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }

    /// Change of basis into the eigenbasis: `V† A V`.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * a * &self.vectors
    }

    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        &self.vectors * a * self.vectors.adjoint()
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
pub fn spectral_decompose(a: &HermitianMatrix) -> EigenSystem {
    let eig = a.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = a.dim();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    EigenSystem { values, vectors }
}

/// Result of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    pub verdict: bool,
    pub min_eigenvalue: f64,
}

/// `verdict = min eigenvalue >= -tol * max(1, max|A|)`.
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> PsdVerdict {
    let min_eigenvalue = spectral_decompose(a).min();
    PsdVerdict { verdict: min_eigenvalue >= -tol * a.scale(), min_eigenvalue }
}

/// Principal square root of a PSD matrix; eigenvalues in `[-tol_psd, 0)` are clipped.
pub fn matrix_sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = spectral_decompose(a);
    let floor = -Tolerances::DEFAULT.psd * a.scale();
    if eig.min() < floor {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    Ok(HermitianMatrix(eig.apply(|x| x.max(0.0).sqrt())))
}

/// Determinant as the product of eigenvalues.
pub fn det_hermitian(a: &HermitianMatrix) -> f64 {
    spectral_decompose(a).values.iter().product()
}

/// Determinant with eigenvalues inside `±tol_psd · scale` treated as exact zeros.
///
/// Used for every determinant that enters an inequality margin, so that the
/// structural zeros of rank-deficient states do not leak roundoff into
/// fractional powers.
pub fn det_numerical(a: &HermitianMatrix) -> f64 {
    let band = Tolerances::DEFAULT.psd * a.scale();
    spectral_decompose(a)
        .values
        .iter()
        .map(|&x| if x.abs() <= band { 0.0 } else { x })
        .product()
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix together with the
/// orthogonal projector onto its numerical range.
pub fn pseudo_inverse(a: &HermitianMatrix, tol: f64) -> (CMatrix, CMatrix) {
    let eig = spectral_decompose(a);
    let cut = tol * a.scale();
    let inv = eig.apply(|x| if x.abs() > cut { 1.0 / x } else { 0.0 });
    let proj = eig.apply(|x| if x.abs() > cut { 1.0 } else { 0.0 });
    (inv, proj)
}

/// Numerical rank: eigenvalues above `tol · scale` in magnitude.
pub fn numerical_rank(a: &HermitianMatrix, tol: f64) -> usize {
    let cut = tol * a.scale();
    spectral_decompose(a).values.iter().filter(|x| x.abs() > cut).count()
}

/// General complex inverse via LU.
pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().try_inverse()
}

/// 2-norm condition number from singular values.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Matrix sign function by scaled Newton iteration.
///
/// Returns `None` when the iteration does not converge, which happens when
/// the spectrum touches the imaginary axis.
pub fn matrix_sign(a: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let mut x = a.clone();
    for _ in 0..100 {
        let inv = inverse(&x)?;
        let det = x.determinant().norm();
        let mu = if det > 0.0 && det.is_finite() { det.powf(-1.0 / n as f64) } else { 1.0 };
        let next = (&x * c(mu, 0.0) + inv * c(1.0 / mu, 0.0)) * c(0.5, 0.0);
        let change = max_abs(&(&next - &x)) / max_abs(&next).max(1.0);
        x = next;
        if change < 1e-14 {
            break;
        }
    }
    let resid = max_abs(&(&x * &x - identity(n)));
    if resid < 1e-8 && x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Principal logarithm by inverse scaling and squaring.
///
/// Square roots are taken with the Denman-Beavers iteration until the
/// argument is close to the identity, then the Mercator series is summed.
/// Matrices with an eigenvalue on the closed negative real axis are rejected.
pub fn principal_log(a: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    let n = a.nrows();
    let eigenvalues = a
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::LogBranchFailure("Schur form did not triangularize".into()))?;
    let spread = eigenvalues.iter().fold(0.0_f64, |m, z| m.max(z.norm())).max(1.0);
    for z in eigenvalues.iter() {
        if z.re <= 0.0 && z.im.abs() <= 1e-12 * spread {
            return Err(Error::LogBranchFailure(format!(
                "eigenvalue {:.6e}{:+.6e}i lies on the closed negative real axis",
                z.re, z.im
            )));
        }
    }
    let id = identity(n);
    let mut y = a.clone();
    let mut halvings = 0u32;
    while max_abs(&(&y - &id)) > 0.05 {
        if halvings > 60 {
            return Err(Error::LogBranchFailure("square-root iteration did not approach identity".into()));
        }
        y = sqrt_denman_beavers(&y)?;
        halvings += 1;
    }
    let x = &y - &id;
    let mut term = x.clone();
    let mut sum = x.clone();
    for k in 2..60 {
        term = &term * &x;
        let coeff = if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64;
        sum += &term * c(coeff, 0.0);
        if max_abs(&term) / (k as f64) < 1e-18 {
            break;
        }
    }
    Ok(sum * c(2f64.powi(halvings as i32), 0.0))
}

fn sqrt_denman_beavers(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let yi = inverse(&y).ok_or_else(|| Error::LogBranchFailure("singular iterate in square root".into()))?;
        let zi = inverse(&z).ok_or_else(|| Error::LogBranchFailure("singular iterate in square root".into()))?;
        let ny = (&y + zi) * c(0.5, 0.0);
        let nz = (&z + yi) * c(0.5, 0.0);
        let change = max_abs(&(&ny - &y)) / max_abs(&ny).max(1e-300);
        y = ny;
        z = nz;
        if change < 1e-15 {
            break;
        }
    }
    let resid = max_abs(&(&y * &y - a)) / max_abs(a).max(1.0);
    if resid > 1e-10 {
        return Err(Error::LogBranchFailure(format!("square root residual {resid:.3e}")));
    }
    Ok(y)
}

/// Eigenvalues of a density matrix below this are set to zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// A validated quantum state with its clipped eigensystem and square root cached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    eigen: EigenSystem,
    sqrt: CMatrix,
}

impl DensityMatrix {
    pub fn new(a: CMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let h = HermitianMatrix::with_tolerance(a, tol.herm)?;
        let trace: f64 = (0..h.dim()).map(|i| h.0[(i, i)].re).sum();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace { trace });
        }
        let mut eigen = spectral_decompose(&h);
        if eigen.min() < -tol.psd * h.scale() {
            return Err(Error::NotPsd { min_eigenvalue: eigen.min() });
        }
        // Eigenvalues at roundoff level are structural zeros of rank-deficient
        // states; their square roots would otherwise be ~1e-8.
        for v in eigen.values.iter_mut() {
            if *v < EIGENVALUE_FLOOR {
                *v = 0.0;
            }
        }
        let sqrt = eigen.apply(f64::sqrt);
        Ok(DensityMatrix { matrix: h, eigen, sqrt })
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(p).into_inner())
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Empty("zero state vector"));
        }
        let n = psi.len();
        let m = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn sqrt(&self) -> &CMatrix {
        &self.sqrt
    }

    /// `Tr ρ O`.
    pub fn expectation(&self, o: &CMatrix) -> C64 {
        trace_product(self.matrix(), o)
    }

    pub fn rank(&self) -> usize {
        let cut = Tolerances::DEFAULT.psd;
        self.eigen.values.iter().filter(|&&x| x > cut).count()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    /// `t ρ₁ + (1 - t) ρ₂`.
    pub fn mix(t: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        Self::new(a.matrix() * c(t, 0.0) + b.matrix() * c(1.0 - t, 0.0))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        Self::new(u * self.matrix() * u.adjoint())
    }
}
