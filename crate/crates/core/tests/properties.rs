use proptest::prelude::*;

use skewsharp_core::fuzz::{random_density, random_observables, trial_rng};
use skewsharp_core::gcov::{
    f_skew_matrix, g_covariance, lambda_f, product_kernels, check_g_triple, BivariateKernel, MonotoneFunction,
};
use skewsharp_core::linalg::{c, det_hermitian, max_abs, max_abs_real, CMatrix, HermitianMatrix, RMatrix};
use skewsharp_core::skew::{
    build_l, check_refined_rs, commutator_matrix, covariance_matrix, l_gram, wy_skew_matrix,
    wy_skew_matrix_commutator,
};
use skewsharp_core::{DensityMatrix, ObservableSet};

fn instance(seed: u64, dim: usize, rank: usize, n: usize) -> (DensityMatrix, ObservableSet) {
    let mut rng = trial_rng(seed, 0);
    let rho = random_density(dim, rank.min(dim), &mut rng).unwrap();
    let x = random_observables(dim, n, &mut rng).unwrap();
    (rho, x)
}

fn random_unitary(seed: u64, dim: usize) -> CMatrix {
    let mut rng = trial_rng(seed, 1);
    let h = random_observables(dim, 1, &mut rng).unwrap();
    h.get(0).eigen().vectors.clone()
}

fn real_of(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_invariance(seed in any::<u64>(), dim in 2usize..5, rank in 1usize..5, n in 1usize..4) {
        let (rho, x) = instance(seed, dim, rank, n);
        let u = random_unitary(seed, dim);
        let a = check_refined_rs(&rho, &x).unwrap();
        let b = check_refined_rs(&rho.conjugate(&u).unwrap(), &x.conjugate(&u).unwrap()).unwrap();
        prop_assert!(max_abs_real(&(&a.sigma - &b.sigma)) < 1e-9);
        prop_assert!(max_abs_real(&(&a.skew - &b.skew)) < 1e-9);
        prop_assert!(max_abs_real(&(&a.delta - &b.delta)) < 1e-9);
        prop_assert!((a.delta_g - b.delta_g).abs() < 1e-8 * a.dets.sigma.abs().max(1.0));
    }

    #[test]
    fn l_is_psd_and_constructions_agree(seed in any::<u64>(), dim in 2usize..6, rank in 1usize..6, n in 1usize..5) {
        let (rho, x) = instance(seed, dim, rank, n);
        let l = build_l(&rho, &x).unwrap();
        prop_assert!(l.eigen().min() >= -1e-9 * l.scale());
        let gram = l_gram(&rho, &x).unwrap();
        prop_assert!(max_abs(&(gram - l.matrix())) < 1e-9 * l.scale());
    }

    #[test]
    fn skew_forms_agree(seed in any::<u64>(), dim in 2usize..6, rank in 1usize..6, n in 1usize..4) {
        let (rho, x) = instance(seed, dim, rank, n);
        let a = wy_skew_matrix(&rho, &x).unwrap();
        let b = wy_skew_matrix_commutator(&rho, &x).unwrap();
        prop_assert!(max_abs_real(&(a - b)) < 1e-10);
    }

    #[test]
    fn det_via_eigen_matches_lu(seed in any::<u64>(), dim in 2usize..7) {
        let mut rng = trial_rng(seed, 2);
        let h = random_observables(dim, 1, &mut rng).unwrap();
        let lu = h.get(0).matrix().determinant();
        let eig = det_hermitian(h.get(0));
        prop_assert!((lu.re - eig).abs() < 1e-10 * eig.abs().max(1.0));
        prop_assert!(lu.im.abs() < 1e-10 * eig.abs().max(1.0));
    }

    #[test]
    fn kernel_reductions(seed in any::<u64>(), dim in 2usize..6, rank in 1usize..6, n in 1usize..4) {
        let (rho, x) = instance(seed, dim, rank, n);
        let s = g_covariance(&rho, &x, &BivariateKernel::mean()).unwrap();
        prop_assert!(max_abs_real(&(real_of(&s) - covariance_matrix(&rho, &x).unwrap())) < 1e-10);
        let d = g_covariance(&rho, &x, &BivariateKernel::eps()).unwrap();
        prop_assert!(max_abs_real(&(real_of(&d) - commutator_matrix(&rho, &x).unwrap())) < 1e-10);
        let wy = MonotoneFunction::wy();
        let i = g_covariance(&rho, &x, &BivariateKernel::m_f_star(&wy)).unwrap();
        prop_assert!(max_abs_real(&(real_of(&i) - wy_skew_matrix(&rho, &x).unwrap())) < 1e-10);
        for f in [MonotoneFunction::sld(), MonotoneFunction::wyd(0.3).unwrap()] {
            let spectral = f_skew_matrix(&rho, &x, &f).unwrap();
            let kernel = g_covariance(&rho, &x, &BivariateKernel::m_f_star(&f)).unwrap();
            prop_assert!(max_abs_real(&(real_of(&kernel) - spectral)) < 1e-10);
        }
    }

    #[test]
    fn g_covariance_is_linear(seed in any::<u64>(), dim in 2usize..5, n in 1usize..4, k in -3.0f64..3.0) {
        let (rho, x) = instance(seed, dim, dim, n);
        let g1 = BivariateKernel::mean();
        let g2 = BivariateKernel::eps();
        let sum = g_covariance(&rho, &x, &g1.add(&g2)).unwrap();
        let parts = g_covariance(&rho, &x, &g1).unwrap() + g_covariance(&rho, &x, &g2).unwrap();
        prop_assert!(max_abs(&(sum - parts)) < 1e-12);
        let scaled = g_covariance(&rho, &x, &g1.scaled(c(k, 0.0))).unwrap();
        let base = g_covariance(&rho, &x, &g1).unwrap() * c(k, 0.0);
        prop_assert!(max_abs(&(scaled - base)) < 1e-12);
    }

    #[test]
    fn nonnegative_kernels_give_psd(seed in any::<u64>(), dim in 2usize..5, rank in 1usize..5, n in 1usize..4) {
        let (rho, x) = instance(seed, dim, rank, n);
        for g in [BivariateKernel::mean(), BivariateKernel::product(), BivariateKernel::m_f(&MonotoneFunction::wyd(0.2).unwrap())] {
            let m = HermitianMatrix::with_tolerance(g_covariance(&rho, &x, &g).unwrap(), 1e-9).unwrap();
            prop_assert!(m.eigen().min() >= -1e-10 * m.scale());
        }
    }

    #[test]
    fn metric_adjusted_monotonicity(seed in any::<u64>(), dim in 2usize..5, rank in 1usize..5, n in 1usize..4) {
        // 2σ − I^f − 2λ_f σ(m_f) ⪰ 0
        let (rho, x) = instance(seed, dim, rank, n);
        for f in [MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.3).unwrap()] {
            let lambda = lambda_f(&f).lambda;
            let sigma = covariance_matrix(&rho, &x).unwrap();
            let skew_f = f_skew_matrix(&rho, &x, &f).unwrap();
            let m_f = real_of(&g_covariance(&rho, &x, &BivariateKernel::m_f(&f)).unwrap());
            let diff = &sigma * 2.0 - skew_f - m_f * (2.0 * lambda);
            let h = HermitianMatrix::from_real_symmetric(&((&diff + diff.transpose()) * 0.5)).unwrap();
            prop_assert!(h.eigen().min() >= -1e-9 * sigma.amax().max(1.0));
        }
    }

    #[test]
    fn product_kernel_triple(seed in any::<u64>(), dim in 2usize..5, rank in 1usize..5, n in 1usize..4) {
        let (rho, x) = instance(seed, dim, rank, n);
        let (gp, gm, g0) = product_kernels(|v: f64| v.powf(0.25), |v: f64| v.powf(0.75), 1.0);
        let m = check_g_triple(&rho, &x, &gp, &gm, &g0).unwrap();
        prop_assert!(m.holds(1e-8));
    }

    #[test]
    fn big_f_symmetry(alpha in 0.01f64..0.5, t in -6.0f64..6.0) {
        let f = MonotoneFunction::wyd(alpha).unwrap();
        let x = 10f64.powf(t);
        let lhs = f.big_f(x);
        let rhs = f.big_f(1.0 / x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0));
    }

    #[test]
    fn lambda_within_bounds(alpha in 0.01f64..=0.5) {
        let r = lambda_f(&MonotoneFunction::wyd(alpha).unwrap());
        prop_assert!(r.lower_bound - 1e-9 <= r.lambda && r.lambda <= r.upper_bound + 1e-9);
    }
}

#[test]
fn big_f_symmetry_catalog() {
    for f in [MonotoneFunction::sld(), MonotoneFunction::wy()] {
        for k in -60..=60 {
            let x = 10f64.powf(k as f64 / 10.0);
            let (lhs, rhs) = (f.big_f(x), f.big_f(1.0 / x));
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }
    }
}
