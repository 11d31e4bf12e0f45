use nalgebra::Matrix4;
use proptest::prelude::*;
use xkerr::analytic::{franck_condon, PolaronSpectrum};
use xkerr::catgen::cat_time;
use xkerr::fockspace::{self, SpaceSpec};
use xkerr::gaussian::{
    diffusion_matrix, log_negativity, lyapunov_residual, lyapunov_solve, max_real_eigenvalue, physicality,
    routh_hurwitz,
};
use xkerr::lindblad::{classify, liouvillian, DriveAndBath, StatClass, TIE_BAND};
use xkerr::EffectiveCouplings;

fn couplings() -> impl Strategy<Value = EffectiveCouplings> {
    (0.5..2.0f64, 0.05..1.5f64, -0.3..0.3f64, -0.1..0.1f64, -0.05..0.05f64)
        .prop_map(|(wc, wm, g0, gck, gp)| EffectiveCouplings::new(wc, wm, g0, gck, gp))
}

fn bath() -> impl Strategy<Value = DriveAndBath> {
    (-2.0..2.0f64, 0.0..0.5f64, 0.01..0.5f64, 0.001..0.2f64, 0.0..1.5f64)
        .prop_map(|(d, o, k, g, n)| DriveAndBath::new(d, o, k, g, n))
}

#[rustfmt::skip]
fn drift(g: f64, k: f64, w: f64, d: f64, ge: f64) -> Matrix4<f64> {
    Matrix4::new(
        -g, w, 0.0, 0.0,
        -w, -g, ge, 0.0,
        0.0, 0.0, -k, d,
        ge, 0.0, -d, -k,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonians_are_hermitian(eff in couplings(), b in bath()) {
        let s = SpaceSpec::new(3, 6).unwrap();
        let lab = fockspace::hamiltonian_lab(&eff, s);
        prop_assert!(lab.is_hermitian());
        prop_assert!(lab.is_photon_block_diagonal());
        prop_assert!(fockspace::hamiltonian_driven(&eff, &b, s).is_hermitian());
    }

    #[test]
    fn liouvillian_preserves_trace(eff in couplings(), b in bath()) {
        let s = SpaceSpec::new(3, 5).unwrap();
        let h = fockspace::hamiltonian_driven(&eff, &b, s);
        let l = liouvillian(&h, &b, b.n_th(&eff));
        prop_assert!(l.trace_defect() <= 1e-12 * l.norm().max(1.0), "{}", l.trace_defect());
    }

    #[test]
    fn franck_condon_rows_are_normalized(m in 0usize..8, x in -1.0..1.0f64) {
        let s: f64 = (0..=80).map(|l| franck_condon(m, l, x).powi(2)).sum();
        prop_assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn franck_condon_reverses_under_negated_shift(m in 0usize..12, mp in 0usize..12, x in -1.5..1.5f64) {
        // ⟨m|D(x)|m′⟩ = ⟨m′|D(−x)|m⟩
        prop_assert!((franck_condon(m, mp, x) - franck_condon(mp, m, -x)).abs() < 1e-12);
    }

    #[test]
    fn routh_hurwitz_matches_eigenvalues(
        g in 0.01..1.0f64, k in 0.01..1.0f64, w in -3.0..3.0f64, d in -3.0..3.0f64, ge in -3.0..3.0f64,
    ) {
        let lambda = max_real_eigenvalue(&drift(g, k, w, d, ge));
        // skip draws sitting on the stability boundary
        prop_assume!(lambda.abs() > 1e-9);
        prop_assert_eq!(routh_hurwitz(g, k, w, d, ge).stable, lambda < 0.0);
    }

    #[test]
    fn stable_steady_covariances_are_physical(
        g in 0.01..1.0f64, k in 0.01..1.0f64, w in -3.0..3.0f64, d in -3.0..3.0f64, ge in -3.0..3.0f64,
        n_th in 0.0..2.0f64,
    ) {
        prop_assume!(routh_hurwitz(g, k, w, d, ge).stable);
        let a = drift(g, k, w, d, ge);
        prop_assume!(max_real_eigenvalue(&a) < -1e-6);
        let dm = diffusion_matrix(&DriveAndBath::new(d, 0.0, k, g, n_th), n_th);
        let v = lyapunov_solve(&a, &dm).unwrap();
        prop_assert!(lyapunov_residual(&a, &dm, &v) <= 1e-10 * dm.norm());
        prop_assert!(physicality(&v) >= -1e-8 * v.norm());
        prop_assert!(log_negativity(&v).unwrap() >= 0.0);
    }

    #[test]
    fn cat_time_scales_as_one_over_kn(g in 1e3..1e7f64, k in 2u32..8, n in 1u32..6) {
        let base = cat_time(g, 1, 1).unwrap();
        let t = cat_time(g, k, n).unwrap();
        prop_assert!((t * (k * n) as f64 - base).abs() <= 4.0 * f64::EPSILON * base);
    }

    #[test]
    fn rotating_frame_energies_differ_by_drive_frequency(
        eff in couplings(), delta_c in -2.0..2.0f64, n in 0u32..5, m in 0u32..10,
    ) {
        let s = PolaronSpectrum::new(&eff, delta_c);
        let diff = s.energy(n, m) - s.energy_tilde(n, m);
        let expect = n as f64 * (eff.omega_c - delta_c);
        prop_assert!((diff - expect).abs() <= 1e-12 * s.energy(n, m).abs().max(1.0));
    }

    #[test]
    fn classifier_is_consistent(g2 in 0.0..3.0f64, g3 in 0.0..3.0f64) {
        let c = classify(g2, g3);
        let near = |x: f64| (x - 1.0).abs() <= TIE_BAND;
        match c {
            StatClass::OnePB => prop_assert!(g2 < 1.0 && !near(g2)),
            StatClass::TwoPB => prop_assert!(g2 > 1.0 && g3 < 1.0),
            StatClass::TwoPIT => prop_assert!(g2 > 1.0 && g3 > 1.0 && g3 < g2),
            StatClass::ThreePIT => prop_assert!(g2 > 1.0 && g3 > g2),
            StatClass::Poissonian => prop_assert!(near(g2) || near(g3) || near(g3 / g2)),
        }
    }
}
