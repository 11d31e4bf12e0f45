use nalgebra::DMatrix;
use xkerr::analytic::{
    franck_condon, g2_closed_form, g2_perturbative, g3_closed_form, g3_perturbative, photon_probabilities,
    PolaronSpectrum, DEFAULT_L_MAX,
};
use xkerr::fockspace::{self, SpaceSpec};
use xkerr::lindblad::DriveAndBath;
use xkerr::units::hz_to_angular;
use xkerr::{EffectiveCouplings, C64};

/// `exp[x(b† − b)]` on `n` levels by dense exponentiation.
fn displacement(x: f64, n: usize) -> DMatrix<C64> {
    let gen = DMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            C64::new(x * (i as f64).sqrt(), 0.0)
        } else if j == i + 1 {
            C64::new(-x * (j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    gen.exp()
}

#[test]
fn franck_condon_matches_dense_displacement() {
    let mut worst: f64 = 0.0;
    for x in [-1.0, -0.55, -0.1, 0.0, 0.3, 0.77, 1.0] {
        let d = displacement(x, 80);
        for m in 0..=10 {
            for mp in 0..=10 {
                let err = (franck_condon(m, mp, x) - d[(m, mp)].re).abs();
                worst = worst.max(err + d[(m, mp)].im.abs());
            }
        }
    }
    assert!(worst <= 1e-8, "worst deviation {worst:e}");
}

#[test]
fn franck_condon_completeness() {
    for x in [-1.0, -0.4, 0.25, 1.0] {
        for m in 0..=10 {
            let s: f64 = (0..=80).map(|l| franck_condon(m, l, x).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-8, "m = {m}, x = {x}: {s}");
        }
    }
}

#[test]
fn franck_condon_survives_large_indices() {
    let v = franck_condon(150, 170, 0.5);
    assert!(v.is_finite() && v.abs() <= 1.0);
}

#[test]
fn polaron_energies_match_block_diagonalization() {
    let eff = EffectiveCouplings::new(3.0, 1.0, -0.09, 0.06, 0.0);
    let spec = PolaronSpectrum::new(&eff, 0.0);
    let s = SpaceSpec::new(4, 60).unwrap();
    let h = fockspace::hamiltonian_lab(&eff, s);
    for n in 0..4u32 {
        let mut ev: Vec<f64> = h.photon_block(n as usize).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for m in 0..6u32 {
            let e = spec.energy(n, m);
            assert!((ev[m as usize] - e).abs() < 1e-6, "n = {n}, m = {m}: {} vs {e}", ev[m as usize]);
        }
    }
}

#[test]
fn shift_expansion_to_first_order() {
    let wm = 1.0;
    let g0 = 0.05;
    for ratio in [0.005, 0.01, 0.02, 0.05] {
        let gbar = ratio * wm;
        let eff = EffectiveCouplings::new(0.0, wm, g0, gbar, 0.0);
        let s = PolaronSpectrum::new(&eff, 0.0);
        let exact = 2.0 * s.delta(1) - s.delta(2);
        let approx = 2.0 * g0 * g0 / wm * (3.0 * gbar / wm - 1.0);
        // remainder is second order in ḡ/ω_M relative to 2g₀²/ω_M
        let scale = 2.0 * g0 * g0 / wm;
        assert!((exact - approx).abs() <= 10.0 * ratio * ratio * scale, "ratio {ratio}");
    }
}

fn linear(delta_c: f64, omega: f64) -> (EffectiveCouplings, DriveAndBath) {
    (EffectiveCouplings::new(5.0, 1.0, 0.0, 0.0, 0.0), DriveAndBath::new(delta_c, omega, 0.1, 0.01, 0.0))
}

#[test]
fn undriven_probabilities_vanish() {
    let (eff, bath) = linear(0.0, 0.0);
    let p = photon_probabilities(&eff, &bath, DEFAULT_L_MAX);
    assert_eq!((p.p1, p.p2, p.p3), (0.0, 0.0, 0.0));
    assert!(g2_perturbative(&eff, &bath, DEFAULT_L_MAX).is_none());
}

#[test]
fn linear_cavity_limit() {
    let omega = 1e-3;
    let (eff, bath) = linear(0.0, omega);
    let p = photon_probabilities(&eff, &bath, DEFAULT_L_MAX);
    let k = bath.kappa;
    assert!((p.p1 - 4.0 * omega * omega / (k * k)).abs() < 1e-12 * p.p1);
    assert!((p.p2 - p.p1 * p.p1 / 2.0).abs() < 1e-12 * p.p2);
    assert!((g2_perturbative(&eff, &bath, DEFAULT_L_MAX).unwrap() - 1.0).abs() < 1e-6);
    assert!((g3_perturbative(&eff, &bath, DEFAULT_L_MAX).unwrap() - 1.0).abs() < 1e-6);
    for d in [-0.7, 0.0, 0.2, 1.3] {
        let (eff, bath) = linear(d, omega);
        assert!((g2_closed_form(&eff, &bath) - 1.0).abs() < 1e-12);
        assert!((g3_closed_form(&eff, &bath) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn strong_drive_is_flagged() {
    let (eff, bath) = linear(0.0, 0.02);
    assert!(photon_probabilities(&eff, &bath, DEFAULT_L_MAX).warnings.is_empty());
    let (eff, bath) = linear(0.0, 0.05);
    assert!(!photon_probabilities(&eff, &bath, DEFAULT_L_MAX).warnings.is_empty());
}

fn blockade(delta_over_wm: f64) -> (EffectiveCouplings, DriveAndBath) {
    let wm = hz_to_angular(10e6);
    let g0 = -9e6;
    let eff = EffectiveCouplings::new(hz_to_angular(5e9), wm, g0, -0.6 * g0, -0.1 * g0);
    (eff, DriveAndBath::new(delta_over_wm * wm, 1e-3 * wm, 1e-2 * wm, 1e-3 * wm, 0.0))
}

#[test]
fn closed_form_resonance_limits() {
    let (eff, bath) = blockade(0.0);
    let s = PolaronSpectrum::new(&eff, 0.0);
    let (d1, d2, k) = (s.delta(1), s.delta(2), bath.kappa);

    let at_one = bath.with_delta_c(d1);
    let expect = k * k / ((2.0 * d1 - d2).powi(2) + k * k);
    assert!((g2_closed_form(&eff, &at_one) - expect).abs() < 1e-12);
    assert!(expect < 1.0);

    let at_two = bath.with_delta_c(d2 / 2.0);
    let g = g2_closed_form(&eff, &at_two);
    assert!((g - ((2.0 * d1 - d2).powi(2) + k * k) / (k * k)).abs() < 1e-9 * g);
    assert!(g >= 1.0);
}

#[test]
fn third_order_closed_form_two_ways() {
    for x in [-1.3, -0.9, -0.2, 0.0, 0.4] {
        let (eff, bath) = blockade(x);
        let s = PolaronSpectrum::new(&eff, bath.delta_c);
        let k = bath.kappa;
        let e = |n: u32| s.energy_tilde(n, 0);
        let m1 = e(1).powi(2) + k * k / 4.0;
        let m2 = e(2).powi(2) + k * k;
        let m3 = e(3).powi(2) + 9.0 * k * k / 4.0;
        let real_form = 36.0 * m1 * m1 / (m2 * m3);
        let g = g3_closed_form(&eff, &bath);
        assert!((g - real_form).abs() <= 1e-12 * g.abs().max(1.0), "x = {x}");
    }
}

#[test]
fn weak_drive_hierarchy_on_blockade_sweep() {
    for k in 0..=20 {
        let x = -1.5 + 0.1 * k as f64;
        let (eff, bath) = blockade(x);
        let p = photon_probabilities(&eff, &bath, DEFAULT_L_MAX);
        assert!(p.p2 / p.p1 < 0.1 && p.p3 / p.p2 < 0.1, "x = {x}: {p:?}");
        assert!(p.remainder < 1e-6, "x = {x}: remainder {}", p.remainder);
    }
}

#[test]
fn perturbative_dip_near_single_photon_resonance() {
    let (mut best_x, mut best) = (0.0, f64::INFINITY);
    for k in 0..=200 {
        let x = -1.5 + 0.01 * k as f64;
        let (eff, bath) = blockade(x);
        let g = g2_perturbative(&eff, &bath, DEFAULT_L_MAX).unwrap();
        if g < best {
            (best_x, best) = (x, g);
        }
    }
    assert!(best < 0.02, "min g2 {best} at {best_x}");
    assert!((best_x + 1.1).abs() < 0.1, "dip at {best_x}");
}

#[test]
fn perturbative_and_closed_forms_agree_at_resonance() {
    let (eff, bath) = blockade(0.0);
    let d1 = PolaronSpectrum::new(&eff, 0.0).delta(1);
    let bath = bath.with_delta_c(d1);
    let a = g2_perturbative(&eff, &bath, DEFAULT_L_MAX).unwrap();
    let b = g2_closed_form(&eff, &bath);
    assert!(((a - b) / b).abs() < 0.1, "{a} vs {b}");
}
