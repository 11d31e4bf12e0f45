use nalgebra::{DMatrix, DVector};
use xkerr::fockspace::{self, ladder, number, Mode, SpaceSpec};
use xkerr::lindblad::{
    classify, gn0, liouvillian, liouvillian_from, photon_statistics, propagate, propagate_with, steady_state,
    DensityMatrix, DriveAndBath, PropagationMethod, PropagationOptions, StatClass,
};
use xkerr::units::hz_to_angular;
use xkerr::{EffectiveCouplings, C64};

fn wm() -> f64 {
    hz_to_angular(10e6)
}

fn blockade_couplings() -> EffectiveCouplings {
    let g0 = -9e6;
    EffectiveCouplings::new(hz_to_angular(5e9), wm(), g0, -0.6 * g0, -0.1 * g0)
}

fn blockade_bath(delta_c: f64) -> DriveAndBath {
    DriveAndBath::new(delta_c, 1e-3 * wm(), 1e-2 * wm(), 1e-3 * wm(), 0.0)
}

fn random_hermitian(d: usize, seed: u64) -> DMatrix<C64> {
    // small LCG keeps the test dependency-free and reproducible
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let m = DMatrix::from_fn(d, d, |_, _| C64::new(next(), next()));
    &m + m.adjoint()
}

#[test]
fn liouvillian_preserves_trace() {
    let s = SpaceSpec::new(3, 4).unwrap();
    let h = fockspace::hamiltonian_driven(&blockade_couplings(), &blockade_bath(-wm()), s);
    let l = liouvillian(&h, &DriveAndBath::new(-wm(), 1e-3 * wm(), 1e-2 * wm(), 1e-3 * wm(), 0.7), 0.7);
    assert!(l.trace_defect() < 1e-12 * l.norm());
    for seed in 0..5 {
        let rho = random_hermitian(s.dim(), seed);
        let tr = l.apply(&rho).trace();
        assert!(tr.norm() < 1e-12 * l.norm() * rho.norm(), "Tr L(ρ) = {tr}");
    }
}

#[test]
fn vacuum_is_dark_without_hamiltonian() {
    let s = SpaceSpec::new(3, 3).unwrap();
    let h = fockspace::FockOperator::zeros(s);
    let l = liouvillian(&h, &DriveAndBath::new(0.0, 0.0, 1.0, 0.0, 0.0), 0.0);
    let mut rho = DMatrix::zeros(s.dim(), s.dim());
    rho[(0, 0)] = C64::new(1.0, 0.0);
    assert!(l.apply(&rho).norm() == 0.0);
}

#[test]
fn unique_zero_eigenvalue_at_blockade_point() {
    let s = SpaceSpec::new(3, 5).unwrap();
    let bath = blockade_bath(-1.1 * wm());
    let h = fockspace::hamiltonian_driven(&blockade_couplings(), &bath, s);
    let l = liouvillian(&h, &bath, 0.0);
    let mut mags: Vec<f64> = l.spectrum().unwrap().iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let scale = l.norm();
    assert!(mags[0] < 1e-9 * scale, "smallest |λ| = {:e}", mags[0]);
    assert!(mags[1] > 1e-6 * scale, "second |λ| = {:e}", mags[1]);
}

#[test]
fn dissipator_matches_operator_form() {
    // L(ρ) = −i[H,ρ] + Σ r (cρc† − ½{c†c,ρ}) evaluated with dense matrices
    let s = SpaceSpec::new(3, 3).unwrap();
    let eff = EffectiveCouplings::new(1.3, 1.0, 0.2, 0.05, 0.01);
    let bath = DriveAndBath::new(0.4, 0.3, 0.7, 0.2, 0.5);
    let h = fockspace::hamiltonian_driven(&eff, &bath, s);
    let l = liouvillian(&h, &bath, 0.5);
    let a = ladder(s, Mode::Cavity).to_dense();
    let b = ladder(s, Mode::Mechanics).to_dense();
    let hd = h.to_dense();
    let rho = random_hermitian(s.dim(), 42);
    let d = |c: &DMatrix<C64>, r: f64| {
        let cd = c.adjoint();
        (c * &rho * &cd - (&cd * c * &rho + &rho * &cd * c) * C64::new(0.5, 0.0)) * C64::new(r, 0.0)
    };
    let i = C64::new(0.0, 1.0);
    let expect = (&hd * &rho - &rho * &hd) * (-i) + d(&a, 0.7) + d(&b, 0.2 * 1.5) + d(&b.adjoint(), 0.2 * 0.5);
    assert!((l.apply(&rho) - expect).norm() < 1e-12 * rho.norm());
}

#[test]
fn undriven_steady_state_is_vacuum() {
    let s = SpaceSpec::new(3, 6).unwrap();
    let bath = DriveAndBath::new(0.0, 0.0, 1e-2 * wm(), 1e-3 * wm(), 0.0);
    let h = fockspace::hamiltonian_driven(&blockade_couplings(), &bath, s);
    let ss = steady_state(&liouvillian(&h, &bath, 0.0)).unwrap();
    let mut vac = DMatrix::zeros(s.dim(), s.dim());
    vac[(0, 0)] = C64::new(1.0, 0.0);
    assert!((ss.rho.matrix() - vac).norm() < 1e-10);
}

#[test]
fn undriven_mechanics_thermalizes() {
    let s = SpaceSpec::new(2, 50).unwrap();
    let n_th = 0.8;
    let eff = EffectiveCouplings::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let bath = DriveAndBath::new(0.0, 0.0, 0.5, 0.1, n_th);
    let h = fockspace::hamiltonian_driven(&eff, &bath, s);
    let ss = steady_state(&liouvillian(&h, &bath, n_th)).unwrap();
    assert!((ss.rho.mean_phonons() - n_th).abs() < 1e-8);
}

#[test]
fn steady_state_hygiene_at_blockade_point() {
    let stats = photon_statistics(&blockade_couplings(), &blockade_bath(-1.1 * wm()), SpaceSpec::new(4, 12).unwrap()).unwrap();
    assert!(stats.hygiene.within(1e-10, 1e-10, -1e-8), "{:?}", stats.hygiene);
    assert!(stats.residual <= 1e-10);
    assert_eq!(stats.class, StatClass::OnePB);
}

#[test]
fn truncation_convergence_at_blockade_point() {
    let bath = blockade_bath(-1.1 * wm());
    let g = |nm| photon_statistics(&blockade_couplings(), &bath, SpaceSpec::new(4, nm).unwrap()).unwrap().g2;
    let (lo, hi) = (g(12), g(16));
    assert!(((lo - hi) / hi).abs() < 0.01, "g2 {lo} vs {hi}");
}

#[test]
fn static_generator_leaves_state_unchanged() {
    let s = SpaceSpec::new(2, 3).unwrap();
    let l = liouvillian_from(&fockspace::FockOperator::zeros(s), &[]);
    let rho0 = DensityMatrix::new(s, random_hermitian(s.dim(), 3) / C64::new(s.dim() as f64, 0.0)).unwrap();
    let traj = propagate(&rho0, &l, &[0.0, 0.5, 2.0]).unwrap();
    for r in &traj.states {
        assert!((r.matrix() - rho0.matrix()).norm() < 1e-15);
    }
}

fn decay_check(opts: PropagationOptions, method: PropagationMethod) {
    let s = SpaceSpec::new(3, 2).unwrap();
    let kappa = 2.0;
    let eff = EffectiveCouplings::new(5.0, 1.0, 0.0, 0.0, 0.0);
    let bath = DriveAndBath::new(0.0, 0.0, kappa, 0.0, 0.0);
    let l = liouvillian(&fockspace::hamiltonian_lab(&eff, s), &bath, 0.0);
    let mut vac_b = DVector::zeros(2);
    vac_b[0] = C64::new(1.0, 0.0);
    let rho0 = DensityMatrix::fock_times(s, 1, &vac_b).unwrap();
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
    let traj = propagate_with(&rho0, &l, &times, opts).unwrap();
    assert_eq!(traj.method, method);
    let na = number(s, Mode::Cavity);
    for (t, r) in times.iter().zip(&traj.states) {
        let n = r.expect(&na).re;
        assert!((n - (-kappa * t).exp()).abs() < 1e-6, "t = {t}: {n}");
    }
    assert!(traj.max_trace_drift < 1e-8);
}

#[test]
fn photon_decays_exponentially_block_path() {
    decay_check(PropagationOptions::default(), PropagationMethod::BlockExponential);
}

#[test]
fn photon_decays_exponentially_adaptive_path() {
    decay_check(PropagationOptions { max_block: 0, ..Default::default() }, PropagationMethod::DormandPrince);
}

#[test]
fn adaptive_path_matches_dense_exponential() {
    let s = SpaceSpec::new(2, 5).unwrap();
    let eff = EffectiveCouplings::new(0.0, 1.0, 0.3, 0.1, 0.05);
    let bath = DriveAndBath::new(0.2, 0.4, 0.3, 0.1, 0.2);
    let h = fockspace::hamiltonian_driven(&eff, &bath, s);
    let l = liouvillian(&h, &bath, 0.2);
    let mut vac_b = DVector::zeros(5);
    vac_b[0] = C64::new(1.0, 0.0);
    let rho0 = DensityMatrix::fock_times(s, 1, &vac_b).unwrap();
    let t = 3.0;
    let opts = PropagationOptions { max_block: 0, ..Default::default() };
    let traj = propagate_with(&rho0, &l, &[0.0, t], opts).unwrap();
    assert_eq!(traj.method, PropagationMethod::DormandPrince);
    let exact = propagate(&rho0, &l, &[0.0, t]).unwrap();
    assert_eq!(exact.method, PropagationMethod::BlockExponential);

    let d = s.dim();
    let x0 = DVector::from_iterator(d * d, (0..d * d).map(|k| rho0.matrix()[(k / d, k % d)]));
    let x = (l.to_dense() * C64::new(t, 0.0)).exp() * x0;
    let expect = DMatrix::from_fn(d, d, |i, j| x[i * d + j]);
    assert!((traj.states[1].matrix() - &expect).norm() < 1e-7);
    assert!((exact.states[1].matrix() - &expect).norm() < 1e-12);
}

fn cavity_state(p: &[f64]) -> DensityMatrix {
    let s = SpaceSpec::new(p.len(), 2).unwrap();
    let mut rho = DMatrix::zeros(s.dim(), s.dim());
    for (n, pn) in p.iter().enumerate() {
        rho[(s.index(n, 0), s.index(n, 0))] = C64::new(*pn, 0.0);
    }
    DensityMatrix::new(s, rho).unwrap()
}

#[test]
fn coherent_state_is_poissonian() {
    let s = SpaceSpec::new(60, 2).unwrap();
    let alpha = C64::new(1.2, -0.4);
    let mut psi = DVector::zeros(s.dim());
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..60 {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        psi[s.index(n, 0)] = c;
    }
    let rho = DensityMatrix::pure(s, &psi).unwrap();
    assert!((gn0(&rho, 2).unwrap() - 1.0).abs() < 1e-8);
    assert!((gn0(&rho, 3).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn fock_and_thermal_correlations() {
    assert_eq!(gn0(&cavity_state(&[0.0, 1.0, 0.0]), 2).unwrap(), 0.0);
    let nbar: f64 = 0.5;
    let q = nbar / (1.0 + nbar);
    let p: Vec<f64> = (0..200).map(|n| q.powi(n) / (1.0 + nbar)).collect();
    assert!((gn0(&cavity_state(&p), 2).unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn empty_cavity_has_undefined_correlation() {
    assert!(matches!(gn0(&cavity_state(&[1.0, 0.0]), 2), Err(xkerr::Error::UndefinedCorrelation(_))));
}

#[test]
fn classifier_matches_definitions() {
    assert_eq!(classify(0.008, 0.5), StatClass::OnePB);
    assert_eq!(classify(1.5, 0.5), StatClass::TwoPB);
    assert_eq!(classify(2.0, 1.5), StatClass::TwoPIT);
    assert_eq!(classify(1.5, 2.0), StatClass::ThreePIT);
}
