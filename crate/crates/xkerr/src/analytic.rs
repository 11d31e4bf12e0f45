//! Polaron spectrum, Franck–Condon factors and weak-drive photon statistics.
//!
//! In the `n`-photon sector the mechanics sees a displaced oscillator with
//! displacement `f(n) = −g₀n/(ω_M + nḡ)`, so the eigenstates are displaced
//! number states `|m, f(n)⟩ = D(f(n))|m⟩`. The drive connects sectors through
//! overlaps of these states.

use serde::{Deserialize, Serialize};

use crate::circuit::EffectiveCouplings;
use crate::lindblad::DriveAndBath;
use crate::C64;

/// Default cutoff of the intermediate phonon sums.
pub const DEFAULT_L_MAX: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaronSpectrum {
    pub omega_c: f64,
    pub omega_m: f64,
    pub g0: f64,
    pub gbar: f64,
    pub g_ck_prime: f64,
    pub delta_c: f64,
}

impl PolaronSpectrum {
    pub fn new(eff: &EffectiveCouplings, delta_c: f64) -> Self {
        Self {
            omega_c: eff.omega_c,
            omega_m: eff.omega_m,
            g0: eff.g0,
            gbar: eff.gbar_ck,
            g_ck_prime: eff.g_ck_prime,
            delta_c,
        }
    }

    fn softened(&self, n: u32) -> f64 {
        self.omega_m + n as f64 * self.gbar
    }

    pub fn f(&self, n: u32) -> f64 {
        -self.g0 * n as f64 / self.softened(n)
    }

    /// `n`-photon shift `g₀²n²/(ω_M + nḡ)`.
    pub fn delta(&self, n: u32) -> f64 {
        (self.g0 * n as f64).powi(2) / self.softened(n)
    }

    pub fn omega_tilde(&self, n: u32) -> f64 {
        self.omega_m + n as f64 * (self.gbar + self.g_ck_prime)
    }

    fn level(&self, cavity: f64, n: u32, m: u32) -> f64 {
        let (nf, mf) = (n as f64, m as f64);
        nf * cavity + self.softened(n) * mf - self.delta(n) + self.g_ck_prime * nf * mf * mf
    }

    /// Lab-frame energy of `|n⟩|m, f(n)⟩`.
    pub fn energy(&self, n: u32, m: u32) -> f64 {
        self.level(self.omega_c, n, m)
    }

    /// Energy in the frame rotating at the drive frequency.
    pub fn energy_tilde(&self, n: u32, m: u32) -> f64 {
        self.level(self.delta_c, n, m)
    }
}

fn ln_factorial_ratio(lo: usize, hi: usize) -> f64 {
    // ln(hi!/lo!) for hi ≥ lo
    (lo + 1..=hi).map(|k| (k as f64).ln()).sum()
}

/// Generalized Laguerre polynomial `L_n^α(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⟨m| exp[x(b† − b)] |m′⟩`.
pub fn franck_condon(m: usize, m_prime: usize, x: f64) -> f64 {
    let (lo, hi) = if m_prime >= m { (m, m_prime) } else { (m_prime, m) };
    let d = hi - lo;
    if x == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    let ln_mag = -0.5 * ln_factorial_ratio(lo, hi) - 0.5 * x * x + d as f64 * x.abs().ln();
    // (−x)^d above the diagonal, x^d below
    let base_sign = if m_prime >= m { -x.signum() } else { x.signum() };
    let sign = if d % 2 == 1 { base_sign } else { 1.0 };
    sign * ln_mag.exp() * laguerre(lo, d as f64, x * x)
}

/// `⟨m, f(n)|m′, f(n′)⟩`.
pub fn polaron_overlap(spec: &PolaronSpectrum, n: u32, m: usize, n_prime: u32, m_prime: usize) -> f64 {
    franck_condon(m, m_prime, spec.f(n_prime) - spec.f(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonProbabilities {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Largest `|c_n,l_max−1|² / P_n`: weight of the last retained phonon level.
    pub remainder: f64,
    pub warnings: Vec<String>,
}

/// One-, two- and three-photon probabilities to leading order in `Ω/κ`,
/// with the mechanics starting in its ground state.
pub fn photon_probabilities(eff: &EffectiveCouplings, bath: &DriveAndBath, l_max: usize) -> PhotonProbabilities {
    let spec = PolaronSpectrum::new(eff, bath.delta_c);
    let omega = bath.omega(eff);
    let kappa = bath.kappa;
    let mut warnings = Vec::new();
    if kappa > 0.0 && omega / kappa > 0.3 {
        warnings.push(format!("weak-drive expansion questionable: Ω/κ = {:.3}", omega / kappa));
    }
    let l_max = l_max.max(1);
    let i = C64::new(0.0, 1.0);

    let c1: Vec<C64> = (0..l_max)
        .map(|m| omega * polaron_overlap(&spec, 1, m, 0, 0) / (spec.energy_tilde(1, m as u32) - i * (kappa / 2.0)))
        .collect();
    let next = |prev: &[C64], n: u32| -> Vec<C64> {
        let nf = n as f64;
        (0..l_max)
            .map(|m| {
                let s: C64 = prev.iter().enumerate().map(|(l, c)| c * polaron_overlap(&spec, n, m, n - 1, l)).sum();
                nf.sqrt() * omega * s / (spec.energy_tilde(n, m as u32) - i * (nf * kappa / 2.0))
            })
            .collect()
    };
    let c2 = next(&c1, 2);
    let c3 = next(&c2, 3);

    let total = |c: &[C64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let tail = |c: &[C64], p: f64| if p > 0.0 { c[l_max - 1].norm_sqr() / p } else { 0.0 };
    let (p1, p2, p3) = (total(&c1), total(&c2), total(&c3));
    let remainder = tail(&c1, p1).max(tail(&c2, p2)).max(tail(&c3, p3));
    PhotonProbabilities { p1, p2, p3, remainder, warnings }
}

const P1_FLOOR: f64 = 1e-300;

pub fn g2_perturbative(eff: &EffectiveCouplings, bath: &DriveAndBath, l_max: usize) -> Option<f64> {
    let p = photon_probabilities(eff, bath, l_max);
    (p.p1 > P1_FLOOR).then(|| 2.0 * p.p2 / (p.p1 * p.p1))
}

pub fn g3_perturbative(eff: &EffectiveCouplings, bath: &DriveAndBath, l_max: usize) -> Option<f64> {
    let p = photon_probabilities(eff, bath, l_max);
    (p.p1 > P1_FLOOR).then(|| 6.0 * p.p3 / p.p1.powi(3))
}

/// `[4(Δ_c − δ⁽¹⁾)² + κ²] / [(2Δ_c − δ⁽²⁾)² + κ²]`.
pub fn g2_closed_form(eff: &EffectiveCouplings, bath: &DriveAndBath) -> f64 {
    let s = PolaronSpectrum::new(eff, bath.delta_c);
    let (d, k) = (bath.delta_c, bath.kappa);
    (4.0 * (d - s.delta(1)).powi(2) + k * k) / ((2.0 * d - s.delta(2)).powi(2) + k * k)
}

/// `36 |(Ẽ₁,₀ − iκ/2)² / (Ẽ₂,₀ − iκ)|² · |1/(Ẽ₃,₀ − 3iκ/2)|²`.
pub fn g3_closed_form(eff: &EffectiveCouplings, bath: &DriveAndBath) -> f64 {
    let s = PolaronSpectrum::new(eff, bath.delta_c);
    let k = bath.kappa;
    let e = |n: u32| C64::new(s.energy_tilde(n, 0), -(n as f64) * k / 2.0);
    36.0 * (e(1) * e(1) / e(2)).norm_sqr() / e(3).norm_sqr()
}
