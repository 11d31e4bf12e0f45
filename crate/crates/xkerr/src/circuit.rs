//! Circuit parameters to effective-model couplings.
//!
//! The single-Cooper-pair transistor is treated in its ground state at
//! symmetric junctions and zero phase. Its eigenvalue is expanded in the
//! cavity and mechanical position operators, giving the intermediate
//! coefficients in [`IntermediateCouplings`]. A Bogoliubov rotation removes
//! the Stark shifts and a rotating-wave approximation keeps the
//! number-conserving terms, giving [`EffectiveCouplings`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{E_CHARGE, HBAR};

/// Default bar for every "≪" in [`validity`].
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

/// How the mechanical coupling `g_m` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GmModel {
    /// `g_m ≈ −80 E_C V_g C / (e ω_c0)` with `E_C` and `ω_c0` in rad/s and
    /// `V_g`, `C`, `e` in SI units.
    Formula,
    /// `g_m = −k E_C`.
    PerChargingEnergy(f64),
    /// `g_m` in rad/s.
    Direct(f64),
}

/// Raw device parameters. Energies are stored as `E/ħ` in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Josephson energy `E_J/ħ`.
    pub e_j: f64,
    /// `E_J/E_C`. Preferred way of fixing the charging energy.
    pub ratio_ej_ec: Option<f64>,
    /// Gate-charge deviation from the charge-degeneracy offset, in (0, 1).
    pub delta_ng0: f64,
    /// Gate voltage (V).
    pub v_g: f64,
    /// Resonator capacitance (F).
    pub c: f64,
    /// Gate capacitance (F).
    pub c_g0: Option<f64>,
    /// Junction capacitances `C₁ + C₂` (F).
    pub c_sum: Option<f64>,
    /// Resonator inductance (H).
    pub l: f64,
    /// Bare cavity frequency (rad/s).
    pub omega_c0: f64,
    /// Bare mechanical frequency (rad/s).
    pub omega_m0: f64,
    /// Average junction phase. Only zero is supported.
    pub phi_a: f64,
    pub g_m: GmModel,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("e_j", self.e_j),
            ("v_g", self.v_g),
            ("c", self.c),
            ("l", self.l),
            ("omega_c0", self.omega_c0),
            ("omega_m0", self.omega_m0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [("c_g0", self.c_g0), ("c_sum", self.c_sum), ("ratio_ej_ec", self.ratio_ej_ec)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
                }
            }
        }
        if !(self.delta_ng0 > 0.0 && self.delta_ng0 < 1.0) {
            return Err(Error::param("delta_ng0", format!("must lie in (0, 1), got {}", self.delta_ng0)));
        }
        if self.phi_a != 0.0 {
            return Err(Error::param("phi_a", "only the zero-phase case is supported"));
        }
        Ok(())
    }

    /// Charging energy `E_C/ħ` in rad/s.
    ///
    /// Taken from `ratio_ej_ec` when present, otherwise from
    /// `e²/[2(C₁+C₂+C_g0)]`. When both are available they must agree to 1%.
    pub fn charging_energy(&self) -> Result<f64> {
        let from_caps = match (self.c_sum, self.c_g0) {
            (Some(cs), Some(cg)) => Some(E_CHARGE * E_CHARGE / (2.0 * (cs + cg)) / HBAR),
            _ => None,
        };
        match (self.ratio_ej_ec.map(|r| self.e_j / r), from_caps) {
            (Some(r), Some(c)) => {
                if ((r - c) / r).abs() > 0.01 {
                    Err(Error::InconsistentChargingEnergy { from_ratio: r, from_caps: c })
                } else {
                    Ok(r)
                }
            }
            (Some(r), None) => Ok(r),
            (None, Some(c)) => Ok(c),
            (None, None) => Err(Error::param(
                "ratio_ej_ec",
                "charging energy needs either ratio_ej_ec or both c_sum and c_g0",
            )),
        }
    }

    /// Characteristic impedance `Z₀ = √(L/C)` in ohms.
    pub fn z0(&self) -> f64 {
        (self.l / self.c).sqrt()
    }

    /// Replaces the bare frequencies so that the Bogoliubov-shifted ones
    /// equal `omega_c` and `omega_m`.
    ///
    /// Inverts `ω² = ω₀(ω₀ + 4g_S)`. With [`GmModel::Formula`] the Stark shift
    /// depends on `ω_c0`, so the inversion is iterated to a fixed point.
    pub fn with_shifted_targets(mut self, omega_c: f64, omega_m: f64) -> Result<Self> {
        let bare = |g_s: f64, w: f64| -2.0 * g_s + (4.0 * g_s * g_s + w * w).sqrt();
        for _ in 0..100 {
            let inter = compute_intermediate(&self)?;
            let wc0 = bare(inter.g_sc, omega_c);
            let wm0 = bare(inter.g_sm, omega_m);
            let done = ((wc0 - self.omega_c0) / wc0).abs() < 1e-15
                && ((wm0 - self.omega_m0) / wm0).abs() < 1e-15;
            self.omega_c0 = wc0;
            self.omega_m0 = wm0;
            if done || !matches!(self.g_m, GmModel::Formula) {
                return Ok(self);
            }
        }
        Ok(self)
    }
}

/// Coefficients of the expanded transistor eigenvalue, all in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateCouplings {
    pub b1: f64,
    pub b3: f64,
    /// `B = √(B₁² + B₃²)`.
    pub b: f64,
    pub e_c: f64,
    pub g_m: f64,
    pub g_q: f64,
    pub alpha_m: f64,
    pub g_sc: f64,
    pub g_sm: f64,
    pub g_rp: f64,
    pub g0_ck: f64,
    pub g0_cub: f64,
    pub g0_quartic: f64,
    /// `G⁰₁ … G⁰₄`.
    pub big_g0: [f64; 4],
}

/// Effective couplings of the number-conserving Hamiltonian, in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    pub omega_c: f64,
    pub omega_m: f64,
    pub g0: f64,
    pub g_ck: f64,
    pub g_ck_prime: f64,
    pub g_cub: f64,
    pub big_g2: f64,
    pub big_g4: f64,
    /// `g_CK + g′_CK`.
    pub gbar_ck: f64,
    /// `g_CK + 2g′_CK`.
    pub gtilde_ck: f64,
}

impl EffectiveCouplings {
    /// Couplings given directly; the higher-order terms are zero.
    pub fn new(omega_c: f64, omega_m: f64, g0: f64, g_ck: f64, g_ck_prime: f64) -> Self {
        Self {
            omega_c,
            omega_m,
            g0,
            g_ck,
            g_ck_prime,
            g_cub: 0.0,
            big_g2: 0.0,
            big_g4: 0.0,
            gbar_ck: g_ck + g_ck_prime,
            gtilde_ck: g_ck + 2.0 * g_ck_prime,
        }
    }

    /// Same couplings with `g′_CK` replaced; the derived sums are refreshed.
    pub fn with_g_ck_prime(&self, g_ck_prime: f64) -> Self {
        Self {
            g_ck_prime,
            gbar_ck: self.g_ck + g_ck_prime,
            gtilde_ck: self.g_ck + 2.0 * g_ck_prime,
            ..self.clone()
        }
    }

    /// Polaron displacement `f(n) = −g₀n/(ω_M + nḡ_CK)`.
    pub fn polaron_shift(&self, n: u32) -> f64 {
        let n = f64::from(n);
        -self.g0 * n / (self.omega_m + n * self.gbar_ck)
    }
}

pub fn compute_intermediate(params: &CircuitParams) -> Result<IntermediateCouplings> {
    params.validate()?;
    let e_c = params.charging_energy()?;
    let b1 = -2.0 * params.e_j;
    let b3 = 4.0 * e_c * (1.0 - 2.0 * params.delta_ng0);
    let b = b1.hypot(b3);
    let g_q = E_CHARGE * E_CHARGE * params.z0() / (4.0 * HBAR) * params.e_j;
    let g_m = match params.g_m {
        GmModel::Formula => -80.0 * e_c * params.v_g * params.c / (E_CHARGE * params.omega_c0),
        GmModel::PerChargingEnergy(k) => -k * e_c,
        GmModel::Direct(g) => g,
    };

    let (b2, b3s, b1s) = (b * b, b3 * b3, b1 * b1);
    let b4 = b2 * b2;
    let bp = |k: i32| b.powi(k);
    let (gm2, gq2) = (g_m * g_m, g_q * g_q);

    Ok(IntermediateCouplings {
        b1,
        b3,
        b,
        e_c,
        g_m,
        g_q,
        alpha_m: -b3 * g_m / b,
        g_sc: -g_q * b1 / b,
        g_sm: -b1s * gm2 / bp(3),
        g_rp: 2.0 * b1 * b3 * g_m * g_q / bp(3),
        g0_ck: 2.0 * b1 * gm2 * g_q / bp(5) * (b2 - 3.0 * b3s),
        g0_cub: 4.0 * b1 * b3 * gm2 * g_m * g_q / bp(7) * (5.0 * b3s - 3.0 * b2),
        g0_quartic: 2.0 * b1 * g_q * gm2 * gm2 / bp(9) * (-3.0 * b4 + 30.0 * b2 * b3s - 35.0 * b3s * b3s),
        big_g0: [
            2.0 * b3 * g_m * gq2 / bp(5) * (b2 - 3.0 * b3s),
            2.0 * gm2 * gq2 / bp(7) * (15.0 * b1s * b3s - 2.0 * b4),
            4.0 * gm2 * gq2 * b3 / bp(9)
                * (5.0 * b2 * b3s + 15.0 * b1s * b2 - 3.0 * b4 - 35.0 * b3s * b1s),
            gm2 * gm2 * gq2 / bp(9)
                * (60.0 * b2 * b3s + 30.0 * b2 * b1s - 6.0 * b4 - 70.0 * b3s * b3s - 420.0 * b3s * b1s),
        ],
    })
}

fn shifted(mode: &'static str, w0: f64, g_s: f64) -> Result<f64> {
    let value = w0 * (w0 + 4.0 * g_s);
    if value > 0.0 {
        Ok(value.sqrt())
    } else {
        Err(Error::ImaginaryFrequency { mode, value })
    }
}

pub fn compute_effective(inter: &IntermediateCouplings, params: &CircuitParams) -> Result<EffectiveCouplings> {
    let omega_c = shifted("cavity", params.omega_c0, inter.g_sc)?;
    let omega_m = shifted("mechanical", params.omega_m0, inter.g_sm)?;
    let rc = params.omega_c0 / omega_c;
    let rm = params.omega_m0 / omega_m;

    let g_ck = 4.0 * inter.g0_ck * rc * rm;
    let g_ck_prime = 12.0 * inter.g0_quartic * rc * rm * rm;
    Ok(EffectiveCouplings {
        omega_c,
        omega_m,
        g0: 2.0 * inter.g_rp * rc * rm.sqrt(),
        g_ck,
        g_ck_prime,
        g_cub: 2.0 * inter.g0_cub * rc * rm.powf(1.5),
        big_g2: 12.0 * inter.big_g0[1] * rc * rc * rm,
        big_g4: 36.0 * inter.big_g0[3] * rc * rc * rm * rm,
        gbar_ck: g_ck + g_ck_prime,
        gtilde_ck: g_ck + 2.0 * g_ck_prime,
    })
}

/// Full pipeline: intermediate coefficients, effective couplings and report.
pub fn couplings(params: &CircuitParams, n_max: u32, threshold: f64) -> Result<(IntermediateCouplings, EffectiveCouplings, ValidityReport)> {
    let inter = compute_intermediate(params)?;
    let eff = compute_effective(&inter, params)?;
    let report = validity(&inter, &eff, params, n_max, threshold);
    Ok((inter, eff, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub ok: bool,
    pub worst_ratio: f64,
}

impl Check {
    fn below(ratio: f64, threshold: f64) -> Self {
        Self { ok: ratio < threshold, worst_ratio: ratio }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaronCheck {
    pub n: u32,
    pub f: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub threshold: f64,
    /// Higher-order coefficients against `g₀` and `ω_M` (against `ω_M` only when `g₀ = 0`).
    pub rwa: Check,
    /// `G₂`, `G₄` against the nonzero members of `g₀`, `g_CK`, `g′_CK`.
    pub truncation: Check,
    pub polaron: Vec<PolaronCheck>,
    /// Bare frequencies against `|B|`.
    pub dispersive: Check,
}

impl ValidityReport {
    pub fn polaron_ok(&self, n: u32) -> Option<bool> {
        self.polaron.iter().find(|p| p.n == n).map(|p| p.ok)
    }

    /// The conditions that restrict the usable parameter window: RWA,
    /// truncation and the polaron bound for every checked photon number.
    pub fn usable(&self) -> bool {
        self.rwa.ok && self.truncation.ok && self.polaron.iter().all(|p| p.ok)
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn validity(
    inter: &IntermediateCouplings,
    eff: &EffectiveCouplings,
    params: &CircuitParams,
    n_max: u32,
    threshold: f64,
) -> ValidityReport {
    let [g1, g2, g3, g4] = inter.big_g0;
    let small = max_abs(&[inter.g0_ck, inter.g0_cub, inter.g0_quartic, g1, g2, g3, g4]);
    let scale = if eff.g0 == 0.0 { eff.omega_m.abs() } else { eff.g0.abs().min(eff.omega_m.abs()) };

    let refs: Vec<f64> = [eff.g0, eff.g_ck, eff.g_ck_prime].into_iter().filter(|g| *g != 0.0).map(f64::abs).collect();
    let big_g = max_abs(&[eff.big_g2, eff.big_g4]);
    let truncation_ratio = match refs.iter().cloned().reduce(f64::min) {
        Some(r) => big_g / r,
        None => f64::INFINITY,
    };

    let polaron = (1..=n_max)
        .map(|n| {
            let f = eff.polaron_shift(n);
            PolaronCheck { n, f, ok: f.abs() < 1.0 }
        })
        .collect();

    let dispersive = params.omega_c0.max(params.omega_m0) / inter.b.abs();

    ValidityReport {
        threshold,
        rwa: Check::below(small / scale, threshold),
        truncation: Check::below(truncation_ratio, threshold),
        polaron,
        dispersive: Check::below(dispersive, threshold),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{hz_to_angular, PLANCK};

    fn params(ratio: f64, dn: f64) -> CircuitParams {
        let z0 = 1e-2 * PLANCK / (4.0 * E_CHARGE * E_CHARGE);
        let c = 50e-15;
        CircuitParams {
            e_j: 1e10,
            ratio_ej_ec: Some(ratio),
            delta_ng0: dn,
            v_g: 10.0,
            c,
            c_g0: None,
            c_sum: None,
            l: z0 * z0 * c,
            omega_c0: hz_to_angular(5e9),
            omega_m0: hz_to_angular(10e6),
            phi_a: 0.0,
            g_m: GmModel::PerChargingEnergy(0.025),
        }
    }

    #[test]
    fn degeneracy_point_kills_b3_terms() {
        let inter = compute_intermediate(&params(0.25, 0.5)).unwrap();
        assert_eq!(inter.b3, 0.0);
        assert_eq!(inter.g_rp, 0.0);
        assert_eq!(inter.g0_cub, 0.0);
        assert_eq!(inter.big_g0[0], 0.0);
        assert_eq!(inter.big_g0[2], 0.0);
        assert_eq!(inter.alpha_m, 0.0);
        assert_eq!(inter.b1.abs(), 2.0 * 1e10);
    }

    #[test]
    fn zero_stark_shift_is_identity() {
        let mut p = params(0.25, 0.53);
        p.g_m = GmModel::Direct(0.0);
        let mut inter = compute_intermediate(&p).unwrap();
        inter.g_sc = 0.0;
        let eff = compute_effective(&inter, &p).unwrap();
        assert_eq!(eff.omega_c, p.omega_c0);
        assert_eq!(eff.omega_m, p.omega_m0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = params(0.25, 0.5);
        p.delta_ng0 = 1.0;
        assert!(compute_intermediate(&p).is_err());
        let mut p = params(0.25, 0.5);
        p.phi_a = 0.1;
        assert!(compute_intermediate(&p).is_err());
    }

    #[test]
    fn charging_energy_consistency() {
        let mut p = params(0.25, 0.5);
        p.ratio_ej_ec = None;
        p.c_sum = Some(1.5e-15);
        p.c_g0 = Some(0.5e-15);
        let ec = p.charging_energy().unwrap();
        p.ratio_ej_ec = Some(p.e_j / ec * 1.005);
        assert!(p.charging_energy().is_ok());
        p.ratio_ej_ec = Some(p.e_j / ec * 1.02);
        assert!(matches!(p.charging_energy(), Err(Error::InconsistentChargingEnergy { .. })));
    }

    #[test]
    fn imaginary_frequency_is_an_error() {
        let mut p = params(0.25, 0.5);
        p.omega_m0 = 1.0;
        p.g_m = GmModel::Direct(-1e12);
        let inter = compute_intermediate(&p).unwrap();
        assert!(matches!(compute_effective(&inter, &p), Err(Error::ImaginaryFrequency { .. })));
    }

    #[test]
    fn shifted_targets_round_trip() {
        let wc = hz_to_angular(5e9);
        let wm = hz_to_angular(10e6);
        for g_m in [GmModel::PerChargingEnergy(0.025), GmModel::Formula] {
            let mut p = params(1.0 / 20.0, 0.533);
            p.g_m = g_m;
            let p = p.with_shifted_targets(wc, wm).unwrap();
            let (_, eff, _) = couplings(&p, 3, 0.1).unwrap();
            assert!((eff.omega_c / wc - 1.0).abs() < 1e-12);
            assert!((eff.omega_m / wm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_threshold() {
        let p = params(0.25, 0.5);
        let inter = compute_intermediate(&p).unwrap();
        let mut eff = EffectiveCouplings::new(1e10, 1e7, 0.0, -1e6, 1e5);
        eff.big_g2 = 0.5e5;
        let r = validity(&inter, &eff, &p, 3, 0.1);
        assert!(!r.truncation.ok);
        assert!((r.truncation.worst_ratio - 0.5).abs() < 1e-12);
    }
}
