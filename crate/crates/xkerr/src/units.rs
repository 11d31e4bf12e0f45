//! Physical constants (SI, 2019 exact values) and unit conversions.
//!
//! Internally every frequency and coupling is an angular rate in rad/s.
//! A coupling quoted as "X MHz" is read as X·10⁶ rad/s; a frequency quoted
//! as "ω/2π = X Hz" is converted with [`hz_to_angular`].

use std::f64::consts::PI;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const K_B: f64 = 1.380_649e-23;

/// Converts an ordinary frequency in Hz to rad/s.
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

/// Converts power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Bose–Einstein occupation of an oscillator at angular frequency `omega`
/// and temperature `t` (kelvin).
pub fn bose_occupation(omega: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * t)).exp_m1()
}

/// Inverse of [`bose_occupation`].
pub fn temperature_for_occupation(omega: f64, n_th: f64) -> f64 {
    if n_th <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (K_B * (1.0 / n_th).ln_1p())
}

/// Drive amplitude Ω = √(2κ𝒫/ħω_d) for a drive of `power_watts` at angular
/// frequency `omega_d` into a cavity with amplitude decay `kappa`.
pub fn drive_amplitude(kappa: f64, power_watts: f64, omega_d: f64) -> f64 {
    (2.0 * kappa * power_watts / (HBAR * omega_d)).sqrt()
}
