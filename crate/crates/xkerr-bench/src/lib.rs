//! Shared fixtures for the criterion benchmarks.

use xkerr::lindblad::DriveAndBath;
use xkerr::units::hz_to_angular;
use xkerr::EffectiveCouplings;

/// Blockade-regime couplings on a 10 MHz resonator.
pub fn blockade_point() -> (EffectiveCouplings, DriveAndBath) {
    let wm = hz_to_angular(10e6);
    let g0 = -9e6;
    let eff = EffectiveCouplings::new(hz_to_angular(10e9), wm, g0, -0.6 * g0, -0.1 * g0);
    let bath = DriveAndBath::new(-1.1 * wm, 1e-3 * wm, 1e-2 * wm, 1e-3 * wm, 0.0);
    (eff, bath)
}

/// Cat-regime couplings: no radiation pressure, cross-Kerr terms only.
pub fn cat_point() -> EffectiveCouplings {
    EffectiveCouplings::new(hz_to_angular(10e9), hz_to_angular(10e6), 0.0, -2.7e6, 0.2e6)
}
