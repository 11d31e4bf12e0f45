//! Mechanical cat states at zero radiation-pressure coupling.
//!
//! With `g₀ = 0` the Hamiltonian is diagonal in `|n⟩|m⟩`, so a cavity Fock
//! state imprints the phase `e^{−i g′ n t m²}` on a mechanical coherent state.
//! At `τ = π/(k g′ n)` the result is a `k`-component superposition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::EffectiveCouplings;
use crate::error::{Error, Result};
use crate::fockspace::{self, SpaceSpec};
use crate::lindblad::{self, DensityMatrix, DriveAndBath};
use crate::C64;

/// Largest coherent-state weight allowed beyond the truncation.
pub const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub k: u32,
    pub n: u32,
    pub xi: C64,
    pub tau: f64,
}

impl CatSpec {
    pub fn new(k: u32, n: u32, xi: C64, eff: &EffectiveCouplings) -> Result<Self> {
        require_zero_g0(eff)?;
        if k < 2 {
            return Err(Error::param("k", format!("need at least two components, got {k}")));
        }
        if n < 1 {
            return Err(Error::param("n", "photon number must be ≥ 1"));
        }
        Ok(Self { k, n, xi, tau: cat_time(eff.g_ck_prime, k, n)? })
    }
}

/// `τ_n⁽ᵏ⁾ = π/(k g′ n)`.
pub fn cat_time(g_ck_prime: f64, k: u32, n: u32) -> Result<f64> {
    if g_ck_prime == 0.0 || !g_ck_prime.is_finite() {
        return Err(Error::param("g_ck_prime", "cat times need a finite, nonzero g′_CK"));
    }
    Ok(PI / (k as f64 * g_ck_prime * n as f64))
}

fn require_zero_g0(eff: &EffectiveCouplings) -> Result<()> {
    if eff.g0 != 0.0 {
        return Err(Error::param("g0", format!("cat generation needs g₀ = 0, got {:e}", eff.g0)));
    }
    Ok(())
}

/// Coherent state `|ξ⟩` on `n_m` levels; errors if the tail is too heavy.
pub fn coherent(xi: C64, n_m: usize) -> Result<DVector<C64>> {
    let mut v = DVector::zeros(n_m);
    v[0] = C64::new((-xi.norm_sqr() / 2.0).exp(), 0.0);
    for m in 1..n_m {
        v[m] = v[m - 1] * xi / (m as f64).sqrt();
    }
    let tail = 1.0 - v.norm_squared();
    if tail > TAIL_TOLERANCE {
        return Err(Error::Truncation(format!("coherent tail {tail:.3e} beyond N_m = {n_m} for |ξ| = {:.3}", xi.norm())));
    }
    Ok(v)
}

/// Mechanical state after time `t` with `n` photons in the cavity, up to a
/// global phase.
pub fn evolve_closed(eff: &EffectiveCouplings, n: u32, xi: C64, t: f64, n_m: usize) -> Result<DVector<C64>> {
    require_zero_g0(eff)?;
    let nf = n as f64;
    let xi_t = xi * C64::from_polar(1.0, -t * (eff.omega_m + eff.gbar_ck * nf));
    let chi = eff.g_ck_prime * t * nf;
    let mut v = coherent(xi_t, n_m)?;
    for (m, c) in v.iter_mut().enumerate() {
        let mf = m as f64;
        // reduce the phase mod 2π before exponentiating to keep it exact
        *c *= C64::from_polar(1.0, -(chi * mf * mf).rem_euclid(2.0 * PI));
    }
    Ok(v.normalize())
}

/// Closed-form `k`-component cat for `k ∈ {2, 3, 4}`; other `k` fall back to
/// [`evolve_closed`] at `τ`.
pub fn cat_state(spec: &CatSpec, eff: &EffectiveCouplings, n_m: usize) -> Result<DVector<C64>> {
    require_zero_g0(eff)?;
    let xi = spec.xi * C64::from_polar(1.0, -spec.tau * (eff.omega_m + eff.gbar_ck * spec.n as f64));
    let coh = |z: C64| coherent(z, n_m);
    let i = C64::new(0.0, 1.0);
    let v = match spec.k {
        2 => coh(xi)? * ((1.0 - i) / 2.0) + coh(-xi)? * ((1.0 + i) / 2.0),
        3 => {
            let w = C64::from_polar(1.0, -PI / 3.0);
            let a1 = (1.0 + w) / 3.0;
            let a3 = (1.0 - 2.0 * w) / 3.0;
            (coh(xi * w)? + coh(xi * w.conj())?) * a1 + coh(-xi)? * a3
        }
        4 => (coh(xi)? - coh(-xi)?) * (C64::from_polar(0.5, -PI / 4.0)) + (coh(-i * xi)? + coh(i * xi)?) * C64::new(0.5, 0.0),
        _ => return evolve_closed(eff, spec.n, spec.xi, spec.tau, n_m),
    };
    Ok(v.normalize())
}

pub fn fidelity(psi: &DVector<C64>, rho: &DMatrix<C64>) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re / psi.norm_squared()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { min: -10.0, max: 10.0, points: 401 }
    }
}

impl GridSpec {
    pub fn axis(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points).map(|k| self.min + k as f64 * step).collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }
}

/// `W(x, p)` on a square grid; `values[(ip, ix)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    pub cell_area: f64,
}

impl WignerGrid {
    pub fn normalization(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }
}

/// Wigner function of a single-mode density matrix, in the quadratures
/// `x = (b + b†)/√2`, `p = (b − b†)/(i√2)`.
///
/// With `A = (x + ip)/√2`,
///
/// ```text
/// W = e^{−r²}/π · Σ_d c_d Re[(2A)^d S_d(2r²)],   c₀ = 1, c_d = 2
/// S_d(u) = Σ_m (−1)^m √(m!/(m+d)!) L_m^d(u) ρ_{m,m+d}
/// ```
///
/// The radial sums `S_d` are evaluated once per distinct radius.
pub fn wigner(rho: &DMatrix<C64>, grid: GridSpec) -> Result<WignerGrid> {
    if grid.points < 2 || grid.max <= grid.min {
        return Err(Error::param("grid", "need at least two points on a nonempty interval"));
    }
    let axis = grid.axis();
    let n = axis.len();
    let key = |x: f64, p: f64| ((x * x + p * p) * 1e10).round() as u64;
    let mut radii: Vec<u64> = axis.iter().flat_map(|&p| axis.iter().map(move |&x| key(x, p))).collect();
    radii.sort_unstable();
    radii.dedup();
    let sums: Vec<Vec<C64>> = radii.par_iter().map(|&k| radial_sums(rho, 2.0 * k as f64 * 1e-10)).collect();

    let rows: Vec<Vec<f64>> = axis
        .par_iter()
        .map(|&p| {
            axis.iter()
                .map(|&x| {
                    let s = &sums[radii.binary_search(&key(x, p)).expect("radius was tabulated")];
                    let two_a = C64::new(x, p) * 2f64.sqrt();
                    let mut pow = C64::new(1.0, 0.0);
                    let mut w = s[0].re;
                    for sd in &s[1..] {
                        pow *= two_a;
                        w += 2.0 * (sd * pow).re;
                    }
                    w * (-(x * x + p * p)).exp() / PI
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(n, n, |ip, ix| rows[ip][ix]);
    let out = WignerGrid { x_axis: axis.clone(), p_axis: axis, values, cell_area: grid.step() * grid.step() };
    let norm = out.normalization();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(Error::GridTooSmall { norm });
    }
    Ok(out)
}

pub fn wigner_pure(psi: &DVector<C64>, grid: GridSpec) -> Result<WignerGrid> {
    wigner(&(psi * psi.adjoint()), grid)
}

fn radial_sums(rho: &DMatrix<C64>, u: f64) -> Vec<C64> {
    let dim = rho.nrows();
    (0..dim)
        .map(|d| {
            let df = d as f64;
            // ℓ_m = √(m!/(m+d)!) L_m^d(u), by the three-term recurrence
            let mut prev = 0.0;
            let mut cur = (1..=d).map(|k| 1.0 / (k as f64).sqrt()).product::<f64>();
            let mut acc = rho[(0, d)] * cur;
            for m in 0..dim - 1 - d {
                let mf = m as f64;
                let r1 = ((mf + 1.0) / (mf + 1.0 + df)).sqrt();
                let r2 = if m == 0 { 0.0 } else { r1 * (mf / (mf + df)).sqrt() };
                let next = ((2.0 * mf + 1.0 + df - u) * cur * r1 - (mf + df) * prev * r2) / (mf + 1.0);
                prev = cur;
                cur = next;
                let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
                acc += rho[(m + 1, m + 1 + d)] * (sign * cur);
            }
            acc
        })
        .collect()
}

/// `Σ (|W| − W) ΔA`, accumulated row by row.
pub fn wigner_negativity(grid: &WignerGrid) -> f64 {
    let mut total = 0.0;
    for ip in 0..grid.values.nrows() {
        for ix in 0..grid.values.ncols() {
            let w = grid.values[(ip, ix)];
            total += w.abs() - w;
        }
    }
    total * grid.cell_area
}

#[derive(Clone, Debug)]
pub struct MechanicalTrajectory {
    pub times: Vec<f64>,
    /// Lab-frame reduced states of the mechanics.
    pub states: Vec<DMatrix<C64>>,
    pub mean_photons: Vec<f64>,
    pub max_trace_drift: f64,
    pub hygiene: Vec<lindblad::Hygiene>,
}

/// Evolves `|n⟩_a|ξ⟩_b` under the full master equation and traces out the
/// cavity. The dynamics run in the frame rotating at `ω_c` and `ω_M`, which
/// leaves the dissipators unchanged; the mechanical frame is undone on output.
pub fn mechanical_trajectory(
    eff: &EffectiveCouplings,
    bath: &DriveAndBath,
    spec: &CatSpec,
    t_grid: &[f64],
    n_m: usize,
) -> Result<MechanicalTrajectory> {
    require_zero_g0(eff)?;
    let space = SpaceSpec::new(spec.n as usize + 1, n_m)?;
    let psi_b = coherent(spec.xi, n_m)?;
    let rho0 = DensityMatrix::fock_times(space, spec.n as usize, &psi_b)?;
    let h = fockspace::hamiltonian_interaction(eff, space);
    let l = lindblad::liouvillian(&h, bath, bath.n_th(eff));
    let traj = lindblad::propagate(&rho0, &l, t_grid)?;
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, r)| {
            let m = r.mechanical();
            let phase = |k: usize| C64::from_polar(1.0, -(eff.omega_m * t * k as f64).rem_euclid(2.0 * PI));
            DMatrix::from_fn(n_m, n_m, |i, j| phase(i) * m[(i, j)] * phase(j).conj())
        })
        .collect();
    let hygiene = traj.states.iter().map(|r| r.hygiene()).collect();
    let mean_photons = traj
        .states
        .iter()
        .map(|r| r.photon_distribution().iter().enumerate().map(|(k, p)| k as f64 * p).sum())
        .collect();
    Ok(MechanicalTrajectory { times: traj.times, states, mean_photons, max_trace_drift: traj.max_trace_drift, hygiene })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityPoint {
    pub t: f64,
    pub negativity: f64,
}

pub fn negativity_trajectory(
    eff: &EffectiveCouplings,
    bath: &DriveAndBath,
    spec: &CatSpec,
    t_grid: &[f64],
    n_m: usize,
    grid: GridSpec,
) -> Result<(Vec<NegativityPoint>, MechanicalTrajectory)> {
    let traj = mechanical_trajectory(eff, bath, spec, t_grid, n_m)?;
    let points = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| Ok(NegativityPoint { t, negativity: wigner_negativity(&wigner(rho, grid)?) }))
        .collect::<Result<Vec<_>>>()?;
    Ok((points, traj))
}
