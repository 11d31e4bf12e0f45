//! Linearized strong-drive branch.
//!
//! Fluctuations around the classical fixed point `(α, β)` obey
//! `u̇ = A u + noise` with `u = (δQ, δP, δX, δY)` (mechanics first). The
//! steady covariance solves `A V + V Aᵀ = −D`, and entanglement is measured
//! by the logarithmic negativity of `V`.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::circuit::EffectiveCouplings;
use crate::error::{Error, Result};
use crate::lindblad::DriveAndBath;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanField {
    /// Complex solution of `(iΔ_eff + κ)α = Ω`; only `|α|` enters the
    /// linearized dynamics.
    pub alpha: C64,
    pub beta: C64,
    pub delta_eff: f64,
    pub omega_eff: f64,
    pub g_eff: f64,
    /// `g = g₀ + g̃β + 2g′β³` evaluated at `Re β`.
    pub g_small: f64,
    /// Largest relative residual of the two fixed-point equations.
    pub residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct MeanFieldOptions {
    pub steps: usize,
    pub damping: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Start the continuation from this `β` instead of the undriven state.
    pub seed: Option<C64>,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        Self { steps: 50, damping: 0.5, max_iter: 400, tol: 1e-12, seed: None }
    }
}

struct FixedPoint<'a> {
    eff: &'a EffectiveCouplings,
    delta_c: f64,
    kappa: f64,
    gamma: f64,
    omega: f64,
}

impl FixedPoint<'_> {
    fn delta_eff(&self, b: C64) -> f64 {
        let b2 = b.norm_sqr();
        self.delta_c + 2.0 * self.eff.g0 * b.re + self.eff.gtilde_ck * b2 + self.eff.g_ck_prime * b2 * b2
    }

    fn alpha_sq(&self, b: C64) -> f64 {
        let d = self.delta_eff(b);
        self.omega * self.omega / (d * d + self.kappa * self.kappa)
    }

    fn omega_eff(&self, b: C64, a2: f64) -> f64 {
        self.eff.omega_m + self.eff.gtilde_ck * a2 + 2.0 * self.eff.g_ck_prime * a2 * b.norm_sqr()
    }

    /// Right-hand side of the β equation given the current β.
    fn map(&self, b: C64) -> C64 {
        let a2 = self.alpha_sq(b);
        C64::new(0.0, -self.eff.g0 * a2) / C64::new(self.gamma, self.omega_eff(b, a2))
    }

    fn residual(&self, b: C64) -> C64 {
        self.map(b) - b
    }

    fn jacobian(&self, b: C64) -> Matrix2<f64> {
        let h = 1e-7 * b.norm().max(1e-3);
        let dr = (self.residual(b + h) - self.residual(b - h)) / (2.0 * h);
        let di = (self.residual(b + C64::new(0.0, h)) - self.residual(b - C64::new(0.0, h))) / (2.0 * h);
        Matrix2::new(dr.re, di.re, dr.im, di.im)
    }
}

/// Fixed point on the branch continuously connected to the undriven state.
pub fn mean_field(eff: &EffectiveCouplings, bath: &DriveAndBath) -> Result<MeanField> {
    mean_field_with(eff, bath, MeanFieldOptions::default())
}

pub fn mean_field_with(eff: &EffectiveCouplings, bath: &DriveAndBath, opts: MeanFieldOptions) -> Result<MeanField> {
    bath.validate()?;
    let omega = bath.omega(eff);
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::param("omega", format!("drive amplitude must be ≥ 0, got {omega}")));
    }
    let mut fp = FixedPoint { eff, delta_c: bath.delta_c, kappa: bath.kappa, gamma: bath.gamma, omega: 0.0 };
    let mut b = opts.seed.unwrap_or(C64::new(0.0, 0.0));
    let steps = opts.steps.max(1);
    for s in 1..=steps {
        fp.omega = omega * s as f64 / steps as f64;
        for _ in 0..opts.max_iter {
            let next = b + (fp.map(b) - b) * opts.damping;
            let done = (next - b).norm() <= opts.tol * next.norm().max(1.0);
            b = next;
            if done {
                break;
            }
        }
        b = newton(&fp, b, opts.tol)?;
    }

    let a2 = fp.alpha_sq(b);
    let delta_eff = fp.delta_eff(b);
    let omega_eff = fp.omega_eff(b, a2);
    let alpha = C64::new(omega, 0.0) / C64::new(bath.kappa, delta_eff);
    let beta_re = b.re;
    let g_small = eff.g0 + eff.gtilde_ck * beta_re + 2.0 * eff.g_ck_prime * beta_re.powi(3);
    let g_eff = -2.0 * g_small * alpha.norm();

    let res_alpha = (C64::new(bath.kappa, delta_eff) * alpha - omega).norm() / omega.max(f64::MIN_POSITIVE);
    let lhs_beta = C64::new(bath.gamma, omega_eff) * b;
    let rhs_beta = C64::new(0.0, -eff.g0 * alpha.norm_sqr());
    let res_beta = (lhs_beta - rhs_beta).norm() / lhs_beta.norm().max(rhs_beta.norm()).max(f64::MIN_POSITIVE);

    let mut warnings = Vec::new();
    if alpha.norm() < 10.0 || b.norm() < 2.0 {
        warnings.push(format!("linearization questionable: |α| = {:.3}, |β| = {:.3}", alpha.norm(), b.norm()));
    }
    if eff.g_ck.abs() > (b.norm().powi(3) * eff.g_ck_prime).abs() {
        warnings.push("|g_CK| exceeds |β³ g′_CK|".into());
    }
    if b.im.abs() >= 0.05 * b.norm() && b.norm() > 0.0 {
        warnings.push(format!("Im β is not small: β = {:.4}{:+.4}i", b.re, b.im));
    }
    Ok(MeanField {
        alpha,
        beta: b,
        delta_eff,
        omega_eff,
        g_eff,
        g_small,
        residual: res_alpha.max(if b.norm() > 0.0 || eff.g0 != 0.0 { res_beta } else { 0.0 }),
        warnings,
    })
}

fn newton(fp: &FixedPoint<'_>, mut b: C64, tol: f64) -> Result<C64> {
    for _ in 0..100 {
        let r = fp.residual(b);
        if r.norm() <= tol * b.norm().max(1e-300) || r.norm() == 0.0 {
            return Ok(b);
        }
        let j = fp.jacobian(b);
        let scale = j.abs().max().max(1.0);
        if j.determinant().abs() <= 1e-10 * scale * scale {
            return Err(Error::MeanFieldFold);
        }
        let step = j.try_inverse().ok_or(Error::MeanFieldFold)? * nalgebra::Vector2::new(r.re, r.im);
        b -= C64::new(step[0], step[1]);
    }
    let r = fp.residual(b).norm();
    if r <= 1e-10 * b.norm().max(1e-300) {
        Ok(b)
    } else {
        Err(Error::MeanFieldNonConvergence { residual: r })
    }
}

pub fn drift_matrix(mf: &MeanField, bath: &DriveAndBath) -> Matrix4<f64> {
    let (g, k) = (bath.gamma, bath.kappa);
    #[rustfmt::skip]
    let a = Matrix4::new(
        -g, mf.omega_eff, 0.0, 0.0,
        -mf.omega_eff, -g, mf.g_eff, 0.0,
        0.0, 0.0, -k, mf.delta_eff,
        mf.g_eff, 0.0, -mf.delta_eff, -k,
    );
    a
}

pub fn diffusion_matrix(bath: &DriveAndBath, n_th: f64) -> Matrix4<f64> {
    let m = bath.gamma * (2.0 * n_th + 1.0);
    Matrix4::from_diagonal(&nalgebra::Vector4::new(m, m, bath.kappa, bath.kappa))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouthHurwitz {
    /// Each entry is `lhs − rhs` of one inequality; positive means satisfied.
    pub conditions: [f64; 4],
    pub stable: bool,
}

/// The four Routh–Hurwitz inequalities of the linearized drift matrix.
pub fn routh_hurwitz(gamma: f64, kappa: f64, omega_eff: f64, delta_eff: f64, g_eff: f64) -> RouthHurwitz {
    let (g, k, w, d, gg) = (gamma, kappa, omega_eff, delta_eff, g_eff);
    let c1 = 2.0 * g + 2.0 * k;
    let c2 = k * d * d + g * w * w + k.powi(3) + g.powi(3) + 4.0 * k * g * g + k * k * g;
    let c3 = 4.0
        * k
        * g
        * (d.powi(4)
            + 2.0 * d * d * (g * g + k * k - w * w)
            + 4.0 * k * g * (d * d + k * g + g * g + k * k + w * w)
            + (g * g + k * k + w * w).powi(2))
        + 4.0 * gg * gg * d * w * (g + k).powi(2);
    let c4 = (g * g + w * w) * (k * k + d * d) - w * gg * gg * d;
    let conditions = [c1, c2, c3, c4];
    RouthHurwitz { conditions, stable: conditions.iter().all(|c| *c > 0.0) }
}

pub fn max_real_eigenvalue(a: &Matrix4<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Solves `A V + V Aᵀ = −D` as a 16-unknown linear system.
pub fn lyapunov_solve(a: &Matrix4<f64>, d: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    if max_real_eigenvalue(a) >= 0.0 {
        return Err(Error::Unstable);
    }
    let mut m = DMatrix::<f64>::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                m[(i * 4 + j, k * 4 + j)] += a[(i, k)];
                m[(i * 4 + j, i * 4 + k)] += a[(j, k)];
            }
        }
    }
    let rhs = DVector::from_iterator(16, (0..16).map(|idx| -d[(idx / 4, idx % 4)]));
    let x = m.lu().solve(&rhs).ok_or(Error::Unstable)?;
    let v = Matrix4::from_fn(|i, j| x[i * 4 + j]);
    Ok((v + v.transpose()) * 0.5)
}

pub fn lyapunov_residual(a: &Matrix4<f64>, d: &Matrix4<f64>, v: &Matrix4<f64>) -> f64 {
    (a * v + v * a.transpose() + d).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceState {
    pub v: Matrix4<f64>,
    pub a: Matrix4<f64>,
    pub d: Matrix4<f64>,
}

impl CovarianceState {
    pub fn steady(mf: &MeanField, bath: &DriveAndBath, n_th: f64) -> Result<Self> {
        let a = drift_matrix(mf, bath);
        let d = diffusion_matrix(bath, n_th);
        let v = lyapunov_solve(&a, &d)?;
        Ok(Self { v, a, d })
    }

    pub fn residual(&self) -> f64 {
        lyapunov_residual(&self.a, &self.d, &self.v)
    }

    /// Smallest eigenvalue of `V + iΩ/2`; nonnegative for a physical state.
    pub fn physicality(&self) -> f64 {
        physicality(&self.v)
    }
}

pub fn physicality(v: &Matrix4<f64>) -> f64 {
    let mut m = DMatrix::<C64>::from_fn(4, 4, |i, j| C64::new(v[(i, j)], 0.0));
    for blk in [0, 2] {
        m[(blk, blk + 1)] += C64::new(0.0, 0.5);
        m[(blk + 1, blk)] -= C64::new(0.0, 0.5);
    }
    m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Smallest partial-transpose symplectic eigenvalue `ν⁻`.
pub fn nu_minus(v: &Matrix4<f64>) -> Result<f64> {
    let vm = v.fixed_view::<2, 2>(0, 0).determinant();
    let vc = v.fixed_view::<2, 2>(2, 2).determinant();
    let vcm = v.fixed_view::<2, 2>(0, 2).determinant();
    let sigma = vm + vc - 2.0 * vcm;
    let disc = sigma * sigma - 4.0 * v.determinant();
    // Pure states sit on disc = 0; allow rounding there only.
    let disc = if disc < 0.0 && disc > -1e-12 * sigma * sigma { 0.0 } else { disc };
    if disc < 0.0 {
        return Err(Error::Unphysical(format!("negative discriminant {disc:.3e}")));
    }
    let inner = (sigma - disc.sqrt()) / 2.0;
    if inner < 0.0 {
        return Err(Error::Unphysical(format!("negative ν⁻² = {inner:.3e}")));
    }
    Ok(inner.sqrt())
}

/// `E_N = max(0, −ln 2ν⁻)`.
pub fn log_negativity(v: &Matrix4<f64>) -> Result<f64> {
    Ok((-(2.0 * nu_minus(v)?).ln()).max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementPoint {
    pub delta_c: f64,
    pub mean_field: Option<MeanField>,
    pub routh_hurwitz: Option<RouthHurwitz>,
    pub stable: bool,
    pub log_negativity: Option<f64>,
    pub lyapunov_residual: Option<f64>,
    /// [`Error::code`] of the failure, if any.
    pub error_code: Option<String>,
    pub error: Option<String>,
}

impl EntanglementPoint {
    pub fn frequency_ratio(&self) -> Option<f64> {
        self.mean_field.as_ref().map(|m| m.omega_eff / m.delta_eff)
    }
}

/// One point of the strong-drive pipeline; errors are recorded, not raised.
pub fn entanglement_point(eff: &EffectiveCouplings, bath: &DriveAndBath) -> EntanglementPoint {
    let mut out = EntanglementPoint {
        delta_c: bath.delta_c,
        mean_field: None,
        routh_hurwitz: None,
        stable: false,
        log_negativity: None,
        lyapunov_residual: None,
        error_code: None,
        error: None,
    };
    let fail = |out: &mut EntanglementPoint, e: Error| {
        out.error_code = Some(e.code().to_string());
        out.error = Some(e.to_string());
    };
    let mf = match mean_field(eff, bath) {
        Ok(m) => m,
        Err(e) => {
            fail(&mut out, e);
            return out;
        }
    };
    let rh = routh_hurwitz(bath.gamma, bath.kappa, mf.omega_eff, mf.delta_eff, mf.g_eff);
    out.stable = rh.stable;
    out.routh_hurwitz = Some(rh);
    if rh.stable {
        match CovarianceState::steady(&mf, bath, bath.n_th(eff)).and_then(|c| Ok((c.residual(), log_negativity(&c.v)?))) {
            Ok((res, en)) => {
                out.lyapunov_residual = Some(res);
                out.log_negativity = Some(en);
            }
            Err(e) => fail(&mut out, e),
        }
    }
    out.mean_field = Some(mf);
    out
}

/// Runs [`entanglement_point`] over a detuning grid, in parallel, in grid order.
pub fn entanglement_sweep(eff: &EffectiveCouplings, bath: &DriveAndBath, delta_grid: &[f64]) -> Vec<EntanglementPoint> {
    use rayon::prelude::*;
    delta_grid.par_iter().map(|&d| entanglement_point(eff, &bath.with_delta_c(d))).collect()
}
