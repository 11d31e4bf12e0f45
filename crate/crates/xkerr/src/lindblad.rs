//! Master equation on the truncated two-mode space.
//!
//! ```text
//! dρ/dt = −i[H, ρ] + κ D[a]ρ + γ(n̄+1) D[b]ρ + γn̄ D[b†]ρ
//! D[c]ρ = cρc† − ½{c†c, ρ}
//! ```
//!
//! Superoperators act on row-major vectorized density matrices:
//! `vec(ρ)[i·d + j] = ρ_ij`.

use std::collections::HashMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};

use crate::circuit::EffectiveCouplings;
use crate::error::{Error, Result};
use crate::fockspace::{self, FockOperator, Mode, SpaceSpec};
use crate::units;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Ω in rad/s.
    Amplitude(f64),
    /// Input power in dBm; converted at the drive frequency `ω_c − Δ_c`.
    PowerDbm(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thermal {
    Occupation(f64),
    /// Bath temperature in kelvin, converted at `ω_M`.
    Temperature(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveAndBath {
    /// Cavity–drive detuning `Δ_c` (rad/s).
    pub delta_c: f64,
    pub drive: Drive,
    /// Cavity decay rate (rad/s).
    pub kappa: f64,
    /// Mechanical decay rate (rad/s).
    pub gamma: f64,
    pub thermal: Thermal,
}

impl DriveAndBath {
    pub fn new(delta_c: f64, omega: f64, kappa: f64, gamma: f64, n_th: f64) -> Self {
        Self { delta_c, drive: Drive::Amplitude(omega), kappa, gamma, thermal: Thermal::Occupation(n_th) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::param("kappa", format!("must be ≥ 0, got {}", self.kappa)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::param("gamma", format!("must be ≥ 0, got {}", self.gamma)));
        }
        match self.thermal {
            Thermal::Occupation(n) | Thermal::Temperature(n) if !(n.is_finite() && n >= 0.0) => {
                Err(Error::param("n_th", format!("must be ≥ 0, got {n}")))
            }
            _ => Ok(()),
        }
    }

    /// Drive amplitude Ω in rad/s.
    pub fn omega(&self, eff: &EffectiveCouplings) -> f64 {
        match self.drive {
            Drive::Amplitude(o) => o,
            Drive::PowerDbm(p) => {
                units::drive_amplitude(self.kappa, units::dbm_to_watts(p), eff.omega_c - self.delta_c)
            }
        }
    }

    pub fn n_th(&self, eff: &EffectiveCouplings) -> f64 {
        match self.thermal {
            Thermal::Occupation(n) => n,
            Thermal::Temperature(t) => units::bose_occupation(eff.omega_m, t),
        }
    }

    pub fn with_delta_c(&self, delta_c: f64) -> Self {
        Self { delta_c, ..*self }
    }

    pub fn with_n_th(&self, n_th: f64) -> Self {
        Self { thermal: Thermal::Occupation(n_th), ..*self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: SpaceSpec,
    rho: DMatrix<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hygiene {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Hygiene {
    pub fn within(&self, trace: f64, herm: f64, pos: f64) -> bool {
        self.trace_error <= trace && self.hermiticity_error <= herm && self.min_eigenvalue >= pos
    }
}

impl DensityMatrix {
    pub fn new(space: SpaceSpec, rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != space.dim() || rho.ncols() != space.dim() {
            return Err(Error::param("rho", format!("shape {:?} does not match dimension {}", rho.shape(), space.dim())));
        }
        Ok(Self { space, rho })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(space: SpaceSpec, psi: &DVector<C64>) -> Result<Self> {
        Self::new(space, psi * psi.adjoint())
    }

    /// Product of a cavity Fock state `|n⟩` and a mechanical pure state.
    pub fn fock_times(space: SpaceSpec, n: usize, mech: &DVector<C64>) -> Result<Self> {
        if n >= space.n_a() || mech.len() != space.n_m() {
            return Err(Error::Truncation(format!("|{n}⟩ ⊗ ψ_b does not fit in {space:?}")));
        }
        let mut psi = DVector::zeros(space.dim());
        for m in 0..space.n_m() {
            psi[space.index(n, m)] = mech[m];
        }
        Self::pure(space, &psi)
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn expect(&self, op: &FockOperator) -> C64 {
        op.triplets().map(|(i, j, v)| v * self.rho[(j, i)]).sum()
    }

    /// Photon-number distribution `P(n)`.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.space.n_a()];
        for i in 0..self.space.dim() {
            p[self.space.split(i).0] += self.rho[(i, i)].re;
        }
        p
    }

    pub fn mean_phonons(&self) -> f64 {
        (0..self.space.dim()).map(|i| self.space.split(i).1 as f64 * self.rho[(i, i)].re).sum()
    }

    /// Reduced state of the mechanical mode.
    pub fn mechanical(&self) -> DMatrix<C64> {
        let (na, nm) = (self.space.n_a(), self.space.n_m());
        DMatrix::from_fn(nm, nm, |m, k| (0..na).map(|n| self.rho[(self.space.index(n, m), self.space.index(n, k))]).sum())
    }

    pub fn hermitize(&mut self) {
        self.rho = (&self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
    }

    pub fn hygiene(&self) -> Hygiene {
        let herm = (&self.rho - self.rho.adjoint()).iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let h = (&self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        Hygiene { trace_error: (self.trace() - 1.0).norm(), hermiticity_error: herm, min_eigenvalue: min_eig }
    }
}

/// Sparse Lindblad superoperator.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: SpaceSpec,
    matrix: CsrMatrix<C64>,
}

/// Builds `L` for Hamiltonian `h` and collapse operators `(c, rate)`,
/// each contributing `rate·D[c]`.
pub fn liouvillian_from(h: &FockOperator, collapse: &[(FockOperator, f64)]) -> Liouvillian {
    let space = h.space();
    let d = space.dim();
    // K = −iH − ½Σ r c†c, so that L(ρ) = Kρ + ρK† + Σ r cρc†.
    let mut k = h.scale(C64::new(0.0, -1.0));
    for (c, r) in collapse {
        if *r != 0.0 {
            k = k.add(&c.adjoint().mul(c).scale_re(-0.5 * r));
        }
    }
    let mut coo = CooMatrix::new(d * d, d * d);
    for (i, kk, v) in k.triplets() {
        for j in 0..d {
            coo.push(i * d + j, kk * d + j, v);
            coo.push(j * d + i, j * d + kk, v.conj());
        }
    }
    for (c, r) in collapse {
        if *r == 0.0 {
            continue;
        }
        let entries: Vec<_> = c.triplets().collect();
        for &(i, kk, ci) in &entries {
            for &(j, l, cj) in &entries {
                coo.push(i * d + j, kk * d + l, ci * cj.conj() * *r);
            }
        }
    }
    Liouvillian { space, matrix: CsrMatrix::from(&coo) }
}

/// The model's Liouvillian: cavity decay into vacuum, thermal mechanical bath.
pub fn liouvillian(h: &FockOperator, bath: &DriveAndBath, n_th: f64) -> Liouvillian {
    let space = h.space();
    let a = fockspace::ladder(space, Mode::Cavity);
    let b = fockspace::ladder(space, Mode::Mechanics);
    let bd = b.adjoint();
    liouvillian_from(h, &[(a, bath.kappa), (b, bath.gamma * (n_th + 1.0)), (bd, bath.gamma * n_th)])
}

impl Liouvillian {
    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn csr(&self) -> &CsrMatrix<C64> {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.matrix.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    fn apply_vec(&self, x: &[C64], out: &mut [C64]) {
        let (offsets, cols, vals) = self.matrix.csr_data();
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for p in offsets[r]..offsets[r + 1] {
                acc += vals[p] * x[cols[p]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.space.dim();
        let x = vectorize(rho);
        let mut y = vec![ZERO; d * d];
        self.apply_vec(&x, &mut y);
        unvectorize(&y, d)
    }

    /// Largest `|Σ_i L[(ii), ·]|`; zero for a trace-preserving map.
    pub fn trace_defect(&self) -> f64 {
        let d = self.space.dim();
        let mut col_sums = vec![ZERO; d * d];
        for (r, c, v) in self.matrix.triplet_iter() {
            if r / d == r % d {
                col_sums[c] += *v;
            }
        }
        col_sums.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.matrix.nrows();
        let mut m = DMatrix::zeros(n, n);
        for (i, j, v) in self.matrix.triplet_iter() {
            m[(i, j)] += *v;
        }
        m
    }

    /// Full spectrum by dense diagonalization; only for small truncations.
    pub fn spectrum(&self) -> Result<Vec<C64>> {
        let dense = self.to_dense();
        let n = dense.nrows();
        let m = faer::Mat::<C64>::from_fn(n, n, |i, j| dense[(i, j)]);
        m.eigenvalues().map_err(|e| Error::Solver(format!("{e:?}")))
    }
}

fn vectorize(rho: &DMatrix<C64>) -> Vec<C64> {
    let d = rho.nrows();
    (0..d * d).map(|k| rho[(k / d, k % d)]).collect()
}

fn unvectorize(x: &[C64], d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |i, j| x[i * d + j])
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L(ρ)‖_F / (‖L‖_F ‖ρ‖_F)`.
    pub residual: f64,
}

/// Null vector of `L` normalized to unit trace.
///
/// The `(0,0)` row of `L` is replaced by the trace functional and the
/// bordered system is solved by sparse LU.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.space.dim();
    let n = d * d;
    let mut t: Vec<Triplet<usize, usize, C64>> = l
        .matrix
        .triplet_iter()
        .filter(|(r, _, _)| *r != 0)
        .map(|(r, c, v)| Triplet::new(r, c, *v))
        .collect();
    t.extend((0..d).map(|i| Triplet::new(0, i * d + i, C64::new(1.0, 0.0))));
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &t)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::Solver(format!("{e:?}")))?;
    let mut rhs = faer::Mat::<C64>::zeros(n, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    let v: Vec<C64> = (0..n).map(|k| x[(k, 0)]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateSteadyState { gap: 0.0 });
    }

    let mut rho = DensityMatrix { space: l.space, rho: unvectorize(&v, d) };
    rho.hermitize();
    let tr = rho.trace();
    rho.rho /= tr;
    let lr = l.apply(&rho.rho);
    let residual = lr.norm() / (l.norm() * rho.rho.norm());
    if residual > 1e-10 {
        // A rank-deficient bordered system leaves a large residual rather
        // than a clean failure.
        return Err(Error::DegenerateSteadyState { gap: residual });
    }
    Ok(SteadyState { rho, residual })
}

/// Output of [`propagate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest `|Tr ρ(t) − Tr ρ(0)|` over the output points.
    pub max_trace_drift: f64,
    pub method: PropagationMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagationMethod {
    /// Exact exponentials of the independent blocks of `L`.
    BlockExponential,
    /// Adaptive Dormand–Prince 5(4).
    DormandPrince,
}

#[derive(Clone, Copy, Debug)]
pub struct PropagationOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest block for which exact exponentials are used.
    pub max_block: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_block: 400 }
    }
}

pub fn propagate(rho0: &DensityMatrix, l: &Liouvillian, t_grid: &[f64]) -> Result<Trajectory> {
    propagate_with(rho0, l, t_grid, PropagationOptions::default())
}

pub fn propagate_with(rho0: &DensityMatrix, l: &Liouvillian, t_grid: &[f64], opts: PropagationOptions) -> Result<Trajectory> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_grid", "must be strictly increasing"));
    }
    if rho0.space != l.space {
        return Err(Error::param("rho0", "space differs from the Liouvillian's"));
    }
    let blocks = independent_blocks(&l.matrix);
    let largest = blocks.iter().map(Vec::len).max().unwrap_or(0);
    let (raw, method) = if largest <= opts.max_block {
        (block_exponential(rho0, l, &blocks, t_grid), PropagationMethod::BlockExponential)
    } else {
        (dormand_prince(rho0, l, t_grid, opts)?, PropagationMethod::DormandPrince)
    };

    let tr0 = rho0.trace();
    let d = l.space.dim();
    let mut max_trace_drift: f64 = 0.0;
    let states = raw
        .iter()
        .map(|x| {
            let mut r = DensityMatrix { space: l.space, rho: unvectorize(x, d) };
            max_trace_drift = max_trace_drift.max((r.trace() - tr0).norm());
            r.hermitize();
            r
        })
        .collect();
    Ok(Trajectory { times: t_grid.to_vec(), states, max_trace_drift, method })
}

/// Connected components of the sparsity graph of `m`.
fn independent_blocks(m: &CsrMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, v) in m.triplet_iter() {
        if *v != ZERO {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    blocks
}

fn block_exponential(rho0: &DensityMatrix, l: &Liouvillian, blocks: &[Vec<usize>], t_grid: &[f64]) -> Vec<Vec<C64>> {
    let n = l.matrix.nrows();
    let mut local = vec![usize::MAX; n];
    let mut block_of = vec![0; n];
    for (b, idx) in blocks.iter().enumerate() {
        for (k, &i) in idx.iter().enumerate() {
            local[i] = k;
            block_of[i] = b;
        }
    }
    let mut dense_blocks: Vec<DMatrix<C64>> =
        blocks.iter().map(|idx| DMatrix::zeros(idx.len(), idx.len())).collect();
    for (i, j, v) in l.matrix.triplet_iter() {
        dense_blocks[block_of[i]][(local[i], local[j])] += *v;
    }

    let mut state = vectorize(&rho0.rho);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut cache: Vec<(f64, Vec<DMatrix<C64>>)> = Vec::new();
    let mut t_prev = t_grid.first().copied().unwrap_or(0.0);
    for &t in t_grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let pos = cache.iter().position(|(h, _)| ((h - dt) / dt).abs() < 1e-12);
            let pos = pos.unwrap_or_else(|| {
                let props = dense_blocks.iter().map(|b| (b * C64::new(dt, 0.0)).exp()).collect();
                cache.push((dt, props));
                cache.len() - 1
            });
            let props = &cache[pos].1;
            for (idx, p) in blocks.iter().zip(props) {
                let x = DVector::from_iterator(idx.len(), idx.iter().map(|&i| state[i]));
                let y = p * x;
                for (k, &i) in idx.iter().enumerate() {
                    state[i] = y[k];
                }
            }
        }
        out.push(state.clone());
        t_prev = t;
    }
    out
}

// Dormand–Prince 5(4) tableau. The generator is autonomous, so the nodes
// are not needed.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dormand_prince(rho0: &DensityMatrix, l: &Liouvillian, t_grid: &[f64], opts: PropagationOptions) -> Result<Vec<Vec<C64>>> {
    let n = l.matrix.nrows();
    let d = l.space.dim();
    let trace = |y: &[C64]| -> C64 { (0..d).map(|i| y[i * d + i]).sum() };
    let mut y = vectorize(&rho0.rho);
    let mut k: Vec<Vec<C64>> = vec![vec![ZERO; n]; 7];
    let mut tmp = vec![ZERO; n];
    let mut out = Vec::with_capacity(t_grid.len());
    let Some(&t0) = t_grid.first() else { return Ok(out) };
    let span = t_grid.last().unwrap() - t0;
    let mut t = t0;
    l.apply_vec(&y, &mut k[0]);
    let knorm = k[0].iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let ynorm = y.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let mut h = if knorm > 0.0 { 0.01 * (ynorm.max(opts.atol) / knorm) } else { span.max(1e-300) };
    out.push(y.clone());

    for &target in &t_grid[1..] {
        while t < target {
            let step = h.min(target - t);
            if step < 1e-14 * span.max(f64::MIN_POSITIVE) && target - t > step {
                return Err(Error::StepUnderflow { t, h: step });
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, a) in DP_A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += k[j][i] * (a * step);
                        }
                    }
                    tmp[i] = acc;
                }
                l.apply_vec(&tmp, &mut k[s]);
            }
            let mut err: f64 = 0.0;
            let mut y_new = vec![ZERO; n];
            for i in 0..n {
                let mut acc = y[i];
                let mut e = ZERO;
                for s in 0..7 {
                    acc += k[s][i] * (DP_B[s] * step);
                    e += k[s][i] * (DP_E[s] * step);
                }
                y_new[i] = acc;
                let sc = opts.atol + opts.rtol * y[i].norm().max(acc.norm());
                err = err.max(e.norm() / sc);
            }
            if err <= 1.0 {
                let drift = (trace(&y_new) - trace(&y)).norm();
                if drift > 1e-10 {
                    return Err(Error::Solver(format!("trace drift {drift:.3e} in one step")));
                }
                t += step;
                y = y_new;
                // FSAL: the last stage is the derivative at the new point.
                k.swap(0, 6);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 || step == h {
                h = step * fac;
            } else {
                h *= fac;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `Tr(a†ⁿaⁿρ) / Tr(a†aρ)ⁿ`.
pub fn gn0(rho: &DensityMatrix, n: u32) -> Result<f64> {
    let p = rho.photon_distribution();
    let mean: f64 = p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum();
    if mean <= 1e-12 {
        return Err(Error::UndefinedCorrelation(mean));
    }
    let falling = |k: usize| (0..n as usize).map(|j| k as f64 - j as f64).product::<f64>().max(0.0);
    let num: f64 = p.iter().enumerate().map(|(k, pk)| falling(k) * pk).sum();
    Ok(num / mean.powi(n as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatClass {
    OnePB,
    TwoPB,
    TwoPIT,
    ThreePIT,
    Poissonian,
}

impl StatClass {
    pub fn label(&self) -> &'static str {
        match self {
            StatClass::OnePB => "1PB",
            StatClass::TwoPB => "2PB",
            StatClass::TwoPIT => "2PIT",
            StatClass::ThreePIT => "3PIT",
            StatClass::Poissonian => "Poissonian",
        }
    }
}

pub const TIE_BAND: f64 = 1e-6;

/// Five-way photon-statistics classifier on `g⁽²⁾(0)` alone for blockade,
/// then `g⁽³⁾(0)` for the rest. Comparisons within [`TIE_BAND`] of a
/// boundary return [`StatClass::Poissonian`].
pub fn classify(g2: f64, g3: f64) -> StatClass {
    if (g2 - 1.0).abs() <= TIE_BAND {
        return StatClass::Poissonian;
    }
    if g2 < 1.0 {
        return StatClass::OnePB;
    }
    if (g3 - 1.0).abs() <= TIE_BAND {
        return StatClass::Poissonian;
    }
    if g3 < 1.0 {
        return StatClass::TwoPB;
    }
    if (g3 / g2 - 1.0).abs() <= TIE_BAND {
        return StatClass::Poissonian;
    }
    if g3 < g2 {
        StatClass::TwoPIT
    } else {
        StatClass::ThreePIT
    }
}

/// Steady-state photon statistics at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonStatistics {
    pub g2: f64,
    pub g3: f64,
    pub class: StatClass,
    pub mean_photons: f64,
    pub mean_phonons: f64,
    pub residual: f64,
    pub hygiene: Hygiene,
}

pub fn photon_statistics(eff: &EffectiveCouplings, bath: &DriveAndBath, space: SpaceSpec) -> Result<PhotonStatistics> {
    bath.validate()?;
    let h = fockspace::hamiltonian_driven(eff, bath, space);
    let l = liouvillian(&h, bath, bath.n_th(eff));
    let ss = steady_state(&l)?;
    let g2 = gn0(&ss.rho, 2)?;
    let g3 = gn0(&ss.rho, 3)?;
    let p = ss.rho.photon_distribution();
    Ok(PhotonStatistics {
        g2,
        g3,
        class: classify(g2, g3),
        mean_photons: p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum(),
        mean_phonons: ss.rho.mean_phonons(),
        residual: ss.residual,
        hygiene: ss.rho.hygiene(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_cases() {
        assert_eq!(classify(0.008, 0.1), StatClass::OnePB);
        assert_eq!(classify(0.5, 3.0), StatClass::OnePB);
        assert_eq!(classify(1.5, 0.5), StatClass::TwoPB);
        assert_eq!(classify(2.0, 1.5), StatClass::TwoPIT);
        assert_eq!(classify(1.5, 2.0), StatClass::ThreePIT);
        assert_eq!(classify(1.0 + 1e-8, 0.2), StatClass::Poissonian);
        assert_eq!(classify(1.0, 1.0), StatClass::Poissonian);
    }

    #[test]
    fn power_drive_uses_drive_frequency() {
        let eff = EffectiveCouplings::new(units::hz_to_angular(10e9), 1e8, 0.0, 0.0, 0.0);
        let b = DriveAndBath { drive: Drive::PowerDbm(-50.0), ..DriveAndBath::new(3e8, 0.0, 1e6, 5e5, 0.5) };
        let expect = (2.0 * 1e6 * 1e-8 / (units::HBAR * (eff.omega_c - 3e8))).sqrt();
        assert!((b.omega(&eff) / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blocks_split_number_diagonal_generators() {
        let s = SpaceSpec::new(2, 4).unwrap();
        let eff = EffectiveCouplings::new(0.0, 1.0, 0.0, 0.3, 0.1);
        let h = fockspace::hamiltonian_lab(&eff, s);
        let l = liouvillian(&h, &DriveAndBath::new(0.0, 0.0, 0.2, 0.1, 0.3), 0.3);
        let blocks = independent_blocks(&l.matrix);
        // one block per coherence sector (Δn, Δm)
        assert_eq!(blocks.len(), 3 * 7);
    }
}
