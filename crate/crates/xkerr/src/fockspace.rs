//! Truncated two-mode Fock space.
//!
//! The joint basis is cavity-major: `|n⟩_a|m⟩_b` has index `n·N_m + m`.
//! Every operator in the crate uses this ordering.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};

use crate::circuit::EffectiveCouplings;
use crate::error::{Error, Result};
use crate::lindblad::DriveAndBath;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    n_a: usize,
    n_m: usize,
}

impl SpaceSpec {
    pub fn new(n_a: usize, n_m: usize) -> Result<Self> {
        if n_a < 2 || n_m < 2 {
            return Err(Error::Truncation(format!("need N_a, N_m ≥ 2, got ({n_a}, {n_m})")));
        }
        Ok(Self { n_a, n_m })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_m(&self) -> usize {
        self.n_m
    }

    pub fn dim(&self) -> usize {
        self.n_a * self.n_m
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        debug_assert!(n < self.n_a && m < self.n_m);
        n * self.n_m + m
    }

    /// Inverse of [`SpaceSpec::index`]: `(n, m)`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.n_m, i % self.n_m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Cavity,
    Mechanics,
}

/// Sparse operator on a [`SpaceSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    space: SpaceSpec,
    matrix: CsrMatrix<C64>,
}

impl FockOperator {
    pub fn from_triplets(space: SpaceSpec, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let d = space.dim();
        let mut coo = CooMatrix::new(d, d);
        for (i, j, v) in triplets {
            if v != C64::new(0.0, 0.0) {
                coo.push(i, j, v);
            }
        }
        Self { space, matrix: CsrMatrix::from(&coo) }
    }

    pub fn identity(space: SpaceSpec) -> Self {
        Self { space, matrix: CsrMatrix::identity(space.dim()) }
    }

    pub fn zeros(space: SpaceSpec) -> Self {
        Self { space, matrix: CsrMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn csr(&self) -> &CsrMatrix<C64> {
        &self.matrix
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.matrix.triplet_iter().map(|(i, j, v)| (i, j, *v))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.space.dim();
        let mut m = DMatrix::zeros(d, d);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.matrix.transpose();
        t.values_mut().iter_mut().for_each(|v| *v = v.conj());
        Self { space: self.space, matrix: t }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self { space: self.space, matrix: &self.matrix * &other.matrix }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self { space: self.space, matrix: &self.matrix + &other.matrix }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * s }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self).scale_re(-1.0))
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.space.dim());
        for (i, j, x) in self.triplets() {
            out[i] += x * v[j];
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.values().iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max|M − M†| < 1e-12·‖M‖`.
    pub fn is_hermitian(&self) -> bool {
        let diff = self.add(&self.adjoint().scale_re(-1.0));
        diff.max_abs() <= 1e-12 * self.norm().max(f64::MIN_POSITIVE)
    }

    /// True when no entry couples different photon numbers.
    pub fn is_photon_block_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| self.space.split(i).0 == self.space.split(j).0)
    }

    /// True when every nonzero entry sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| i == j)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.space.dim()];
        for (i, j, v) in self.triplets() {
            if i == j {
                d[i] += v;
            }
        }
        d
    }

    /// Dense `N_m × N_m` block acting within photon number `n`.
    pub fn photon_block(&self, n: usize) -> DMatrix<C64> {
        let nm = self.space.n_m;
        let mut b = DMatrix::zeros(nm, nm);
        for (i, j, v) in self.triplets() {
            let ((ni, mi), (nj, mj)) = (self.space.split(i), self.space.split(j));
            if ni == n && nj == n {
                b[(mi, mj)] += v;
            }
        }
        b
    }
}

/// Annihilation operator of `mode`, tensored with the identity of the other.
pub fn ladder(space: SpaceSpec, mode: Mode) -> FockOperator {
    let entries = (0..space.n_a).flat_map(move |n| {
        (0..space.n_m).filter_map(move |m| match mode {
            Mode::Cavity if n > 0 => {
                Some((space.index(n - 1, m), space.index(n, m), C64::new((n as f64).sqrt(), 0.0)))
            }
            Mode::Mechanics if m > 0 => {
                Some((space.index(n, m - 1), space.index(n, m), C64::new((m as f64).sqrt(), 0.0)))
            }
            _ => None,
        })
    });
    FockOperator::from_triplets(space, entries)
}

/// `â†â` or `b̂†b̂`.
pub fn number(space: SpaceSpec, mode: Mode) -> FockOperator {
    let entries = (0..space.dim()).map(move |i| {
        let (n, m) = space.split(i);
        let k = match mode {
            Mode::Cavity => n,
            Mode::Mechanics => m,
        };
        (i, i, C64::new(k as f64, 0.0))
    });
    FockOperator::from_triplets(space, entries)
}

fn hamiltonian(space: SpaceSpec, eff: &EffectiveCouplings, cavity_frequency: f64, omega: f64) -> FockOperator {
    let mut t = Vec::with_capacity(4 * space.dim());
    for n in 0..space.n_a {
        let nf = n as f64;
        for m in 0..space.n_m {
            let mf = m as f64;
            let i = space.index(n, m);
            let diag = cavity_frequency * nf + eff.omega_m * mf + eff.gbar_ck * nf * mf + eff.g_ck_prime * nf * mf * mf;
            t.push((i, i, C64::new(diag, 0.0)));
            if m + 1 < space.n_m {
                let x = C64::new(eff.g0 * nf * (mf + 1.0).sqrt(), 0.0);
                let j = space.index(n, m + 1);
                t.push((i, j, x));
                t.push((j, i, x));
            }
            if n + 1 < space.n_a {
                let x = C64::new(omega * (nf + 1.0).sqrt(), 0.0);
                let j = space.index(n + 1, m);
                t.push((i, j, x));
                t.push((j, i, x));
            }
        }
    }
    FockOperator::from_triplets(space, t)
}

/// `ω_c n_a + ω_M n_b + g₀ n_a(b + b†) + ḡ_CK n_a n_b + g′_CK n_a n_b²`.
pub fn hamiltonian_lab(eff: &EffectiveCouplings, space: SpaceSpec) -> FockOperator {
    hamiltonian(space, eff, eff.omega_c, 0.0)
}

/// Frame rotating at the drive: `ω_c → Δ_c` plus `Ω(a + a†)`.
pub fn hamiltonian_driven(eff: &EffectiveCouplings, drive: &DriveAndBath, space: SpaceSpec) -> FockOperator {
    hamiltonian(space, eff, drive.delta_c, drive.omega(eff))
}

/// Lab Hamiltonian with the free rotations `ω_c n_a + ω_M n_b` removed.
///
/// Only meaningful when the remaining Hamiltonian commutes with both
/// number operators (`g₀ = 0`), in which case the frame change is exact
/// and leaves the dissipators untouched.
pub fn hamiltonian_interaction(eff: &EffectiveCouplings, space: SpaceSpec) -> FockOperator {
    let mut e = eff.clone();
    e.omega_m = 0.0;
    hamiltonian(space, &e, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> SpaceSpec {
        SpaceSpec::new(4, 7).unwrap()
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert!(SpaceSpec::new(1, 5).is_err());
        assert!(SpaceSpec::new(3, 1).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = space();
        for i in 0..s.dim() {
            let (n, m) = s.split(i);
            assert_eq!(s.index(n, m), i);
        }
    }

    #[test]
    fn ladder_action() {
        let s = space();
        let a = ladder(s, Mode::Cavity).to_dense();
        for n in 1..s.n_a() {
            for m in 0..s.n_m() {
                assert!((a[(s.index(n - 1, m), s.index(n, m))].re - (n as f64).sqrt()).abs() < 1e-15);
            }
        }
        for m in 0..s.n_m() {
            let col = a.column(s.index(0, m));
            assert!(col.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn canonical_commutator_below_the_edge() {
        let s = space();
        for mode in [Mode::Cavity, Mode::Mechanics] {
            let a = ladder(s, mode);
            let c = a.commutator(&a.adjoint()).to_dense();
            for i in 0..s.dim() {
                let (n, m) = s.split(i);
                let (k, top) = match mode {
                    Mode::Cavity => (n, s.n_a() - 1),
                    Mode::Mechanics => (m, s.n_m() - 1),
                };
                // a a† loses the level above the cutoff, leaving −k there.
                let expect = if k == top { -(k as f64) } else { 1.0 };
                assert!((c[(i, i)].re - expect).abs() < 1e-12, "{mode:?} {i}");
            }
        }
    }

    #[test]
    fn number_matches_ladder_product() {
        let s = space();
        for mode in [Mode::Cavity, Mode::Mechanics] {
            let a = ladder(s, mode);
            let n1 = a.adjoint().mul(&a).to_dense();
            let n2 = number(s, mode).to_dense();
            assert!((n1 - n2).norm() < 1e-13);
        }
    }

    #[test]
    fn lab_hamiltonian_matches_operator_algebra() {
        let s = space();
        let eff = EffectiveCouplings::new(5.0, 1.0, -0.3, 0.12, -0.04);
        let b = ladder(s, Mode::Mechanics);
        let na = number(s, Mode::Cavity);
        let nb = number(s, Mode::Mechanics);
        let h = na
            .scale_re(eff.omega_c)
            .add(&nb.scale_re(eff.omega_m))
            .add(&na.mul(&b.add(&b.adjoint())).scale_re(eff.g0))
            .add(&na.mul(&nb).scale_re(eff.gbar_ck))
            .add(&na.mul(&nb).mul(&nb).scale_re(eff.g_ck_prime));
        let h_lab = hamiltonian_lab(&eff, s);
        assert!((h.to_dense() - h_lab.to_dense()).norm() < 1e-12);
        assert!(h_lab.is_hermitian());
        assert!(h_lab.commutator(&na).norm() < 1e-12 * h_lab.norm());
        assert!(h_lab.is_photon_block_diagonal());
    }

    #[test]
    fn zero_couplings_give_bare_ladder() {
        let s = space();
        let eff = EffectiveCouplings::new(5.0, 1.0, 0.0, 0.0, 0.0);
        let h = hamiltonian_lab(&eff, s);
        assert!(h.is_diagonal());
        for (i, v) in h.diagonal().iter().enumerate() {
            let (n, m) = s.split(i);
            assert_eq!(v.re, 5.0 * n as f64 + m as f64);
        }
    }
}
