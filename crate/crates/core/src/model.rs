//! Hamiltonians of the cavity–phonon–qubit transfer model.
//!
//! Full model on the tensor-product space:
//!
//! ```text
//! H(t) = (ω_q/2)σ_z + ω_m b†b + g₁(t)(a†b + ab†) + γg₂(t)(bσ₊ + b†σ₋)
//! ```
//!
//! with `ω_q = ω_A − δ_c`. In the single-excitation basis
//! `|φ₁⟩ = |1,0,g⟩, |φ₂⟩ = |0,1,g⟩, |φ₃⟩ = |0,0,e⟩` the interaction part is the
//! tridiagonal matrix returned by [`h_int3`], whose zero-energy dark state
//! carries `|φ₁⟩` into `|φ₃⟩` without populating the phonon. The
//! counter-diabatic term `iG(|φ₁⟩⟨φ₃| − |φ₃⟩⟨φ₁|)` makes that transport exact.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::hilbert::{
    annihilation, embed, number, sigma_minus, sigma_z, Operator, QuantumState, SpaceSignature,
    CAVITY, PHONON, QUBIT,
};
use crate::pulse::PulseSchedule;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Default finite-difference step for [`h_tqd_numeric`], in ns.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Largest tolerated change of the numerical counter-diabatic term when the
/// finite-difference step is halved.
pub const FD_DRIFT_TOL: f64 = 1e-6;
/// Smallest eigenvalue gap accepted by the numerical constructor.
pub const MIN_EIGEN_GAP: f64 = 1e-8;
const GAUGE_ANCHOR_TOL: f64 = 1e-12;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Physical constants of the model plus the truncated space it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega_m: f64,
    /// Effective qubit splitting `ω_A − δ_c`.
    pub omega_q: f64,
    pub schedule: PulseSchedule,
    pub signature: SpaceSignature,
}

impl ModelParams {
    pub fn new(
        omega_m: f64,
        omega_q: f64,
        schedule: PulseSchedule,
        signature: SpaceSignature,
    ) -> Result<Self> {
        if !(omega_m.is_finite() && omega_m > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega_m",
                value: omega_m,
                reason: "must be finite and > 0",
            });
        }
        if !omega_q.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega_q",
                value: omega_q,
                reason: "must be finite",
            });
        }
        if !signature.is_hybrid() {
            return Err(Error::NotHybrid);
        }
        Ok(Self {
            omega_m,
            omega_q,
            schedule,
            signature,
        })
    }

    /// Check the resonance `ω_m = ω_q = 1` used by the reference scenarios.
    pub fn check_unit_resonance(&self, tol: f64) -> Result<()> {
        for (name, value) in [("omega_m", self.omega_m), ("omega_q", self.omega_q)] {
            if (value - 1.0).abs() > tol {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "resonant scenario requires 1 rad/ns",
                });
            }
        }
        Ok(())
    }

    /// Driving Hamiltonian in the three-level basis.
    pub fn three_level(&self, t: f64, drive: Drive) -> CMatrix {
        let mut h = h_int3(&self.schedule, t);
        if drive.counter_diabatic {
            h += h_tqd_closed(&self.schedule, t);
        }
        if drive.free_energy {
            h += free_energy3(self.omega_m, self.omega_q);
        }
        h
    }

    pub fn full_space(&self) -> Result<FullSpaceModel> {
        FullSpaceModel::new(self)
    }
}

/// Which terms enter the driving Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Drive {
    /// Add `iG(|φ₁⟩⟨φ₃| − |φ₃⟩⟨φ₁|)`.
    pub counter_diabatic: bool,
    /// Add the free energies `(ω_q/2)σ_z + ω_m b†b`.
    pub free_energy: bool,
}

/// Index map of `|φ₁⟩, |φ₂⟩, |φ₃⟩` into a state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeLevelBasis {
    signature: SpaceSignature,
    indices: [usize; 3],
}

impl ThreeLevelBasis {
    /// The bare three-level space, signature `(3)`.
    pub fn reduced() -> Self {
        Self {
            signature: SpaceSignature::new(alloc::vec![3]).expect("3 >= 2"),
            indices: [0, 1, 2],
        }
    }

    /// `|1,0,g⟩, |0,1,g⟩, |0,0,e⟩` inside a hybrid signature.
    pub fn embedded(signature: &SpaceSignature) -> Result<Self> {
        if !signature.is_hybrid() {
            return Err(Error::NotHybrid);
        }
        Ok(Self {
            signature: signature.clone(),
            indices: [
                signature.index_of(&[1, 0, 0])?,
                signature.index_of(&[0, 1, 0])?,
                signature.index_of(&[0, 0, 1])?,
            ],
        })
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn indices(&self) -> [usize; 3] {
        self.indices
    }

    /// `|φ_k⟩` for `k ∈ {0, 1, 2}`.
    pub fn ket(&self, k: usize) -> QuantumState {
        let mut v = CVector::zeros(self.signature.total_dim());
        v[self.indices[k]] = re(1.0);
        QuantumState::pure(self.signature.clone(), v).expect("unit basis vector")
    }

    /// Isometry `V` whose columns are the three basis kets.
    pub fn isometry(&self) -> CMatrix {
        let mut v = CMatrix::zeros(self.signature.total_dim(), 3);
        for (k, &i) in self.indices.iter().enumerate() {
            v[(i, k)] = re(1.0);
        }
        v
    }

    /// `V M V†`: a 3×3 operator acting on the single-excitation block.
    pub fn lift(&self, m3: &CMatrix) -> CMatrix {
        let n = self.signature.total_dim();
        let mut out = CMatrix::zeros(n, n);
        for (a, &i) in self.indices.iter().enumerate() {
            for (b, &j) in self.indices.iter().enumerate() {
                out[(i, j)] = m3[(a, b)];
            }
        }
        out
    }

    /// `V† M V`.
    pub fn project(&self, full: &CMatrix) -> CMatrix {
        CMatrix::from_fn(3, 3, |a, b| full[(self.indices[a], self.indices[b])])
    }
}

/// Interaction Hamiltonian in the `(φ₁, φ₂, φ₃)` basis:
/// `[[0, g₁, 0], [g₁, 0, γg₂], [0, γg₂, 0]]`.
pub fn h_int3(schedule: &PulseSchedule, t: f64) -> CMatrix {
    let (g1, g2) = schedule.couplings(t);
    let gg2 = schedule.gamma() * g2;
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 1)] = re(g1);
    h[(1, 0)] = re(g1);
    h[(1, 2)] = re(gg2);
    h[(2, 1)] = re(gg2);
    h
}

/// Closed-form counter-diabatic term `iG(|φ₁⟩⟨φ₃| − |φ₃⟩⟨φ₁|)`.
pub fn h_tqd_closed(schedule: &PulseSchedule, t: f64) -> CMatrix {
    let g = schedule.cd_amplitude(t);
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 2)] = C64::new(0.0, g);
    h[(2, 0)] = C64::new(0.0, -g);
    h
}

/// Free energies of the three basis states:
/// `diag(−ω_q/2, ω_m − ω_q/2, ω_q/2)`.
pub fn free_energy3(omega_m: f64, omega_q: f64) -> CMatrix {
    let d = CVector::from_vec(alloc::vec![
        re(-0.5 * omega_q),
        re(omega_m - 0.5 * omega_q),
        re(0.5 * omega_q),
    ]);
    CMatrix::from_diagonal(&d)
}

/// Zero-energy eigenvector `ψ₁ = (−γg₂, 0, g₁)/g₀` of [`h_int3`].
pub fn dark_state(schedule: &PulseSchedule, t: f64) -> CVector {
    let (g1, g2) = schedule.couplings(t);
    let g0 = schedule.bright_splitting(t);
    CVector::from_vec(alloc::vec![
        re(-schedule.gamma() * g2 / g0),
        re(0.0),
        re(g1 / g0)
    ])
}

/// Bright eigenvectors `ψ∓ = (g₁/g₀, ∓1, γg₂/g₀)/√2` with energies `∓g₀`.
pub fn bright_states(schedule: &PulseSchedule, t: f64) -> (CVector, CVector) {
    let (g1, g2) = schedule.couplings(t);
    let g0 = schedule.bright_splitting(t);
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let a = re(s * g1 / g0);
    let c = re(s * schedule.gamma() * g2 / g0);
    (
        CVector::from_vec(alloc::vec![a, re(-s), c]),
        CVector::from_vec(alloc::vec![a, re(s), c]),
    )
}

/// Precomputed operator pieces of the model on its full tensor-product space.
#[derive(Debug, Clone)]
pub struct FullSpaceModel {
    schedule: PulseSchedule,
    basis: ThreeLevelBasis,
    free: CMatrix,
    cavity_phonon: CMatrix,
    phonon_qubit: CMatrix,
    cd_generator: CMatrix,
}

impl FullSpaceModel {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let sig = &params.signature;
        let dims = sig.dims();
        let a = embed(&annihilation(dims[CAVITY])?, CAVITY, sig)?.into_matrix();
        let b = embed(&annihilation(dims[PHONON])?, PHONON, sig)?.into_matrix();
        let sm = embed(&sigma_minus(), QUBIT, sig)?.into_matrix();
        let sz = embed(&sigma_z(), QUBIT, sig)?.into_matrix();
        let nb = embed(&number(dims[PHONON])?, PHONON, sig)?.into_matrix();

        let free = sz * re(0.5 * params.omega_q) + nb * re(params.omega_m);
        let ab = a.adjoint() * &b;
        let cavity_phonon = &ab + ab.adjoint();
        let bsp = &b * sm.adjoint();
        let phonon_qubit = &bsp + bsp.adjoint();

        let basis = ThreeLevelBasis::embedded(sig)?;
        let mut g3 = CMatrix::zeros(3, 3);
        g3[(0, 2)] = C64::new(0.0, 1.0);
        g3[(2, 0)] = C64::new(0.0, -1.0);
        let cd_generator = basis.lift(&g3);

        Ok(Self {
            schedule: params.schedule,
            basis,
            free,
            cavity_phonon,
            phonon_qubit,
            cd_generator,
        })
    }

    pub fn basis(&self) -> &ThreeLevelBasis {
        &self.basis
    }

    pub fn signature(&self) -> &SpaceSignature {
        self.basis.signature()
    }

    /// `g₁(a†b + ab†) + γg₂(bσ₊ + b†σ₋)` plus the terms selected by `drive`.
    ///
    /// The counter-diabatic term acts on the single-excitation block only.
    pub fn hamiltonian(&self, t: f64, drive: Drive) -> CMatrix {
        let (g1, g2) = self.schedule.couplings(t);
        let mut h =
            &self.cavity_phonon * re(g1) + &self.phonon_qubit * re(self.schedule.gamma() * g2);
        if drive.free_energy {
            h += &self.free;
        }
        if drive.counter_diabatic {
            h += &self.cd_generator * re(self.schedule.cd_amplitude(t));
        }
        h
    }
}

/// Full-space model Hamiltonian including free energies, without the
/// counter-diabatic term.
pub fn h_full(params: &ModelParams, t: f64) -> Result<Operator> {
    let model = FullSpaceModel::new(params)?;
    let drive = Drive {
        counter_diabatic: false,
        free_energy: true,
    };
    Operator::new(params.signature.clone(), model.hamiltonian(t, drive))
}

/// `N_exc = a†a + b†b + |e⟩⟨e|`, conserved by the model Hamiltonian.
pub fn excitation_number(signature: &SpaceSignature) -> Result<Operator> {
    if !signature.is_hybrid() {
        return Err(Error::NotHybrid);
    }
    let dims = signature.dims();
    let na = embed(&number(dims[CAVITY])?, CAVITY, signature)?;
    let nb = embed(&number(dims[PHONON])?, PHONON, signature)?;
    let ne = embed(&number(2)?, QUBIT, signature)?;
    na.add(&nb)?.add(&ne)
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

pub fn hermitian_eigensystem(m: &CMatrix) -> Eigensystem {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Eigensystem { values, vectors }
}

/// Numerical counter-diabatic Hamiltonian
/// `H_cd(t) = iΣ_n(|ṅ⟩⟨n| − ⟨n|ṅ⟩|n⟩⟨n|)` for an arbitrary Hermitian
/// `h_of_t` with non-degenerate spectrum.
///
/// Eigenvector derivatives come from gauge-fixed central differences at
/// `t ± h_step`. The result is recomputed at `h_step/2` and rejected if the
/// two estimates differ by more than [`FD_DRIFT_TOL`]; the finer one is
/// returned.
pub fn h_tqd_numeric<F>(h_of_t: F, t: f64, h_step: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> CMatrix,
{
    let coarse = counter_diabatic_with(&h_of_t, t, h_step, hermitian_eigensystem)?;
    let fine = counter_diabatic_with(&h_of_t, t, 0.5 * h_step, hermitian_eigensystem)?;
    let drift = (&fine - &coarse)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if drift > FD_DRIFT_TOL {
        return Err(Error::DerivativeDrift(drift));
    }
    Ok(fine)
}

/// Single-step version of [`h_tqd_numeric`] with a caller-supplied
/// eigensolver. The solver may return eigenvectors with arbitrary phases.
pub fn counter_diabatic_with<F, E>(
    h_of_t: &F,
    t: f64,
    h_step: f64,
    eigensolver: E,
) -> Result<CMatrix>
where
    F: Fn(f64) -> CMatrix,
    E: Fn(&CMatrix) -> Eigensystem,
{
    if !(h_step.is_finite() && h_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h_step",
            value: h_step,
            reason: "must be finite and > 0",
        });
    }
    let center = eigensolver(&h_of_t(t));
    let gap = center
        .values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min);
    if gap <= MIN_EIGEN_GAP {
        return Err(Error::Degenerate { t, gap });
    }
    let plus = eigensolver(&h_of_t(t + h_step));
    let minus = eigensolver(&h_of_t(t - h_step));

    let n = center.vectors.nrows();
    let mut h_cd = CMatrix::zeros(n, n);
    for k in 0..center.values.len() {
        let raw = center.vectors.column(k).into_owned();
        let anchor = raw.icamax();
        let ket = fix_phase(raw, anchor)?;
        let ahead = fix_phase(best_match(&ket, &plus.vectors), anchor)?;
        let behind = fix_phase(best_match(&ket, &minus.vectors), anchor)?;
        let dket = (ahead - behind) * re(0.5 / h_step);
        let berry = ket.dotc(&dket);
        let bra = ket.adjoint();
        h_cd += &dket * &bra - (&ket * &bra) * berry;
    }
    h_cd *= C64::new(0.0, 1.0);
    Ok((&h_cd + h_cd.adjoint()) * re(0.5))
}

/// Rotate `v` so that component `anchor` is real and positive.
fn fix_phase(v: CVector, anchor: usize) -> Result<CVector> {
    let z = v[anchor];
    let mag = z.norm();
    if mag < GAUGE_ANCHOR_TOL {
        return Err(Error::Gauge(mag));
    }
    Ok(v * (z.conj() / mag))
}

/// Column of `candidates` with the largest overlap with `target`.
fn best_match(target: &CVector, candidates: &CMatrix) -> CVector {
    let mut best = 0;
    let mut best_overlap = -1.0;
    for j in 0..candidates.ncols() {
        let overlap = target.dotc(&candidates.column(j).into_owned()).norm();
        if overlap > best_overlap {
            best_overlap = overlap;
            best = j;
        }
    }
    candidates.column(best).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::SQRT_2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn vmax(v: &CVector) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn params(n_c: usize, n_m: usize) -> ModelParams {
        ModelParams::new(
            1.0,
            1.0,
            PulseSchedule::new(0.75, 20.0).unwrap(),
            SpaceSignature::hybrid(n_c, n_m).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn h_int3_spectrum_unit_g0() {
        // g₁ = 0.6, g₂ = 0.8, γ = 1 → g₀ = 1. Build directly from those couplings.
        let mut h = CMatrix::zeros(3, 3);
        h[(0, 1)] = re(0.6);
        h[(1, 0)] = re(0.6);
        h[(1, 2)] = re(0.8);
        h[(2, 1)] = re(0.8);
        let eig = hermitian_eigensystem(&h);
        assert_abs_diff_eq!(eig.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[2], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn h_int3_at_midpoint() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        let t = p.midpoint();
        let h = h_int3(&p, t);
        assert_abs_diff_eq!(h[(0, 1)].re, SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 2)].re, 10.0 * SQRT_2, epsilon = 1e-13);
        assert_abs_diff_eq!(p.bright_splitting(t), 200.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.bright_splitting(t), 14.1598, epsilon = 1e-4);
    }

    #[test]
    fn dark_and_bright_states_are_eigenvectors() {
        let p = PulseSchedule::new(1.5, 20.0).unwrap();
        for t in [0.0, 0.7, 2.0, 3.5, 8.0] {
            let h = h_int3(&p, t);
            let dark = dark_state(&p, t);
            assert!(vmax(&(&h * &dark)) < 1e-14);
            assert_eq!(dark[1], re(0.0));
            let g0 = p.bright_splitting(t);
            let (minus, plus) = bright_states(&p, t);
            assert!(vmax(&(&h * &minus + &minus * re(g0))) < 1e-12);
            assert!(vmax(&(&h * &plus - &plus * re(g0))) < 1e-12);
        }
    }

    #[test]
    fn closed_cd_term() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        let h = h_tqd_closed(&p, p.midpoint());
        assert_abs_diff_eq!(h[(0, 2)].im, 0.029_379, epsilon = 1e-6);
        assert_eq!(h[(2, 0)], h[(0, 2)].conj());
        assert_eq!(h, h.adjoint());
        assert!(max_abs(&h_tqd_closed(&p, 1e4)) < 1e-300);
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let mut prm = params(2, 3);
        prm.omega_q = 1.3;
        prm.omega_m = 0.7;
        let model = FullSpaceModel::new(&prm).unwrap();
        let drive = Drive {
            counter_diabatic: false,
            free_energy: true,
        };
        // Zero couplings: subtract the coupling pieces at t and check what is left.
        let t = 2.0;
        let (g1, g2) = prm.schedule.couplings(t);
        let h = model.hamiltonian(t, drive)
            - &model.cavity_phonon * re(g1)
            - &model.phonon_qubit * re(20.0 * g2);
        for i in 0..prm.signature.total_dim() {
            let lv = prm.signature.levels_of(i);
            let q = if lv[QUBIT] == 1 { 0.5 } else { -0.5 };
            let expected = 0.7 * lv[PHONON] as f64 + q * 1.3;
            for j in 0..prm.signature.total_dim() {
                let want = if i == j { expected } else { 0.0 };
                assert_abs_diff_eq!(h[(i, j)].re, want, epsilon = 1e-14);
                assert_abs_diff_eq!(h[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn full_hamiltonian_projects_onto_three_level_model() {
        let prm = params(2, 4);
        let basis = ThreeLevelBasis::embedded(&prm.signature).unwrap();
        for t in [0.0, 1.1, 4.0, 9.0] {
            let full = h_full(&prm, t).unwrap();
            assert!(full.is_hermitian(1e-12));
            let projected = basis.project(full.matrix());
            let expected = free_energy3(1.0, 1.0) + h_int3(&prm.schedule, t);
            assert!(max_abs(&(projected - expected)) < 1e-12);
            assert_abs_diff_eq!(free_energy3(1.0, 1.0)[(0, 0)].re, -0.5);
        }
    }

    #[test]
    fn excitation_number_is_conserved() {
        let prm = params(3, 5);
        let n_exc = excitation_number(&prm.signature).unwrap();
        let model = FullSpaceModel::new(&prm).unwrap();
        for drive in [
            Drive::default(),
            Drive {
                counter_diabatic: true,
                free_energy: true,
            },
        ] {
            for t in [0.0, 3.0, 7.5] {
                let h = Operator::new(prm.signature.clone(), model.hamiltonian(t, drive)).unwrap();
                let comm = h.commutator(&n_exc).unwrap();
                assert!(max_abs(comm.matrix()) <= 1e-12);
            }
        }
    }

    #[test]
    fn basis_lift_and_project_roundtrip() {
        let sig = SpaceSignature::hybrid(2, 6).unwrap();
        let basis = ThreeLevelBasis::embedded(&sig).unwrap();
        let v = basis.isometry();
        let gram = v.adjoint() * &v;
        assert_eq!(gram, CMatrix::identity(3, 3));
        let m = h_int3(&PulseSchedule::new(1.0, 3.0).unwrap(), 1.0) + free_energy3(1.0, 0.5);
        assert_eq!(basis.project(&basis.lift(&m)), m);
        assert_eq!(basis.lift(&m), &v * &m * v.adjoint());
        assert!(
            ThreeLevelBasis::embedded(&SpaceSignature::new(alloc::vec![2, 2]).unwrap()).is_err()
        );
    }

    #[test]
    fn numeric_cd_of_constant_hamiltonian_vanishes() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                re(1.0),
                C64::new(0.2, 0.3),
                re(0.0),
                C64::new(0.2, -0.3),
                re(-0.5),
                re(0.4),
                re(0.0),
                re(0.4),
                re(2.0),
            ],
        );
        let cd = h_tqd_numeric(|_| h.clone(), 0.3, DEFAULT_FD_STEP).unwrap();
        assert!(max_abs(&cd) < 1e-9);
    }

    #[test]
    fn numeric_cd_landau_zener() {
        // H = [[t, 1], [1, −t]] = tσ_z + σ_x. Eigenvectors (cos β, sin β),
        // (−sin β, cos β) with tan 2β = 1/t, so β̇ = −1/(2(1 + t²)) and
        // H_cd = iβ̇(|w⟩⟨u| − |u⟩⟨w|) = iβ̇·[[0, −1], [1, 0]].
        let h_of_t = |t: f64| CMatrix::from_row_slice(2, 2, &[re(t), re(1.0), re(1.0), re(-t)]);
        for t in [0.0, 0.5, -1.2] {
            let beta_dot = -0.5 / (1.0 + t * t);
            let expected = CMatrix::from_row_slice(
                2,
                2,
                &[
                    re(0.0),
                    C64::new(0.0, -beta_dot),
                    C64::new(0.0, beta_dot),
                    re(0.0),
                ],
            );
            let cd = h_tqd_numeric(h_of_t, t, DEFAULT_FD_STEP).unwrap();
            assert!(max_abs(&(cd - expected)) < 1e-8, "t = {t}");
        }
        let at_zero = h_tqd_numeric(h_of_t, 0.0, DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(at_zero[(0, 1)].im, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn numeric_cd_rejects_degenerate_spectrum() {
        let err = h_tqd_numeric(|_| CMatrix::identity(3, 3), 0.0, DEFAULT_FD_STEP).unwrap_err();
        assert!(matches!(err, Error::Degenerate { .. }));
        assert!(matches!(
            h_tqd_numeric(|_| CMatrix::identity(2, 2), 0.0, -1.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn numeric_cd_is_gauge_invariant() {
        let p = PulseSchedule::new(2.0, 20.0).unwrap();
        let h_of_t = |t: f64| h_int3(&p, t);
        // Seeded random phases, different on every call.
        let rng = core::cell::RefCell::new(StdRng::seed_from_u64(7));
        let scrambled = |m: &CMatrix| {
            let mut eig = hermitian_eigensystem(m);
            for k in 0..eig.vectors.ncols() {
                let phase = rng.borrow_mut().random_range(0.0..core::f64::consts::TAU);
                let z = C64::from_polar(1.0, phase);
                for r in 0..eig.vectors.nrows() {
                    eig.vectors[(r, k)] *= z;
                }
            }
            eig
        };
        for t in [0.3, 1.5, 2.9, 4.4] {
            let plain =
                counter_diabatic_with(&h_of_t, t, DEFAULT_FD_STEP, hermitian_eigensystem).unwrap();
            let random = counter_diabatic_with(&h_of_t, t, DEFAULT_FD_STEP, scrambled).unwrap();
            assert!(max_abs(&(plain - random)) < 1e-8);
        }
    }

    #[test]
    fn params_validation() {
        let p = PulseSchedule::new(1.0, 20.0).unwrap();
        let sig = SpaceSignature::hybrid(2, 3).unwrap();
        assert!(ModelParams::new(0.0, 1.0, p, sig.clone()).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, p, sig.clone()).is_err());
        assert_eq!(
            ModelParams::new(
                1.0,
                1.0,
                p,
                SpaceSignature::new(alloc::vec![2, 3, 3]).unwrap()
            )
            .unwrap_err(),
            Error::NotHybrid
        );
        let prm = ModelParams::new(1.0, 1.0, p, sig.clone()).unwrap();
        assert!(prm.check_unit_resonance(1e-12).is_ok());
        let off = ModelParams::new(1.0, 0.9, p, sig).unwrap();
        assert!(off.check_unit_resonance(1e-12).is_err());
    }
}
