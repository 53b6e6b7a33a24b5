//! Populations, transfer fidelity and occupations extracted from trajectories.

use alloc::vec::Vec;

use crate::dynamics::Trajectory;
use crate::hilbert::{embed, number, partial_trace, QuantumState, CAVITY, PHONON, QUBIT};
use crate::model::ThreeLevelBasis;
use crate::{Error, Result};

/// Imaginary residue tolerated on a real expectation value.
pub const IMAG_TOL: f64 = 1e-12;

/// Time series of basis populations and, for mixed hybrid trajectories, the
/// transfer fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferRecord {
    pub times: Vec<f64>,
    pub p_phi1: Vec<f64>,
    pub p_phi2: Vec<f64>,
    pub p_phi3: Vec<f64>,
    pub fidelity: Option<Vec<f64>>,
    pub norm_or_trace: Vec<f64>,
}

/// Largest value and the time it occurs (first occurrence on ties).
fn peak(times: &[f64], values: &[f64]) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for (&t, &v) in times.iter().zip(values) {
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}

impl TransferRecord {
    /// Populations for every trajectory, plus fidelity when the states are
    /// density matrices on a hybrid space.
    pub fn from_trajectory(traj: &Trajectory, basis: &ThreeLevelBasis) -> Result<Self> {
        let mut record = populations(traj, basis)?;
        if !traj.is_pure() && traj.signature().is_hybrid() {
            record.fidelity = Some(fidelity(traj)?);
        }
        Ok(record)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(max_t F, argmax)`.
    pub fn peak_fidelity(&self) -> Option<(f64, f64)> {
        self.fidelity.as_ref().map(|f| peak(&self.times, f))
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.fidelity.as_ref().and_then(|f| f.last().copied())
    }

    /// `(max_t P(φ₃), argmax)`.
    pub fn peak_p_phi3(&self) -> (f64, f64) {
        peak(&self.times, &self.p_phi3)
    }

    pub fn final_p_phi3(&self) -> f64 {
        *self.p_phi3.last().expect("non-empty record")
    }

    pub fn max_p_phi2(&self) -> f64 {
        self.p_phi2
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `[P(φ₁), P(φ₂), P(φ₃)]` of a single state.
pub fn state_populations(state: &QuantumState, basis: &ThreeLevelBasis) -> Result<[f64; 3]> {
    if state.signature() != basis.signature() {
        return Err(Error::DimensionMismatch {
            expected: basis.signature().total_dim(),
            found: state.signature().total_dim(),
        });
    }
    let idx = basis.indices();
    Ok([
        state.population(idx[0]),
        state.population(idx[1]),
        state.population(idx[2]),
    ])
}

/// Per-step `P(φ_k) = |⟨φ_k|ψ⟩|²` or `⟨φ_k|ρ|φ_k⟩`. The fidelity column is
/// left empty; see [`TransferRecord::from_trajectory`].
pub fn populations(traj: &Trajectory, basis: &ThreeLevelBasis) -> Result<TransferRecord> {
    let n = traj.len();
    let mut record = TransferRecord {
        times: traj.times().to_vec(),
        p_phi1: Vec::with_capacity(n),
        p_phi2: Vec::with_capacity(n),
        p_phi3: Vec::with_capacity(n),
        fidelity: None,
        norm_or_trace: traj.diagnostics().iter().map(|d| d.norm_or_trace).collect(),
    };
    for state in traj.states() {
        let [p1, p2, p3] = state_populations(state, basis)?;
        record.p_phi1.push(p1);
        record.p_phi2.push(p2);
        record.p_phi3.push(p3);
    }
    Ok(record)
}

/// `F = ⟨0_c, e| tr_phonon(ρ) |0_c, e⟩`: photon gone, qubit excited,
/// phonon state discarded.
pub fn transfer_fidelity(state: &QuantumState) -> Result<f64> {
    if !state.signature().is_hybrid() {
        return Err(Error::NotHybrid);
    }
    let reduced = partial_trace(state, &[CAVITY, QUBIT])?;
    let target = reduced.signature().index_of(&[0, 1])?;
    let value = reduced.density().expect("partial trace is mixed")[(target, target)];
    if value.im.abs() > IMAG_TOL {
        return Err(Error::NotHermitian(value.im.abs()));
    }
    Ok(value.re)
}

/// [`transfer_fidelity`] at every stored step of a density-matrix trajectory.
pub fn fidelity(traj: &Trajectory) -> Result<Vec<f64>> {
    traj.states().iter().map(transfer_fidelity).collect()
}

/// `⟨n⟩` of a bosonic slot.
pub fn mean_occupation(state: &QuantumState, slot: usize) -> Result<f64> {
    let dims = state.signature().dims();
    let dim = *dims.get(slot).ok_or(Error::InvalidSlot {
        slot,
        slots: dims.len(),
    })?;
    let n = embed(&number(dim)?, slot, state.signature())?;
    Ok(state.expectation(n.matrix())?.re)
}

/// Population of the highest retained Fock level of `slot`; a truncation
/// adequacy diagnostic.
pub fn top_level_population(state: &QuantumState, slot: usize) -> Result<f64> {
    let sig = state.signature();
    let dims = sig.dims();
    let top = *dims.get(slot).ok_or(Error::InvalidSlot {
        slot,
        slots: dims.len(),
    })? - 1;
    Ok((0..sig.total_dim())
        .filter(|&i| sig.levels_of(i)[slot] == top)
        .map(|i| state.population(i))
        .sum())
}

/// Phonon top-level population maximized over a trajectory.
pub fn max_phonon_top_population(traj: &Trajectory) -> Result<f64> {
    if !traj.signature().is_hybrid() {
        return Err(Error::NotHybrid);
    }
    traj.states()
        .iter()
        .map(|s| top_level_population(s, PHONON))
        .try_fold(0.0_f64, |acc, p| p.map(|p| acc.max(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpaceSignature;
    use crate::model::dark_state;
    use crate::pulse::PulseSchedule;
    use crate::{CMatrix, C64};
    use approx::assert_abs_diff_eq;

    fn hybrid() -> SpaceSignature {
        SpaceSignature::hybrid(2, 3).unwrap()
    }

    #[test]
    fn populations_of_basis_ket() {
        let basis = ThreeLevelBasis::embedded(&hybrid()).unwrap();
        assert_eq!(
            state_populations(&basis.ket(0), &basis).unwrap(),
            [1.0, 0.0, 0.0]
        );
        let reduced = ThreeLevelBasis::reduced();
        assert_eq!(
            state_populations(&reduced.ket(2), &reduced).unwrap(),
            [0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn populations_of_dark_state_at_midpoint() {
        let p = PulseSchedule::new(0.75, 20.0).unwrap();
        let basis = ThreeLevelBasis::reduced();
        let psi =
            QuantumState::pure(basis.signature().clone(), dark_state(&p, p.midpoint())).unwrap();
        let pops = state_populations(&psi, &basis).unwrap();
        assert_abs_diff_eq!(pops[0], 200.0 / 200.5, epsilon = 1e-14);
        assert_eq!(pops[1], 0.0);
        assert_abs_diff_eq!(pops[2], 0.5 / 200.5, epsilon = 1e-14);
        assert_abs_diff_eq!(pops[0], 0.99751, epsilon = 1e-5);
        assert_abs_diff_eq!(pops[2], 0.00249, epsilon = 1e-5);
    }

    #[test]
    fn populations_of_maximally_mixed() {
        let basis = ThreeLevelBasis::reduced();
        let rho = QuantumState::maximally_mixed(basis.signature());
        for p in state_populations(&rho, &basis).unwrap() {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn populations_reject_mismatched_space() {
        let basis = ThreeLevelBasis::embedded(&hybrid()).unwrap();
        let psi = ThreeLevelBasis::reduced().ket(0);
        assert!(state_populations(&psi, &basis).is_err());
    }

    #[test]
    fn fidelity_of_reference_states() {
        let sig = hybrid();
        let f = |levels: &[usize]| {
            transfer_fidelity(&QuantumState::basis(&sig, levels).unwrap().to_mixed()).unwrap()
        };
        assert_eq!(f(&[1, 0, 0]), 0.0);
        assert_eq!(f(&[0, 0, 1]), 1.0);
        // Phonon excitation is traced out.
        assert_eq!(f(&[0, 1, 1]), 1.0);
        assert_eq!(f(&[1, 1, 1]), 0.0);
    }

    #[test]
    fn fidelity_rejects_pure_states() {
        let psi = QuantumState::basis(&hybrid(), &[0, 0, 1]).unwrap();
        assert_eq!(transfer_fidelity(&psi).unwrap_err(), Error::ExpectedMixed);
    }

    #[test]
    fn occupations() {
        let sig = SpaceSignature::hybrid(3, 4).unwrap();
        let s = QuantumState::basis(&sig, &[2, 3, 1]).unwrap();
        assert_abs_diff_eq!(mean_occupation(&s, CAVITY).unwrap(), 2.0);
        assert_abs_diff_eq!(mean_occupation(&s, PHONON).unwrap(), 3.0);
        assert_abs_diff_eq!(top_level_population(&s, PHONON).unwrap(), 1.0);
        assert_abs_diff_eq!(top_level_population(&s, QUBIT).unwrap(), 1.0);
        let mixed = QuantumState::maximally_mixed(&sig);
        assert_abs_diff_eq!(
            top_level_population(&mixed, PHONON).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert!(mean_occupation(&s, 7).is_err());
    }

    #[test]
    fn fidelity_ignores_coherences_with_other_cavity_levels() {
        // (|0,0,e⟩ + |1,0,g⟩)/√2: F = 1/2.
        let sig = hybrid();
        let mut rho = CMatrix::zeros(12, 12);
        let a = sig.index_of(&[0, 0, 1]).unwrap();
        let b = sig.index_of(&[1, 0, 0]).unwrap();
        for &i in &[a, b] {
            for &j in &[a, b] {
                rho[(i, j)] = C64::new(0.5, 0.0);
            }
        }
        let state = QuantumState::mixed(sig, rho).unwrap();
        assert_abs_diff_eq!(transfer_fidelity(&state).unwrap(), 0.5, epsilon = 1e-15);
    }
}
