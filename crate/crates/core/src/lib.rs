//! Simulation core for phonon-mediated photon→qubit state transfer in a
//! hybrid optomechanical system.
//!
//! A cavity mode `a`, a mechanical mode `b` and a two-level qubit are coupled
//! by time-dependent beam-splitter (`a†b + ab†`) and Jaynes-Cummings
//! (`bσ₊ + b†σ₋`) terms whose envelopes follow a logistic mixing angle. The
//! crate provides:
//!
//! * [`hilbert`]: dense operators and states on truncated Fock ⊗ Fock ⊗ qubit
//!   spaces, embedding and partial trace.
//! * [`pulse`]: the coupling schedule and its closed-form derivatives.
//! * [`model`]: Hamiltonian assembly in the single-excitation basis and on the
//!   full tensor-product space, plus closed-form and numerical counter-diabatic
//!   terms.
//! * [`dynamics`]: fixed-step RK4 engines for the Schrödinger and Lindblad
//!   equations.
//! * [`observables`]: populations, transfer fidelity and occupations.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Units: time in ns, energies and rates in rad/ns, ħ = 1.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod pulse;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
