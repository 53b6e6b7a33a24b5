//! Dense operator algebra on truncated tensor-product spaces.
//!
//! Slots are ordered (cavity, phonon, qubit) for the hybrid system, see
//! [`CAVITY`], [`PHONON`] and [`QUBIT`]. Basis indices follow the Kronecker
//! convention: the first slot is the most significant digit, so
//! `|n_c, n_m, q⟩ ↦ (n_c·N_m + n_m)·2 + q`. Every index computation goes
//! through [`SpaceSignature`].
//!
//! Qubit convention: level 0 is `|g⟩`, level 1 is `|e⟩`, so
//! `σ_z = diag(−1, +1)` and `σ₊ = |e⟩⟨g|`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Slot index of the cavity mode in a hybrid signature.
pub const CAVITY: usize = 0;
/// Slot index of the mechanical mode in a hybrid signature.
pub const PHONON: usize = 1;
/// Slot index of the qubit in a hybrid signature.
pub const QUBIT: usize = 2;

const STATE_NORM_TOL: f64 = 1e-9;
const STATE_HERMITIAN_TOL: f64 = 1e-12;

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceSignature {
    dims: Vec<usize>,
}

impl SpaceSignature {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(bad));
        }
        Ok(Self { dims })
    }

    /// Cavity ⊗ phonon ⊗ qubit with the given Fock truncations.
    pub fn hybrid(n_cavity: usize, n_phonon: usize) -> Result<Self> {
        Self::new(vec![n_cavity, n_phonon, 2])
    }

    /// Three slots with a two-level last slot.
    pub fn is_hybrid(&self) -> bool {
        self.dims.len() == 3 && self.dims[QUBIT] == 2
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn slots(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat basis index of a product state given one level per slot.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: levels.len(),
            });
        }
        let mut index = 0;
        for (&level, &dim) in levels.iter().zip(&self.dims) {
            if level >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: level + 1,
                });
            }
            index = index * dim + level;
        }
        Ok(index)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.dims.len()];
        for (level, &dim) in levels.iter_mut().zip(&self.dims).rev() {
            *level = index % dim;
            index /= dim;
        }
        levels
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.dims.len() {
            return Err(Error::InvalidSlot {
                slot,
                slots: self.dims.len(),
            });
        }
        Ok(())
    }
}

/// Dense square operator tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    signature: SpaceSignature,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(signature: SpaceSignature, matrix: CMatrix) -> Result<Self> {
        let n = signature.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { signature, matrix })
    }

    /// Single-slot operator from a square matrix.
    pub fn single(matrix: CMatrix) -> Result<Self> {
        let signature = SpaceSignature::new(vec![matrix.nrows()])?;
        Self::new(signature, matrix)
    }

    pub fn identity(signature: &SpaceSignature) -> Self {
        let n = signature.total_dim();
        Self {
            signature: signature.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            signature: self.signature.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    /// Kronecker product; the result's slots are `self`'s followed by `other`'s.
    pub fn tensor(&self, other: &Operator) -> Self {
        let mut dims = self.signature.dims.clone();
        dims.extend_from_slice(&other.signature.dims);
        Self {
            signature: SpaceSignature { dims },
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Largest entrywise deviation `|M_ij − conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    fn same_space(&self, other: &Operator) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Truncated Fock-ladder lowering operator, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new(libm::sqrt(n as f64), 0.0);
    }
    Operator::single(m)
}

pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.adjoint())
}

/// `a†a = diag(0, 1, …, dim−1)`.
pub fn number(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let diag = CVector::from_iterator(dim, (0..dim).map(|n| C64::new(n as f64, 0.0)));
    Operator::single(CMatrix::from_diagonal(&diag))
}

/// `σ₋ = |g⟩⟨e|`.
pub fn sigma_minus() -> Operator {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    Operator::single(m).expect("2x2")
}

/// `σ₊ = |e⟩⟨g|`.
pub fn sigma_plus() -> Operator {
    sigma_minus().adjoint()
}

/// `σ_z = |e⟩⟨e| − |g⟩⟨g| = diag(−1, +1)`.
pub fn sigma_z() -> Operator {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new(-1.0, 0.0);
    m[(1, 1)] = C64::new(1.0, 0.0);
    Operator::single(m).expect("2x2")
}

/// Lift a single-slot operator into `slot` of `signature`, with identities
/// on every other slot.
pub fn embed(op: &Operator, slot: usize, signature: &SpaceSignature) -> Result<Operator> {
    signature.check_slot(slot)?;
    let expected = signature.dims[slot];
    if op.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: op.dim(),
        });
    }
    let mut matrix = CMatrix::identity(1, 1);
    for (s, &dim) in signature.dims.iter().enumerate() {
        let factor = if s == slot {
            op.matrix.clone()
        } else {
            CMatrix::identity(dim, dim)
        };
        matrix = matrix.kronecker(&factor);
    }
    Operator::new(signature.clone(), matrix)
}

/// Pure (state vector) or mixed (density matrix) representation.
#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(CVector),
    Mixed(CMatrix),
}

/// A quantum state on a [`SpaceSignature`]. Normalization and Hermiticity
/// are checked by the public constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    signature: SpaceSignature,
    data: StateData,
}

impl QuantumState {
    /// Pure state; `‖ψ‖² = 1` within 1e−9.
    pub fn pure(signature: SpaceSignature, vector: CVector) -> Result<Self> {
        let n = signature.total_dim();
        if vector.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: vector.len(),
            });
        }
        let norm_sq = vector.norm_squared();
        if (norm_sq - 1.0).abs() > STATE_NORM_TOL || !norm_sq.is_finite() {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self {
            signature,
            data: StateData::Pure(vector),
        })
    }

    /// Density matrix; unit trace within 1e−9, Hermitian within 1e−12.
    pub fn mixed(signature: SpaceSignature, density: CMatrix) -> Result<Self> {
        let n = signature.total_dim();
        if density.nrows() != n || density.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: density.nrows(),
            });
        }
        let defect = hermiticity_defect(&density);
        if defect > STATE_HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = density.trace().re;
        if (trace - 1.0).abs() > STATE_NORM_TOL || !trace.is_finite() {
            return Err(Error::TraceNotUnity(trace));
        }
        Ok(Self {
            signature,
            data: StateData::Mixed(density),
        })
    }

    /// Product basis ket `|levels⟩`.
    pub fn basis(signature: &SpaceSignature, levels: &[usize]) -> Result<Self> {
        let index = signature.index_of(levels)?;
        let mut v = CVector::zeros(signature.total_dim());
        v[index] = C64::new(1.0, 0.0);
        Ok(Self {
            signature: signature.clone(),
            data: StateData::Pure(v),
        })
    }

    /// `I / d`.
    pub fn maximally_mixed(signature: &SpaceSignature) -> Self {
        let n = signature.total_dim();
        Self {
            signature: signature.clone(),
            data: StateData::Mixed(CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0)),
        }
    }

    pub(crate) fn from_parts(signature: SpaceSignature, data: StateData) -> Self {
        Self { signature, data }
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> Option<&CMatrix> {
        match &self.data {
            StateData::Pure(_) => None,
            StateData::Mixed(rho) => Some(rho),
        }
    }

    /// `ρ` for mixed states, `|ψ⟩⟨ψ|` for pure ones.
    pub fn density_matrix(&self) -> CMatrix {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Mixed(rho) => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            data: StateData::Mixed(self.density_matrix()),
        }
    }

    /// `‖ψ‖²` or `tr ρ`.
    pub fn norm_or_trace(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.norm_squared(),
            StateData::Mixed(rho) => rho.trace().re,
        }
    }

    /// Diagonal element `⟨i|ρ|i⟩` (or `|ψ_i|²`).
    pub fn population(&self, index: usize) -> f64 {
        match &self.data {
            StateData::Pure(v) => v[index].norm_sqr(),
            StateData::Mixed(rho) => rho[(index, index)].re,
        }
    }

    /// `⟨O⟩ = ⟨ψ|O|ψ⟩` or `tr(ρ O)`.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        let n = self.signature.total_dim();
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: op.nrows(),
            });
        }
        Ok(match &self.data {
            StateData::Pure(v) => v.dotc(&(op * v)),
            StateData::Mixed(rho) => (rho * op).trace(),
        })
    }
}

/// Reduced density matrix over the slots in `keep`, returned in original slot
/// order. Pure states must be converted with [`QuantumState::to_mixed`] first.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    let rho = state.density().ok_or(Error::ExpectedMixed)?;
    let sig = state.signature();
    if keep.is_empty() {
        return Err(Error::InvalidSlot { slot: 0, slots: 0 });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &slot in &kept {
        sig.check_slot(slot)?;
    }

    let kept_dims: Vec<usize> = kept.iter().map(|&s| sig.dims[s]).collect();
    let traced: Vec<usize> = (0..sig.slots()).filter(|s| !kept.contains(s)).collect();
    let reduced_sig = SpaceSignature::new(kept_dims)?;

    // Split every full index into (kept index, traced-out index).
    let n = sig.total_dim();
    let mut split = Vec::with_capacity(n);
    for i in 0..n {
        let levels = sig.levels_of(i);
        let mut k = 0;
        for &s in &kept {
            k = k * sig.dims[s] + levels[s];
        }
        let mut r = 0;
        for &s in &traced {
            r = r * sig.dims[s] + levels[s];
        }
        split.push((k, r));
    }

    let m = reduced_sig.total_dim();
    let mut reduced = CMatrix::zeros(m, m);
    for i in 0..n {
        let (ki, ri) = split[i];
        for j in 0..n {
            let (kj, rj) = split[j];
            if ri == rj {
                reduced[(ki, kj)] += rho[(i, j)];
            }
        }
    }
    Ok(QuantumState::from_parts(
        reduced_sig,
        StateData::Mixed(reduced),
    ))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
