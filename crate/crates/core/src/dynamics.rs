//! Fixed-step RK4 engines for pure-state (Schrödinger) and density-matrix
//! (Lindblad) evolution under a time-dependent Hamiltonian.
//!
//! The grid is uniform: `n = ⌈(t1 − t0)/dt⌉` steps of size `(t1 − t0)/n`, so
//! `dt` is an upper bound on the step actually taken. No renormalization is
//! applied; norm and trace drift are reported as diagnostics and abort the
//! run past fixed limits.
//!
//! Master equation:
//!
//! ```text
//! ρ̇ = −i[H, ρ] + Σ_k r_k (A_k ρ A_k† − ½{A_k†A_k, ρ})
//! ```
//!
//! evaluated as `−i H_eff ρ + h.c. + Σ_k r_k A_k ρ A_k†` with
//! `H_eff = H − (i/2) Σ_k r_k A_k†A_k`.

use alloc::vec::Vec;

use crate::hilbert::{
    annihilation, embed, hermiticity_defect, min_eigenvalue, sigma_minus, QuantumState,
    SpaceSignature, StateData, CAVITY, PHONON, QUBIT,
};
use crate::{CMatrix, CVector, Error, Result, C64};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STRIDE: usize = 10;
/// Upper bound on `dt·‖H‖` (plus dissipator norms for Lindblad runs).
pub const STABILITY_LIMIT: f64 = 0.1;
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Largest per-step correction tolerated by Hermitian symmetrization.
pub const SYMMETRIZATION_LIMIT: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a stored density matrix.
pub const POSITIVITY_LIMIT: f64 = -1e-6;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

const MINUS_I: C64 = C64::new(0.0, -1.0);

/// Decay rates of the three baths (rad/ns) and thermal phonon occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DissipationParams {
    /// Cavity decay, channel `a`.
    pub kappa: f64,
    /// Qubit decay, channel `σ₋`.
    pub gamma_q: f64,
    /// Mechanical damping; channels `b` at `γ_m(n_th + 1)` and `b†` at `γ_m n_th`.
    pub gamma_m: f64,
    pub n_th: f64,
}

impl DissipationParams {
    pub fn lossless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("gamma_q", self.gamma_q),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                });
            }
        }
        Ok(())
    }

    /// Collapse channels on a hybrid signature, in the order
    /// `a, σ₋, b, b†`. Zero-rate channels are kept.
    pub fn channels(&self, signature: &SpaceSignature) -> Result<Vec<Channel>> {
        self.validate()?;
        if !signature.is_hybrid() {
            return Err(Error::NotHybrid);
        }
        let dims = signature.dims();
        let a = embed(&annihilation(dims[CAVITY])?, CAVITY, signature)?.into_matrix();
        let b = embed(&annihilation(dims[PHONON])?, PHONON, signature)?.into_matrix();
        let sm = embed(&sigma_minus(), QUBIT, signature)?.into_matrix();
        let b_dag = b.adjoint();
        Ok(alloc::vec![
            Channel::new("cavity", self.kappa, a)?,
            Channel::new("qubit", self.gamma_q, sm)?,
            Channel::new("phonon_loss", self.gamma_m * (self.n_th + 1.0), b)?,
            Channel::new("phonon_gain", self.gamma_m * self.n_th, b_dag)?,
        ])
    }
}

/// A Lindblad channel `r·L[A]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub label: &'static str,
    pub rate: f64,
    pub operator: CMatrix,
}

impl Channel {
    pub fn new(label: &'static str, rate: f64, operator: CMatrix) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                reason: "must be finite and >= 0",
            });
        }
        if operator.nrows() != operator.ncols() {
            return Err(Error::DimensionMismatch {
                expected: operator.nrows(),
                found: operator.ncols(),
            });
        }
        Ok(Self {
            label,
            rate,
            operator,
        })
    }
}

/// Time span, maximum step and output stride.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    /// Store every `stride`-th step; the initial and final states are always stored.
    pub stride: usize,
}

impl IntegrationOptions {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Self {
        Self {
            t0,
            t1,
            dt,
            stride: DEFAULT_STRIDE,
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }

    /// Number of steps and the uniform step size.
    pub fn grid(&self) -> Result<(usize, f64)> {
        let span = self.t1 - self.t0;
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::InvalidSpan(self.t0, self.t1));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "must be finite and > 0",
            });
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter {
                name: "stride",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        let ratio = span / self.dt;
        let nearest = libm::round(ratio);
        let steps = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest
        } else {
            libm::ceil(ratio)
        };
        let steps = (steps as usize).max(1);
        Ok((steps, span / steps as f64))
    }

    fn time(&self, k: usize, steps: usize, h: f64) -> f64 {
        if k == steps {
            self.t1
        } else {
            self.t0 + k as f64 * h
        }
    }

    fn stores(&self, k: usize, steps: usize) -> bool {
        k.is_multiple_of(self.stride) || k == steps
    }
}

/// Per-stored-step health of the integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// `‖ψ‖²` or `tr ρ`.
    pub norm_or_trace: f64,
    /// Smallest eigenvalue of `ρ` (mixed runs only).
    pub min_eigenvalue: Option<f64>,
    /// Largest Hermitian symmetrization correction since the previous stored
    /// step (mixed runs only, zero for pure runs).
    pub symmetrization: f64,
}

/// Sampled solution of an evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<QuantumState>,
    diagnostics: Vec<StepDiagnostics>,
    step: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    /// Step size actually used.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &QuantumState {
        self.states
            .last()
            .expect("trajectory stores the initial state")
    }

    pub fn signature(&self) -> &SpaceSignature {
        self.final_state().signature()
    }

    pub fn is_pure(&self) -> bool {
        self.final_state().is_pure()
    }

    /// `max |‖ψ‖² − 1|` or `max |tr ρ − 1|` over stored steps.
    pub fn max_norm_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| (d.norm_or_trace - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_symmetrization(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.symmetrization)
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.diagnostics
            .iter()
            .filter_map(|d| d.min_eigenvalue)
            .reduce(f64::min)
    }
}

/// Max absolute row sum; bounds the spectral norm of a Hermitian matrix.
fn row_sum_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_stability<F>(h_of_t: &F, opts: &IntegrationOptions, h: f64, extra: f64) -> Result<()>
where
    F: Fn(f64) -> CMatrix,
{
    let mid = 0.5 * (opts.t0 + opts.t1);
    let scale = row_sum_norm(&h_of_t(opts.t0)).max(row_sum_norm(&h_of_t(mid))) + extra;
    let product = h * scale;
    if product.is_nan() || product >= STABILITY_LIMIT {
        return Err(Error::StepTooLarge(product));
    }
    Ok(())
}

fn check_dim(h: &CMatrix, n: usize) -> Result<()> {
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.nrows(),
        });
    }
    Ok(())
}

/// Integrate `iψ̇ = H(t)ψ` with classical RK4.
///
/// Fails if `dt·‖H‖ ≥ 0.1` at `t0` or the midpoint, if `|‖ψ‖² − 1|` exceeds
/// [`NORM_DRIFT_LIMIT`], or if the state becomes non-finite.
pub fn evolve_schrodinger<F>(
    h_of_t: F,
    psi0: &QuantumState,
    opts: &IntegrationOptions,
) -> Result<Trajectory>
where
    F: Fn(f64) -> CMatrix,
{
    let mut psi: CVector = match psi0.data() {
        StateData::Pure(v) => v.clone(),
        StateData::Mixed(_) => {
            return Err(Error::InvalidParameter {
                name: "psi0",
                value: f64::NAN,
                reason: "Schrödinger evolution needs a pure state",
            })
        }
    };
    let signature = psi0.signature().clone();
    let (steps, h) = opts.grid()?;
    check_dim(&h_of_t(opts.t0), psi.len())?;
    check_stability(&h_of_t, opts, h, 0.0)?;

    let capacity = steps / opts.stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut diagnostics = Vec::with_capacity(capacity);
    let mut record = |t: f64, psi: &CVector| {
        times.push(t);
        diagnostics.push(StepDiagnostics {
            norm_or_trace: psi.norm_squared(),
            min_eigenvalue: None,
            symmetrization: 0.0,
        });
        states.push(QuantumState::from_parts(
            signature.clone(),
            StateData::Pure(psi.clone()),
        ));
    };
    record(opts.t0, &psi);

    let half = re(0.5 * h);
    let sixth = re(h / 6.0);
    for k in 0..steps {
        let t = opts.time(k, steps, h);
        let h_start = h_of_t(t);
        let h_mid = h_of_t(t + 0.5 * h);
        let h_end = h_of_t(opts.time(k + 1, steps, h));

        let k1 = (&h_start * &psi) * MINUS_I;
        let k2 = (&h_mid * (&psi + &k1 * half)) * MINUS_I;
        let k3 = (&h_mid * (&psi + &k2 * half)) * MINUS_I;
        let k4 = (&h_end * (&psi + &k3 * re(h))) * MINUS_I;
        psi += (k1 + (k2 + k3) * re(2.0) + k4) * sixth;

        let t_next = opts.time(k + 1, steps, h);
        let norm_sq = psi.norm_squared();
        if !norm_sq.is_finite() {
            return Err(Error::Divergence(t_next));
        }
        let drift = (norm_sq - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { t: t_next, drift });
        }
        if opts.stores(k + 1, steps) {
            record(t_next, &psi);
        }
    }
    Ok(Trajectory {
        times,
        states,
        diagnostics,
        step: h,
    })
}

/// Channel with its nonzero operator entries.
struct SparseJump {
    rate: f64,
    entries: Vec<(usize, usize, C64)>,
}

struct Lindbladian {
    jumps: Vec<SparseJump>,
    /// `(1/2) Σ r A†A`.
    damping: CMatrix,
}

impl Lindbladian {
    fn new(channels: &[Channel], n: usize) -> Result<Self> {
        let mut damping = CMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for channel in channels {
            check_dim(&channel.operator, n)?;
            if channel.rate == 0.0 {
                continue;
            }
            let a = &channel.operator;
            damping += (a.adjoint() * a) * re(0.5 * channel.rate);
            let mut entries = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if a[(i, j)] != C64::new(0.0, 0.0) {
                        entries.push((i, j, a[(i, j)]));
                    }
                }
            }
            jumps.push(SparseJump {
                rate: channel.rate,
                entries,
            });
        }
        Ok(Self { jumps, damping })
    }

    fn norm_bound(&self) -> f64 {
        2.0 * row_sum_norm(&self.damping)
    }

    /// `ρ̇` for Hermitian `ρ`.
    fn rhs(&self, h: &CMatrix, rho: &CMatrix) -> CMatrix {
        let h_eff = h - &self.damping * C64::new(0.0, 1.0);
        let y = (h_eff * rho) * MINUS_I;
        let mut out = &y + y.adjoint();
        for jump in &self.jumps {
            let rate = re(jump.rate);
            for &(i, k, a) in &jump.entries {
                let left = a * rate;
                for &(j, l, b) in &jump.entries {
                    out[(i, j)] += left * rho[(k, l)] * b.conj();
                }
            }
        }
        out
    }
}

/// Replace `ρ` by `(ρ + ρ†)/2`, returning the largest entry change.
fn symmetrize(rho: &mut CMatrix) -> f64 {
    let n = rho.nrows();
    let mut correction = 0.0_f64;
    for i in 0..n {
        let d = rho[(i, i)];
        correction = correction.max(d.im.abs());
        rho[(i, i)] = re(d.re);
        for j in (i + 1)..n {
            let avg = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
            correction = correction.max((rho[(i, j)] - avg).norm());
            rho[(i, j)] = avg;
            rho[(j, i)] = avg.conj();
        }
    }
    correction
}

/// Integrate the Lindblad master equation with classical RK4.
///
/// After every step `ρ` is symmetrized; a correction above
/// [`SYMMETRIZATION_LIMIT`] aborts the run. Trace drift above
/// [`TRACE_DRIFT_LIMIT`] and stored states with an eigenvalue below
/// [`POSITIVITY_LIMIT`] abort as well.
pub fn evolve_lindblad<F>(
    h_of_t: F,
    rho0: &QuantumState,
    channels: &[Channel],
    opts: &IntegrationOptions,
) -> Result<Trajectory>
where
    F: Fn(f64) -> CMatrix,
{
    let mut rho = rho0.density().ok_or(Error::ExpectedMixed)?.clone();
    let signature = rho0.signature().clone();
    let n = rho.nrows();
    let defect = hermiticity_defect(&rho);
    if defect > 1e-12 {
        return Err(Error::NotHermitian(defect));
    }
    let (steps, h) = opts.grid()?;
    check_dim(&h_of_t(opts.t0), n)?;
    let lindbladian = Lindbladian::new(channels, n)?;
    check_stability(&h_of_t, opts, h, lindbladian.norm_bound())?;

    let capacity = steps / opts.stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut diagnostics = Vec::with_capacity(capacity);
    let mut record = |t: f64, rho: &CMatrix, symmetrization: f64| -> Result<()> {
        let min = min_eigenvalue(rho);
        if min < POSITIVITY_LIMIT {
            return Err(Error::Positivity { t, min });
        }
        times.push(t);
        diagnostics.push(StepDiagnostics {
            norm_or_trace: rho.trace().re,
            min_eigenvalue: Some(min),
            symmetrization,
        });
        states.push(QuantumState::from_parts(
            signature.clone(),
            StateData::Mixed(rho.clone()),
        ));
        Ok(())
    };
    record(opts.t0, &rho, 0.0)?;

    let half = re(0.5 * h);
    let sixth = re(h / 6.0);
    let mut worst_correction = 0.0_f64;
    for k in 0..steps {
        let t = opts.time(k, steps, h);
        let t_next = opts.time(k + 1, steps, h);
        let h_start = h_of_t(t);
        let h_mid = h_of_t(t + 0.5 * h);
        let h_end = h_of_t(t_next);

        let k1 = lindbladian.rhs(&h_start, &rho);
        let k2 = lindbladian.rhs(&h_mid, &(&rho + &k1 * half));
        let k3 = lindbladian.rhs(&h_mid, &(&rho + &k2 * half));
        let k4 = lindbladian.rhs(&h_end, &(&rho + &k3 * re(h)));
        rho += (k1 + (k2 + k3) * re(2.0) + k4) * sixth;

        let correction = symmetrize(&mut rho);
        if correction > SYMMETRIZATION_LIMIT {
            return Err(Error::SymmetrizationDrift {
                t: t_next,
                correction,
            });
        }
        worst_correction = worst_correction.max(correction);

        let trace = rho.trace().re;
        if !trace.is_finite() {
            return Err(Error::Divergence(t_next));
        }
        let drift = (trace - 1.0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { t: t_next, drift });
        }
        if opts.stores(k + 1, steps) {
            record(t_next, &rho, worst_correction)?;
            worst_correction = 0.0;
        }
    }
    Ok(Trajectory {
        times,
        states,
        diagnostics,
        step: h,
    })
}
