//! Complex Hilbert representation: diagonal spectral families, state
//! vectors, Born-rule probabilities, and superposition interference.
//!
//! A measurement with `n` outcomes acts on `C^m` with `n ≤ m ≤ n²`. Outcome
//! `k` owns a contiguous block of `b_k` diagonal slots; its projector `M_k`
//! has ones on exactly those slots. A state puts modulus `√(μ_k / b_k)` on
//! every slot of block `k`, so `‖M_k w‖² = μ_k` for any phases.
//!
//! Amplitudes cross the API as (modulus, phase) pairs with the phase wrapped
//! into `(−π, π]`; arithmetic happens on [`Complex64`].

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::ProbabilityVector;

/// Max deviation accepted between Born probabilities and `μ`.
pub const BORN_TOLERANCE: f64 = 1e-12;
/// `|‖w‖² − 1|` below which a vector counts as normalized.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Squared norm at or below which a superposition has cancelled out.
pub const DEGENERATE_NORM_SQ: f64 = 1e-24;
/// Tolerance on `a² + b² = 1` for superposition coefficients.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-9;
/// Per-outcome gap under which a superposition sits on the mixture segment.
pub const SEGMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("expected {n} block sizes, found {found}")]
    BlockCount { n: usize, found: usize },
    #[error("m={m} exceeds n²={n_sq}")]
    DimensionTooLarge { m: usize, n_sq: usize },
    #[error("block {k} has size {size}, must be in [1, {n}]")]
    BlockSize { k: usize, size: usize, n: usize },
    #[error("measurement needs at least one outcome")]
    NoOutcomes,
    #[error("{what}: expected length {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("outcome index {index} out of range for {n} outcomes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("superposition coefficients must be finite and non-negative")]
    NegativeCoefficient,
    #[error("a² + b² = {0}, expected 1")]
    CoefficientNorm(f64),
    #[error("superposition cancels to the zero vector")]
    Degenerate,
    #[error("closed-form interference needs one slot per outcome (m = n)")]
    NonSingletonFamily,
}

/// Diagonal spectral family `{M_k}` on `C^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralFamily {
    block_sizes: Vec<usize>,
    offsets: Vec<usize>,
    m: usize,
}

impl SpectralFamily {
    pub fn new(n: usize, block_sizes: Vec<usize>) -> Result<Self, HilbertError> {
        if n == 0 {
            return Err(HilbertError::NoOutcomes);
        }
        if block_sizes.len() != n {
            return Err(HilbertError::BlockCount {
                n,
                found: block_sizes.len(),
            });
        }
        let m: usize = block_sizes.iter().sum();
        if m > n * n {
            return Err(HilbertError::DimensionTooLarge { m, n_sq: n * n });
        }
        if let Some((k, &size)) = block_sizes
            .iter()
            .enumerate()
            .find(|(_, &b)| b == 0 || b > n)
        {
            return Err(HilbertError::BlockSize { k, size, n });
        }
        let offsets = block_sizes
            .iter()
            .scan(0, |acc, &b| {
                let start = *acc;
                *acc += b;
                Some(start)
            })
            .collect();
        Ok(Self {
            block_sizes,
            offsets,
            m,
        })
    }

    /// One slot per outcome: `m = n`.
    pub fn singleton(n: usize) -> Self {
        Self::new(n, vec![1; n]).expect("singleton family is always valid")
    }

    pub fn outcome_count(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn is_singleton(&self) -> bool {
        self.m == self.block_sizes.len()
    }

    pub fn block(&self, k: usize) -> Range<usize> {
        self.offsets[k]..self.offsets[k] + self.block_sizes[k]
    }

    pub fn block_of(&self, slot: usize) -> Option<usize> {
        (0..self.outcome_count()).find(|&k| self.block(k).contains(&slot))
    }

    /// Diagonal of `M_k`.
    pub fn projector_diagonal(&self, k: usize) -> Vec<f64> {
        let block = self.block(k);
        (0..self.m)
            .map(|s| if block.contains(&s) { 1.0 } else { 0.0 })
            .collect()
    }

    /// `M_k` as a dense `m × m` matrix.
    pub fn projector_matrix(&self, k: usize) -> Vec<Vec<f64>> {
        let diag = self.projector_diagonal(k);
        (0..self.m)
            .map(|i| {
                (0..self.m)
                    .map(|j| if i == j { diag[i] } else { 0.0 })
                    .collect()
            })
            .collect()
    }
}

/// Wraps a phase into `(−π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let p = phase.rem_euclid(TAU);
    if p > PI {
        p - TAU
    } else {
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub modulus: f64,
    pub phase: f64,
}

impl Amplitude {
    pub fn new(modulus: f64, phase: f64) -> Self {
        Self {
            modulus,
            phase: wrap_phase(phase),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }

    pub fn from_complex(z: Complex64) -> Self {
        let (modulus, phase) = z.to_polar();
        Self::new(modulus, phase)
    }
}

/// A vector of `C^m` held as (modulus, phase) amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Amplitude>,
}

impl QuantumState {
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Self {
        Self { amplitudes }
    }

    pub fn from_complex(components: &[Complex64]) -> Self {
        Self {
            amplitudes: components
                .iter()
                .copied()
                .map(Amplitude::from_complex)
                .collect(),
        }
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.amplitudes.iter().map(|a| a.to_complex()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.modulus * a.modulus).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORM_TOLERANCE
    }
}

/// `w(e, p)`: modulus `√(μ_k / b_k)` on every slot of block `k`, with the
/// given per-slot phases.
pub fn build_quantum_state(
    mu: &ProbabilityVector,
    phases: &[f64],
    family: &SpectralFamily,
) -> Result<QuantumState, HilbertError> {
    check_len("mu", family.outcome_count(), mu.len())?;
    check_len("phases", family.dimension(), phases.len())?;
    let mut amplitudes = Vec::with_capacity(family.dimension());
    for k in 0..family.outcome_count() {
        let modulus = (mu[k] / family.block_sizes[k] as f64).sqrt();
        for slot in family.block(k) {
            amplitudes.push(Amplitude::new(modulus, phases[slot]));
        }
    }
    Ok(QuantumState { amplitudes })
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), HilbertError> {
    if expected != found {
        return Err(HilbertError::Dimension {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// `⟨w|M_k|w⟩ = ‖M_k w‖²`.
pub fn born_probability(
    w: &QuantumState,
    family: &SpectralFamily,
    k: usize,
) -> Result<f64, HilbertError> {
    check_len("state", family.dimension(), w.dim())?;
    let n = family.outcome_count();
    if k >= n {
        return Err(HilbertError::IndexOutOfRange { index: k, n });
    }
    Ok(w.amplitudes[family.block(k)]
        .iter()
        .map(|a| a.modulus * a.modulus)
        .sum())
}

fn born_distribution(w: &QuantumState, family: &SpectralFamily) -> Result<Vec<f64>, HilbertError> {
    (0..family.outcome_count())
        .map(|k| born_probability(w, family, k))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub state: QuantumState,
    pub target: Vec<f64>,
    pub born: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Builds `w(e, p)` and checks every Born probability against `μ`.
pub fn verify_representation(
    mu: &ProbabilityVector,
    phases: &[f64],
    family: &SpectralFamily,
) -> Result<VerificationReport, HilbertError> {
    let state = build_quantum_state(mu, phases, family)?;
    let born = born_distribution(&state, family)?;
    let max_deviation = born
        .iter()
        .zip(mu.iter())
        .map(|(b, m)| (b - m).abs())
        .fold(0.0, f64::max);
    Ok(VerificationReport {
        state,
        target: mu.as_slice().to_vec(),
        born,
        max_deviation,
        passed: max_deviation <= BORN_TOLERANCE,
    })
}

/// Weights `a, b` and phases `α, β` of `a e^{iα} w_p + b e^{iβ} w_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionCoefficients {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SuperpositionCoefficients {
    /// Checks `a, b ≥ 0` and `a² + b² = 1`.
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self, HilbertError> {
        let c = Self::unnormalized(a, b, alpha, beta)?;
        let norm = a * a + b * b;
        if (norm - 1.0).abs() > COEFFICIENT_TOLERANCE {
            return Err(HilbertError::CoefficientNorm(norm));
        }
        Ok(c)
    }

    /// Skips the `a² + b² = 1` convention.
    pub fn unnormalized(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self, HilbertError> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(a) || !ok(b) || !alpha.is_finite() || !beta.is_finite() {
            return Err(HilbertError::NegativeCoefficient);
        }
        Ok(Self { a, b, alpha, beta })
    }

    fn weights(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(self.a, self.alpha),
            Complex64::from_polar(self.b, self.beta),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    pub state: QuantumState,
    /// `‖w_r‖²` before any renormalization.
    pub norm_sq: f64,
    /// `‖state‖²` is within [`NORM_TOLERANCE`] of one.
    pub normalized: bool,
    pub renormalized: bool,
}

fn combine(
    w_p: &QuantumState,
    w_q: &QuantumState,
    coeff: &SuperpositionCoefficients,
) -> Vec<Complex64> {
    let (cp, cq) = coeff.weights();
    w_p.to_complex()
        .into_iter()
        .zip(w_q.to_complex())
        .map(|(p, q)| cp * p + cq * q)
        .collect()
}

/// `w(e, r) = a e^{iα} w(e, p) + b e^{iβ} w(e, q)`.
///
/// The result is not rescaled unless `renormalize` is set. A complete
/// cancellation is an error either way.
pub fn superpose(
    w_p: &QuantumState,
    w_q: &QuantumState,
    coeff: &SuperpositionCoefficients,
    renormalize: bool,
) -> Result<Superposition, HilbertError> {
    check_len("second state", w_p.dim(), w_q.dim())?;
    let mut components = combine(w_p, w_q, coeff);
    let norm_sq: f64 = components.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq <= DEGENERATE_NORM_SQ {
        return Err(HilbertError::Degenerate);
    }
    if renormalize {
        let scale = norm_sq.sqrt();
        components.iter_mut().for_each(|z| *z /= scale);
    }
    let state = QuantumState::from_complex(&components);
    Ok(Superposition {
        normalized: state.is_normalized(),
        state,
        norm_sq,
        renormalized: renormalize,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeInterference {
    /// `P(x_j, e, r)`.
    pub p_r: f64,
    /// `a² P_p + b² P_q`.
    pub mixture: f64,
    pub interference_term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceReport {
    pub outcomes: Vec<OutcomeInterference>,
    pub total_pr: f64,
    pub normalized: bool,
}

impl InterferenceReport {
    fn from_outcomes(outcomes: Vec<OutcomeInterference>) -> Self {
        let total_pr = outcomes.iter().map(|o| o.p_r).sum::<f64>();
        Self {
            normalized: (total_pr - 1.0).abs() <= NORM_TOLERANCE,
            outcomes,
            total_pr,
        }
    }

    pub fn p_r(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.p_r).collect()
    }
}

/// Per-outcome interference for one-slot-per-outcome families:
///
/// ```text
/// P_r = a² P_p + b² P_q + 2ab √(P_p P_q) cos(α_p − α_q + α − β)
/// ```
pub fn interference_closed_form(
    p_p: &ProbabilityVector,
    p_q: &ProbabilityVector,
    phases_p: &[f64],
    phases_q: &[f64],
    coeff: &SuperpositionCoefficients,
) -> Result<InterferenceReport, HilbertError> {
    let n = p_p.len();
    check_len("second distribution", n, p_q.len())?;
    if phases_p.len() != n || phases_q.len() != n {
        return Err(HilbertError::NonSingletonFamily);
    }
    let (a, b) = (coeff.a, coeff.b);
    let outcomes = (0..n)
        .map(|j| {
            let mixture = a * a * p_p[j] + b * b * p_q[j];
            let delta = phases_p[j] - phases_q[j] + coeff.alpha - coeff.beta;
            let interference_term = 2.0 * a * b * (p_p[j] * p_q[j]).sqrt() * delta.cos();
            OutcomeInterference {
                p_r: mixture + interference_term,
                mixture,
                interference_term,
            }
        })
        .collect();
    Ok(InterferenceReport::from_outcomes(outcomes))
}

/// Interference computed by superposing the vectors and applying the Born
/// rule block by block. Works for any spectral family; the superposition is
/// left unnormalized.
pub fn interference_direct(
    w_p: &QuantumState,
    w_q: &QuantumState,
    family: &SpectralFamily,
    coeff: &SuperpositionCoefficients,
) -> Result<InterferenceReport, HilbertError> {
    check_len("second state", w_p.dim(), w_q.dim())?;
    let p_p = born_distribution(w_p, family)?;
    let p_q = born_distribution(w_q, family)?;
    let w_r = QuantumState::from_complex(&combine(w_p, w_q, coeff));
    let p_r = born_distribution(&w_r, family)?;
    let (a, b) = (coeff.a, coeff.b);
    let outcomes = (0..family.outcome_count())
        .map(|k| {
            let mixture = a * a * p_p[k] + b * b * p_q[k];
            OutcomeInterference {
                p_r: p_r[k],
                mixture,
                interference_term: p_r[k] - mixture,
            }
        })
        .collect();
    Ok(InterferenceReport::from_outcomes(outcomes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComparison {
    pub mixture: Vec<f64>,
    pub superposition: Vec<f64>,
    /// `superposition − mixture`, per outcome.
    pub gap: Vec<f64>,
    /// Every gap is within [`SEGMENT_TOLERANCE`]: `v(e, r)` lies on the
    /// segment between `v(e, p)` and `v(e, q)`.
    pub on_segment: bool,
}

impl MixtureComparison {
    pub fn from_report(report: &InterferenceReport) -> Self {
        let mixture: Vec<f64> = report.outcomes.iter().map(|o| o.mixture).collect();
        let superposition = report.p_r();
        let gap: Vec<f64> = superposition
            .iter()
            .zip(&mixture)
            .map(|(s, m)| s - m)
            .collect();
        Self {
            on_segment: gap.iter().all(|g| g.abs() <= SEGMENT_TOLERANCE),
            mixture,
            superposition,
            gap,
        }
    }
}

/// Classical mixture against the superposition distribution.
pub fn mixture_vs_superposition(
    p_p: &ProbabilityVector,
    p_q: &ProbabilityVector,
    phases_p: &[f64],
    phases_q: &[f64],
    coeff: &SuperpositionCoefficients,
) -> Result<MixtureComparison, HilbertError> {
    let report = interference_closed_form(p_p, p_q, phases_p, phases_q, coeff)?;
    Ok(MixtureComparison::from_report(&report))
}
