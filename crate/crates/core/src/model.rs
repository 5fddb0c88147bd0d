//! Entity, state, measurement and probability data model.
//!
//! A model is plain data. [`validate_model`] walks it and reports every
//! broken invariant as a [`Violation`] with a path to the offending field;
//! downstream modules only ever see models that produced an empty report.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `Σ μ_j = 1` for probability vectors read from input.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("probability vector is empty")]
    EmptyDistribution,
    #[error("probability entry {index} = {value} is outside [0, 1]")]
    EntryOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {0}")]
    BadSum(f64),
    #[error("no probability table for measurement '{measurement}' and state '{state}'")]
    TableNotFound { measurement: String, state: String },
    #[error("unknown measurement '{0}'")]
    UnknownMeasurement(String),
    #[error("unknown state '{0}'")]
    UnknownState(String),
}

/// Outcome distribution `μ(x_j, e, p)` of one measurement on one state.
///
/// Construction checks each entry lies in `[0, 1]` and that the entries sum
/// to one within [`PROBABILITY_SUM_TOLERANCE`], then divides by the sum so
/// the stored distribution is normalized as exactly as floating point allows.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: impl Into<Vec<f64>>) -> Result<Self, ModelError> {
        let entries = entries.into();
        check_distribution(&entries)?;
        let sum: f64 = entries.iter().sum();
        Ok(Self(entries.into_iter().map(|x| x / sum).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Zero-based access.
    pub fn get(&self, index: usize) -> Option<f64> {
        self.0.get(index).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

fn check_distribution(entries: &[f64]) -> Result<(), ModelError> {
    if entries.is_empty() {
        return Err(ModelError::EmptyDistribution);
    }
    for (index, &value) in entries.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(ModelError::EntryOutOfRange { index, value });
        }
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(ModelError::BadSum(sum));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(rename = "id")]
    pub state_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A measurement context `e` with its ordered outcomes and, optionally, the
/// state the entity ends up in for each outcome. Final states are labels only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    #[serde(rename = "id")]
    pub measurement_id: String,
    pub outcomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_states: Option<Vec<String>>,
}

impl MeasurementSpec {
    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }
}

/// Raw probabilities for one (measurement, state) pair plus optional
/// per-slot phases in radians. `mu` stays raw so that validation can report
/// what was actually supplied; use [`ProbabilityTable::distribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    #[serde(rename = "measurement")]
    pub measurement_id: String,
    #[serde(rename = "state")]
    pub state_id: String,
    pub mu: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
}

impl ProbabilityTable {
    pub fn distribution(&self) -> Result<ProbabilityVector, ModelError> {
        ProbabilityVector::new(self.mu.clone())
    }

    /// Phases for a Hilbert space of dimension `m`, zeros when absent.
    pub fn phases_or_zero(&self, m: usize) -> Vec<f64> {
        self.phases.clone().unwrap_or_else(|| vec![0.0; m])
    }
}

/// Block layout of the spectral family used for one measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertSpec {
    #[serde(rename = "measurement")]
    pub measurement_id: String,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityModel {
    #[serde(rename = "entity")]
    pub entity_id: String,
    pub states: Vec<StateSpec>,
    pub measurements: Vec<MeasurementSpec>,
    #[serde(rename = "probabilities")]
    pub probability_tables: Vec<ProbabilityTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hilbert: Vec<HilbertSpec>,
}

impl EntityModel {
    pub fn measurement(&self, measurement_id: &str) -> Result<&MeasurementSpec, ModelError> {
        self.measurements
            .iter()
            .find(|m| m.measurement_id == measurement_id)
            .ok_or_else(|| ModelError::UnknownMeasurement(measurement_id.to_owned()))
    }

    pub fn state(&self, state_id: &str) -> Result<&StateSpec, ModelError> {
        self.states
            .iter()
            .find(|s| s.state_id == state_id)
            .ok_or_else(|| ModelError::UnknownState(state_id.to_owned()))
    }

    /// Block sizes configured for a measurement; all ones when unspecified.
    pub fn block_sizes(&self, measurement_id: &str) -> Option<Vec<usize>> {
        if let Some(spec) = self
            .hilbert
            .iter()
            .find(|h| h.measurement_id == measurement_id)
        {
            return Some(spec.block_sizes.clone());
        }
        self.measurement(measurement_id)
            .ok()
            .map(|m| vec![1; m.outcome_count()])
    }

    /// Hilbert dimension `m` chosen for a measurement.
    pub fn hilbert_dimension(&self, measurement_id: &str) -> Option<usize> {
        self.block_sizes(measurement_id).map(|b| b.iter().sum())
    }
}

/// One broken invariant, located by a dotted/indexed field path such as
/// `probabilities[2].mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Checks every structural invariant of `model`. An empty vector means the
/// model is valid. The report order follows the model's field order, so
/// validating the same model twice gives the same report.
pub fn validate_model(model: &EntityModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |path: String, message: String| out.push(Violation { path, message });

    if model.entity_id.is_empty() {
        push("entity".into(), "entity id is empty".into());
    }

    let mut state_ids = HashSet::new();
    for (i, s) in model.states.iter().enumerate() {
        if s.state_id.is_empty() {
            push(format!("states[{i}].id"), "state id is empty".into());
        } else if !state_ids.insert(s.state_id.as_str()) {
            push(
                format!("states[{i}].id"),
                format!("duplicate state id '{}'", s.state_id),
            );
        }
    }

    let mut measurements: HashMap<&str, &MeasurementSpec> = HashMap::new();
    for (i, m) in model.measurements.iter().enumerate() {
        if m.measurement_id.is_empty() {
            push(
                format!("measurements[{i}].id"),
                "measurement id is empty".into(),
            );
        } else if measurements.insert(m.measurement_id.as_str(), m).is_some() {
            push(
                format!("measurements[{i}].id"),
                format!("duplicate measurement id '{}'", m.measurement_id),
            );
        }
        if m.outcomes.is_empty() {
            push(
                format!("measurements[{i}].outcomes"),
                "measurement needs at least one outcome".into(),
            );
        }
        let mut seen = HashSet::new();
        for (k, label) in m.outcomes.iter().enumerate() {
            if !seen.insert(label.as_str()) {
                push(
                    format!("measurements[{i}].outcomes[{k}]"),
                    format!("duplicate outcome label '{label}'"),
                );
            }
        }
        if let Some(finals) = &m.final_states {
            if finals.len() != m.outcomes.len() {
                push(
                    format!("measurements[{i}].final_states"),
                    format!(
                        "expected {} final states, found {}",
                        m.outcomes.len(),
                        finals.len()
                    ),
                );
            }
            for (k, fs) in finals.iter().enumerate() {
                if !state_ids.contains(fs.as_str()) {
                    push(
                        format!("measurements[{i}].final_states[{k}]"),
                        format!("unknown state reference '{fs}'"),
                    );
                }
            }
        }
    }

    let mut hilbert_dims: HashMap<&str, usize> = HashMap::new();
    for (i, h) in model.hilbert.iter().enumerate() {
        let path = format!("hilbert[{i}]");
        let Some(m) = measurements.get(h.measurement_id.as_str()) else {
            push(
                format!("{path}.measurement"),
                format!("unknown measurement reference '{}'", h.measurement_id),
            );
            continue;
        };
        if hilbert_dims.contains_key(h.measurement_id.as_str()) {
            push(
                format!("{path}.measurement"),
                format!("duplicate hilbert entry for '{}'", h.measurement_id),
            );
            continue;
        }
        let n = m.outcome_count();
        if let Err(e) = crate::hilbert::SpectralFamily::new(n, h.block_sizes.clone()) {
            push(format!("{path}.block_sizes"), e.to_string());
        }
        hilbert_dims.insert(h.measurement_id.as_str(), h.block_sizes.iter().sum());
    }

    let mut pairs = HashSet::new();
    for (i, t) in model.probability_tables.iter().enumerate() {
        let path = format!("probabilities[{i}]");
        let measurement = measurements.get(t.measurement_id.as_str());
        if measurement.is_none() {
            push(
                format!("{path}.measurement"),
                format!("unknown measurement reference '{}'", t.measurement_id),
            );
        }
        if !state_ids.contains(t.state_id.as_str()) {
            push(
                format!("{path}.state"),
                format!("unknown state reference '{}'", t.state_id),
            );
        }
        if !pairs.insert((t.measurement_id.as_str(), t.state_id.as_str())) {
            push(
                path.clone(),
                format!(
                    "duplicate table for measurement '{}' and state '{}'",
                    t.measurement_id, t.state_id
                ),
            );
        }
        if let Some(m) = measurement {
            if t.mu.len() != m.outcome_count() {
                push(
                    format!("{path}.mu"),
                    format!(
                        "expected {} probabilities, found {}",
                        m.outcome_count(),
                        t.mu.len()
                    ),
                );
            }
        }
        match check_distribution(&t.mu) {
            Ok(()) => {}
            Err(ModelError::BadSum(sum)) => {
                push(format!("{path}.mu"), format!("probabilities sum to {sum}"))
            }
            Err(e) => push(format!("{path}.mu"), e.to_string()),
        }
        if let Some(phases) = &t.phases {
            let m_dim = hilbert_dims
                .get(t.measurement_id.as_str())
                .copied()
                .or_else(|| measurement.map(|m| m.outcome_count()));
            if let Some(m_dim) = m_dim {
                if phases.len() != m_dim {
                    push(
                        format!("{path}.phases"),
                        format!(
                            "expected {m_dim} phases (Hilbert dimension), found {}",
                            phases.len()
                        ),
                    );
                }
            }
            if let Some(k) = phases.iter().position(|p| !p.is_finite()) {
                push(format!("{path}.phases[{k}]"), "phase is not finite".into());
            }
        }
    }

    out
}

/// Returns the unique table for `(measurement_id, state_id)`.
pub fn lookup_table<'a>(
    model: &'a EntityModel,
    measurement_id: &str,
    state_id: &str,
) -> Result<&'a ProbabilityTable, ModelError> {
    model
        .probability_tables
        .iter()
        .find(|t| t.measurement_id == measurement_id && t.state_id == state_id)
        .ok_or_else(|| ModelError::TableNotFound {
            measurement: measurement_id.to_owned(),
            state: state_id.to_owned(),
        })
}
