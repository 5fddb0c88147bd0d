//! JSON model files.
//!
//! ```json
//! {
//!   "entity": "vessel",
//!   "states": [{ "id": "p", "description": "..." }],
//!   "measurements": [{ "id": "e", "outcomes": ["M", "L"], "final_states": null }],
//!   "probabilities": [{ "measurement": "e", "state": "p", "mu": [0.5, 0.5], "phases": [0, 0] }],
//!   "hilbert": [{ "measurement": "e", "block_sizes": [1, 1] }]
//! }
//! ```
//!
//! `phases` and `hilbert` are optional. After validation every measurement
//! gets a `hilbert` entry (all-ones blocks by default) and every table gets
//! phases (zeros by default), so a parsed model is fully explicit.

use std::path::Path;

use qmod_core::{validate_model, EntityModel, HilbertSpec};

use crate::error::CliError;

pub fn parse_model(path: impl AsRef<Path>) -> Result<EntityModel, CliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_model_str(&text, path)
}

pub fn parse_model_str(text: &str, origin: &Path) -> Result<EntityModel, CliError> {
    let mut model: EntityModel = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let violations = validate_model(&model);
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations));
    }
    apply_defaults(&mut model);
    Ok(model)
}

fn apply_defaults(model: &mut EntityModel) {
    let mut hilbert = Vec::with_capacity(model.measurements.len());
    for m in &model.measurements {
        let block_sizes = model
            .block_sizes(&m.measurement_id)
            .expect("measurement exists");
        hilbert.push(HilbertSpec {
            measurement_id: m.measurement_id.clone(),
            block_sizes,
        });
    }
    model.hilbert = hilbert;
    for i in 0..model.probability_tables.len() {
        let dim = model
            .hilbert_dimension(&model.probability_tables[i].measurement_id)
            .expect("validated table references a measurement");
        let table = &mut model.probability_tables[i];
        if table.phases.is_none() {
            table.phases = Some(vec![0.0; dim]);
        }
    }
}

/// Canonical pretty-printed JSON of a model, newline terminated.
pub fn dump_model(model: &EntityModel) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serializes");
    s.push('\n');
    s
}

pub fn write_model(model: &EntityModel, path: impl AsRef<Path>) -> Result<(), CliError> {
    let path = path.as_ref();
    std::fs::write(path, dump_model(model)).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}
