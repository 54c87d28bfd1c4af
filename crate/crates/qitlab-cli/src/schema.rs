//! JSON state-file schema and conversion into validated library types.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "objects": {
//!     "rho": { "type": "density", "dim": 2,
//!              "entries": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] },
//!     "src": { "type": "cq_state", "probs": [0.5, 0.5],
//!              "conditionals": [ { "dim": 2, "entries": ... }, ... ] },
//!     "w":   { "type": "channel", "states": [ { "dim": 2, "entries": ... }, ... ] }
//!   }
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs; dimensions are explicit and
//! checked. Semantic violations (non-Hermitian, non-PSD, bad trace) are
//! reported with the offending object's name.

use std::collections::BTreeMap;

use serde::Deserialize;

use qitlab::channelcode::CQChannel;
use qitlab::matcore::{ComplexMatrix, HermitianMatrix};
use qitlab::states::{CQState, DensityMatrix};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema: u32,
    pub objects: BTreeMap<String, ObjectSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectSpec {
    Density {
        dim: usize,
        entries: Vec<Vec<[f64; 2]>>,
    },
    CqState {
        probs: Vec<f64>,
        conditionals: Vec<MatrixSpec>,
    },
    Channel {
        states: Vec<MatrixSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

/// A validated object ready for use by a command.
pub enum LoadedObject {
    Density(DensityMatrix),
    CqState(CQState),
    Channel(CQChannel),
}

impl LoadedObject {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedObject::Density(_) => "density",
            LoadedObject::CqState(_) => "cq_state",
            LoadedObject::Channel(_) => "channel",
        }
    }
}

fn build_matrix(
    name: &str,
    dim: usize,
    entries: &[Vec<[f64; 2]>],
) -> Result<HermitianMatrix, CliError> {
    if entries.len() != dim {
        return Err(CliError::input(format!(
            "object '{name}': expected {dim} rows, found {}",
            entries.len()
        )));
    }
    let mut rows = Vec::with_capacity(dim);
    for (i, row) in entries.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::input(format!(
                "object '{name}': row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        if row
            .iter()
            .any(|&[re, im]| !re.is_finite() || !im.is_finite())
        {
            return Err(CliError::input(format!(
                "object '{name}': non-finite entry in row {i}"
            )));
        }
        rows.push(row.iter().map(|&[re, im]| (re, im)).collect::<Vec<_>>());
    }
    let matrix = ComplexMatrix::from_rows(&rows)
        .map_err(|e| CliError::input(format!("object '{name}': {e}")))?;
    HermitianMatrix::new(matrix).map_err(|e| CliError::input(format!("object '{name}': {e}")))
}

fn build_density(name: &str, spec: &MatrixSpec) -> Result<DensityMatrix, CliError> {
    let mat = build_matrix(name, spec.dim, &spec.entries)?;
    DensityMatrix::new(mat).map_err(|e| CliError::input(format!("object '{name}': {e}")))
}

pub struct Workspace {
    objects: BTreeMap<String, LoadedObject>,
}

impl Workspace {
    /// Parse and validate a state file.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| {
            CliError::input(format!(
                "JSON parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        if file.schema != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.schema
            )));
        }
        let mut objects = BTreeMap::new();
        for (name, spec) in &file.objects {
            let loaded = match spec {
                ObjectSpec::Density { dim, entries } => {
                    let mat = build_matrix(name, *dim, entries)?;
                    LoadedObject::Density(
                        DensityMatrix::new(mat)
                            .map_err(|e| CliError::input(format!("object '{name}': {e}")))?,
                    )
                }
                ObjectSpec::CqState {
                    probs,
                    conditionals,
                } => {
                    let states = conditionals
                        .iter()
                        .enumerate()
                        .map(|(i, m)| build_density(&format!("{name}[{i}]"), m))
                        .collect::<Result<Vec<_>, _>>()?;
                    LoadedObject::CqState(
                        CQState::new(probs.clone(), states)
                            .map_err(|e| CliError::input(format!("object '{name}': {e}")))?,
                    )
                }
                ObjectSpec::Channel { states } => {
                    let states = states
                        .iter()
                        .enumerate()
                        .map(|(i, m)| build_density(&format!("{name}[{i}]"), m))
                        .collect::<Result<Vec<_>, _>>()?;
                    LoadedObject::Channel(
                        CQChannel::new(states)
                            .map_err(|e| CliError::input(format!("object '{name}': {e}")))?,
                    )
                }
            };
            objects.insert(name.clone(), loaded);
        }
        Ok(Self { objects })
    }

    fn get(&self, name: &str) -> Result<&LoadedObject, CliError> {
        self.objects.get(name).ok_or_else(|| {
            CliError::input(format!(
                "object '{name}' not found; available: {}",
                self.objects.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn density(&self, name: &str) -> Result<&DensityMatrix, CliError> {
        match self.get(name)? {
            LoadedObject::Density(d) => Ok(d),
            other => Err(CliError::input(format!(
                "object '{name}' is a {}, expected a density matrix",
                other.kind()
            ))),
        }
    }

    pub fn cq_state(&self, name: &str) -> Result<&CQState, CliError> {
        match self.get(name)? {
            LoadedObject::CqState(s) => Ok(s),
            other => Err(CliError::input(format!(
                "object '{name}' is a {}, expected a cq_state",
                other.kind()
            ))),
        }
    }

    pub fn channel(&self, name: &str) -> Result<&CQChannel, CliError> {
        match self.get(name)? {
            LoadedObject::Channel(c) => Ok(c),
            other => Err(CliError::input(format!(
                "object '{name}' is a {}, expected a channel",
                other.kind()
            ))),
        }
    }
}
