//! JSON operator files: `{"entries": [{"j", "k", "re", "im"}, ...], "class": "L1"}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoefficientOperator, OperatorClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFileEntry {
    pub j: usize,
    pub k: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub entries: Vec<OperatorFileEntry>,
    #[serde(default)]
    pub class: OperatorClass,
}

impl From<&CoefficientOperator> for OperatorFile {
    fn from(op: &CoefficientOperator) -> Self {
        Self {
            entries: op
                .entries()
                .iter()
                .map(|(&(j, k), v)| OperatorFileEntry { j, k, re: v.re, im: v.im })
                .collect(),
            class: op.class(),
        }
    }
}

impl TryFrom<OperatorFile> for CoefficientOperator {
    type Error = Error;
    fn try_from(file: OperatorFile) -> Result<Self> {
        CoefficientOperator::from_entries(
            file.entries.into_iter().map(|e| (e.j, e.k, Complex64::new(e.re, e.im))),
            file.class,
        )
    }
}

impl CoefficientOperator {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: OperatorFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("operator file: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&OperatorFile::from(self)).expect("operator file serializes")
    }
}

pub fn read_operator(path: impl AsRef<Path>) -> Result<CoefficientOperator> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    CoefficientOperator::from_json(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_operator(op: &CoefficientOperator, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, op.to_json() + "\n")?;
    Ok(())
}
