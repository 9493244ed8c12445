//! JSON code descriptions and the bundled code library.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::{build_monomial, build_qc2, ParityCheckMatrix, Structure};
use crate::error::{Error, Result};

/// On-disk description of a code.
///
/// ```json
/// {"type": "qc2", "p": 5, "supports": [[0, 1, 3], [0, 2, 3]]}
/// {"type": "monomial", "p": 7, "shifts": [[0, 1, 3], [0, 2, 6]]}
/// {"type": "explicit", "rows": [[0, 1], [1, 2]], "n": 3}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "type")]
    pub kind: CodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supports: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<usize>>>,
    /// Column count for explicit codes; inferred from `rows` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Qc2,
    Monomial,
    Explicit,
}

const BUILTINS: &[(&str, &str)] = &[
    ("C0", include_str!("../../codes/C0.json")),
    ("C1", include_str!("../../codes/C1.json")),
    ("C2", include_str!("../../codes/C2.json")),
    ("C3", include_str!("../../codes/C3.json")),
    ("C4", include_str!("../../codes/C4.json")),
    ("C5", include_str!("../../codes/C5.json")),
    ("C6", include_str!("../../codes/C6.json")),
    ("C7", include_str!("../../codes/C7.json")),
    ("C8", include_str!("../../codes/C8.json")),
];

/// Names of the bundled codes.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

impl CodeSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("malformed spec JSON: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// A bundled code by name (`C0` .. `C8`).
    pub fn builtin(name: &str) -> Result<Self> {
        BUILTINS
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, text)| Self::from_json(text))
            .unwrap_or_else(|| Err(Error::InvalidSpec(format!("unknown builtin code `{name}`"))))
    }

    /// Loads `builtin:<name>` or a JSON file path.
    pub fn load(location: &str) -> Result<Self> {
        match location.strip_prefix("builtin:") {
            Some(name) => Self::builtin(name),
            None => Self::from_json(&std::fs::read_to_string(Path::new(location))?),
        }
    }

    pub fn qc2(p: usize, s0: Vec<usize>, s1: Vec<usize>) -> Self {
        Self {
            name: None,
            kind: CodeKind::Qc2,
            p: Some(p),
            supports: Some(vec![s0, s1]),
            shifts: None,
            rows: None,
            n: None,
        }
    }

    pub fn build(&self) -> Result<ParityCheckMatrix> {
        let need_p = || self.p.ok_or_else(|| Error::InvalidSpec("missing field `p`".into()));
        match self.kind {
            CodeKind::Qc2 => {
                let supports =
                    self.supports.as_ref().ok_or_else(|| Error::InvalidSpec("missing field `supports`".into()))?;
                if supports.len() != 2 {
                    return Err(Error::InvalidSpec(format!(
                        "qc2 needs exactly 2 supports, got {}",
                        supports.len()
                    )));
                }
                if supports[0].is_empty() {
                    return Err(Error::InvalidSpec("supports must be nonempty".into()));
                }
                build_qc2(need_p()?, &supports[0], &supports[1])
            }
            CodeKind::Monomial => {
                let shifts =
                    self.shifts.as_ref().ok_or_else(|| Error::InvalidSpec("missing field `shifts`".into()))?;
                build_monomial(need_p()?, shifts)
            }
            CodeKind::Explicit => {
                let rows = self.rows.as_ref().ok_or_else(|| Error::InvalidSpec("missing field `rows`".into()))?;
                ParityCheckMatrix::from_rows(rows, self.n)
            }
        }
    }

    /// Spec that rebuilds `h`.
    pub fn from_matrix(h: &ParityCheckMatrix) -> Self {
        let mut spec = Self { name: None, kind: CodeKind::Explicit, p: None, supports: None, shifts: None, rows: None, n: None };
        match h.structure() {
            Structure::Qc2 { p, s0, s1, .. } => {
                spec.kind = CodeKind::Qc2;
                spec.p = Some(*p);
                spec.supports = Some(vec![s0.clone(), s1.clone()]);
            }
            Structure::Monomial { p, shifts, .. } => {
                spec.kind = CodeKind::Monomial;
                spec.p = Some(*p);
                spec.shifts = Some(shifts.clone());
            }
            Structure::Explicit => {
                spec.rows = Some(h.row_supports());
                spec.n = Some(h.n());
            }
        }
        spec
    }
}
