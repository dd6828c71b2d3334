//! JSON model documents and k-vector side files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::exact::AngleRatio;
use crate::ledger::KSign;
use crate::normal_form::{validate_model, GeodesicModel, NormalFormData};

/// One angle ratio: `num/den` or `(a + b√D)/c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AngleDocument {
    Rational {
        num: i64,
        den: i64,
    },
    Quadratic {
        a: i64,
        b: i64,
        c: i64,
        #[serde(rename = "D")]
        radicand: i64,
    },
}

impl AngleDocument {
    pub fn to_angle(&self) -> Result<AngleRatio, CliError> {
        let angle = match *self {
            AngleDocument::Rational { num, den } => AngleRatio::rational(num, den),
            AngleDocument::Quadratic { a, b, c, radicand } => {
                AngleRatio::quadratic(a, b, c, radicand)
            }
        };
        angle.map_err(|e| CliError::Parse(format!("angle {self:?}: {e}")))
    }

    pub fn from_angle(angle: &AngleRatio) -> Self {
        match angle {
            AngleRatio::Rational(r) => AngleDocument::Rational {
                num: r.num(),
                den: r.den(),
            },
            AngleRatio::Quadratic(q) => AngleDocument::Quadratic {
                a: q.a(),
                b: q.b(),
                c: q.c(),
                radicand: q.radicand() as i64,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub dim: u64,
    pub index: u64,
    #[serde(default)]
    pub p_minus: u64,
    #[serde(default)]
    pub p_zero: u64,
    #[serde(default)]
    pub p_plus: u64,
    #[serde(default)]
    pub q_minus: u64,
    #[serde(default)]
    pub q_zero: u64,
    #[serde(default)]
    pub q_plus: u64,
    #[serde(default)]
    pub rotations: Vec<AngleDocument>,
    #[serde(default)]
    pub nontrivial_pairs: Vec<AngleDocument>,
    #[serde(default)]
    pub trivial_pairs: Vec<AngleDocument>,
    #[serde(default)]
    pub h_plus: u64,
    #[serde(default)]
    pub h_minus: u64,
}

fn angles(list: &[AngleDocument]) -> Result<Vec<AngleRatio>, CliError> {
    list.iter().map(AngleDocument::to_angle).collect()
}

impl ModelDocument {
    /// Builds the model without validating it.
    pub fn to_model(&self) -> Result<GeodesicModel, CliError> {
        let nf = NormalFormData {
            half_dim: self.dim.saturating_sub(1),
            p_minus: self.p_minus,
            p_zero: self.p_zero,
            p_plus: self.p_plus,
            q_minus: self.q_minus,
            q_zero: self.q_zero,
            q_plus: self.q_plus,
            rotations: angles(&self.rotations)?,
            nontrivial_pairs: angles(&self.nontrivial_pairs)?,
            trivial_pairs: angles(&self.trivial_pairs)?,
            h_plus: self.h_plus,
            h_minus: self.h_minus,
        };
        Ok(GeodesicModel {
            dim: self.dim,
            initial_index: self.index,
            nf,
        })
    }

    pub fn from_model(model: &GeodesicModel) -> Self {
        let nf = &model.nf;
        let docs = |list: &[AngleRatio]| list.iter().map(AngleDocument::from_angle).collect();
        Self {
            dim: model.dim,
            index: model.initial_index,
            p_minus: nf.p_minus,
            p_zero: nf.p_zero,
            p_plus: nf.p_plus,
            q_minus: nf.q_minus,
            q_zero: nf.q_zero,
            q_plus: nf.q_plus,
            rotations: docs(&nf.rotations),
            nontrivial_pairs: docs(&nf.nontrivial_pairs),
            trivial_pairs: docs(&nf.trivial_pairs),
            h_plus: nf.h_plus,
            h_minus: nf.h_minus,
        }
    }
}

pub fn parse_model_str(text: &str) -> Result<GeodesicModel, CliError> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let model = doc.to_model()?;
    let report = validate_model(&model);
    if !report.is_valid() {
        return Err(CliError::Validation(Box::new(report)));
    }
    Ok(model)
}

pub fn parse_model_file(path: &Path) -> Result<GeodesicModel, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_model_str(&text)
}

pub fn write_model_file(path: &Path, model: &GeodesicModel) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&ModelDocument::from_model(model))
        .map_err(|e| CliError::Parse(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum KVectorEntry {
    Plain(Vec<u64>),
    Signed {
        entries: Vec<u64>,
        #[serde(default = "plus_one")]
        sign: i8,
    },
}

fn plus_one() -> i8 {
    1
}

/// Default side file: `<stem>.kvectors.json` next to the model.
pub fn default_kvector_path(model_path: &Path) -> PathBuf {
    let stem = model_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    model_path.with_file_name(format!("{stem}.kvectors.json"))
}

/// Reads `{"1": [..], "2": {"entries": [..], "sign": -1}, ...}` into a list
/// ordered by iterate, requiring keys `1..=N` without gaps.
pub fn parse_kvector_file(path: &Path) -> Result<Vec<(Vec<u64>, KSign)>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let raw: BTreeMap<String, KVectorEntry> =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut keyed = BTreeMap::new();
    for (key, entry) in raw {
        let m: u64 = key
            .parse()
            .map_err(|_| CliError::Parse(format!("k-vector key {key:?} is not an iterate")))?;
        let (entries, sign) = match entry {
            KVectorEntry::Plain(e) => (e, KSign::Plus),
            KVectorEntry::Signed { entries, sign: 1 } => (entries, KSign::Plus),
            KVectorEntry::Signed { entries, sign: -1 } => (entries, KSign::Minus),
            KVectorEntry::Signed { sign, .. } => {
                return Err(CliError::Parse(format!(
                    "k-vector sign {sign} must be 1 or -1"
                )))
            }
        };
        keyed.insert(m, (entries, sign));
    }
    let expected: Vec<u64> = (1..=keyed.len() as u64).collect();
    if keyed.keys().copied().collect::<Vec<_>>() != expected {
        return Err(CliError::Parse(
            "k-vector keys must be the iterates 1..N without gaps".into(),
        ));
    }
    Ok(keyed.into_values().collect())
}
