//! JSON input formats and their canonical serialization.
//!
//! An entry is either an integer or `{"coords": [..], "conj": [..], "denom": k}`
//! standing for `pi^-k (a + sigma(b))`, with coordinates little-endian in the
//! basis `y^i t^j`. Matrices are lists of rows; `j` is a flat list.

use afl_core::exact::{ExactEntry, ExactMat};
use afl_core::local_rings::FieldSpec;
use afl_core::orbital::{PairData, Stability};
use afl_core::reductions::{BaseChangeData, InstanceData};
use afl_core::witt_frames::{LtExtension, WittCase, MAX_LEN};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(i64),
    Full {
        coords: Vec<i64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        conj: Vec<i64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        denom: u32,
    },
}

fn is_zero(k: &u32) -> bool {
    *k == 0
}

fn one() -> u32 {
    1
}

impl EntryJson {
    fn to_exact(&self) -> ExactEntry {
        match self {
            EntryJson::Int(v) => ExactEntry::int(*v),
            EntryJson::Full { coords, conj, denom } => {
                let mut e = ExactEntry::with_conj(coords, conj);
                e.denom = *denom;
                e
            }
        }
    }

    fn from_exact(e: &ExactEntry) -> EntryJson {
        let trim = |v: &[i64]| {
            let mut v = v.to_vec();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        let (coords, conj) = (trim(&e.coords), trim(&e.conj));
        if e.denom == 0 && conj.is_empty() && coords.len() <= 1 {
            return EntryJson::Int(coords.first().copied().unwrap_or(0));
        }
        EntryJson::Full { coords, conj, denom: e.denom }
    }
}

pub type MatJson = Vec<Vec<EntryJson>>;

fn mat_to_exact(m: &MatJson) -> Result<ExactMat, String> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix".into());
    }
    Ok(ExactMat::from_fn(rows, cols, |i, j| m[i][j].to_exact()))
}

fn mat_from_exact(m: &ExactMat) -> MatJson {
    (0..m.rows).map(|i| (0..m.cols).map(|j| EntryJson::from_exact(m.get(i, j))).collect()).collect()
}

fn col_to_exact(v: &[EntryJson]) -> ExactMat {
    ExactMat::from_fn(v.len(), 1, |i, _| v[i].to_exact())
}

fn col_from_exact(m: &ExactMat) -> Vec<EntryJson> {
    (0..m.rows).map(|i| EntryJson::from_exact(m.get(i, 0))).collect()
}

/// `E0` (or `A0`) by its prime, residue degree and optional Eisenstein
/// polynomial; the quadratic extension is always taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
    #[serde(default = "one")]
    pub f0: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eis: Option<Vec<i64>>,
}

impl FieldJson {
    pub fn spec(&self) -> FieldSpec {
        match &self.eis {
            Some(c) => FieldSpec::ramified(self.p, self.f0, c.clone(), true),
            None => FieldSpec::unramified(self.p, self.f0, true),
        }
    }

    fn of(s: &FieldSpec) -> FieldJson {
        FieldJson { p: s.p, f0: s.f0, eis: s.eis.clone() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityJson {
    #[default]
    Lie,
    Group,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub field: FieldJson,
    pub gram: MatJson,
    pub x: MatJson,
    pub j: Vec<EntryJson>,
    #[serde(default)]
    pub stability: StabilityJson,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub cayley: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<MatJson>,
}

/// A pair over `A = A0 ⊗ Q_p^2` restricted to `E`; `field` describes `A0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseChangeJson {
    pub field: FieldJson,
    pub gram: MatJson,
    pub x: MatJson,
    pub j: Vec<EntryJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceJson {
    Pair(PairJson),
    BaseChange(BaseChangeJson),
}

impl InstanceJson {
    /// Accepts a tagged instance or an untagged pair.
    pub fn parse(v: serde_json::Value) -> Result<InstanceJson, String> {
        let v = match v {
            serde_json::Value::Object(mut m) => {
                m.entry("kind").or_insert_with(|| "pair".into());
                serde_json::Value::Object(m)
            }
            other => other,
        };
        serde_json::from_value(v).map_err(|e| e.to_string())
    }

    pub fn to_data(&self) -> Result<InstanceData, String> {
        match self {
            InstanceJson::Pair(p) => Ok(InstanceData::Pair(PairData {
                spec: p.field.spec(),
                gram: mat_to_exact(&p.gram)?,
                x: mat_to_exact(&p.x)?,
                j: col_to_exact(&p.j),
                stability: match p.stability {
                    StabilityJson::Lie => Stability::Lie,
                    StabilityJson::Group => Stability::Group,
                },
                cayley: p.cayley,
                conjugator: p.conjugator.as_ref().map(mat_to_exact).transpose()?,
            })),
            InstanceJson::BaseChange(b) => Ok(InstanceData::BaseChange(BaseChangeData::new(
                b.field.spec(),
                mat_to_exact(&b.gram)?,
                mat_to_exact(&b.x)?,
                col_to_exact(&b.j),
            ))),
        }
    }

    pub fn from_data(d: &InstanceData) -> InstanceJson {
        match d {
            InstanceData::Pair(p) => InstanceJson::Pair(PairJson {
                field: FieldJson::of(&p.spec),
                gram: mat_from_exact(&p.gram),
                x: mat_from_exact(&p.x),
                j: col_from_exact(&p.j),
                stability: match p.stability {
                    Stability::Lie => StabilityJson::Lie,
                    Stability::Group => StabilityJson::Group,
                },
                cayley: p.cayley,
                conjugator: p.conjugator.as_ref().map(mat_from_exact),
            }),
            InstanceData::BaseChange(b) => InstanceJson::BaseChange(BaseChangeJson {
                field: FieldJson::of(&b.a_spec),
                gram: mat_from_exact(&b.gram),
                x: mat_from_exact(&b.x),
                j: col_from_exact(&b.j),
            }),
        }
    }

    /// Compact JSON with fixed field order and trimmed coordinates.
    pub fn canonical(&self) -> String {
        let d = self.to_data().map(|d| InstanceJson::from_data(&d)).unwrap_or_else(|_| self.clone());
        serde_json::to_string(&d).expect("instances serialize")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        digest_str(&self.canonical())
    }
}

pub fn digest_str(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// Just a form: enough for `parity`.
#[derive(Clone, Debug, Deserialize)]
pub struct GramJson {
    pub field: FieldJson,
    pub gram: MatJson,
}

impl GramJson {
    pub fn gram(&self) -> Result<ExactMat, String> {
        mat_to_exact(&self.gram)
    }
}

/// A Witt suite case: `Z_p[pi']` over `Z_p` with `pi'^e = p`, or the
/// Eisenstein polynomial `eis` over `Z_p` when given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WittJson {
    pub p: u64,
    #[serde(default = "one_usize")]
    pub e: usize,
    #[serde(default = "three")]
    pub len: usize,
    #[serde(default = "four")]
    pub prec: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eis: Option<Vec<i64>>,
}

fn one_usize() -> usize {
    1
}

fn three() -> usize {
    3
}

fn four() -> u32 {
    4
}

impl WittJson {
    pub fn case(&self, prec: Option<u32>) -> Result<WittCase, String> {
        if self.len == 0 || self.len > MAX_LEN {
            return Err(format!("Witt length must be in 1..={MAX_LEN}"));
        }
        let prec = prec.unwrap_or(self.prec);
        Ok(match &self.eis {
            Some(c) => {
                let top = FieldSpec::ramified(self.p, 1, c.clone(), false);
                top.validate().map_err(|e| e.to_string())?;
                WittCase::new(LtExtension::over_zp(&top), self.len, prec)
            }
            None => {
                if self.e == 0 {
                    return Err("ramification index must be positive".into());
                }
                WittCase::pure(self.p, self.e, self.len, prec)
            }
        })
    }
}

/// Splits input text into JSON values: a single value, an array of values
/// or JSON lines.
pub fn split_values(text: &str) -> Result<Vec<serde_json::Value>, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty input".into());
    }
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(t) {
        return Ok(match v {
            serde_json::Value::Array(a) => a,
            v => vec![v],
        });
    }
    t.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}
