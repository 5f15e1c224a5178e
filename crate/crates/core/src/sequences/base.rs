//! Base constants `C_1, ..., C_{2^k0}` for the J-recurrence and their
//! on-disk configuration format.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SequenceError;
use crate::precision::{Decimal, FieldTag};

pub const BASE_FORMAT: &str = "bhbound-base/1";

/// Largest `k0` for which [`BaseConstants::constant`] fills every entry.
pub const MAX_DENSE_K0: u32 = 24;

/// Largest supported `k0` (indices must fit comfortably in `u64`).
pub const MAX_K0: u32 = 62;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseEntry {
    pub value: Decimal,
    pub provenance: String,
}

/// A configured prefix of a Bohnenblust-Hille constant sequence. Indices
/// range over `1..=2^k0`; entries may be absent, in which case any
/// evaluation that needs them fails with [`SequenceError::MissingBase`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseConstants {
    field: FieldTag,
    k0: u32,
    entries: BTreeMap<u64, BaseEntry>,
    description: String,
    fingerprint: u64,
}

impl BaseConstants {
    pub fn new(
        field: FieldTag,
        k0: u32,
        entries: BTreeMap<u64, BaseEntry>,
        description: impl Into<String>,
    ) -> Result<Self, SequenceError> {
        if k0 == 0 || k0 > MAX_K0 {
            return Err(SequenceError::Config(format!("k0 must be in 1..={MAX_K0}, got {k0}")));
        }
        let len = 1u64 << k0;
        let one = Decimal::from_i64(1);
        for (&n, entry) in &entries {
            if n == 0 || n > len {
                return Err(SequenceError::Config(format!(
                    "entry index {n} outside 1..={len}"
                )));
            }
            if entry.value < one {
                return Err(SequenceError::Config(format!(
                    "C_{n} = {} is below 1",
                    entry.value
                )));
            }
        }
        let fingerprint = fingerprint(field, k0, &entries);
        Ok(Self {
            field,
            k0,
            entries,
            description: description.into(),
            fingerprint,
        })
    }

    /// Every entry equal to `c`.
    pub fn constant(
        field: FieldTag,
        k0: u32,
        c: Decimal,
        provenance: &str,
    ) -> Result<Self, SequenceError> {
        if k0 > MAX_DENSE_K0 {
            return Err(SequenceError::Config(format!(
                "constant base limited to k0 <= {MAX_DENSE_K0}"
            )));
        }
        let entries = (1..=1u64 << k0)
            .map(|n| {
                (
                    n,
                    BaseEntry {
                        value: c.clone(),
                        provenance: provenance.to_string(),
                    },
                )
            })
            .collect();
        Self::new(field, k0, entries, format!("constant base C_n = {c}"))
    }

    /// Only `C_{2^k0}` is configured.
    pub fn top_only(
        field: FieldTag,
        k0: u32,
        value: Decimal,
        provenance: &str,
        description: impl Into<String>,
    ) -> Result<Self, SequenceError> {
        if k0 == 0 || k0 > MAX_K0 {
            return Err(SequenceError::Config(format!("k0 must be in 1..={MAX_K0}, got {k0}")));
        }
        let mut entries = BTreeMap::new();
        entries.insert(
            1u64 << k0,
            BaseEntry {
                value,
                provenance: provenance.to_string(),
            },
        );
        Self::new(field, k0, entries, description)
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn k0(&self) -> u32 {
        self.k0
    }

    /// Size of the index domain, `2^k0`.
    pub fn len(&self) -> u64 {
        1u64 << self.k0
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<&BaseEntry> {
        self.entries.get(&n)
    }

    /// `C_{2^k0}`.
    pub fn top(&self) -> Option<&BaseEntry> {
        self.get(self.len())
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &BaseEntry)> {
        self.entries.iter().map(|(&n, e)| (n, e))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn to_toml_string(&self) -> String {
        let file = BaseFile {
            format: BASE_FORMAT.to_string(),
            field: self.field,
            k0: self.k0,
            description: self.description.clone(),
            entries: self
                .entries
                .iter()
                .map(|(&n, e)| RawEntry {
                    n,
                    value: toml::Value::String(e.value.to_string()),
                    provenance: e.provenance.clone(),
                })
                .collect(),
        };
        toml::to_string(&file).expect("base constants serialize")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SequenceError> {
        let file: BaseFile =
            toml::from_str(s).map_err(|e| SequenceError::Config(e.message().to_string()))?;
        if file.format != BASE_FORMAT {
            return Err(SequenceError::Config(format!(
                "unsupported format {:?} (expected {BASE_FORMAT:?})",
                file.format
            )));
        }
        let mut entries = BTreeMap::new();
        for raw in file.entries {
            let text = match raw.value {
                toml::Value::String(s) => s,
                other => {
                    return Err(SequenceError::Config(format!(
                        "C_{}: value must be a quoted decimal string, got {}",
                        raw.n,
                        other.type_str()
                    )))
                }
            };
            let value: Decimal = text
                .parse()
                .map_err(|e| SequenceError::Config(format!("C_{}: {e}", raw.n)))?;
            let entry = BaseEntry {
                value,
                provenance: raw.provenance,
            };
            if entries.insert(raw.n, entry).is_some() {
                return Err(SequenceError::Config(format!("duplicate entry C_{}", raw.n)));
            }
        }
        Self::new(file.field, file.k0, entries, file.description)
    }

    pub fn load(path: &Path) -> Result<Self, SequenceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SequenceError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), SequenceError> {
        std::fs::write(path, self.to_toml_string())
            .map_err(|e| SequenceError::Io(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
struct BaseFile {
    format: String,
    field: FieldTag,
    k0: u32,
    #[serde(default)]
    description: String,
    #[serde(default)]
    entries: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    n: u64,
    value: toml::Value,
    #[serde(default)]
    provenance: String,
}

fn fingerprint(field: FieldTag, k0: u32, entries: &BTreeMap<u64, BaseEntry>) -> u64 {
    let mut h = DefaultHasher::new();
    field.hash(&mut h);
    k0.hash(&mut h);
    for (n, e) in entries {
        n.hash(&mut h);
        e.value.hash(&mut h);
    }
    h.finish()
}
