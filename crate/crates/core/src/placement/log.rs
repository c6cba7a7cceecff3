use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One placed blob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementRecord {
    /// Label written into the output mask (1-based, in placement order).
    pub label: u32,
    /// Index of the blob in the pool passed to the placer.
    pub blob_id: usize,
    /// Position in the shuffled scan order at the time it was found.
    pub scan_position: usize,
    pub y: usize,
    pub x: usize,
    /// Exclusion radius drawn for this placement.
    pub z: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlacementLog {
    pub records: Vec<PlacementRecord>,
}

impl PlacementLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// JSON lines, one record per line, trailing newline.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses JSON lines; blank lines are skipped. Labels must run 1, 2, …
    /// in order.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: PlacementRecord = serde_json::from_str(line)?;
            if rec.label as usize != records.len() + 1 {
                return Err(Error::Malformed {
                    what: "placement log",
                    reason: format!("line {}: label {} out of sequence", i + 1, rec.label),
                });
            }
            if !(rec.z.is_finite() && rec.z >= 0.0) {
                return Err(Error::Malformed {
                    what: "placement log",
                    reason: format!("line {}: invalid radius {}", i + 1, rec.z),
                });
            }
            records.push(rec);
        }
        Ok(Self { records })
    }
}
