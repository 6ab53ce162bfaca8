//! TOML code definition files.
//!
//! A file always carries the trellis (`states`, `k`, `n`, `next_state`,
//! `labels`). The turbo fields (`K`, `systematic`, `puncture1`,
//! `puncture2`, `[interleaver]`) are needed to build a [`CodeSpec`]; the
//! optional `[declared]` table records values an audit must reproduce.
//!
//! ```toml
//! states = 2
//! k = 1
//! n = 2
//! next_state = [[0, 1], [1, 0]]
//! labels = [["0", "3"], ["1", "2"]]
//! ```

use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::metrics::DistanceMetric;
use crate::trellis::{octal_decode, octal_encode, OctalLabel, TableTrellis, TrellisTopology};
use crate::turbo::{default_spread, CodeSpec, Interleaver, PuncturePattern};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterleaverEntry {
    /// Length in symbols; defaults to `K / k`.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Requested spread; defaults to `floor(sqrt(N / 2))`.
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    pub seed: u64,
    /// Explicit permutation, overriding generation when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<u32>>,
}

/// Values a file claims about itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredValues {
    /// Metric the distances refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<DistanceMetric>,
    /// Total ones in the lookup table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ones: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_distance: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge_distance: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_free_distance: Option<u32>,
    /// Search depth used for `effective_free_distance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    /// Exact code rate such as `"1/10"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<String>,
}

impl DeclaredValues {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn parsed_rate(&self) -> Result<Option<Ratio<u64>>> {
        self.rate
            .as_deref()
            .map(|r| {
                Ratio::from_str(r.trim())
                    .map_err(|_| Error::CodeFile(format!("declared rate {r:?} is not a fraction")))
            })
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub states: usize,
    pub k: usize,
    pub n: usize,
    /// `next_state[s][u]`.
    pub next_state: Vec<Vec<u32>>,
    /// `labels[s][u]`, octal, most significant digit first.
    pub labels: Vec<Vec<String>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub info_bits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systematic: Option<bool>,
    /// Defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interleaver: Option<InterleaverEntry>,
    #[serde(default, skip_serializing_if = "DeclaredValues::is_empty")]
    pub declared: DeclaredValues,
}

/// 1-based line of byte offset `pos`.
fn line_at(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())].matches('\n').count() + 1
}

/// 1-based line where top-level `key` is assigned, if present.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl CodeFile {
    /// Parses and validates a file. Errors carry the offending line.
    pub fn parse(text: &str) -> Result<Self> {
        let file: CodeFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_at(text, s.start));
            let msg = e.message().trim().to_string();
            Error::CodeFile(match line {
                Some(l) => format!("line {l}: {msg}"),
                None => msg,
            })
        })?;
        file.validate().map_err(|(key, e)| {
            let msg = match e {
                Error::CodeFile(m) => m,
                other => other.to_string(),
            };
            Error::CodeFile(match line_of_key(text, key) {
                Some(l) => format!("line {l} ({key}): {msg}"),
                None => format!("{key}: {msg}"),
            })
        })?;
        Ok(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::CodeFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::CodeFile(m) => Error::CodeFile(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::CodeFile(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()?)
            .map_err(|e| Error::CodeFile(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> std::result::Result<(), (&'static str, Error)> {
        self.trellis().map_err(|e| match e {
            Error::InvalidTopology(_) => ("next_state", e),
            _ => ("labels", e),
        })?;
        if self.info_bits.is_some() {
            self.code_spec().map_err(|e| ("K", e))?;
        }
        self.declared.parsed_rate().map_err(|e| ("rate", e))?;
        Ok(())
    }

    pub fn topology(&self) -> Result<TrellisTopology> {
        let q = 1usize << self.k;
        if self.next_state.len() != self.states {
            return Err(Error::InvalidTopology(format!(
                "next_state has {} rows for {} states",
                self.next_state.len(),
                self.states
            )));
        }
        if let Some((s, row)) = self.next_state.iter().enumerate().find(|(_, r)| r.len() != q) {
            return Err(Error::InvalidTopology(format!("next_state row {s} has {} entries, expected {q}", row.len())));
        }
        TrellisTopology::new(self.states, self.k, self.next_state.concat())
    }

    pub fn trellis(&self) -> Result<TableTrellis> {
        let topology = self.topology()?;
        let q = 1usize << self.k;
        if self.labels.len() != self.states {
            return Err(Error::InvalidTrellis(format!(
                "labels has {} rows for {} states",
                self.labels.len(),
                self.states
            )));
        }
        let mut rows = Vec::with_capacity(self.states * q);
        for (s, row) in self.labels.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidTrellis(format!("labels row {s} has {} entries, expected {q}", row.len())));
            }
            for digits in row {
                rows.push(octal_decode(&OctalLabel::new(digits.clone())?, self.n)?);
            }
        }
        TableTrellis::from_labels(topology, self.n, &rows)
    }

    fn puncture(&self, mask: &Option<String>) -> Result<PuncturePattern> {
        let period = self.puncture_period.unwrap_or(self.n);
        match mask {
            Some(m) => PuncturePattern::from_octal(m, period),
            None => Ok(PuncturePattern::none(period)),
        }
    }

    /// Builds the turbo code; requires `K`.
    pub fn code_spec(&self) -> Result<CodeSpec> {
        let info_bits = self
            .info_bits
            .ok_or_else(|| Error::CodeFile("K is required for a turbo code".into()))?;
        let trellis = self.trellis()?;
        let symbols = info_bits / self.k.max(1);
        let entry = self
            .interleaver
            .clone()
            .unwrap_or(InterleaverEntry { n: None, s: None, seed: 0, permutation: None });
        let n = entry.n.unwrap_or(symbols);
        let il = match entry.permutation {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::LengthMismatch { expected: n, actual: p.len() });
                }
                Interleaver::from_permutation(p, entry.seed)?
            }
            None => Interleaver::spread_random(n, entry.s.unwrap_or_else(|| default_spread(n)), entry.seed)?,
        };
        CodeSpec::new(
            trellis,
            il,
            self.puncture(&self.puncture1)?,
            self.puncture(&self.puncture2)?,
            self.systematic.unwrap_or(true),
            info_bits,
        )
    }

    /// Trellis-only file.
    pub fn from_trellis(t: &TableTrellis) -> Self {
        let q = t.topology().num_inputs();
        let next = t.topology().next_state_table();
        Self {
            states: t.num_states(),
            k: t.k(),
            n: t.n(),
            next_state: next.chunks(q).map(|c| c.to_vec()).collect(),
            labels: t
                .octal_labels()
                .into_iter()
                .map(|row| row.into_iter().map(|l| l.as_str().to_string()).collect())
                .collect(),
            info_bits: None,
            systematic: None,
            puncture_period: None,
            puncture1: None,
            puncture2: None,
            interleaver: None,
            declared: DeclaredValues::default(),
        }
    }

    /// Full turbo-code file. With `embed_permutation` the interleaver is
    /// stored explicitly instead of by its generation parameters.
    pub fn from_spec(spec: &CodeSpec, embed_permutation: bool) -> Self {
        let mut f = Self::from_trellis(spec.constituent());
        let il = spec.interleaver();
        let period = spec.puncture1().period();
        f.info_bits = Some(spec.info_bits());
        f.systematic = Some(spec.systematic());
        f.puncture_period = (period != spec.constituent().n()).then_some(period);
        f.puncture1 = Some(spec.puncture1().to_octal().as_str().to_string());
        f.puncture2 = Some(spec.puncture2().to_octal().as_str().to_string());
        f.interleaver = Some(InterleaverEntry {
            n: Some(il.len()),
            s: Some(il.requested_spread()),
            seed: il.seed(),
            permutation: embed_permutation.then(|| il.permutation().to_vec()),
        });
        f.declared.rate = Some(spec.rate().to_string());
        f
    }
}

/// Octal text of a row, for callers assembling files by hand.
pub fn label_text(row: u32, n: usize) -> Result<String> {
    Ok(octal_encode(row, n)?.as_str().to_string())
}
