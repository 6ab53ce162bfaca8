//! Table-driven trellises for nonlinear constituent encoders.
//!
//! A constituent code is nothing more than two tables: a next-state map
//! `(state, input symbol) -> state` and an output label per transition. Labels
//! are `n`-bit rows stored MSB-first in a `u32`: output bit `j` (0-based, in
//! transmission order) is bit `n - 1 - j` of the word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported label width.
pub const MAX_WIDTH: usize = 32;

/// Returns output bit `j` (transmission order) of an `n`-bit row.
#[inline]
pub fn row_bit(row: u32, n: usize, j: usize) -> u8 {
    ((row >> (n - 1 - j)) & 1) as u8
}

/// Packs bits (first bit most significant) into a row.
pub fn bits_to_row(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1))
}

/// Unpacks an `n`-bit row into bits, first transmitted bit first.
pub fn row_to_bits(row: u32, n: usize) -> Vec<u8> {
    (0..n).map(|j| row_bit(row, n, j)).collect()
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(n));
    }
    Ok(())
}

#[inline]
fn width_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Octal text form of an output row, most significant digit first.
///
/// A width that is not a multiple of three leaves the high bits of the
/// leading digit at zero, so `n = 10` uses four digits and the first one is
/// 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OctalLabel(String);

impl OctalLabel {
    pub fn new(digits: impl Into<String>) -> Result<Self> {
        let digits = digits.into();
        if let Some(digit) = digits.chars().find(|c| !('0'..='7').contains(c)) {
            return Err(Error::InvalidOctalDigit { label: digits, digit });
        }
        Ok(Self(digits))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of octal digits used for an `n`-bit row.
    pub fn digits_for(n: usize) -> usize {
        n.div_ceil(3)
    }
}

impl fmt::Display for OctalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for OctalLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

/// Decodes an octal label into an `n`-bit row.
pub fn octal_decode(label: &OctalLabel, n: usize) -> Result<u32> {
    check_width(n)?;
    let digits = label.as_str();
    if digits.len() != OctalLabel::digits_for(n) {
        return Err(Error::LabelWidthMismatch { label: digits.to_owned(), width: n });
    }
    let mut value: u64 = 0;
    for c in digits.chars() {
        let d = c
            .to_digit(8)
            .ok_or_else(|| Error::InvalidOctalDigit { label: digits.to_owned(), digit: c })?;
        value = (value << 3) | u64::from(d);
    }
    if value >> n != 0 {
        return Err(Error::LabelWidthMismatch { label: digits.to_owned(), width: n });
    }
    Ok(value as u32)
}

/// Encodes an `n`-bit row as an octal label.
pub fn octal_encode(row: u32, n: usize) -> Result<OctalLabel> {
    check_width(n)?;
    if row & !width_mask(n) != 0 {
        return Err(Error::InvalidParameter(format!("row {row:#o} wider than {n} bits")));
    }
    let digits = OctalLabel::digits_for(n);
    Ok(OctalLabel(format!("{row:0digits$o}")))
}

/// Next-state structure of a trellis, independent of its output labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisTopology {
    num_states: usize,
    k: usize,
    /// `next_state[s * 2^k + u]`
    next_state: Vec<u32>,
}

impl TrellisTopology {
    /// Builds a topology from a flat `(state, input)` table.
    ///
    /// Rejects tables whose states do not all have in-degree `2^k`.
    pub fn new(num_states: usize, k: usize, next_state: Vec<u32>) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidTopology("zero states".into()));
        }
        if k == 0 || k > 8 {
            return Err(Error::InvalidTopology(format!("unsupported input width k={k}")));
        }
        let q = 1usize << k;
        if next_state.len() != num_states * q {
            return Err(Error::InvalidTopology(format!(
                "next-state table has {} entries, expected {}",
                next_state.len(),
                num_states * q
            )));
        }
        let mut in_degree = vec![0usize; num_states];
        for (idx, &t) in next_state.iter().enumerate() {
            let t = t as usize;
            if t >= num_states {
                return Err(Error::InvalidTopology(format!(
                    "transition {} -> {} leaves the state range",
                    idx / q,
                    t
                )));
            }
            in_degree[t] += 1;
        }
        if let Some((s, &d)) = in_degree.iter().enumerate().find(|(_, &d)| d != q) {
            return Err(Error::InvalidTopology(format!(
                "state {s} has in-degree {d}, expected {q}"
            )));
        }
        Ok(Self { num_states, k, next_state })
    }

    pub fn from_fn(num_states: usize, k: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let q = 1usize << k;
        let table = (0..num_states)
            .flat_map(|s| (0..q).map(move |u| (s, u)))
            .map(|(s, u)| f(s, u) as u32)
            .collect();
        Self::new(num_states, k, table)
    }

    /// Default 16-state duo-binary recursive topology.
    ///
    /// State `s1 s2 s3 s4` (s1 most significant) and input `A B` (A most
    /// significant) update as a feedback shift register with connection
    /// polynomial 1 + D^3 + D^4:
    ///
    /// ```text
    /// s1' = A ^ B ^ s3 ^ s4
    /// s2' = s1 ^ B
    /// s3' = s2
    /// s4' = s3 ^ B
    /// ```
    pub fn duo_binary_16() -> Self {
        Self::from_fn(16, 2, |s, u| {
            let (s1, s2, s3, s4) = ((s >> 3) & 1, (s >> 2) & 1, (s >> 1) & 1, s & 1);
            let (a, b) = ((u >> 1) & 1, u & 1);
            let n1 = a ^ b ^ s3 ^ s4;
            let n2 = s1 ^ b;
            let n3 = s2;
            let n4 = s3 ^ b;
            (n1 << 3) | (n2 << 2) | (n3 << 1) | n4
        })
        .expect("default topology is well formed")
    }

    /// Two-state binary accumulator: `s' = s ^ u`.
    pub fn accumulator() -> Self {
        Self::from_fn(2, 1, |s, u| s ^ u).expect("accumulator is well formed")
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Input bits per trellis step.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of input symbols, `2^k`.
    pub fn num_inputs(&self) -> usize {
        1 << self.k
    }

    #[inline]
    pub fn next(&self, state: usize, input: usize) -> usize {
        self.next_state[(state << self.k) | input] as usize
    }

    pub fn next_state_table(&self) -> &[u32] {
        &self.next_state
    }

    /// Transitions `(from_state, input)` that enter `state`.
    pub fn incoming(&self, state: usize) -> Vec<(usize, usize)> {
        let q = self.num_inputs();
        (0..self.num_states * q)
            .filter(|&idx| self.next_state[idx] as usize == state)
            .map(|idx| (idx / q, idx % q))
            .collect()
    }
}

/// The `2^k x n` binary matrix of outputs leaving one state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSubTable {
    n: usize,
    rows: Vec<u32>,
}

impl StateSubTable {
    pub fn new(n: usize, rows: Vec<u32>) -> Result<Self> {
        check_width(n)?;
        if rows.is_empty() || !rows.len().is_power_of_two() {
            return Err(Error::InvalidTrellis(format!(
                "sub-table needs 2^k rows, got {}",
                rows.len()
            )));
        }
        if let Some(r) = rows.iter().find(|&&r| r & !width_mask(n) != 0) {
            return Err(Error::InvalidTrellis(format!("row {r:#o} wider than {n} bits")));
        }
        Ok(Self { n, rows })
    }

    pub fn zeros(n: usize, num_rows: usize) -> Result<Self> {
        Self::new(n, vec![0; num_rows])
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }
}

/// A complete constituent encoder: topology plus one sub-table per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableTrellis {
    topology: TrellisTopology,
    n: usize,
    subtables: Vec<StateSubTable>,
}

impl TableTrellis {
    pub fn new(topology: TrellisTopology, subtables: Vec<StateSubTable>) -> Result<Self> {
        if subtables.len() != topology.num_states() {
            return Err(Error::InvalidTrellis(format!(
                "{} sub-tables for {} states",
                subtables.len(),
                topology.num_states()
            )));
        }
        let n = subtables[0].width();
        for (s, m) in subtables.iter().enumerate() {
            if m.width() != n {
                return Err(Error::InvalidTrellis(format!(
                    "state {s} has width {}, expected {n}",
                    m.width()
                )));
            }
            if m.num_rows() != topology.num_inputs() {
                return Err(Error::InvalidTrellis(format!(
                    "state {s} has {} rows, expected {}",
                    m.num_rows(),
                    topology.num_inputs()
                )));
            }
        }
        Ok(Self { topology, n, subtables })
    }

    /// Builds a trellis from a flat `(state, input)` label table.
    pub fn from_labels(topology: TrellisTopology, n: usize, labels: &[u32]) -> Result<Self> {
        let q = topology.num_inputs();
        if labels.len() != topology.num_states() * q {
            return Err(Error::LengthMismatch {
                expected: topology.num_states() * q,
                actual: labels.len(),
            });
        }
        let subtables = labels
            .chunks(q)
            .map(|rows| StateSubTable::new(n, rows.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(topology, subtables)
    }

    pub fn topology(&self) -> &TrellisTopology {
        &self.topology
    }

    pub fn num_states(&self) -> usize {
        self.topology.num_states()
    }

    pub fn k(&self) -> usize {
        self.topology.k()
    }

    /// Output bits per transition.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subtables(&self) -> &[StateSubTable] {
        &self.subtables
    }

    pub fn subtable(&self, state: usize) -> &StateSubTable {
        &self.subtables[state]
    }

    #[inline]
    pub fn label(&self, state: usize, input: usize) -> u32 {
        self.subtables[state].rows[input]
    }

    /// One encoder step: `(next state, output row)`.
    #[inline]
    pub fn step(&self, state: usize, input: usize) -> (usize, u32) {
        (self.topology.next(state, input), self.label(state, input))
    }

    /// Runs the encoder over a symbol sequence from `start`, returning the
    /// output rows and the final state.
    pub fn encode_symbols(&self, start: usize, symbols: &[usize]) -> (Vec<u32>, usize) {
        let mut state = start;
        let rows = symbols
            .iter()
            .map(|&u| {
                let (next, row) = self.step(state, u);
                state = next;
                row
            })
            .collect();
        (rows, state)
    }

    pub fn total_ones(&self) -> usize {
        self.subtables.iter().map(StateSubTable::ones).sum()
    }

    /// Fraction of ones over every label bit in the table.
    pub fn ones_density(&self) -> f64 {
        let bits = self.num_states() * self.topology.num_inputs() * self.n;
        self.total_ones() as f64 / bits as f64
    }

    /// Per-output-position ones counts over all transitions.
    pub fn column_ones(&self) -> Vec<usize> {
        let mut cols = vec![0usize; self.n];
        for m in &self.subtables {
            for &row in m.rows() {
                for (j, c) in cols.iter_mut().enumerate() {
                    *c += row_bit(row, self.n, j) as usize;
                }
            }
        }
        cols
    }

    /// Labels as octal text, one `Vec` per state.
    pub fn octal_labels(&self) -> Vec<Vec<OctalLabel>> {
        self.subtables
            .iter()
            .map(|m| {
                m.rows()
                    .iter()
                    .map(|&r| octal_encode(r, self.n).expect("row fits width"))
                    .collect()
            })
            .collect()
    }
}

/// Parity labels of the reference constituent code, state-major with
/// inputs 00, 01, 10, 11.
pub const REFERENCE_LABELS: [[&str; 4]; 16] = [
    ["534", "343", "671", "517"],
    ["476", "073", "707", "364"],
    ["346", "257", "571", "632"],
    ["137", "752", "711", "265"],
    ["754", "566", "227", "171"],
    ["370", "467", "516", "335"],
    ["743", "574", "037", "626"],
    ["566", "273", "532", "615"],
    ["465", "457", "343", "334"],
    ["752", "665", "037", "370"],
    ["274", "563", "754", "307"],
    ["723", "354", "617", "465"],
    ["435", "643", "317", "564"],
    ["153", "666", "703", "334"],
    ["327", "176", "453", "664"],
    ["466", "153", "335", "761"],
];

/// Ones in the 64 reference labels.
pub const REFERENCE_ONES: usize = 349;

/// The published 16-state, 9-parity-bit constituent code on the default
/// duo-binary topology.
pub fn reference_trellis() -> TableTrellis {
    reference_trellis_on(TrellisTopology::duo_binary_16()).expect("reference labels fit a 16-state k=2 topology")
}

/// Reference labels paired with a caller-supplied 16-state, `k = 2` topology.
pub fn reference_trellis_on(topology: TrellisTopology) -> Result<TableTrellis> {
    let labels = REFERENCE_LABELS
        .iter()
        .flatten()
        .map(|d| octal_decode(&OctalLabel::new(*d)?, 9))
        .collect::<Result<Vec<_>>>()?;
    TableTrellis::from_labels(topology, 9, &labels)
}
