//! Lookup-table design by permutation of a single hand-placed sub-table.
//!
//! One sub-table `M` with a prescribed number of ones and a branch-distance
//! floor is searched once. Every other state receives a row- and
//! column-permuted copy, which keeps the ones count and the multiset of
//! pairwise row distances. Permutations are redrawn until the trellis meets
//! a merge-distance floor, and the candidate with the largest effective free
//! distance wins.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{
    branch_distance, default_max_depth, effective_free_distance, merge_distance, DistanceMetric,
};
use crate::trellis::{StateSubTable, TableTrellis, TrellisTopology, MAX_WIDTH};
use crate::{Error, Result};

/// Placement counts up to this bound are searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;
/// Hill-climbing moves between random restarts.
pub const MOVES_PER_RESTART: usize = 10_000;
/// Random restarts before the hill climber gives up.
pub const MAX_RESTARTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    /// Target ones density `u1` of the parity labels, in (0, 1).
    pub target_ones_density: f64,
    /// Output bits per transition.
    pub n: usize,
    /// Branch distance must exceed this.
    pub d_b: u32,
    /// Merge distance must reach this.
    pub d_m: u32,
    pub metric: DistanceMetric,
    /// Permutation draws per candidate before giving up on `d_m`.
    pub max_merge_retries: usize,
    pub num_candidates: usize,
    pub rng_seed: u64,
    /// Count the systematic input bits in the effective free distance.
    pub systematic: bool,
    /// Free-distance search depth; `None` means four steps per state.
    pub max_depth: Option<usize>,
}

impl DesignParams {
    pub fn new(target_ones_density: f64, n: usize, metric: DistanceMetric) -> Self {
        Self {
            target_ones_density,
            n,
            d_b: 0,
            d_m: 0,
            metric,
            max_merge_retries: 1000,
            num_candidates: 1,
            rng_seed: 0,
            systematic: true,
            max_depth: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_ones_density > 0.0 && self.target_ones_density < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target ones density {} outside (0, 1)",
                self.target_ones_density
            )));
        }
        if self.n == 0 || self.n > MAX_WIDTH {
            return Err(Error::UnsupportedWidth(self.n));
        }
        if self.num_candidates == 0 {
            return Err(Error::InvalidParameter("num_candidates must be at least 1".into()));
        }
        if self.max_merge_retries == 0 {
            return Err(Error::InvalidParameter("max_merge_retries must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-candidate record of the permutation search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub index: usize,
    /// Permutation draws used, including the accepted one.
    pub draws: usize,
    pub merge_distance: u32,
    pub effective_free_distance: u32,
    /// Whether the free-distance search found a re-merging pair.
    pub merged: bool,
}

/// Everything needed to reproduce and audit a design run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTrace {
    pub rng_seed: u64,
    /// Number of sub-table searches performed; always 1.
    pub m1_invocations: usize,
    pub ones_per_subtable: usize,
    pub candidates: Vec<CandidateTrace>,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub trellis: TableTrellis,
    pub achieved_density: Ratio<u64>,
    pub branch_distance: u32,
    pub merge_distance: u32,
    pub effective_free_distance: u32,
    pub seed_trace: SeedTrace,
}

/// Ones per sub-table: `round(u1 * n * 2^k)`, halves rounding up.
pub fn target_ones(u1: f64, n: usize, k: usize) -> Result<usize> {
    if !(u1 > 0.0 && u1 < 1.0) {
        return Err(Error::InvalidParameter(format!("ones density {u1} outside (0, 1)")));
    }
    let cells = n << k;
    let ones = (u1 * cells as f64 + 0.5).floor() as usize;
    if ones == 0 || ones >= cells {
        return Err(Error::DegenerateOnesCount { ones, rows: 1 << k, width: n });
    }
    Ok(ones)
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// A sub-table with exactly `ones` ones whose branch distance exceeds `d_b`.
///
/// Exhaustive (and thus conclusive on failure) when the number of
/// placements is at most [`EXHAUSTIVE_LIMIT`]; otherwise a deterministic
/// hill climb with random restarts, whose failure only means none was found.
pub fn design_m1(
    ones: usize,
    n: usize,
    k: usize,
    d_b: u32,
    metric: DistanceMetric,
) -> Result<StateSubTable> {
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(n));
    }
    if k == 0 || k > 8 {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..=8")));
    }
    let cells = n << k;
    if ones == 0 || ones >= cells {
        return Err(Error::DegenerateOnesCount { ones, rows: 1 << k, width: n });
    }
    let rows = if binomial(cells, ones) <= EXHAUSTIVE_LIMIT {
        exhaustive_m1(ones, n, 1 << k, d_b, metric)
    } else {
        hill_climb_m1(ones, n, 1 << k, d_b, metric)
    };
    match rows {
        Some(rows) => StateSubTable::new(n, rows),
        None => Err(Error::BranchInfeasible { ones, floor: d_b }),
    }
}

fn exhaustive_m1(ones: usize, n: usize, q: usize, d_b: u32, metric: DistanceMetric) -> Option<Vec<u32>> {
    // rows of each weight, in increasing order
    let by_weight: Vec<Vec<u32>> = (0..=n)
        .map(|w| (0..1u32 << n).filter(|r| r.count_ones() as usize == w).collect())
        .collect();
    fn place(
        rows: &mut Vec<u32>,
        left: usize,
        n: usize,
        q: usize,
        d_b: u32,
        metric: DistanceMetric,
        by_weight: &[Vec<u32>],
    ) -> bool {
        let remaining_rows = q - rows.len();
        if remaining_rows == 0 {
            return left == 0;
        }
        let lo = left.saturating_sub((remaining_rows - 1) * n);
        // weights closest to an even split first
        let mut weights: Vec<usize> = (lo..=left.min(n)).collect();
        weights.sort_by_key(|&w| (w * remaining_rows).abs_diff(left));
        for w in weights {
            for &r in &by_weight[w] {
                if rows.iter().all(|&x| metric.rows(x, r) > d_b) {
                    rows.push(r);
                    if place(rows, left - w, n, q, d_b, metric, by_weight) {
                        return true;
                    }
                    rows.pop();
                }
            }
        }
        false
    }
    let mut rows = Vec::with_capacity(q);
    place(&mut rows, ones, n, q, d_b, metric, &by_weight).then_some(rows)
}

/// `(minimum pairwise distance, pairs at the minimum)`.
fn m1_score(rows: &[u32], metric: DistanceMetric) -> (u32, usize) {
    let mut best = (u32::MAX, 0);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let d = metric.rows(rows[i], rows[j]);
            if d < best.0 {
                best = (d, 1);
            } else if d == best.0 {
                best.1 += 1;
            }
        }
    }
    best
}

fn hill_climb_m1(ones: usize, n: usize, q: usize, d_b: u32, metric: DistanceMetric) -> Option<Vec<u32>> {
    let seed = (ones as u64) << 40 ^ (n as u64) << 24 ^ (q as u64) << 8 ^ d_b as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = n * q;
    let better = |a: (u32, usize), b: (u32, usize)| a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1);
    let mut cell_index: Vec<usize> = (0..cells).collect();
    let mut columns: Vec<usize> = (0..n).collect();
    for restart in 0..MAX_RESTARTS {
        // The first half keeps row weights balanced (swaps stay inside a
        // row); rows of extreme weight survive column permutation unchanged
        // and so collide across states.
        let balanced = restart < MAX_RESTARTS / 2;
        let mut rows = vec![0u32; q];
        if balanced {
            for (i, row) in rows.iter_mut().enumerate() {
                let w = ones / q + usize::from(i < ones % q);
                columns.shuffle(&mut rng);
                *row = columns[..w].iter().fold(0, |acc, &c| acc | 1 << c);
            }
            rows.shuffle(&mut rng);
        } else {
            cell_index.shuffle(&mut rng);
            for &c in &cell_index[..ones] {
                rows[c / n] |= 1 << (c % n);
            }
        }
        let mut score = m1_score(&rows, metric);
        for _ in 0..MOVES_PER_RESTART {
            if score.0 > d_b {
                return Some(rows);
            }
            let (one, zero) = if balanced {
                let r = rng.gen_range(0..q);
                let w = rows[r].count_ones() as usize;
                if w == 0 || w == n {
                    continue;
                }
                let pick = |rng: &mut ChaCha8Rng, bit: u32| loop {
                    let c = rng.gen_range(0..n);
                    if rows[r] >> c & 1 == bit {
                        break r * n + c;
                    }
                };
                (pick(&mut rng, 1), pick(&mut rng, 0))
            } else {
                let pick = |rng: &mut ChaCha8Rng, bit: u32| loop {
                    let c = rng.gen_range(0..cells);
                    if rows[c / n] >> (c % n) & 1 == bit {
                        break c;
                    }
                };
                (pick(&mut rng, 1), pick(&mut rng, 0))
            };
            rows[one / n] ^= 1 << (one % n);
            rows[zero / n] ^= 1 << (zero % n);
            let s = m1_score(&rows, metric);
            if better(s, score) {
                score = s;
            } else {
                rows[one / n] ^= 1 << (one % n);
                rows[zero / n] ^= 1 << (zero % n);
            }
        }
        if score.0 > d_b {
            return Some(rows);
        }
    }
    None
}

/// `M' = P1 M P2`: row `i` of the result is row `row_perm[i]` of `m`, and
/// column `j` is column `col_perm[j]`.
pub fn permute_subtable(m: &StateSubTable, row_perm: &[usize], col_perm: &[usize]) -> Result<StateSubTable> {
    let n = m.width();
    if row_perm.len() != m.num_rows() {
        return Err(Error::LengthMismatch { expected: m.num_rows(), actual: row_perm.len() });
    }
    if col_perm.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: col_perm.len() });
    }
    check_permutation(row_perm)?;
    check_permutation(col_perm)?;
    let rows = row_perm
        .iter()
        .map(|&i| {
            let src = m.rows()[i];
            col_perm.iter().enumerate().fold(0u32, |acc, (j, &c)| {
                acc | (((src >> (n - 1 - c)) & 1) << (n - 1 - j))
            })
        })
        .collect();
    StateSubTable::new(n, rows)
}

fn check_permutation(p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidParameter(format!("{p:?} is not a permutation")));
        }
    }
    Ok(())
}

/// RNG keyed by every coordinate of a draw, so that results do not depend
/// on the order in which candidates or states are processed.
fn keyed_rng(seed: u64, candidate: usize, retry: usize, state: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(candidate as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(retry as u64).to_le_bytes());
    key[24..].copy_from_slice(&(state as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn draw_trellis(
    m1: &StateSubTable,
    topology: &TrellisTopology,
    seed: u64,
    candidate: usize,
    retry: usize,
) -> Result<TableTrellis> {
    let (q, n) = (m1.num_rows(), m1.width());
    let mut subtables = Vec::with_capacity(topology.num_states());
    subtables.push(m1.clone());
    for state in 1..topology.num_states() {
        let mut rng = keyed_rng(seed, candidate, retry, state);
        let mut rp: Vec<usize> = (0..q).collect();
        let mut cp: Vec<usize> = (0..n).collect();
        rp.shuffle(&mut rng);
        cp.shuffle(&mut rng);
        subtables.push(permute_subtable(m1, &rp, &cp)?);
    }
    TableTrellis::new(topology.clone(), subtables)
}

fn design_candidate(
    params: &DesignParams,
    topology: &TrellisTopology,
    m1: &StateSubTable,
    index: usize,
) -> Result<(TableTrellis, CandidateTrace)> {
    let depth = params.max_depth.unwrap_or_else(|| default_max_depth(topology.num_states()));
    let sys_k = if params.systematic { topology.k() } else { 0 };
    for retry in 0..params.max_merge_retries {
        let t = draw_trellis(m1, topology, params.rng_seed, index, retry)?;
        let merge = merge_distance(&t, params.metric).merge_distance;
        if merge >= params.d_m {
            let free = effective_free_distance(&t, params.metric, sys_k, depth)?;
            let trace = CandidateTrace {
                index,
                draws: retry + 1,
                merge_distance: merge,
                effective_free_distance: free.distance,
                merged: free.merged,
            };
            return Ok((t, trace));
        }
    }
    Err(Error::MergeRetriesExhausted { floor: params.d_m, retries: params.max_merge_retries })
}

/// Runs the full scheme on `topology`.
pub fn design_trellis(params: &DesignParams, topology: &TrellisTopology) -> Result<DesignResult> {
    params.validate()?;
    let (k, n) = (topology.k(), params.n);
    let ones = target_ones(params.target_ones_density, n, k)?;
    let m1 = design_m1(ones, n, k, params.d_b, params.metric)?;
    let m1_invocations = 1;
    let results: Vec<Result<(TableTrellis, CandidateTrace)>> = (0..params.num_candidates)
        .into_par_iter()
        .map(|i| design_candidate(params, topology, &m1, i))
        .collect();
    let mut accepted = Vec::with_capacity(results.len());
    for r in results {
        accepted.push(r?);
    }
    // largest free distance, then largest merge distance, then lowest index
    let selected = (0..accepted.len())
        .max_by(|&a, &b| {
            let (ta, tb) = (&accepted[a].1, &accepted[b].1);
            (ta.effective_free_distance, ta.merge_distance)
                .cmp(&(tb.effective_free_distance, tb.merge_distance))
                .then(b.cmp(&a))
        })
        .expect("at least one candidate");
    let candidates: Vec<CandidateTrace> = accepted.iter().map(|(_, c)| c.clone()).collect();
    let (trellis, best) = accepted.swap_remove(selected);
    Ok(DesignResult {
        branch_distance: branch_distance(&m1, params.metric),
        merge_distance: best.merge_distance,
        effective_free_distance: best.effective_free_distance,
        achieved_density: Ratio::new(ones as u64, (n << k) as u64),
        trellis,
        seed_trace: SeedTrace {
            rng_seed: params.rng_seed,
            m1_invocations,
            ones_per_subtable: ones,
            candidates,
            selected,
        },
    })
}
