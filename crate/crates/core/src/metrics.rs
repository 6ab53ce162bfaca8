//! Hamming, directional and Z distances, and the branch/merge/free-distance
//! audits built on them.

use serde::{Deserialize, Serialize};

use crate::trellis::{StateSubTable, TableTrellis};
use crate::{Error, Result};

/// Pairwise distance used for design and audits.
///
/// For two outputs `X` and `Y` let `a = d_D(X, Y)` and `b = d_D(Y, X)`.
/// `Hamming` is `a + b`, `Z` is `max(a, b)` and `Directional` is `min(a, b)`,
/// the smaller of the two directional distances, so every metric is
/// symmetric in its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Hamming,
    Directional,
    Z,
}

impl DistanceMetric {
    /// Combines the two directional distances of a pair.
    #[inline]
    pub fn combine(self, a: u32, b: u32) -> u32 {
        match self {
            DistanceMetric::Hamming => a + b,
            DistanceMetric::Directional => a.min(b),
            DistanceMetric::Z => a.max(b),
        }
    }

    #[inline]
    pub fn rows(self, x: u32, y: u32) -> u32 {
        let (a, b) = directional_rows(x, y);
        self.combine(a, b)
    }

    pub fn name(self) -> &'static str {
        match self {
            DistanceMetric::Hamming => "hamming",
            DistanceMetric::Directional => "directional",
            DistanceMetric::Z => "z",
        }
    }
}

impl std::str::FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(Self::Hamming),
            "directional" => Ok(Self::Directional),
            "z" => Ok(Self::Z),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `(d_D(x, y), d_D(y, x))` for packed rows.
#[inline]
pub fn directional_rows(x: u32, y: u32) -> (u32, u32) {
    ((!x & y).count_ones(), (x & !y).count_ones())
}

fn check_len(x: &[u8], y: &[u8]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    Ok(())
}

/// Number of positions where `x` holds 0 and `y` holds 1.
pub fn directional_distance(x: &[u8], y: &[u8]) -> Result<u32> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).filter(|&(&a, &b)| a == 0 && b != 0).count() as u32)
}

pub fn z_distance(x: &[u8], y: &[u8]) -> Result<u32> {
    Ok(directional_distance(x, y)?.max(directional_distance(y, x)?))
}

pub fn hamming_distance(x: &[u8], y: &[u8]) -> Result<u32> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count() as u32)
}

/// Minimum distance over unordered row pairs of a sub-table.
pub fn branch_distance(m: &StateSubTable, metric: DistanceMetric) -> u32 {
    min_pairwise(m.rows(), metric)
}

/// Sorted list of distances over all unordered row pairs.
pub fn pairwise_distances(m: &StateSubTable, metric: DistanceMetric) -> Vec<u32> {
    let rows = m.rows();
    let mut out = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            out.push(metric.rows(rows[i], rows[j]));
        }
    }
    out.sort_unstable();
    out
}

fn min_pairwise(rows: &[u32], metric: DistanceMetric) -> u32 {
    let mut best = u32::MAX;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            best = best.min(metric.rows(rows[i], rows[j]));
        }
    }
    best
}

/// Per-state and trellis-wide branch and merge distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub metric: DistanceMetric,
    pub branch_distance: u32,
    pub merge_distance: u32,
    pub per_state_branch: Vec<u32>,
    pub per_state_merge: Vec<u32>,
}

/// Merge distance of each state: the minimum distance among labels of the
/// transitions entering it. Also fills in the branch distances.
pub fn merge_distance(t: &TableTrellis, metric: DistanceMetric) -> DistanceReport {
    let ns = t.num_states();
    let q = t.topology().num_inputs();
    let mut incoming: Vec<Vec<u32>> = vec![Vec::with_capacity(q); ns];
    for s in 0..ns {
        for u in 0..q {
            let (next, label) = t.step(s, u);
            incoming[next].push(label);
        }
    }
    let per_state_merge: Vec<u32> = incoming.iter().map(|l| min_pairwise(l, metric)).collect();
    let per_state_branch: Vec<u32> =
        t.subtables().iter().map(|m| branch_distance(m, metric)).collect();
    DistanceReport {
        metric,
        branch_distance: per_state_branch.iter().copied().min().unwrap_or(0),
        merge_distance: per_state_merge.iter().copied().min().unwrap_or(0),
        per_state_branch,
        per_state_merge,
    }
}

/// Result of the diverge/re-merge search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeDistance {
    /// Minimum over merged path pairs, or the smallest accumulated distance
    /// of any surviving pair when nothing merged.
    pub distance: u32,
    pub merged: bool,
    /// Path length of the first pair attaining `distance` (0 when unmerged).
    pub depth: usize,
}

/// Default search depth for a trellis with `num_states` states.
pub fn default_max_depth(num_states: usize) -> usize {
    4 * num_states
}

/// Inserts `(a, b)` into a Pareto frontier of directional-sum pairs.
/// Returns false when an existing entry already dominates it.
fn pareto_insert(front: &mut Vec<(u32, u32)>, a: u32, b: u32) -> bool {
    if front.iter().any(|&(x, y)| x <= a && y <= b) {
        return false;
    }
    front.retain(|&(x, y)| !(a <= x && b <= y));
    front.push((a, b));
    true
}

/// Minimum accumulated distance between two paths that leave a common state
/// with different inputs and first re-merge within `max_depth` steps.
///
/// Each step adds the distance between the two output labels and, when
/// `systematic_k > 0`, between the two `k`-bit input symbols. Directional
/// sums are accumulated separately and combined by the metric only at the
/// merge, so for the Z metric the result is `max(sum d_D(X,Y), sum d_D(Y,X))`
/// over whole paths. The search runs over the `l^2` pair-state trellis and
/// keeps a Pareto frontier of `(sum a, sum b)` per pair state.
pub fn effective_free_distance(
    t: &TableTrellis,
    metric: DistanceMetric,
    systematic_k: usize,
    max_depth: usize,
) -> Result<FreeDistance> {
    if max_depth < 2 {
        return Err(Error::InvalidParameter(format!("max_depth {max_depth} < 2")));
    }
    let ns = t.num_states();
    let q = t.topology().num_inputs();
    let sys = systematic_k > 0;
    // Hamming only needs the scalar sum.
    let collapse = metric == DistanceMetric::Hamming;
    let step_cost = |s: usize, u: usize, s2: usize, u2: usize| -> (u32, u32) {
        let (mut a, mut b) = directional_rows(t.label(s, u), t.label(s2, u2));
        if sys {
            let (sa, sb) = directional_rows(u as u32, u2 as u32);
            a += sa;
            b += sb;
        }
        if collapse {
            (a + b, 0)
        } else {
            (a, b)
        }
    };
    let value = |a: u32, b: u32| if collapse { a } else { metric.combine(a, b) };

    let mut best: Option<(u32, usize)> = None;
    let mut layer: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ns * ns];
    for s in 0..ns {
        for u in 0..q {
            for u2 in 0..q {
                if u == u2 {
                    continue;
                }
                let (a, b) = step_cost(s, u, s, u2);
                let (n1, n2) = (t.topology().next(s, u), t.topology().next(s, u2));
                if n1 == n2 {
                    let v = value(a, b);
                    if best.is_none_or(|(bv, _)| v < bv) {
                        best = Some((v, 1));
                    }
                } else {
                    pareto_insert(&mut layer[n1 * ns + n2], a, b);
                }
            }
        }
    }

    for depth in 2..=max_depth {
        let bound = best.map_or(u32::MAX, |(v, _)| v);
        let mut next_layer: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ns * ns];
        let mut any = false;
        for (pair, front) in layer.iter().enumerate() {
            if front.is_empty() {
                continue;
            }
            let (s, s2) = (pair / ns, pair % ns);
            for u in 0..q {
                let n1 = t.topology().next(s, u);
                for u2 in 0..q {
                    let n2 = t.topology().next(s2, u2);
                    let (da, db) = step_cost(s, u, s2, u2);
                    for &(a0, b0) in front {
                        let (a, b) = (a0 + da, b0 + db);
                        let v = value(a, b);
                        if v >= bound && best.is_some() {
                            continue;
                        }
                        if n1 == n2 {
                            if best.is_none_or(|(bv, _)| v < bv) {
                                best = Some((v, depth));
                            }
                        } else if pareto_insert(&mut next_layer[n1 * ns + n2], a, b) {
                            any = true;
                        }
                    }
                }
            }
        }
        layer = next_layer;
        if !any {
            break;
        }
    }

    Ok(match best {
        Some((distance, depth)) => FreeDistance { distance, merged: true, depth },
        None => {
            let distance = layer
                .iter()
                .flatten()
                .map(|&(a, b)| value(a, b))
                .min()
                .unwrap_or(0);
            FreeDistance { distance, merged: false, depth: 0 }
        }
    })
}
