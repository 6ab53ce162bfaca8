//! Channel simulators and capacity formulas.
//!
//! Z-channel orientation: a transmitted 1 is always received as 1 and a
//! transmitted 0 flips to 1 with probability `p`. The capacity-achieving
//! input therefore carries more than 50% ones.
//!
//! All rates are in bits (base-2 logarithms).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binary entropy without domain checks; `0 log 0 = 0`.
#[inline]
pub(crate) fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

fn check_prob(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::InvalidParameter(format!("{name} = {x} is not a probability")));
    }
    Ok(())
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    check_prob("x", x)?;
    Ok(h(x))
}

/// Crossover of two cascaded binary symmetric channels.
#[inline]
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

fn check_z(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Z-channel crossover {p} outside [0, 1)")));
    }
    Ok(())
}

/// Capacity-achieving fraction of zeros on the Z-channel.
pub fn z_optimal_zeros_density(p: f64) -> Result<f64> {
    check_z(p)?;
    if p == 0.0 {
        return Ok(0.5);
    }
    let t = p.powf(p / (1.0 - p));
    Ok(t / (1.0 + (1.0 - p) * t))
}

pub fn z_optimal_ones_density(p: f64) -> Result<f64> {
    Ok(1.0 - z_optimal_zeros_density(p)?)
}

/// Closed-form Z-channel capacity at the optimal zeros density.
pub fn z_capacity(p: f64) -> Result<f64> {
    let u0 = z_optimal_zeros_density(p)?;
    Ok(h(u0 * (1.0 - p)) - u0 * h(p))
}

/// `I(X; Y)` on the Z-channel for an input with the given ones density.
pub fn z_mutual_information(p: f64, ones_density: f64) -> f64 {
    let zeros = 1.0 - ones_density;
    h(zeros * (1.0 - p)) - zeros * h(p)
}

/// Input-agnostic BSC capacity `1 - h(q)`.
pub fn bsc_capacity(q: f64) -> f64 {
    1.0 - h(q)
}

/// `I(X; Y)` on a BSC for an input with the given ones density.
pub fn bsc_mutual_information(q: f64, ones_density: f64) -> f64 {
    h(star(q, ones_density)) - h(q)
}

/// Smallest Z-channel crossover at which the capacity falls to `rate`.
///
/// Used to place simulation operating points at a fixed gap to capacity.
pub fn z_crossover_for_capacity(capacity: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&capacity) || capacity == 0.0 {
        return Err(Error::InvalidParameter(format!("capacity {capacity} outside (0, 1)")));
    }
    // z_capacity is decreasing in p
    bisect(0.0, 1.0 - 1e-12, 1e-14, |p| z_capacity(p).unwrap() > capacity)
}

/// Bisection on a predicate that is true on `[lo, x*)` and false above.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, below: impl Fn(f64) -> bool) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A point on (or inside) the broadcast BSC rate region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    /// Ones density of user 1's codeword.
    pub p1: f64,
}

fn check_bbsc(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0 <= alpha && alpha < beta && beta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "broadcast BSC needs 0 <= alpha < beta < 0.5, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(())
}

/// User 1 boundary rate `h(alpha * p1) - h(alpha)`.
pub fn bbsc_f1(alpha: f64, p1: f64) -> f64 {
    h(star(alpha, p1)) - h(alpha)
}

/// User 2 boundary rate `1 - h(beta * p1)`.
pub fn bbsc_f2(beta: f64, p1: f64) -> f64 {
    1.0 - h(star(beta, p1))
}

/// Boundary point of the superposition region for user-1 density `p1`.
pub fn bbsc_region(alpha: f64, beta: f64, p1: f64) -> Result<RatePoint> {
    check_bbsc(alpha, beta)?;
    if !(0.0..=0.5).contains(&p1) {
        return Err(Error::InvalidParameter(format!("p1 = {p1} outside [0, 0.5]")));
    }
    Ok(RatePoint { r1: bbsc_f1(alpha, p1), r2: bbsc_f2(beta, p1), p1 })
}

/// Admissible user-1 densities for a rate pair, and the one selected.
///
/// `(r1, r2)` is achievable with density `p1` when `f1(p1) >= r1` and
/// `f2(p1) >= r2`. Since `f1` increases and `f2` decreases, the admissible
/// densities form the interval `(f1^{-1}(r1), f2^{-1}(r2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P1Selection {
    /// `f1^{-1}(r1)`: user 1 fails below this density.
    pub lower: f64,
    /// `f2^{-1}(r2)`: user 2 fails above this density.
    pub upper: f64,
    /// Interval midpoint.
    pub p1: f64,
}

/// Inverse of `f1` on `[0, 0.5]`.
pub fn bbsc_f1_inverse(alpha: f64, r1: f64) -> Result<f64> {
    let max = bbsc_f1(alpha, 0.5);
    if !(0.0..=max).contains(&r1) {
        return Err(Error::InvalidParameter(format!("R1 = {r1} outside [0, {max}]")));
    }
    bisect(0.0, 0.5, 1e-13, |p| bbsc_f1(alpha, p) < r1)
}

/// Inverse of `f2` on `[0, 0.5]`.
pub fn bbsc_f2_inverse(beta: f64, r2: f64) -> Result<f64> {
    let max = bbsc_f2(beta, 0.0);
    if !(0.0..=max).contains(&r2) {
        return Err(Error::InvalidParameter(format!("R2 = {r2} outside [0, {max}]")));
    }
    bisect(0.0, 0.5, 1e-13, |p| bbsc_f2(beta, p) > r2)
}

/// Picks the user-1 density for a rate pair strictly inside the region.
///
/// Pairs on an axis (`r1 = 0` or `r2 = 0`) are rejected as not interior.
pub fn pick_p1(alpha: f64, beta: f64, r1: f64, r2: f64) -> Result<P1Selection> {
    check_bbsc(alpha, beta)?;
    let outside = || Error::OutsideRegion { r1, r2 };
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(outside());
    }
    let lower = bbsc_f1_inverse(alpha, r1).map_err(|_| outside())?;
    let upper = bbsc_f2_inverse(beta, r2).map_err(|_| outside())?;
    if lower >= upper {
        return Err(outside());
    }
    Ok(P1Selection { lower, upper, p1: 0.5 * (lower + upper) })
}

/// Horizontal and vertical distances from an interior `(r1, r2)` to the
/// region boundary.
pub fn bbsc_margins(alpha: f64, beta: f64, r1: f64, r2: f64) -> Result<(f64, f64)> {
    let sel = pick_p1(alpha, beta, r1, r2)?;
    Ok((bbsc_f1(alpha, sel.upper) - r1, bbsc_f2(beta, sel.lower) - r2))
}

/// Binary-input channel models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelModel {
    /// 0 -> 1 with probability `p`, 1 -> 1 always.
    Z { p: f64 },
    Bsc { q: f64 },
    /// Common input observed through BSC(alpha) and BSC(beta).
    Bbsc { alpha: f64, beta: f64 },
}

/// Channel outputs, one sequence per receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Received {
    Single(Vec<u8>),
    Pair(Vec<u8>, Vec<u8>),
}

impl ChannelModel {
    pub fn z(p: f64) -> Result<Self> {
        let c = ChannelModel::Z { p };
        c.validate()?;
        Ok(c)
    }

    pub fn bsc(q: f64) -> Result<Self> {
        let c = ChannelModel::Bsc { q };
        c.validate()?;
        Ok(c)
    }

    pub fn bbsc(alpha: f64, beta: f64) -> Result<Self> {
        let c = ChannelModel::Bbsc { alpha, beta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Z { p } => check_z(p),
            ChannelModel::Bsc { q } => {
                if !(0.0..1.0).contains(&q) {
                    return Err(Error::InvalidParameter(format!("BSC crossover {q} outside [0, 1)")));
                }
                Ok(())
            }
            ChannelModel::Bbsc { alpha, beta } => check_bbsc(alpha, beta),
        }
    }

    /// Point-to-point capacity; `None` for the broadcast channel.
    pub fn capacity(&self) -> Option<f64> {
        match *self {
            ChannelModel::Z { p } => z_capacity(p).ok(),
            ChannelModel::Bsc { q } => Some(bsc_capacity(q)),
            ChannelModel::Bbsc { .. } => None,
        }
    }

    pub fn transmit<R: Rng + ?Sized>(&self, codeword: &[u8], rng: &mut R) -> Received {
        match *self {
            ChannelModel::Z { p } => Received::Single(z_transmit(p, codeword, rng)),
            ChannelModel::Bsc { q } => Received::Single(bsc_transmit(q, codeword, rng)),
            ChannelModel::Bbsc { alpha, beta } => {
                let y1 = bsc_transmit(alpha, codeword, rng);
                let y2 = bsc_transmit(beta, codeword, rng);
                Received::Pair(y1, y2)
            }
        }
    }
}

impl Received {
    pub fn into_single(self) -> Option<Vec<u8>> {
        match self {
            Received::Single(y) => Some(y),
            Received::Pair(..) => None,
        }
    }

    pub fn into_pair(self) -> Option<(Vec<u8>, Vec<u8>)> {
        match self {
            Received::Pair(a, b) => Some((a, b)),
            Received::Single(_) => None,
        }
    }
}

/// Z-channel: each 0 becomes 1 with probability `p`.
pub fn z_transmit<R: Rng + ?Sized>(p: f64, codeword: &[u8], rng: &mut R) -> Vec<u8> {
    codeword
        .iter()
        .map(|&x| if x != 0 || (p > 0.0 && rng.gen::<f64>() < p) { 1 } else { 0 })
        .collect()
}

pub fn bsc_transmit<R: Rng + ?Sized>(q: f64, codeword: &[u8], rng: &mut R) -> Vec<u8> {
    codeword
        .iter()
        .map(|&x| {
            let flip = q > 0.0 && rng.gen::<f64>() < q;
            (x & 1) ^ u8::from(flip)
        })
        .collect()
}
