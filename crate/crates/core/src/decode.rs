//! Channel LLRs and symbol-wise iterative MAP decoding over table trellises.
//!
//! Conventions:
//! - a bit LLR is `ln P(y | x = 0) - ln P(y | x = 1)`;
//! - symbol metrics are flat `steps x 2^k` buffers of natural logarithms,
//!   defined up to an additive constant per step;
//! - each constituent starts in state 0 and ends in an unknown state
//!   (uniform final-state prior).

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::trellis::{row_bit, TableTrellis};
use crate::turbo::CodeSpec;
use crate::{Error, Result};

/// Soft-output decoding rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Exact symbol MAP.
    LogMap,
    /// Max-log approximation (sum replaced by max in the log domain).
    MaxLogMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub algorithm: Algorithm,
    /// Magnitude substituted for infinite channel LLRs.
    pub llr_cap: f64,
    /// Stop once a full iteration leaves every hard decision unchanged.
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { max_iterations: 10, algorithm: Algorithm::LogMap, llr_cap: 30.0, early_stop: true }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if !(self.llr_cap.is_finite() && self.llr_cap > 0.0) {
            return Err(Error::InvalidParameter(format!("llr_cap {} must be finite and positive", self.llr_cap)));
        }
        Ok(())
    }
}

/// Log-likelihood ratio of a BSC observation.
#[inline]
pub fn bsc_llr(q: f64, y: u8, cap: f64) -> f64 {
    let mag = if q <= 0.0 { cap } else { ((1.0 - q) / q).ln().min(cap) };
    if y == 0 {
        mag
    } else {
        -mag
    }
}

/// Log-likelihood ratio of a Z-channel observation (0 -> 1 with probability
/// `p`, 1 -> 0 never).
#[inline]
pub fn z_llr(p: f64, y: u8, cap: f64) -> f64 {
    if y == 0 {
        cap
    } else if p <= 0.0 {
        -cap
    } else {
        p.ln().max(-cap)
    }
}

/// Per-bit LLRs of a received point-to-point sequence.
pub fn channel_llr(channel: &ChannelModel, received: &[u8], cap: f64) -> Result<Vec<f64>> {
    channel.validate()?;
    match *channel {
        ChannelModel::Z { p } => Ok(received.iter().map(|&y| z_llr(p, y, cap)).collect()),
        ChannelModel::Bsc { q } => Ok(received.iter().map(|&y| bsc_llr(q, y, cap)).collect()),
        ChannelModel::Bbsc { .. } => Err(Error::InvalidParameter(
            "broadcast channel LLRs need a per-receiver BSC model".into(),
        )),
    }
}

/// Symbol log-likelihoods contributed by systematic bit LLRs.
pub fn systematic_symbol_metrics(sys_llrs: &[f64], k: usize) -> Vec<f64> {
    let q = 1usize << k;
    let mut out = Vec::with_capacity(sys_llrs.len() / k * q);
    for chunk in sys_llrs.chunks(k) {
        for u in 0..q {
            let m: f64 = chunk
                .iter()
                .enumerate()
                .map(|(j, &l)| if (u >> (k - 1 - j)) & 1 == 0 { 0.5 * l } else { -0.5 * l })
                .sum();
            out.push(m);
        }
    }
    out
}

const CHUNK: usize = 4;
/// Floor applied to log-probabilities so that differences stay finite.
const LOG_FLOOR: f64 = -700.0;
/// Extrinsic log-ratios are clipped to this many nats below the per-step
/// maximum.
const EXTRINSIC_RANGE: f64 = 200.0;

/// Transition tables of a trellis laid out for the forward-backward pass.
#[derive(Debug, Clone)]
pub struct Siso {
    num_states: usize,
    q: usize,
    n: usize,
    next: Vec<usize>,
    /// Per transition, the label split into `CHUNK`-bit groups.
    chunks: Vec<u8>,
    num_chunks: usize,
}

impl Siso {
    pub fn new(t: &TableTrellis) -> Self {
        let (ns, q, n) = (t.num_states(), t.topology().num_inputs(), t.n());
        let num_chunks = n.div_ceil(CHUNK);
        let mut next = Vec::with_capacity(ns * q);
        let mut chunks = Vec::with_capacity(ns * q * num_chunks);
        for s in 0..ns {
            for u in 0..q {
                let (nx, label) = t.step(s, u);
                next.push(nx);
                for c in 0..num_chunks {
                    let (lo, hi) = (c * CHUNK, ((c + 1) * CHUNK).min(n));
                    let v = (lo..hi).fold(0u8, |acc, j| (acc << 1) | row_bit(label, n, j));
                    chunks.push(v);
                }
            }
        }
        Self { num_states: ns, q, n, next, chunks, num_chunks }
    }

    /// Per-step chunk tables: entry `[c * 16 + v]` is the label metric of
    /// chunk `c` taking value `v`, in the log domain (`prob = false`) or as a
    /// likelihood scaled so the largest entry is 1.
    fn chunk_tables(&self, llrs: &[f64], prob: bool, out: &mut [f64]) {
        for c in 0..self.num_chunks {
            let (lo, hi) = (c * CHUNK, ((c + 1) * CHUNK).min(self.n));
            let width = hi - lo;
            for v in 0..(1usize << width) {
                let mut m = 0.0;
                for (b, &l) in llrs[lo..hi].iter().enumerate() {
                    let bit = (v >> (width - 1 - b)) & 1;
                    // scaled so the more likely bit value scores 0
                    m += if bit == 0 { 0.5 * l - 0.5 * l.abs() } else { -0.5 * l - 0.5 * l.abs() };
                }
                out[c * 16 + v] = if prob { m.exp() } else { m };
            }
        }
    }

    /// Forward-backward pass. `sym` holds combined a-priori plus systematic
    /// symbol metrics (log domain); `llrs` holds `n` parity LLRs per step.
    /// Returns normalized log-posteriors per step and symbol.
    pub fn posteriors(&self, sym: &[f64], llrs: &[f64], algorithm: Algorithm) -> Vec<f64> {
        match algorithm {
            Algorithm::LogMap => self.forward_backward_prob(sym, llrs),
            Algorithm::MaxLogMap => self.forward_backward_maxlog(sym, llrs),
        }
    }

    fn gammas(&self, sym: &[f64], llrs: &[f64], prob: bool) -> Vec<f64> {
        let steps = sym.len() / self.q;
        let tr = self.num_states * self.q;
        let mut gamma = vec![0.0; steps * tr];
        let mut tables = vec![0.0; self.num_chunks * 16];
        let mut sym_w = vec![0.0; self.q];
        for t in 0..steps {
            self.chunk_tables(&llrs[t * self.n..(t + 1) * self.n], prob, &mut tables);
            let srow = &sym[t * self.q..(t + 1) * self.q];
            let smax = srow.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (w, &v) in sym_w.iter_mut().zip(srow) {
                *w = if prob { (v - smax).exp() } else { v - smax };
            }
            let g = &mut gamma[t * tr..(t + 1) * tr];
            for (idx, gv) in g.iter_mut().enumerate() {
                let ch = &self.chunks[idx * self.num_chunks..(idx + 1) * self.num_chunks];
                let u = idx % self.q;
                if prob {
                    let mut v = sym_w[u];
                    for (c, &cv) in ch.iter().enumerate() {
                        v *= tables[c * 16 + cv as usize];
                    }
                    *gv = v;
                } else {
                    let mut v = sym_w[u];
                    for (c, &cv) in ch.iter().enumerate() {
                        v += tables[c * 16 + cv as usize];
                    }
                    *gv = v;
                }
            }
        }
        gamma
    }

    /// Sum-product recursion with per-step normalization (exact MAP).
    #[allow(clippy::needless_range_loop)]
    fn forward_backward_prob(&self, sym: &[f64], llrs: &[f64]) -> Vec<f64> {
        let (ns, q) = (self.num_states, self.q);
        let steps = sym.len() / q;
        let tr = ns * q;
        let gamma = self.gammas(sym, llrs, true);
        let mut alpha = vec![0.0; (steps + 1) * ns];
        alpha[0] = 1.0;
        for t in 0..steps {
            let (cur, rest) = alpha.split_at_mut((t + 1) * ns);
            let cur = &cur[t * ns..];
            let nxt = &mut rest[..ns];
            let g = &gamma[t * tr..(t + 1) * tr];
            for s in 0..ns {
                let a = cur[s];
                if a == 0.0 {
                    continue;
                }
                for u in 0..q {
                    let idx = s * q + u;
                    nxt[self.next[idx]] += a * g[idx];
                }
            }
            let sum: f64 = nxt.iter().sum();
            if sum > 0.0 {
                let inv = 1.0 / sum;
                nxt.iter_mut().for_each(|v| *v *= inv);
            } else {
                nxt.iter_mut().for_each(|v| *v = 1.0 / ns as f64);
            }
        }
        let mut beta = vec![1.0 / ns as f64; ns];
        let mut beta_prev = vec![0.0; ns];
        let mut post = vec![0.0; steps * q];
        let mut acc = vec![0.0; q];
        for t in (0..steps).rev() {
            let g = &gamma[t * tr..(t + 1) * tr];
            let a = &alpha[t * ns..(t + 1) * ns];
            acc.iter_mut().for_each(|v| *v = 0.0);
            beta_prev.iter_mut().for_each(|v| *v = 0.0);
            for s in 0..ns {
                for u in 0..q {
                    let idx = s * q + u;
                    let gb = g[idx] * beta[self.next[idx]];
                    acc[u] += a[s] * gb;
                    beta_prev[s] += gb;
                }
            }
            let total: f64 = acc.iter().sum();
            let row = &mut post[t * q..(t + 1) * q];
            for (p, &v) in row.iter_mut().zip(&acc) {
                *p = if total > 0.0 { (v / total).ln().max(LOG_FLOOR) } else { -(q as f64).ln() };
            }
            let sum: f64 = beta_prev.iter().sum();
            if sum > 0.0 {
                let inv = 1.0 / sum;
                beta_prev.iter_mut().for_each(|v| *v *= inv);
            } else {
                beta_prev.iter_mut().for_each(|v| *v = 1.0 / ns as f64);
            }
            std::mem::swap(&mut beta, &mut beta_prev);
        }
        post
    }

    #[allow(clippy::needless_range_loop)]
    fn forward_backward_maxlog(&self, sym: &[f64], llrs: &[f64]) -> Vec<f64> {
        let (ns, q) = (self.num_states, self.q);
        let steps = sym.len() / q;
        let tr = ns * q;
        let gamma = self.gammas(sym, llrs, false);
        let ninf = f64::NEG_INFINITY;
        let mut alpha = vec![ninf; (steps + 1) * ns];
        alpha[0] = 0.0;
        for t in 0..steps {
            let (cur, rest) = alpha.split_at_mut((t + 1) * ns);
            let cur = &cur[t * ns..];
            let nxt = &mut rest[..ns];
            let g = &gamma[t * tr..(t + 1) * tr];
            for s in 0..ns {
                if cur[s] == ninf {
                    continue;
                }
                for u in 0..q {
                    let idx = s * q + u;
                    let v = cur[s] + g[idx];
                    let slot = &mut nxt[self.next[idx]];
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
            let m = nxt.iter().copied().fold(ninf, f64::max);
            nxt.iter_mut().for_each(|v| *v -= m);
        }
        let mut beta = vec![0.0; ns];
        let mut beta_prev = vec![ninf; ns];
        let mut post = vec![0.0; steps * q];
        let mut acc = vec![ninf; q];
        for t in (0..steps).rev() {
            let g = &gamma[t * tr..(t + 1) * tr];
            let a = &alpha[t * ns..(t + 1) * ns];
            acc.iter_mut().for_each(|v| *v = ninf);
            beta_prev.iter_mut().for_each(|v| *v = ninf);
            for s in 0..ns {
                for u in 0..q {
                    let idx = s * q + u;
                    let gb = g[idx] + beta[self.next[idx]];
                    acc[u] = acc[u].max(a[s] + gb);
                    beta_prev[s] = beta_prev[s].max(gb);
                }
            }
            let m = acc.iter().copied().fold(ninf, f64::max);
            let row = &mut post[t * q..(t + 1) * q];
            for (p, &v) in row.iter_mut().zip(&acc) {
                *p = (v - m).max(LOG_FLOOR);
            }
            let mb = beta_prev.iter().copied().fold(ninf, f64::max);
            beta_prev.iter_mut().for_each(|v| *v -= mb);
            std::mem::swap(&mut beta, &mut beta_prev);
        }
        post
    }
}

/// Output of one soft-in soft-out pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BcjrOutput {
    /// Log posterior symbol probabilities (log-MAP: normalized to sum to 1;
    /// max-log: max-normalized to 0).
    pub posteriors: Vec<f64>,
    /// Posterior minus prior minus systematic contribution, max-normalized.
    pub extrinsic: Vec<f64>,
}

/// Symbol-wise MAP decoding of one constituent code.
///
/// `priors` holds `steps x 2^k` a-priori log-probabilities, `llrs` holds
/// `steps x n` channel LLRs of the transition labels (0 where punctured).
pub fn bcjr(
    t: &TableTrellis,
    priors: &[f64],
    llrs: &[f64],
    config: &DecoderConfig,
) -> Result<BcjrOutput> {
    bcjr_systematic(&Siso::new(t), priors, None, llrs, config.algorithm)
}

/// [`bcjr`] with optional systematic symbol metrics, which are added to the
/// branch metrics and excluded from the extrinsic output.
pub fn bcjr_systematic(
    siso: &Siso,
    priors: &[f64],
    systematic: Option<&[f64]>,
    llrs: &[f64],
    algorithm: Algorithm,
) -> Result<BcjrOutput> {
    let q = siso.q;
    if !priors.len().is_multiple_of(q) {
        return Err(Error::LengthMismatch { expected: priors.len() / q * q, actual: priors.len() });
    }
    let steps = priors.len() / q;
    if llrs.len() != steps * siso.n {
        return Err(Error::LengthMismatch { expected: steps * siso.n, actual: llrs.len() });
    }
    if let Some(s) = systematic {
        if s.len() != priors.len() {
            return Err(Error::LengthMismatch { expected: priors.len(), actual: s.len() });
        }
    }
    let sym: Vec<f64> = match systematic {
        Some(s) => priors.iter().zip(s).map(|(a, b)| a + b).collect(),
        None => priors.to_vec(),
    };
    let posteriors = siso.posteriors(&sym, llrs, algorithm);
    let mut extrinsic: Vec<f64> = posteriors.iter().zip(&sym).map(|(p, s)| p - s).collect();
    for row in extrinsic.chunks_mut(q) {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.iter_mut().for_each(|v| *v = (*v - m).max(-EXTRINSIC_RANGE));
    }
    Ok(BcjrOutput { posteriors, extrinsic })
}

/// Hard symbol decisions (lowest index wins ties).
pub fn hard_symbols(metrics: &[f64], q: usize) -> Vec<usize> {
    metrics
        .chunks(q)
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (u, &v)| if v > best.1 { (u, v) } else { best })
                .0
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurboOutput {
    pub bits: Vec<u8>,
    pub iterations: usize,
    /// Log posterior symbol metrics in message order.
    pub posteriors: Vec<f64>,
}

/// Iterative decoding with symbol-wise extrinsic exchange between the two
/// constituent decoders. `llrs` is aligned with the transmitted codeword.
pub fn turbo_decode(spec: &CodeSpec, llrs: &[f64], config: &DecoderConfig) -> Result<TurboOutput> {
    turbo_decode_with(&Siso::new(spec.constituent()), spec, llrs, config)
}

/// [`turbo_decode`] reusing precomputed transition tables.
pub fn turbo_decode_with(
    siso: &Siso,
    spec: &CodeSpec,
    llrs: &[f64],
    config: &DecoderConfig,
) -> Result<TurboOutput> {
    config.validate()?;
    let k = spec.constituent().k();
    let q = 1usize << k;
    let steps = spec.steps();
    let il = spec.interleaver();
    let (sys_llr, par1, par2) = spec.depuncture(llrs)?;
    let sys1 = if spec.systematic() {
        systematic_symbol_metrics(&sys_llr, k)
    } else {
        vec![0.0; steps * q]
    };
    let sys2 = il.interleave_rows(&sys1, q);
    let mut ext2_nat = vec![0.0; steps * q];
    let mut hard: Option<Vec<usize>> = None;
    let mut posteriors = Vec::new();
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        iterations += 1;
        let out1 = bcjr_systematic(siso, &ext2_nat, Some(&sys1), &par1, config.algorithm)?;
        let prior2 = il.interleave_rows(&out1.extrinsic, q);
        let out2 = bcjr_systematic(siso, &prior2, Some(&sys2), &par2, config.algorithm)?;
        ext2_nat = il.deinterleave_rows(&out2.extrinsic, q);
        posteriors = il.deinterleave_rows(&out2.posteriors, q);
        let decisions = hard_symbols(&posteriors, q);
        let unchanged = hard.as_ref() == Some(&decisions);
        hard = Some(decisions);
        if config.early_stop && unchanged {
            break;
        }
    }
    let bits = spec.symbols_to_bits(&hard.unwrap_or_default());
    Ok(TurboOutput { bits, iterations, posteriors })
}
