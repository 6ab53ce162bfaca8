//! Parallel concatenation of two identical table trellises.
//!
//! Codeword layout: the systematic bits (message order, when enabled), then
//! the unpunctured parity bits of encoder 1 (message order), then those of
//! encoder 2 (interleaved symbol order). Both encoders start in state 0 and
//! are left unterminated.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::trellis::{octal_decode, octal_encode, row_bit, OctalLabel, TableTrellis};
use crate::{Error, Result};

/// Periodic puncturing mask over one constituent's parity stream.
///
/// Bit `j` of the period (MSB-first, same convention as output labels) set
/// to 1 deletes every parity bit whose stream position is `j` modulo the
/// period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PuncturePattern {
    period: usize,
    mask: u32,
}

impl PuncturePattern {
    pub fn new(period: usize, mask: u32) -> Result<Self> {
        if period == 0 || period > 32 {
            return Err(Error::InvalidParameter(format!("puncture period {period} outside 1..=32")));
        }
        if period < 32 && mask >> period != 0 {
            return Err(Error::InvalidParameter(format!(
                "puncture mask {mask:#o} wider than period {period}"
            )));
        }
        Ok(Self { period, mask })
    }

    pub fn none(period: usize) -> Self {
        Self::new(period, 0).expect("valid period")
    }

    pub fn from_octal(digits: &str, period: usize) -> Result<Self> {
        let mask = octal_decode(&OctalLabel::new(digits)?, period)?;
        Self::new(period, mask)
    }

    /// Deletes `count` of every `period` positions, evenly spaced: position
    /// `floor((i + 1) * period / count) - 1` for `i < count`. When `count`
    /// divides `period` this is every `(period / count)`-th position.
    pub fn uniform(period: usize, count: usize) -> Result<Self> {
        if count > period {
            return Err(Error::InvalidParameter(format!(
                "cannot puncture {count} of {period} positions"
            )));
        }
        let mut mask = 0u32;
        for i in 0..count {
            let j = (i + 1) * period / count - 1;
            mask |= 1 << (period - 1 - j);
        }
        Self::new(period, mask)
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn to_octal(&self) -> OctalLabel {
        octal_encode(self.mask, self.period).expect("mask fits period")
    }

    #[inline]
    pub fn is_punctured(&self, position: usize) -> bool {
        row_bit(self.mask, self.period, position % self.period) == 1
    }

    pub fn punctured_per_period(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Unpunctured positions among the first `len` stream positions.
    pub fn kept_in(&self, len: usize) -> usize {
        (0..len).filter(|&p| !self.is_punctured(p)).count()
    }
}

/// Symbol-wise spread interleaver: `interleaved[i] = x[permutation[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interleaver {
    permutation: Vec<u32>,
    /// Spread requested at construction.
    requested_spread: usize,
    /// Largest spread the permutation actually satisfies.
    spread: usize,
    seed: u64,
}

/// Default spread for `n` symbols, `floor(sqrt(n / 2))`.
pub fn default_spread(n: usize) -> usize {
    ((n as f64 / 2.0).sqrt().floor() as usize).max(1)
}

/// True when every pair of positions closer than `s` maps at least `s`
/// apart.
pub fn satisfies_spread(perm: &[u32], s: usize) -> bool {
    let n = perm.len();
    for i in 0..n {
        for j in i + 1..n.min(i + s) {
            if (perm[i] as i64 - perm[j] as i64).unsigned_abs() < s as u64 {
                return false;
            }
        }
    }
    true
}

/// Largest `s` for which [`satisfies_spread`] holds.
pub fn achieved_spread(perm: &[u32]) -> usize {
    // the property is monotone in s
    let (mut lo, mut hi) = (1usize, perm.len().max(1));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if satisfies_spread(perm, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

const SPREAD_ATTEMPTS: usize = 100;

/// True when value `v` at position `pos` keeps distance `s` from every
/// placed neighbour closer than `s`, other than `skip`.
fn fits_at(out: &[u32], pos: usize, v: u32, s: usize) -> bool {
    let lo = pos.saturating_sub(s - 1);
    let hi = (pos + s).min(out.len());
    (lo..hi).all(|m| m == pos || (out[m] as i64 - v as i64).unsigned_abs() >= s as u64)
}

/// One greedy S-random pass over a shuffled pool. At a dead end it tries to
/// swap a pool value into an earlier position whose current value fits the
/// dead-end position; `None` if that also fails.
fn s_random_pass(n: usize, s: usize, rng: &mut ChaCha8Rng) -> Option<Vec<u32>> {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    pool.shuffle(rng);
    // blocked[v] counts window members within distance s - 1 of v
    let mut blocked = vec![0u32; n];
    let mut out: Vec<u32> = Vec::with_capacity(n);
    let mark = |blocked: &mut [u32], v: u32, delta: i32| {
        let lo = (v as usize).saturating_sub(s - 1);
        let hi = (v as usize + s - 1).min(n - 1);
        for b in &mut blocked[lo..=hi] {
            *b = b.wrapping_add_signed(delta);
        }
    };
    for i in 0..n {
        let v = match pool.iter().position(|&v| blocked[v as usize] == 0) {
            Some(idx) => pool.swap_remove(idx),
            None => {
                let swap = (0..pool.len()).find_map(|pi| {
                    let cand = pool[pi];
                    let start = rng.gen_range(0..=i.saturating_sub(s));
                    (0..=i.saturating_sub(s))
                        .map(|o| (start + o) % (i.saturating_sub(s) + 1))
                        .filter(|&j| j + s <= i)
                        .find(|&j| blocked[out[j] as usize] == 0 && fits_at(&out, j, cand, s))
                        .map(|j| (pi, j))
                })?;
                let (pi, j) = swap;
                let cand = pool.swap_remove(pi);
                std::mem::replace(&mut out[j], cand)
            }
        };
        out.push(v);
        if s > 1 {
            mark(&mut blocked, v, 1);
            if i + 1 >= s {
                mark(&mut blocked, out[i + 1 - s], -1);
            }
        }
    }
    Some(out)
}

impl Interleaver {
    /// Builds an S-random permutation of `n` symbols.
    ///
    /// Each attempt is a greedy pass over a shuffled pool; a dead end
    /// restarts with a fresh shuffle. After the attempt budget the spread is
    /// lowered by one and the search repeats, so the result always exists;
    /// [`Interleaver::spread`] reports what was achieved.
    pub fn spread_random(n: usize, s: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("interleaver length 0".into()));
        }
        let s = s.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut target = s;
        loop {
            for _ in 0..SPREAD_ATTEMPTS {
                if let Some(perm) = s_random_pass(n, target, &mut rng) {
                    let spread = if n == 1 { s } else { target };
                    return Ok(Self { permutation: perm, requested_spread: s, spread, seed });
                }
            }
            target -= 1;
        }
    }

    /// Wraps an explicit permutation.
    pub fn from_permutation(permutation: Vec<u32>, seed: u64) -> Result<Self> {
        let n = permutation.len();
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p as usize >= n || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::InvalidParameter("interleaver is not a bijection".into()));
            }
        }
        let spread = achieved_spread(&permutation);
        Ok(Self { permutation, requested_spread: spread, spread, seed })
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn permutation(&self) -> &[u32] {
        &self.permutation
    }

    pub fn spread(&self) -> usize {
        self.spread
    }

    pub fn requested_spread(&self) -> usize {
        self.requested_spread
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn interleave<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.permutation.iter().map(|&p| x[p as usize]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        let mut x = vec![T::default(); y.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            x[p as usize] = y[i];
        }
        x
    }

    /// Interleaves fixed-size rows of a flat buffer (symbol metrics).
    pub fn interleave_rows(&self, x: &[f64], width: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for &p in &self.permutation {
            let p = p as usize * width;
            out.extend_from_slice(&x[p..p + width]);
        }
        out
    }

    pub fn deinterleave_rows(&self, y: &[f64], width: usize) -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            let p = p as usize * width;
            out[p..p + width].copy_from_slice(&y[i * width..(i + 1) * width]);
        }
        out
    }
}

/// A complete parallel-concatenated code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    constituent: TableTrellis,
    interleaver: Interleaver,
    puncture1: PuncturePattern,
    puncture2: PuncturePattern,
    systematic: bool,
    info_bits: usize,
}

impl CodeSpec {
    pub fn new(
        constituent: TableTrellis,
        interleaver: Interleaver,
        puncture1: PuncturePattern,
        puncture2: PuncturePattern,
        systematic: bool,
        info_bits: usize,
    ) -> Result<Self> {
        let k = constituent.k();
        if info_bits == 0 || !info_bits.is_multiple_of(k) {
            return Err(Error::InvalidParameter(format!(
                "K = {info_bits} is not a positive multiple of k = {k}"
            )));
        }
        if interleaver.len() != info_bits / k {
            return Err(Error::InvalidParameter(format!(
                "interleaver has {} symbols, K/k = {}",
                interleaver.len(),
                info_bits / k
            )));
        }
        let spec = Self { constituent, interleaver, puncture1, puncture2, systematic, info_bits };
        if spec.codeword_len() == 0 {
            return Err(Error::InvalidParameter("every code bit is punctured".into()));
        }
        Ok(spec)
    }

    /// Code with a freshly generated spread interleaver of default spread.
    pub fn with_spread_interleaver(
        constituent: TableTrellis,
        puncture1: PuncturePattern,
        puncture2: PuncturePattern,
        systematic: bool,
        info_bits: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = info_bits / constituent.k().max(1);
        let il = Interleaver::spread_random(n, default_spread(n), seed)?;
        Self::new(constituent, il, puncture1, puncture2, systematic, info_bits)
    }

    pub fn constituent(&self) -> &TableTrellis {
        &self.constituent
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub fn puncture1(&self) -> PuncturePattern {
        self.puncture1
    }

    pub fn puncture2(&self) -> PuncturePattern {
        self.puncture2
    }

    pub fn systematic(&self) -> bool {
        self.systematic
    }

    /// Information bits per block, `K`.
    pub fn info_bits(&self) -> usize {
        self.info_bits
    }

    /// Trellis steps per block, `K / k`.
    pub fn steps(&self) -> usize {
        self.info_bits / self.constituent.k()
    }

    /// Parity stream length of one constituent before puncturing.
    pub fn parity_len(&self) -> usize {
        self.steps() * self.constituent.n()
    }

    pub fn systematic_len(&self) -> usize {
        if self.systematic {
            self.info_bits
        } else {
            0
        }
    }

    pub fn parity1_len(&self) -> usize {
        self.puncture1.kept_in(self.parity_len())
    }

    pub fn parity2_len(&self) -> usize {
        self.puncture2.kept_in(self.parity_len())
    }

    pub fn codeword_len(&self) -> usize {
        self.systematic_len() + self.parity1_len() + self.parity2_len()
    }

    /// Exact code rate `K / codeword length`.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.info_bits as u64, self.codeword_len() as u64)
    }

    /// Same code with a different systematic flag.
    pub fn with_systematic(mut self, systematic: bool) -> Result<Self> {
        self.systematic = systematic;
        Self::new(
            self.constituent,
            self.interleaver,
            self.puncture1,
            self.puncture2,
            systematic,
            self.info_bits,
        )
    }

    /// Splits message bits into `k`-bit symbols, first bit most significant.
    pub fn symbols(&self, message: &[u8]) -> Vec<usize> {
        let k = self.constituent.k();
        message
            .chunks(k)
            .map(|c| c.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize))
            .collect()
    }

    pub fn symbols_to_bits(&self, symbols: &[usize]) -> Vec<u8> {
        let k = self.constituent.k();
        symbols
            .iter()
            .flat_map(|&u| (0..k).map(move |j| ((u >> (k - 1 - j)) & 1) as u8))
            .collect()
    }

    fn push_parity(&self, symbols: &[usize], pattern: PuncturePattern, out: &mut Vec<u8>) {
        let n = self.constituent.n();
        let (rows, _) = self.constituent.encode_symbols(0, symbols);
        for (t, row) in rows.into_iter().enumerate() {
            for j in 0..n {
                if !pattern.is_punctured(t * n + j) {
                    out.push(row_bit(row, n, j));
                }
            }
        }
    }

    /// Encodes one block of `K` message bits.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.info_bits {
            return Err(Error::LengthMismatch { expected: self.info_bits, actual: message.len() });
        }
        let symbols = self.symbols(message);
        let mut out = Vec::with_capacity(self.codeword_len());
        if self.systematic {
            out.extend(message.iter().map(|b| b & 1));
        }
        self.push_parity(&symbols, self.puncture1, &mut out);
        let permuted = self.interleaver.interleave(&symbols);
        self.push_parity(&permuted, self.puncture2, &mut out);
        Ok(out)
    }

    /// Splits codeword-aligned LLRs into systematic LLRs and two full-length
    /// parity LLR streams, with zeros at punctured positions.
    pub fn depuncture(&self, llrs: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        if llrs.len() != self.codeword_len() {
            return Err(Error::LengthMismatch { expected: self.codeword_len(), actual: llrs.len() });
        }
        let (sys, rest) = llrs.split_at(self.systematic_len());
        let (p1, p2) = rest.split_at(self.parity1_len());
        let expand = |kept: &[f64], pattern: PuncturePattern| {
            let mut it = kept.iter();
            (0..self.parity_len())
                .map(|pos| if pattern.is_punctured(pos) { 0.0 } else { *it.next().unwrap() })
                .collect::<Vec<f64>>()
        };
        Ok((sys.to_vec(), expand(p1, self.puncture1), expand(p2, self.puncture2)))
    }
}

/// Rate of a code, as an exact fraction.
pub fn rate_of(spec: &CodeSpec) -> Ratio<u64> {
    spec.rate()
}

/// Empirical ones density of encoded uniform random messages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub density: f64,
    /// Standard error from the spread of per-block densities.
    pub stderr: f64,
    /// Ones density of the parity bits alone.
    pub parity_density: f64,
    pub coded_bits: u64,
}

pub fn random_message<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

pub fn measure_ones_density<R: Rng + ?Sized>(
    spec: &CodeSpec,
    num_blocks: usize,
    rng: &mut R,
) -> Result<DensityEstimate> {
    if num_blocks == 0 {
        return Err(Error::InvalidParameter("num_blocks must be at least 1".into()));
    }
    let mut per_block = Vec::with_capacity(num_blocks);
    let (mut ones, mut parity_ones, mut bits) = (0u64, 0u64, 0u64);
    let sys = spec.systematic_len();
    for _ in 0..num_blocks {
        let msg = random_message(spec.info_bits(), rng);
        let cw = spec.encode(&msg)?;
        let block_ones: u64 = cw.iter().map(|&b| b as u64).sum();
        parity_ones += cw[sys..].iter().map(|&b| b as u64).sum::<u64>();
        ones += block_ones;
        bits += cw.len() as u64;
        per_block.push(block_ones as f64 / cw.len() as f64);
    }
    let mean = ones as f64 / bits as f64;
    let stderr = if num_blocks > 1 {
        let m = per_block.iter().sum::<f64>() / num_blocks as f64;
        let var = per_block.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (num_blocks - 1) as f64;
        (var / num_blocks as f64).sqrt()
    } else {
        f64::NAN
    };
    let parity_bits = bits - (sys * num_blocks) as u64;
    Ok(DensityEstimate {
        density: mean,
        stderr,
        parity_density: parity_ones as f64 / parity_bits.max(1) as f64,
        coded_bits: bits,
    })
}

/// The eight standard puncturing rows: `(rate denominator, encoder 1
/// mask, encoder 2 mask, reported ones density)`.
pub const PUNCTURE_TABLE: [(u64, &str, &str, f64); 8] = [
    (10, "000", "000", 0.5953),
    (9, "001", "002", 0.5955),
    (8, "201", "042", 0.5938),
    (7, "241", "043", 0.5915),
    (6, "243", "243", 0.5911),
    (5, "247", "263", 0.5828),
    (4, "257", "267", 0.5742),
    (3, "277", "367", 0.5599),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::{reference_trellis, TrellisTopology};
    use proptest::prelude::*;

    fn reference_spec(p1: &str, p2: &str, k_bits: usize) -> CodeSpec {
        let n = k_bits / 2;
        let il = Interleaver::spread_random(n, default_spread(n), 1).unwrap();
        CodeSpec::new(
            reference_trellis(),
            il,
            PuncturePattern::from_octal(p1, 9).unwrap(),
            PuncturePattern::from_octal(p2, 9).unwrap(),
            true,
            k_bits,
        )
        .unwrap()
    }

    #[test]
    fn first_parity_bits_follow_reference_labels() {
        let spec = reference_spec("000", "000", 2);
        let cw = spec.encode(&[0, 0]).unwrap();
        assert_eq!(cw.len(), 20);
        assert_eq!(&cw[..2], &[0, 0]);
        assert_eq!(&cw[2..11], &[1, 0, 1, 0, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn punctured_rate_one_third_shape() {
        let spec = reference_spec("277", "367", 2);
        assert_eq!(spec.encode(&[1, 0]).unwrap().len(), 6);
        assert_eq!(rate_of(&spec), Ratio::new(1, 3));
        assert_eq!(PuncturePattern::from_octal("277", 9).unwrap().punctured_per_period(), 7);
        assert_eq!(PuncturePattern::from_octal("367", 9).unwrap().punctured_per_period(), 7);
    }

    #[test]
    fn puncture_table_rates() {
        for (den, p1, p2, _) in PUNCTURE_TABLE {
            assert_eq!(rate_of(&reference_spec(p1, p2, 200)), Ratio::new(1, den), "{p1}/{p2}");
        }
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let spec = reference_spec("000", "000", 20);
        assert!(matches!(spec.encode(&[0; 19]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn spec_validation() {
        let il = Interleaver::spread_random(5, 1, 0).unwrap();
        let none = PuncturePattern::none(9);
        assert!(CodeSpec::new(reference_trellis(), il.clone(), none, none, true, 11).is_err());
        assert!(CodeSpec::new(reference_trellis(), il.clone(), none, none, true, 12).is_err());
        assert!(CodeSpec::new(reference_trellis(), il, none, none, true, 10).is_ok());
        let all = PuncturePattern::from_octal("777", 9).unwrap();
        let il = Interleaver::spread_random(5, 1, 0).unwrap();
        assert!(CodeSpec::new(reference_trellis(), il, all, all, false, 10).is_err());
    }

    #[test]
    fn puncturing_never_touches_systematic_bits() {
        let spec = reference_spec("277", "367", 200);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let msg = random_message(200, &mut rng);
        let cw = spec.encode(&msg).unwrap();
        assert_eq!(&cw[..200], &msg[..]);
    }

    #[test]
    fn encode_is_injective_on_probes() {
        let spec = reference_spec("000", "000", 400);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            let msg = random_message(400, &mut rng);
            let cw = spec.encode(&msg).unwrap();
            assert_eq!(cw.len(), 4000);
            seen.insert((msg, cw));
        }
        let codewords: std::collections::HashSet<_> = seen.iter().map(|(_, c)| c).collect();
        assert_eq!(codewords.len(), seen.len());
    }

    #[test]
    fn interleaver_examples() {
        let il = Interleaver::spread_random(1, 5, 3).unwrap();
        assert_eq!(il.permutation(), &[0]);
        let a = Interleaver::spread_random(2000, 31, 8).unwrap();
        let b = Interleaver::spread_random(2000, 31, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.spread(), 31);
        assert!(satisfies_spread(a.permutation(), 31));
        let c = Interleaver::spread_random(2000, 31, 9).unwrap();
        assert_ne!(a.permutation(), c.permutation());
    }

    #[test]
    fn full_size_interleaver_is_spread_bijection() {
        let il = Interleaver::spread_random(10_000, 70, 1).unwrap();
        let mut sorted = il.permutation().to_vec();
        sorted.sort_unstable();
        assert!(sorted.iter().enumerate().all(|(i, &v)| v as usize == i));
        assert_eq!(il.spread(), 70);
        // independent O(N*S) scan
        let p = il.permutation();
        for i in 0..p.len() {
            for j in i + 1..(i + 70).min(p.len()) {
                assert!((p[i] as i64 - p[j] as i64).abs() >= 70);
            }
        }
    }

    #[test]
    fn from_permutation_rejects_non_bijection() {
        assert!(Interleaver::from_permutation(vec![0, 0, 1], 0).is_err());
        assert!(Interleaver::from_permutation(vec![0, 3, 1], 0).is_err());
        let il = Interleaver::from_permutation(vec![2, 0, 1], 0).unwrap();
        assert_eq!(il.interleave(&['a', 'b', 'c']), vec!['c', 'a', 'b']);
    }

    #[test]
    fn uniform_puncturing() {
        let p = PuncturePattern::uniform(20, 10).unwrap();
        assert_eq!(p.punctured_per_period(), 10);
        assert!((0..20).all(|j| p.is_punctured(j) == (j % 2 == 1)));
        let p = PuncturePattern::uniform(10, 4).unwrap();
        let punctured: Vec<usize> = (0..10).filter(|&j| p.is_punctured(j)).collect();
        assert_eq!(punctured, vec![1, 4, 6, 9]);
        assert!(PuncturePattern::uniform(4, 5).is_err());
        assert_eq!(PuncturePattern::uniform(9, 0).unwrap().mask(), 0);
    }

    #[test]
    fn depuncture_reinserts_zeros() {
        let spec = reference_spec("277", "367", 4);
        let llrs: Vec<f64> = (1..=spec.codeword_len()).map(|i| i as f64).collect();
        let (sys, p1, p2) = spec.depuncture(&llrs).unwrap();
        assert_eq!(sys, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p1.len(), 18);
        assert_eq!(p1.iter().filter(|&&v| v != 0.0).count(), 4);
        assert_eq!(p2.iter().filter(|&&v| v != 0.0).count(), 4);
        // 277 = 010 111 111 keeps positions 0 and 2
        assert_eq!(p1[0], 5.0);
        assert_eq!(p1[2], 6.0);
        assert!(spec.depuncture(&llrs[1..]).is_err());
    }

    #[test]
    fn density_of_zero_tables_counts_only_systematic_bits() {
        let t = TableTrellis::from_labels(TrellisTopology::duo_binary_16(), 9, &[0; 64]).unwrap();
        let spec = CodeSpec::with_spread_interleaver(
            t,
            PuncturePattern::none(9),
            PuncturePattern::none(9),
            true,
            2000,
            1,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = measure_ones_density(&spec, 100, &mut rng).unwrap();
        assert!((d.density - 0.05).abs() < 0.002, "{}", d.density);
        assert_eq!(d.parity_density, 0.0);
        assert!(measure_ones_density(&spec, 0, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn deinterleave_inverts_interleave(n in 1usize..300, seed in any::<u64>()) {
            let il = Interleaver::spread_random(n, default_spread(n), seed).unwrap();
            let x: Vec<u32> = (0..n as u32).map(|v| v * 3 + 1).collect();
            prop_assert_eq!(il.deinterleave(&il.interleave(&x)), x.clone());
            let rows: Vec<f64> = (0..n * 4).map(|v| v as f64).collect();
            prop_assert_eq!(il.deinterleave_rows(&il.interleave_rows(&rows, 4), 4), rows);
            prop_assert!(satisfies_spread(il.permutation(), il.spread()));
        }
    }
}
