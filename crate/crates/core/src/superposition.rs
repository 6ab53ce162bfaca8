//! Two-user superposition coding over the broadcast BSC.
//!
//! User 1 (strong receiver, crossover `alpha`) carries a nonlinear code of
//! ones density `p1`; user 2 (weak receiver, crossover `beta`) carries a
//! linear code of density 1/2. The transmitter sends `x1 XOR x2`. Receiver 2
//! treats `x1` as noise; receiver 1 decodes and cancels `x2` first.

use serde::{Deserialize, Serialize};

use crate::channel::{star, RatePoint};
use crate::decode::{bsc_llr, turbo_decode_with, DecoderConfig, Siso};
use crate::trellis::{StateSubTable, TableTrellis, TrellisTopology};
use crate::turbo::CodeSpec;
use crate::{Error, Result};

/// Bitwise XOR of two equal-length codewords.
pub fn superpose(x1: &[u8], x2: &[u8]) -> Result<Vec<u8>> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch { expected: x1.len(), actual: x2.len() });
    }
    Ok(x1.iter().zip(x2).map(|(a, b)| a ^ b).collect())
}

/// Labels that are GF(2)-linear in the state and input bits: output bit `j`
/// is the parity of `taps[j] & ((state << k) | input)`.
pub fn linear_table(topology: TrellisTopology, taps: &[u32]) -> Result<TableTrellis> {
    let n = taps.len();
    let k = topology.k();
    let subtables = (0..topology.num_states())
        .map(|s| {
            let rows = (0..topology.num_inputs())
                .map(|u| {
                    let v = ((s << k) | u) as u32;
                    taps.iter().fold(0u32, |acc, &t| (acc << 1) | ((t & v).count_ones() & 1))
                })
                .collect();
            StateSubTable::new(n, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    TableTrellis::new(topology, subtables)
}

/// Parity taps of the shipped density-1/2 user-2 constituent on the default
/// 16-state topology, as `(state << 2) | input` masks.
pub const USER2_TAPS: [u32; 9] = [0o71, 0o45, 0o62, 0o65, 0o15, 0o26, 0o73, 0o64, 0o22];

/// Crossover seen by receiver 2 when user 1's codeword acts as noise.
pub fn user2_crossover(beta: f64, p1: f64) -> f64 {
    star(beta, p1)
}

/// Crossover seen by receiver 1 while decoding user 2's codeword.
pub fn user1_stage1_crossover(alpha: f64, p1: f64) -> f64 {
    star(alpha, p1)
}

/// A matched pair of codes for one broadcast operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub spec1: CodeSpec,
    pub spec2: CodeSpec,
    pub alpha: f64,
    pub beta: f64,
    /// Ones density assumed for user 1's codewords.
    pub p1: f64,
}

impl SuperpositionSpec {
    pub fn new(spec1: CodeSpec, spec2: CodeSpec, alpha: f64, beta: f64, p1: f64) -> Result<Self> {
        if spec1.codeword_len() != spec2.codeword_len() {
            return Err(Error::LengthMismatch {
                expected: spec1.codeword_len(),
                actual: spec2.codeword_len(),
            });
        }
        if !(0.0 <= alpha && alpha < beta && beta < 0.5) {
            return Err(Error::InvalidParameter(format!("need 0 <= alpha < beta < 0.5, got ({alpha}, {beta})")));
        }
        if !(0.0..=0.5).contains(&p1) {
            return Err(Error::InvalidParameter(format!("p1 = {p1} outside [0, 0.5]")));
        }
        Ok(Self { spec1, spec2, alpha, beta, p1 })
    }

    pub fn codeword_len(&self) -> usize {
        self.spec1.codeword_len()
    }

    /// `(rate of user 1, rate of user 2)` at the recorded `p1`.
    pub fn rate_point(&self) -> RatePoint {
        let r = |s: &CodeSpec| *s.rate().numer() as f64 / *s.rate().denom() as f64;
        RatePoint { r1: r(&self.spec1), r2: r(&self.spec2), p1: self.p1 }
    }

    /// Encodes both messages and superposes the codewords. Returns
    /// `(x1, x2, x1 XOR x2)`.
    pub fn encode(&self, m1: &[u8], m2: &[u8]) -> Result<(Vec<u8>, Vec<u8>, Vec<u8>)> {
        let x1 = self.spec1.encode(m1)?;
        let x2 = self.spec2.encode(m2)?;
        let x = superpose(&x1, &x2)?;
        Ok((x1, x2, x))
    }
}

fn bsc_llrs(q: f64, y: &[u8], cap: f64) -> Vec<f64> {
    y.iter().map(|&b| bsc_llr(q, b, cap)).collect()
}

/// Receiver 2: decodes user 2 under BSC(`beta * p1`).
pub fn decode_user2(
    spec2: &CodeSpec,
    y2: &[u8],
    beta: f64,
    p1: f64,
    config: &DecoderConfig,
) -> Result<Vec<u8>> {
    let siso = Siso::new(spec2.constituent());
    let llrs = bsc_llrs(user2_crossover(beta, p1), y2, config.llr_cap);
    Ok(turbo_decode_with(&siso, spec2, &llrs, config)?.bits)
}

/// Receiver 1 outcome, including the intermediate estimate of user 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct User1Decode {
    pub message: Vec<u8>,
    /// Stage-1 estimate of user 2's message used for cancellation.
    pub stage1_message: Vec<u8>,
}

/// Receiver 1: decodes user 2 under BSC(`alpha * p1`), cancels the
/// re-encoded codeword and decodes user 1 under BSC(`alpha`).
pub fn decode_user1(
    spec1: &CodeSpec,
    spec2: &CodeSpec,
    y1: &[u8],
    alpha: f64,
    beta: f64,
    p1: f64,
    config: &DecoderConfig,
) -> Result<User1Decode> {
    if alpha >= beta {
        return Err(Error::InvalidParameter(format!("alpha {alpha} must be below beta {beta}")));
    }
    let siso2 = Siso::new(spec2.constituent());
    let llrs = bsc_llrs(user1_stage1_crossover(alpha, p1), y1, config.llr_cap);
    let stage1_message = turbo_decode_with(&siso2, spec2, &llrs, config)?.bits;
    let x2_hat = spec2.encode(&stage1_message)?;
    let message = decode_user1_genie(spec1, &x2_hat, y1, alpha, config)?;
    Ok(User1Decode { message, stage1_message })
}

/// Receiver 1 with user 2's codeword known exactly.
pub fn decode_user1_genie(
    spec1: &CodeSpec,
    x2: &[u8],
    y1: &[u8],
    alpha: f64,
    config: &DecoderConfig,
) -> Result<Vec<u8>> {
    let cleaned = superpose(y1, x2)?;
    let siso = Siso::new(spec1.constituent());
    let llrs = bsc_llrs(alpha, &cleaned, config.llr_cap);
    Ok(turbo_decode_with(&siso, spec1, &llrs, config)?.bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::bsc_transmit;
    use crate::metrics::{effective_free_distance, DistanceMetric};
    use crate::designer::{design_trellis, DesignParams};
    use crate::turbo::{random_message, Interleaver, PuncturePattern};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn superpose_examples() {
        let x = vec![1, 0, 1, 1, 0];
        assert_eq!(superpose(&x, &[0; 5]).unwrap(), x);
        assert_eq!(superpose(&x, &x).unwrap(), vec![0; 5]);
        let y = vec![0, 1, 1, 0, 0];
        assert_eq!(superpose(&superpose(&x, &y).unwrap(), &y).unwrap(), x);
        assert!(superpose(&x, &y[..4]).is_err());
    }

    #[test]
    fn superposed_density_is_one_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng;
        let n = 400_000;
        let x1: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.14) as u8).collect();
        let x2 = random_message(n, &mut rng);
        let x = superpose(&x1, &x2).unwrap();
        let d = x.iter().map(|&b| b as f64).sum::<f64>() / n as f64;
        assert!((d - 0.5).abs() < 0.005, "{d}");
        assert_eq!(star(0.14, 0.5), 0.5);
    }

    #[test]
    fn effective_crossovers_are_star_products() {
        assert_eq!(user2_crossover(0.2017, 0.14), star(0.2017, 0.14));
        assert_eq!(user1_stage1_crossover(0.188, 0.14), star(0.188, 0.14));
        assert_eq!(user2_crossover(0.1, 0.0), 0.1);
    }

    #[test]
    fn linear_table_is_linear() {
        let t = linear_table(TrellisTopology::duo_binary_16(), &USER2_TAPS).unwrap();
        assert_eq!(t.n(), 9);
        assert_eq!(t.label(0, 0), 0);
        // label(s1 ^ s2, u1 ^ u2) = label(s1, u1) ^ label(s2, u2)
        for s1 in 0..16 {
            for s2 in 0..16 {
                for u1 in 0..4 {
                    for u2 in 0..4 {
                        assert_eq!(t.label(s1 ^ s2, u1 ^ u2), t.label(s1, u1) ^ t.label(s2, u2));
                    }
                }
            }
        }
        assert!((t.ones_density() - 0.5).abs() < 1e-12);
        let d = effective_free_distance(&t, DistanceMetric::Hamming, 2, 64).unwrap();
        assert!(d.merged && d.distance >= 10, "{d:?}");
    }

    /// A density-3/20 nonsystematic user-1 code and the linear user-2 code,
    /// both 20 coded bits per symbol.
    fn spec_pair() -> (CodeSpec, CodeSpec) {
        let params = DesignParams {
            d_b: 1,
            systematic: false,
            ..DesignParams::new(0.15, 10, DistanceMetric::Hamming)
        };
        let t1 = design_trellis(&params, &TrellisTopology::duo_binary_16()).unwrap().trellis;
        let il = Interleaver::spread_random(300, 12, 1).unwrap();
        let s1 = CodeSpec::new(t1, il.clone(), PuncturePattern::none(10), PuncturePattern::none(10), false, 600)
            .unwrap();
        let lin = linear_table(TrellisTopology::duo_binary_16(), &USER2_TAPS).unwrap();
        let none = PuncturePattern::none(9);
        let s2 = CodeSpec::new(lin, il, none, none, true, 600).unwrap();
        (s1, s2)
    }

    #[test]
    fn spec_requires_equal_lengths() {
        let (s1, s2) = spec_pair();
        assert!(SuperpositionSpec::new(s1.clone(), s2.clone(), 0.1, 0.2, 0.3).is_ok());
        assert!(SuperpositionSpec::new(s1.clone(), s2.clone(), 0.2, 0.1, 0.3).is_err());
        let short = s2.with_systematic(false).unwrap();
        assert_eq!(s1.codeword_len(), 6000);
        assert!(SuperpositionSpec::new(s1, short, 0.1, 0.2, 0.3).is_err());
    }

    #[test]
    fn noiseless_pipeline_recovers_both_users() {
        let (s1, s2) = spec_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = DecoderConfig::default();
        let sup = SuperpositionSpec::new(s1.clone(), s2.clone(), 0.0, 0.05, 0.15).unwrap();
        let m1 = random_message(600, &mut rng);
        let m2 = random_message(600, &mut rng);
        let (x1, x2, x) = sup.encode(&m1, &m2).unwrap();
        // stage-2 input equals x1 after exact cancellation
        assert_eq!(superpose(&x, &x2).unwrap(), x1);
        let out = decode_user1(&s1, &s2, &x, 0.0, 0.05, 0.15, &cfg).unwrap();
        assert_eq!(out.stage1_message, m2);
        assert_eq!(out.message, m1);
        assert_eq!(decode_user1_genie(&s1, &x2, &x, 0.0, &cfg).unwrap(), m1);
    }

    #[test]
    fn silent_user1_reduces_to_bsc_decoding() {
        let (_, s2) = spec_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = DecoderConfig::default();
        for _ in 0..5 {
            let m2 = random_message(600, &mut rng);
            let y = bsc_transmit(0.02, &s2.encode(&m2).unwrap(), &mut rng);
            assert_eq!(decode_user2(&s2, &y, 0.02, 0.0, &cfg).unwrap(), m2);
        }
    }

    #[test]
    fn decode_user1_rejects_ordering() {
        let (s1, s2) = spec_pair();
        let y = vec![0u8; s1.codeword_len()];
        assert!(decode_user1(&s1, &s2, &y, 0.2, 0.1, 0.1, &DecoderConfig::default()).is_err());
    }
}
