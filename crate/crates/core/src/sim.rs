//! Monte Carlo harnesses and code audits.
//!
//! Blocks are simulated in parallel batches. Block `b` of point `i` draws
//! from its own RNG keyed by `(seed, i, b)`, and the stopping rule is applied
//! to the tallies in block order, so results do not depend on the number of
//! worker threads.

use std::time::Instant;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{bbsc_f1, bbsc_f2, bsc_transmit, z_capacity, z_crossover_for_capacity, z_transmit, ChannelModel};
use crate::codefile::CodeFile;
use crate::decode::{z_llr, turbo_decode_with, DecoderConfig, Siso};
use crate::metrics::{
    default_max_depth, effective_free_distance, merge_distance, DistanceMetric, DistanceReport,
    FreeDistance,
};
use crate::superposition::{decode_user1, decode_user1_genie, decode_user2, SuperpositionSpec};
use crate::turbo::{random_message, CodeSpec};
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Default bit-error target of the stopping rule.
pub const DEFAULT_ERROR_TARGET: u64 = 100;
/// Gaps to capacity simulated for every standard puncture row in full mode.
pub const FULL_GAPS: [f64; 3] = [0.05, 0.035, 0.018];

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Exact rates as `"num/den"` text.
mod ratio_text {
    use num_rational::Ratio;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("invalid rate {text:?}")))
    }
}

/// Key-derived RNG for one simulated block.
pub fn block_rng(seed: u64, point: usize, block: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(block as u64).to_le_bytes());
    key[24..].copy_from_slice(b"nlturbo\0");
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ErrorTarget,
    BlockBudget,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ErrorTarget => "error-target",
            StopReason::BlockBudget => "block-budget",
        }
    }
}

/// Bit and frame error counts with 95% Wilson intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci: (f64, f64),
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub fer_ci: (f64, f64),
}

impl ErrorStats {
    pub fn from_counts(bits: u64, bit_errors: u64, frames: u64, frame_errors: u64) -> Self {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Self {
            bits,
            bit_errors,
            ber: ratio(bit_errors, bits),
            ber_ci: wilson_interval(bit_errors, bits, Z95),
            frames,
            frame_errors,
            fer: ratio(frame_errors, frames),
            fer_ci: wilson_interval(frame_errors, frames, Z95),
        }
    }
}

/// Stopping and parallelism controls shared by the harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_blocks: usize,
    /// Stop once this many bit errors are seen; 0 disables the target.
    pub error_target: u64,
    /// Blocks dispatched per parallel batch.
    pub batch: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { max_blocks: 100, error_target: DEFAULT_ERROR_TARGET, batch: 8 }
    }
}

/// Runs `block(b)` for `b = 0, 1, ...` until `done` holds for the running
/// tally or the budget is spent. Returns the kept tallies in block order.
fn run_blocks<T, F, D>(rule: &StopRule, block: F, mut done: D) -> Result<(Vec<T>, StopReason)>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
    D: FnMut(&T) -> bool,
{
    if rule.max_blocks == 0 {
        return Err(Error::InvalidParameter("block budget must be at least 1".into()));
    }
    let batch = rule.batch.max(1);
    let mut kept = Vec::new();
    let mut next = 0;
    while next < rule.max_blocks {
        let end = (next + batch).min(rule.max_blocks);
        let results: Vec<Result<T>> = (next..end).into_par_iter().map(&block).collect();
        for r in results {
            let t = r?;
            let stop = done(&t);
            kept.push(t);
            if stop {
                return Ok((kept, StopReason::ErrorTarget));
            }
        }
        next = end;
    }
    Ok((kept, StopReason::BlockBudget))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BlockTally {
    bit_errors: u64,
    ones: u64,
    coded_bits: u64,
    iterations: u64,
}

/// One point-to-point operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Echo of the configuration that produced the report.
    pub config: serde_json::Value,
    pub channel: ChannelModel,
    #[serde(with = "ratio_text")]
    pub rate: Ratio<u64>,
    pub capacity: f64,
    /// `capacity - rate` in bits; negative above capacity.
    pub gap: f64,
    pub above_capacity: bool,
    pub ones_density: f64,
    pub ones_density_stderr: f64,
    #[serde(flatten)]
    pub errors: ErrorStats,
    pub avg_iterations: f64,
    pub stop_reason: StopReason,
    pub wall_time_s: f64,
}

/// Flat CSV row of a [`SimReport`]; wall time is left out so reruns give
/// identical bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCsvRow {
    pub p: f64,
    pub rate: String,
    pub capacity: f64,
    pub gap: f64,
    pub blocks: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_lo: f64,
    pub ber_hi: f64,
    pub frame_errors: u64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    pub ones_density: f64,
    pub ones_density_stderr: f64,
    pub avg_iterations: f64,
    pub stop_reason: String,
}

impl SimReport {
    /// Crossover of a point-to-point channel.
    pub fn channel_parameter(&self) -> f64 {
        match self.channel {
            ChannelModel::Z { p } => p,
            ChannelModel::Bsc { q } => q,
            ChannelModel::Bbsc { alpha, .. } => alpha,
        }
    }

    pub fn csv_row(&self) -> SimCsvRow {
        let p = self.channel_parameter();
        let e = &self.errors;
        SimCsvRow {
            p,
            rate: self.rate.to_string(),
            capacity: self.capacity,
            gap: self.gap,
            blocks: e.frames,
            bits: e.bits,
            bit_errors: e.bit_errors,
            ber: e.ber,
            ber_lo: e.ber_ci.0,
            ber_hi: e.ber_ci.1,
            frame_errors: e.frame_errors,
            fer: e.fer,
            fer_lo: e.fer_ci.0,
            fer_hi: e.fer_ci.1,
            ones_density: self.ones_density,
            ones_density_stderr: self.ones_density_stderr,
            avg_iterations: self.avg_iterations,
            stop_reason: self.stop_reason.as_str().to_string(),
        }
    }
}

/// Z-channel sweep parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSweepConfig {
    /// 0 -> 1 crossover probabilities, one report each.
    pub crossovers: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub decoder: DecoderConfig,
    /// Free-form description of the code, echoed into reports.
    #[serde(default)]
    pub code: String,
}

fn rate_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn density_stats(tallies: &[BlockTally]) -> (f64, f64) {
    let ones: u64 = tallies.iter().map(|t| t.ones).sum();
    let bits: u64 = tallies.iter().map(|t| t.coded_bits).sum();
    let mean = ones as f64 / bits.max(1) as f64;
    let n = tallies.len();
    if n < 2 {
        // binomial fallback for a single block
        return (mean, (mean * (1.0 - mean) / bits.max(1) as f64).sqrt());
    }
    let per: Vec<f64> = tallies.iter().map(|t| t.ones as f64 / t.coded_bits as f64).collect();
    let m = per.iter().sum::<f64>() / n as f64;
    let var = per.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Simulates `spec` on the Z-channel at each requested crossover.
pub fn run_zsweep(spec: &CodeSpec, config: &ZSweepConfig) -> Result<Vec<SimReport>> {
    config.decoder.validate()?;
    let echo = serde_json::to_value(config).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let siso = Siso::new(spec.constituent());
    let rate = spec.rate();
    let k = spec.info_bits();
    let mut reports = Vec::with_capacity(config.crossovers.len());
    for (point, &p) in config.crossovers.iter().enumerate() {
        let channel = ChannelModel::z(p)?;
        let started = Instant::now();
        let block = |b: usize| -> Result<BlockTally> {
            let mut rng = block_rng(config.seed, point, b);
            let msg = random_message(k, &mut rng);
            let cw = spec.encode(&msg)?;
            let y = z_transmit(p, &cw, &mut rng);
            let llrs: Vec<f64> = y.iter().map(|&v| z_llr(p, v, config.decoder.llr_cap)).collect();
            let out = turbo_decode_with(&siso, spec, &llrs, &config.decoder)?;
            Ok(BlockTally {
                bit_errors: out.bits.iter().zip(&msg).filter(|(a, b)| a != b).count() as u64,
                ones: cw.iter().map(|&b| b as u64).sum(),
                coded_bits: cw.len() as u64,
                iterations: out.iterations as u64,
            })
        };
        let mut errors = 0;
        let target = config.stop.error_target;
        let (tallies, stop_reason) = run_blocks(&config.stop, block, |t| {
            errors += t.bit_errors;
            target > 0 && errors >= target
        })?;
        let frames = tallies.len() as u64;
        let bit_errors = tallies.iter().map(|t| t.bit_errors).sum();
        let frame_errors = tallies.iter().filter(|t| t.bit_errors > 0).count() as u64;
        let (ones_density, ones_density_stderr) = density_stats(&tallies);
        let capacity = z_capacity(p)?;
        let gap = capacity - rate_f64(rate);
        reports.push(SimReport {
            config: echo.clone(),
            channel,
            rate,
            capacity,
            gap,
            above_capacity: gap < 0.0,
            ones_density,
            ones_density_stderr,
            errors: ErrorStats::from_counts(frames * k as u64, bit_errors, frames, frame_errors),
            avg_iterations: tallies.iter().map(|t| t.iterations).sum::<u64>() as f64 / frames as f64,
            stop_reason,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(reports)
}

/// Z-channel crossover at which the capacity exceeds `rate` by `gap` bits.
pub fn z_crossover_for_gap(rate: Ratio<u64>, gap: f64) -> Result<f64> {
    z_crossover_for_capacity(rate_f64(rate) + gap)
}

/// Broadcast simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbscConfig {
    pub stop: StopRule,
    pub seed: u64,
    pub decoder: DecoderConfig,
    /// Also decode user 1 with user 2's codeword known.
    pub genie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbscReport {
    pub config: serde_json::Value,
    pub alpha: f64,
    pub beta: f64,
    pub p1: f64,
    #[serde(with = "ratio_text")]
    pub rate1: Ratio<u64>,
    #[serde(with = "ratio_text")]
    pub rate2: Ratio<u64>,
    /// `f1(p1) - r1` and `f2(p1) - r2`.
    pub capacity_margin: (f64, f64),
    pub measured_p1: f64,
    pub user1: ErrorStats,
    pub user1_genie: Option<ErrorStats>,
    pub user2: ErrorStats,
    /// Blocks whose stage-1 estimate of user 2 at receiver 1 had errors.
    pub cancellation_failures: u64,
    pub stop_reason: StopReason,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct BbscTally {
    e1: u64,
    e1_genie: u64,
    e2: u64,
    stage1_failed: bool,
    ones1: u64,
    bits1: u64,
}

/// Simulates the two-user pipeline described by `sup`.
pub fn run_bbsc(sup: &SuperpositionSpec, config: &BbscConfig) -> Result<BbscReport> {
    config.decoder.validate()?;
    let echo = serde_json::to_value(config).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let (s1, s2) = (&sup.spec1, &sup.spec2);
    let (alpha, beta, p1) = (sup.alpha, sup.beta, sup.p1);
    let started = Instant::now();
    let count = |a: &[u8], b: &[u8]| a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
    let block = |b: usize| -> Result<BbscTally> {
        let mut rng = block_rng(config.seed, 0, b);
        let m1 = random_message(s1.info_bits(), &mut rng);
        let m2 = random_message(s2.info_bits(), &mut rng);
        let (x1, x2, x) = sup.encode(&m1, &m2)?;
        let y1 = bsc_transmit(alpha, &x, &mut rng);
        let y2 = bsc_transmit(beta, &x, &mut rng);
        let d2 = decode_user2(s2, &y2, beta, p1, &config.decoder)?;
        let d1 = decode_user1(s1, s2, &y1, alpha, beta, p1, &config.decoder)?;
        let e1_genie = if config.genie {
            count(&decode_user1_genie(s1, &x2, &y1, alpha, &config.decoder)?, &m1)
        } else {
            0
        };
        Ok(BbscTally {
            e1: count(&d1.message, &m1),
            e1_genie,
            e2: count(&d2, &m2),
            stage1_failed: d1.stage1_message != m2,
            ones1: x1.iter().map(|&v| v as u64).sum(),
            bits1: x1.len() as u64,
        })
    };
    let (mut t1, mut t2) = (0, 0);
    let target = config.stop.error_target;
    let (tallies, stop_reason) = run_blocks(&config.stop, block, |t| {
        t1 += t.e1;
        t2 += t.e2;
        target > 0 && t1 >= target && t2 >= target
    })?;
    let frames = tallies.len() as u64;
    let stats = |f: fn(&BbscTally) -> u64, k: usize| {
        let errs: u64 = tallies.iter().map(f).sum();
        let fe = tallies.iter().filter(|t| f(t) > 0).count() as u64;
        ErrorStats::from_counts(frames * k as u64, errs, frames, fe)
    };
    let (r1, r2) = (s1.rate(), s2.rate());
    Ok(BbscReport {
        config: echo,
        alpha,
        beta,
        p1,
        rate1: r1,
        rate2: r2,
        capacity_margin: (bbsc_f1(alpha, p1) - rate_f64(r1), bbsc_f2(beta, p1) - rate_f64(r2)),
        measured_p1: tallies.iter().map(|t| t.ones1).sum::<u64>() as f64
            / tallies.iter().map(|t| t.bits1).sum::<u64>().max(1) as f64,
        user1: stats(|t| t.e1, s1.info_bits()),
        user1_genie: config.genie.then(|| stats(|t| t.e1_genie, s1.info_bits())),
        user2: stats(|t| t.e2, s2.info_bits()),
        cancellation_failures: tallies.iter().filter(|t| t.stage1_failed).count() as u64,
        stop_reason,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// A declared value that the audit failed to reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub declared: String,
    pub recomputed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub distances: DistanceReport,
    pub free_distance: FreeDistance,
    pub max_depth: usize,
    /// Whether systematic input bits were counted in the free distance.
    pub systematic: bool,
    pub ones: usize,
    pub table_density: Ratio<u64>,
    pub rate: Option<Ratio<u64>>,
    pub mismatches: Vec<Mismatch>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes distances, density and rate of a code file and compares them
/// with its `[declared]` table.
///
/// The metric defaults to the declared one, then to Hamming. Declared
/// distances are only compared when they refer to the audited metric.
pub fn audit_code(file: &CodeFile, metric: Option<DistanceMetric>, max_depth: Option<usize>) -> Result<AuditReport> {
    let t = file.trellis()?;
    let decl = &file.declared;
    let metric = metric.or(decl.metric).unwrap_or(DistanceMetric::Hamming);
    let depth = max_depth.or(decl.max_depth).unwrap_or_else(|| default_max_depth(t.num_states()));
    let systematic = file.systematic.unwrap_or(false);
    let distances = merge_distance(&t, metric);
    let free_distance = effective_free_distance(&t, metric, if systematic { t.k() } else { 0 }, depth)?;
    let ones = t.total_ones();
    let cells = (t.num_states() * t.topology().num_inputs() * t.n()) as u64;
    let rate = if file.info_bits.is_some() { Some(file.code_spec()?.rate()) } else { None };
    let mut mismatches = Vec::new();
    let mut check = |field: &str, declared: Option<String>, recomputed: String| {
        if let Some(d) = declared {
            if d != recomputed {
                mismatches.push(Mismatch { field: field.into(), declared: d, recomputed });
            }
        }
    };
    check("ones", decl.ones.map(|v| v.to_string()), ones.to_string());
    if decl.metric.is_none_or(|m| m == metric) {
        check("branch_distance", decl.branch_distance.map(|v| v.to_string()), distances.branch_distance.to_string());
        check("merge_distance", decl.merge_distance.map(|v| v.to_string()), distances.merge_distance.to_string());
        check(
            "effective_free_distance",
            decl.effective_free_distance.map(|v| v.to_string()),
            free_distance.distance.to_string(),
        );
    }
    if let Some(declared) = decl.parsed_rate()? {
        let recomputed = rate.map_or("none".to_string(), |r| r.to_string());
        check("rate", Some(declared.to_string()), recomputed);
    }
    Ok(AuditReport {
        distances,
        free_distance,
        max_depth: depth,
        systematic,
        ones,
        table_density: Ratio::new(ones as u64, cells),
        rate,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::{reference_trellis, TableTrellis, TrellisTopology};
    use crate::turbo::{Interleaver, PuncturePattern};

    #[test]
    fn wilson_examples() {
        // standard textbook value: 5 of 100 at 95%
        let (lo, hi) = wilson_interval(5, 100, Z95);
        assert!((lo - 0.021_544).abs() < 1e-5, "{lo}");
        assert!((hi - 0.111_750_5).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson_interval(0, 1000, Z95);
        assert!(lo.abs() < 1e-15);
        assert!((hi - 0.003_826_8).abs() < 1e-5, "{hi}");
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn wilson_width_shrinks_as_inverse_sqrt() {
        let w = |n: u64| {
            let (lo, hi) = wilson_interval(n / 100, n, Z95);
            hi - lo
        };
        for n in [10_000u64, 40_000, 160_000] {
            let ratio = w(n) / w(4 * n);
            assert!((ratio - 2.0).abs() < 0.02, "{ratio}");
        }
    }

    fn small_spec() -> CodeSpec {
        let il = Interleaver::spread_random(500, 15, 2).unwrap();
        let p = PuncturePattern::from_octal("243", 9).unwrap();
        CodeSpec::new(reference_trellis(), il, p, p, true, 1000).unwrap()
    }

    #[test]
    fn noiseless_sweep_has_no_errors() {
        let cfg = ZSweepConfig {
            crossovers: vec![0.0],
            stop: StopRule { max_blocks: 20, ..Default::default() },
            seed: 1,
            decoder: DecoderConfig::default(),
            code: "reference".into(),
        };
        let r = run_zsweep(&small_spec(), &cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].errors.bit_errors, 0);
        assert_eq!(r[0].errors.frames, 20);
        assert_eq!(r[0].stop_reason, StopReason::BlockBudget);
        assert!((r[0].capacity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_is_reproducible_and_stops_on_errors() {
        let spec = small_spec();
        let cfg = ZSweepConfig {
            crossovers: vec![0.85, 0.1],
            stop: StopRule { max_blocks: 50, error_target: 100, batch: 3 },
            seed: 5,
            decoder: DecoderConfig::default(),
            code: String::new(),
        };
        let a = run_zsweep(&spec, &cfg).unwrap();
        assert_eq!(a.len(), 2);
        // far above capacity: stops on the error target
        assert_eq!(a[0].stop_reason, StopReason::ErrorTarget);
        assert!(a[0].above_capacity && a[0].gap < 0.0, "{:?} {}", a[0].rate, a[0].gap);
        let cfg2 = ZSweepConfig { stop: StopRule { batch: 7, ..cfg.stop }, ..cfg.clone() };
        let b = run_zsweep(&spec, &cfg2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.csv_row(), y.csv_row());
        }
    }

    #[test]
    fn audit_flags_tampering() {
        let mut f = CodeFile::from_spec(&small_spec(), false);
        f.declared.metric = Some(DistanceMetric::Z);
        f.declared.ones = Some(349);
        let clean = audit_code(&f, None, Some(8)).unwrap();
        f.declared.branch_distance = Some(clean.distances.branch_distance);
        f.declared.merge_distance = Some(clean.distances.merge_distance);
        f.declared.effective_free_distance = Some(clean.free_distance.distance);
        assert!(audit_code(&f, None, Some(8)).unwrap().ok());
        f.labels[0][0] = "535".into();
        let r = audit_code(&f, None, Some(8)).unwrap();
        assert!(!r.ok());
        assert!(r.mismatches.iter().any(|m| m.field == "ones"));
    }

    #[test]
    fn audit_of_all_zero_table() {
        let zeros = TableTrellis::from_labels(TrellisTopology::duo_binary_16(), 9, &[0; 64]).unwrap();
        let r = audit_code(&CodeFile::from_trellis(&zeros), Some(DistanceMetric::Hamming), None).unwrap();
        assert_eq!(r.distances.branch_distance, 0);
        assert_eq!(r.distances.merge_distance, 0);
        assert_eq!(r.ones, 0);
        assert!(r.ok());
    }
}
