//! `nlturbo`: design, audit and simulate nonlinear turbo codes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use nlturbo_core::channel::{
    bbsc_f1, bbsc_f2, bbsc_margins, bbsc_region, bsc_capacity, pick_p1, z_capacity,
    z_optimal_ones_density,
};
use nlturbo_core::designer::design_trellis;
use nlturbo_core::sim::{
    audit_code, run_bbsc, run_zsweep, z_crossover_for_gap, BbscConfig, SimReport, StopRule,
    ZSweepConfig, FULL_GAPS,
};
use nlturbo_core::turbo::{measure_ones_density, PUNCTURE_TABLE};
use nlturbo_core::{
    Algorithm, CodeFile, CodeSpec, DecoderConfig, DesignParams, DistanceMetric, SuperpositionSpec,
    TrellisTopology,
};

/// Exit status for a failed check or rejected input.
const EXIT_VALIDATION: u8 = 2;
/// Exit status for malformed command lines and I/O failures.
const EXIT_USAGE: u8 = 1;

#[derive(Parser)]
#[command(name = "nlturbo", version, about = "Nonlinear turbo codes with a target ones density")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a constituent trellis with a target ones density.
    Design(DesignArgs),
    /// Recompute distances, density and rate of a code file.
    Audit(AuditArgs),
    /// Capacity of a Z-channel or BSC.
    Capacity(CapacityArgs),
    /// Broadcast BSC rate region and ones-density selection.
    Region(RegionArgs),
    /// Monte Carlo BER sweep over Z-channel crossovers.
    ZSim(ZSimArgs),
    /// Monte Carlo simulation of two-user superposition over the broadcast BSC.
    BbscSim(BbscArgs),
    /// Measure the ones density of a turbo code.
    Density(DensityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Hamming,
    Z,
}

impl From<MetricArg> for DistanceMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Hamming => DistanceMetric::Hamming,
            MetricArg::Z => DistanceMetric::Z,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    LogMap,
    MaxLogMap,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct DesignArgs {
    /// Target ones density of the table.
    #[arg(long)]
    density: f64,
    /// Output bits per branch.
    #[arg(long, short)]
    n: usize,
    #[arg(long, value_enum, default_value = "z")]
    metric: MetricArg,
    /// Branch distance must exceed this floor.
    #[arg(long, default_value_t = 0)]
    d_b: u32,
    /// Merge distance must reach this floor.
    #[arg(long, default_value_t = 0)]
    d_m: u32,
    #[arg(long, default_value_t = 1000)]
    retries: usize,
    #[arg(long, default_value_t = 1)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exclude the input symbol from the free-distance search.
    #[arg(long)]
    non_systematic: bool,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Code file supplying the state-transition table; defaults to the
    /// 16-state duo-binary topology.
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Information bits per block; makes the output a full turbo code.
    #[arg(long = "info-bits")]
    info_bits: Option<usize>,
    /// Interleaver spread; defaults to floor(sqrt(N/2)).
    #[arg(long)]
    spread: Option<usize>,
    #[arg(long, default_value_t = 0)]
    interleaver_seed: u64,
    /// Octal puncture mask of encoder 1 (1 = removed).
    #[arg(long)]
    puncture1: Option<String>,
    /// Octal puncture mask of encoder 2.
    #[arg(long)]
    puncture2: Option<String>,
    /// Write the code file here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    code: PathBuf,
    /// Defaults to the declared metric, then Hamming.
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Z,
    Bsc,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long, value_enum, default_value = "z")]
    channel: ChannelArg,
    /// Crossover probabilities.
    #[arg(long, short, value_delimiter = ',', required = true)]
    p: Vec<f64>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    /// Rate pair to place; prints the admissible ones-density interval.
    #[arg(long, requires = "r2")]
    r1: Option<f64>,
    #[arg(long, requires = "r1")]
    r2: Option<f64>,
    /// Grid size of the boundary trace over p1 in [0, 1/2].
    #[arg(long, default_value_t = 51)]
    points: usize,
}

#[derive(Args)]
struct DecoderArgs {
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, value_enum, default_value = "log-map")]
    algorithm: AlgorithmArg,
    /// Run every iteration even when decisions stop changing.
    #[arg(long)]
    no_early_stop: bool,
}

impl DecoderArgs {
    fn config(&self) -> DecoderConfig {
        DecoderConfig {
            max_iterations: self.iterations,
            algorithm: match self.algorithm {
                AlgorithmArg::LogMap => Algorithm::LogMap,
                AlgorithmArg::MaxLogMap => Algorithm::MaxLogMap,
            },
            early_stop: !self.no_early_stop,
            ..DecoderConfig::default()
        }
    }
}

#[derive(Args)]
struct StopArgs {
    #[arg(long, default_value_t = 100)]
    max_blocks: usize,
    /// Bit errors after which a point stops; 0 disables.
    #[arg(long, default_value_t = 100)]
    error_target: u64,
    #[arg(long, default_value_t = 8)]
    batch: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl StopArgs {
    fn rule(&self) -> StopRule {
        StopRule { max_blocks: self.max_blocks, error_target: self.error_target, batch: self.batch }
    }
}

#[derive(Args)]
struct PunctureArgs {
    /// Use the puncture masks of the standard table row with rate 1/DEN.
    #[arg(long, value_name = "DEN", conflicts_with_all = ["puncture1", "puncture2"])]
    rate_row: Option<u64>,
    #[arg(long)]
    puncture1: Option<String>,
    #[arg(long)]
    puncture2: Option<String>,
}

impl PunctureArgs {
    fn apply(&self, file: &mut CodeFile) -> anyhow::Result<()> {
        if let Some(den) = self.rate_row {
            let Some(&(_, p1, p2, _)) = PUNCTURE_TABLE.iter().find(|r| r.0 == den) else {
                bail!("no puncture row for rate 1/{den}");
            };
            file.puncture1 = Some(p1.into());
            file.puncture2 = Some(p2.into());
            file.declared.rate = None;
        }
        if let Some(p) = &self.puncture1 {
            file.puncture1 = Some(p.clone());
            file.declared.rate = None;
        }
        if let Some(p) = &self.puncture2 {
            file.puncture2 = Some(p.clone());
            file.declared.rate = None;
        }
        Ok(())
    }
}

#[derive(Args)]
struct ZSimArgs {
    #[arg(long)]
    code: PathBuf,
    #[command(flatten)]
    puncture: PunctureArgs,
    /// Crossover probabilities.
    #[arg(long, short, value_delimiter = ',', conflicts_with = "gap")]
    p: Vec<f64>,
    /// Gaps to capacity in bits; each is converted to a crossover.
    #[arg(long, value_delimiter = ',')]
    gap: Vec<f64>,
    /// Every standard puncture row at gaps 0.05, 0.035 and 0.018 bits.
    #[arg(long, conflicts_with_all = ["p", "gap", "rate_row", "puncture1", "puncture2"])]
    full: bool,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Defaults to CSV for several points and JSON for one.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BbscArgs {
    #[arg(long)]
    user1: PathBuf,
    #[arg(long)]
    user2: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    /// Ones density assumed by the decoders; defaults to a measurement of
    /// user 1's code.
    #[arg(long)]
    p1: Option<f64>,
    /// Blocks used to measure p1.
    #[arg(long, default_value_t = 20)]
    density_blocks: usize,
    /// Also decode user 1 with user 2's codeword known.
    #[arg(long)]
    genie: bool,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    code: PathBuf,
    #[command(flatten)]
    puncture: PunctureArgs,
    #[arg(long, default_value_t = 50)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// A check that ran and failed, as opposed to a usage problem.
#[derive(Debug)]
struct ValidationFailure(String);

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.chain().any(|c| {
                c.downcast_ref::<ValidationFailure>().is_some()
                    || c.downcast_ref::<nlturbo_core::Error>().is_some()
            });
            ExitCode::from(if validation { EXIT_VALIDATION } else { EXIT_USAGE })
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("NLTURBO_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("NLTURBO_THREADS={v:?} is not a count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Design(a) => design(a),
        Command::Audit(a) => audit(a),
        Command::Capacity(a) => capacity(a),
        Command::Region(a) => region(a),
        Command::ZSim(a) => zsim(a),
        Command::BbscSim(a) => bbsc(a),
        Command::Density(a) => density(a),
    }
}

fn load(path: &Path) -> anyhow::Result<CodeFile> {
    CodeFile::from_path(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn design(a: DesignArgs) -> anyhow::Result<()> {
    let topology = match &a.topology {
        Some(p) => load(p)?.topology()?,
        None => TrellisTopology::duo_binary_16(),
    };
    let metric: DistanceMetric = a.metric.into();
    let params = DesignParams {
        d_b: a.d_b,
        d_m: a.d_m,
        max_merge_retries: a.retries,
        num_candidates: a.candidates,
        rng_seed: a.seed,
        systematic: !a.non_systematic,
        max_depth: a.max_depth,
        ..DesignParams::new(a.density, a.n, metric)
    };
    let result = design_trellis(&params, &topology)?;
    let mut file = CodeFile::from_trellis(&result.trellis);
    file.systematic = Some(params.systematic);
    if let Some(k_bits) = a.info_bits {
        file.info_bits = Some(k_bits);
        let symbols = k_bits / topology.k();
        file.interleaver = Some(nlturbo_core::codefile::InterleaverEntry {
            n: Some(symbols),
            s: a.spread,
            seed: a.interleaver_seed,
            permutation: None,
        });
        file.puncture1 = a.puncture1.clone();
        file.puncture2 = a.puncture2.clone();
        file.declared.rate = Some(file.code_spec()?.rate().to_string());
    }
    let d = &mut file.declared;
    d.metric = Some(metric);
    d.ones = Some(result.trellis.total_ones());
    d.branch_distance = Some(result.branch_distance);
    d.merge_distance = Some(result.merge_distance);
    d.effective_free_distance = Some(result.effective_free_distance);
    d.max_depth = Some(a.max_depth.unwrap_or_else(|| nlturbo_core::metrics::default_max_depth(topology.num_states())));
    if let Some(out) = &a.out {
        file.write(out)?;
    }
    let report = json!({
        "config": params,
        "achieved_density": result.achieved_density.to_string(),
        "ones_per_subtable": result.seed_trace.ones_per_subtable,
        "branch_distance": result.branch_distance,
        "merge_distance": result.merge_distance,
        "effective_free_distance": result.effective_free_distance,
        "seed_trace": result.seed_trace,
        "labels": file.labels,
        "code_file": a.out.as_ref().map(|p| p.display().to_string()),
    });
    emit_json(None, &report)
}

fn audit(a: AuditArgs) -> anyhow::Result<()> {
    let file = load(&a.code)?;
    let report = audit_code(&file, a.metric.map(Into::into), a.max_depth)?;
    emit_json(
        None,
        &json!({
            "code": a.code.display().to_string(),
            "metric": report.distances.metric,
            "branch_distance": report.distances.branch_distance,
            "merge_distance": report.distances.merge_distance,
            "effective_free_distance": report.free_distance.distance,
            "free_distance_merged": report.free_distance.merged,
            "free_distance_depth": report.free_distance.depth,
            "max_depth": report.max_depth,
            "systematic": report.systematic,
            "ones": report.ones,
            "table_density": report.table_density.to_string(),
            "rate": report.rate.map(|r| r.to_string()),
            "mismatches": report.mismatches,
        }),
    )?;
    if !report.ok() {
        let fields: Vec<_> = report.mismatches.iter().map(|m| m.field.as_str()).collect();
        return Err(ValidationFailure(format!("declared values disagree: {}", fields.join(", "))).into());
    }
    Ok(())
}

fn capacity(a: CapacityArgs) -> anyhow::Result<()> {
    let rows = a
        .p
        .iter()
        .map(|&p| -> anyhow::Result<_> {
            Ok(match a.channel {
                ChannelArg::Z => json!({
                    "channel": "z",
                    "p": p,
                    "capacity": z_capacity(p)?,
                    "optimal_ones_density": z_optimal_ones_density(p)?,
                }),
                ChannelArg::Bsc => {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(nlturbo_core::Error::InvalidParameter(format!("crossover {p} outside [0, 1]")).into());
                    }
                    json!({ "channel": "bsc", "p": p, "capacity": bsc_capacity(p), "optimal_ones_density": 0.5 })
                }
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    emit_json(None, &rows)
}

fn region(a: RegionArgs) -> anyhow::Result<()> {
    if let (Some(r1), Some(r2)) = (a.r1, a.r2) {
        let sel = pick_p1(a.alpha, a.beta, r1, r2)?;
        let (h, v) = bbsc_margins(a.alpha, a.beta, r1, r2)?;
        return emit_json(
            None,
            &json!({
                "alpha": a.alpha, "beta": a.beta, "r1": r1, "r2": r2,
                "p1_lower": sel.lower, "p1_upper": sel.upper, "p1": sel.p1,
                "f1": bbsc_f1(a.alpha, sel.p1), "f2": bbsc_f2(a.beta, sel.p1),
                "horizontal_margin": h, "vertical_margin": v,
            }),
        );
    }
    if a.points < 2 {
        bail!("--points must be at least 2");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p1", "r1", "r2"])?;
    for i in 0..a.points {
        let pt = bbsc_region(a.alpha, a.beta, 0.5 * i as f64 / (a.points - 1) as f64)?;
        w.write_record([pt.p1.to_string(), pt.r1.to_string(), pt.r2.to_string()])?;
    }
    emit(None, &String::from_utf8(w.into_inner()?)?)
}

fn code_spec(path: &Path, puncture: Option<&PunctureArgs>) -> anyhow::Result<CodeSpec> {
    let mut file = load(path)?;
    if let Some(p) = puncture {
        p.apply(&mut file)?;
    }
    file.code_spec().with_context(|| format!("building the turbo code of {}", path.display()))
}

fn write_reports(reports: &[SimReport], format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    match format {
        Format::Json if reports.len() == 1 => emit_json(out, &reports[0]),
        Format::Json => emit_json(out, &reports),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(r.csv_row())?;
            }
            emit(out, &String::from_utf8(w.into_inner()?)?)
        }
    }
}

fn zsim(a: ZSimArgs) -> anyhow::Result<()> {
    let decoder = a.decoder.config();
    let mut jobs: Vec<(CodeSpec, Vec<f64>)> = Vec::new();
    if a.full {
        let file = load(&a.code)?;
        for (den, p1, p2, _) in PUNCTURE_TABLE {
            let mut f = file.clone();
            f.puncture1 = Some(p1.into());
            f.puncture2 = Some(p2.into());
            f.declared.rate = None;
            let spec = f.code_spec()?;
            let ps = FULL_GAPS
                .iter()
                .map(|&g| z_crossover_for_gap(spec.rate(), g))
                .collect::<nlturbo_core::Result<Vec<_>>>()
                .with_context(|| format!("rate 1/{den}"))?;
            jobs.push((spec, ps));
        }
    } else {
        let spec = code_spec(&a.code, Some(&a.puncture))?;
        let ps = if !a.gap.is_empty() {
            a.gap.iter().map(|&g| z_crossover_for_gap(spec.rate(), g)).collect::<nlturbo_core::Result<Vec<_>>>()?
        } else if !a.p.is_empty() {
            a.p.clone()
        } else {
            bail!("give crossovers with --p, gaps with --gap, or --full");
        };
        jobs.push((spec, ps));
    }
    let mut reports = Vec::new();
    for (spec, crossovers) in jobs {
        let config = ZSweepConfig {
            crossovers,
            stop: a.stop.rule(),
            seed: a.stop.seed,
            decoder,
            code: a.code.display().to_string(),
        };
        for r in run_zsweep(&spec, &config)? {
            eprintln!(
                "rate {} p {:.4} gap {:+.4}: {} errors in {} bits",
                r.rate, r.channel_parameter(), r.gap, r.errors.bit_errors, r.errors.bits
            );
            reports.push(r);
        }
    }
    let format = a.format.unwrap_or(if reports.len() == 1 { Format::Json } else { Format::Csv });
    write_reports(&reports, format, a.out.as_deref())
}

fn bbsc(a: BbscArgs) -> anyhow::Result<()> {
    let spec1 = code_spec(&a.user1, None)?;
    let spec2 = code_spec(&a.user2, None)?;
    let p1 = match a.p1 {
        Some(p) => p,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.stop.seed);
            measure_ones_density(&spec1, a.density_blocks, &mut rng)?.density
        }
    };
    let sup = SuperpositionSpec::new(spec1, spec2, a.alpha, a.beta, p1)?;
    let config = BbscConfig { stop: a.stop.rule(), seed: a.stop.seed, decoder: a.decoder.config(), genie: a.genie };
    let report = run_bbsc(&sup, &config)?;
    emit_json(a.out.as_deref(), &report)
}

fn density(a: DensityArgs) -> anyhow::Result<()> {
    let spec = code_spec(&a.code, Some(&a.puncture))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let est = measure_ones_density(&spec, a.blocks, &mut rng)?;
    emit_json(
        None,
        &json!({
            "code": a.code.display().to_string(),
            "rate": spec.rate().to_string(),
            "blocks": a.blocks,
            "seed": a.seed,
            "ones_density": est.density,
            "stderr": est.stderr,
            "parity_density": est.parity_density,
            "coded_bits": est.coded_bits,
        }),
    )
}
