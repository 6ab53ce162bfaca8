use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nlturbo_core::channel::z_transmit;
use nlturbo_core::decode::{bcjr, turbo_decode_with, z_llr, Siso};
use nlturbo_core::designer::design_trellis;
use nlturbo_core::metrics::{effective_free_distance, merge_distance};
use nlturbo_core::trellis::reference_trellis;
use nlturbo_core::turbo::{random_message, PUNCTURE_TABLE};
use nlturbo_core::{CodeSpec, DecoderConfig, DesignParams, DistanceMetric, Interleaver, PuncturePattern, TrellisTopology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(info_bits: usize, rate_den: u64) -> CodeSpec {
    let (_, p1, p2, _) = PUNCTURE_TABLE.iter().copied().find(|r| r.0 == rate_den).unwrap();
    let il = Interleaver::spread_random(info_bits / 2, 70.min(((info_bits / 4) as f64).sqrt() as usize), 1).unwrap();
    let p1 = PuncturePattern::from_octal(p1, 9).unwrap();
    let p2 = PuncturePattern::from_octal(p2, 9).unwrap();
    CodeSpec::new(reference_trellis(), il, p1, p2, true, info_bits).unwrap()
}

fn encode(c: &mut Criterion) {
    let s = spec(20_000, 3);
    let msg = random_message(20_000, &mut ChaCha8Rng::seed_from_u64(1));
    let mut g = c.benchmark_group("encode");
    g.throughput(Throughput::Elements(20_000));
    g.bench_function("reference_rate_1_3_K20000", |b| b.iter(|| s.encode(black_box(&msg)).unwrap()));
    g.finish();
}

fn siso(c: &mut Criterion) {
    let t = reference_trellis();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let steps = 10_000;
    let llrs: Vec<f64> = (0..steps * 9).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let priors = vec![0.0; steps * 4];
    let mut g = c.benchmark_group("bcjr");
    g.throughput(Throughput::Elements(steps as u64));
    for (name, algorithm) in [("log_map", nlturbo_core::Algorithm::LogMap), ("max_log_map", nlturbo_core::Algorithm::MaxLogMap)] {
        let cfg = DecoderConfig { algorithm, ..DecoderConfig::default() };
        g.bench_function(name, |b| b.iter(|| bcjr(&t, black_box(&priors), black_box(&llrs), &cfg).unwrap()));
    }
    g.finish();
}

fn turbo(c: &mut Criterion) {
    let mut g = c.benchmark_group("turbo_decode");
    g.sample_size(10);
    for k in [2_000usize, 20_000] {
        let s = spec(k, 3);
        let siso = Siso::new(s.constituent());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = s.encode(&random_message(k, &mut rng)).unwrap();
        let p = 0.39;
        let llrs: Vec<f64> = z_transmit(p, &cw, &mut rng).iter().map(|&y| z_llr(p, y, 30.0)).collect();
        let cfg = DecoderConfig { early_stop: false, ..DecoderConfig::default() };
        g.throughput(Throughput::Elements(k as u64));
        g.bench_with_input(BenchmarkId::new("10_iterations", k), &llrs, |b, l| {
            b.iter(|| turbo_decode_with(&siso, &s, black_box(l), &cfg).unwrap())
        });
    }
    g.finish();
}

fn distances(c: &mut Criterion) {
    let t = reference_trellis();
    let mut g = c.benchmark_group("distances");
    g.bench_function("merge_distance_z", |b| b.iter(|| merge_distance(black_box(&t), DistanceMetric::Z)));
    g.bench_function("free_distance_z_depth64", |b| {
        b.iter(|| effective_free_distance(black_box(&t), DistanceMetric::Z, 2, 64).unwrap())
    });
    g.finish();
}

fn design(c: &mut Criterion) {
    let topology = TrellisTopology::duo_binary_16();
    let mut g = c.benchmark_group("design");
    g.sample_size(10);
    g.bench_function("u0.621_n9_db2_dm1", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let p = DesignParams { d_b: 2, d_m: 1, rng_seed: seed, ..DesignParams::new(0.621, 9, DistanceMetric::Z) };
            design_trellis(&p, &topology).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, encode, siso, turbo, distances, design);
criterion_main!(benches);
