use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hmts_core::capacity::{stream_mutual_information, MiMethod};
use hmts_core::constellation::{build_16apsk, Apsk16Params};
use hmts_core::pairing::{strategy_a, strategy_b};
use hmts_core::rates::evaluate_pair;
use hmts_core::sim::run_trial;
use hmts_core::{Receiver, StreamRole, Strategy, ThresholdTable};

// Deterministic spread of SNRs over the beam range, no RNG needed.
fn snrs(n: usize) -> Vec<f64> {
    (0..n).map(|i| 4.0 + 6.0 * ((i as f64 * 0.618_033_988_75).fract())).collect()
}

fn mutual_information(c: &mut Criterion) {
    let apsk = build_16apsk(Apsk16Params::new(2.3, 28.4).unwrap()).unwrap();
    c.bench_function("mi_he_quadrature_16", |b| {
        b.iter(|| stream_mutual_information(&apsk, StreamRole::He, black_box(8.0), &MiMethod::default()))
    });
}

fn rates(c: &mut Criterion) {
    let t = ThresholdTable::paper_default();
    c.bench_function("evaluate_pair", |b| b.iter(|| evaluate_pair(black_box(7.0), black_box(10.0), &t)));
}

fn pairing(c: &mut Criterion) {
    let s = snrs(500);
    c.bench_function("strategy_a_500", |b| b.iter(|| strategy_a(black_box(&s))));
    c.bench_function("strategy_b_500", |b| b.iter(|| strategy_b(black_box(&s))));
}

fn trial(c: &mut Criterion) {
    let t = ThresholdTable::paper_default();
    let pop: Vec<Receiver> = snrs(500).into_iter().map(Receiver::personal).collect();
    c.bench_function("run_trial_500_a", |b| b.iter(|| run_trial(black_box(&pop), Strategy::A, &t, 1)));
}

criterion_group!(benches, mutual_information, rates, pairing, trial);
criterion_main!(benches);
