use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rnc_core::automata::{flatten_automaton, is_group_free};
use rnc_core::compiler::{check_homomorphism, compile, default_grounding, NeuronChoice};
use rnc_core::patterns::{cookie_cascade, price_letters, random_prices, ttop_cascade};

fn ttop(c: &mut Criterion) {
    let spec = ttop_cascade(4).unwrap();
    let grounding = default_grounding(spec.alphabet()).unwrap();
    let choices = [NeuronChoice::tanh(2.0)];
    let mut group = c.benchmark_group("ttop4");
    group.sample_size(10);
    group.bench_function("build", |b| b.iter(|| ttop_cascade(black_box(4)).unwrap()));
    group.bench_function("compile", |b| b.iter(|| compile(black_box(&spec), &choices, &grounding).unwrap()));

    let r = compile(&spec, &choices, &grounding).unwrap();
    let prices = random_prices(&mut ChaCha8Rng::seed_from_u64(1), 4, 40);
    let inputs: Vec<f64> = price_letters(&prices, 4).unwrap().iter().map(|&l| r.grounding().midpoint(l)).collect();
    group.bench_function("run_40", |b| b.iter(|| r.run(black_box(&inputs)).unwrap()));
    group.bench_function("homomorphism_1e3", |b| b.iter(|| check_homomorphism(&r, &spec, 1000, black_box(7)).unwrap()));
    group.finish();
}

fn cookie(c: &mut Criterion) {
    let spec = cookie_cascade().unwrap();
    let r = compile(&spec, &[NeuronChoice::tanh(2.0)], &default_grounding(spec.alphabet()).unwrap()).unwrap();
    c.bench_function("cookie/homomorphism_1e4", |b| b.iter(|| check_homomorphism(&r, &spec, 10_000, black_box(7)).unwrap()));
}

fn group_free(c: &mut Criterion) {
    let a = flatten_automaton(&ttop_cascade(2).unwrap()).unwrap();
    c.bench_function("ttop2/is_group_free", |b| b.iter(|| is_group_free(black_box(a.semiautomaton())).unwrap()));
}

criterion_group!(benches, ttop, cookie, group_free);
criterion_main!(benches);
