//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p rnc-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rnc_core::automata::prime::{HOLD, LOW, RESET, SET};
use rnc_core::automata::{
    characteristic_semigroup, compose, compose_cascade, compose_network, flipflop_semiautomaton, group_semiautomaton,
    is_group_free, toggle_semiautomaton, CascadeSpec, GroupTable, PrimeKind, SpecBuilder, Wiring,
};
use rnc_core::compiler::{
    alternation_probe, check_equivalence, check_homomorphism, compare_word, compile, default_grounding,
    NeuronChoice, Rnc,
};
use rnc_core::neurons::{
    first_large_increment, make_c2_sign, make_c2_tanh, make_sign_flipflop, make_sign_toggle, make_tanh_flipflop,
    make_tanh_toggle, optimal_tanh_ab, state_interpretation, trajectory, verify_core_conditions, Interval, Method, NeuronSpec,
    CORNER_TOLERANCE, GRID_TOLERANCE,
};
use rnc_core::patterns::{
    cookie_cascade, cookie_reference, parity_spec, probability_letter, swap_network, ttop_cascade, ttop_transducer,
    FnTransducer, COOKIE_LETTERS,
};
use rnc_core::semigroups::{generate_semigroup, has_nontrivial_group_divisor, is_aperiodic, Transformation};

const SEED: u64 = 20240917;
const TRIALS: usize = 100;
/// Tolerance for the grid and corner checks.
const TOL: f64 = 1e-12;
/// Smallest neuron increment still counted as movement in criterion 9.
const CONVERGED: f64 = 1e-9;
/// Points per axis: 32 x 32 = 1024 points per box.
const GRID: usize = 32;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} ({:.2} s", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        o.detail.push_str(&format!(", limit {} s", limit.as_secs()));
        if took > limit {
            o.passed = false;
        }
    }
    o.detail.push(')');
    o
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ criterion)
}

/// Every finite end of every interval pushed outward by `delta`, one at a
/// time.
fn widened_variants(spec: &NeuronSpec, delta: f64) -> Vec<(String, NeuronSpec)> {
    let mut out = Vec::new();
    let states = spec.state_names().into_iter().zip(spec.state_intervals().to_vec()).map(|(n, i)| (true, n, i));
    let inputs = spec.input_names().into_iter().zip(spec.input_intervals().to_vec()).map(|(n, i)| (false, n, i));
    for (is_state, name, iv) in states.chain(inputs) {
        let ends = [
            (iv.lo.is_finite(), Interval { lo: iv.lo - delta, hi: iv.hi }, "lo"),
            (iv.hi.is_finite(), Interval { lo: iv.lo, hi: iv.hi + delta }, "hi"),
        ];
        for (finite, moved, end) in ends {
            if !finite {
                continue;
            }
            let mutated = if is_state {
                spec.with_state_interval(&name, moved)
            } else {
                spec.with_input_interval(&name, moved)
            };
            out.push((format!("{name}.{end}"), mutated.expect("widened interval is valid")));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut rng = rng(1);
    let mut mutations = 0;
    for trial in 0..TRIALS {
        let w = 10.0 * (1.0 - rng.random::<f64>());
        let a = rng.random_range(1e-6..1.0 - 1e-6);
        let spec = make_sign_flipflop(w, a).expect("valid parameters");
        let report = verify_core_conditions(&spec, 100);
        if !report.passed_by(Method::CornerExact) || !report.passed() {
            return outcome(false, format!("trial {trial}: w={w}, a={a} failed its own conditions"));
        }
        for (what, mutated) in widened_variants(&spec, 1e-6 * w) {
            mutations += 1;
            if verify_core_conditions(&mutated, 100).passed() {
                return outcome(false, format!("trial {trial}: w={w}, a={a}: mutation of {what} undetected"));
            }
        }
    }
    outcome(true, format!("{TRIALS}/{TRIALS} pass corner-exactly, {mutations}/{mutations} mutations detected"))
}

fn criterion_2() -> Outcome {
    if GRID_TOLERANCE != TOL || CORNER_TOLERANCE != TOL {
        return outcome(false, format!("tolerances drifted from {TOL:e}"));
    }
    let mut rng = rng(2);
    for trial in 0..TRIALS {
        let w = 10.0 - rng.random::<f64>() * (10.0 - 1.01);
        let (a, b) = optimal_tanh_ab(w).expect("w > 1");
        let spec = make_tanh_flipflop(w, a, b).expect("optimal a, b are valid");
        let report = verify_core_conditions(&spec, GRID);
        if !report.passed_by(Method::CornerExact) || !report.passed_by(Method::Grid) {
            let first = report.failures().next().map(|f| f.condition.clone()).unwrap_or_default();
            return outcome(false, format!("trial {trial}: w={w}: {first}"));
        }
    }
    outcome(true, format!("{TRIALS}/{TRIALS} pass at corners and on {GRID}x{GRID} grids, tol {TOL:e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    type Maker = Box<dyn Fn(&mut ChaCha8Rng) -> NeuronSpec>;
    let suites: Vec<(&str, Maker)> = vec![
        ("sign toggle", Box::new(|r| make_sign_toggle(-10.0 * (1.0 - r.random::<f64>()), r.random_range(1e-6..1.0 - 1e-6)).unwrap())),
        (
            "tanh toggle",
            Box::new(|r| {
                let w = 10.0 - r.random::<f64>() * (10.0 - 1.01);
                let (a, b) = optimal_tanh_ab(w).unwrap();
                make_tanh_toggle(-w, a, b).unwrap()
            }),
        ),
        ("C2 sign (a, w > 0)", Box::new(|r| make_c2_sign(10.0 * (1.0 - r.random::<f64>()), 1.0 - r.random::<f64>()).unwrap())),
        ("C2 sign (a, w < 0)", Box::new(|r| make_c2_sign(-10.0 * (1.0 - r.random::<f64>()), r.random::<f64>() - 1.0).unwrap())),
        ("C2 tanh (a, w > 0)", Box::new(|r| make_c2_tanh(10.0 * (1.0 - r.random::<f64>()), 2.0 * (1.0 - r.random::<f64>())).unwrap())),
        ("C2 tanh (a, w < 0)", Box::new(|r| make_c2_tanh(-10.0 * (1.0 - r.random::<f64>()), 2.0 * (r.random::<f64>() - 1.0)).unwrap())),
    ];
    for (name, make) in &suites {
        for trial in 0..TRIALS {
            let spec = make(&mut rng);
            let report = verify_core_conditions(&spec, 100);
            if !report.passed() {
                let first = report.failures().next().map(|f| f.condition.clone()).unwrap_or_default();
                return outcome(false, format!("{name} trial {trial} (w={}): {first}", spec.w()));
            }
        }
    }
    outcome(true, format!("{} suites x {TRIALS} trials pass", suites.len()))
}

fn random_transformation_semigroups(rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Transformation>> {
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(1..=4);
        let k = rng.random_range(1..=3);
        let gens: Vec<Transformation> = (0..k)
            .map(|_| Transformation::new((0..n).map(|_| rng.random_range(0..n)).collect()).unwrap())
            .collect();
        if generate_semigroup(&gens).map(|s| s.len() <= 64).unwrap_or(false) {
            out.push(gens);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let ff = flipflop_semiautomaton(&[("s", "set"), ("r", "reset"), ("n", "read")]).unwrap();
    let toggle = toggle_semiautomaton(&[("t", "toggle")]).unwrap();
    let c2 = group_semiautomaton(GroupTable::cyclic(2), &[("0", "0"), ("1", "1")]).unwrap();
    let c3 = group_semiautomaton(GroupTable::cyclic(3), &[("1", "1")]).unwrap();
    let expected = [("flip-flop", &ff, true), ("toggle", &toggle, false), ("C2", &c2, false), ("C3", &c3, false)];
    for (name, s, aperiodic) in expected {
        let sg = characteristic_semigroup(s).unwrap();
        if is_aperiodic(&sg) != aperiodic {
            return outcome(false, format!("{name}: is_aperiodic = {}", !aperiodic));
        }
    }
    let mut semigroups: Vec<_> = [&ff, &toggle, &c2, &c3].iter().map(|s| characteristic_semigroup(s).unwrap()).collect();
    semigroups.push(characteristic_semigroup(&compose_network(&swap_network().unwrap()).unwrap()).unwrap());
    semigroups.push(characteristic_semigroup(&compose(&cookie_cascade().unwrap()).unwrap()).unwrap());
    semigroups.push(characteristic_semigroup(&compose(&parity_spec().unwrap().1).unwrap()).unwrap());
    for gens in random_transformation_semigroups(&mut rng(4), 300) {
        semigroups.push(generate_semigroup(&gens).unwrap());
    }
    let mut checked = 0;
    for s in semigroups.iter().filter(|s| s.len() <= 64) {
        checked += 1;
        if is_aperiodic(s) == has_nontrivial_group_divisor(s).unwrap() {
            return outcome(false, format!("disagreement on a semigroup of {} elements", s.len()));
        }
    }
    outcome(true, format!("oracle agrees on {checked} semigroups; flip-flop aperiodic; toggle, C2, C3 not"))
}

fn random_flipflop_cascade(rng: &mut ChaCha8Rng) -> CascadeSpec {
    let sigma = rng.random_range(1..=3);
    let letters: Vec<String> = (0..sigma).map(|l| format!("s{l}")).collect();
    let d = rng.random_range(1..=3);
    let mut b = SpecBuilder::new(&letters, Wiring::Cascade);
    for i in 0..d {
        b.declare(format!("f{i}"), PrimeKind::FlipFlop, rng.random_range(0..2));
    }
    for i in 0..d {
        let reads: Vec<usize> = (0..i).collect();
        b.wire(i, &reads, |_, _| [SET, RESET, HOLD][rng.random_range(0..3)]).unwrap();
    }
    b.build().unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    for trial in 0..50 {
        let spec = random_flipflop_cascade(&mut rng);
        if !is_group_free(&compose_cascade(&spec).unwrap()).unwrap() {
            return outcome(false, format!("cascade {trial} flattens to a semiautomaton with a group"));
        }
    }
    let network = compose_network(&swap_network().unwrap()).unwrap();
    if is_group_free(&network).unwrap() {
        return outcome(false, "swap network fixture flattens group-free");
    }
    outcome(true, "50/50 flip-flop cascades group-free; swap network not group-free")
}

fn tanh_choice(w: f64) -> NeuronChoice {
    NeuronChoice::tanh(w)
}

fn compiled(spec: &CascadeSpec, w: f64) -> Rnc {
    compile(spec, &[tanh_choice(w)], &default_grounding(spec.alphabet()).unwrap()).unwrap()
}

fn criterion_6() -> Outcome {
    let spec = ttop_cascade(4).unwrap();
    let r = compiled(&spec, 2.0);
    let report = check_equivalence(&r, &ttop_transducer(4).unwrap(), 200, 40, SEED).unwrap();
    let detail = format!("{}/{} sequences agree over {} neurons", report.agreeing, report.trials, r.len());
    match report.first_mismatch {
        None => outcome(true, detail),
        Some(m) => outcome(false, format!("{detail}; first mismatch trial {} step {}", m.trial, m.step)),
    }
}

fn belief_transducer() -> impl rnc_core::automata::Transducer {
    FnTransducer::new(COOKIE_LETTERS.iter().map(|s| s.to_string()).collect(), |letters: &[usize]| {
        let obs: Vec<_> = letters.iter().map(|&l| rnc_core::patterns::CookieObservation::from_letter(l).unwrap()).collect();
        rnc_core::patterns::cookie_belief(&obs)
            .unwrap()
            .into_iter()
            .map(|p| probability_letter(p).unwrap().to_string())
            .collect()
    })
}

fn criterion_7() -> Outcome {
    let spec = cookie_cascade().unwrap();
    let r = compiled(&spec, 2.0);
    let truth = belief_transducer();
    let mut rng = rng(7);
    let mut agreeing = 0;
    for seed in 0..100 {
        let ep = cookie_reference(seed, 100);
        let letters: Vec<usize> = ep.observations.iter().map(|o| o.letter().unwrap()).collect();
        let want: Vec<&str> = ep.probabilities.iter().map(|&p| probability_letter(p).unwrap()).collect();
        let predicted: Vec<&str> =
            spec.run_outputs(&letters).unwrap().into_iter().map(|y| ["0", "0.5", "1"][y]).collect();
        if predicted == want && compare_word(&r, &truth, &letters, &mut rng).is_none() {
            agreeing += 1;
        }
    }
    outcome(agreeing == 100, format!("{agreeing}/100 episodes: cascade and compiled RNC match ground truth"))
}

fn criterion_8() -> Outcome {
    let (automaton, spec) = parity_spec().unwrap();
    let r = compiled(&spec, -2.0);
    let mut rng = rng(8);
    for k in 0..=1000 {
        if let Some(m) = compare_word(&r, &automaton, &vec![0; k], &mut rng) {
            return outcome(false, format!("a^{k}: step {} expected {} got {}", m.step, m.expected, m.got));
        }
    }
    // noise at the very edge of the radius on every step
    let g = r.grounding();
    for edge in [-g.radius(), g.radius()] {
        let inputs = vec![g.midpoint(0) + edge; 1000];
        let out = r.run(&inputs).unwrap().outputs;
        if out.iter().enumerate().any(|(t, y)| y != if t % 2 == 0 { "1" } else { "0" }) {
            return outcome(false, format!("constant input {} breaks alternation", inputs[0]));
        }
    }
    if !alternation_probe(&r, "a", 1000).unwrap() {
        return outcome(false, "interpretation stops alternating");
    }
    outcome(true, "a^k equal for k = 0..=1000 with noise; interpretation alternates for 1000 steps")
}

/// `v* + 2^-n` for `n = 1..=steps`.
fn perturbed(v: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|n| v + 0.5f64.powi(n as i32)).collect()
}

/// A point of `iv` leaving room for the largest perturbation.
fn inner_point(rng: &mut ChaCha8Rng, iv: &Interval) -> f64 {
    let slack = 0.1 * iv.length();
    rng.random_range(iv.lo + slack..=iv.hi - 0.5 - slack)
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let steps = 1000;
    for trial in 0..TRIALS {
        let spec = if trial % 2 == 0 {
            let w = rng.random_range(2.0..=10.0);
            let (a, b) = optimal_tanh_ab(w).unwrap();
            make_tanh_flipflop(w, a, b).unwrap()
        } else {
            make_sign_flipflop(rng.random_range(2.0..=10.0), rng.random_range(0.01..0.5)).unwrap()
        };
        let v = inner_point(&mut rng, &spec.input_interval("read").unwrap());
        let x0 = rng.random_range(-1.0..=1.0);
        let xs = trajectory(|x, v| spec.step(x, v), x0, &perturbed(v, steps));
        if let Some(n) = first_large_increment(&xs, 200, CONVERGED) {
            return outcome(false, format!("flip-flop trial {trial} (w={}): |x_{{n+1}} - x_n| >= 1e-9 at n={n}", spec.w()));
        }
    }
    for trial in 0..TRIALS {
        let spec = if trial % 2 == 0 {
            let w = rng.random_range(2.0..=10.0);
            let (a, b) = optimal_tanh_ab(w).unwrap();
            make_tanh_toggle(-w, a, b).unwrap()
        } else {
            make_sign_toggle(-rng.random_range(2.0..=10.0), rng.random_range(0.01..0.5)).unwrap()
        };
        let v = inner_point(&mut rng, &spec.input_interval("toggle").unwrap());
        let x0 = spec.state_intervals()[LOW].representative();
        let xs = trajectory(|x, v| spec.step(x, v), x0, &perturbed(v, steps));
        let psi: Vec<Option<usize>> = xs.iter().map(|&x| spec.interpret(x)).collect();
        if psi.windows(2).any(|p| p[0].is_none() || p[0] == p[1]) {
            return outcome(false, format!("toggle trial {trial} (w={}) stops alternating", spec.w()));
        }
    }
    outcome(true, format!("{TRIALS}/{TRIALS} flip-flops settle by n=200; {TRIALS}/{TRIALS} toggles alternate for {steps} steps"))
}

fn criterion_10() -> Outcome {
    let samples = 10_000;
    let ttop = ttop_cascade(4).unwrap();
    let cookie = cookie_cascade().unwrap();
    let parity = parity_spec().unwrap().1;
    let cases = [("TTOP", &ttop, 2.0), ("Cookie", &cookie, 2.0), ("parity", &parity, -2.0)];
    let mut rncs = Vec::new();
    for (name, spec, w) in cases {
        let r = compiled(spec, w);
        let report = check_homomorphism(&r, spec, samples, SEED).unwrap();
        if !report.passed() || report.samples != samples {
            return outcome(false, format!("{name}: {} violations in {} samples", report.violations, report.samples));
        }
        rncs.push((name, r));
    }
    // F1 reads on most letters; widen its read interval past the bound
    let r = &rncs[1].1;
    let spec = &r.neurons()[0].spec;
    let read = spec.input_interval("read").unwrap();
    let r = r.with_neuron_spec(0, spec.with_input_interval("read", read.widened(0.1)).unwrap()).unwrap();
    let first = check_homomorphism(&r, &cookie, samples, SEED).unwrap();
    let again = check_homomorphism(&r, &cookie, samples, SEED).unwrap();
    let Some(w) = first.witnesses.first() else {
        return outcome(false, "sabotaged RNC passed");
    };
    let replay = r.neurons()[0].spec.step(w.x[0], w.v[0]);
    let reproducible = first == again && state_interpretation(&r.neurons()[0].spec, replay) != Some(w.expected[0].clone());
    outcome(
        reproducible,
        format!("3 RNCs x {samples} samples clean; sabotaged F1: {} violations, witness replays", first.violations),
    )
}

/// Label, time limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sign flip-flop conditions", Some(5), criterion_1),
        ("tanh flip-flop conditions", Some(10), criterion_2),
        ("toggle and C2 conditions", None, criterion_3),
        ("aperiodicity agreement", None, criterion_4),
        ("flip-flop cascades are group-free", None, criterion_5),
        ("TTOP end-to-end", Some(30), criterion_6),
        ("Cookie end-to-end", None, criterion_7),
        ("parity with a negative weight", None, criterion_8),
        ("convergence and alternation", None, criterion_9),
        ("homomorphism checker soundness", None, criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        let o = timed(limit.map(Duration::from_secs), f);
        println!("[{}] {label}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
