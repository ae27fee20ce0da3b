//! Homomorphism and equivalence checks of compiled RNCs against symbolic
//! dynamics and automata.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::Rnc;
use crate::automata::{SymbolicDynamics, Transducer};
use crate::error::{Error, Result};
use crate::neurons::format::bound;
use crate::neurons::Interval;

const SHARD: usize = 1024;
const MAX_WITNESSES: usize = 8;
/// Width of the window sampled next to the finite end of a half-line.
const SAMPLE_SPAN: f64 = 10.0;
/// Slack when a successor lands on the boundary of its target interval;
/// tight partitions map corners exactly onto boundaries, up to rounding.
pub const HOMOMORPHISM_TOLERANCE: f64 = 1e-12;

/// Draws from `iv`, hitting each end with probability 1/4.
fn sample_in(rng: &mut ChaCha8Rng, iv: &Interval) -> f64 {
    let iv = iv.truncated(SAMPLE_SPAN);
    match rng.random_range(0..4) {
        0 => iv.lo,
        1 => iv.hi,
        _ => rng.random_range(iv.lo..=iv.hi),
    }
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomomorphismWitness {
    pub x: Vec<f64>,
    pub u: f64,
    pub letter: String,
    /// Inputs fed to the neurons.
    #[serde(serialize_with = "serialize_reals")]
    pub v: Vec<f64>,
    /// Whether the inputs were drawn from the target intervals rather than
    /// taken from the input maps.
    pub jitter: bool,
    pub expected: Vec<String>,
    pub got: Vec<Option<String>>,
}

fn serialize_reals<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct Real(#[serde(with = "bound")] f64);
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&Real(x))?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomomorphismReport {
    pub equation: String,
    pub samples: usize,
    pub checked: usize,
    pub violations: usize,
    pub witnesses: Vec<HomomorphismWitness>,
}

impl HomomorphismReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(mut self, other: HomomorphismReport) -> HomomorphismReport {
        self.samples += other.samples;
        self.checked += other.checked;
        self.violations += other.violations;
        self.witnesses.extend(other.witnesses);
        self.witnesses.truncate(MAX_WITNESSES);
        self
    }
}

const EQUATION: &str = "ψ(f(x, u)) = δ(ψ(x), λ(u))";

fn empty_report() -> HomomorphismReport {
    HomomorphismReport { equation: EQUATION.into(), samples: 0, checked: 0, violations: 0, witnesses: Vec::new() }
}

/// Checks `ψ(f(x, u)) = δ(ψ(x), λ(u))` on `samples` random pairs. Each state
/// `x` is drawn componentwise from the state intervals and each `u` from a
/// letter's region, ends included. Every pair is checked twice: with the
/// exact input-map values, and with inputs drawn anywhere in the input
/// intervals those values name.
///
/// Sampling is split into fixed shards with independent streams, so the
/// report depends only on `seed`, not on the thread count.
pub fn check_homomorphism<D: SymbolicDynamics + Sync>(
    r: &Rnc,
    s: &D,
    samples: usize,
    seed: u64,
) -> Result<HomomorphismReport> {
    let sizes: Vec<usize> = r.neurons().iter().map(|n| n.spec.kind().num_states()).collect();
    if s.component_sizes() != sizes {
        return Err(Error::invalid("symbolic state space does not match the neurons"));
    }
    if s.alphabet() != r.grounding().letters() {
        return Err(Error::invalid("symbolic alphabet does not match the grounding"));
    }
    let shards = samples.div_ceil(SHARD);
    let report = (0..shards)
        .into_par_iter()
        .map(|k| {
            let n = SHARD.min(samples - k * SHARD);
            check_shard(r, s, &sizes, n, &mut shard_rng(seed, k))
        })
        .reduce(empty_report, HomomorphismReport::merge);
    Ok(report)
}

fn check_shard<D: SymbolicDynamics>(r: &Rnc, s: &D, sizes: &[usize], n: usize, rng: &mut ChaCha8Rng) -> HomomorphismReport {
    let mut report = empty_report();
    let g = r.grounding();
    let names = |q: &[usize]| -> Vec<String> {
        q.iter().zip(r.neurons()).map(|(&qi, nr)| nr.spec.state_names()[qi].clone()).collect()
    };
    for _ in 0..n {
        let q: Vec<usize> = sizes.iter().map(|&m| rng.random_range(0..m)).collect();
        let x: Vec<f64> = q
            .iter()
            .zip(r.neurons())
            .map(|(&qi, nr)| sample_in(rng, &nr.spec.state_intervals()[qi]))
            .collect();
        let letter = rng.random_range(0..g.letters().len());
        let u = sample_in(rng, &g.regions()[letter]);
        let expected = s.step_components(&q, g.ground(u).unwrap_or(letter));

        let exact = r.neuron_inputs(&q, letter);
        let jittered: Vec<f64> = r
            .neurons()
            .iter()
            .map(|nr| {
                let p = nr.input_map.target(letter, &q);
                sample_in(rng, &nr.spec.input_intervals()[p])
            })
            .collect();
        report.samples += 1;
        for (v, jitter) in [(exact, false), (jittered, true)] {
            report.checked += 1;
            let next: Vec<f64> = r.neurons().iter().zip(&x).zip(&v).map(|((nr, &xi), &vi)| nr.spec.step(xi, vi)).collect();
            let lands = next.iter().zip(r.neurons()).zip(&expected).all(|((&xi, nr), &q)| {
                let iv = nr.spec.state_intervals()[q];
                iv.lo - HOMOMORPHISM_TOLERANCE <= xi && xi <= iv.hi + HOMOMORPHISM_TOLERANCE
            });
            if !lands {
                report.violations += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(HomomorphismWitness {
                        x: x.clone(),
                        u,
                        letter: g.letters()[letter].clone(),
                        v,
                        jitter,
                        expected: names(&expected),
                        got: next
                            .iter()
                            .zip(r.neurons())
                            .map(|(&xi, nr)| crate::neurons::state_interpretation(&nr.spec, xi))
                            .collect(),
                    });
                }
            }
        }
    }
    report
}

/// Exhaustively checks `ψ(a(q, σ)) = b(ψ(q), σ)` for symbolic dynamics over
/// the same alphabet; returns the first counterexample `(q, σ)`.
pub fn check_symbolic_homomorphism<A: SymbolicDynamics, B: SymbolicDynamics>(
    a: &A,
    b: &B,
    psi: impl Fn(&[usize]) -> Vec<usize>,
    limit: usize,
) -> Result<Option<(Vec<usize>, usize)>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::invalid("alphabets differ"));
    }
    let sizes = a.component_sizes();
    let total = sizes.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).unwrap_or(usize::MAX);
    if total > limit {
        return Err(Error::Capacity { what: "symbolic state space", size: total, limit });
    }
    let mut q = vec![0usize; sizes.len()];
    for _ in 0..total {
        for letter in 0..a.alphabet().len() {
            if psi(&a.step_components(&q, letter)) != b.step_components(&psi(&q), letter) {
                return Ok(Some((q, letter)));
            }
        }
        for (slot, &m) in q.iter_mut().zip(&sizes).rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub step: usize,
    pub letters: Vec<String>,
    pub inputs: Vec<f64>,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub trials: usize,
    pub agreeing: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.agreeing == self.trials
    }
}

/// Midpoint of each letter's region plus noise within the robustness radius,
/// at either end of the noise range with probability 1/4 each.
pub fn noisy_inputs(r: &Rnc, letters: &[usize], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g = r.grounding();
    let noise = Interval { lo: -g.radius(), hi: g.radius() };
    letters.iter().map(|&l| g.midpoint(l) + sample_in(rng, &noise)).collect()
}

/// Runs `r` and `a` on one word; the first differing step, if any.
pub fn compare_word<T: Transducer + ?Sized>(r: &Rnc, a: &T, letters: &[usize], rng: &mut ChaCha8Rng) -> Option<Mismatch> {
    let inputs = noisy_inputs(r, letters, rng);
    let expected = a.transduce(letters);
    let mismatch = |step: usize, expected: String, got: String| Mismatch {
        trial: 0,
        step,
        letters: letters.iter().map(|&l| r.grounding().letters()[l].clone()).collect(),
        inputs: inputs.clone(),
        expected,
        got,
    };
    match r.run(&inputs) {
        Err(e) => {
            let step = match &e {
                Error::Ungroundable { position, .. } => *position,
                Error::InterpretationGap { step, .. } => step.saturating_sub(1),
                _ => 0,
            };
            Some(mismatch(step, expected.get(step).cloned().unwrap_or_default(), e.to_string()))
        }
        Ok(run) => {
            let step = (0..expected.len().max(run.outputs.len())).find(|&t| expected.get(t) != run.outputs.get(t))?;
            Some(mismatch(
                step,
                expected.get(step).cloned().unwrap_or_default(),
                run.outputs.get(step).cloned().unwrap_or_default(),
            ))
        }
    }
}

/// Co-simulates `r` and `a` on `trials` random words of length up to
/// `max_len` with noisy real inputs.
pub fn check_equivalence<T: Transducer + Sync + ?Sized>(
    r: &Rnc,
    a: &T,
    trials: usize,
    max_len: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if a.input_alphabet() != r.grounding().letters() {
        return Err(Error::invalid("automaton alphabet does not match the grounding"));
    }
    let sigma = r.grounding().letters().len();
    let outcomes: Vec<Option<Mismatch>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = shard_rng(seed, trial);
            let len = rng.random_range(0..=max_len);
            let letters: Vec<usize> = (0..len).map(|_| rng.random_range(0..sigma)).collect();
            compare_word(r, a, &letters, &mut rng).map(|m| Mismatch { trial, ..m })
        })
        .collect();
    Ok(EquivalenceReport {
        trials,
        agreeing: outcomes.iter().filter(|m| m.is_none()).count(),
        first_mismatch: outcomes.into_iter().flatten().next(),
    })
}

/// True when neuron 0's interpretation changes at every one of `steps`
/// steps under the constant input `letter`.
pub fn alternation_probe(r: &Rnc, letter: &str, steps: usize) -> Result<bool> {
    let l = r
        .grounding()
        .letters()
        .iter()
        .position(|g| g == letter)
        .ok_or_else(|| Error::UnknownLetter { letter: letter.into(), position: 0 })?;
    let mut x = r.initial().to_vec();
    let Some(mut q) = r.interpret(&x) else {
        return Ok(false);
    };
    for _ in 0..steps {
        x = r.step_with(&x, &q, l);
        match r.interpret(&x) {
            Some(next) if next[0] != q[0] => q = next,
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{compose, toggle_semiautomaton, Automaton, OutputSpec, OutputTiming};
    use crate::compiler::tests::parity_spec;
    use crate::compiler::{compile, default_grounding, NeuronChoice};

    fn parity_rnc() -> Rnc {
        compile(&parity_spec(), &[NeuronChoice::tanh(-2.0)], &default_grounding(&["a"]).unwrap()).unwrap()
    }

    fn parity_automaton() -> Automaton {
        let semi = toggle_semiautomaton(&[("a", "toggle")]).unwrap();
        Automaton::new(semi, 0, vec!["0".into(), "1".into()], vec![1, 0]).unwrap()
    }

    #[test]
    fn parity_homomorphism() {
        let r = parity_rnc();
        let flat = compose(&parity_spec()).unwrap();
        let report = check_homomorphism(&r, &flat, 1000, 7).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 2000);
        assert_eq!(report, check_homomorphism(&r, &flat, 1000, 7).unwrap());
    }

    #[test]
    fn identity_symbolic_homomorphism() {
        let flat = compose(&parity_spec()).unwrap();
        assert_eq!(check_symbolic_homomorphism(&flat, &flat, |q| q.to_vec(), 100).unwrap(), None);
        assert_eq!(check_symbolic_homomorphism(&parity_spec(), &flat, |q| q.to_vec(), 100).unwrap(), None);
    }

    #[test]
    fn sabotaged_toggle_detected() {
        let r = parity_rnc();
        let spec = &r.neurons()[0].spec;
        let toggle = spec.input_interval("toggle").unwrap();
        let sabotaged = r.with_neuron_spec(0, spec.with_input_interval("toggle", toggle.widened(0.1)).unwrap()).unwrap();
        let flat = compose(&parity_spec()).unwrap();
        let report = check_homomorphism(&sabotaged, &flat, 1000, 1).unwrap();
        assert!(!report.passed());
        assert!(report.witnesses[0].jitter);
    }

    #[test]
    fn parity_equivalence() {
        let report = check_equivalence(&parity_rnc(), &parity_automaton(), 100, 100, 3).unwrap();
        assert!(report.passed(), "{:?}", report.first_mismatch);
    }

    #[test]
    fn swapped_outputs_mismatch_at_first_step() {
        let r = parity_rnc();
        let out = r.output().unwrap();
        let swapped = OutputSpec { table: out.table.iter().map(|&y| 1 - y).collect(), ..out.clone() };
        let bad = r.with_output(Some(swapped)).unwrap();
        let report = check_equivalence(&bad, &parity_automaton(), 20, 10, 3).unwrap();
        let m = report.first_mismatch.unwrap();
        assert_eq!(m.step, 0);
        assert_eq!((m.expected.as_str(), m.got.as_str()), ("1", "0"));
        assert_eq!(out.timing, OutputTiming::Pre);
    }

    #[test]
    fn alternation() {
        assert!(alternation_probe(&parity_rnc(), "a", 1000).unwrap());
        assert!(alternation_probe(&parity_rnc(), "a", 0).unwrap());
    }
}
