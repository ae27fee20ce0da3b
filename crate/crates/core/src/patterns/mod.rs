//! Worked constructions: TTOP detection, the Cookie-domain predictor, odd
//! length (parity) and a two flip-flop network with a group inside.

pub mod cookie;
pub mod ttop;

use serde::{Deserialize, Serialize};

use crate::automata::prime::{HIGH, HOLD, LOW, RESET, SET};
use crate::automata::{
    Automaton, CascadeSpec, OutputTiming, PrimeKind, Semiautomaton, SpecBuilder, Transducer, Wiring,
};
use crate::error::{Error, Result};

pub use cookie::{
    cookie_belief, cookie_cascade, cookie_reference, probability_letter, CookieEpisode, CookieObservation,
    Location, COOKIE_LETTERS, PROBABILITY_LETTERS,
};
pub use ttop::{price_alphabet, price_letters, random_prices, ttop_cascade, ttop_reference, TtopLayout};

/// Odd length over `{a}`: the automaton with states even/odd and the
/// one-toggle cascade. Both output `1` when the word read so far, including
/// the current letter, has odd length.
pub fn parity_spec() -> Result<(Automaton, CascadeSpec)> {
    let semi = Semiautomaton::from_fn(&["a"], &["even", "odd"], |q, _| 1 - q)?;
    let automaton = Automaton::new(semi, 0, vec!["0".into(), "1".into()], vec![1, 0])?;
    let mut b = SpecBuilder::new(&["a"], Wiring::Cascade);
    let t = b.declare("parity", PrimeKind::Toggle, LOW);
    b.wire(t, &[], |_, _| HOLD)?;
    b.output(&["0", "1"], &[t], OutputTiming::Pre, |_, st| 1 - st[0])?;
    Ok((automaton, b.build()?))
}

/// Two flip-flops over `{a}` that copy each other: `x` is set iff `y` was
/// high and vice versa. From `(high, low)` the states swap on every letter,
/// which is a cyclic group of order two.
pub fn swap_network() -> Result<CascadeSpec> {
    let mut b = SpecBuilder::new(&["a"], Wiring::Network);
    let x = b.declare("x", PrimeKind::FlipFlop, HIGH);
    let y = b.declare("y", PrimeKind::FlipFlop, LOW);
    let copy = |_: usize, st: &[usize]| if st[0] == HIGH { SET } else { RESET };
    b.wire(x, &[y], copy)?;
    b.wire(y, &[x], copy)?;
    b.output(&["0", "1"], &[x], OutputTiming::Pre, |_, st| st[0])?;
    b.build()
}

/// A [`Transducer`] from a closure over letter indices.
pub struct FnTransducer<F> {
    alphabet: Vec<String>,
    f: F,
}

impl<F: Fn(&[usize]) -> Vec<String>> FnTransducer<F> {
    pub fn new(alphabet: Vec<String>, f: F) -> Self {
        FnTransducer { alphabet, f }
    }
}

impl<F: Fn(&[usize]) -> Vec<String>> Transducer for FnTransducer<F> {
    fn input_alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn transduce(&self, letters: &[usize]) -> Vec<String> {
        (self.f)(letters)
    }
}

/// The TTOP reference over letter indices of `bits`-bit prices.
pub fn ttop_transducer(bits: usize) -> Result<impl Transducer + Sync> {
    Ok(FnTransducer::new(price_alphabet(bits)?, |letters: &[usize]| {
        let prices: Vec<u64> = letters.iter().map(|&l| l as u64).collect();
        ttop_reference(&prices).into_iter().map(|y| if y { "1" } else { "0" }.to_string()).collect()
    }))
}

/// `prices_*.json`: a JSON array of integers.
pub fn prices_from_json(text: &str) -> Result<Vec<u64>> {
    Ok(serde_json::from_str(text)?)
}

pub fn prices_to_json(prices: &[u64]) -> String {
    serde_json::to_string(prices).expect("serializable")
}

/// One line of `cookie_episode_*.jsonl`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CookieRecord {
    pub t: usize,
    #[serde(flatten)]
    pub observation: CookieObservation,
    pub probability: f64,
}

pub fn episode_to_jsonl(episode: &CookieEpisode) -> String {
    episode
        .observations
        .iter()
        .zip(&episode.probabilities)
        .enumerate()
        .map(|(t, (&observation, &probability))| {
            serde_json::to_string(&CookieRecord { t, observation, probability }).expect("serializable") + "\n"
        })
        .collect()
}

/// Reads an episode; the stored probabilities are kept as written.
pub fn episode_from_jsonl(text: &str) -> Result<CookieEpisode> {
    let mut observations = Vec::new();
    let mut probabilities = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: CookieRecord =
            serde_json::from_str(line).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
        if r.t != observations.len() {
            return Err(Error::Format(format!("line {}: expected t = {}, got {}", i + 1, observations.len(), r.t)));
        }
        r.observation.letter()?;
        observations.push(r.observation);
        probabilities.push(r.probability);
    }
    Ok(CookieEpisode { observations, probabilities })
}
