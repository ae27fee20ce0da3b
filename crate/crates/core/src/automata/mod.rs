//! Finite semiautomata and automata, prime components, cascade and network
//! composition, canonicalization, and group-freeness.
//!
//! Letters and states are strings. States of a flattened product are tuples
//! of component states and are stored in mixed radix (first component most
//! significant) so that large products do not materialize their labels.

mod canonical;
pub mod cascade;
pub mod format;
pub mod prime;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::semigroups::{self, Transformation, TransformationSemigroup};

pub use canonical::canonicalize;
pub use cascade::{
    compose, compose_cascade, compose_network, flatten_automaton, CascadeSpec, ComponentSpec,
    OutputSpec, OutputTiming, SpecBuilder, Wiring, MAX_FLAT_ENTRIES, MAX_TABLE_ENTRIES,
};
pub use prime::{
    flipflop_semiautomaton, group_semiautomaton, toggle_semiautomaton, GroupTable, PrimeKind,
};

/// Separator used when tuples of letters and states are joined into table keys.
pub const SEPARATOR: char = '|';

/// Formats a product state as `(q1,q2,…)`.
pub fn tuple_label<S: AsRef<str>>(parts: &[S]) -> String {
    let inner: Vec<&str> = parts.iter().map(|p| p.as_ref()).collect();
    format!("({})", inner.join(","))
}

/// State set of a semiautomaton.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpace {
    Named(Vec<String>),
    /// Cartesian product of the given component state sets.
    Product(Vec<Vec<String>>),
}

impl StateSpace {
    pub fn len(&self) -> usize {
        match self {
            StateSpace::Named(names) => names.len(),
            StateSpace::Product(parts) => parts.iter().map(Vec::len).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component sizes; a named space is a single component.
    pub fn radices(&self) -> Vec<usize> {
        match self {
            StateSpace::Named(names) => vec![names.len()],
            StateSpace::Product(parts) => parts.iter().map(Vec::len).collect(),
        }
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let radices = self.radices();
        let mut out = vec![0; radices.len()];
        for (slot, &r) in out.iter_mut().zip(&radices).rev() {
            *slot = index % r;
            index /= r;
        }
        out
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        encode_mixed(tuple, &self.radices())
    }

    pub fn name(&self, index: usize) -> String {
        match self {
            StateSpace::Named(names) => names[index].clone(),
            StateSpace::Product(parts) => {
                let tuple = self.decode(index);
                let labels: Vec<&str> =
                    tuple.iter().zip(parts).map(|(&q, names)| names[q].as_str()).collect();
                tuple_label(&labels)
            }
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        match self {
            StateSpace::Named(names) => names.iter().position(|n| n == name),
            StateSpace::Product(parts) => {
                let inner = name.strip_prefix('(')?.strip_suffix(')')?;
                let labels: Vec<&str> = inner.split(',').collect();
                if labels.len() != parts.len() {
                    return None;
                }
                let tuple = labels
                    .iter()
                    .zip(parts)
                    .map(|(l, names)| names.iter().position(|n| n == l))
                    .collect::<Option<Vec<_>>>()?;
                Some(self.encode(&tuple))
            }
        }
    }
}

pub(crate) fn encode_mixed(tuple: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(tuple.len(), radices.len());
    tuple.iter().zip(radices).fold(0, |acc, (&q, &r)| acc * r + q)
}

/// Input function φ: Σ → Π onto an internal alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct InputFunction {
    internal: Vec<String>,
    map: Vec<usize>,
}

impl InputFunction {
    pub fn internal_alphabet(&self) -> &[String] {
        &self.internal
    }

    pub fn apply(&self, letter: usize) -> usize {
        self.map[letter]
    }
}

/// `⟨Σ, Q, δ⟩`, optionally with an input function onto an internal alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Semiautomaton {
    alphabet: Vec<String>,
    input_fn: Option<InputFunction>,
    states: StateSpace,
    // |Q| rows of width |Π| (or |Σ| without an input function)
    transitions: Vec<u32>,
}

fn check_letters(what: &str, letters: &[String]) -> Result<()> {
    if letters.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    let mut seen = HashMap::new();
    for (i, l) in letters.iter().enumerate() {
        if l.is_empty() || l.contains(SEPARATOR) {
            return Err(Error::invalid(format!(
                "{what} entry {l:?} is empty or contains '{SEPARATOR}'"
            )));
        }
        if let Some(j) = seen.insert(l.as_str(), i) {
            return Err(Error::invalid(format!("{what} repeats {l:?} at {j} and {i}")));
        }
    }
    Ok(())
}

impl Semiautomaton {
    /// Builds a semiautomaton from a dense transition table.
    ///
    /// `transitions[q * width + p]` is the successor of state `q` under
    /// internal letter `p` (or external letter when `input_fn` is `None`).
    /// Internal letters never produced by the input function are stripped.
    pub fn new(
        alphabet: Vec<String>,
        input_fn: Option<(Vec<String>, Vec<usize>)>,
        states: StateSpace,
        transitions: Vec<usize>,
    ) -> Result<Self> {
        check_letters("alphabet", &alphabet)?;
        if let StateSpace::Named(names) = &states {
            check_letters("state set", names)?;
        }
        let n = states.len();
        if n == 0 {
            return Err(Error::invalid("state set is empty"));
        }
        let width = match &input_fn {
            Some((internal, _)) => internal.len(),
            None => alphabet.len(),
        };
        if transitions.len() != n * width {
            return Err(Error::invalid(format!(
                "transition table has {} entries, expected {} states × {} letters",
                transitions.len(),
                n,
                width
            )));
        }
        if let Some(bad) = transitions.iter().find(|&&q| q >= n) {
            return Err(Error::invalid(format!("transition target {bad} is not a state")));
        }
        let mut transitions: Vec<u32> = transitions.into_iter().map(|q| q as u32).collect();

        let input_fn = match input_fn {
            None => None,
            Some((internal, map)) => {
                check_letters("internal alphabet", &internal)?;
                if map.len() != alphabet.len() {
                    return Err(Error::invalid(format!(
                        "input function covers {} of {} letters",
                        map.len(),
                        alphabet.len()
                    )));
                }
                if let Some(&bad) = map.iter().find(|&&p| p >= internal.len()) {
                    return Err(Error::invalid(format!(
                        "input function targets internal letter {bad}, outside 0..{}",
                        internal.len()
                    )));
                }
                // keep only internal letters in the image of φ
                let used: Vec<usize> =
                    (0..internal.len()).filter(|p| map.contains(p)).collect();
                if used.len() < internal.len() {
                    let mut stripped = Vec::with_capacity(n * used.len());
                    for q in 0..n {
                        for &p in &used {
                            stripped.push(transitions[q * width + p]);
                        }
                    }
                    transitions = stripped;
                }
                let renumber: HashMap<usize, usize> =
                    used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
                Some(InputFunction {
                    internal: used.iter().map(|&p| internal[p].clone()).collect(),
                    map: map.iter().map(|p| renumber[p]).collect(),
                })
            }
        };

        Ok(Semiautomaton { alphabet, input_fn, states, transitions })
    }

    /// Builds a semiautomaton over named states from a transition function.
    pub fn from_fn(
        alphabet: &[&str],
        states: &[&str],
        mut delta: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut transitions = Vec::with_capacity(states.len() * alphabet.len());
        for q in 0..states.len() {
            for s in 0..alphabet.len() {
                transitions.push(delta(q, s));
            }
        }
        Semiautomaton::new(
            alphabet.iter().map(|s| s.to_string()).collect(),
            None,
            StateSpace::Named(states.iter().map(|s| s.to_string()).collect()),
            transitions,
        )
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn input_function(&self) -> Option<&InputFunction> {
        self.input_fn.as_ref()
    }

    /// Π when an input function is present, Σ otherwise.
    pub fn internal_alphabet(&self) -> &[String] {
        match &self.input_fn {
            Some(f) => &f.internal,
            None => &self.alphabet,
        }
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> String {
        self.states.name(q)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.index_of(name)
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    pub fn internal_index(&self, letter: &str) -> Option<usize> {
        self.internal_alphabet().iter().position(|l| l == letter)
    }

    /// δ on the internal alphabet.
    pub fn step_internal(&self, q: usize, internal: usize) -> usize {
        let width = self.internal_alphabet().len();
        self.transitions[q * width + internal] as usize
    }

    /// δ_φ(q, σ).
    pub fn step(&self, q: usize, letter: usize) -> usize {
        let p = match &self.input_fn {
            Some(f) => f.map[letter],
            None => letter,
        };
        self.step_internal(q, p)
    }

    pub fn run_from(&self, q: usize, letters: &[usize]) -> usize {
        letters.iter().fold(q, |q, &s| self.step(q, s))
    }

    /// The transformation δ_σ induced by external letter `σ`.
    pub fn letter_transformation(&self, letter: usize) -> Transformation {
        Transformation::from_raw((0..self.num_states()).map(|q| self.step(q, letter) as u32).collect())
    }

    #[cfg(test)]
    pub(crate) fn raw_transitions(&self) -> &[u32] {
        &self.transitions
    }
}

/// `⟨Σ, Q, δ, q_init, Γ, θ⟩`. The output θ(q, σ) reads the state before the
/// transition on σ.
#[derive(Debug, Clone, PartialEq)]
pub struct Automaton {
    semi: Semiautomaton,
    initial: usize,
    output_alphabet: Vec<String>,
    // |Q| rows of width |Σ|
    outputs: Vec<u32>,
}

impl Automaton {
    pub fn new(
        semi: Semiautomaton,
        initial: usize,
        output_alphabet: Vec<String>,
        outputs: Vec<usize>,
    ) -> Result<Self> {
        check_letters("output alphabet", &output_alphabet)?;
        if initial >= semi.num_states() {
            return Err(Error::invalid(format!("initial state {initial} is not a state")));
        }
        let expected = semi.num_states() * semi.alphabet().len();
        if outputs.len() != expected {
            return Err(Error::invalid(format!(
                "output table has {} entries, expected {expected}",
                outputs.len()
            )));
        }
        if let Some(bad) = outputs.iter().find(|&&y| y >= output_alphabet.len()) {
            return Err(Error::invalid(format!("output {bad} is not an output letter")));
        }
        Ok(Automaton {
            semi,
            initial,
            output_alphabet,
            outputs: outputs.into_iter().map(|y| y as u32).collect(),
        })
    }

    pub fn semiautomaton(&self) -> &Semiautomaton {
        &self.semi
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn output_alphabet(&self) -> &[String] {
        &self.output_alphabet
    }

    pub fn output(&self, q: usize, letter: usize) -> usize {
        self.outputs[q * self.semi.alphabet().len() + letter] as usize
    }

    /// Output indices for a word of letter indices.
    pub fn run_indices(&self, letters: &[usize]) -> Vec<usize> {
        let mut q = self.initial;
        letters
            .iter()
            .map(|&s| {
                let y = self.output(q, s);
                q = self.semi.step(q, s);
                y
            })
            .collect()
    }

    pub fn letter_indices<S: AsRef<str>>(&self, input: &[S]) -> Result<Vec<usize>> {
        input
            .iter()
            .enumerate()
            .map(|(position, l)| {
                self.semi.letter_index(l.as_ref()).ok_or_else(|| Error::UnknownLetter {
                    letter: l.as_ref().to_string(),
                    position,
                })
            })
            .collect()
    }
}

/// Runs `a` on `input` and returns one output letter per input letter.
pub fn run_automaton<S: AsRef<str>>(a: &Automaton, input: &[S]) -> Result<Vec<String>> {
    let letters = a.letter_indices(input)?;
    Ok(a.run_indices(&letters)
        .into_iter()
        .map(|y| a.output_alphabet[y].clone())
        .collect())
}

/// The semigroup generated by `{δ_σ : σ ∈ Σ}`.
pub fn characteristic_semigroup(s: &Semiautomaton) -> Result<TransformationSemigroup> {
    let gens: Vec<Transformation> =
        (0..s.alphabet().len()).map(|l| s.letter_transformation(l)).collect();
    semigroups::generate_semigroup(&gens)
}

/// Group-freeness via aperiodicity of the characteristic semigroup. Fails only
/// when the semigroup exceeds the generation limit.
pub fn is_group_free(s: &Semiautomaton) -> Result<bool> {
    Ok(semigroups::is_aperiodic(&characteristic_semigroup(s)?))
}

/// Something that maps input words to output words, letter by letter.
pub trait Transducer {
    fn input_alphabet(&self) -> &[String];
    fn transduce(&self, letters: &[usize]) -> Vec<String>;
}

impl Transducer for Automaton {
    fn input_alphabet(&self) -> &[String] {
        self.semi.alphabet()
    }

    fn transduce(&self, letters: &[usize]) -> Vec<String> {
        self.run_indices(letters)
            .into_iter()
            .map(|y| self.output_alphabet[y].clone())
            .collect()
    }
}

/// Finite dynamics with a factored state space, stepped one letter at a time.
pub trait SymbolicDynamics {
    fn alphabet(&self) -> &[String];
    /// Number of states of each component.
    fn component_sizes(&self) -> Vec<usize>;
    fn step_components(&self, state: &[usize], letter: usize) -> Vec<usize>;
}

impl SymbolicDynamics for Semiautomaton {
    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn component_sizes(&self) -> Vec<usize> {
        self.states.radices()
    }

    fn step_components(&self, state: &[usize], letter: usize) -> Vec<usize> {
        let q = self.states.encode(state);
        self.states.decode(self.step(q, letter))
    }
}
