//! Cascades and networks of prime components.
//!
//! Every component reads the external letter and the states of the
//! components listed in its `reads`, all taken at time `t-1`; the whole
//! state vector is updated at once. In a cascade `reads` may only name
//! earlier components, in a network any component but itself.

use std::collections::{HashMap, VecDeque};

use super::prime::PrimeKind;
use super::{encode_mixed, tuple_label, Automaton, Semiautomaton, StateSpace, SymbolicDynamics};
use crate::error::{Error, Result};

/// Largest flattened transition table (states × letters) [`compose`] builds.
pub const MAX_FLAT_ENTRIES: usize = 1 << 25;
/// Largest input or output table [`SpecBuilder`] enumerates.
pub const MAX_TABLE_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wiring {
    Cascade,
    Network,
}

impl Wiring {
    pub fn tag(self) -> &'static str {
        match self {
            Wiring::Cascade => "cascade",
            Wiring::Network => "network",
        }
    }

    fn permits(self, component: usize, read: usize) -> bool {
        match self {
            Wiring::Cascade => read < component,
            Wiring::Network => read != component,
        }
    }
}

/// Whether the output reads the state before or after the transition on the
/// current letter. Both define a map `Q × Σ → Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputTiming {
    Pre,
    Post,
}

/// One prime component with its exhaustive input table over
/// `Σ × Π_{j ∈ reads} Q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub name: String,
    pub kind: PrimeKind,
    pub reads: Vec<usize>,
    /// Internal letter per (letter, read states), letter most significant.
    pub table: Vec<u16>,
    pub initial: usize,
}

/// Output table over `Σ × Π_{j ∈ reads} Q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub alphabet: Vec<String>,
    pub reads: Vec<usize>,
    pub timing: OutputTiming,
    pub table: Vec<u32>,
}

/// An ordered list of components under a wiring discipline, with an optional
/// output function.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    alphabet: Vec<String>,
    wiring: Wiring,
    components: Vec<ComponentSpec>,
    output: Option<OutputSpec>,
    radices: Vec<usize>,
}

fn table_index(letter: usize, read_states: impl Iterator<Item = (usize, usize)>) -> usize {
    read_states.fold(letter, |acc, (q, r)| acc * r + q)
}

impl CascadeSpec {
    pub fn new(
        alphabet: Vec<String>,
        wiring: Wiring,
        components: Vec<ComponentSpec>,
        output: Option<OutputSpec>,
    ) -> Result<Self> {
        super::check_letters("alphabet", &alphabet)?;
        if components.is_empty() {
            return Err(Error::invalid("no components"));
        }
        let radices: Vec<usize> = components.iter().map(|c| c.kind.num_states()).collect();
        for (i, c) in components.iter().enumerate() {
            check_reads(&format!("component {i} ({})", c.name), &c.reads, components.len(), |j| {
                wiring.permits(i, j)
            })?;
            let expected = alphabet.len() * c.reads.iter().map(|&j| radices[j]).product::<usize>();
            if c.table.len() != expected {
                return Err(Error::invalid(format!(
                    "component {i} ({}) input table has {} entries, expected {expected}",
                    c.name,
                    c.table.len()
                )));
            }
            if let Some(&bad) = c.table.iter().find(|&&p| p as usize >= c.kind.num_internal()) {
                return Err(Error::invalid(format!(
                    "component {i} ({}) input table uses internal letter {bad}",
                    c.name
                )));
            }
            if c.initial >= radices[i] {
                return Err(Error::invalid(format!(
                    "component {i} ({}) initial state {} out of range",
                    c.name, c.initial
                )));
            }
        }
        if let Some(out) = &output {
            super::check_letters("output alphabet", &out.alphabet)?;
            check_reads("output", &out.reads, components.len(), |_| true)?;
            let expected = alphabet.len() * out.reads.iter().map(|&j| radices[j]).product::<usize>();
            if out.table.len() != expected {
                return Err(Error::invalid(format!(
                    "output table has {} entries, expected {expected}",
                    out.table.len()
                )));
            }
            if out.table.iter().any(|&y| y as usize >= out.alphabet.len()) {
                return Err(Error::invalid("output table uses an unknown output letter"));
            }
        }
        Ok(CascadeSpec { alphabet, wiring, components, output, radices })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn wiring(&self) -> Wiring {
        self.wiring
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    pub fn output(&self) -> Option<&OutputSpec> {
        self.output.as_ref()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn initial_state(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.initial).collect()
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    /// Internal letter fed to component `i` when `letter` arrives in `state`.
    pub fn internal_input(&self, i: usize, state: &[usize], letter: usize) -> usize {
        let c = &self.components[i];
        let idx = table_index(letter, c.reads.iter().map(|&j| (state[j], self.radices[j])));
        c.table[idx] as usize
    }

    /// Synchronous update of every component.
    pub fn step(&self, state: &[usize], letter: usize) -> Vec<usize> {
        (0..self.components.len())
            .map(|i| {
                let p = self.internal_input(i, state, letter);
                self.components[i].kind.core_step(state[i], p)
            })
            .collect()
    }

    /// Output for `letter` given the states before and after the transition.
    pub fn output_letter(&self, before: &[usize], after: &[usize], letter: usize) -> Option<usize> {
        let out = self.output.as_ref()?;
        let state = match out.timing {
            OutputTiming::Pre => before,
            OutputTiming::Post => after,
        };
        let idx = table_index(letter, out.reads.iter().map(|&j| (state[j], self.radices[j])));
        Some(out.table[idx] as usize)
    }

    /// Runs from the initial state, returning output letter indices.
    pub fn run_outputs(&self, letters: &[usize]) -> Result<Vec<usize>> {
        if self.output.is_none() {
            return Err(Error::invalid("cascade has no output function"));
        }
        let mut state = self.initial_state();
        Ok(letters
            .iter()
            .map(|&s| {
                let next = self.step(&state, s);
                let y = self.output_letter(&state, &next, s).expect("output present");
                state = next;
                y
            })
            .collect())
    }

    pub fn state_label(&self, state: &[usize]) -> String {
        let labels: Vec<String> = state
            .iter()
            .zip(&self.components)
            .map(|(&q, c)| c.kind.state_names()[q].clone())
            .collect();
        tuple_label(&labels)
    }
}

fn check_reads(what: &str, reads: &[usize], n: usize, permitted: impl Fn(usize) -> bool) -> Result<()> {
    for (k, &j) in reads.iter().enumerate() {
        if j >= n {
            return Err(Error::invalid(format!("{what} reads unknown component {j}")));
        }
        if !permitted(j) {
            return Err(Error::invalid(format!("{what} may not read component {j}")));
        }
        if reads[..k].contains(&j) {
            return Err(Error::invalid(format!("{what} reads component {j} twice")));
        }
    }
    Ok(())
}

impl SymbolicDynamics for CascadeSpec {
    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn component_sizes(&self) -> Vec<usize> {
        self.radices.clone()
    }

    fn step_components(&self, state: &[usize], letter: usize) -> Vec<usize> {
        self.step(state, letter)
    }
}

/// Assembles a [`CascadeSpec`] from closures over decoded read states.
///
/// Components are declared first (so networks can read later components)
/// and wired afterwards.
pub struct SpecBuilder {
    alphabet: Vec<String>,
    wiring: Wiring,
    declared: Vec<(String, PrimeKind, usize)>,
    wired: Vec<Option<(Vec<usize>, Vec<u16>)>>,
    output: Option<OutputSpec>,
}

impl SpecBuilder {
    pub fn new<S: AsRef<str>>(alphabet: &[S], wiring: Wiring) -> Self {
        SpecBuilder {
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            wiring,
            declared: Vec::new(),
            wired: Vec::new(),
            output: None,
        }
    }

    pub fn declare(&mut self, name: impl Into<String>, kind: PrimeKind, initial: usize) -> usize {
        self.declared.push((name.into(), kind, initial));
        self.wired.push(None);
        self.declared.len() - 1
    }

    fn enumerate_table<T>(
        &self,
        reads: &[usize],
        mut f: impl FnMut(usize, &[usize]) -> T,
    ) -> Result<Vec<T>> {
        let radices: Vec<usize> = reads
            .iter()
            .map(|&j| {
                self.declared
                    .get(j)
                    .map(|d| d.1.num_states())
                    .ok_or_else(|| Error::invalid(format!("reads undeclared component {j}")))
            })
            .collect::<Result<_>>()?;
        let combos = radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
        let size = combos.and_then(|c| c.checked_mul(self.alphabet.len())).unwrap_or(usize::MAX);
        if size > MAX_TABLE_ENTRIES {
            return Err(Error::Capacity { what: "component table", size, limit: MAX_TABLE_ENTRIES });
        }
        let combos = size / self.alphabet.len().max(1);
        let mut table = Vec::with_capacity(self.alphabet.len() * combos);
        let mut states = vec![0; reads.len()];
        for letter in 0..self.alphabet.len() {
            for mut k in 0..combos {
                for (slot, &r) in states.iter_mut().zip(&radices).rev() {
                    *slot = k % r;
                    k /= r;
                }
                table.push(f(letter, &states));
            }
        }
        Ok(table)
    }

    /// Wires component `i`: `f(letter, states of reads)` returns an internal
    /// letter index of the component's kind.
    pub fn wire(
        &mut self,
        i: usize,
        reads: &[usize],
        f: impl FnMut(usize, &[usize]) -> usize,
    ) -> Result<()> {
        let table = self.enumerate_table(reads, f)?;
        let table = table.into_iter().map(|p| p as u16).collect();
        self.wired[i] = Some((reads.to_vec(), table));
        Ok(())
    }

    pub fn output<S: AsRef<str>>(
        &mut self,
        alphabet: &[S],
        reads: &[usize],
        timing: OutputTiming,
        f: impl FnMut(usize, &[usize]) -> usize,
    ) -> Result<()> {
        let table = self.enumerate_table(reads, f)?;
        self.output = Some(OutputSpec {
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            reads: reads.to_vec(),
            timing,
            table: table.into_iter().map(|y| y as u32).collect(),
        });
        Ok(())
    }

    pub fn build(self) -> Result<CascadeSpec> {
        let mut components = Vec::with_capacity(self.declared.len());
        for (i, ((name, kind, initial), wired)) in
            self.declared.into_iter().zip(self.wired).enumerate()
        {
            let (reads, table) =
                wired.ok_or_else(|| Error::invalid(format!("component {i} ({name}) not wired")))?;
            components.push(ComponentSpec { name, kind, reads, table, initial });
        }
        CascadeSpec::new(self.alphabet, self.wiring, components, self.output)
    }
}

/// Flattens `spec` into the product semiautomaton on `Q_1 × … × Q_d`.
pub fn compose(spec: &CascadeSpec) -> Result<Semiautomaton> {
    let states = StateSpace::Product(spec.components.iter().map(|c| c.kind.state_names()).collect());
    let n = states.len();
    let entries = n.saturating_mul(spec.alphabet.len());
    if entries > MAX_FLAT_ENTRIES {
        return Err(Error::Capacity { what: "flattened transition table", size: entries, limit: MAX_FLAT_ENTRIES });
    }
    let mut transitions = Vec::with_capacity(entries);
    for q in 0..n {
        let tuple = states.decode(q);
        for s in 0..spec.alphabet.len() {
            transitions.push(encode_mixed(&spec.step(&tuple, s), &spec.radices));
        }
    }
    Semiautomaton::new(spec.alphabet.clone(), None, states, transitions)
}

pub fn compose_cascade(spec: &CascadeSpec) -> Result<Semiautomaton> {
    if spec.wiring != Wiring::Cascade {
        return Err(Error::invalid("compose_cascade called on a network"));
    }
    compose(spec)
}

pub fn compose_network(spec: &CascadeSpec) -> Result<Semiautomaton> {
    if spec.wiring != Wiring::Network {
        return Err(Error::invalid("compose_network called on a cascade"));
    }
    compose(spec)
}

/// The automaton of `spec` restricted to states reachable from its initial
/// state vector. Requires an output function.
pub fn flatten_automaton(spec: &CascadeSpec) -> Result<Automaton> {
    let output = spec.output.as_ref().ok_or_else(|| Error::invalid("cascade has no output function"))?;
    let start = spec.initial_state();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut queue = VecDeque::from([0usize]);
    let sigma = spec.alphabet.len();
    let mut transitions = Vec::new();
    let mut outputs = Vec::new();
    // BFS order equals insertion order, so rows are appended in state order.
    while let Some(q) = queue.pop_front() {
        for s in 0..sigma {
            let next = spec.step(&states[q], s);
            outputs.push(spec.output_letter(&states[q], &next, s).expect("output present"));
            let target = match index.get(&next) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    if (t + 1).saturating_mul(sigma) > MAX_FLAT_ENTRIES {
                        return Err(Error::Capacity {
                            what: "reachable transition table",
                            size: (t + 1) * sigma,
                            limit: MAX_FLAT_ENTRIES,
                        });
                    }
                    index.insert(next.clone(), t);
                    states.push(next);
                    queue.push_back(t);
                    t
                }
            };
            transitions.push(target);
        }
    }
    let names = states.iter().map(|s| spec.state_label(s)).collect();
    let semi = Semiautomaton::new(spec.alphabet.clone(), None, StateSpace::Named(names), transitions)?;
    Automaton::new(semi, 0, output.alphabet.clone(), outputs)
}

#[cfg(test)]
mod tests {
    use super::super::prime::{HIGH, HOLD, LOW, RESET, SET};
    use super::*;
    use crate::automata::{flipflop_semiautomaton, is_group_free};

    fn single_flipflop() -> CascadeSpec {
        let mut b = SpecBuilder::new(&["s", "r", "n"], Wiring::Cascade);
        let c = b.declare("ff", PrimeKind::FlipFlop, LOW);
        b.wire(c, &[], |l, _| [SET, RESET, HOLD][l]).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn single_component_matches_prime() {
        let flat = compose_cascade(&single_flipflop()).unwrap();
        let prime = flipflop_semiautomaton(&[("s", "set"), ("r", "reset"), ("n", "read")]).unwrap();
        for q in 0..2 {
            for s in 0..3 {
                assert_eq!(flat.step(q, s), prime.step(q, s));
            }
        }
        assert_eq!(flat.state_name(HIGH), "(high)");
    }

    #[test]
    fn independent_flipflops_have_four_states() {
        let mut b = SpecBuilder::new(&["a"], Wiring::Cascade);
        for name in ["x", "y"] {
            let c = b.declare(name, PrimeKind::FlipFlop, LOW);
            b.wire(c, &[], |_, _| SET).unwrap();
        }
        let flat = compose_cascade(&b.build().unwrap()).unwrap();
        assert_eq!(flat.num_states(), 4);
    }

    /// Each flip-flop is set when the other one is high, reset otherwise.
    fn mutual_network() -> CascadeSpec {
        let mut b = SpecBuilder::new(&["a"], Wiring::Network);
        let x = b.declare("x", PrimeKind::FlipFlop, HIGH);
        let y = b.declare("y", PrimeKind::FlipFlop, LOW);
        b.wire(x, &[y], |_, st| if st[0] == HIGH { SET } else { RESET }).unwrap();
        b.wire(y, &[x], |_, st| if st[0] == HIGH { SET } else { RESET }).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn network_flattening_hand_stepped() {
        let flat = compose_network(&mutual_network()).unwrap();
        // (high, low) → (low, high) → (high, low): the two flip-flops swap
        let start = flat.state_index("(high,low)").unwrap();
        let one = flat.step(start, 0);
        assert_eq!(flat.state_name(one), "(low,high)");
        assert_eq!(flat.state_name(flat.step(one, 0)), "(high,low)");
        assert_eq!(flat.state_name(flat.step(flat.state_index("(high,high)").unwrap(), 0)), "(high,high)");
        assert!(!is_group_free(&flat).unwrap());
    }

    #[test]
    fn cascade_cannot_read_later_components() {
        let mut b = SpecBuilder::new(&["a"], Wiring::Cascade);
        let x = b.declare("x", PrimeKind::FlipFlop, LOW);
        let y = b.declare("y", PrimeKind::FlipFlop, LOW);
        b.wire(x, &[y], |_, _| SET).unwrap();
        b.wire(y, &[], |_, _| SET).unwrap();
        assert!(b.build().is_err());
    }

    #[test]
    fn network_cannot_read_itself() {
        let mut b = SpecBuilder::new(&["a"], Wiring::Network);
        let x = b.declare("x", PrimeKind::FlipFlop, LOW);
        b.wire(x, &[x], |_, _| SET).unwrap();
        assert!(b.build().is_err());
    }

    #[test]
    fn empty_component_list_rejected() {
        assert!(CascadeSpec::new(vec!["a".into()], Wiring::Cascade, vec![], None).is_err());
    }

    #[test]
    fn network_without_cross_reads_equals_cascade() {
        let build = |wiring| {
            let mut b = SpecBuilder::new(&["a", "b"], wiring);
            let x = b.declare("x", PrimeKind::FlipFlop, LOW);
            let y = b.declare("y", PrimeKind::Toggle, LOW);
            b.wire(x, &[], |l, _| [SET, RESET][l]).unwrap();
            b.wire(y, &[], |l, _| [HOLD, SET][l]).unwrap();
            compose(&b.build().unwrap()).unwrap()
        };
        let (c, n) = (build(Wiring::Cascade), build(Wiring::Network));
        assert_eq!(c.raw_transitions(), n.raw_transitions());
    }
}
