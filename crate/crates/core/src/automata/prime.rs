//! Prime components: flip-flop, toggle, and grouplike semiautomata.

use serde::{Deserialize, Serialize};

use super::{Semiautomaton, StateSpace};
use crate::error::{Error, Result};

pub const LOW: usize = 0;
pub const HIGH: usize = 1;

pub const SET: usize = 0;
pub const RESET: usize = 1;
/// `read` for flip-flops, `toggle` for toggles.
pub const HOLD: usize = 2;

const BIT_STATES: [&str; 2] = ["low", "high"];
const FLIPFLOP_LETTERS: [&str; 3] = ["set", "reset", "read"];
const TOGGLE_LETTERS: [&str; 3] = ["set", "reset", "toggle"];

/// Cayley table of a finite group on elements `0..n`, validated on
/// construction. Elements are named by their decimal index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct GroupTable {
    n: usize,
    table: Vec<usize>,
    identity: usize,
}

impl GroupTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("group table is empty"));
        }
        if let Some(r) = rows.iter().position(|row| row.len() != n) {
            return Err(Error::invalid(format!("group table row {r} is not of length {n}")));
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        if let Some(bad) = table.iter().find(|&&g| g >= n) {
            return Err(Error::invalid(format!("group table closure fails: entry {bad} ≥ {n}")));
        }
        let op = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if op(op(a, b), c) != op(a, op(b, c)) {
                        return Err(Error::invalid(format!(
                            "group table associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| op(e, g) == g && op(g, e) == g))
            .ok_or_else(|| Error::invalid("group table identity fails: no identity element"))?;
        for g in 0..n {
            if !(0..n).any(|h| op(g, h) == identity && op(h, g) == identity) {
                return Err(Error::invalid(format!("group table inverse fails for element {g}")));
            }
        }
        Ok(GroupTable { n, table, identity })
    }

    /// The cyclic group of order `n` under addition mod `n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(rows).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn element_names(&self) -> Vec<String> {
        (0..self.n).map(|g| g.to_string()).collect()
    }

    /// True when the table is the cyclic group of order two.
    pub fn is_c2(&self) -> bool {
        self.n == 2
    }
}

impl TryFrom<Vec<Vec<usize>>> for GroupTable {
    type Error = Error;

    fn try_from(rows: Vec<Vec<usize>>) -> Result<Self> {
        GroupTable::new(rows)
    }
}

impl From<GroupTable> for Vec<Vec<usize>> {
    fn from(g: GroupTable) -> Self {
        g.rows()
    }
}

/// The core semiautomaton a component is built on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeKind {
    FlipFlop,
    Toggle,
    Group(GroupTable),
}

impl PrimeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PrimeKind::FlipFlop => "flipflop",
            PrimeKind::Toggle => "toggle",
            PrimeKind::Group(_) => "group",
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            PrimeKind::FlipFlop | PrimeKind::Toggle => 2,
            PrimeKind::Group(g) => g.order(),
        }
    }

    pub fn state_names(&self) -> Vec<String> {
        match self {
            PrimeKind::FlipFlop | PrimeKind::Toggle => {
                BIT_STATES.iter().map(|s| s.to_string()).collect()
            }
            PrimeKind::Group(g) => g.element_names(),
        }
    }

    pub fn internal_letters(&self) -> Vec<String> {
        match self {
            PrimeKind::FlipFlop => FLIPFLOP_LETTERS.iter().map(|s| s.to_string()).collect(),
            PrimeKind::Toggle => TOGGLE_LETTERS.iter().map(|s| s.to_string()).collect(),
            PrimeKind::Group(g) => g.element_names(),
        }
    }

    pub fn num_internal(&self) -> usize {
        match self {
            PrimeKind::FlipFlop | PrimeKind::Toggle => 3,
            PrimeKind::Group(g) => g.order(),
        }
    }

    pub fn internal_index(&self, name: &str) -> Option<usize> {
        self.internal_letters().iter().position(|l| l == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names().iter().position(|l| l == name)
    }

    /// The core transition on an internal letter.
    pub fn core_step(&self, state: usize, internal: usize) -> usize {
        match (self, internal) {
            (PrimeKind::FlipFlop | PrimeKind::Toggle, SET) => HIGH,
            (PrimeKind::FlipFlop | PrimeKind::Toggle, RESET) => LOW,
            (PrimeKind::FlipFlop, _) => state,
            (PrimeKind::Toggle, _) => 1 - state,
            (PrimeKind::Group(g), input) => g.op(state, input),
        }
    }
}

fn prime_semiautomaton(kind: PrimeKind, input_fn: &[(&str, &str)]) -> Result<Semiautomaton> {
    let letters = kind.internal_letters();
    let mut map = Vec::with_capacity(input_fn.len());
    for (letter, target) in input_fn {
        let p = kind.internal_index(target).ok_or_else(|| {
            Error::invalid(format!(
                "input function maps {letter:?} to {target:?}, expected one of {letters:?}"
            ))
        })?;
        map.push(p);
    }
    let n = kind.num_states();
    let mut transitions = Vec::with_capacity(n * letters.len());
    for q in 0..n {
        for p in 0..letters.len() {
            transitions.push(kind.core_step(q, p));
        }
    }
    Semiautomaton::new(
        input_fn.iter().map(|(l, _)| l.to_string()).collect(),
        Some((letters, map)),
        StateSpace::Named(kind.state_names()),
        transitions,
    )
}

/// Flip-flop over the letters of `input_fn`, each mapped to set/reset/read.
pub fn flipflop_semiautomaton(input_fn: &[(&str, &str)]) -> Result<Semiautomaton> {
    prime_semiautomaton(PrimeKind::FlipFlop, input_fn)
}

/// Toggle over the letters of `input_fn`, each mapped to set/reset/toggle.
pub fn toggle_semiautomaton(input_fn: &[(&str, &str)]) -> Result<Semiautomaton> {
    prime_semiautomaton(PrimeKind::Toggle, input_fn)
}

/// Grouplike semiautomaton: states are group elements and the letter mapped
/// to element `g` sends state `h` to `h ∘ g`.
pub fn group_semiautomaton(cayley: GroupTable, input_fn: &[(&str, &str)]) -> Result<Semiautomaton> {
    prime_semiautomaton(PrimeKind::Group(cayley), input_fn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flipflop_transitions() {
        let ff = flipflop_semiautomaton(&[("s", "set"), ("r", "reset"), ("n", "read")]).unwrap();
        assert_eq!(ff.step(LOW, 2), LOW); // read
        assert_eq!(ff.step(LOW, 0), HIGH); // set
        assert_eq!(ff.step(HIGH, 1), LOW); // reset
        assert_eq!(ff.state_name(HIGH), "high");
    }

    #[test]
    fn toggle_transitions() {
        let t = toggle_semiautomaton(&[("s", "set"), ("r", "reset"), ("t", "toggle")]).unwrap();
        assert_eq!(t.step(LOW, 2), HIGH);
        assert_eq!(t.step(HIGH, 0), HIGH);
        for q in [LOW, HIGH] {
            assert_eq!(t.step(t.step(q, 2), 2), q);
        }
    }

    #[test]
    fn group_transitions() {
        let c2 = group_semiautomaton(GroupTable::cyclic(2), &[("e", "0"), ("g", "1")]).unwrap();
        assert_eq!(c2.step(1, 0), 1);
        assert_eq!(c2.step(1, 1), 0);
        let c3 = group_semiautomaton(GroupTable::cyclic(3), &[("a", "0"), ("b", "1"), ("c", "2")])
            .unwrap();
        assert_eq!(c3.step(2, 2), 1);
    }

    #[test]
    fn codomain_violation_rejected() {
        assert!(flipflop_semiautomaton(&[("a", "toggle")]).is_err());
        assert!(toggle_semiautomaton(&[("a", "read")]).is_err());
        assert!(group_semiautomaton(GroupTable::cyclic(2), &[("a", "2")]).is_err());
    }

    #[test]
    fn group_table_validation_names_axiom() {
        let not_closed = GroupTable::new(vec![vec![0, 2], vec![1, 0]]).unwrap_err();
        assert!(not_closed.to_string().contains("closure"));
        // constant table: associative, but no identity
        let no_identity = GroupTable::new(vec![vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(no_identity.to_string().contains("identity"));
        // left-zero band with an adjoined identity has no inverses
        let no_inverse =
            GroupTable::new(vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]]).unwrap_err();
        assert!(no_inverse.to_string().contains("inverse"), "{no_inverse}");
        // a·b = b − a mod 3 is not associative
        let rows = (0..3).map(|a| (0..3).map(|b| (b + 3 - a) % 3).collect()).collect();
        let not_assoc = GroupTable::new(rows).unwrap_err();
        assert!(not_assoc.to_string().contains("associativity"));
    }
}
