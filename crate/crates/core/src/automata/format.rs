//! JSON documents for the automaton and cascade types.
//!
//! Tables are objects keyed by letter and state tuples joined with `|`:
//! transitions by `state|letter`, outputs by `state|letter`, component input
//! functions and output tables by `letter|q_r1|q_r2|…` over the `reads` list.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cascade::{CascadeSpec, ComponentSpec, OutputSpec, OutputTiming, Wiring};
use super::prime::{GroupTable, PrimeKind};
use super::{Automaton, Semiautomaton, StateSpace, SEPARATOR};
use crate::error::{Error, Result};

fn key<S: AsRef<str>>(parts: &[S]) -> String {
    let parts: Vec<&str> = parts.iter().map(|p| p.as_ref()).collect();
    parts.join(&SEPARATOR.to_string())
}

fn position(list: &[String], name: &str, what: &str) -> Result<usize> {
    list.iter()
        .position(|l| l == name)
        .ok_or_else(|| Error::Format(format!("unknown {what} {name:?}")))
}

fn lookup<'a>(table: &'a BTreeMap<String, String>, k: &str, what: &str) -> Result<&'a String> {
    table.get(k).ok_or_else(|| Error::Format(format!("{what} has no entry for {k:?}")))
}

fn check_no_extra(table: &BTreeMap<String, String>, expected: usize, what: &str) -> Result<()> {
    if table.len() != expected {
        return Err(Error::Format(format!(
            "{what} has {} entries, expected {expected}",
            table.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiautomatonDoc {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_fn: Option<BTreeMap<String, String>>,
    pub states: Vec<String>,
    pub transitions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_fn: Option<BTreeMap<String, String>>,
    pub states: Vec<String>,
    pub transitions: BTreeMap<String, String>,
    pub initial: String,
    pub output_alphabet: Vec<String>,
    pub outputs: BTreeMap<String, String>,
}

impl SemiautomatonDoc {
    pub fn from_semiautomaton(s: &Semiautomaton) -> Self {
        let states: Vec<String> = (0..s.num_states()).map(|q| s.state_name(q)).collect();
        let internal = s.internal_alphabet();
        let mut transitions = BTreeMap::new();
        for (q, name) in states.iter().enumerate() {
            for (p, letter) in internal.iter().enumerate() {
                transitions.insert(key(&[name, letter]), states[s.step_internal(q, p)].clone());
            }
        }
        let (internal_alphabet, input_fn) = match s.input_function() {
            None => (None, None),
            Some(f) => (
                Some(internal.to_vec()),
                Some(
                    s.alphabet()
                        .iter()
                        .enumerate()
                        .map(|(l, name)| (name.clone(), internal[f.apply(l)].clone()))
                        .collect(),
                ),
            ),
        };
        SemiautomatonDoc { alphabet: s.alphabet().to_vec(), internal_alphabet, input_fn, states, transitions }
    }

    pub fn to_semiautomaton(&self) -> Result<Semiautomaton> {
        let input_fn = match (&self.internal_alphabet, &self.input_fn) {
            (None, None) => None,
            (Some(internal), Some(map)) => {
                check_no_extra(map, self.alphabet.len(), "input_fn")?;
                let map = self
                    .alphabet
                    .iter()
                    .map(|l| position(internal, lookup(map, l, "input_fn")?, "internal letter"))
                    .collect::<Result<Vec<_>>>()?;
                Some((internal.clone(), map))
            }
            _ => {
                return Err(Error::Format(
                    "internal_alphabet and input_fn must be given together".into(),
                ))
            }
        };
        let width: &[String] = self.internal_alphabet.as_deref().unwrap_or(&self.alphabet);
        check_no_extra(&self.transitions, self.states.len() * width.len(), "transitions")?;
        let mut transitions = Vec::with_capacity(self.states.len() * width.len());
        for q in &self.states {
            for p in width {
                let target = lookup(&self.transitions, &key(&[q, p]), "transitions")?;
                transitions.push(position(&self.states, target, "state")?);
            }
        }
        Semiautomaton::new(
            self.alphabet.clone(),
            input_fn,
            StateSpace::Named(self.states.clone()),
            transitions,
        )
    }
}

impl AutomatonDoc {
    pub fn from_automaton(a: &Automaton) -> Self {
        let semi = SemiautomatonDoc::from_semiautomaton(a.semiautomaton());
        let mut outputs = BTreeMap::new();
        for (q, name) in semi.states.iter().enumerate() {
            for (l, letter) in semi.alphabet.iter().enumerate() {
                outputs.insert(key(&[name, letter]), a.output_alphabet()[a.output(q, l)].clone());
            }
        }
        AutomatonDoc {
            initial: semi.states[a.initial()].clone(),
            alphabet: semi.alphabet,
            internal_alphabet: semi.internal_alphabet,
            input_fn: semi.input_fn,
            states: semi.states,
            transitions: semi.transitions,
            output_alphabet: a.output_alphabet().to_vec(),
            outputs,
        }
    }

    pub fn to_automaton(&self) -> Result<Automaton> {
        let semi = SemiautomatonDoc {
            alphabet: self.alphabet.clone(),
            internal_alphabet: self.internal_alphabet.clone(),
            input_fn: self.input_fn.clone(),
            states: self.states.clone(),
            transitions: self.transitions.clone(),
        }
        .to_semiautomaton()?;
        check_no_extra(&self.outputs, self.states.len() * self.alphabet.len(), "outputs")?;
        let mut outputs = Vec::new();
        for q in &self.states {
            for l in &self.alphabet {
                let y = lookup(&self.outputs, &key(&[q, l]), "outputs")?;
                outputs.push(position(&self.output_alphabet, y, "output letter")?);
            }
        }
        let initial = position(&self.states, &self.initial, "state")?;
        Automaton::new(semi, initial, self.output_alphabet.clone(), outputs)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KindTag {
    Flipflop,
    Toggle,
    Group,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cayley: Option<GroupTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reads: Option<Vec<usize>>,
    pub input_fn: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimingTag {
    #[default]
    Pre,
    Post,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reads: Option<Vec<usize>>,
    #[serde(default)]
    pub timing: TimingTag,
    pub table: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum WiringTag {
    #[default]
    Cascade,
    Network,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeDoc {
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub wiring: WiringTag,
    pub components: Vec<ComponentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputDoc>,
}

/// All `letter|q…` keys of a table over `reads`, in table order.
fn table_keys(alphabet: &[String], names: &[Vec<String>]) -> Vec<String> {
    let mut keys: Vec<Vec<&str>> = alphabet.iter().map(|l| vec![l.as_str()]).collect();
    for states in names {
        keys = keys
            .into_iter()
            .flat_map(|k| {
                states.iter().map(move |q| {
                    let mut k = k.clone();
                    k.push(q.as_str());
                    k
                })
            })
            .collect();
    }
    keys.iter().map(|k| key(k)).collect()
}

impl CascadeDoc {
    pub fn from_spec(spec: &CascadeSpec) -> Self {
        let state_names: Vec<Vec<String>> =
            spec.components().iter().map(|c| c.kind.state_names()).collect();
        let read_names = |reads: &[usize]| -> Vec<Vec<String>> {
            reads.iter().map(|&j| state_names[j].clone()).collect()
        };
        let components = spec
            .components()
            .iter()
            .map(|c| {
                let letters = c.kind.internal_letters();
                let keys = table_keys(spec.alphabet(), &read_names(&c.reads));
                ComponentDoc {
                    name: Some(c.name.clone()),
                    kind: match c.kind {
                        PrimeKind::FlipFlop => KindTag::Flipflop,
                        PrimeKind::Toggle => KindTag::Toggle,
                        PrimeKind::Group(_) => KindTag::Group,
                    },
                    cayley: match &c.kind {
                        PrimeKind::Group(g) => Some(g.clone()),
                        _ => None,
                    },
                    initial: Some(c.kind.state_names()[c.initial].clone()),
                    reads: Some(c.reads.clone()),
                    input_fn: keys
                        .into_iter()
                        .zip(&c.table)
                        .map(|(k, &p)| (k, letters[p as usize].clone()))
                        .collect(),
                }
            })
            .collect();
        let output = spec.output().map(|o| OutputDoc {
            alphabet: o.alphabet.clone(),
            reads: Some(o.reads.clone()),
            timing: match o.timing {
                OutputTiming::Pre => TimingTag::Pre,
                OutputTiming::Post => TimingTag::Post,
            },
            table: table_keys(spec.alphabet(), &read_names(&o.reads))
                .into_iter()
                .zip(&o.table)
                .map(|(k, &y)| (k, o.alphabet[y as usize].clone()))
                .collect(),
        });
        CascadeDoc {
            alphabet: spec.alphabet().to_vec(),
            wiring: match spec.wiring() {
                Wiring::Cascade => WiringTag::Cascade,
                Wiring::Network => WiringTag::Network,
            },
            components,
            output,
        }
    }

    pub fn to_spec(&self) -> Result<CascadeSpec> {
        let wiring = match self.wiring {
            WiringTag::Cascade => Wiring::Cascade,
            WiringTag::Network => Wiring::Network,
        };
        let kinds = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| match (c.kind, &c.cayley) {
                (KindTag::Flipflop, None) => Ok(PrimeKind::FlipFlop),
                (KindTag::Toggle, None) => Ok(PrimeKind::Toggle),
                (KindTag::Group, Some(g)) => Ok(PrimeKind::Group(g.clone())),
                (KindTag::Group, None) => Err(Error::Format(format!("component {i}: group without cayley table"))),
                (_, Some(_)) => Err(Error::Format(format!("component {i}: cayley table on a non-group component"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let state_names: Vec<Vec<String>> = kinds.iter().map(PrimeKind::state_names).collect();
        let n = kinds.len();
        let default_reads = |i: usize| -> Vec<usize> {
            match wiring {
                Wiring::Cascade => (0..i).collect(),
                Wiring::Network => (0..n).filter(|&j| j != i).collect(),
            }
        };
        let read_names = |reads: &[usize]| -> Result<Vec<Vec<String>>> {
            reads
                .iter()
                .map(|&j| {
                    state_names
                        .get(j)
                        .cloned()
                        .ok_or_else(|| Error::Format(format!("reads unknown component {j}")))
                })
                .collect()
        };

        let mut components = Vec::with_capacity(n);
        for (i, (c, kind)) in self.components.iter().zip(kinds).enumerate() {
            let reads = c.reads.clone().unwrap_or_else(|| default_reads(i));
            let keys = table_keys(&self.alphabet, &read_names(&reads)?);
            let what = format!("component {i} input_fn");
            check_no_extra(&c.input_fn, keys.len(), &what)?;
            let letters = kind.internal_letters();
            let table = keys
                .iter()
                .map(|k| Ok(position(&letters, lookup(&c.input_fn, k, &what)?, "internal letter")? as u16))
                .collect::<Result<Vec<_>>>()?;
            let initial = match &c.initial {
                Some(name) => position(&kind.state_names(), name, "state")?,
                None => match &kind {
                    PrimeKind::Group(g) => g.identity(),
                    _ => 0,
                },
            };
            components.push(ComponentSpec {
                name: c.name.clone().unwrap_or_else(|| format!("c{i}")),
                kind,
                reads,
                table,
                initial,
            });
        }

        let output = match &self.output {
            None => None,
            Some(o) => {
                let reads = o.reads.clone().unwrap_or_else(|| (0..n).collect());
                let keys = table_keys(&self.alphabet, &read_names(&reads)?);
                check_no_extra(&o.table, keys.len(), "output table")?;
                let table = keys
                    .iter()
                    .map(|k| Ok(position(&o.alphabet, lookup(&o.table, k, "output table")?, "output letter")? as u32))
                    .collect::<Result<Vec<_>>>()?;
                Some(OutputSpec {
                    alphabet: o.alphabet.clone(),
                    reads,
                    timing: match o.timing {
                        TimingTag::Pre => OutputTiming::Pre,
                        TimingTag::Post => OutputTiming::Post,
                    },
                    table,
                })
            }
        };
        CascadeSpec::new(self.alphabet.clone(), wiring, components, output)
    }
}

pub fn semiautomaton_from_json(text: &str) -> Result<Semiautomaton> {
    serde_json::from_str::<SemiautomatonDoc>(text)?.to_semiautomaton()
}

pub fn semiautomaton_to_json(s: &Semiautomaton) -> String {
    serde_json::to_string_pretty(&SemiautomatonDoc::from_semiautomaton(s)).expect("serializable")
}

pub fn automaton_from_json(text: &str) -> Result<Automaton> {
    serde_json::from_str::<AutomatonDoc>(text)?.to_automaton()
}

pub fn automaton_to_json(a: &Automaton) -> String {
    serde_json::to_string_pretty(&AutomatonDoc::from_automaton(a)).expect("serializable")
}

pub fn cascade_from_json(text: &str) -> Result<CascadeSpec> {
    serde_json::from_str::<CascadeDoc>(text)?.to_spec()
}

pub fn cascade_to_json(spec: &CascadeSpec) -> String {
    serde_json::to_string_pretty(&CascadeDoc::from_spec(spec)).expect("serializable")
}
