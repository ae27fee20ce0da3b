//! `rnc.json`: neurons with their input maps, initial state, output table,
//! and grounding. Input maps and output tables are keyed like cascade
//! tables, by `letter|q_r1|q_r2|…` over interpreted states of `reads`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CompiledNeuron, PiecewiseInputMap, Rnc, SymbolGrounding};
use crate::automata::format::{TimingTag, WiringTag};
use crate::automata::{OutputSpec, OutputTiming, Wiring, SEPARATOR};
use crate::error::{Error, Result};
use crate::neurons::format::{NamedInterval, NeuronDoc};
use crate::neurons::Interval;

/// The only input-map implementation: exact piecewise-constant tables.
pub const EXACT_APPROXIMATOR: &str = "exact";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RncNeuronDoc {
    pub name: String,
    #[serde(flatten)]
    pub neuron: NeuronDoc,
    pub reads: Vec<usize>,
    pub input_map: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RncOutputDoc {
    pub alphabet: Vec<String>,
    pub reads: Vec<usize>,
    #[serde(default)]
    pub timing: TimingTag,
    pub table: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundingDoc {
    pub regions: Vec<NamedInterval>,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RncDoc {
    #[serde(default)]
    pub wiring: WiringTag,
    pub neurons: Vec<RncNeuronDoc>,
    pub initial: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_table: Option<RncOutputDoc>,
    pub grounding: GroundingDoc,
    #[serde(default = "exact")]
    pub approximator: String,
}

fn exact() -> String {
    EXACT_APPROXIMATOR.into()
}

fn keys(letters: &[String], names: &[Vec<String>]) -> Vec<String> {
    let mut keys: Vec<String> = letters.to_vec();
    for states in names {
        keys = keys
            .iter()
            .flat_map(|k| states.iter().map(move |q| format!("{k}{SEPARATOR}{q}")))
            .collect();
    }
    keys
}

fn lookup<'a, V>(table: &'a BTreeMap<String, V>, expected: &[String], what: &str) -> Result<Vec<&'a V>> {
    if table.len() != expected.len() {
        return Err(Error::Format(format!("{what} has {} entries, expected {}", table.len(), expected.len())));
    }
    expected
        .iter()
        .map(|k| table.get(k).ok_or_else(|| Error::Format(format!("{what} has no entry for {k:?}"))))
        .collect()
}

impl RncDoc {
    pub fn from_rnc(r: &Rnc) -> Self {
        let letters = r.grounding().letters();
        let state_names: Vec<Vec<String>> = r.neurons().iter().map(|n| n.spec.state_names()).collect();
        let read_names = |reads: &[usize]| -> Vec<Vec<String>> { reads.iter().map(|&j| state_names[j].clone()).collect() };
        let neurons = r
            .neurons()
            .iter()
            .map(|n| RncNeuronDoc {
                name: n.name.clone(),
                neuron: NeuronDoc::from_spec(&n.spec),
                reads: n.input_map.reads().to_vec(),
                input_map: keys(letters, &read_names(n.input_map.reads()))
                    .into_iter()
                    .zip(n.input_map.values().iter().copied())
                    .collect(),
            })
            .collect();
        let output_table = r.output().map(|o| RncOutputDoc {
            alphabet: o.alphabet.clone(),
            reads: o.reads.clone(),
            timing: match o.timing {
                OutputTiming::Pre => TimingTag::Pre,
                OutputTiming::Post => TimingTag::Post,
            },
            table: keys(letters, &read_names(&o.reads))
                .into_iter()
                .zip(o.table.iter().map(|&y| o.alphabet[y as usize].clone()))
                .collect(),
        });
        RncDoc {
            wiring: match r.wiring() {
                Wiring::Cascade => WiringTag::Cascade,
                Wiring::Network => WiringTag::Network,
            },
            neurons,
            initial: r.initial().to_vec(),
            output_table,
            grounding: GroundingDoc {
                regions: letters
                    .iter()
                    .zip(r.grounding().regions())
                    .map(|(l, iv)| NamedInterval { name: l.clone(), lo: iv.lo, hi: iv.hi })
                    .collect(),
                radius: r.grounding().radius(),
            },
            approximator: exact(),
        }
    }

    pub fn to_rnc(&self) -> Result<Rnc> {
        if self.approximator != EXACT_APPROXIMATOR {
            return Err(Error::Format(format!("unsupported approximator {:?}", self.approximator)));
        }
        let grounding = SymbolGrounding::new(
            self.grounding.regions.iter().map(|r| r.name.clone()).collect(),
            self.grounding
                .regions
                .iter()
                .map(|r| Interval::new(r.lo, r.hi))
                .collect::<Result<_>>()?,
            self.grounding.radius,
        )?;
        let letters = grounding.letters();
        let specs = self.neurons.iter().map(|n| n.neuron.to_spec()).collect::<Result<Vec<_>>>()?;
        let state_names: Vec<Vec<String>> = specs.iter().map(|s| s.state_names()).collect();
        let read_names = |reads: &[usize]| -> Result<Vec<Vec<String>>> {
            reads
                .iter()
                .map(|&j| state_names.get(j).cloned().ok_or_else(|| Error::Format(format!("reads unknown neuron {j}"))))
                .collect()
        };
        let mut neurons = Vec::with_capacity(specs.len());
        for (doc, spec) in self.neurons.iter().zip(specs.iter()) {
            let expected = keys(letters, &read_names(&doc.reads)?);
            let values = lookup(&doc.input_map, &expected, &format!("input map of {}", doc.name))?
                .into_iter()
                .copied()
                .collect();
            let radices = doc.reads.iter().map(|&j| specs[j].kind().num_states()).collect();
            let input_map = PiecewiseInputMap::new(spec, doc.reads.clone(), radices, values)?;
            neurons.push(CompiledNeuron { name: doc.name.clone(), spec: spec.clone(), input_map });
        }
        let output = match &self.output_table {
            None => None,
            Some(o) => {
                let expected = keys(letters, &read_names(&o.reads)?);
                let table = lookup(&o.table, &expected, "output table")?
                    .into_iter()
                    .map(|y| {
                        o.alphabet
                            .iter()
                            .position(|l| l == y)
                            .map(|i| i as u32)
                            .ok_or_else(|| Error::Format(format!("unknown output letter {y:?}")))
                    })
                    .collect::<Result<_>>()?;
                Some(OutputSpec {
                    alphabet: o.alphabet.clone(),
                    reads: o.reads.clone(),
                    timing: match o.timing {
                        TimingTag::Pre => OutputTiming::Pre,
                        TimingTag::Post => OutputTiming::Post,
                    },
                    table,
                })
            }
        };
        let wiring = match self.wiring {
            WiringTag::Cascade => Wiring::Cascade,
            WiringTag::Network => Wiring::Network,
        };
        Rnc::new(wiring, neurons, self.initial.clone(), output, grounding)
    }
}

pub fn rnc_from_json(text: &str) -> Result<Rnc> {
    serde_json::from_str::<RncDoc>(text)?.to_rnc()
}

pub fn rnc_to_json(r: &Rnc) -> String {
    serde_json::to_string_pretty(&RncDoc::from_rnc(r)).expect("serializable")
}
