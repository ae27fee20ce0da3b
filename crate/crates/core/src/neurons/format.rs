//! JSON form of neuron specs. Unbounded ends are written as the strings
//! `"-inf"` and `"inf"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Activation, Interval, NeuronSpec, Order, Params};
use crate::automata::format::KindTag;
use crate::automata::{GroupTable, PrimeKind};
use crate::error::{Error, Result};

/// Serde adapter for reals that may be infinite.
pub mod bound {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number, \"inf\" or \"-inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedInterval {
    pub name: String,
    #[serde(with = "bound")]
    pub lo: f64,
    #[serde(with = "bound")]
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ActivationTag {
    Sign,
    Tanh,
    Synthetic,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OrderTag {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronDoc {
    pub activation: ActivationTag,
    pub order: OrderTag,
    pub w: f64,
    #[serde(default)]
    pub params: ParamsDoc,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cayley: Option<GroupTable>,
    pub state_partition: Vec<NamedInterval>,
    pub input_partition: Vec<NamedInterval>,
}

fn named(names: Vec<String>, intervals: &[Interval]) -> Vec<NamedInterval> {
    names
        .into_iter()
        .zip(intervals)
        .map(|(name, iv)| NamedInterval { name, lo: iv.lo, hi: iv.hi })
        .collect()
}

/// Orders a named partition by `names`, rejecting missing or extra entries.
fn ordered(what: &str, names: &[String], entries: &[NamedInterval]) -> Result<Vec<Interval>> {
    if entries.len() != names.len() {
        return Err(Error::Format(format!("{what} needs exactly the intervals {names:?}")));
    }
    names
        .iter()
        .map(|n| {
            let e = entries
                .iter()
                .find(|e| &e.name == n)
                .ok_or_else(|| Error::Format(format!("{what} has no interval {n:?}")))?;
            Interval::new(e.lo, e.hi)
        })
        .collect()
}

impl NeuronDoc {
    pub fn from_spec(spec: &NeuronSpec) -> Self {
        let p = spec.params();
        NeuronDoc {
            activation: match spec.activation() {
                Activation::Sign => ActivationTag::Sign,
                Activation::Tanh => ActivationTag::Tanh,
                Activation::Synthetic => ActivationTag::Synthetic,
            },
            order: match spec.order() {
                Order::First => OrderTag::First,
                Order::Second => OrderTag::Second,
            },
            w: spec.w(),
            params: ParamsDoc { a: p.a, b: p.b, margin: p.margin },
            kind: match spec.kind() {
                PrimeKind::FlipFlop => KindTag::Flipflop,
                PrimeKind::Toggle => KindTag::Toggle,
                PrimeKind::Group(_) => KindTag::Group,
            },
            cayley: match spec.kind() {
                PrimeKind::Group(g) => Some(g.clone()),
                _ => None,
            },
            state_partition: named(spec.state_names(), spec.state_intervals()),
            input_partition: named(spec.input_names(), spec.input_intervals()),
        }
    }

    pub fn to_spec(&self) -> Result<NeuronSpec> {
        let kind = match (self.kind, &self.cayley) {
            (KindTag::Flipflop, None) => PrimeKind::FlipFlop,
            (KindTag::Toggle, None) => PrimeKind::Toggle,
            (KindTag::Group, Some(g)) => PrimeKind::Group(g.clone()),
            (KindTag::Group, None) => return Err(Error::Format("group neuron without cayley table".into())),
            (_, Some(_)) => return Err(Error::Format("cayley table on a non-group neuron".into())),
        };
        let states = ordered("state_partition", &kind.state_names(), &self.state_partition)?;
        let inputs = ordered("input_partition", &kind.internal_letters(), &self.input_partition)?;
        NeuronSpec::from_parts(
            match self.activation {
                ActivationTag::Sign => Activation::Sign,
                ActivationTag::Tanh => Activation::Tanh,
                ActivationTag::Synthetic => Activation::Synthetic,
            },
            match self.order {
                OrderTag::First => Order::First,
                OrderTag::Second => Order::Second,
            },
            self.w,
            Params { a: self.params.a, b: self.params.b, margin: self.params.margin },
            kind,
            states,
            inputs,
        )
    }
}

pub fn neuron_from_json(text: &str) -> Result<NeuronSpec> {
    serde_json::from_str::<NeuronDoc>(text)?.to_spec()
}

pub fn neuron_to_json(spec: &NeuronSpec) -> String {
    serde_json::to_string_pretty(&NeuronDoc::from_spec(spec)).expect("serializable")
}
