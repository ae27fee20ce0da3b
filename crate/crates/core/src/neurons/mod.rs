//! Concrete neuron cores and the interval partitions that interpret them as
//! flip-flops, toggles, and group elements.

mod construct;
mod dynamics;
pub mod format;
mod verify;

use crate::automata::PrimeKind;
use crate::error::{Error, Result};

pub use construct::{
    make_c2_sign, make_c2_tanh, make_sign_flipflop, make_sign_toggle, make_synthetic_group_neuron,
    make_tanh_flipflop, make_tanh_toggle, optimal_tanh_ab,
};
pub use dynamics::{alternates, first_large_increment, trajectory};
pub use verify::{
    verify_core_conditions, ConditionResult, CoreConditionReport, Method, Witness, CORNER_TOLERANCE, GRID_SPAN,
    GRID_TOLERANCE,
};

/// A closed interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("[{lo}, {hi}] is not an interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn at_least(lo: f64) -> Self {
        Interval { lo, hi: f64::INFINITY }
    }

    pub fn at_most(hi: f64) -> Self {
        Interval { lo: f64::NEG_INFINITY, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Midpoint, or one unit inside the finite end of a half-line.
    pub fn representative(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + (self.hi - self.lo) / 2.0,
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// The interval with infinite ends replaced by a window of width `span`
    /// next to the finite end (or `[-span, span]` for the whole line).
    pub fn truncated(&self, span: f64) -> Interval {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => *self,
            (true, false) => Interval { lo: self.lo, hi: self.lo + span },
            (false, true) => Interval { lo: self.hi - span, hi: self.hi },
            (false, false) => Interval { lo: -span, hi: span },
        }
    }

    /// Widens both finite ends by `fraction` of the length.
    pub fn widened(&self, fraction: f64) -> Interval {
        let d = if self.is_bounded() { self.length() * fraction } else { fraction };
        Interval { lo: self.lo - d, hi: self.hi + d }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let open = if self.lo.is_finite() { '[' } else { '(' };
        let close = if self.hi.is_finite() { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sign,
    Tanh,
    /// Exact piecewise-constant map on the cells of a group neuron.
    Synthetic,
}

impl Activation {
    pub fn tag(self) -> &'static str {
        match self {
            Activation::Sign => "sign",
            Activation::Tanh => "tanh",
            Activation::Synthetic => "synthetic",
        }
    }

    /// Sign uses `sign(0) = +1`.
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sign => {
                if z >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Synthetic => z,
        }
    }

    /// Limits at ±∞ for the monotone activations.
    fn at(self, z: f64) -> f64 {
        if z == f64::INFINITY {
            1.0
        } else if z == f64::NEG_INFINITY {
            -1.0
        } else {
            self.apply(z)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `α(w·x + v)`
    First,
    /// `α(w·x·v)`
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Params {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub margin: Option<f64>,
}

/// A neuron core with its state and input partitions.
///
/// States are named after the component states (`low`/`high` or group
/// elements) and inputs after the internal letters of `kind`, in the same
/// order, so index `p` of the input partition realizes internal letter `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronSpec {
    activation: Activation,
    order: Order,
    w: f64,
    params: Params,
    kind: PrimeKind,
    states: Vec<Interval>,
    inputs: Vec<Interval>,
}

fn check_partition(what: &str, names: &[String], intervals: &[Interval], nonzero: bool) -> Result<()> {
    if names.len() != intervals.len() {
        return Err(Error::invalid(format!(
            "{what} has {} intervals, expected {}",
            intervals.len(),
            names.len()
        )));
    }
    for (i, iv) in intervals.iter().enumerate() {
        Interval::new(iv.lo, iv.hi)?;
        if nonzero && iv.length() <= 0.0 {
            return Err(Error::invalid(format!("{what} interval {} has zero length", names[i])));
        }
        for (j, other) in intervals.iter().enumerate().skip(i + 1) {
            if !iv.disjoint(other) {
                return Err(Error::invalid(format!(
                    "{what} intervals {} {iv} and {} {other} overlap",
                    names[i], names[j]
                )));
            }
        }
    }
    Ok(())
}

impl NeuronSpec {
    /// Builds a spec from explicit partitions, checking only that they are
    /// well formed (disjoint closed intervals, non-degenerate inputs). The
    /// interval-inclusion conditions are left to [`verify_core_conditions`].
    pub fn from_parts(
        activation: Activation,
        order: Order,
        w: f64,
        params: Params,
        kind: PrimeKind,
        states: Vec<Interval>,
        inputs: Vec<Interval>,
    ) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::invalid(format!("weight {w} is not finite")));
        }
        if activation == Activation::Synthetic && !matches!(kind, PrimeKind::Group(_)) {
            return Err(Error::invalid("synthetic activation requires a group kind"));
        }
        check_partition("state partition", &kind.state_names(), &states, false)?;
        if let Some(iv) = states.iter().find(|iv| !iv.is_bounded()) {
            return Err(Error::invalid(format!("state interval {iv} is unbounded")));
        }
        check_partition("input partition", &kind.internal_letters(), &inputs, true)?;
        Ok(NeuronSpec { activation, order, w, params, kind, states, inputs })
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn kind(&self) -> &PrimeKind {
        &self.kind
    }

    pub fn state_names(&self) -> Vec<String> {
        self.kind.state_names()
    }

    pub fn input_names(&self) -> Vec<String> {
        self.kind.internal_letters()
    }

    pub fn state_intervals(&self) -> &[Interval] {
        &self.states
    }

    pub fn input_intervals(&self) -> &[Interval] {
        &self.inputs
    }

    pub fn state_interval(&self, name: &str) -> Option<Interval> {
        self.kind.state_index(name).map(|i| self.states[i])
    }

    pub fn input_interval(&self, name: &str) -> Option<Interval> {
        self.kind.internal_index(name).map(|i| self.inputs[i])
    }

    /// A copy with input interval `name` replaced, validated as in
    /// [`NeuronSpec::from_parts`].
    pub fn with_input_interval(&self, name: &str, interval: Interval) -> Result<Self> {
        let p = self
            .kind
            .internal_index(name)
            .ok_or_else(|| Error::invalid(format!("no input interval {name:?}")))?;
        let mut inputs = self.inputs.clone();
        inputs[p] = interval;
        NeuronSpec::from_parts(self.activation, self.order, self.w, self.params, self.kind.clone(), self.states.clone(), inputs)
    }

    pub fn with_state_interval(&self, name: &str, interval: Interval) -> Result<Self> {
        let i = self
            .kind
            .state_index(name)
            .ok_or_else(|| Error::invalid(format!("no state interval {name:?}")))?;
        let mut states = self.states.clone();
        states[i] = interval;
        NeuronSpec::from_parts(self.activation, self.order, self.w, self.params, self.kind.clone(), states, self.inputs.clone())
    }

    /// Cell index of `z` for synthetic neurons: nearest multiple of `1/n`,
    /// clamped to `0..n`.
    fn cell(&self, z: f64) -> usize {
        let n = self.kind.num_states();
        let k = (z * n as f64).round();
        if k.is_nan() || k < 0.0 {
            0
        } else {
            (k as usize).min(n - 1)
        }
    }

    /// The raw dynamics `f(x, v)`.
    pub fn step(&self, x: f64, v: f64) -> f64 {
        match (self.activation, &self.kind) {
            (Activation::Synthetic, PrimeKind::Group(g)) => {
                let k = g.op(self.cell(x), self.cell(v));
                k as f64 / g.order() as f64
            }
            _ => {
                let z = match self.order {
                    Order::First => self.w * x + v,
                    Order::Second => self.w * x * v,
                };
                self.activation.apply(z)
            }
        }
    }

    /// ψ(x): the index of the state interval containing `x`.
    pub fn interpret(&self, x: f64) -> Option<usize> {
        self.states.iter().position(|iv| iv.contains(x))
    }

    /// Index of the input interval containing `v`.
    pub fn input_symbol(&self, v: f64) -> Option<usize> {
        self.inputs.iter().position(|iv| iv.contains(v))
    }
}

pub fn neuron_step(spec: &NeuronSpec, x: f64, v: f64) -> f64 {
    spec.step(x, v)
}

/// Name of the state interval containing `x`, if any.
pub fn state_interpretation(spec: &NeuronSpec, x: f64) -> Option<String> {
    spec.interpret(x).map(|i| spec.state_names()[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_zero_is_positive() {
        let spec = make_sign_flipflop(1.0, 0.5).unwrap();
        assert_eq!(neuron_step(&spec, 0.0, 0.0), 1.0);
    }

    #[test]
    fn tanh_step_values() {
        let (a, b) = optimal_tanh_ab(2.0).unwrap();
        let spec = make_tanh_flipflop(2.0, a, b).unwrap();
        assert_eq!(neuron_step(&spec, 0.0, 0.0), 0.0);
        assert!((neuron_step(&spec, 1.0, 1.0) - 0.995055).abs() < 1e-6);
    }

    #[test]
    fn interpretation_examples() {
        let sign = make_sign_flipflop(1.0, 0.5).unwrap();
        assert_eq!(state_interpretation(&sign, 1.0).as_deref(), Some("high"));
        let (a, b) = optimal_tanh_ab(2.0).unwrap();
        let tanh = make_tanh_flipflop(2.0, a, b).unwrap();
        assert_eq!(state_interpretation(&tanh, 0.0), None);
        assert_eq!(state_interpretation(&tanh, -1.0).as_deref(), Some("low"));
    }

    #[test]
    fn interval_representatives() {
        assert_eq!(Interval::new(1.0, 3.0).unwrap().representative(), 2.0);
        assert_eq!(Interval::at_least(1.5).representative(), 2.5);
        assert_eq!(Interval::at_most(-1.5).representative(), -2.5);
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn overlapping_partition_rejected() {
        let spec = make_sign_flipflop(1.0, 0.5).unwrap();
        assert!(spec.with_input_interval("read", Interval::new(-0.5, 1.6).unwrap()).is_err());
        assert!(spec.with_input_interval("read", Interval::point(0.0)).is_err());
    }
}
