//! Checks of the inclusions `f(X_q, V_p) ⊆ X_{δ(q, p)}`.
//!
//! Three independent passes: corner evaluation (exact up to rounding, using
//! monotonicity or bilinearity of the pre-activation), a uniform grid over
//! each box, and conformance of the partitions with the intervals admitted
//! by the neuron's parameters.

use serde::Serialize;

use super::format::bound;
use super::{construct, Activation, Interval, NeuronSpec, Order};
use crate::automata::PrimeKind;

/// Slack for corner comparisons; the optimal tanh bounds meet exactly at
/// the corner and can miss by one rounding step.
pub const CORNER_TOLERANCE: f64 = 1e-12;
pub const GRID_TOLERANCE: f64 = 1e-12;
/// Width of the window that replaces an infinite end in grid checks.
pub const GRID_SPAN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    #[serde(with = "bound")]
    pub x: f64,
    #[serde(with = "bound")]
    pub v: f64,
    #[serde(with = "bound")]
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CornerExact,
    Grid,
    Conformance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: String,
    pub method: Method,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreConditionReport {
    pub grid: usize,
    pub results: Vec<ConditionResult>,
}

impl CoreConditionReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn passed_by(&self, method: Method) -> bool {
        self.results.iter().filter(|r| r.method == method).all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

fn in_target(value: f64, target: &Interval, tol: f64) -> bool {
    target.lo - tol <= value && value <= target.hi + tol
}

/// `a·b` with `0·∞ = 0`.
fn mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Pre-activation at a corner; `x` is finite.
fn pre(spec: &NeuronSpec, x: f64, v: f64) -> f64 {
    match spec.order() {
        Order::First => spec.w() * x + v,
        Order::Second => mul(spec.w() * x, v),
    }
}

fn corner_check(spec: &NeuronSpec, xs: &Interval, vs: &Interval, target: &Interval) -> Option<Witness> {
    let corners = [(xs.lo, vs.lo), (xs.lo, vs.hi), (xs.hi, vs.lo), (xs.hi, vs.hi)];
    if spec.activation() == Activation::Synthetic {
        // the map is constant on each cell and the intervals sit inside cells
        return corners.iter().find_map(|&(x, v)| {
            let value = spec.step(x, v);
            (!in_target(value, target, CORNER_TOLERANCE)).then_some(Witness { x, v, value })
        });
    }
    // The pre-activation is monotone (first order) or bilinear (second
    // order) in (x, v), so its extremes over the box sit at corners, and the
    // activation is non-decreasing.
    let mut lowest = corners[0];
    let mut highest = corners[0];
    for &c in &corners[1..] {
        if pre(spec, c.0, c.1) < pre(spec, lowest.0, lowest.1) {
            lowest = c;
        }
        if pre(spec, c.0, c.1) > pre(spec, highest.0, highest.1) {
            highest = c;
        }
    }
    for (x, v) in [lowest, highest] {
        let value = spec.activation().at(pre(spec, x, v));
        if !in_target(value, target, CORNER_TOLERANCE) {
            return Some(Witness { x, v, value });
        }
    }
    None
}

fn samples(iv: &Interval, n: usize) -> Vec<f64> {
    let iv = iv.truncated(GRID_SPAN);
    if iv.lo == iv.hi || n <= 1 {
        return vec![iv.lo];
    }
    let step = (iv.hi - iv.lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { iv.hi } else { iv.lo + k as f64 * step }).collect()
}

fn grid_check(spec: &NeuronSpec, xs: &[f64], vs: &[f64], target: &Interval) -> Option<Witness> {
    for &x in xs {
        for &v in vs {
            let value = spec.step(x, v);
            if !in_target(value, target, GRID_TOLERANCE) {
                return Some(Witness { x, v, value });
            }
        }
    }
    None
}

/// The partitions the neuron's own parameters admit, rebuilt by the
/// matching constructor.
fn reference(spec: &NeuronSpec) -> Option<Result<NeuronSpec, String>> {
    let p = spec.params();
    let w = spec.w();
    let built = match (spec.activation(), spec.order(), spec.kind()) {
        (Activation::Sign, Order::First, PrimeKind::FlipFlop) => construct::make_sign_flipflop(w, p.a?),
        (Activation::Tanh, Order::First, PrimeKind::FlipFlop) => construct::make_tanh_flipflop(w, p.a?, p.b?),
        (Activation::Sign, Order::First, PrimeKind::Toggle) => construct::make_sign_toggle(w, p.a?),
        (Activation::Tanh, Order::First, PrimeKind::Toggle) => construct::make_tanh_toggle(w, p.a?, p.b?),
        (Activation::Sign, Order::Second, PrimeKind::Group(g)) if g.is_c2() => construct::make_c2_sign(w, p.a?),
        (Activation::Tanh, Order::Second, PrimeKind::Group(g)) if g.is_c2() => construct::make_c2_tanh(w, p.a?),
        (Activation::Synthetic, _, PrimeKind::Group(g)) => {
            construct::make_synthetic_group_neuron(g.clone(), p.margin?)
        }
        _ => return None,
    };
    Some(built.map_err(|e| e.to_string()))
}

fn conformance(spec: &NeuronSpec) -> Vec<ConditionResult> {
    let reference = match reference(spec) {
        None => return Vec::new(),
        Some(Err(msg)) => {
            return vec![ConditionResult {
                condition: "parameters".into(),
                method: Method::Conformance,
                passed: false,
                witness: None,
                detail: Some(msg),
            }]
        }
        Some(Ok(r)) => r,
    };
    let mut out = Vec::new();
    let parts = [
        ("X", spec.state_names(), spec.state_intervals(), reference.state_intervals()),
        ("V", spec.input_names(), spec.input_intervals(), reference.input_intervals()),
    ];
    for (prefix, names, actual, admitted) in parts {
        for ((name, iv), adm) in names.iter().zip(actual).zip(admitted) {
            let passed = adm.contains_interval(iv);
            out.push(ConditionResult {
                condition: format!("{prefix}_{name} ⊆ {adm}"),
                method: Method::Conformance,
                passed,
                witness: None,
                detail: (!passed).then(|| format!("{prefix}_{name} = {iv}")),
            });
        }
    }
    out
}

/// Checks every inclusion the neuron's kind requires at corners and on a
/// `grid × grid` box grid, plus conformance with its parameters.
pub fn verify_core_conditions(spec: &NeuronSpec, grid: usize) -> CoreConditionReport {
    let kind = spec.kind();
    let states = spec.state_names();
    let inputs = spec.input_names();
    let mut results = Vec::new();
    let x_samples: Vec<Vec<f64>> = spec.state_intervals().iter().map(|iv| samples(iv, grid)).collect();
    for (q, xs) in spec.state_intervals().iter().enumerate() {
        for (p, vs) in spec.input_intervals().iter().enumerate() {
            let t = kind.core_step(q, p);
            let target = &spec.state_intervals()[t];
            let condition = format!("f(X_{}, V_{}) ⊆ X_{}", states[q], inputs[p], states[t]);
            let witness = corner_check(spec, xs, vs, target);
            results.push(ConditionResult {
                condition: condition.clone(),
                method: Method::CornerExact,
                passed: witness.is_none(),
                witness,
                detail: None,
            });
            if grid > 0 {
                let witness = grid_check(spec, &x_samples[q], &samples(vs, grid), target);
                results.push(ConditionResult {
                    condition,
                    method: Method::Grid,
                    passed: witness.is_none(),
                    witness,
                    detail: None,
                });
            }
        }
    }
    results.extend(conformance(spec));
    CoreConditionReport { grid, results }
}
