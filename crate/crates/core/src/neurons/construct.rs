use super::{Activation, Interval, NeuronSpec, Order, Params};
use crate::automata::{GroupTable, PrimeKind};
use crate::error::{Error, Result};

fn require(cond: bool, inequality: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::params(inequality))
    }
}

fn finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        require(v.is_finite(), &format!("{name} finite"))?;
    }
    Ok(())
}

/// Sign flip-flop: `X_low = {−1}`, `X_high = {+1}`.
pub fn make_sign_flipflop(w: f64, a: f64) -> Result<NeuronSpec> {
    finite(&[("w", w), ("a", a)])?;
    require(w > 0.0, "w > 0")?;
    require(a > 0.0 && a < 1.0, "0 < a < 1")?;
    NeuronSpec::from_parts(
        Activation::Sign,
        Order::First,
        w,
        Params { a: Some(a), ..Params::default() },
        PrimeKind::FlipFlop,
        vec![Interval::point(-1.0), Interval::point(1.0)],
        vec![
            Interval::at_least(w * (a + 1.0)),
            Interval::at_most(-w * (a + 1.0)),
            Interval { lo: w * (a - 1.0), hi: w * (1.0 - a) },
        ],
    )
}

/// Tanh flip-flop with `f(x) = tanh(w·x)`.
pub fn make_tanh_flipflop(w: f64, a: f64, b: f64) -> Result<NeuronSpec> {
    finite(&[("w", w), ("a", a), ("b", b)])?;
    require(w > 1.0, "w > 1")?;
    require(a < b, "a < b")?;
    let f = |x: f64| (w * x).tanh();
    require(a - f(a) > b - f(b), "a - tanh(w*a) > b - tanh(w*b)")?;
    NeuronSpec::from_parts(
        Activation::Tanh,
        Order::First,
        w,
        Params { a: Some(a), b: Some(b), margin: None },
        PrimeKind::FlipFlop,
        vec![Interval { lo: -1.0, hi: f(a) }, Interval { lo: f(b), hi: 1.0 }],
        vec![
            Interval::at_least(w * (b + 1.0)),
            Interval::at_most(w * (a - 1.0)),
            Interval { lo: w * (b - f(b)), hi: w * (a - f(a)) },
        ],
    )
}

/// The `(a, b)` maximizing the read interval: the points where
/// `d/dx tanh(w·x) = 1`.
pub fn optimal_tanh_ab(w: f64) -> Result<(f64, f64)> {
    finite(&[("w", w)])?;
    require(w > 1.0, "w > 1")?;
    let b = (1.0 - 1.0 / w).sqrt().atanh() / w;
    Ok((-b, b))
}

/// Sign toggle with negative weight.
pub fn make_sign_toggle(w: f64, a: f64) -> Result<NeuronSpec> {
    finite(&[("w", w), ("a", a)])?;
    require(w < 0.0, "w < 0")?;
    require(a > 0.0 && a < 1.0, "0 < a < 1")?;
    NeuronSpec::from_parts(
        Activation::Sign,
        Order::First,
        w,
        Params { a: Some(a), ..Params::default() },
        PrimeKind::Toggle,
        vec![Interval::point(-1.0), Interval::point(1.0)],
        vec![
            Interval::at_least(-w * (a + 1.0)),
            Interval::at_most(w * (a + 1.0)),
            Interval { lo: w * (1.0 - a), hi: w * (a - 1.0) },
        ],
    )
}

/// Tanh toggle with `f(x) = tanh(w·x)`, `w < −1`.
pub fn make_tanh_toggle(w: f64, a: f64, b: f64) -> Result<NeuronSpec> {
    finite(&[("w", w), ("a", a), ("b", b)])?;
    require(w < -1.0, "w < -1")?;
    require(a < b, "a < b")?;
    let f = |x: f64| (w * x).tanh();
    require(a + f(a) > b + f(b), "a + tanh(w*a) > b + tanh(w*b)")?;
    NeuronSpec::from_parts(
        Activation::Tanh,
        Order::First,
        w,
        Params { a: Some(a), b: Some(b), margin: None },
        PrimeKind::Toggle,
        vec![Interval { lo: -1.0, hi: f(b) }, Interval { lo: f(a), hi: 1.0 }],
        vec![
            Interval::at_least(w * (a - 1.0)),
            Interval::at_most(w * (b + 1.0)),
            Interval { lo: w * (a - f(b)), hi: w * (b - f(a)) },
        ],
    )
}

fn same_sign(w: f64, a: f64) -> Result<()> {
    finite(&[("w", w), ("a", a)])?;
    require((a > 0.0 && w > 0.0) || (a < 0.0 && w < 0.0), "(a > 0 and w > 0) or (a < 0 and w < 0)")
}

/// Second-order sign neuron for C2: `X_0 = {−1}`, `X_1 = {+1}`.
pub fn make_c2_sign(w: f64, a: f64) -> Result<NeuronSpec> {
    same_sign(w, a)?;
    let (v0, v1) = if a > 0.0 {
        (Interval::at_least(a), Interval::at_most(-a))
    } else {
        (Interval::at_most(a), Interval::at_least(-a))
    };
    NeuronSpec::from_parts(
        Activation::Sign,
        Order::Second,
        w,
        Params { a: Some(a), ..Params::default() },
        PrimeKind::Group(GroupTable::cyclic(2)),
        vec![Interval::point(-1.0), Interval::point(1.0)],
        vec![v0, v1],
    )
}

/// Second-order tanh neuron for C2: `X_0 = [−1, −f(a)]`, `X_1 = [f(a), 1]`.
pub fn make_c2_tanh(w: f64, a: f64) -> Result<NeuronSpec> {
    same_sign(w, a)?;
    let fa = (w * a).tanh();
    let t = a / fa;
    let (v0, v1) = if a > 0.0 {
        (Interval::at_least(t), Interval::at_most(-t))
    } else {
        (Interval::at_most(t), Interval::at_least(-t))
    };
    NeuronSpec::from_parts(
        Activation::Tanh,
        Order::Second,
        w,
        Params { a: Some(a), ..Params::default() },
        PrimeKind::Group(GroupTable::cyclic(2)),
        vec![Interval { lo: -1.0, hi: -fa }, Interval { lo: fa, hi: 1.0 }],
        vec![v0, v1],
    )
}

/// Piecewise-exact neuron for any finite group: cells of half-width
/// `margin` centred at `i/n`.
pub fn make_synthetic_group_neuron(cayley: GroupTable, margin: f64) -> Result<NeuronSpec> {
    let n = cayley.order();
    finite(&[("margin", margin)])?;
    require(margin > 0.0 && margin < 1.0 / (2.0 * n as f64), "0 < margin < 1/(2n)")?;
    let cells: Vec<Interval> = (0..n)
        .map(|i| {
            let c = i as f64 / n as f64;
            Interval { lo: c - margin, hi: c + margin }
        })
        .collect();
    NeuronSpec::from_parts(
        Activation::Synthetic,
        Order::First,
        1.0,
        Params { margin: Some(margin), ..Params::default() },
        PrimeKind::Group(cayley),
        cells.clone(),
        cells,
    )
}
