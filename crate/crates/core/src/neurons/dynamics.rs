//! Long-run behaviour of a single neuron under a given input sequence.

use super::NeuronSpec;

/// `x_0, x_1, …, x_n` with `x_{t} = step(x_{t-1}, v_t)`.
pub fn trajectory(step: impl Fn(f64, f64) -> f64, x0: f64, inputs: &[f64]) -> Vec<f64> {
    let mut xs = Vec::with_capacity(inputs.len() + 1);
    xs.push(x0);
    let mut x = x0;
    for &v in inputs {
        x = step(x, v);
        xs.push(x);
    }
    xs
}

/// First `n ≥ from` with `|x_{n+1} − x_n| ≥ tol`, if any.
pub fn first_large_increment(xs: &[f64], from: usize, tol: f64) -> Option<usize> {
    (from..xs.len().saturating_sub(1)).find(|&n| {
        let d = (xs[n + 1] - xs[n]).abs();
        d.is_nan() || d >= tol
    })
}

/// True when the interpreted state changes at each of `steps` steps under
/// the constant input `v`, starting from `x0`.
pub fn alternates(spec: &NeuronSpec, x0: f64, v: f64, steps: usize) -> bool {
    let mut x = x0;
    let Some(mut q) = spec.interpret(x) else {
        return false;
    };
    for _ in 0..steps {
        x = spec.step(x, v);
        match spec.interpret(x) {
            Some(next) if next != q => q = next,
            _ => return false,
        }
    }
    true
}
