//! Symbol groundings and compilation of cascades into recurrent neural
//! cascades (RNCs) whose input maps are exact piecewise-constant tables.

mod check;
pub mod format;

use serde::Serialize;

use crate::automata::{CascadeSpec, OutputSpec, OutputTiming, PrimeKind, Wiring};
use crate::error::{Error, Result};
use crate::neurons::{
    make_c2_sign, make_c2_tanh, make_sign_flipflop, make_sign_toggle, make_synthetic_group_neuron,
    make_tanh_flipflop, make_tanh_toggle, optimal_tanh_ab, Activation, Interval, NeuronSpec,
};

pub use check::{
    alternation_probe, check_equivalence, check_homomorphism, check_symbolic_homomorphism, compare_word, noisy_inputs,
    HOMOMORPHISM_TOLERANCE,
    EquivalenceReport, HomomorphismReport, HomomorphismWitness, Mismatch,
};

/// Disjoint closed regions of the real line, one per letter.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrounding {
    letters: Vec<String>,
    regions: Vec<Interval>,
    radius: f64,
}

impl SymbolGrounding {
    pub fn new(letters: Vec<String>, regions: Vec<Interval>, radius: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::invalid("grounding has no letters"));
        }
        if letters.len() != regions.len() {
            return Err(Error::invalid("grounding needs one region per letter"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::params("radius > 0"));
        }
        for (i, r) in regions.iter().enumerate() {
            Interval::new(r.lo, r.hi)?;
            if !r.is_bounded() || r.length() < 2.0 * radius {
                return Err(Error::params(format!("length of region {} ≥ 2·radius", letters[i])));
            }
            if letters[..i].contains(&letters[i]) {
                return Err(Error::invalid(format!("grounding repeats letter {:?}", letters[i])));
            }
            if let Some(j) = regions[..i].iter().position(|o| !o.disjoint(r)) {
                return Err(Error::invalid(format!(
                    "regions of {} and {} overlap",
                    letters[j], letters[i]
                )));
            }
        }
        Ok(SymbolGrounding { letters, regions, radius })
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn regions(&self) -> &[Interval] {
        &self.regions
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Letter index of the region containing `u`.
    pub fn ground(&self, u: f64) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(u))
    }

    pub fn midpoint(&self, letter: usize) -> f64 {
        self.regions[letter].representative()
    }
}

/// Letter `k` ↦ `[k − 0.25, k + 0.25]`, radius 0.25.
pub fn default_grounding<S: AsRef<str>>(alphabet: &[S]) -> Result<SymbolGrounding> {
    let letters = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
    let regions = (0..alphabet.len())
        .map(|k| Interval { lo: k as f64 - 0.25, hi: k as f64 + 0.25 })
        .collect();
    SymbolGrounding::new(letters, regions, 0.25)
}

pub fn ground(g: &SymbolGrounding, u: f64) -> Option<String> {
    g.ground(u).map(|l| g.letters[l].clone())
}

/// Activation and parameters for one component. Unset parameters take
/// defaults: `a = 0.5` for sign cores (sign of `w` for C2), optimal `(a, b)`
/// for tanh flip-flops and toggles, `a = ±1` for C2 tanh, margin `1/(4n)`
/// for synthetic group neurons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronChoice {
    pub activation: Activation,
    pub w: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub margin: Option<f64>,
}

impl NeuronChoice {
    pub fn sign(w: f64) -> Self {
        NeuronChoice { activation: Activation::Sign, w, a: None, b: None, margin: None }
    }

    pub fn tanh(w: f64) -> Self {
        NeuronChoice { activation: Activation::Tanh, w, a: None, b: None, margin: None }
    }

    pub fn synthetic() -> Self {
        NeuronChoice { activation: Activation::Synthetic, w: 1.0, a: None, b: None, margin: None }
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = Some(b);
        self
    }

    /// Builds the neuron for a component of `kind`.
    pub fn realize(&self, kind: &PrimeKind) -> Result<NeuronSpec> {
        let w = self.w;
        let tanh_ab = || match (self.a, self.b) {
            (Some(a), Some(b)) => Ok((a, b)),
            (None, None) => Ok(optimal_tanh_ab(w.abs()).unwrap_or((0.0, 0.0))),
            _ => Err(Error::invalid("tanh parameters a and b must be given together")),
        };
        match (self.activation, kind) {
            (Activation::Sign, PrimeKind::FlipFlop) => make_sign_flipflop(w, self.a.unwrap_or(0.5)),
            (Activation::Sign, PrimeKind::Toggle) => make_sign_toggle(w, self.a.unwrap_or(0.5)),
            (Activation::Tanh, PrimeKind::FlipFlop) => {
                let (a, b) = tanh_ab()?;
                make_tanh_flipflop(w, a, b)
            }
            (Activation::Tanh, PrimeKind::Toggle) => {
                let (a, b) = tanh_ab()?;
                make_tanh_toggle(w, a, b)
            }
            (Activation::Sign | Activation::Tanh, PrimeKind::Group(g)) if !g.is_c2() => Err(Error::invalid(format!(
                "{} neurons realize only C2; this group has order {}",
                self.activation.tag(),
                g.order()
            ))),
            (Activation::Sign, PrimeKind::Group(_)) => make_c2_sign(w, self.a.unwrap_or(0.5 * w.signum())),
            (Activation::Tanh, PrimeKind::Group(_)) => make_c2_tanh(w, self.a.unwrap_or(w.signum())),
            (Activation::Synthetic, PrimeKind::Group(g)) => {
                make_synthetic_group_neuron(g.clone(), self.margin.unwrap_or(0.25 / g.order() as f64))
            }
            (Activation::Synthetic, k) => Err(Error::invalid(format!(
                "synthetic neurons realize group components, not {}",
                k.tag()
            ))),
        }
    }
}

/// `β`: the real input of a neuron as a function of the external letter and
/// the interpreted states of the neurons it reads.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseInputMap {
    reads: Vec<usize>,
    radices: Vec<usize>,
    /// Internal letter per (letter, read states), letter most significant.
    targets: Vec<usize>,
    values: Vec<f64>,
}

impl PiecewiseInputMap {
    fn new(spec: &NeuronSpec, reads: Vec<usize>, radices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let targets = values
            .iter()
            .map(|&v| {
                let p = spec.input_symbol(v).ok_or_else(|| {
                    Error::invalid(format!("input map value {v} lies in no input interval"))
                })?;
                let iv = spec.input_intervals()[p];
                if iv.lo < v && v < iv.hi {
                    Ok(p)
                } else {
                    Err(Error::invalid(format!("input map value {v} is not inside {iv}")))
                }
            })
            .collect::<Result<_>>()?;
        Ok(PiecewiseInputMap { reads, radices, targets, values })
    }

    pub fn reads(&self) -> &[usize] {
        &self.reads
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index(&self, letter: usize, interp: &[usize]) -> usize {
        self.reads
            .iter()
            .zip(&self.radices)
            .fold(letter, |acc, (&j, &r)| acc * r + interp[j])
    }

    pub fn value(&self, letter: usize, interp: &[usize]) -> f64 {
        self.values[self.index(letter, interp)]
    }

    /// Internal letter whose input interval the value realizes.
    pub fn target(&self, letter: usize, interp: &[usize]) -> usize {
        self.targets[self.index(letter, interp)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNeuron {
    pub name: String,
    pub spec: NeuronSpec,
    pub input_map: PiecewiseInputMap,
}

/// A recurrent neural cascade (or network) with exact input maps and an
/// output table over interpreted states.
#[derive(Debug, Clone, PartialEq)]
pub struct Rnc {
    wiring: Wiring,
    neurons: Vec<CompiledNeuron>,
    initial: Vec<f64>,
    output: Option<OutputSpec>,
    grounding: SymbolGrounding,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: usize,
    pub u: f64,
    pub letter: String,
    pub state: Vec<f64>,
    pub interp: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outputs: Vec<String>,
    /// One record per input, holding the state after that input.
    pub trace: Vec<TraceRecord>,
    pub final_state: Vec<f64>,
}

impl Rnc {
    pub fn new(
        wiring: Wiring,
        neurons: Vec<CompiledNeuron>,
        initial: Vec<f64>,
        output: Option<OutputSpec>,
        grounding: SymbolGrounding,
    ) -> Result<Self> {
        if neurons.is_empty() {
            return Err(Error::invalid("no neurons"));
        }
        if initial.len() != neurons.len() {
            return Err(Error::invalid("initial state has the wrong length"));
        }
        let sigma = grounding.letters().len();
        for (i, n) in neurons.iter().enumerate() {
            let m = &n.input_map;
            for &j in &m.reads {
                let allowed = match wiring {
                    Wiring::Cascade => j < i,
                    Wiring::Network => j != i && j < neurons.len(),
                };
                if !allowed {
                    return Err(Error::invalid(format!("neuron {i} may not read neuron {j}")));
                }
            }
            let radices: Vec<usize> = m.reads.iter().map(|&j| neurons[j].spec.kind().num_states()).collect();
            if radices != m.radices || m.values.len() != sigma * radices.iter().product::<usize>() {
                return Err(Error::invalid(format!("input map of neuron {i} has the wrong shape")));
            }
            if n.spec.interpret(initial[i]).is_none() {
                return Err(Error::InterpretationGap { neuron: i, name: n.name.clone(), value: initial[i], step: 0 });
            }
        }
        if let Some(out) = &output {
            let radices: Vec<usize> =
                out.reads.iter().map(|&j| neurons.get(j).map_or(0, |n| n.spec.kind().num_states())).collect();
            if radices.contains(&0) || out.table.len() != sigma * radices.iter().product::<usize>() {
                return Err(Error::invalid("output table has the wrong shape"));
            }
            if out.table.iter().any(|&y| y as usize >= out.alphabet.len()) {
                return Err(Error::invalid("output table uses an unknown output letter"));
            }
        }
        Ok(Rnc { wiring, neurons, initial, output, grounding })
    }

    pub fn wiring(&self) -> Wiring {
        self.wiring
    }

    pub fn neurons(&self) -> &[CompiledNeuron] {
        &self.neurons
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn output(&self) -> Option<&OutputSpec> {
        self.output.as_ref()
    }

    pub fn grounding(&self) -> &SymbolGrounding {
        &self.grounding
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    /// A copy with neuron `i`'s core replaced; the input map is kept as is.
    pub fn with_neuron_spec(&self, i: usize, spec: NeuronSpec) -> Result<Self> {
        let mut neurons = self.neurons.clone();
        let old = &neurons[i];
        let map = PiecewiseInputMap::new(&spec, old.input_map.reads.clone(), old.input_map.radices.clone(), old.input_map.values.clone())?;
        neurons[i] = CompiledNeuron { name: old.name.clone(), spec, input_map: map };
        Rnc::new(self.wiring, neurons, self.initial.clone(), self.output.clone(), self.grounding.clone())
    }

    /// A copy with a different output table.
    pub fn with_output(&self, output: Option<OutputSpec>) -> Result<Self> {
        Rnc::new(self.wiring, self.neurons.clone(), self.initial.clone(), output, self.grounding.clone())
    }

    /// ψ applied componentwise.
    pub fn interpret(&self, x: &[f64]) -> Option<Vec<usize>> {
        x.iter().zip(&self.neurons).map(|(&xi, n)| n.spec.interpret(xi)).collect()
    }

    fn interpret_at(&self, x: &[f64], step: usize) -> Result<Vec<usize>> {
        x.iter()
            .zip(&self.neurons)
            .enumerate()
            .map(|(i, (&value, n))| {
                n.spec.interpret(value).ok_or_else(|| Error::InterpretationGap {
                    neuron: i,
                    name: n.name.clone(),
                    value,
                    step,
                })
            })
            .collect()
    }

    /// The inputs `β_i(letter, ψ(x))` of every neuron.
    pub fn neuron_inputs(&self, interp: &[usize], letter: usize) -> Vec<f64> {
        self.neurons.iter().map(|n| n.input_map.value(letter, interp)).collect()
    }

    /// One synchronous step given the interpretation of `x`.
    pub fn step_with(&self, x: &[f64], interp: &[usize], letter: usize) -> Vec<f64> {
        self.neurons
            .iter()
            .zip(x)
            .map(|(n, &xi)| n.spec.step(xi, n.input_map.value(letter, interp)))
            .collect()
    }

    /// One step on a real input; fails if `u` is ungroundable or `x` is
    /// outside the state partitions.
    pub fn step(&self, x: &[f64], u: f64) -> Result<Vec<f64>> {
        let letter = self.grounding.ground(u).ok_or(Error::Ungroundable { value: u, position: 0 })?;
        let interp = self.interpret_at(x, 0)?;
        Ok(self.step_with(x, &interp, letter))
    }

    fn output_letter(&self, before: &[usize], after: &[usize], letter: usize) -> Option<usize> {
        let out = self.output.as_ref()?;
        let state = match out.timing {
            OutputTiming::Pre => before,
            OutputTiming::Post => after,
        };
        let idx = out
            .reads
            .iter()
            .fold(letter, |acc, &j| acc * self.neurons[j].spec.kind().num_states() + state[j]);
        Some(out.table[idx] as usize)
    }

    /// Runs on real inputs from the initial state.
    pub fn run(&self, inputs: &[f64]) -> Result<RunResult> {
        let mut x = self.initial.clone();
        let mut interp = self.interpret_at(&x, 0)?;
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut trace = Vec::with_capacity(inputs.len());
        for (t, &u) in inputs.iter().enumerate() {
            let letter = self.grounding.ground(u).ok_or(Error::Ungroundable { value: u, position: t })?;
            let next = self.step_with(&x, &interp, letter);
            let next_interp = self.interpret_at(&next, t + 1)?;
            let y = self
                .output_letter(&interp, &next_interp, letter)
                .map(|y| self.output.as_ref().expect("output present").alphabet[y].clone());
            if let Some(y) = &y {
                outputs.push(y.clone());
            }
            trace.push(TraceRecord {
                t: t + 1,
                u,
                letter: self.grounding.letters()[letter].clone(),
                state: next.clone(),
                interp: next_interp
                    .iter()
                    .zip(&self.neurons)
                    .map(|(&q, n)| n.spec.state_names()[q].clone())
                    .collect(),
                y,
            });
            x = next;
            interp = next_interp;
        }
        Ok(RunResult { outputs, trace, final_state: x })
    }

    /// Real inputs at the region midpoints of `letters`.
    pub fn encode_letters<S: AsRef<str>>(&self, letters: &[S]) -> Result<Vec<f64>> {
        letters
            .iter()
            .enumerate()
            .map(|(position, l)| {
                let k = self.grounding.letters().iter().position(|g| g == l.as_ref()).ok_or_else(|| {
                    Error::UnknownLetter { letter: l.as_ref().to_string(), position }
                })?;
                Ok(self.grounding.midpoint(k))
            })
            .collect()
    }
}

pub fn rnc_run(r: &Rnc, inputs: &[f64]) -> Result<RunResult> {
    r.run(inputs)
}

/// Compiles `spec` into an RNC. `choices` holds one entry per component, or
/// a single entry used for all of them.
pub fn compile(spec: &CascadeSpec, choices: &[NeuronChoice], grounding: &SymbolGrounding) -> Result<Rnc> {
    if spec.is_empty() {
        return Err(Error::invalid("no components"));
    }
    if grounding.letters() != spec.alphabet() {
        return Err(Error::invalid("grounding letters differ from the alphabet"));
    }
    let choice = |i: usize| match choices.len() {
        1 => Ok(choices[0]),
        n if n == spec.len() => Ok(choices[i]),
        n => Err(Error::invalid(format!("{n} neuron choices for {} components", spec.len()))),
    };
    let mut neurons = Vec::with_capacity(spec.len());
    let mut initial = Vec::with_capacity(spec.len());
    for (i, c) in spec.components().iter().enumerate() {
        let neuron = choice(i)?.realize(&c.kind)?;
        let values = c.table.iter().map(|&p| neuron.input_intervals()[p as usize].representative()).collect();
        let radices = c.reads.iter().map(|&j| spec.radices()[j]).collect();
        let input_map = PiecewiseInputMap::new(&neuron, c.reads.clone(), radices, values)?;
        initial.push(neuron.state_intervals()[c.initial].representative());
        neurons.push(CompiledNeuron { name: c.name.clone(), spec: neuron, input_map });
    }
    Rnc::new(spec.wiring(), neurons, initial, spec.output().cloned(), grounding.clone())
}
