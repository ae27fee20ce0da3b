use std::fs;
use std::path::Path;

use anyhow::Context;

use rnc_core::automata::format::cascade_from_json;
use rnc_core::automata::{CascadeSpec, PrimeKind};
use rnc_core::compiler::format::{rnc_from_json, rnc_to_json};
use rnc_core::compiler::{compile as compile_spec, default_grounding, NeuronChoice, Rnc};
use rnc_core::Error;

use crate::{ActivationArg, NeuronArgs, Verdict};

pub fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn load_cascade(path: &Path) -> anyhow::Result<CascadeSpec> {
    cascade_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

pub fn load_rnc(path: &Path) -> anyhow::Result<Rnc> {
    rnc_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

/// One neuron per component. Groups other than C2 get synthetic neurons;
/// without `--weight`, toggles get a negative weight and the rest a positive
/// one.
pub fn choices(spec: &CascadeSpec, args: NeuronArgs) -> Vec<NeuronChoice> {
    spec.components()
        .iter()
        .map(|c| {
            let magnitude = match args.activation {
                ActivationArg::Sign => 1.0,
                ActivationArg::Tanh => 2.0,
            };
            let w = args.weight.unwrap_or(match c.kind {
                PrimeKind::Toggle => -magnitude,
                _ => magnitude,
            });
            let mut choice = match (&c.kind, args.activation) {
                (PrimeKind::Group(g), _) if !g.is_c2() => return NeuronChoice::synthetic(),
                (_, ActivationArg::Sign) => NeuronChoice::sign(w),
                (_, ActivationArg::Tanh) => NeuronChoice::tanh(w),
            };
            choice.a = args.a;
            choice.b = args.b;
            choice
        })
        .collect()
}

pub fn compile_with(spec: &CascadeSpec, args: NeuronArgs) -> anyhow::Result<Rnc> {
    Ok(compile_spec(spec, &choices(spec, args), &default_grounding(spec.alphabet())?)?)
}

pub fn compile(cascade: &Path, args: NeuronArgs, output: Option<&Path>) -> anyhow::Result<Verdict> {
    let spec = load_cascade(cascade)?;
    let r = compile_with(&spec, args)?;
    for n in r.neurons() {
        let p = n.spec.params();
        let mut line = format!("{} {} {} w={}", n.name, n.spec.kind().tag(), n.spec.activation().tag(), n.spec.w());
        for (k, v) in [("a", p.a), ("b", p.b), ("margin", p.margin)] {
            if let Some(v) = v {
                line += &format!(" {k}={v}");
            }
        }
        eprintln!("{line}");
    }
    eprintln!("{} neurons, {} letters", r.len(), r.grounding().letters().len());
    let json = rnc_to_json(&r);
    match output {
        Some(path) => write(path, &(json + "\n"))?,
        None => println!("{json}"),
    }
    Ok(Verdict::Pass)
}

/// Tokens are letters of the grounding, real numbers, or runs of
/// one-character letters.
pub fn parse_inputs(r: &Rnc, text: &str) -> Result<Vec<f64>, Error> {
    let letters = r.grounding().letters();
    let index = |s: &str| letters.iter().position(|l| l == s);
    let mut inputs = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        if let Some(k) = index(token) {
            inputs.push(r.grounding().midpoint(k));
        } else if let Ok(u) = token.parse::<f64>() {
            inputs.push(u);
        } else {
            for c in token.chars() {
                let mut buf = [0u8; 4];
                let k = index(c.encode_utf8(&mut buf)).ok_or_else(|| Error::UnknownLetter {
                    letter: token.to_string(),
                    position: inputs.len(),
                })?;
                inputs.push(r.grounding().midpoint(k));
            }
        }
    }
    Ok(inputs)
}

pub fn run(rnc: &Path, input: Option<&str>, file: Option<&Path>, trace: bool) -> anyhow::Result<Verdict> {
    let r = load_rnc(rnc)?;
    let text = match file {
        Some(path) => read(path)?,
        None => input.unwrap_or_default().to_string(),
    };
    let result = r.run(&parse_inputs(&r, &text)?)?;
    if trace {
        for record in &result.trace {
            println!("{}", serde_json::to_string(record)?);
        }
    } else {
        println!("{}", result.outputs.join(" "));
    }
    eprintln!("{} steps", result.trace.len());
    Ok(Verdict::Pass)
}
