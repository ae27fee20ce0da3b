use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde_json::{json, Value};

use rnc_core::automata::format::{automaton_from_json, semiautomaton_from_json};
use rnc_core::automata::{characteristic_semigroup, compose, flatten_automaton, Automaton, Semiautomaton};
use rnc_core::compiler::{check_equivalence, check_homomorphism};
use rnc_core::neurons::format::neuron_from_json;
use rnc_core::neurons::verify_core_conditions;
use rnc_core::semigroups::is_aperiodic;

use crate::commands::{load_cascade, load_rnc, read};
use crate::{RunConfig, Subject, Verdict};

const HOMOMORPHISM_SAMPLES: u64 = 10_000;
const EQUIVALENCE_TRIALS: u64 = 200;
const EQUIVALENCE_MAX_LEN: u64 = 40;

/// Prints the report with its verdict and maps it to an exit status.
pub fn report(name: &str, passed: bool, mut body: Value, summary: &str) -> anyhow::Result<Verdict> {
    let verdict = if passed { "PASS" } else { "FAIL" };
    body["check"] = json!(name);
    body["result"] = json!(verdict);
    println!("{}", serde_json::to_string(&body)?);
    eprintln!("{verdict} {name}: {summary}");
    Ok(if passed { Verdict::Pass } else { Verdict::Fail })
}

fn files<const N: usize>(subject: &str, files: &[PathBuf]) -> anyhow::Result<[PathBuf; N]> {
    match <[PathBuf; N]>::try_from(files.to_vec()) {
        Ok(f) => Ok(f),
        Err(_) => bail!("check {subject} takes {N} file(s), got {}", files.len()),
    }
}

/// Semiautomaton of an automaton, semiautomaton or cascade document, told
/// apart by their keys.
fn load_dynamics(path: &Path) -> anyhow::Result<Semiautomaton> {
    let text = read(path)?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let s = if doc.get("components").is_some() {
        compose(&load_cascade(path)?)?
    } else if doc.get("outputs").is_some() {
        automaton_from_json(&text)?.semiautomaton().clone()
    } else {
        semiautomaton_from_json(&text)?
    };
    Ok(s)
}

fn load_automaton(path: &Path) -> anyhow::Result<Automaton> {
    let text = read(path)?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if doc.get("components").is_some() {
        Ok(flatten_automaton(&load_cascade(path)?)?)
    } else {
        automaton_from_json(&text).with_context(|| format!("loading {}", path.display()))
    }
}

fn aperiodic(path: &Path) -> anyhow::Result<Verdict> {
    let s = load_dynamics(path)?;
    let sg = characteristic_semigroup(&s)?;
    let passed = is_aperiodic(&sg);
    let witness = sg.aperiodicity_witness().map(|x| {
        // generator positions back to the first letter inducing them
        let word: Vec<&str> = sg
            .word(x)
            .into_iter()
            .map(|g| {
                let t = sg.element(sg.generators()[g]);
                let l = (0..s.alphabet().len()).find(|&l| &s.letter_transformation(l) == t).expect("generator");
                s.alphabet()[l].as_str()
            })
            .collect();
        let (index, period) = sg.power_sequence(x);
        json!({ "word": word, "index": index, "period": period })
    });
    let summary = match &witness {
        None => format!("{} elements, every power sequence stabilizes", sg.len()),
        Some(w) => format!("{} elements, powers of {} cycle with period {}", sg.len(), w["word"], w["period"]),
    };
    let body = json!({ "states": s.num_states(), "semigroup_size": sg.len(), "aperiodic": passed, "witness": witness });
    report("aperiodic", passed, body, &summary)
}

fn neuron(path: &Path, grid: usize) -> anyhow::Result<Verdict> {
    let spec = neuron_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))?;
    let r = verify_core_conditions(&spec, grid);
    let mut failed: Vec<String> = r.failures().map(|c| c.condition.clone()).collect();
    failed.sort();
    failed.dedup();
    let summary = if failed.is_empty() {
        format!("{} conditions hold", r.results.len())
    } else {
        format!("violated: {}", failed.join(", "))
    };
    report("neuron", r.passed(), serde_json::to_value(&r)?, &summary)
}

fn homomorphism(rnc: &Path, cascade: &Path, config: RunConfig) -> anyhow::Result<Verdict> {
    let r = load_rnc(rnc)?;
    let spec = load_cascade(cascade)?;
    let samples = config.trials.unwrap_or(HOMOMORPHISM_SAMPLES) as usize;
    let rep = check_homomorphism(&r, &spec, samples, config.seed)?;
    let summary = format!("{} violations in {} checks", rep.violations, rep.checked);
    report("homomorphism", rep.passed(), serde_json::to_value(&rep)?, &summary)
}

fn equivalence(rnc: &Path, automaton: &Path, config: RunConfig) -> anyhow::Result<Verdict> {
    let r = load_rnc(rnc)?;
    let a = load_automaton(automaton)?;
    let trials = config.trials.unwrap_or(EQUIVALENCE_TRIALS) as usize;
    let max_len = config.max_len.unwrap_or(EQUIVALENCE_MAX_LEN) as usize;
    let rep = check_equivalence(&r, &a, trials, max_len, config.seed)?;
    let summary = format!("{}/{} words agree", rep.agreeing, rep.trials);
    report("equivalence", rep.passed(), serde_json::to_value(&rep)?, &summary)
}

pub fn check(subject: Subject, paths: &[PathBuf], config: RunConfig) -> anyhow::Result<Verdict> {
    match subject {
        Subject::Aperiodic => aperiodic(&files::<1>("aperiodic", paths)?[0]),
        Subject::Neuron => neuron(&files::<1>("neuron", paths)?[0], config.grid as usize),
        Subject::Homomorphism => {
            let [rnc, cascade] = files::<2>("homomorphism", paths)?;
            homomorphism(&rnc, &cascade, config)
        }
        Subject::Equivalence => {
            let [rnc, automaton] = files::<2>("equivalence", paths)?;
            equivalence(&rnc, &automaton, config)
        }
    }
}
