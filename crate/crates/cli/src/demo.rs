use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use rnc_core::automata::format::{automaton_to_json, cascade_to_json};
use rnc_core::automata::CascadeSpec;
use rnc_core::compiler::format::rnc_to_json;
use rnc_core::compiler::{alternation_probe, compare_word, Mismatch, Rnc};
use rnc_core::patterns::{
    cookie_belief, cookie_cascade, cookie_reference, episode_from_jsonl, episode_to_jsonl, parity_spec,
    price_letters, prices_from_json, prices_to_json, probability_letter, random_prices, ttop_cascade,
    ttop_reference, ttop_transducer, CookieEpisode, CookieObservation, FnTransducer, COOKIE_LETTERS,
};

use crate::check::report;
use crate::commands::{compile_with, read, write};
use crate::{DemoName, NeuronArgs, RunConfig, Verdict};

const TTOP_TRIALS: u64 = 200;
const TTOP_MAX_LEN: u64 = 40;
const COOKIE_EPISODES: u64 = 100;
const COOKIE_STEPS: u64 = 100;
const PARITY_MAX_LEN: u64 = 1000;

pub struct DemoOptions {
    pub neuron: NeuronArgs,
    pub config: RunConfig,
    pub bits: usize,
    pub episodes: Option<u64>,
    pub fixtures: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

fn stream(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Files `<prefix><n><suffix>` in `dir`, ordered by `n`.
fn fixture_files(dir: &Path, prefix: &str, suffix: &str) -> anyhow::Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(n) = name.strip_prefix(prefix).and_then(|r| r.strip_suffix(suffix)) {
            let key = n.parse::<u64>().unwrap_or(u64::MAX);
            found.push((key, name.to_string(), path));
        }
    }
    found.sort();
    anyhow::ensure!(!found.is_empty(), "no {prefix}*{suffix} files in {}", dir.display());
    Ok(found.into_iter().map(|(_, _, p)| p).collect())
}

fn emit(dir: &Path, files: impl IntoIterator<Item = (String, String)>) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in files {
        write(&dir.join(name), &text)?;
    }
    Ok(())
}

/// `cascade.json` and `rnc.json` for the construction being checked.
fn construction(spec: &CascadeSpec, r: &Rnc) -> [(String, String); 2] {
    [("cascade.json".into(), cascade_to_json(spec) + "\n"), ("rnc.json".into(), rnc_to_json(r) + "\n")]
}

fn first(mismatches: Vec<Option<Mismatch>>) -> (usize, Option<Mismatch>) {
    let failed = mismatches.iter().filter(|m| m.is_some()).count();
    (failed, mismatches.into_iter().flatten().next())
}

fn ttop(opts: &DemoOptions) -> anyhow::Result<Verdict> {
    let bits = opts.bits;
    let seed = opts.config.seed;
    let sequences: Vec<Vec<u64>> = match &opts.fixtures {
        Some(dir) => fixture_files(dir, "prices_", ".json")?
            .iter()
            .map(|p| prices_from_json(&read(p)?).with_context(|| format!("loading {}", p.display())))
            .collect::<anyhow::Result<_>>()?,
        None => {
            let trials = opts.config.trials.unwrap_or(TTOP_TRIALS) as usize;
            let max_len = opts.config.max_len.unwrap_or(TTOP_MAX_LEN) as usize;
            (0..trials).map(|i| random_prices(&mut stream(seed, i), bits, max_len)).collect()
        }
    };
    if let Some(dir) = &opts.output {
        emit(dir, sequences.iter().enumerate().map(|(i, p)| (format!("prices_{i}.json"), prices_to_json(p) + "\n")))?;
    }
    let spec = ttop_cascade(bits)?;
    let r = compile_with(&spec, opts.neuron)?;
    let letters: Vec<Vec<usize>> = sequences.iter().map(|p| price_letters(p, bits)).collect::<Result<_, _>>()?;
    let reference = ttop_transducer(bits)?;
    let mut cascade_agreeing = 0;
    for (p, l) in sequences.iter().zip(&letters) {
        let expected: Vec<usize> = ttop_reference(p).into_iter().map(usize::from).collect();
        cascade_agreeing += usize::from(spec.run_outputs(l)? == expected);
    }
    let (failed, mismatch) = first(
        letters
            .par_iter()
            .enumerate()
            .map(|(i, l)| compare_word(&r, &reference, l, &mut stream(seed ^ 1, i)).map(|m| Mismatch { trial: i, ..m }))
            .collect(),
    );
    let n = sequences.len();
    let positives: usize = sequences.iter().map(|p| ttop_reference(p).into_iter().filter(|&y| y).count()).sum();
    let passed = failed == 0 && cascade_agreeing == n;
    let body = json!({
        "demo": "ttop",
        "bits": bits,
        "neurons": r.len(),
        "trials": n,
        "positive_outputs": positives,
        "cascade_agreeing": cascade_agreeing,
        "rnc_agreeing": n - failed,
        "first_mismatch": mismatch,
    });
    let worst = failed.max(n - cascade_agreeing);
    report("demo ttop", passed, body, &format!("{}/{n} sequences", n - worst))
}

fn cookie(opts: &DemoOptions) -> anyhow::Result<Verdict> {
    let seed = opts.config.seed;
    let episodes: Vec<CookieEpisode> = match &opts.fixtures {
        Some(dir) => fixture_files(dir, "cookie_episode_", ".jsonl")?
            .iter()
            .map(|p| episode_from_jsonl(&read(p)?).with_context(|| format!("loading {}", p.display())))
            .collect::<anyhow::Result<_>>()?,
        None => {
            let count = opts.episodes.unwrap_or(COOKIE_EPISODES);
            let steps = opts.config.max_len.unwrap_or(COOKIE_STEPS) as usize;
            (0..count).map(|i| cookie_reference(seed.wrapping_add(i), steps)).collect()
        }
    };
    let spec = cookie_cascade()?;
    let r = compile_with(&spec, opts.neuron)?;
    if let Some(dir) = &opts.output {
        let fixtures = episodes.iter().enumerate().map(|(i, e)| (format!("cookie_episode_{i}.jsonl"), episode_to_jsonl(e)));
        emit(dir, construction(&spec, &r).into_iter().chain(fixtures))?;
    }
    let output = spec.output().expect("cookie cascade has an output");
    let predictor = FnTransducer::new(
        COOKIE_LETTERS.iter().map(|s| s.to_string()).collect(),
        |letters: &[usize]| {
            let obs: Vec<CookieObservation> =
                letters.iter().map(|&l| CookieObservation::from_letter(l).expect("cookie letter")).collect();
            let belief = cookie_belief(&obs).unwrap_or_default();
            belief.iter().map(|&p| probability_letter(p).unwrap_or("?").to_string()).collect()
        },
    );
    let mut oracle_agreeing = 0;
    let mut cascade_agreeing = 0;
    let mut letters = Vec::with_capacity(episodes.len());
    for e in &episodes {
        let belief = cookie_belief(&e.observations)?;
        oracle_agreeing += usize::from(belief == e.probabilities);
        let l: Vec<usize> = e.observations.iter().map(|o| o.letter()).collect::<Result<_, _>>()?;
        let got: Vec<&str> = spec.run_outputs(&l)?.into_iter().map(|y| output.alphabet[y].as_str()).collect();
        let expected: Vec<&str> = e.probabilities.iter().map(|&p| probability_letter(p).unwrap_or("?")).collect();
        cascade_agreeing += usize::from(got == expected);
        letters.push(l);
    }
    let (failed, mismatch) = first(
        letters
            .par_iter()
            .enumerate()
            .map(|(i, l)| compare_word(&r, &predictor, l, &mut stream(seed, i)).map(|m| Mismatch { trial: i, ..m }))
            .collect(),
    );
    let n = episodes.len();
    let passed = failed == 0 && cascade_agreeing == n && oracle_agreeing == n;
    let body = json!({
        "demo": "cookie",
        "neurons": r.len(),
        "episodes": n,
        "oracle_agreeing": oracle_agreeing,
        "cascade_agreeing": cascade_agreeing,
        "rnc_agreeing": n - failed,
        "first_mismatch": mismatch,
    });
    let worst = failed.max(n - cascade_agreeing).max(n - oracle_agreeing);
    report("demo cookie", passed, body, &format!("{}/{n} episodes", n - worst))
}

fn parity(opts: &DemoOptions) -> anyhow::Result<Verdict> {
    let max_len = opts.config.max_len.unwrap_or(PARITY_MAX_LEN) as usize;
    let (a, spec) = parity_spec()?;
    let r = compile_with(&spec, opts.neuron)?;
    if let Some(dir) = &opts.output {
        let automaton = ("automaton.json".to_string(), automaton_to_json(&a) + "\n");
        emit(dir, construction(&spec, &r).into_iter().chain([automaton]))?;
    }
    let cascade_agreeing = (0..=max_len).filter(|&k| spec.run_outputs(&vec![0; k]).ok() == Some(a.run_indices(&vec![0; k]))).count();
    let (failed, mismatch) = first(
        (0..=max_len)
            .into_par_iter()
            .map(|k| compare_word(&r, &a, &vec![0; k], &mut stream(opts.config.seed, k)).map(|m| Mismatch { trial: k, ..m }))
            .collect(),
    );
    let alternates = alternation_probe(&r, "a", max_len)?;
    let n = max_len + 1;
    let passed = failed == 0 && cascade_agreeing == n && alternates;
    let body = json!({
        "demo": "parity",
        "weight": r.neurons()[0].spec.w(),
        "words": n,
        "cascade_agreeing": cascade_agreeing,
        "rnc_agreeing": n - failed,
        "alternates": alternates,
        "first_mismatch": mismatch,
    });
    let summary = format!("{}/{n} words, alternation {}", n - failed, if alternates { "holds" } else { "broken" });
    report("demo parity", passed, body, &summary)
}

pub fn demo(name: DemoName, opts: &DemoOptions) -> anyhow::Result<Verdict> {
    match name {
        DemoName::Ttop => ttop(opts),
        DemoName::Cookie => cookie(opts),
        DemoName::Parity => parity(opts),
    }
}
