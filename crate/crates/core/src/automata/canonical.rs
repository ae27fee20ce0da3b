use std::collections::{HashMap, VecDeque};

use super::{Automaton, Semiautomaton, StateSpace};

/// Restricts `a` to states reachable from the initial state and merges
/// states with identical output behaviour (Moore refinement).
///
/// States of the result are numbered in breadth-first order from the initial
/// state and named after the first state of their class, so the result is
/// unique for a given string-to-output function up to naming.
pub fn canonicalize(a: &Automaton) -> Automaton {
    let semi = a.semiautomaton();
    let sigma = semi.alphabet().len();

    let mut order = vec![a.initial()];
    let mut seen = vec![false; semi.num_states()];
    seen[a.initial()] = true;
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(q) = queue.pop_front() {
        for s in 0..sigma {
            let t = semi.step(q, s);
            if !seen[t] {
                seen[t] = true;
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    let local: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let n = order.len();

    // initial partition by output row
    let mut class = vec![0usize; n];
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, &q) in order.iter().enumerate() {
        let row: Vec<usize> = (0..sigma).map(|s| a.output(q, s)).collect();
        let next = ids.len();
        class[i] = *ids.entry(row).or_insert(next);
    }
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut refined = vec![0usize; n];
        for (i, &q) in order.iter().enumerate() {
            let succ: Vec<usize> = (0..sigma).map(|s| class[local[&semi.step(q, s)]]).collect();
            let next = ids.len();
            refined[i] = *ids.entry((class[i], succ)).or_insert(next);
        }
        let done = ids.len() == class.iter().max().map_or(0, |m| m + 1);
        class = refined;
        if done {
            break;
        }
    }

    // renumber classes in BFS order of the merged automaton
    let blocks = class.iter().max().map_or(0, |m| m + 1);
    let mut rep = vec![usize::MAX; blocks];
    for (i, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = i;
        }
    }
    let mut number = vec![usize::MAX; blocks];
    let mut reps = vec![class[0]];
    number[class[0]] = 0;
    let mut k = 0;
    while k < reps.len() {
        let q = order[rep[reps[k]]];
        for s in 0..sigma {
            let c = class[local[&semi.step(q, s)]];
            if number[c] == usize::MAX {
                number[c] = reps.len();
                reps.push(c);
            }
        }
        k += 1;
    }

    let mut transitions = Vec::with_capacity(reps.len() * sigma);
    let mut outputs = Vec::with_capacity(reps.len() * sigma);
    for &c in &reps {
        let q = order[rep[c]];
        for s in 0..sigma {
            transitions.push(number[class[local[&semi.step(q, s)]]]);
            outputs.push(a.output(q, s));
        }
    }
    let names = reps.iter().map(|&c| semi.state_name(order[rep[c]])).collect();
    let semi = Semiautomaton::new(semi.alphabet().to_vec(), None, StateSpace::Named(names), transitions)
        .expect("quotient of a valid automaton");
    Automaton::new(semi, 0, a.output_alphabet().to_vec(), outputs).expect("quotient of a valid automaton")
}
