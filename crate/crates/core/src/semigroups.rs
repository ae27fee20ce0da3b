//! Transformation semigroups: generation, classification of transformations,
//! and the two group-freeness tests (aperiodicity and group divisors).
//!
//! Products are written left to right in the order transformations are
//! applied: `a · b` is "apply `a`, then `b`". This matches how a
//! semiautomaton reads a word, so the transformation of `σ1 σ2` is
//! `δ_σ1 · δ_σ2`.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest semigroup the group-divisor oracle will enumerate.
pub const DIVISOR_BRUTE_FORCE_BOUND: usize = 64;

/// Default cap on the number of elements produced by [`generate_semigroup`].
pub const DEFAULT_ELEMENT_LIMIT: usize = 1 << 20;

/// Largest semigroup for which the full composition table is materialized.
pub const TABLE_LIMIT: usize = 4096;

/// A total function on `{0, .., n-1}` stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Transformation(Vec<u32>);

/// The four mutually exclusive kinds of transformation. Identity is checked
/// first, so the identity on a single state is an identity, not a reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Identity,
    Reset,
    Permutation,
    Other,
}

impl Transformation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::invalid("transformation over an empty state set"));
        }
        if let Some((q, &img)) = images.iter().enumerate().find(|(_, &img)| img >= n) {
            return Err(Error::invalid(format!(
                "image of state {q} is {img}, outside 0..{n}"
            )));
        }
        Ok(Transformation(images.into_iter().map(|i| i as u32).collect()))
    }

    pub(crate) fn from_raw(images: Vec<u32>) -> Self {
        debug_assert!(images.iter().all(|&i| (i as usize) < images.len()));
        Transformation(images)
    }

    pub fn identity(n: usize) -> Self {
        Transformation((0..n as u32).collect())
    }

    pub fn constant(n: usize, q: usize) -> Self {
        assert!(q < n, "constant image {q} out of range for {n} states");
        Transformation(vec![q as u32; n])
    }

    /// Number of states acted on.
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, q: usize) -> usize {
        self.0[q] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    /// `self · other`: apply `self`, then `other`.
    pub fn then(&self, other: &Transformation) -> Transformation {
        debug_assert_eq!(self.degree(), other.degree());
        Transformation(self.0.iter().map(|&q| other.0[q as usize]).collect())
    }

    pub fn image_size(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        self.0.iter().filter(|&&q| !std::mem::replace(&mut seen[q as usize], true)).count()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(q, &img)| q == img as usize)
    }

    pub fn classify(&self) -> Classification {
        if self.is_identity() {
            Classification::Identity
        } else if self.image_size() == 1 {
            Classification::Reset
        } else if self.image_size() == self.degree() {
            Classification::Permutation
        } else {
            Classification::Other
        }
    }

    /// True iff some power of `self` is idempotent with `x^k = x^(k+1)`,
    /// i.e. every cycle of the functional graph is a fixed point.
    fn has_trivial_cycles(&self) -> bool {
        let n = self.degree();
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut path = Vec::new();
            let mut q = start;
            while !visited[q] {
                visited[q] = true;
                path.push(q);
                q = self.apply(q);
            }
            // `q` is either on this path (new cycle) or a previously visited
            // state whose cycle was already examined.
            if let Some(pos) = path.iter().position(|&p| p == q) {
                if path.len() - pos > 1 {
                    return false;
                }
            }
        }
        true
    }
}

/// A finite semigroup of transformations together with its generators.
#[derive(Debug)]
pub struct TransformationSemigroup {
    degree: usize,
    elements: Vec<Transformation>,
    generators: Vec<usize>,
    // Breadth-first spanning tree: element i = parent(i) · generator(i).
    parents: Vec<Option<usize>>,
    last_generator: Vec<usize>,
    index: HashMap<Transformation, usize>,
    table: OnceLock<Vec<u32>>,
}

impl TransformationSemigroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Transformation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Transformation {
        &self.elements[i]
    }

    /// Element indices of the (deduplicated) generators.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn index_of(&self, t: &Transformation) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// A word over generator positions whose product is element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut word = vec![self.last_generator[i]];
        while let Some(p) = self.parents[i] {
            i = p;
            word.push(self.last_generator[i]);
        }
        word.reverse();
        word
    }

    /// Index of `a · b`.
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        if let Some(table) = self.table.get() {
            return table[a * self.len() + b] as usize;
        }
        let product = self.elements[a].then(&self.elements[b]);
        self.index[&product]
    }

    /// The full composition table, row-major: `table[a * len + b] = a · b`.
    pub fn table(&self) -> Result<&[u32]> {
        if self.len() > TABLE_LIMIT {
            return Err(Error::Capacity {
                what: "composition table",
                size: self.len(),
                limit: TABLE_LIMIT,
            });
        }
        Ok(self.table.get_or_init(|| {
            let n = self.len();
            let mut table = Vec::with_capacity(n * n);
            for a in &self.elements {
                for b in &self.elements {
                    table.push(self.index[&a.then(b)] as u32);
                }
            }
            table
        }))
    }

    /// `(index, period)` of the monogenic sequence `x, x², x³, …`: the first
    /// repeated power is `x^(index+period) = x^index`.
    pub fn power_sequence(&self, x: usize) -> (usize, usize) {
        let mut first_seen: HashMap<usize, usize> = HashMap::new();
        let mut power = x;
        for k in 1.. {
            if let Some(&j) = first_seen.get(&power) {
                return (j, k - j);
            }
            first_seen.insert(power, k);
            power = self.multiply(power, x);
        }
        unreachable!()
    }

    /// First element whose powers never stabilize, if any.
    pub fn aperiodicity_witness(&self) -> Option<usize> {
        self.elements.iter().position(|t| !t.has_trivial_cycles())
    }

    /// Indices of idempotent elements.
    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.multiply(e, e) == e).collect()
    }

    /// The maximal subgroup with identity `e`, as element indices.
    fn maximal_subgroup(&self, e: usize) -> Vec<usize> {
        let local: Vec<usize> = (0..self.len())
            .filter(|&x| self.multiply(e, x) == x && self.multiply(x, e) == x)
            .collect();
        local
            .iter()
            .copied()
            .filter(|&x| {
                local
                    .iter()
                    .any(|&y| self.multiply(x, y) == e && self.multiply(y, x) == e)
            })
            .collect()
    }

    /// A nontrivial subgroup (hence a nontrivial group divisor), if one exists.
    pub fn group_divisor_witness(&self, bound: usize) -> Result<Option<Vec<usize>>> {
        if self.len() > bound {
            return Err(Error::Capacity {
                what: "semigroup for divisor search",
                size: self.len(),
                limit: bound,
            });
        }
        self.table()?;
        for e in self.idempotents() {
            let group = self.maximal_subgroup(e);
            if group.len() > 1 {
                return Ok(Some(group));
            }
        }
        Ok(None)
    }
}

/// Closure of `generators` under composition.
pub fn generate_semigroup(generators: &[Transformation]) -> Result<TransformationSemigroup> {
    generate_semigroup_bounded(generators, DEFAULT_ELEMENT_LIMIT)
}

pub fn generate_semigroup_bounded(
    generators: &[Transformation],
    limit: usize,
) -> Result<TransformationSemigroup> {
    let degree = match generators.first() {
        Some(g) => g.degree(),
        None => return Err(Error::invalid("no generators")),
    };
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::invalid(format!(
            "generators act on {} and {} states",
            degree,
            g.degree()
        )));
    }

    let mut elements: Vec<Transformation> = Vec::new();
    let mut index = HashMap::new();
    let mut parents = Vec::new();
    let mut last_generator = Vec::new();
    let mut gen_ids = Vec::new();
    for (k, g) in generators.iter().enumerate() {
        if !index.contains_key(g) {
            index.insert(g.clone(), elements.len());
            gen_ids.push(elements.len());
            elements.push(g.clone());
            parents.push(None);
            last_generator.push(k);
        }
    }
    // Right Cayley graph search: every element is reached as a product of
    // generators, so the closure is exactly the generated semigroup.
    let mut frontier = 0;
    while frontier < elements.len() {
        for (k, g) in generators.iter().enumerate() {
            let product = elements[frontier].then(g);
            if !index.contains_key(&product) {
                if elements.len() >= limit {
                    return Err(Error::Capacity {
                        what: "generated semigroup",
                        size: elements.len() + 1,
                        limit,
                    });
                }
                index.insert(product.clone(), elements.len());
                elements.push(product);
                parents.push(Some(frontier));
                last_generator.push(k);
            }
        }
        frontier += 1;
    }

    Ok(TransformationSemigroup {
        degree,
        elements,
        generators: gen_ids,
        parents,
        last_generator,
        index,
        table: OnceLock::new(),
    })
}

pub fn classify(t: &Transformation) -> Classification {
    t.classify()
}

/// Every element has a power with `x^k = x^(k+1)`.
pub fn is_aperiodic(s: &TransformationSemigroup) -> bool {
    s.aperiodicity_witness().is_none()
}

/// Brute-force oracle: does some nontrivial group divide `s`? Limited to
/// semigroups of at most [`DIVISOR_BRUTE_FORCE_BOUND`] elements.
pub fn has_nontrivial_group_divisor(s: &TransformationSemigroup) -> Result<bool> {
    Ok(s.group_divisor_witness(DIVISOR_BRUTE_FORCE_BOUND)?.is_some())
}
