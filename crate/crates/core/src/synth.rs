//! Synthetic labeled sequences drawn from per-node Markov chains.
//!
//! Every taxonomy node gets an order-1 nucleotide chain
//! `M = (1 - s) * B + s * R_node`, where `B` is shared and `R_node` is the
//! node's signature matrix. Top-level signatures are random; a child's
//! signature mixes its parent's with fresh noise, so nearby nodes in the
//! tree stay nearby in k-mer space.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label::HierLabel;
use crate::seqio::Sequence;
use crate::taxonomy::{NodeId, Taxonomy};

const BASES: [u8; 4] = *b"ACGT";

/// Share of a child's signature taken from fresh noise.
const CHILD_NOISE: f64 = 0.5;

type Chain = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub taxonomy: Taxonomy,
    /// Average sequences per node; the dataset holds `per_node * nodes`.
    pub per_node: usize,
    /// Inclusive sequence length range.
    pub length: (usize, usize),
    pub separability: f64,
    pub internal_fraction: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(taxonomy: Taxonomy, seed: u64) -> Self {
        SynthSpec {
            taxonomy,
            per_node: 100,
            length: (500, 500),
            separability: 0.9,
            internal_fraction: 0.15,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.taxonomy.is_empty() {
            return Err(Error::contract("synthetic taxonomy needs at least one class"));
        }
        if self.length.0 < 1 || self.length.0 > self.length.1 {
            return Err(Error::contract(format!(
                "invalid length range {}..={}",
                self.length.0, self.length.1
            )));
        }
        if !(0.0..=1.0).contains(&self.separability) {
            return Err(Error::contract("separability must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.internal_fraction) {
            return Err(Error::contract("internal fraction must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Samples per node label. Internal nodes share `internal_fraction` of
    /// the total evenly and leaves share the rest; remainders go to the
    /// first nodes in label order. Without internal nodes every sample is
    /// a leaf sample.
    pub fn class_counts(&self) -> BTreeMap<HierLabel, usize> {
        let nodes: Vec<NodeId> = self.taxonomy.preorder().filter(|&n| n != Taxonomy::ROOT).collect();
        let (internal, leaves): (Vec<NodeId>, Vec<NodeId>) =
            nodes.iter().partition(|&&n| !self.taxonomy.is_leaf(n));
        let total = self.per_node * nodes.len();
        let internal_total = if internal.is_empty() {
            0
        } else {
            (self.internal_fraction * total as f64).round() as usize
        };
        let mut out = BTreeMap::new();
        for (group, sum) in [(internal, internal_total), (leaves, total - internal_total)] {
            let mut group: Vec<&HierLabel> = group.iter().map(|&n| self.taxonomy.label(n).expect("non-root")).collect();
            group.sort();
            if group.is_empty() {
                continue;
            }
            let (q, r) = (sum / group.len(), sum % group.len());
            for (i, l) in group.into_iter().enumerate() {
                out.insert(l.clone(), q + usize::from(i < r));
            }
        }
        out
    }
}

fn random_chain(rng: &mut ChaCha8Rng) -> Chain {
    let mut m = [[0.0; 4]; 4];
    for row in &mut m {
        // Exponential draws normalize to a flat Dirichlet sample.
        for x in row.iter_mut() {
            *x = -(1.0 - rng.gen::<f64>()).ln();
        }
        normalize(row);
    }
    m
}

fn normalize(row: &mut [f64; 4]) {
    let s: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= s;
    }
}

fn mix(a: &Chain, b: &Chain, w: f64) -> Chain {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (1.0 - w) * a[i][j] + w * b[i][j];
        }
        normalize(&mut m[i]);
    }
    m
}

fn sample_from(row: &[f64; 4], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    3
}

fn sample_sequence(chain: &Chain, len: usize, rng: &mut ChaCha8Rng) -> String {
    let mut out = Vec::with_capacity(len);
    let mut state = rng.gen_range(0..4);
    out.push(BASES[state]);
    for _ in 1..len {
        state = sample_from(&chain[state], rng);
        out.push(BASES[state]);
    }
    String::from_utf8(out).expect("ASCII")
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Generate the dataset. Sequences are grouped by node in label order and
/// named `syn<index>`.
pub fn generate(spec: &SynthSpec) -> Result<Vec<Sequence>> {
    spec.validate()?;
    let tax = &spec.taxonomy;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base = random_chain(&mut rng);
    // Signatures in preorder so parents exist before their children.
    let mut signature: BTreeMap<NodeId, Chain> = BTreeMap::new();
    for node in tax.preorder().filter(|&n| n != Taxonomy::ROOT) {
        let fresh = random_chain(&mut rng);
        let sig = match tax.parent(node) {
            Some(p) if p != Taxonomy::ROOT => mix(&signature[&p], &fresh, CHILD_NOISE),
            _ => fresh,
        };
        signature.insert(node, sig);
    }

    let counts = spec.class_counts();
    let per_node: Vec<Vec<(String, HierLabel)>> = counts
        .par_iter()
        .map(|(label, &count)| {
            let node = tax.id(label).expect("counts come from the taxonomy");
            let chain = mix(&base, &signature[&node], spec.separability);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ fnv1a(&label.to_string()));
            (0..count)
                .map(|_| {
                    let len = rng.gen_range(spec.length.0..=spec.length.1);
                    (sample_sequence(&chain, len, &mut rng), label.clone())
                })
                .collect()
        })
        .collect();

    let width = counts.values().sum::<usize>().max(1).to_string().len();
    per_node
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, (residues, label))| Sequence::new(format!("syn{i:0width$}"), &residues, Some(label)))
        .collect()
}

fn labels(strs: &[&str]) -> Vec<HierLabel> {
    strs.iter().map(|s| s.parse().expect("static label")).collect()
}

/// Leaf-level label set of the plant (PGSB-like) dataset shape, a subset of
/// the bundled Wicker taxonomy with classes per level 2/4/3/5.
pub fn pgsb_labels() -> Vec<HierLabel> {
    labels(&["1.1.1", "1.1.2", "1.4", "2.2", "2.1.1.1", "2.1.1.2", "2.1.1.3", "2.1.1.8", "2.1.1.9"])
}

/// Label set of the REPBASE-like dataset shape, classes per level 2/5/12/9.
pub fn repbase_labels() -> Vec<HierLabel> {
    let mut out = labels(&["1.2", "1.1.1", "1.1.2", "1.1.3", "1.1.4", "1.1.5", "1.4.1", "1.4.2", "1.4.3", "1.4.4", "1.4.5", "1.5.1"]);
    out.extend((1..=9).map(|i| HierLabel::new(vec![2, 1, 1, i]).expect("non-empty")));
    out
}

pub fn pgsb_taxonomy() -> Taxonomy {
    Taxonomy::build_from_labels(&pgsb_labels()).expect("static labels")
}

pub fn repbase_taxonomy() -> Taxonomy {
    Taxonomy::build_from_labels(&repbase_labels()).expect("static labels")
}

/// Complete tree with `branching` children per node down to `depth`.
pub fn balanced_taxonomy(depth: usize, branching: u32) -> Result<Taxonomy> {
    if depth == 0 || branching == 0 {
        return Err(Error::contract("balanced taxonomy needs depth and branching >= 1"));
    }
    let mut leaves: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..depth {
        leaves = leaves
            .into_iter()
            .flat_map(|p| {
                (1..=branching).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    let ls = leaves.into_iter().map(HierLabel::new).collect::<Result<Vec<_>>>()?;
    Taxonomy::build_from_labels(&ls)
}
