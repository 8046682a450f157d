//! Hierarchical precision, recall and F-measure.
//!
//! Each label is expanded to its ancestor-closed set (the label and all its
//! non-root ancestors). Over a list of (predicted, true) pairs:
//!
//! ```text
//! hP = sum |P_i & T_i| / sum |P_i|     hR = sum |P_i & T_i| / sum |T_i|
//! hF = 2 hP hR / (hP + hR)
//! ```
//!
//! For tree-shaped label paths `|P_i & T_i|` is the length of the common
//! prefix, which is what the implementation counts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::HierLabel;
use crate::taxonomy::Taxonomy;

/// Ancestor-closed class set of one label; the root is never included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet(BTreeSet<HierLabel>);

impl LabelSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: &HierLabel) -> bool {
        self.0.contains(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &HierLabel> {
        self.0.iter()
    }

    pub fn intersection_len(&self, other: &LabelSet) -> usize {
        self.0.intersection(&other.0).count()
    }
}

pub fn label_set(taxonomy: &Taxonomy, label: &HierLabel) -> Result<LabelSet> {
    let mut set: BTreeSet<HierLabel> = taxonomy.ancestors(label)?.into_iter().collect();
    set.insert(label.clone());
    Ok(LabelSet(set))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierMetrics {
    pub hp: f64,
    pub hr: f64,
    pub hf: f64,
    /// Level-wise hF for depths 1..=max_depth; `None` where no sample has a
    /// true label that deep.
    pub per_level: Vec<Option<f64>>,
    pub samples: usize,
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn harmonic_f(hp: f64, hr: f64) -> f64 {
    if hp + hr > 0.0 {
        2.0 * hp * hr / (hp + hr)
    } else {
        0.0
    }
}

fn common_prefix(a: &HierLabel, b: &HierLabel) -> usize {
    a.path().iter().zip(b.path()).take_while(|(x, y)| x == y).count()
}

fn micro_counts(pairs: &[(HierLabel, HierLabel)]) -> (usize, usize, usize) {
    pairs.iter().fold((0, 0, 0), |(hit, p, t), (pred, truth)| {
        (hit + common_prefix(pred, truth), p + pred.depth(), t + truth.depth())
    })
}

fn check_known(pairs: &[(HierLabel, HierLabel)], taxonomy: &Taxonomy) -> Result<()> {
    for (p, t) in pairs {
        for l in [p, t] {
            if !taxonomy.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
    }
    Ok(())
}

/// hF over pairs truncated at depth `level`. Samples whose true label is
/// shallower than `level` are excluded; returns `None` when none remain.
pub fn levelwise_f(pairs: &[(HierLabel, HierLabel)], taxonomy: &Taxonomy, level: usize) -> Result<Option<f64>> {
    if level == 0 {
        return Err(Error::contract("levels start at 1"));
    }
    check_known(pairs, taxonomy)?;
    Ok(levelwise_unchecked(pairs, level))
}

fn levelwise_unchecked(pairs: &[(HierLabel, HierLabel)], level: usize) -> Option<f64> {
    let truncated: Vec<(HierLabel, HierLabel)> = pairs
        .iter()
        .filter(|(_, t)| t.depth() >= level)
        .map(|(p, t)| (p.truncate(level).expect("level >= 1"), t.truncate(level).expect("level >= 1")))
        .collect();
    if truncated.is_empty() {
        return None;
    }
    let (hit, p, t) = micro_counts(&truncated);
    Some(harmonic_f(hit as f64 / p as f64, hit as f64 / t as f64))
}

pub fn hier_metrics(pairs: &[(HierLabel, HierLabel)], taxonomy: &Taxonomy) -> Result<HierMetrics> {
    if pairs.is_empty() {
        return Err(Error::contract("hierarchical metrics need at least one pair"));
    }
    check_known(pairs, taxonomy)?;
    let (hit, p, t) = micro_counts(pairs);
    let hp = hit as f64 / p as f64;
    let hr = hit as f64 / t as f64;
    Ok(HierMetrics {
        hp,
        hr,
        hf: harmonic_f(hp, hr),
        per_level: (1..=taxonomy.max_depth())
            .map(|level| levelwise_unchecked(pairs, level))
            .collect(),
        samples: pairs.len(),
    })
}
