//! k-mer count features.
//!
//! Bases are 2-bit encoded (A=0, C=1, G=2, T=3) and a rolling index over the
//! last `k` bases addresses a dense table of `4^k` slots. Any non-ACGT
//! character resets the window, so windows touching an ambiguity code are
//! never counted.

use std::fmt;
use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_K: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    RawCounts,
    RelativeFrequency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmerConfig {
    k_values: Vec<usize>,
    normalization: Normalization,
}

impl Default for KmerConfig {
    fn default() -> Self {
        KmerConfig {
            k_values: vec![2, 3, 4],
            normalization: Normalization::RelativeFrequency,
        }
    }
}

impl KmerConfig {
    pub fn new(k_values: Vec<usize>, normalization: Normalization) -> Result<Self> {
        if k_values.is_empty() {
            return Err(Error::contract("k-mer config needs at least one k"));
        }
        if k_values.iter().any(|&k| k == 0 || k > MAX_K) {
            return Err(Error::contract(format!("each k must be in 1..={MAX_K}")));
        }
        if k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::contract("k values must be strictly increasing"));
        }
        Ok(KmerConfig {
            k_values,
            normalization,
        })
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn dimension(&self) -> usize {
        self.k_values.iter().map(|&k| 1usize << (2 * k)).sum()
    }

    /// Compact identity of the featurization, stored in trained models.
    pub fn fingerprint(&self) -> String {
        let ks: Vec<String> = self.k_values.iter().map(|k| k.to_string()).collect();
        let norm = match self.normalization {
            Normalization::RawCounts => "raw",
            Normalization::RelativeFrequency => "freq",
        };
        format!("k={};norm={};dim={}", ks.join(","), norm, self.dimension())
    }

    /// Validate deserialized configs, which bypass [`KmerConfig::new`].
    pub(crate) fn validated(self) -> Result<Self> {
        KmerConfig::new(self.k_values, self.normalization)
    }
}

/// Dense k-mer feature vector (all entries >= 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        FeatureVector(v)
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::RawCounts => "raw",
            Normalization::RelativeFrequency => "freq",
        })
    }
}

const BASES: [char; 4] = ['A', 'C', 'G', 'T'];

#[inline]
fn encode(b: u8) -> Option<usize> {
    match b {
        b'A' | b'a' => Some(0),
        b'C' | b'c' => Some(1),
        b'G' | b'g' => Some(2),
        b'T' | b't' => Some(3),
        _ => None,
    }
}

fn decode(mut index: usize, k: usize) -> String {
    let mut out = vec![' '; k];
    for slot in out.iter_mut().rev() {
        *slot = BASES[index & 3];
        index >>= 2;
    }
    out.into_iter().collect()
}

/// Column names in feature order: for each k ascending, all `4^k` k-mers in
/// lexicographic A<C<G<T order.
pub fn canonical_feature_order(config: &KmerConfig) -> Vec<String> {
    config
        .k_values
        .iter()
        .flat_map(|&k| (0..1usize << (2 * k)).map(move |i| decode(i, k)))
        .collect()
}

fn count_into(residues: &[u8], k: usize, slots: &mut [f64]) -> u64 {
    let mask = (1usize << (2 * k)) - 1;
    let mut index = 0usize;
    let mut run = 0usize;
    let mut total = 0u64;
    for &b in residues {
        match encode(b) {
            Some(code) => {
                index = ((index << 2) | code) & mask;
                run += 1;
                if run >= k {
                    slots[index] += 1.0;
                    total += 1;
                }
            }
            None => {
                run = 0;
                index = 0;
            }
        }
    }
    total
}

/// Count every length-`k` window; slot `i` holds the count of the k-mer
/// whose 2-bit encoding is `i`.
pub fn count_kmers(residues: &str, k: usize) -> Vec<u64> {
    assert!((1..=MAX_K).contains(&k), "k must be in 1..={MAX_K}");
    let mut slots = vec![0.0; 1usize << (2 * k)];
    count_into(residues.as_bytes(), k, &mut slots);
    slots.into_iter().map(|c| c as u64).collect()
}

pub fn featurize(residues: &str, config: &KmerConfig) -> FeatureVector {
    let mut values = vec![0.0; config.dimension()];
    let bytes = residues.as_bytes();
    let mut offset = 0;
    for &k in &config.k_values {
        let width = 1usize << (2 * k);
        let block = &mut values[offset..offset + width];
        let total = count_into(bytes, k, block);
        if config.normalization == Normalization::RelativeFrequency && total > 0 {
            let t = total as f64;
            block.iter_mut().for_each(|v| *v /= t);
        }
        offset += width;
    }
    FeatureVector(values)
}

/// Featurize many sequences; output order follows input order.
pub fn featurize_batch<S: AsRef<str> + Sync>(sequences: &[S], config: &KmerConfig) -> Vec<FeatureVector> {
    sequences
        .par_iter()
        .map(|s| featurize(s.as_ref(), config))
        .collect()
}
