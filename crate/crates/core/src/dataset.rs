//! Labeled feature matrices.

use std::io::Read;

use crate::error::{Error, Result};
use crate::kmer::{featurize_batch, FeatureVector, KmerConfig};
use crate::label::HierLabel;
use crate::seqio::{read_feature_csv, Sequence};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kmer_config: KmerConfig,
    pub points: Vec<FeatureVector>,
    pub labels: Vec<HierLabel>,
}

impl Dataset {
    pub fn new(kmer_config: KmerConfig, points: Vec<FeatureVector>, labels: Vec<HierLabel>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::contract("points and labels differ in length"));
        }
        let dim = kmer_config.dimension();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        Ok(Dataset {
            kmer_config,
            points,
            labels,
        })
    }

    /// Featurize labeled sequences; every sequence must carry a label.
    pub fn from_sequences(sequences: &[Sequence], kmer_config: &KmerConfig) -> Result<Self> {
        let labels = sequences
            .iter()
            .map(|s| {
                s.label
                    .clone()
                    .ok_or_else(|| Error::format(format!("sequence {} has no label", s.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let residues: Vec<&str> = sequences.iter().map(|s| s.residues.as_str()).collect();
        Dataset::new(kmer_config.clone(), featurize_batch(&residues, kmer_config), labels)
    }

    /// Load a labeled feature CSV.
    pub fn from_feature_csv<R: Read>(source: R, kmer_config: &KmerConfig) -> Result<Self> {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (i, (x, l)) in read_feature_csv(source, kmer_config)?.into_iter().enumerate() {
            let l = l.ok_or_else(|| Error::format(format!("row {}: missing label", i + 1)))?;
            points.push(x);
            labels.push(l);
        }
        Dataset::new(kmer_config.clone(), points, labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            kmer_config: self.kmer_config.clone(),
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// Taxonomy spanned by the labels (prefix-closed).
    pub fn taxonomy(&self) -> Result<Taxonomy> {
        Taxonomy::build_from_labels(&self.labels)
    }
}
