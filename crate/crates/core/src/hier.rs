//! Hierarchical model: one local classifier per parent node.
//!
//! Each parent node `P` (the root and every internal node) is trained on the
//! samples whose label lies in its subtree. A sample labeled exactly `P`
//! belongs to `P`'s replicated-self class, represented by `P`'s own label;
//! a sample passing through child `c` belongs to class `c`. The root has no
//! self class.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit, BaseConfig, BaseKind, MulticlassModel};
use crate::error::{Error, Result};
use crate::kmer::{featurize, KmerConfig};
use crate::label::{parse_label, HierLabel};
use crate::seqio::Sequence;
use crate::strategy::{lcpnb_scores, predict_with, LocalDistribution, PathScore, Strategy};
use crate::taxonomy::{NodeId, Taxonomy};

pub const SCHEMA_VERSION: u32 = 1;

const ROOT_KEY: &str = "root";

#[derive(Debug, Clone)]
struct LocalModel {
    model: MulticlassModel,
    /// Taxonomy node of each entry of `model.classes()`.
    class_nodes: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct HierModel {
    taxonomy: Taxonomy,
    kmer_config: KmerConfig,
    base: BaseConfig,
    local: BTreeMap<NodeId, LocalModel>,
}

/// Local training class of `label` at parent `parent`, if the label lies
/// in the parent's subtree.
fn local_class(taxonomy: &Taxonomy, parent: NodeId, label: &HierLabel) -> Option<HierLabel> {
    match taxonomy.label(parent) {
        None => label.truncate(1),
        Some(p) if p == label => Some(p.clone()),
        Some(p) if p.is_prefix_of(label) => label.truncate(p.depth() + 1),
        Some(_) => None,
    }
}

fn node_seed(seed: u64, label: Option<&HierLabel>) -> u64 {
    // FNV-1a over the rendered label.
    let text = label.map_or_else(|| ROOT_KEY.to_string(), |l| l.to_string());
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

fn resolve_classes(taxonomy: &Taxonomy, parent: NodeId, model: &MulticlassModel) -> Result<Vec<NodeId>> {
    model
        .classes()
        .iter()
        .map(|c| {
            let id = taxonomy.id(c)?;
            let ok = taxonomy.children(parent).contains(&id) || (id == parent && parent != Taxonomy::ROOT);
            if ok {
                Ok(id)
            } else {
                Err(Error::contract(format!(
                    "class {c} is neither a child nor the self class of its parent"
                )))
            }
        })
        .collect()
}

/// Train one local classifier per parent node.
pub fn train_hier<X: AsRef<[f64]> + Sync>(
    points: &[X],
    labels: &[HierLabel],
    taxonomy: &Taxonomy,
    kmer_config: &KmerConfig,
    base: &BaseConfig,
) -> Result<HierModel> {
    if points.is_empty() {
        return Err(Error::contract("cannot train on an empty dataset"));
    }
    if points.len() != labels.len() {
        return Err(Error::contract("points and labels differ in length"));
    }
    base.validate()?;
    let dim = kmer_config.dimension();
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.as_ref().len(),
        });
    }
    for l in labels {
        if !taxonomy.contains(l) {
            return Err(Error::contract(format!("label {l} is not a taxonomy node")));
        }
    }

    let parents = taxonomy.parent_nodes();
    let fitted = parents
        .par_iter()
        .map(|&parent| -> Result<Option<(NodeId, LocalModel)>> {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (x, l) in points.iter().zip(labels) {
                if let Some(class) = local_class(taxonomy, parent, l) {
                    xs.push(x.as_ref());
                    ys.push(class);
                }
            }
            if xs.is_empty() {
                return Ok(None);
            }
            let cfg = base.with_seed(node_seed(base.seed(), taxonomy.label(parent)));
            let model = fit(&cfg, &xs, &ys)?;
            let class_nodes = resolve_classes(taxonomy, parent, &model)?;
            Ok(Some((parent, LocalModel { model, class_nodes })))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(HierModel {
        taxonomy: taxonomy.clone(),
        kmer_config: kmer_config.clone(),
        base: base.clone(),
        local: fitted.into_iter().flatten().collect(),
    })
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    kmer_config: KmerConfig,
    taxonomy: Taxonomy,
    base_kind: BaseKind,
    base_config: BaseConfig,
    per_node_models: BTreeMap<String, MulticlassModel>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

impl HierModel {
    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn kmer_config(&self) -> &KmerConfig {
        &self.kmer_config
    }

    pub fn base_config(&self) -> &BaseConfig {
        &self.base
    }

    /// Local classifier at a parent node (`Taxonomy::ROOT` for the root).
    pub fn local_model(&self, node: NodeId) -> Option<&MulticlassModel> {
        self.local.get(&node).map(|m| &m.model)
    }

    /// Parent nodes that received no training data.
    pub fn untrained_nodes(&self) -> Vec<NodeId> {
        self.taxonomy
            .parent_nodes()
            .into_iter()
            .filter(|n| !self.local.contains_key(n))
            .collect()
    }

    /// Fails unless `config` is the featurization this model was trained on.
    pub fn check_features(&self, config: &KmerConfig) -> Result<()> {
        if config != &self.kmer_config {
            return Err(Error::Fingerprint {
                model: self.kmer_config.fingerprint(),
                given: config.fingerprint(),
            });
        }
        Ok(())
    }

    fn check_dimension(&self, x: &[f64]) -> Result<()> {
        let dim = self.kmer_config.dimension();
        if x.len() != dim {
            return Err(Error::Fingerprint {
                model: self.kmer_config.fingerprint(),
                given: format!("{} features", x.len()),
            });
        }
        Ok(())
    }

    pub fn local_distribution(&self, node: NodeId, x: &[f64]) -> Result<Option<LocalDistribution>> {
        let Some(local) = self.local.get(&node) else {
            return Ok(None);
        };
        let probs = local.model.predict_proba(x)?;
        Ok(Some(local.class_nodes.iter().copied().zip(probs).collect()))
    }

    pub fn predict(&self, strategy: Strategy, x: &[f64]) -> Result<HierLabel> {
        self.check_dimension(x)?;
        let id = predict_with(strategy, &self.taxonomy, |n| self.local_distribution(n, x))?;
        Ok(self.taxonomy.label(id).expect("predictions are never the root").clone())
    }

    pub fn predict_nllcpn(&self, x: &[f64]) -> Result<HierLabel> {
        self.predict(Strategy::Nllcpn, x)
    }

    pub fn predict_lcpnb(&self, x: &[f64]) -> Result<HierLabel> {
        self.predict(Strategy::Lcpnb, x)
    }

    /// All LCPNB candidate paths for `x`.
    pub fn path_scores(&self, x: &[f64]) -> Result<Vec<PathScore>> {
        self.check_dimension(x)?;
        lcpnb_scores(&self.taxonomy, |n| self.local_distribution(n, x))
    }

    /// Predict many vectors; output order follows input order.
    pub fn predict_batch<X: AsRef<[f64]> + Sync>(&self, strategy: Strategy, xs: &[X]) -> Result<Vec<HierLabel>> {
        xs.par_iter().map(|x| self.predict(strategy, x.as_ref())).collect()
    }

    /// Predict feature vectors produced with `config`, which must match the
    /// training featurization.
    pub fn predict_features<X: AsRef<[f64]> + Sync>(
        &self,
        strategy: Strategy,
        config: &KmerConfig,
        xs: &[X],
    ) -> Result<Vec<HierLabel>> {
        self.check_features(config)?;
        self.predict_batch(strategy, xs)
    }

    /// Featurize with the model's own k-mer settings and predict.
    pub fn predict_sequences(&self, strategy: Strategy, sequences: &[Sequence]) -> Result<Vec<HierLabel>> {
        sequences
            .par_iter()
            .map(|s| self.predict(strategy, &featurize(&s.residues, &self.kmer_config)))
            .collect()
    }

    pub fn save<W: Write>(&self, sink: W) -> Result<()> {
        let per_node_models = self
            .local
            .iter()
            .map(|(&node, m)| {
                let key = self
                    .taxonomy
                    .label(node)
                    .map_or_else(|| ROOT_KEY.to_string(), |l| l.to_string());
                (key, m.model.clone())
            })
            .collect();
        let file = ModelFile {
            schema_version: SCHEMA_VERSION,
            kmer_config: self.kmer_config.clone(),
            taxonomy: self.taxonomy.clone(),
            base_kind: self.base.kind(),
            base_config: self.base.clone(),
            per_node_models,
        };
        serde_json::to_writer(sink, &file)?;
        Ok(())
    }

    pub fn load<R: Read>(mut source: R) -> Result<HierModel> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        let probe: VersionProbe = serde_json::from_str(&text)?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: probe.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_str(&text)?;
        if file.base_kind != file.base_config.kind() {
            return Err(Error::format("base_kind disagrees with base_config"));
        }
        let kmer_config = file.kmer_config.validated()?;
        let taxonomy = file.taxonomy;
        let mut local = BTreeMap::new();
        for (key, model) in file.per_node_models {
            let node = if key == ROOT_KEY {
                Taxonomy::ROOT
            } else {
                taxonomy.id(&parse_label(&key)?)?
            };
            if taxonomy.is_leaf(node) {
                return Err(Error::format(format!("leaf node {key} cannot own a classifier")));
            }
            if model.dimension() != kmer_config.dimension() {
                return Err(Error::format(format!(
                    "classifier at {key} expects {} features, k-mer config gives {}",
                    model.dimension(),
                    kmer_config.dimension()
                )));
            }
            let class_nodes = resolve_classes(&taxonomy, node, &model)?;
            local.insert(node, LocalModel { model, class_nodes });
        }
        if !local.contains_key(&Taxonomy::ROOT) {
            return Err(Error::format("model file has no root classifier"));
        }
        Ok(HierModel {
            taxonomy,
            kmer_config,
            base: file.base_config,
            local,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logreg::LogRegConfig;

    fn lbl(s: &str) -> HierLabel {
        parse_label(s).unwrap()
    }

    fn toy() -> (Vec<Vec<f64>>, Vec<HierLabel>, Taxonomy, KmerConfig) {
        let cfg = KmerConfig::default();
        let seqs = ["AAAAAAACAAAAA", "AACAAAAAAAGAA", "CCCCCCGCCCCCC", "CCGCCCCCCTCCC", "GGGGGGGGTGGGG", "GGTGGGGGGGAGG"];
        let labels = ["1", "1", "1.1", "1.1", "2", "2"];
        let xs: Vec<Vec<f64>> = seqs.iter().map(|s| featurize(s, &cfg).into_inner()).collect();
        let ls: Vec<HierLabel> = labels.iter().map(|s| lbl(s)).collect();
        let tax = Taxonomy::build_from_labels(&ls).unwrap();
        (xs, ls, tax, cfg)
    }

    #[test]
    fn local_class_sets() {
        let (xs, ls, tax, cfg) = toy();
        let m = train_hier(&xs, &ls, &tax, &cfg, &BaseConfig::LogReg(LogRegConfig::default())).unwrap();
        let root = m.local_model(Taxonomy::ROOT).unwrap();
        assert_eq!(root.classes(), &[lbl("1"), lbl("2")]);
        let one = m.local_model(tax.id(&lbl("1")).unwrap()).unwrap();
        assert_eq!(one.classes(), &[lbl("1"), lbl("1.1")]);
        assert!(m.local_model(tax.id(&lbl("2")).unwrap()).is_none());
        assert!(m.untrained_nodes().is_empty());
    }

    #[test]
    fn leaf_only_labels_have_no_self_samples() {
        let t = Taxonomy::build_from_labels(&[lbl("1.1"), lbl("1.2"), lbl("2")]).unwrap();
        for parent in t.parent_nodes() {
            for l in [lbl("1.1"), lbl("1.2"), lbl("2")] {
                if let Some(c) = local_class(&t, parent, &l) {
                    assert_ne!(Some(&c), t.label(parent));
                }
            }
        }
        assert_eq!(local_class(&t, t.id(&lbl("1")).unwrap(), &lbl("1")), Some(lbl("1")));
        assert_eq!(local_class(&t, t.id(&lbl("1")).unwrap(), &lbl("2")), None);
        assert_eq!(local_class(&t, Taxonomy::ROOT, &lbl("1.2")), Some(lbl("1")));
    }

    #[test]
    fn training_errors() {
        let (xs, ls, tax, cfg) = toy();
        let base = BaseConfig::LogReg(LogRegConfig::default());
        assert!(train_hier::<Vec<f64>>(&[], &[], &tax, &cfg, &base).is_err());
        let mut bad = ls.clone();
        bad[0] = lbl("3");
        assert!(train_hier(&xs, &bad, &tax, &cfg, &base).is_err());
        let short: Vec<Vec<f64>> = xs.iter().map(|x| x[..10].to_vec()).collect();
        assert!(train_hier(&short, &ls, &tax, &cfg, &base).is_err());
    }

    #[test]
    fn save_load_roundtrip_and_version() {
        let (xs, ls, tax, cfg) = toy();
        let m = train_hier(&xs, &ls, &tax, &cfg, &BaseConfig::LogReg(LogRegConfig::default())).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let back = HierModel::load(buf.as_slice()).unwrap();
        for x in &xs {
            for s in [Strategy::Nllcpn, Strategy::Lcpnb] {
                assert_eq!(m.predict(s, x).unwrap(), back.predict(s, x).unwrap());
            }
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        let bumped = text.replacen("\"schema_version\":1", "\"schema_version\":99", 1);
        assert!(matches!(HierModel::load(bumped.as_bytes()), Err(Error::SchemaVersion { found: 99, .. })));
        assert!(HierModel::load(&buf[..buf.len() / 2]).is_err());
    }

    #[test]
    fn fingerprint_mismatch() {
        let (xs, ls, tax, cfg) = toy();
        let m = train_hier(&xs, &ls, &tax, &cfg, &BaseConfig::LogReg(LogRegConfig::default())).unwrap();
        let other = KmerConfig::new(vec![2, 3], cfg.normalization()).unwrap();
        let short = vec![featurize("ACGTACGT", &other).into_inner()];
        assert!(matches!(
            m.predict_features(Strategy::Lcpnb, &other, &short),
            Err(Error::Fingerprint { .. })
        ));
        assert!(matches!(m.predict(Strategy::Lcpnb, &short[0]), Err(Error::Fingerprint { .. })));
    }
}
