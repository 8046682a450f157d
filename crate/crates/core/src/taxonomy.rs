//! Rooted class tree built from dot-path labels.
//!
//! Nodes live in an arena indexed by [`NodeId`]. Construction inserts labels
//! in sorted order, so ids follow a preorder walk with children ordered by
//! their final path component. The root has id 0 and no label.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::label::{parse_label, HierLabel};

const WICKER_TSV: &str = include_str!("../data/wicker_taxonomy.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    label: Option<HierLabel>,
    name: Option<String>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    nodes: Vec<Node>,
    index: BTreeMap<HierLabel, NodeId>,
}

impl Taxonomy {
    pub const ROOT: NodeId = NodeId(0);

    fn from_closed(entries: BTreeMap<HierLabel, Option<String>>) -> Taxonomy {
        let mut nodes = vec![Node {
            label: None,
            name: None,
            parent: None,
            children: Vec::new(),
        }];
        let mut index = BTreeMap::new();
        // Sorted iteration visits every parent before its children.
        for (label, name) in entries {
            let parent = match label.parent() {
                Some(p) => index[&p],
                None => Self::ROOT,
            };
            let id = NodeId(nodes.len());
            nodes[parent.0].children.push(id);
            nodes.push(Node {
                label: Some(label.clone()),
                name,
                parent: Some(parent),
                children: Vec::new(),
            });
            index.insert(label, id);
        }
        Taxonomy { nodes, index }
    }

    fn close(entries: &mut BTreeMap<HierLabel, Option<String>>) {
        let missing: BTreeSet<HierLabel> = entries
            .keys()
            .flat_map(|l| l.prefixes())
            .filter(|p| !entries.contains_key(p))
            .collect();
        for p in missing {
            entries.insert(p, None);
        }
    }

    /// Prefix closure of the given labels plus the root. Duplicates are
    /// ignored.
    pub fn build_from_labels<'a, I>(labels: I) -> Result<Taxonomy>
    where
        I: IntoIterator<Item = &'a HierLabel>,
    {
        let mut entries: BTreeMap<HierLabel, Option<String>> =
            labels.into_iter().map(|l| (l.clone(), None)).collect();
        if entries.is_empty() {
            return Err(Error::contract("cannot build a taxonomy from zero labels"));
        }
        Self::close(&mut entries);
        Ok(Self::from_closed(entries))
    }

    /// Parse the `dot.path<TAB>name` text format. Lines starting with `#`
    /// and blank lines are skipped; missing ancestors are added unnamed.
    pub fn from_text(text: &str) -> Result<Taxonomy> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (path, name) = match line.split_once('\t') {
                Some((p, n)) => (p.trim(), Some(n.trim().to_string()).filter(|n| !n.is_empty())),
                None => (line.trim(), None),
            };
            let label = parse_label(path)
                .map_err(|e| Error::format(format!("taxonomy line {}: {e}", idx + 1)))?;
            if entries.insert(label.clone(), name).is_some() {
                return Err(Error::format(format!(
                    "taxonomy line {}: duplicate node {label}",
                    idx + 1
                )));
            }
        }
        if entries.is_empty() {
            return Err(Error::format("taxonomy file has no nodes"));
        }
        Self::close(&mut entries);
        Ok(Self::from_closed(entries))
    }

    pub fn read<R: Read>(mut source: R) -> Result<Taxonomy> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::from_text(&text)
    }

    /// The bundled Wicker TE taxonomy (33 nodes).
    pub fn wicker() -> Taxonomy {
        Self::from_text(WICKER_TSV).expect("bundled taxonomy parses")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for id in self.preorder() {
            let node = &self.nodes[id.0];
            let label = node.label.as_ref().expect("non-root");
            match &node.name {
                Some(n) => out.push_str(&format!("{label}\t{n}\n")),
                None => out.push_str(&format!("{label}\n")),
            }
        }
        out
    }

    /// Number of class nodes (the root is not counted).
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, label: &HierLabel) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn id(&self, label: &HierLabel) -> Result<NodeId> {
        self.get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &HierLabel) -> bool {
        self.index.contains_key(label)
    }

    /// Label of a node; `None` only for the root.
    pub fn label(&self, id: NodeId) -> Option<&HierLabel> {
        self.nodes[id.0].label.as_ref()
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        self.nodes[id.0].name.as_deref()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.label(id).map_or(0, HierLabel::depth)
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        if self.nodes[id.0].children.is_empty() {
            NodeKind::Leaf
        } else {
            NodeKind::Internal
        }
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.kind(id) == NodeKind::Leaf
    }

    /// Non-root nodes in preorder.
    pub fn preorder(&self) -> impl Iterator<Item = NodeId> {
        (1..self.nodes.len()).map(NodeId)
    }

    /// Root plus every internal node, in preorder; these are the nodes that
    /// own a local classifier.
    pub fn parent_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .map(NodeId)
            .filter(|&id| !self.is_leaf(id))
            .collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &HierLabel> {
        self.index.keys()
    }

    pub fn max_depth(&self) -> usize {
        self.index.keys().map(HierLabel::depth).max().unwrap_or(0)
    }

    /// Proper ancestors of `label`, shallowest first, root excluded.
    pub fn ancestors(&self, label: &HierLabel) -> Result<Vec<HierLabel>> {
        self.id(label)?;
        Ok(label.prefixes().collect())
    }

    /// One root-to-node path per class node, in preorder. Each path lists
    /// the labels from depth 1 down to the node itself.
    pub fn enumerate_paths(&self) -> Vec<Vec<HierLabel>> {
        self.preorder()
            .map(|id| {
                let label = self.label(id).expect("non-root");
                let mut path: Vec<HierLabel> = label.prefixes().collect();
                path.push(label.clone());
                path
            })
            .collect()
    }

    /// Node counts at depths 1..=max_depth.
    pub fn classes_per_level(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_depth()];
        for label in self.index.keys() {
            counts[label.depth() - 1] += 1;
        }
        counts
    }
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    label: HierLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl Serialize for Taxonomy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<NodeRecord> = self
            .preorder()
            .map(|id| NodeRecord {
                label: self.label(id).expect("non-root").clone(),
                name: self.name(id).map(str::to_string),
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Taxonomy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<NodeRecord>::deserialize(deserializer)?;
        if records.is_empty() {
            return Err(serde::de::Error::custom("empty taxonomy"));
        }
        let mut entries: BTreeMap<HierLabel, Option<String>> =
            records.into_iter().map(|r| (r.label, r.name)).collect();
        Taxonomy::close(&mut entries);
        Ok(Taxonomy::from_closed(entries))
    }
}
