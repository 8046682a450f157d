//! Dot-path class labels such as `1.1.1` (Class I / LTR / Copia).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A node of the class hierarchy, written as dot-separated positive
/// integers. Ordering is lexicographic on the components, so a label sorts
/// before all of its descendants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HierLabel(Vec<u32>);

impl HierLabel {
    pub fn new(path: Vec<u32>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::Label {
                text: String::new(),
                reason: "empty path".into(),
            });
        }
        if path.contains(&0) {
            return Err(Error::Label {
                text: render(&path),
                reason: "components must be >= 1".into(),
            });
        }
        Ok(HierLabel(path))
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// The enclosing label, or `None` for a depth-1 label (whose parent is
    /// the root).
    pub fn parent(&self) -> Option<HierLabel> {
        (self.0.len() > 1).then(|| HierLabel(self.0[..self.0.len() - 1].to_vec()))
    }

    /// Prefix of this label at `depth`, clamped to the label's own depth.
    pub fn truncate(&self, depth: usize) -> Option<HierLabel> {
        (depth >= 1).then(|| HierLabel(self.0[..depth.min(self.0.len())].to_vec()))
    }

    pub fn child(&self, component: u32) -> Result<HierLabel> {
        let mut path = self.0.clone();
        path.push(component);
        HierLabel::new(path)
    }

    pub fn is_prefix_of(&self, other: &HierLabel) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Proper prefixes from depth 1 upward.
    pub fn prefixes(&self) -> impl Iterator<Item = HierLabel> + '_ {
        (1..self.0.len()).map(move |d| HierLabel(self.0[..d].to_vec()))
    }
}

fn render(path: &[u32]) -> String {
    let mut out = String::new();
    for (i, c) in path.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        out.push_str(&c.to_string());
    }
    out
}

/// Parse a dot-path label.
pub fn parse_label(text: &str) -> Result<HierLabel> {
    let err = |reason: &str| Error::Label {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    if text.is_empty() {
        return Err(err("empty label"));
    }
    let mut path = Vec::new();
    for part in text.split('.') {
        if part.is_empty() {
            return Err(err("empty component"));
        }
        if !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("non-numeric component"));
        }
        let value: u32 = part.parse().map_err(|_| err("component out of range"))?;
        if value == 0 {
            return Err(err("components must be >= 1"));
        }
        path.push(value);
    }
    Ok(HierLabel(path))
}

impl fmt::Display for HierLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.0))
    }
}

impl FromStr for HierLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_label(s)
    }
}

impl Serialize for HierLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HierLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_label(&text).map_err(serde::de::Error::custom)
    }
}
