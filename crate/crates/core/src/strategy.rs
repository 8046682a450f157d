//! Top-down prediction over per-parent local distributions.
//!
//! Both strategies query a callback for the local class distribution of a
//! parent node. A distribution lists `(class node, probability)` pairs
//! where the class node is either a child or the parent itself (the
//! replicated-self class, meaning "stop here"). The callback returns `None`
//! for parents that have no trained classifier; those act as terminals.
//!
//! * nLLCPN walks greedily from the root, following the most probable class
//!   until the self class wins or a terminal node is reached.
//! * LCPNB scores every root-to-node path by the mean of its edge
//!   probabilities and returns the best terminal node. Internal candidates
//!   with a trained classifier add their self-class probability as a final
//!   edge.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::HierLabel;
use crate::taxonomy::{NodeId, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Nllcpn,
    Lcpnb,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Nllcpn => "nllcpn",
            Strategy::Lcpnb => "lcpnb",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nllcpn" => Ok(Strategy::Nllcpn),
            "lcpnb" => Ok(Strategy::Lcpnb),
            other => Err(Error::contract(format!("unknown strategy {other:?}"))),
        }
    }
}

pub type LocalDistribution = Vec<(NodeId, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct PathScore {
    pub terminal: HierLabel,
    pub score: f64,
    pub edges: Vec<f64>,
}

/// Greedy top-down descent. Ties between local classes go to the smallest
/// label (the self class, being a prefix of its children, wins ties).
pub fn nllcpn<F>(taxonomy: &Taxonomy, mut local: F) -> Result<NodeId>
where
    F: FnMut(NodeId) -> Result<Option<LocalDistribution>>,
{
    let mut node = Taxonomy::ROOT;
    loop {
        if taxonomy.is_leaf(node) {
            break;
        }
        let dist = match local(node)? {
            Some(d) if !d.is_empty() => d,
            _ => break,
        };
        let mut best = dist[0];
        for &(class, p) in &dist[1..] {
            // Node ids follow sorted label order.
            if p > best.1 || (p == best.1 && class < best.0) {
                best = (class, p);
            }
        }
        if best.0 == node {
            break;
        }
        node = best.0;
    }
    if node == Taxonomy::ROOT {
        return Err(Error::contract("root node has no trained classifier"));
    }
    Ok(node)
}

fn edge(dist: &[(NodeId, f64)], class: NodeId) -> f64 {
    dist.iter().find(|(c, _)| *c == class).map_or(0.0, |(_, p)| *p)
}

/// Score every reachable candidate path. Parents are listed before their
/// children.
pub fn lcpnb_scores<F>(taxonomy: &Taxonomy, mut local: F) -> Result<Vec<PathScore>>
where
    F: FnMut(NodeId) -> Result<Option<LocalDistribution>>,
{
    let mut cache: HashMap<NodeId, Option<LocalDistribution>> = HashMap::new();
    let mut fetch = |id: NodeId| -> Result<Option<LocalDistribution>> {
        if taxonomy.is_leaf(id) {
            return Ok(None);
        }
        if let Some(d) = cache.get(&id) {
            return Ok(d.clone());
        }
        let d = local(id)?;
        cache.insert(id, d.clone());
        Ok(d)
    };

    let root_dist = fetch(Taxonomy::ROOT)?
        .ok_or_else(|| Error::contract("root node has no trained classifier"))?;
    let mut out = Vec::new();
    // (parent, its distribution, edge probabilities from the root to parent)
    let mut stack: Vec<(NodeId, LocalDistribution, Vec<f64>)> = vec![(Taxonomy::ROOT, root_dist, Vec::new())];
    while let Some((parent, dist, prefix)) = stack.pop() {
        let mut pending = Vec::new();
        for &child in taxonomy.children(parent) {
            let mut edges = prefix.clone();
            edges.push(edge(&dist, child));
            let own = fetch(child)?;
            let mut scored = edges.clone();
            if let Some(d) = &own {
                scored.push(edge(d, child));
            }
            let score = scored.iter().sum::<f64>() / scored.len() as f64;
            out.push(PathScore {
                terminal: taxonomy.label(child).expect("non-root").clone(),
                score,
                edges: scored,
            });
            if let Some(d) = own {
                pending.push((child, d, edges));
            }
        }
        stack.extend(pending.into_iter().rev());
    }
    Ok(out)
}

/// Best-scoring path terminal; ties prefer the deeper node, then the
/// smaller label.
pub fn lcpnb<F>(taxonomy: &Taxonomy, local: F) -> Result<NodeId>
where
    F: FnMut(NodeId) -> Result<Option<LocalDistribution>>,
{
    let scores = lcpnb_scores(taxonomy, local)?;
    let best = scores
        .iter()
        .reduce(|best, s| {
            let better = s.score > best.score
                || (s.score == best.score
                    && (s.terminal.depth() > best.terminal.depth()
                        || (s.terminal.depth() == best.terminal.depth() && s.terminal < best.terminal)));
            if better {
                s
            } else {
                best
            }
        })
        .ok_or_else(|| Error::contract("taxonomy has no candidate paths"))?;
    taxonomy.id(&best.terminal)
}

pub fn predict_with<F>(strategy: Strategy, taxonomy: &Taxonomy, local: F) -> Result<NodeId>
where
    F: FnMut(NodeId) -> Result<Option<LocalDistribution>>,
{
    match strategy {
        Strategy::Nllcpn => nllcpn(taxonomy, local),
        Strategy::Lcpnb => lcpnb(taxonomy, local),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::parse_label;

    fn tax(labels: &[&str]) -> Taxonomy {
        let ls: Vec<HierLabel> = labels.iter().map(|s| parse_label(s).unwrap()).collect();
        Taxonomy::build_from_labels(&ls).unwrap()
    }

    fn id(t: &Taxonomy, s: &str) -> NodeId {
        t.id(&parse_label(s).unwrap()).unwrap()
    }

    /// root {1: r1, 2: 1-r1}; node 1 {self: s1, 1.1: 1-s1}
    fn stub(t: &Taxonomy, r1: f64, s1: f64) -> impl FnMut(NodeId) -> Result<Option<LocalDistribution>> + '_ {
        let (one, two, one_one) = (id(t, "1"), id(t, "2"), id(t, "1.1"));
        move |n| {
            Ok(if n == Taxonomy::ROOT {
                Some(vec![(one, r1), (two, 1.0 - r1)])
            } else if n == one {
                Some(vec![(one, s1), (one_one, 1.0 - s1)])
            } else {
                None
            })
        }
    }

    #[test]
    fn nllcpn_descends_or_stops() {
        let t = tax(&["1.1", "2"]);
        assert_eq!(nllcpn(&t, stub(&t, 0.6, 0.3)).unwrap(), id(&t, "1.1"));
        assert_eq!(nllcpn(&t, stub(&t, 0.6, 0.8)).unwrap(), id(&t, "1"));
        assert_eq!(nllcpn(&t, stub(&t, 0.4, 0.3)).unwrap(), id(&t, "2"));
    }

    #[test]
    fn lcpnb_averages_paths() {
        let t = tax(&["1.1", "2"]);
        let scores = lcpnb_scores(&t, stub(&t, 0.6, 0.3)).unwrap();
        let get = |s: &str| scores.iter().find(|p| p.terminal.to_string() == s).unwrap().score;
        assert!((get("1") - 0.45).abs() < 1e-12);
        assert!((get("1.1") - 0.65).abs() < 1e-12);
        assert!((get("2") - 0.4).abs() < 1e-12);
        assert_eq!(lcpnb(&t, stub(&t, 0.6, 0.3)).unwrap(), id(&t, "1.1"));

        let scores = lcpnb_scores(&t, stub(&t, 0.9, 0.8)).unwrap();
        let get = |s: &str| scores.iter().find(|p| p.terminal.to_string() == s).unwrap().score;
        assert!((get("1") - 0.85).abs() < 1e-12);
        assert!((get("1.1") - 0.55).abs() < 1e-12);
        assert!((get("2") - 0.1).abs() < 1e-12);
        assert_eq!(lcpnb(&t, stub(&t, 0.9, 0.8)).unwrap(), id(&t, "1"));
    }

    #[test]
    fn single_child_chain() {
        let t = tax(&["1.1.1"]);
        let (a, b, c) = (id(&t, "1"), id(&t, "1.1"), id(&t, "1.1.1"));
        let local = |n: NodeId| {
            Ok(Some(if n == Taxonomy::ROOT {
                vec![(a, 1.0)]
            } else if n == a {
                vec![(b, 1.0)]
            } else {
                vec![(c, 1.0)]
            }))
        };
        assert_eq!(lcpnb(&t, local).unwrap(), c);
        let best = lcpnb_scores(&t, local).unwrap().pop().unwrap();
        assert_eq!(best.score, 1.0);
        assert_eq!(nllcpn(&t, local).unwrap(), c);
    }

    #[test]
    fn degenerate_root_goes_to_only_child() {
        let t = tax(&["1"]);
        let one = id(&t, "1");
        let local = |_| Ok(Some(vec![(one, 1.0)]));
        assert_eq!(nllcpn(&t, local).unwrap(), one);
        assert_eq!(lcpnb(&t, local).unwrap(), one);
    }

    #[test]
    fn untrained_internal_is_terminal() {
        let t = tax(&["1.1", "2"]);
        let (one, two) = (id(&t, "1"), id(&t, "2"));
        let local = |n: NodeId| Ok((n == Taxonomy::ROOT).then(|| vec![(one, 0.7), (two, 0.3)]));
        assert_eq!(nllcpn(&t, local).unwrap(), one);
        let scores = lcpnb_scores(&t, local).unwrap();
        assert_eq!(scores.len(), 2);
        assert_eq!(lcpnb(&t, local).unwrap(), one);
    }

    #[test]
    fn missing_root_model_is_an_error() {
        let t = tax(&["1", "2"]);
        assert!(nllcpn(&t, |_| Ok(None)).is_err());
        assert!(lcpnb(&t, |_| Ok(None)).is_err());
    }

    #[test]
    fn strategy_names() {
        assert_eq!("LCPNB".parse::<Strategy>().unwrap(), Strategy::Lcpnb);
        assert_eq!(Strategy::Nllcpn.to_string(), "nllcpn");
        assert!("lcn".parse::<Strategy>().is_err());
    }
}
