//! The cover-induced λ-graph, its per-label cliques and clique covers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cover::GroupCover;
use crate::error::{Error, Result};
use crate::extension::LambdaExtension;
use crate::ids::RuleId;

/// Largest label count for which the minimum clique cover is exact.
pub const EXACT_COVER_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub group: RuleId,
    pub weight: usize,
}

/// An undirected labelled edge; `a == b` for a self-loop.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: RuleId,
    pub b: RuleId,
    #[serde(with = "key_form")]
    pub label: LambdaExtension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaClique {
    #[serde(with = "key_form")]
    pub label: LambdaExtension,
    pub members: Vec<RuleId>,
    pub weight: usize,
}

impl LambdaClique {
    pub fn contains(&self, group: &RuleId) -> bool {
        self.members.contains(group)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCover {
    pub cliques: Vec<LambdaClique>,
    /// Set when the cover came from the greedy heuristic.
    pub approximate: bool,
}

impl CliqueCover {
    /// The λ-extensions named by the cover's cliques, sorted.
    pub fn extensions(&self) -> Vec<LambdaExtension> {
        let mut out: Vec<LambdaExtension> = self.cliques.iter().map(|q| q.label.clone()).collect();
        out.sort();
        out
    }
}

/// Nodes in group order, edges sorted by endpoints then label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LambdaGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(default)]
    cliques: Vec<LambdaClique>,
}

impl LambdaGraph {
    /// Builds `G(B)`: one node per group weighted by its size; pairwise
    /// edges for extensions shared by several representatives and a
    /// self-loop for an extension only one of them has.
    pub fn build(cover: &GroupCover) -> Self {
        let mut nodes: Vec<Node> = cover
            .groups
            .iter()
            .map(|g| Node {
                group: g.anchor.clone(),
                weight: g.size,
            })
            .collect();
        nodes.sort_by(|x, y| x.group.cmp(&y.group));

        let mut holders: BTreeMap<&LambdaExtension, Vec<&RuleId>> = BTreeMap::new();
        for g in &cover.groups {
            for x in &g.extensions {
                holders.entry(x).or_default().push(&g.anchor);
            }
        }
        let mut edges = Vec::new();
        for (label, mut members) in holders {
            members.sort();
            if let [only] = members[..] {
                edges.push(Edge {
                    a: only.clone(),
                    b: only.clone(),
                    label: label.clone(),
                });
                continue;
            }
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    edges.push(Edge {
                        a: (*a).clone(),
                        b: (*b).clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        edges.sort();
        Self { nodes, edges }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, group: &RuleId) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| &n.group == group)
            .map(|n| n.weight)
    }

    /// Labels incident to `group`, i.e. its representative's extensions.
    pub fn labels_of(&self, group: &RuleId) -> BTreeSet<&LambdaExtension> {
        self.edges
            .iter()
            .filter(|e| &e.a == group || &e.b == group)
            .map(|e| &e.label)
            .collect()
    }

    /// One clique per edge label, sorted by weight (descending) then label.
    pub fn cliques(&self) -> Vec<LambdaClique> {
        let mut members: BTreeMap<&LambdaExtension, BTreeSet<&RuleId>> = BTreeMap::new();
        for e in &self.edges {
            let entry = members.entry(&e.label).or_default();
            entry.insert(&e.a);
            entry.insert(&e.b);
        }
        let mut out: Vec<LambdaClique> = members
            .into_iter()
            .map(|(label, ms)| LambdaClique {
                label: label.clone(),
                weight: ms.iter().map(|m| self.weight(m).unwrap_or(0)).sum(),
                members: ms.into_iter().cloned().collect(),
            })
            .collect();
        out.sort_by(|x, y| y.weight.cmp(&x.weight).then_with(|| x.label.cmp(&y.label)));
        out
    }

    pub fn clique(&self, label: &LambdaExtension) -> Option<LambdaClique> {
        self.cliques().into_iter().find(|q| &q.label == label)
    }

    pub fn to_json(&self) -> String {
        let repr = GraphRepr {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            cliques: self.cliques(),
        };
        serde_json::to_string_pretty(&repr).expect("graph serializes")
    }

    /// Reads the JSON form; the `cliques` field is recomputed, not trusted.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: GraphRepr =
            serde_json::from_str(text).map_err(|e| Error::UnknownFormat(e.to_string()))?;
        let mut edges = repr.edges;
        edges.sort();
        Ok(Self {
            nodes: repr.nodes,
            edges,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph lambda {\n");
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"cgr({}) [{}]\"];",
                n.group, n.group, n.weight
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [label=\"{}\"];",
                e.a,
                e.b,
                e.label.key()
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self, format: &str) -> Result<String> {
        match format {
            "dot" => Ok(self.to_dot()),
            "json" => Ok(self.to_json()),
            other => Err(Error::UnknownFormat(other.to_owned())),
        }
    }
}

/// Every minimum-cardinality clique cover, best first: larger total weight,
/// then smaller label sequence. Above [`EXACT_COVER_LIMIT`] labels (or 64
/// nodes) only the greedy cover is returned, flagged approximate.
pub fn min_clique_covers(g: &LambdaGraph) -> Vec<CliqueCover> {
    let cliques = g.cliques();
    if g.nodes.is_empty() {
        return vec![CliqueCover::default()];
    }
    if cliques.len() > EXACT_COVER_LIMIT || g.nodes.len() > 64 {
        return vec![greedy_clique_cover(g, &cliques)];
    }

    let index: BTreeMap<&RuleId, usize> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (&n.group, i))
        .collect();
    let masks: Vec<u64> = cliques
        .iter()
        .map(|q| q.members.iter().fold(0, |m, id| m | 1u64 << index[id]))
        .collect();
    let full = masks.iter().fold(0u64, |m, x| m | x);

    let mut best: Vec<Vec<usize>> = Vec::new();
    for k in 1..=cliques.len() {
        let mut picked = Vec::new();
        covers_of_size(&masks, full, k, 0, 0, &mut picked, &mut best);
        if !best.is_empty() {
            break;
        }
    }

    let mut out: Vec<CliqueCover> = best
        .into_iter()
        .map(|idx| CliqueCover {
            cliques: idx.into_iter().map(|i| cliques[i].clone()).collect(),
            approximate: false,
        })
        .collect();
    out.sort_by(|x, y| {
        let wx: usize = x.cliques.iter().map(|q| q.weight).sum();
        let wy: usize = y.cliques.iter().map(|q| q.weight).sum();
        wy.cmp(&wx)
            .then_with(|| x.extensions().cmp(&y.extensions()))
    });
    out
}

pub fn min_clique_cover(g: &LambdaGraph) -> CliqueCover {
    min_clique_covers(g).into_iter().next().unwrap_or_default()
}

fn covers_of_size(
    masks: &[u64],
    full: u64,
    k: usize,
    start: usize,
    covered: u64,
    picked: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if picked.len() == k {
        if covered == full {
            out.push(picked.clone());
        }
        return;
    }
    let remaining = k - picked.len();
    for i in start..masks.len() {
        if masks.len() - i < remaining {
            break;
        }
        // Candidates from `i` on must still be able to reach every node.
        let reachable = masks[i..].iter().fold(covered, |m, x| m | x);
        if reachable != full {
            break;
        }
        picked.push(i);
        covers_of_size(masks, full, k, i + 1, covered | masks[i], picked, out);
        picked.pop();
    }
}

fn greedy_clique_cover(g: &LambdaGraph, cliques: &[LambdaClique]) -> CliqueCover {
    let mut uncovered: BTreeSet<&RuleId> = g.nodes.iter().map(|n| &n.group).collect();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = cliques
            .iter()
            .max_by(|x, y| {
                let gain = |q: &LambdaClique| -> usize {
                    q.members
                        .iter()
                        .filter(|m| uncovered.contains(m))
                        .map(|m| g.weight(m).unwrap_or(0))
                        .sum()
                };
                gain(x).cmp(&gain(y)).then_with(|| y.label.cmp(&x.label))
            })
            .expect("every node has an incident label");
        for m in &best.members {
            uncovered.remove(m);
        }
        chosen.push(best.clone());
    }
    CliqueCover {
        cliques: chosen,
        approximate: true,
    }
}

pub(crate) mod key_form {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::extension::LambdaExtension;

    pub fn serialize<S: Serializer>(x: &LambdaExtension, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.key())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LambdaExtension, D::Error> {
        let key = String::deserialize(d)?;
        LambdaExtension::parse_key(&key).map_err(serde::de::Error::custom)
    }
}
