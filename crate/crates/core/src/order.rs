//! Presentation orders: which conflict group to show first, and which of
//! its λ-extensions to suggest first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::LambdaExtension;
use crate::graph::{LambdaClique, LambdaGraph};
use crate::ids::RuleId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRank {
    pub id: RuleId,
    pub cliques: usize,
    pub weight: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionRank {
    #[serde(rename = "key", with = "crate::graph::key_form")]
    pub extension: LambdaExtension,
    pub weight: usize,
}

impl ExtensionRank {
    pub fn key(&self) -> String {
        self.extension.key()
    }
}

/// Groups with fewer cliques come first; among those, heavier cliques in
/// total; then numeric-aware id order.
pub fn order_groups(g: &LambdaGraph) -> Vec<GroupRank> {
    rank_groups(g, &g.cliques())
}

fn rank_groups(g: &LambdaGraph, cliques: &[LambdaClique]) -> Vec<GroupRank> {
    let mut ranked: Vec<GroupRank> = g
        .nodes
        .iter()
        .map(|n| {
            let own: Vec<&LambdaClique> = cliques.iter().filter(|q| q.contains(&n.group)).collect();
            GroupRank {
                id: n.group.clone(),
                cliques: own.len(),
                weight: own.iter().map(|q| q.weight).sum(),
            }
        })
        .collect();
    ranked.sort_by(|x, y| {
        x.cliques
            .cmp(&y.cliques)
            .then_with(|| y.weight.cmp(&x.weight))
            .then_with(|| x.id.cmp(&y.id))
    });
    ranked
}

/// The group's extensions by clique weight (descending), then by
/// extension order.
pub fn order_extensions(g: &LambdaGraph, group: &RuleId) -> Result<Vec<ExtensionRank>> {
    rank_extensions(g, &g.cliques(), group)
}

fn rank_extensions(
    g: &LambdaGraph,
    cliques: &[LambdaClique],
    group: &RuleId,
) -> Result<Vec<ExtensionRank>> {
    if g.weight(group).is_none() {
        return Err(Error::UnknownGroup(group.clone()));
    }
    let mut ranked: Vec<(&LambdaExtension, usize)> = cliques
        .iter()
        .filter(|q| q.contains(group))
        .map(|q| (&q.label, q.weight))
        .collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(y.0)));
    Ok(ranked
        .into_iter()
        .map(|(x, weight)| ExtensionRank {
            extension: x.clone(),
            weight,
        })
        .collect())
}

/// Both orders for every node of `g`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub groups: Vec<GroupRank>,
    pub extensions: BTreeMap<RuleId, Vec<ExtensionRank>>,
}

impl Orders {
    pub fn compute(g: &LambdaGraph) -> Self {
        let cliques = g.cliques();
        let groups = rank_groups(g, &cliques);
        let extensions = g
            .nodes
            .iter()
            .map(|n| {
                let ranked = rank_extensions(g, &cliques, &n.group).expect("node of g");
                (n.group.clone(), ranked)
            })
            .collect();
        Self { groups, extensions }
    }

    pub fn group_ids(&self) -> Vec<&RuleId> {
        self.groups.iter().map(|r| &r.id).collect()
    }
}
