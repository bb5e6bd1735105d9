//! Conflicts between rules and the groups they form around a rule.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{
    cautious_filter, min_extensions_capped, LambdaExtension, DEFAULT_EXTENSION_CAP,
};
use crate::ids::RuleId;
use crate::program::{Literal, Program, Rule};

/// Two rules conflict iff their heads are strongly complementary and some
/// literal set satisfies both bodies.
///
/// The joint body is satisfiable iff the union of the positive parts is
/// consistent and disjoint from the union of the default-negated parts;
/// that union is then a witness.
pub fn is_conflicting(r: &Rule, r2: &Rule) -> bool {
    if !r.head.is_complement_of(&r2.head) {
        return false;
    }
    let pos: BTreeSet<&Literal> = r.body_pos().chain(r2.body_pos()).collect();
    if pos.iter().any(|l| pos.contains(&l.complement())) {
        return false;
    }
    !r.body_neg().chain(r2.body_neg()).any(|l| pos.contains(l))
}

/// An unordered pair of conflicting rules, stored in id order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[RuleId; 2]", from = "[RuleId; 2]")]
pub struct Conflict {
    first: RuleId,
    second: RuleId,
}

impl Conflict {
    pub fn new(a: RuleId, b: RuleId) -> Self {
        if a <= b {
            Self {
                first: a,
                second: b,
            }
        } else {
            Self {
                first: b,
                second: a,
            }
        }
    }

    pub fn rules(&self) -> [&RuleId; 2] {
        [&self.first, &self.second]
    }

    pub fn contains(&self, id: &RuleId) -> bool {
        &self.first == id || &self.second == id
    }

    /// The member that is not `id`.
    pub fn other(&self, id: &RuleId) -> Option<&RuleId> {
        if &self.first == id {
            Some(&self.second)
        } else if &self.second == id {
            Some(&self.first)
        } else {
            None
        }
    }
}

impl From<Conflict> for [RuleId; 2] {
    fn from(c: Conflict) -> Self {
        [c.first, c.second]
    }
}

impl From<[RuleId; 2]> for Conflict {
    fn from([a, b]: [RuleId; 2]) -> Self {
        Conflict::new(a, b)
    }
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.first, self.second)
    }
}

/// Every conflicting pair of `p`, sorted.
pub fn all_conflicts(p: &Program) -> Vec<Conflict> {
    let rules = p.rules();
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        for r2 in &rules[i + 1..] {
            if is_conflicting(r, r2) {
                out.push(Conflict::new(r.id.clone(), r2.id.clone()));
            }
        }
    }
    out.sort();
    out
}

/// Rules occurring in at least one conflict, in id order.
pub fn conflicting_rules(conflicts: &[Conflict]) -> BTreeSet<RuleId> {
    conflicts
        .iter()
        .flat_map(|c| c.rules().into_iter().cloned())
        .collect()
}

/// All conflicts sharing the anchor rule, plus the chosen representative
/// and its (cautiously filtered) λ-extensions once one is picked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictGroup {
    pub anchor: RuleId,
    pub representative: Option<RuleId>,
    pub conflicts: Vec<Conflict>,
    pub size: usize,
    #[serde(default)]
    pub extensions: Vec<LambdaExtension>,
}

impl ConflictGroup {
    pub fn contains_rule(&self, id: &RuleId) -> bool {
        self.conflicts.iter().any(|c| c.contains(id))
    }

    pub fn rules(&self) -> BTreeSet<RuleId> {
        conflicting_rules(&self.conflicts)
    }

    /// Rules the representative `rep` is in conflict with inside the group.
    pub fn partners_of(&self, rep: &RuleId) -> Vec<RuleId> {
        self.conflicts
            .iter()
            .filter_map(|c| c.other(rep).cloned())
            .collect()
    }

    /// `cgr(r14)`
    pub fn label(&self) -> String {
        format!("cgr({})", self.anchor)
    }
}

/// `cgr(anchor)`: every conflict of `p` containing `anchor`.
pub fn conflict_group(p: &Program, anchor: &RuleId) -> Result<ConflictGroup> {
    let rule = p
        .get(anchor)
        .ok_or_else(|| Error::UnknownRule(anchor.clone()))?;
    let mut conflicts: Vec<Conflict> = p
        .rules()
        .iter()
        .filter(|r2| r2.id != rule.id && is_conflicting(rule, r2))
        .map(|r2| Conflict::new(rule.id.clone(), r2.id.clone()))
        .collect();
    if conflicts.is_empty() {
        return Err(Error::NotConflicting(anchor.clone()));
    }
    conflicts.sort();
    Ok(ConflictGroup {
        anchor: anchor.clone(),
        representative: None,
        size: conflicts.len(),
        conflicts,
        extensions: Vec::new(),
    })
}

/// Rules able to represent `g`, each with its filtered λ-extensions.
///
/// Only a rule present in every conflict of the group can represent it:
/// both members of a single conflict, otherwise just the anchor.
pub fn representative_candidates(
    p: &Program,
    g: &ConflictGroup,
) -> Result<Vec<(RuleId, Vec<LambdaExtension>)>> {
    representative_candidates_capped(p, g, DEFAULT_EXTENSION_CAP)
}

pub fn representative_candidates_capped(
    p: &Program,
    g: &ConflictGroup,
    cap: usize,
) -> Result<Vec<(RuleId, Vec<LambdaExtension>)>> {
    let tested: Vec<RuleId> = if g.size == 1 {
        g.conflicts[0].rules().into_iter().cloned().collect()
    } else {
        vec![g.anchor.clone()]
    };
    let mut out = Vec::new();
    for rep in tested {
        let exts = extensions_for(p, &rep, &g.partners_of(&rep), cap)?;
        if !exts.is_empty() {
            out.push((rep, exts));
        }
    }
    Ok(out)
}

/// Filtered minimal λ-extensions of `rep` against `partners`.
pub fn extensions_for(
    p: &Program,
    rep: &RuleId,
    partners: &[RuleId],
    cap: usize,
) -> Result<Vec<LambdaExtension>> {
    let rule = p.get(rep).ok_or_else(|| Error::UnknownRule(rep.clone()))?;
    let others = partners
        .iter()
        .map(|id| p.get(id).ok_or_else(|| Error::UnknownRule(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(cautious_filter(&min_extensions_capped(rule, &others, cap)?))
}
