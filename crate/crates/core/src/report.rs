//! Analysis reports in JSON and plain-text table form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conflict::Conflict;
use crate::graph::LambdaClique;
use crate::ids::RuleId;
use crate::session::{SessionState, Status};

/// One row of the group table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub label: String,
    pub anchor: RuleId,
    pub representative: Option<RuleId>,
    pub conflicts: Vec<Conflict>,
    pub size: usize,
    /// Extension keys in suggestion order.
    pub extensions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    pub conflicts: Vec<Conflict>,
    /// Groups of the selected cover, in presentation order.
    pub groups: Vec<GroupRow>,
    /// Every enumerated cover, as its anchors.
    pub covers: Vec<Vec<RuleId>>,
    pub cover_index: Option<usize>,
    pub covers_truncated: bool,
    pub cliques: Vec<LambdaClique>,
    pub unresolvable: Vec<Conflict>,
}

impl Report {
    pub fn from_state(s: &SessionState) -> Self {
        let groups = s
            .group_order()
            .iter()
            .filter_map(|id| s.group(id))
            .map(|g| GroupRow {
                label: g.label(),
                anchor: g.anchor.clone(),
                representative: g.representative.clone(),
                conflicts: g.conflicts.clone(),
                size: g.size,
                extensions: s.extension_order(&g.anchor),
            })
            .collect();
        Self {
            status: s.status,
            conflicts: s.conflicts.clone(),
            groups,
            covers: s
                .covers
                .iter()
                .map(|c| c.groups.iter().map(|g| g.anchor.clone()).collect())
                .collect(),
            cover_index: s.cover_index,
            covers_truncated: s.covers_truncated,
            cliques: s.cliques.clone(),
            unresolvable: s.unresolvable.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// `group | representative | conflicts | extensions` rows followed by
    /// cliques, covers and leftovers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Resolving => "resolving",
            Status::Clean => "clean",
            Status::Blocked => "blocked",
        };
        let _ = writeln!(out, "status: {status}");
        let _ = writeln!(out, "conflicts: {}", join_conflicts(&self.conflicts));
        if !self.groups.is_empty() {
            out.push('\n');
            out.push_str("group | representative | conflicts | extensions\n");
            for g in &self.groups {
                let rep = g.representative.as_ref().map_or("-", RuleId::as_str);
                let _ = writeln!(
                    out,
                    "{} | {} | {} | {}",
                    g.label,
                    rep,
                    join_conflicts(&g.conflicts),
                    g.extensions.join(" ; ")
                );
            }
        }
        if !self.cliques.is_empty() {
            out.push_str("\ncliques:\n");
            for q in &self.cliques {
                let members: Vec<&str> = q.members.iter().map(RuleId::as_str).collect();
                let _ = writeln!(
                    out,
                    "  {} : {} (weight {})",
                    q.label.key(),
                    members.join(", "),
                    q.weight
                );
            }
        }
        if self.status == Status::Resolving {
            let _ = writeln!(out, "\ncovers: {}", self.covers.len());
            for (i, c) in self.covers.iter().enumerate() {
                let mark = if Some(i) == self.cover_index {
                    "*"
                } else {
                    " "
                };
                let ids: Vec<&str> = c.iter().map(RuleId::as_str).collect();
                let _ = writeln!(out, " {mark}{i}: {}", ids.join(", "));
            }
            if self.covers_truncated {
                out.push_str("  (enumeration capped; greedy cover shown)\n");
            }
        }
        if !self.unresolvable.is_empty() {
            let _ = writeln!(
                out,
                "\nunresolvable: {}",
                join_conflicts(&self.unresolvable)
            );
        }
        out
    }
}

fn join_conflicts(cs: &[Conflict]) -> String {
    if cs.is_empty() {
        return "none".to_owned();
    }
    cs.iter()
        .map(Conflict::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
