//! The interactive resolution loop.
//!
//! A session is a pure function of its initial program, its configuration
//! and the list of steps taken so far; every step rebuilds the analysis,
//! graph and orders from scratch, and undo replays the shortened list.

use std::collections::BTreeSet;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::conflict::{Conflict, ConflictGroup};
use crate::cover::{analyze, AnalysisOptions, Declines, GroupCover};
use crate::error::{Error, Result};
use crate::extension::{apply_extension, LambdaExtension};
use crate::graph::{min_clique_covers, CliqueCover, LambdaClique, LambdaGraph};
use crate::ids::RuleId;
use crate::order::Orders;
use crate::program::Program;
use crate::solver::MAX_ATOMS;
use crate::syntax::{parse_program, print_program};
use crate::uniform::{check_exhaustive, check_sampled, UniformReport};

/// Which of several candidates to take: a fixed index or the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    #[default]
    #[serde(with = "auto_form")]
    Auto,
    Index(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub cover: Selection,
    #[serde(default)]
    pub clique_cover: Selection,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Resolving,
    Clean,
    Blocked,
}

/// An expert decision: apply `extension` to the representatives `targets`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub extension: String,
    pub targets: Vec<RuleId>,
}

impl Choice {
    pub fn new(extension: impl Into<String>, targets: &[&str]) -> Self {
        Self {
            extension: extension.into(),
            targets: targets.iter().map(|t| RuleId::from(*t)).collect(),
        }
    }
}

/// One entry of a session's history.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Step {
    Choose(Choice),
    SelectCover { select_cover: usize },
    SelectCliqueCover { select_clique_cover: usize },
}

/// Record of an applied choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedChoice {
    pub extension: LambdaExtension,
    pub applied_to: Vec<RuleId>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub resolved_now: Vec<Conflict>,
}

/// A group of an earlier cover whose conflicts are all gone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedGroup {
    pub anchor: RuleId,
    pub representative: Option<RuleId>,
    /// The extension applied to its representative, if it was targeted.
    pub extension: Option<String>,
}

/// Everything the expert sees at one point of the loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    #[serde(with = "program_text")]
    pub current: Program,
    pub status: Status,
    pub conflicts: Vec<Conflict>,
    pub unresolvable: Vec<Conflict>,
    pub covers: Vec<GroupCover>,
    pub covers_truncated: bool,
    pub cover_index: Option<usize>,
    pub cover: GroupCover,
    #[serde(skip)]
    pub graph: LambdaGraph,
    pub cliques: Vec<LambdaClique>,
    pub clique_covers: Vec<CliqueCover>,
    pub clique_cover_index: Option<usize>,
    pub clique_cover: CliqueCover,
    pub orders: Orders,
    pub resolved: Vec<ResolvedGroup>,
    #[serde(skip)]
    pub declines: Declines,
}

enum CoverPick<'a> {
    Select(Selection),
    Keep(&'a GroupCover),
}

impl SessionState {
    fn compute(
        program: Program,
        config: &SessionConfig,
        declines: Declines,
        resolved: Vec<ResolvedGroup>,
        cover_pick: CoverPick<'_>,
        clique_pick: Selection,
    ) -> Result<Self> {
        let analysis = analyze(&program, &config.analysis, &declines)?;
        let status = if analysis.is_clean() {
            Status::Clean
        } else if analysis.is_blocked() {
            Status::Blocked
        } else {
            Status::Resolving
        };

        let cover_index = if status == Status::Resolving {
            match cover_pick {
                CoverPick::Select(Selection::Index(i)) => {
                    if i >= analysis.covers.len() {
                        return Err(Error::InvalidSelection {
                            index: i,
                            available: analysis.covers.len(),
                        });
                    }
                    Some(i)
                }
                CoverPick::Select(Selection::Auto) => analysis.auto_cover(),
                CoverPick::Keep(prev) => {
                    persisted_cover(&analysis.covers, prev).or_else(|| analysis.auto_cover())
                }
            }
        } else {
            None
        };
        let cover = cover_index
            .map(|i| analysis.covers[i].clone())
            .unwrap_or_default();

        let graph = LambdaGraph::build(&cover);
        let cliques = graph.cliques();
        let clique_covers = if graph.is_empty() {
            Vec::new()
        } else {
            min_clique_covers(&graph)
        };
        let clique_cover_index = match clique_pick {
            _ if clique_covers.is_empty() => None,
            Selection::Auto => Some(0),
            Selection::Index(i) if i < clique_covers.len() => Some(i),
            Selection::Index(i) => {
                return Err(Error::InvalidSelection {
                    index: i,
                    available: clique_covers.len(),
                })
            }
        };
        let clique_cover = clique_cover_index
            .map(|i| clique_covers[i].clone())
            .unwrap_or_default();
        let orders = Orders::compute(&graph);

        Ok(Self {
            current: program,
            status,
            conflicts: analysis.conflicts,
            unresolvable: analysis.unresolvable,
            covers: analysis.covers,
            covers_truncated: analysis.covers_truncated,
            cover_index,
            cover,
            graph,
            cliques,
            clique_covers,
            clique_cover_index,
            clique_cover,
            orders,
            resolved,
            declines,
        })
    }

    pub fn group(&self, anchor: &RuleId) -> Option<&ConflictGroup> {
        self.cover.group(anchor)
    }

    pub fn clique(&self, label: &LambdaExtension) -> Option<&LambdaClique> {
        self.cliques.iter().find(|q| &q.label == label)
    }

    /// Anchors in presentation order.
    pub fn group_order(&self) -> Vec<RuleId> {
        self.orders.groups.iter().map(|r| r.id.clone()).collect()
    }

    /// The group's extension keys in suggestion order.
    pub fn extension_order(&self, anchor: &RuleId) -> Vec<String> {
        self.orders
            .extensions
            .get(anchor)
            .map(|v| v.iter().map(|r| r.key()).collect())
            .unwrap_or_default()
    }

    /// Representatives of the groups in a clique, in member order.
    pub fn clique_targets(&self, label: &LambdaExtension) -> Vec<RuleId> {
        let Some(q) = self.clique(label) else {
            return Vec::new();
        };
        let mut out: Vec<RuleId> = Vec::new();
        for m in &q.members {
            if let Some(rep) = self.group(m).and_then(|g| g.representative.clone()) {
                if !out.contains(&rep) {
                    out.push(rep);
                }
            }
        }
        out
    }
}

/// The first cover (in auto order) made only of groups of `prev`.
fn persisted_cover(covers: &[GroupCover], prev: &GroupCover) -> Option<usize> {
    let same = |a: &ConflictGroup, b: &ConflictGroup| {
        a.conflicts == b.conflicts && a.representative == b.representative
    };
    let mut fitting: Vec<usize> = (0..covers.len())
        .filter(|&i| {
            covers[i]
                .groups
                .iter()
                .all(|g| prev.groups.iter().any(|p| same(g, p)))
        })
        .collect();
    fitting.sort_by_key(|&i| covers[i].len());
    fitting.first().copied()
}

#[derive(Clone, Debug)]
pub struct Session {
    initial: Program,
    config: SessionConfig,
    steps: Vec<Step>,
    history: Vec<AppliedChoice>,
    state: SessionState,
}

impl Session {
    pub fn start(p: Program, config: SessionConfig) -> Result<Self> {
        let state = SessionState::compute(
            p.clone(),
            &config,
            Declines::new(),
            Vec::new(),
            CoverPick::Select(config.cover),
            config.clique_cover,
        )?;
        Ok(Self {
            initial: p,
            config,
            steps: Vec::new(),
            history: Vec::new(),
            state,
        })
    }

    /// Starts from `p` and replays `steps` in order. On failure the error
    /// carries the index of the offending step.
    pub fn replay(
        p: Program,
        config: SessionConfig,
        steps: &[Step],
    ) -> std::result::Result<Self, (usize, Error)> {
        let mut session = Self::start(p, config).map_err(|e| (0, e))?;
        for (i, step) in steps.iter().enumerate() {
            session.apply_step(step).map_err(|e| (i, e))?;
        }
        Ok(session)
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn initial(&self) -> &Program {
        &self.initial
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn history(&self) -> &[AppliedChoice] {
        &self.history
    }

    pub fn apply_step(&mut self, step: &Step) -> Result<()> {
        match step {
            Step::Choose(c) => self.choose(&c.extension, &c.targets).map(|_| ()),
            Step::SelectCover { select_cover } => self.select_cover(*select_cover),
            Step::SelectCliqueCover {
                select_clique_cover,
            } => self.select_clique_cover(*select_clique_cover),
        }
    }

    /// Applies the extension keyed `extension_key` to every target, each
    /// of which must represent a group of that extension's clique. Clique
    /// members left out record the extension as declined.
    pub fn choose(&mut self, extension_key: &str, targets: &[RuleId]) -> Result<&AppliedChoice> {
        let s = &self.state;
        if s.status != Status::Resolving {
            return Err(Error::InvalidTarget(
                "no resolvable conflicts remain".to_owned(),
            ));
        }
        if targets.is_empty() {
            return Err(Error::InvalidTarget("no targets given".to_owned()));
        }
        let x = LambdaExtension::parse_key(extension_key)?;
        let clique = s
            .clique(&x)
            .ok_or_else(|| Error::StaleExtension(extension_key.to_owned()))?;

        let mut member_reps: Vec<RuleId> = Vec::new();
        for m in &clique.members {
            let g = s.group(m).ok_or_else(|| Error::UnknownGroup(m.clone()))?;
            if let Some(rep) = &g.representative {
                member_reps.push(rep.clone());
            }
        }
        let mut chosen: BTreeSet<&RuleId> = BTreeSet::new();
        for t in targets {
            if !member_reps.contains(t) {
                return Err(Error::InvalidTarget(format!(
                    "{t} does not represent a group of the {} clique",
                    x.key()
                )));
            }
            if !chosen.insert(t) {
                return Err(Error::InvalidTarget(format!("{t} listed twice")));
            }
        }

        let mut program = s.current.clone();
        for t in &chosen {
            program = apply_extension(&program, t, &x)?;
        }

        let mut declines = s.declines.clone();
        for rep in &member_reps {
            if !chosen.contains(rep) {
                declines.entry(rep.clone()).or_default().insert(x.clone());
            }
        }

        let before: BTreeSet<&Conflict> = s.conflicts.iter().collect();
        let mut next = SessionState::compute(
            program,
            &self.config,
            declines,
            s.resolved.clone(),
            CoverPick::Keep(&s.cover),
            Selection::Auto,
        )?;
        let after: BTreeSet<&Conflict> = next.conflicts.iter().collect();
        debug_assert!(after.is_subset(&before), "an extension added a conflict");
        let resolved_now: Vec<Conflict> = before.difference(&after).map(|c| (*c).clone()).collect();

        for g in &s.cover.groups {
            if g.conflicts.iter().all(|c| !after.contains(c)) {
                let targeted = g
                    .representative
                    .as_ref()
                    .is_some_and(|r| chosen.contains(r));
                next.resolved.push(ResolvedGroup {
                    anchor: g.anchor.clone(),
                    representative: g.representative.clone(),
                    extension: targeted.then(|| x.key()),
                });
            }
        }

        let applied = AppliedChoice {
            extension: x,
            applied_to: chosen.into_iter().cloned().collect(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            resolved_now,
        };
        self.state = next;
        self.steps.push(Step::Choose(Choice {
            extension: extension_key.to_owned(),
            targets: targets.to_vec(),
        }));
        self.history.push(applied);
        Ok(self.history.last().expect("just pushed"))
    }

    /// Switches to another minimal cover of the current program.
    pub fn select_cover(&mut self, index: usize) -> Result<()> {
        let s = &self.state;
        let next = SessionState::compute(
            s.current.clone(),
            &self.config,
            s.declines.clone(),
            s.resolved.clone(),
            CoverPick::Select(Selection::Index(index)),
            Selection::Auto,
        )?;
        self.state = next;
        self.steps.push(Step::SelectCover {
            select_cover: index,
        });
        Ok(())
    }

    /// Switches to another minimum clique cover of the current graph.
    pub fn select_clique_cover(&mut self, index: usize) -> Result<()> {
        let s = &self.state;
        let keep = s.cover.clone();
        let next = SessionState::compute(
            s.current.clone(),
            &self.config,
            s.declines.clone(),
            s.resolved.clone(),
            CoverPick::Keep(&keep),
            Selection::Index(index),
        )?;
        self.state = next;
        self.steps.push(Step::SelectCliqueCover {
            select_clique_cover: index,
        });
        Ok(())
    }

    /// Reverts the last step by replaying the others from the initial
    /// program.
    pub fn undo(&mut self) -> Result<()> {
        let Some(last) = self.steps.last() else {
            return Err(Error::EmptyHistory);
        };
        let was_choice = matches!(last, Step::Choose(_));
        let keep = &self.steps[..self.steps.len() - 1];
        let replayed =
            Self::replay(self.initial.clone(), self.config.clone(), keep).map_err(|(_, e)| e)?;
        let mut history = std::mem::take(&mut self.history);
        if was_choice {
            history.pop();
        }
        *self = replayed;
        self.history = history;
        Ok(())
    }

    /// The default suggestion: the first group's first extension, applied
    /// to every representative in that extension's clique.
    pub fn suggest(&self) -> Option<Choice> {
        let s = &self.state;
        let first = s.orders.groups.first()?;
        let rank = s.orders.extensions.get(&first.id)?.first()?;
        Some(Choice {
            extension: rank.key(),
            targets: s.clique_targets(&rank.extension),
        })
    }

    /// Follows [`Session::suggest`] until nothing is left to suggest.
    pub fn resolve_with_suggestions(&mut self) -> Result<usize> {
        let mut taken = 0;
        while let Some(c) = self.suggest() {
            self.choose(&c.extension, &c.targets)?;
            taken += 1;
        }
        Ok(taken)
    }

    /// Samples `sample_count` fact sets; the session must be clean. Uses
    /// the full atom range of the solver, since facts add no new atoms.
    pub fn check_uniform(&self, sample_count: usize, seed: u64) -> Result<UniformReport> {
        self.require_clean()?;
        check_sampled(&self.state.current, sample_count, seed, MAX_ATOMS)
    }

    /// Tries every relevant fact set; `cap` bounds the atom count.
    pub fn check_uniform_exhaustive(&self, cap: usize) -> Result<UniformReport> {
        self.require_clean()?;
        check_exhaustive(&self.state.current, cap)
    }

    fn require_clean(&self) -> Result<()> {
        if self.state.status == Status::Clean {
            Ok(())
        } else {
            Err(Error::NotClean)
        }
    }

    pub fn to_file(&self) -> SessionFile {
        SessionFile {
            program: print_program(&self.initial),
            history: self.steps.clone(),
            config: self.config.clone(),
        }
    }

    pub fn from_file(file: &SessionFile) -> Result<Self> {
        let p = parse_program(&file.program)?;
        Self::replay(p, file.config.clone(), &file.history).map_err(|(_, e)| e)
    }
}

/// Persistent form of a session: initial program text plus its steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionFile {
    pub program: String,
    pub history: Vec<Step>,
    #[serde(default, skip_serializing_if = "is_default_config")]
    pub config: SessionConfig,
}

fn is_default_config(c: &SessionConfig) -> bool {
    c == &SessionConfig::default()
}

mod auto_form {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom("expected \"auto\" or an index"))
        }
    }
}

mod program_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::program::Program;
    use crate::syntax::{parse_program, print_program};

    pub fn serialize<S: Serializer>(p: &Program, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print_program(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Program, D::Error> {
        let text = String::deserialize(d)?;
        parse_program(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conflict_free_program_is_clean() {
        let p = parse_program("a :- b.\n").unwrap();
        let s = Session::start(p, SessionConfig::default()).unwrap();
        assert_eq!(s.state().status, Status::Clean);
        assert!(s.state().orders.groups.is_empty());
        assert!(s.suggest().is_none());
    }

    #[test]
    fn symmetric_conflict_blocks() {
        let p = parse_program("a :- b.\n-a :- b.\n").unwrap();
        let s = Session::start(p, SessionConfig::default()).unwrap();
        assert_eq!(s.state().status, Status::Blocked);
        assert_eq!(s.state().unresolvable.len(), 1);
    }

    #[test]
    fn partially_blocked_program_keeps_resolving() {
        let p = parse_program("a :- b.\n-a :- b.\nx :- c.\n-x :- c, d.\n").unwrap();
        let mut s = Session::start(p, SessionConfig::default()).unwrap();
        assert_eq!(s.state().status, Status::Resolving);
        assert_eq!(s.state().unresolvable.len(), 1);
        assert_eq!(s.resolve_with_suggestions().unwrap(), 1);
        assert_eq!(s.state().status, Status::Blocked);
    }

    #[test]
    fn selection_serde() {
        let c: SessionConfig =
            serde_json::from_str(r#"{"cover":"auto","clique_cover":2}"#).unwrap();
        assert_eq!(c.cover, Selection::Auto);
        assert_eq!(c.clique_cover, Selection::Index(2));
        assert_eq!(serde_json::to_string(&Selection::Auto).unwrap(), "\"auto\"");
    }

    #[test]
    fn out_of_range_cover_is_rejected() {
        let p = parse_program("a :- b.\n-a :- c.\n").unwrap();
        let config = SessionConfig {
            cover: Selection::Index(5),
            ..SessionConfig::default()
        };
        assert_eq!(
            Session::start(p, config).unwrap_err(),
            Error::InvalidSelection {
                index: 5,
                available: 2
            }
        );
    }
}
