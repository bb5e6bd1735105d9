//! Resolvable groups ("units") of a program and the inclusion-minimal
//! conflict group covers built from them.
//!
//! A unit is a conflict set together with a representative able to
//! resolve all of it. Covers are chosen over conflicts: every conflict of
//! the program must lie in some unit of the cover, which in particular
//! touches every conflicting rule.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::conflict::{
    all_conflicts, conflict_group, conflicting_rules, representative_candidates_capped, Conflict,
    ConflictGroup,
};
use crate::error::{Error, Result};
use crate::extension::{LambdaExtension, DEFAULT_EXTENSION_CAP};
use crate::ids::RuleId;
use crate::program::Program;

pub const DEFAULT_COVER_CAP: usize = 10_000;

/// Extensions an expert passed over for a rule, keyed by that rule.
pub type Declines = BTreeMap<RuleId, BTreeSet<LambdaExtension>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub extension_cap: usize,
    pub cover_cap: usize,
    /// When an anchor cannot resolve its own group, restrict its size-1
    /// neighbours to the extensions they have in common (if any).
    pub proxy_restriction: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            extension_cap: DEFAULT_EXTENSION_CAP,
            cover_cap: DEFAULT_COVER_CAP,
            proxy_restriction: true,
        }
    }
}

/// A set of resolvable groups, sorted by anchor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCover {
    pub groups: Vec<ConflictGroup>,
}

impl GroupCover {
    pub fn new(mut groups: Vec<ConflictGroup>) -> Self {
        groups.sort_by(|a, b| {
            a.anchor
                .cmp(&b.anchor)
                .then_with(|| a.representative.cmp(&b.representative))
        });
        Self { groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, anchor: &RuleId) -> Option<&ConflictGroup> {
        self.groups.iter().find(|g| &g.anchor == anchor)
    }

    /// Sorted representative ids, the cover's ordering key.
    pub fn representatives(&self) -> Vec<RuleId> {
        let mut reps: Vec<RuleId> = self
            .groups
            .iter()
            .filter_map(|g| g.representative.clone())
            .collect();
        reps.sort();
        reps
    }

    fn sort_key(&self) -> (Vec<RuleId>, Vec<RuleId>) {
        let anchors = self.groups.iter().map(|g| g.anchor.clone()).collect();
        (self.representatives(), anchors)
    }
}

/// Everything known about a program's conflicts before the expert steps in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub conflicts: Vec<Conflict>,
    /// Resolvable groups, sorted by anchor then representative.
    pub units: Vec<ConflictGroup>,
    /// Conflicts that no resolvable group contains.
    pub unresolvable: Vec<Conflict>,
    /// Inclusion-minimal covers of the resolvable conflicts, sorted by
    /// representative ids.
    pub covers: Vec<GroupCover>,
    /// Set when enumeration hit the cap and `covers` holds a single greedy
    /// cover instead.
    pub covers_truncated: bool,
}

impl Analysis {
    pub fn is_clean(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// Conflicts exist, yet none of them can be resolved by a λ-extension.
    pub fn is_blocked(&self) -> bool {
        !self.conflicts.is_empty() && self.units.is_empty()
    }

    /// Index of the cover with the fewest groups, ties broken by
    /// representative ids.
    pub fn auto_cover(&self) -> Option<usize> {
        (0..self.covers.len()).min_by(|&a, &b| {
            let (x, y) = (&self.covers[a], &self.covers[b]);
            x.len()
                .cmp(&y.len())
                .then_with(|| x.sort_key().cmp(&y.sort_key()))
        })
    }
}

/// Runs conflict detection, unit construction and cover enumeration.
/// Unresolvable conflicts are reported rather than treated as errors.
pub fn analyze(p: &Program, options: &AnalysisOptions, declines: &Declines) -> Result<Analysis> {
    let conflicts = all_conflicts(p);
    let units = resolvable_units(p, &conflicts, options, declines)?;

    let coverable: Vec<Conflict> = conflicts
        .iter()
        .filter(|c| units.iter().any(|u| u.conflicts.contains(c)))
        .cloned()
        .collect();
    let unresolvable: Vec<Conflict> = conflicts
        .iter()
        .filter(|c| !coverable.contains(c))
        .cloned()
        .collect();

    let (picked, covers_truncated) = minimal_covers(&coverable, &units, options.cover_cap);
    let mut covers: Vec<GroupCover> = picked
        .into_iter()
        .map(|idx| GroupCover::new(idx.into_iter().map(|i| units[i].clone()).collect()))
        .collect();
    covers.sort_by_key(GroupCover::sort_key);

    Ok(Analysis {
        conflicts,
        units,
        unresolvable,
        covers,
        covers_truncated,
    })
}

/// All inclusion-minimal conflict group covers of `p`.
///
/// Fails with [`Error::UnresolvableRules`] when some conflict lies in no
/// resolvable group, e.g. `a :- b.` against `-a :- b.`
pub fn enumerate_min_covers(p: &Program) -> Result<Vec<GroupCover>> {
    let analysis = analyze(p, &AnalysisOptions::default(), &Declines::new())?;
    if !analysis.unresolvable.is_empty() {
        return Err(unresolvable_error(&analysis.unresolvable));
    }
    Ok(analysis.covers)
}

pub(crate) fn unresolvable_error(conflicts: &[Conflict]) -> Error {
    Error::UnresolvableRules {
        rules: conflicting_rules(conflicts).into_iter().collect(),
        conflicts: conflicts
            .iter()
            .map(|c| {
                let [a, b] = c.rules();
                (a.clone(), b.clone())
            })
            .collect(),
    }
}

fn resolvable_units(
    p: &Program,
    conflicts: &[Conflict],
    options: &AnalysisOptions,
    declines: &Declines,
) -> Result<Vec<ConflictGroup>> {
    let mut sizes: BTreeMap<&RuleId, usize> = BTreeMap::new();
    for c in conflicts {
        for r in c.rules() {
            *sizes.entry(r).or_default() += 1;
        }
    }

    let mut units: BTreeMap<(Vec<Conflict>, RuleId), ConflictGroup> = BTreeMap::new();
    let mut stranded: Vec<ConflictGroup> = Vec::new();
    for (&rule, &size) in &sizes {
        let g = conflict_group(p, rule)?;
        let candidates = representative_candidates_capped(p, &g, options.extension_cap)?;
        if candidates.is_empty() && size > 1 {
            stranded.push(g.clone());
        }
        for (rep, extensions) in candidates {
            let anchor = if rep == *rule || sizes[&rep] == 1 {
                rep.clone()
            } else {
                rule.clone()
            };
            let key = (g.conflicts.clone(), rep.clone());
            units.entry(key).or_insert_with(|| ConflictGroup {
                anchor,
                representative: Some(rep),
                conflicts: g.conflicts.clone(),
                size: g.size,
                extensions,
            });
        }
    }

    if options.proxy_restriction {
        for g in &stranded {
            restrict_proxies(g, &sizes, &mut units);
        }
    }

    let mut out: Vec<ConflictGroup> = units
        .into_values()
        .map(|mut u| {
            let rep = u
                .representative
                .clone()
                .expect("units carry a representative");
            if let Some(declined) = declines.get(&rep) {
                let kept: Vec<LambdaExtension> = u
                    .extensions
                    .iter()
                    .filter(|x| !declined.contains(x))
                    .cloned()
                    .collect();
                if !kept.is_empty() {
                    u.extensions = kept;
                }
            }
            u
        })
        .collect();
    out.sort_by(|a, b| {
        a.anchor
            .cmp(&b.anchor)
            .then_with(|| a.representative.cmp(&b.representative))
    });
    Ok(out)
}

/// Neighbours of a stranded anchor whose only conflict is with it stand in
/// for the whole group; they keep only the extensions they share.
fn restrict_proxies(
    stranded: &ConflictGroup,
    sizes: &BTreeMap<&RuleId, usize>,
    units: &mut BTreeMap<(Vec<Conflict>, RuleId), ConflictGroup>,
) {
    let keys: Vec<(Vec<Conflict>, RuleId)> = stranded
        .conflicts
        .iter()
        .filter_map(|c| {
            let other = c.other(&stranded.anchor)?;
            (sizes[other] == 1).then(|| (vec![c.clone()], other.clone()))
        })
        .filter(|k| units.contains_key(k))
        .collect();
    if keys.len() < 2 {
        return;
    }
    let mut common: BTreeSet<LambdaExtension> =
        units[&keys[0]].extensions.iter().cloned().collect();
    for k in &keys[1..] {
        let next: BTreeSet<LambdaExtension> = units[k].extensions.iter().cloned().collect();
        common = common.intersection(&next).cloned().collect();
    }
    if common.is_empty() {
        return;
    }
    for k in keys {
        let unit = units.get_mut(&k).expect("key taken from the map");
        unit.extensions.retain(|x| common.contains(x));
    }
}

/// Inclusion-minimal sets of unit indices covering every conflict in
/// `universe`, using each representative for at most one unit when that
/// is possible. Beyond `cap` results, returns one greedy cover and `true`.
fn minimal_covers(
    universe: &[Conflict],
    units: &[ConflictGroup],
    cap: usize,
) -> (Vec<Vec<usize>>, bool) {
    if universe.is_empty() {
        return (vec![Vec::new()], false);
    }
    let members: Vec<Vec<usize>> = units
        .iter()
        .map(|u| {
            u.conflicts
                .iter()
                .filter_map(|c| universe.iter().position(|x| x == c))
                .collect()
        })
        .collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); universe.len()];
    for (u, cs) in members.iter().enumerate() {
        for &c in cs {
            containing[c].push(u);
        }
    }

    let reps: Vec<Option<&RuleId>> = units.iter().map(|u| u.representative.as_ref()).collect();

    for distinct_reps in [true, false] {
        let mut search = CoverSearch {
            members: &members,
            containing: &containing,
            reps: &reps,
            distinct_reps,
            counts: vec![0; universe.len()],
            chosen: Vec::new(),
            found: BTreeSet::new(),
            cap,
            overflow: false,
        };
        search.run();
        if search.overflow {
            return (vec![greedy_cover(&members, universe.len())], true);
        }
        if !search.found.is_empty() {
            return (search.found.into_iter().collect(), false);
        }
    }
    (vec![greedy_cover(&members, universe.len())], false)
}

struct CoverSearch<'a> {
    members: &'a [Vec<usize>],
    containing: &'a [Vec<usize>],
    reps: &'a [Option<&'a RuleId>],
    distinct_reps: bool,
    counts: Vec<usize>,
    chosen: Vec<usize>,
    found: BTreeSet<Vec<usize>>,
    cap: usize,
    overflow: bool,
}

impl CoverSearch<'_> {
    fn has_private(&self, u: usize) -> bool {
        self.members[u].iter().any(|&c| self.counts[c] == 1)
    }

    fn run(&mut self) {
        if self.overflow {
            return;
        }
        let Some(open) = self.counts.iter().position(|&n| n == 0) else {
            let mut cover = self.chosen.clone();
            cover.sort_unstable();
            self.found.insert(cover);
            self.overflow = self.found.len() > self.cap;
            return;
        };
        let containing = self.containing;
        let members = self.members;
        for &u in &containing[open] {
            if self.chosen.contains(&u) {
                continue;
            }
            if self.distinct_reps && self.chosen.iter().any(|&v| self.reps[v] == self.reps[u]) {
                continue;
            }
            self.chosen.push(u);
            for &c in &members[u] {
                self.counts[c] += 1;
            }
            // Adding units only removes private conflicts, so a redundant
            // member can never become necessary again.
            if self.chosen.iter().all(|&v| self.has_private(v)) {
                self.run();
            }
            for &c in &members[u] {
                self.counts[c] -= 1;
            }
            self.chosen.pop();
        }
    }
}

fn greedy_cover(members: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    while covered.iter().any(|c| !c) {
        let best = (0..members.len())
            .max_by_key(|&u| {
                let gain = members[u].iter().filter(|&&c| !covered[c]).count();
                (gain, std::cmp::Reverse(u))
            })
            .expect("every conflict in the universe has a unit");
        for &c in &members[best] {
            covered[c] = true;
        }
        chosen.push(best);
    }
    let mut i = 0;
    while i < chosen.len() {
        let redundant = members[chosen[i]].iter().all(|&c| {
            chosen
                .iter()
                .enumerate()
                .any(|(j, &v)| j != i && members[v].contains(&c))
        });
        if redundant {
            chosen.remove(i);
        } else {
            i += 1;
        }
    }
    chosen.sort_unstable();
    chosen
}
