//! λ-extensions: sets of (default) literals that, added to a rule body,
//! remove the rule's conflicts.
//!
//! A single literal `x` blocks the conflict between `r` and `r2` when
//! `body(r) ∪ {x}` is still satisfiable but can no longer hold together
//! with `body(r2)`. For an extension `X` that keeps `body(r)` satisfiable,
//! `X` resolves the conflict iff it contains a blocker, so minimal
//! extensions are exactly the consistent minimal hitting sets of the
//! per-partner blocker sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::conflict::is_conflicting;
use crate::error::{Error, Result};
use crate::ids::RuleId;
use crate::program::{body_is_consistent, BodyLiteral, Literal, Program, Rule};

/// Upper bound on minimal extensions enumerated for one representative.
pub const DEFAULT_EXTENSION_CAP: usize = 1_000;

/// A set of body literals, ordered by atom name first. Its canonical key
/// (e.g. `~t,~-t`) is the serialized form used for ties and lookups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaExtension {
    literals: Vec<BodyLiteral>,
}

impl LambdaExtension {
    pub fn new(literals: impl IntoIterator<Item = BodyLiteral>) -> Self {
        let set: BTreeSet<BodyLiteral> = literals.into_iter().collect();
        Self {
            literals: set.into_iter().collect(),
        }
    }

    pub fn literals(&self) -> &[BodyLiteral] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, b: &BodyLiteral) -> bool {
        self.literals.binary_search(b).is_ok()
    }

    pub fn key(&self) -> String {
        self.literals
            .iter()
            .map(BodyLiteral::key)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a canonical key such as `~t,~-t` or `c`. The empty string
    /// is the empty extension.
    pub fn parse_key(key: &str) -> Result<Self> {
        if key.trim().is_empty() {
            return Ok(Self::new([]));
        }
        key.split(',')
            .map(BodyLiteral::parse_key)
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
            .map_err(|_| Error::MalformedExtension(key.to_owned()))
    }

    /// No `L` together with `~L`, and no `L` together with its complement.
    pub fn is_consistent(&self) -> bool {
        body_is_consistent(&self.literals)
    }
}

impl Ord for LambdaExtension {
    fn cmp(&self, other: &Self) -> Ordering {
        self.literals.cmp(&other.literals)
    }
}

impl PartialOrd for LambdaExtension {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LambdaExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

#[derive(Serialize, Deserialize)]
struct ExtensionRepr {
    literals: Vec<String>,
    key: String,
}

impl Serialize for LambdaExtension {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExtensionRepr {
            literals: self.literals.iter().map(BodyLiteral::key).collect(),
            key: self.key(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LambdaExtension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ExtensionRepr::deserialize(d)?;
        repr.literals
            .iter()
            .map(|l| BodyLiteral::parse_key(l))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
            .map_err(serde::de::Error::custom)
    }
}

/// Extends `rule`'s body by `x`, keeping the original literal order.
pub fn extend_rule(rule: &Rule, x: &LambdaExtension) -> Rule {
    let mut extended = rule.clone();
    extended.body.extend(x.literals.iter().cloned());
    extended
}

/// Literals that, added alone to `r`, keep it applicable and stop it from
/// conflicting with `r2`.
pub fn blockers(r: &Rule, r2: &Rule) -> BTreeSet<BodyLiteral> {
    let mut candidates = BTreeSet::new();
    for l in r2.body_pos() {
        candidates.insert(BodyLiteral::not(l.clone()));
        candidates.insert(BodyLiteral::pos(l.complement()));
    }
    for l in r2.body_neg() {
        candidates.insert(BodyLiteral::pos(l.clone()));
    }
    candidates
        .into_iter()
        .filter(|x| !r.body.contains(x))
        .filter(|x| body_is_consistent(r.body.iter().chain(std::iter::once(x))))
        .filter(|x| {
            let single = LambdaExtension::new([x.clone()]);
            !is_conflicting(&extend_rule(r, &single), r2)
        })
        .collect()
}

/// All inclusion-minimal λ-extensions of `r` against every rule of
/// `partners`, sorted. An empty result means `r` cannot resolve them.
pub fn min_extensions(r: &Rule, partners: &[&Rule]) -> Result<Vec<LambdaExtension>> {
    min_extensions_capped(r, partners, DEFAULT_EXTENSION_CAP)
}

pub fn min_extensions_capped(
    r: &Rule,
    partners: &[&Rule],
    cap: usize,
) -> Result<Vec<LambdaExtension>> {
    if partners.is_empty() {
        return Ok(Vec::new());
    }
    let families: Vec<BTreeSet<BodyLiteral>> = partners.iter().map(|r2| blockers(r, r2)).collect();
    if families.iter().any(BTreeSet::is_empty) {
        return Ok(Vec::new());
    }

    let mut found: BTreeSet<Vec<BodyLiteral>> = BTreeSet::new();
    let mut chosen: Vec<BodyLiteral> = Vec::new();
    hitting_sets(r, &families, &mut chosen, &mut found, cap)?;

    let mut out: Vec<LambdaExtension> = found
        .into_iter()
        .filter(|x| is_minimal_hitting_set(x, &families))
        .map(LambdaExtension::new)
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn hitting_sets(
    r: &Rule,
    families: &[BTreeSet<BodyLiteral>],
    chosen: &mut Vec<BodyLiteral>,
    found: &mut BTreeSet<Vec<BodyLiteral>>,
    cap: usize,
) -> Result<()> {
    let Some(unhit) = families
        .iter()
        .find(|f| !chosen.iter().any(|x| f.contains(x)))
    else {
        let mut set = chosen.clone();
        set.sort();
        found.insert(set);
        if found.len() > cap {
            return Err(Error::TooManyExtensions {
                rule: r.id.clone(),
                cap,
            });
        }
        return Ok(());
    };
    for x in unhit {
        let consistent = body_is_consistent(r.body.iter().chain(chosen.iter()).chain([x]));
        if !consistent {
            continue;
        }
        chosen.push(x.clone());
        hitting_sets(r, families, chosen, found, cap)?;
        chosen.pop();
    }
    Ok(())
}

fn is_minimal_hitting_set(x: &[BodyLiteral], families: &[BTreeSet<BodyLiteral>]) -> bool {
    (0..x.len()).all(|skip| {
        !families.iter().all(|f| {
            x.iter()
                .enumerate()
                .any(|(i, l)| i != skip && f.contains(l))
        })
    })
}

/// Drops every extension containing `-a` whose variant with `~a` in its
/// place is also listed; order is preserved.
pub fn cautious_filter(exts: &[LambdaExtension]) -> Vec<LambdaExtension> {
    let present: BTreeSet<&LambdaExtension> = exts.iter().collect();
    exts.iter()
        .filter(|x| {
            !x.literals.iter().any(|b| {
                if b.default_neg || !b.literal.strong_neg {
                    return false;
                }
                let cautious = BodyLiteral::not(Literal::pos(b.literal.atom.clone()));
                let variant = LambdaExtension::new(
                    x.literals
                        .iter()
                        .filter(|&o| o != b)
                        .cloned()
                        .chain(std::iter::once(cautious)),
                );
                present.contains(&variant)
            })
        })
        .cloned()
        .collect()
}

/// Replaces the rule `rule_id` by its λ-extended version.
pub fn apply_extension(p: &Program, rule_id: &RuleId, x: &LambdaExtension) -> Result<Program> {
    let rule = p
        .get(rule_id)
        .ok_or_else(|| Error::UnknownRule(rule_id.clone()))?;
    let extended = extend_rule(rule, x);
    if !extended.is_applicable() {
        return Err(Error::InconsistentExtension {
            rule: rule_id.clone(),
            key: x.key(),
        });
    }
    p.with_rule(extended)
}
