//! Ground extended logic programs: literals, rules, programs and the
//! satisfaction/reduct machinery they are evaluated with.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::RuleId;

/// A propositional atom. Names start with a lowercase ASCII letter and
/// continue with letters, digits or underscores.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if is_atom_name(&name) {
            Ok(Self(name))
        } else {
            Err(Error::MalformedExtension(name))
        }
    }

    pub(crate) fn new_unchecked(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "not"
}

/// An atom, possibly under strong negation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub strong_neg: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Self {
            atom,
            strong_neg: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Self {
            atom,
            strong_neg: true,
        }
    }

    /// The strongly complementary literal.
    pub fn complement(&self) -> Self {
        Self {
            atom: self.atom.clone(),
            strong_neg: !self.strong_neg,
        }
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.atom == other.atom && self.strong_neg != other.strong_neg
    }

    /// Parses `a` or `-a`.
    pub fn parse(s: &str) -> Result<Self> {
        let (strong_neg, name) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if !is_atom_name(name) {
            return Err(Error::MalformedExtension(s.to_owned()));
        }
        Ok(Self {
            atom: Atom::new_unchecked(name),
            strong_neg,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strong_neg {
            f.write_str("-")?;
        }
        f.write_str(self.atom.name())
    }
}

/// A body element: a literal, possibly under default negation.
///
/// The derived order compares atom name first, then strong negation, then
/// default negation, so `~t` sorts before `~-t` and both after `~h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BodyLiteral {
    pub literal: Literal,
    pub default_neg: bool,
}

impl BodyLiteral {
    pub fn pos(literal: Literal) -> Self {
        Self {
            literal,
            default_neg: false,
        }
    }

    pub fn not(literal: Literal) -> Self {
        Self {
            literal,
            default_neg: true,
        }
    }

    /// Compact form used in extension keys: `[~][-]name`.
    pub fn key(&self) -> String {
        if self.default_neg {
            format!("~{}", self.literal)
        } else {
            self.literal.to_string()
        }
    }

    /// Parses the compact key form (`~-a`) or program syntax (`not -a`).
    pub fn parse_key(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('~') {
            return Ok(Self::not(Literal::parse(rest.trim_start())?));
        }
        if let Some(rest) = s.strip_prefix("not ") {
            return Ok(Self::not(Literal::parse(rest.trim_start())?));
        }
        Ok(Self::pos(Literal::parse(s)?))
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.default_neg {
            f.write_str("not ")?;
        }
        self.literal.fmt(f)
    }
}

/// Checks that a collection of body literals can be true at once: its
/// positive part is consistent and disjoint from its default-negated part.
pub fn body_is_consistent<'a>(body: impl IntoIterator<Item = &'a BodyLiteral>) -> bool {
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for b in body {
        if b.default_neg {
            neg.insert(&b.literal);
        } else {
            pos.insert(&b.literal);
        }
    }
    pos.iter()
        .all(|l| !pos.contains(&l.complement()) && !neg.contains(l))
}

/// `head :- body.` Bodies compare as sets; the insertion order is kept
/// only for printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: RuleId,
    pub head: Literal,
    pub body: IndexSet<BodyLiteral>,
}

impl Rule {
    pub fn new(
        id: impl Into<RuleId>,
        head: Literal,
        body: impl IntoIterator<Item = BodyLiteral>,
    ) -> Self {
        Self {
            id: id.into(),
            head,
            body: body.into_iter().collect(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// Literals of the positive, non-default part of the body.
    pub fn body_pos(&self) -> impl Iterator<Item = &Literal> {
        self.body
            .iter()
            .filter(|b| !b.default_neg)
            .map(|b| &b.literal)
    }

    /// Literals occurring under default negation.
    pub fn body_neg(&self) -> impl Iterator<Item = &Literal> {
        self.body
            .iter()
            .filter(|b| b.default_neg)
            .map(|b| &b.literal)
    }

    pub fn body_atoms(&self) -> BTreeSet<&Atom> {
        self.body.iter().map(|b| &b.literal.atom).collect()
    }

    pub fn atoms(&self) -> BTreeSet<&Atom> {
        let mut atoms = self.body_atoms();
        atoms.insert(&self.head.atom);
        atoms
    }

    /// True iff the body can be satisfied by some literal set.
    pub fn is_applicable(&self) -> bool {
        body_is_consistent(&self.body)
    }
}

/// A finite, ordered set of rules with unique identifiers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    /// Builds a program, rejecting duplicate rule ids.
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, r) in rules.iter().enumerate() {
            if !seen.insert(&r.id) {
                return Err(Error::DuplicateRuleId {
                    id: r.id.clone(),
                    line: i + 1,
                });
            }
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: &RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| &r.id == id)
    }

    pub fn position(&self, id: &RuleId) -> Option<usize> {
        self.rules.iter().position(|r| &r.id == id)
    }

    /// Every atom occurring in the program, sorted by name.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.rules.iter().flat_map(|r| r.atoms()).cloned().collect()
    }

    /// Atoms occurring in at least one rule body.
    pub fn body_atoms(&self) -> BTreeSet<Atom> {
        self.rules
            .iter()
            .flat_map(|r| r.body_atoms())
            .cloned()
            .collect()
    }

    /// A program core carries no facts.
    pub fn is_core(&self) -> bool {
        !self.rules.iter().any(Rule::is_fact)
    }

    /// Returns a copy with the rule `id` replaced by `rule`.
    pub fn with_rule(&self, rule: Rule) -> Result<Self> {
        let i = self
            .position(&rule.id)
            .ok_or_else(|| Error::UnknownRule(rule.id.clone()))?;
        let mut rules = self.rules.clone();
        rules[i] = rule;
        Ok(Self { rules })
    }

    /// Appends facts for `literals`, labelled `f1`, `f2`, ... (skipping any
    /// label already in use).
    pub fn with_facts<'a>(&self, literals: impl IntoIterator<Item = &'a Literal>) -> Self {
        let mut rules = self.rules.clone();
        let mut n = 0;
        for l in literals {
            let id = loop {
                n += 1;
                let id = RuleId::new(format!("f{n}"));
                if self.get(&id).is_none() {
                    break id;
                }
            };
            rules.push(Rule::new(id, l.clone(), []));
        }
        Self { rules }
    }

    pub fn has_default_negation(&self) -> bool {
        self.rules.iter().any(|r| r.body_neg().next().is_some())
    }
}

/// A set of literals, read as the literals believed true.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct InterpretationSet(pub BTreeSet<Literal>);

impl InterpretationSet {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        Self(literals.into_iter().collect())
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.0.contains(l)
    }

    pub fn is_consistent(&self) -> bool {
        self.0.iter().all(|l| !self.0.contains(&l.complement()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<InterpretationSet> for Vec<String> {
    fn from(s: InterpretationSet) -> Self {
        s.0.iter().map(Literal::to_string).collect()
    }
}

impl TryFrom<Vec<String>> for InterpretationSet {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        v.iter()
            .map(|s| Literal::parse(s))
            .collect::<Result<BTreeSet<_>>>()
            .map(Self)
    }
}

impl fmt::Display for InterpretationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            l.fmt(f)?;
        }
        f.write_str("}")
    }
}

/// Truth of a body in `s`: every positive literal is in `s` and no
/// default-negated literal is.
pub fn satisfies<'a>(
    s: &InterpretationSet,
    body: impl IntoIterator<Item = &'a BodyLiteral>,
) -> bool {
    body.into_iter()
        .all(|b| s.contains(&b.literal) != b.default_neg)
}

/// Gelfond-Lifschitz reduct: drop every rule whose default-negated part
/// meets `s`, and strip default literals from the rest.
pub fn reduct(p: &Program, s: &InterpretationSet) -> Program {
    let rules = p
        .rules()
        .iter()
        .filter(|r| r.body_neg().all(|l| !s.contains(l)))
        .map(|r| Rule {
            id: r.id.clone(),
            head: r.head.clone(),
            body: r.body.iter().filter(|b| !b.default_neg).cloned().collect(),
        })
        .collect();
    Program { rules }
}
