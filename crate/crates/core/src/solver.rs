//! Exact answer-set computation for desk-scale programs.
//!
//! Literals are interned into a 64-bit mask, so at most 32 atoms are
//! supported. Candidates are enumerated by guessing which default-negated
//! literals are true; each guess fixes the reduct, whose least model is
//! then checked against the guess.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::program::{Atom, InterpretationSet, Literal, Program};

/// Default limit on the number of atoms the solver accepts.
pub const DEFAULT_ATOM_CAP: usize = 20;

/// Hard limit imposed by the 64-bit literal encoding.
pub const MAX_ATOMS: usize = 32;

/// Result of answer-set enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnswerSets {
    /// The (possibly empty) list of consistent answer sets.
    Sets(Vec<InterpretationSet>),
    /// The set of all literals is the unique answer set.
    Contradictory,
}

impl AnswerSets {
    pub fn is_contradictory(&self) -> bool {
        matches!(self, AnswerSets::Contradictory)
    }
}

pub fn answer_sets(p: &Program) -> Result<AnswerSets> {
    answer_sets_capped(p, DEFAULT_ATOM_CAP)
}

pub fn answer_sets_capped(p: &Program, cap: usize) -> Result<AnswerSets> {
    Solver::new(p, cap)?.solve(0)
}

#[derive(Clone, Copy, Debug)]
struct CompiledRule {
    head: u64,
    pos: u64,
    neg: u64,
}

/// A program compiled to bitmasks over its literal table, reusable for
/// many fact sets over the same atoms.
#[derive(Clone, Debug)]
pub struct Solver {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    rules: Vec<CompiledRule>,
    negated: Vec<u64>,
}

impl Solver {
    /// Compiles `p` over its own atoms plus `extra_atoms`.
    pub fn with_atoms<'a>(
        p: &Program,
        extra_atoms: impl IntoIterator<Item = &'a Atom>,
        cap: usize,
    ) -> Result<Self> {
        let mut all = p.atoms();
        all.extend(extra_atoms.into_iter().cloned());
        let limit = cap.min(MAX_ATOMS);
        if all.len() > limit {
            return Err(Error::TooLarge {
                atoms: all.len(),
                cap: limit,
            });
        }
        let atoms: Vec<Atom> = all.into_iter().collect();
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut solver = Self {
            atoms,
            index,
            rules: Vec::new(),
            negated: Vec::new(),
        };
        let mut negated = 0u64;
        for r in p.rules() {
            let head = solver.bit(&r.head);
            let pos = r.body_pos().fold(0, |m, l| m | solver.bit(l));
            let neg = r.body_neg().fold(0, |m, l| m | solver.bit(l));
            negated |= neg;
            solver.rules.push(CompiledRule { head, pos, neg });
        }
        solver.negated = bits(negated);
        Ok(solver)
    }

    pub fn new(p: &Program, cap: usize) -> Result<Self> {
        Self::with_atoms(p, [], cap)
    }

    /// Bit of a literal: atom `i` occupies bit `2i`, its strong negation
    /// bit `2i + 1`.
    pub fn bit(&self, l: &Literal) -> u64 {
        let i = self.index[&l.atom];
        1u64 << (2 * i + usize::from(l.strong_neg))
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.index.contains_key(a)
    }

    fn is_consistent(mask: u64) -> bool {
        const EVEN: u64 = 0x5555_5555_5555_5555;
        mask & (mask >> 1) & EVEN == 0
    }

    /// Least model of the reduct selected by `guess`, closed over `facts`,
    /// or `None` when it is inconsistent.
    fn least_model(&self, facts: u64, guess: u64) -> Option<u64> {
        let mut model = facts;
        loop {
            let mut next = model;
            for r in &self.rules {
                if r.neg & guess == 0 && r.pos & !next == 0 {
                    next |= r.head;
                }
            }
            if !Self::is_consistent(next) {
                return None;
            }
            if next == model {
                return Some(model);
            }
            model = next;
        }
    }

    /// Answer sets of the compiled program extended by the facts in
    /// `facts` (a literal mask).
    pub fn solve(&self, facts: u64) -> Result<AnswerSets> {
        if self.is_contradictory(facts) {
            return Ok(AnswerSets::Contradictory);
        }
        let masks = self.answer_masks(facts);
        let mut sets: Vec<InterpretationSet> = masks.into_iter().map(|m| self.decode(m)).collect();
        sets.sort();
        Ok(AnswerSets::Sets(sets))
    }

    /// True iff the program extended by `facts` has `Lit` as answer set.
    ///
    /// The reduct relative to `Lit` keeps exactly the rules without
    /// default literals, so one least-model computation decides it.
    pub fn is_contradictory(&self, facts: u64) -> bool {
        let everything = self.negated.iter().fold(0, |m, b| m | b);
        self.least_model(facts, everything).is_none()
    }

    /// True iff the program extended by `facts` has at least one
    /// consistent answer set. Stops at the first one found.
    pub fn has_consistent_answer_set(&self, facts: u64) -> bool {
        let negated_mask = self.negated.iter().fold(0, |m, b| m | b);
        (0u64..(1u64 << self.negated.len())).any(|choice| {
            let guess = self.guess(choice);
            self.least_model(facts, guess)
                .is_some_and(|model| model & negated_mask == guess)
        })
    }

    fn guess(&self, choice: u64) -> u64 {
        self.negated
            .iter()
            .enumerate()
            .filter(|(i, _)| choice >> i & 1 == 1)
            .fold(0, |m, (_, b)| m | b)
    }

    fn answer_masks(&self, facts: u64) -> Vec<u64> {
        let n = self.negated.len();
        let negated_mask = self.negated.iter().fold(0, |m, b| m | b);
        let mut found = Vec::new();
        for choice in 0u64..(1u64 << n) {
            let guess = self.guess(choice);
            if let Some(model) = self.least_model(facts, guess) {
                if model & negated_mask == guess {
                    found.push(model);
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }

    pub fn encode<'a>(&self, lits: impl IntoIterator<Item = &'a Literal>) -> u64 {
        lits.into_iter().fold(0, |m, l| m | self.bit(l))
    }

    pub fn decode(&self, mask: u64) -> InterpretationSet {
        InterpretationSet::new(bits(mask).into_iter().map(|b| {
            let pos = b.trailing_zeros() as usize;
            let atom = self.atoms[pos / 2].clone();
            if pos % 2 == 1 {
                Literal::neg(atom)
            } else {
                Literal::pos(atom)
            }
        }))
    }
}

fn bits(mut mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        out.push(low);
        mask &= mask - 1;
    }
    out
}
