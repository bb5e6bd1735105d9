//! Checks that a program core stays non-contradictory under instance data.
//!
//! `P ∪ F` counts as contradictory when it has no consistent answer set:
//! either the set of all literals is its answer set, or every candidate
//! collapses into complementary literals. For cores whose default-negated
//! literals are never derived, this is exactly "some `a` and `-a` are both
//! derivable".
//!
//! A fact set `F` is drawn from the literals over the core's body atoms.
//! For the exhaustive check the universe is trimmed: a literal that occurs
//! in no body (neither plainly nor under `not`) and whose complement is no
//! rule head can only ever add itself to an answer set, so leaving it out
//! of `F` never hides a contradiction.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::program::{InterpretationSet, Literal, Program};
use crate::solver::Solver;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformReport {
    pub samples: usize,
    pub exhaustive: bool,
    /// Fact sets under which the program became contradictory.
    pub failures: Vec<InterpretationSet>,
}

impl UniformReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// True iff `p ∪ facts` has no consistent answer set.
pub fn contradicts_with(p: &Program, facts: &InterpretationSet, cap: usize) -> Result<bool> {
    let solver = Solver::with_atoms(p, facts.iter().map(|l| &l.atom), cap)?;
    Ok(!solver.has_consistent_answer_set(solver.encode(facts.iter())))
}

/// Tries every consistent fact set over the trimmed body-literal universe.
pub fn check_exhaustive(p: &Program, cap: usize) -> Result<UniformReport> {
    let solver = Solver::new(p, cap)?;
    let choices = relevant_choices(p);
    let mut failures = Vec::new();
    let mut samples = 0usize;
    let mut digits = vec![0usize; choices.len()];
    loop {
        let facts = digits
            .iter()
            .zip(&choices)
            .filter(|(&d, _)| d > 0)
            .fold(0u64, |m, (&d, opts)| m | solver.bit(&opts[d - 1]));
        samples += 1;
        if !solver.has_consistent_answer_set(facts) {
            failures.push(solver.decode(facts));
        }
        if !advance(&mut digits, &choices) {
            break;
        }
    }
    Ok(UniformReport {
        samples,
        exhaustive: true,
        failures,
    })
}

/// Draws `count` random consistent fact sets over all body atoms.
pub fn check_sampled(p: &Program, count: usize, seed: u64, cap: usize) -> Result<UniformReport> {
    let solver = Solver::new(p, cap)?;
    let atoms: Vec<_> = p.body_atoms().into_iter().collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..count {
        let facts = atoms
            .iter()
            .fold(0u64, |m, a| match rng.random_range(0..3) {
                1 => m | solver.bit(&Literal::pos(a.clone())),
                2 => m | solver.bit(&Literal::neg(a.clone())),
                _ => m,
            });
        if !solver.has_consistent_answer_set(facts) {
            failures.push(solver.decode(facts));
        }
    }
    failures.sort();
    failures.dedup();
    Ok(UniformReport {
        samples: count,
        exhaustive: false,
        failures,
    })
}

/// Per body atom, the literals worth adding as facts.
fn relevant_choices(p: &Program) -> Vec<Vec<Literal>> {
    let mentioned: BTreeSet<&Literal> = p
        .rules()
        .iter()
        .flat_map(|r| r.body.iter().map(|b| &b.literal))
        .collect();
    let heads: BTreeSet<&Literal> = p.rules().iter().map(|r| &r.head).collect();
    p.body_atoms()
        .into_iter()
        .map(|a| {
            [Literal::pos(a.clone()), Literal::neg(a)]
                .into_iter()
                .filter(|l| mentioned.contains(l) || heads.contains(&l.complement()))
                .collect::<Vec<_>>()
        })
        .filter(|opts| !opts.is_empty())
        .collect()
}

fn advance(digits: &mut [usize], choices: &[Vec<Literal>]) -> bool {
    for (d, opts) in digits.iter_mut().zip(choices) {
        if *d < opts.len() {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::MAX_ATOMS;
    use crate::syntax::parse_program;

    fn facts(lits: &[&str]) -> InterpretationSet {
        InterpretationSet::new(lits.iter().map(|l| Literal::parse(l).unwrap()))
    }

    #[test]
    fn running_example_contradicts_with_b() {
        let p = parse_program(include_str!("../tests/data/running_example.lp")).unwrap();
        assert!(contradicts_with(&p, &facts(&["b"]), MAX_ATOMS).unwrap());
        assert!(!contradicts_with(&p, &facts(&[]), MAX_ATOMS).unwrap());
    }

    #[test]
    fn resolved_example_survives_b() {
        let p = parse_program(include_str!("../tests/data/running_example_resolved.lp")).unwrap();
        assert!(!contradicts_with(&p, &facts(&["b"]), MAX_ATOMS).unwrap());
        assert!(!contradicts_with(&p, &facts(&[]), MAX_ATOMS).unwrap());
    }

    #[test]
    fn exhaustive_finds_the_symmetric_contradiction() {
        let p = parse_program("a :- b.\n-a :- b.\n").unwrap();
        let report = check_exhaustive(&p, MAX_ATOMS).unwrap();
        assert_eq!(report.failures, [facts(&["b"])]);
        let sampled = check_sampled(&p, 200, 7, MAX_ATOMS).unwrap();
        assert_eq!(sampled.failures, [facts(&["b"])]);
    }

    #[test]
    fn trimming_keeps_complements_of_heads() {
        let p = parse_program("a :- b.\nc :- not d.\n").unwrap();
        let choices = relevant_choices(&p);
        let shown: Vec<Vec<String>> = choices
            .iter()
            .map(|o| o.iter().map(|l| l.to_string()).collect())
            .collect();
        assert_eq!(shown, [vec!["b"], vec!["d"]]);
        let p = parse_program("a :- b.\n-b :- c.\n").unwrap();
        let shown: Vec<Vec<String>> = relevant_choices(&p)
            .iter()
            .map(|o| o.iter().map(|l| l.to_string()).collect())
            .collect();
        assert_eq!(shown, [vec!["b"], vec!["c"]]);
    }
}
