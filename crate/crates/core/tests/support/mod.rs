//! Brute-force oracles and random program generators shared by the
//! property tests and the acceptance runner.
//!
//! The oracles work from the definitions, by enumerating literal sets,
//! and do not call into the library's analysis code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use elp_resolve_core::{Atom, BodyLiteral, LambdaExtension, Literal, Program, Rule};
use proptest::prelude::*;

pub const ATOM_POOL: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn lit(atom: &str, strong_neg: bool) -> Literal {
    let atom = Atom::new(atom).unwrap();
    if strong_neg {
        Literal::neg(atom)
    } else {
        Literal::pos(atom)
    }
}

fn holds(b: &BodyLiteral, s: &BTreeSet<Literal>) -> bool {
    s.contains(&b.literal) != b.default_neg
}

/// Some consistent literal set makes every element of `body` true.
/// Tries all 3^k assignments over the k atoms involved.
pub fn satisfiable<'a>(body: impl IntoIterator<Item = &'a BodyLiteral>) -> bool {
    let body: Vec<&BodyLiteral> = body.into_iter().collect();
    let atoms: Vec<&Atom> = body
        .iter()
        .map(|b| &b.literal.atom)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let total = 3usize.pow(atoms.len() as u32);
    (0..total).any(|mut code| {
        let mut s = BTreeSet::new();
        for a in &atoms {
            match code % 3 {
                1 => {
                    s.insert(Literal::pos((*a).clone()));
                }
                2 => {
                    s.insert(Literal::neg((*a).clone()));
                }
                _ => {}
            }
            code /= 3;
        }
        body.iter().all(|b| holds(b, &s))
    })
}

/// Complementary heads plus a witness for both bodies.
pub fn conflicting(r: &Rule, r2: &Rule) -> bool {
    r.head == r2.head.complement() && satisfiable(r.body.iter().chain(r2.body.iter()))
}

/// All conflicting pairs, by rule position.
pub fn conflict_pairs(p: &Program) -> BTreeSet<(String, String)> {
    let rules = p.rules();
    let mut out = BTreeSet::new();
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if conflicting(&rules[i], &rules[j]) {
                let (a, b) = (rules[i].id.to_string(), rules[j].id.to_string());
                out.insert(if a <= b { (a, b) } else { (b, a) });
            }
        }
    }
    out
}

fn extended(r: &Rule, x: &[BodyLiteral]) -> Rule {
    let mut r = r.clone();
    r.body.extend(x.iter().cloned());
    r
}

/// `x` keeps `r` applicable and removes its conflict with every partner.
pub fn resolves(r: &Rule, partners: &[&Rule], x: &[BodyLiteral]) -> bool {
    let rx = extended(r, x);
    satisfiable(rx.body.iter()) && partners.iter().all(|r2| !conflicting(&rx, r2))
}

/// The four body literals over each atom of `r` and `partners`, minus
/// those already in `r`'s body.
pub fn candidate_universe(r: &Rule, partners: &[&Rule]) -> Vec<BodyLiteral> {
    let mut atoms: BTreeSet<&Atom> = r.atoms();
    for r2 in partners {
        atoms.extend(r2.atoms());
    }
    atoms
        .into_iter()
        .flat_map(|a| {
            let p = Literal::pos(a.clone());
            let n = Literal::neg(a.clone());
            [
                BodyLiteral::pos(p.clone()),
                BodyLiteral::pos(n.clone()),
                BodyLiteral::not(p),
                BodyLiteral::not(n),
            ]
        })
        .filter(|b| !r.body.contains(b))
        .collect()
}

/// Inclusion-minimal resolving sets found by plain subset enumeration.
///
/// Subsets are enumerated up to `partners.len()` elements. Any larger
/// resolving set is never minimal: an unsatisfiable joint body always
/// has a clashing pair of literals, the extended rule alone is
/// satisfiable, so each partner is blocked by one literal of the set and
/// the others can be dropped.
pub fn brute_min_extensions(r: &Rule, partners: &[&Rule]) -> BTreeSet<LambdaExtension> {
    let universe = candidate_universe(r, partners);
    let mut resolving: Vec<Vec<BodyLiteral>> = Vec::new();
    let mut current = Vec::new();
    subsets(&universe, 0, partners.len(), &mut current, &mut |x| {
        if resolves(r, partners, x) {
            resolving.push(x.to_vec());
        }
    });
    let sets: Vec<BTreeSet<&BodyLiteral>> = resolving.iter().map(|x| x.iter().collect()).collect();
    sets.iter()
        .filter(|x| !sets.iter().any(|y| y.len() < x.len() && y.is_subset(x)))
        .map(|x| LambdaExtension::new(x.iter().map(|&b| b.clone())))
        .collect()
}

fn subsets<F: FnMut(&[BodyLiteral])>(
    universe: &[BodyLiteral],
    start: usize,
    room: usize,
    current: &mut Vec<BodyLiteral>,
    visit: &mut F,
) {
    visit(current);
    if room == 0 {
        return;
    }
    for i in start..universe.len() {
        current.push(universe[i].clone());
        subsets(universe, i + 1, room - 1, current, visit);
        current.pop();
    }
}

pub fn body_literal() -> impl Strategy<Value = BodyLiteral> {
    (0..ATOM_POOL.len(), any::<bool>(), any::<bool>()).prop_map(|(a, sn, dn)| {
        let l = lit(ATOM_POOL[a], sn);
        if dn {
            BodyLiteral::not(l)
        } else {
            BodyLiteral::pos(l)
        }
    })
}

pub fn rule_parts() -> impl Strategy<Value = (Literal, Vec<BodyLiteral>)> {
    (
        (0..ATOM_POOL.len(), any::<bool>()).prop_map(|(a, sn)| lit(ATOM_POOL[a], sn)),
        prop::collection::vec(body_literal(), 0..=3),
    )
}

/// Programs with up to `max_rules` rules over the six-atom pool, ids
/// r1, r2, ... in order.
pub fn program(max_rules: usize) -> impl Strategy<Value = Program> {
    prop::collection::vec(rule_parts(), 1..=max_rules).prop_map(|parts| {
        let rules = parts
            .into_iter()
            .enumerate()
            .map(|(i, (head, body))| Rule::new(format!("r{}", i + 1).as_str(), head, body))
            .collect();
        Program::new(rules).unwrap()
    })
}

/// Programs over the first `atoms` atoms of the pool only.
pub fn small_program(max_rules: usize, atoms: usize) -> impl Strategy<Value = Program> {
    let literal = move || (0..atoms, any::<bool>()).prop_map(|(a, sn)| lit(ATOM_POOL[a], sn));
    let body = move || {
        (literal(), any::<bool>()).prop_map(|(l, dn)| {
            if dn {
                BodyLiteral::not(l)
            } else {
                BodyLiteral::pos(l)
            }
        })
    };
    prop::collection::vec(
        (literal(), prop::collection::vec(body(), 0..=2)),
        1..=max_rules,
    )
    .prop_map(|parts| {
        let rules = parts
            .into_iter()
            .enumerate()
            .map(|(i, (head, body))| Rule::new(format!("r{}", i + 1).as_str(), head, body))
            .collect();
        Program::new(rules).unwrap()
    })
}
