//! Golden checks on the sixteen-rule running example.

use std::collections::BTreeSet;

use elp_resolve_core::cover::{analyze, AnalysisOptions, Declines};
use elp_resolve_core::graph::{min_clique_cover, LambdaGraph};
use elp_resolve_core::order::{order_extensions, order_groups};
use elp_resolve_core::session::{Choice, Session, SessionConfig, Status, Step};
use elp_resolve_core::{parse_program, print_program, Program, RuleId};

const RUNNING: &str = include_str!("data/running_example.lp");
const RESOLVED: &str = include_str!("data/running_example_resolved.lp");

fn running() -> Program {
    parse_program(RUNNING).unwrap()
}

fn id(s: &str) -> RuleId {
    RuleId::from(s)
}

fn b_ex() -> elp_resolve_core::cover::GroupCover {
    let a = analyze(&running(), &AnalysisOptions::default(), &Declines::new()).unwrap();
    a.covers[a.auto_cover().unwrap()].clone()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn table_of_groups() {
    let cover = b_ex();
    let rows: Vec<(String, String, Vec<String>, BTreeSet<String>)> = cover
        .groups
        .iter()
        .map(|g| {
            (
                g.label(),
                g.representative.clone().unwrap().to_string(),
                g.conflicts.iter().map(|c| c.to_string()).collect(),
                g.extensions.iter().map(|x| x.key()).collect(),
            )
        })
        .collect();
    let expected = vec![
        ("cgr(r2)", "r2", vec!["{r1,r2}"], set(&["c"])),
        ("cgr(r4)", "r4", vec!["{r3,r4}"], set(&["~f", "c"])),
        ("cgr(r6)", "r6", vec!["{r5,r6}"], set(&["~h", "~f"])),
        ("cgr(r8)", "r8", vec!["{r7,r8}"], set(&["~k"])),
        ("cgr(r10)", "r10", vec!["{r9,r10}"], set(&["~f"])),
        ("cgr(r11)", "r11", vec!["{r9,r11}"], set(&["~f"])),
        ("cgr(r13)", "r13", vec!["{r12,r13}"], set(&["~h", "~f"])),
        (
            "cgr(r14)",
            "r14",
            vec!["{r14,r15}", "{r14,r16}"],
            set(&["~h", "~t,~-t"]),
        ),
    ];
    let expected: Vec<(String, String, Vec<String>, BTreeSet<String>)> = expected
        .into_iter()
        .map(|(a, b, c, d)| {
            (
                a.to_owned(),
                b.to_owned(),
                c.into_iter().map(str::to_owned).collect(),
                d,
            )
        })
        .collect();
    assert_eq!(rows, expected);
}

#[test]
fn graph_nodes_edges_and_cliques() {
    let g = LambdaGraph::build(&b_ex());
    let weights: Vec<usize> = g.nodes.iter().map(|n| n.weight).collect();
    assert_eq!(weights, [1, 1, 1, 1, 1, 1, 1, 2]);

    let has_edge = |a: &str, b: &str, label: &str| {
        g.edges
            .iter()
            .any(|e| e.a == id(a) && e.b == id(b) && e.label.key() == label)
    };
    assert!(has_edge("r2", "r4", "c"));
    assert!(has_edge("r8", "r8", "~k"));
    assert!(has_edge("r14", "r14", "~t,~-t"));
    assert!(!has_edge("r14", "r14", "~h"));

    let cliques: Vec<(String, Vec<String>, usize)> = g
        .cliques()
        .into_iter()
        .map(|q| {
            (
                q.label.key(),
                q.members.iter().map(|m| m.to_string()).collect(),
                q.weight,
            )
        })
        .collect();
    let expected: Vec<(String, Vec<String>, usize)> = [
        ("~f", &["r4", "r6", "r10", "r11", "r13"][..], 5),
        ("~h", &["r6", "r13", "r14"][..], 4),
        ("c", &["r2", "r4"][..], 2),
        ("~t,~-t", &["r14"][..], 2),
        ("~k", &["r8"][..], 1),
    ]
    .into_iter()
    .map(|(l, m, w)| (l.to_owned(), m.iter().map(|s| s.to_string()).collect(), w))
    .collect();
    assert_eq!(cliques, expected);

    let cover = min_clique_cover(&g);
    assert!(!cover.approximate);
    let labels: BTreeSet<String> = cover.extensions().iter().map(|x| x.key()).collect();
    assert_eq!(labels, set(&["c", "~f", "~h", "~k"]));
}

#[test]
fn orders_of_the_initial_graph() {
    let g = LambdaGraph::build(&b_ex());
    let ranked = order_groups(&g);
    let ids: Vec<String> = ranked.iter().map(|r| r.id.to_string()).collect();
    assert_eq!(ids, ["r10", "r11", "r2", "r8", "r6", "r13", "r4", "r14"]);
    let weight = |s: &str| ranked.iter().find(|r| r.id == id(s)).unwrap().weight;
    assert_eq!(weight("r4"), 7);
    assert_eq!(weight("r6"), 9);
    assert_eq!(weight("r13"), 9);
    assert_eq!(weight("r14"), 6);

    let keys = |s: &str| -> Vec<String> {
        order_extensions(&g, &id(s))
            .unwrap()
            .iter()
            .map(|r| r.key())
            .collect()
    };
    assert_eq!(keys("r4"), ["~f", "c"]);
    assert_eq!(keys("r6"), ["~f", "~h"]);
    assert_eq!(keys("r13"), ["~f", "~h"]);
    assert_eq!(keys("r14"), ["~h", "~t,~-t"]);
}

fn script() -> Vec<Step> {
    serde_json::from_str(include_str!("data/guided_script.json")).unwrap()
}

#[test]
fn guided_resolution_reaches_the_final_program() {
    let mut s = Session::start(running(), SessionConfig::default()).unwrap();
    assert_eq!(s.state().status, Status::Resolving);
    let steps = script();

    s.apply_step(&steps[0]).unwrap();
    let order: Vec<String> = s
        .state()
        .group_order()
        .iter()
        .map(|r| r.to_string())
        .collect();
    assert_eq!(order, ["r2", "r4", "r8", "r14"]);
    let g = &s.state().graph;
    assert!(g
        .edges
        .iter()
        .any(|e| e.a == id("r14") && e.b == id("r14") && e.label.key() == "~h"));
    assert_eq!(s.state().extension_order(&id("r4")), ["c"]);

    for step in &steps[1..3] {
        s.apply_step(step).unwrap();
    }
    assert_eq!(s.state().extension_order(&id("r14")), ["~h", "~t,~-t"]);
    s.apply_step(&steps[3]).unwrap();

    assert_eq!(s.state().status, Status::Clean);
    assert!(s.state().graph.is_empty());
    assert_eq!(s.state().current, parse_program(RESOLVED).unwrap());
    assert_eq!(print_program(&s.state().current), RESOLVED);
    assert_eq!(s.state().resolved.len(), 8);
}

#[test]
fn undo_restores_the_initial_order() {
    let mut s = Session::start(running(), SessionConfig::default()).unwrap();
    let before = s.state().clone();
    s.apply_step(&script()[0]).unwrap();
    s.undo().unwrap();
    assert_eq!(s.state(), &before);
    assert!(s.history().is_empty());
    assert_eq!(s.undo().unwrap_err(), elp_resolve_core::Error::EmptyHistory);
}

#[test]
fn invalid_choices_are_rejected() {
    let mut s = Session::start(running(), SessionConfig::default()).unwrap();
    let err = s.choose("~f", &[id("r2")]).unwrap_err();
    assert!(matches!(err, elp_resolve_core::Error::InvalidTarget(_)));
    let err = s.choose("~f", &[]).unwrap_err();
    assert!(matches!(err, elp_resolve_core::Error::InvalidTarget(_)));
    let err = s.choose("~zz", &[id("r2")]).unwrap_err();
    assert!(matches!(err, elp_resolve_core::Error::StaleExtension(_)));
    assert!(s.history().is_empty());
}

#[test]
fn session_file_round_trip() {
    let steps = script();
    let s = Session::replay(running(), SessionConfig::default(), &steps).unwrap();
    let file = s.to_file();
    let json = serde_json::to_string(&file).unwrap();
    assert!(json.contains(r#"{"extension":"~f","targets":["r10","r6","r11","r13"]}"#));
    let back = Session::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back.state(), s.state());
}

#[test]
fn suggestions_resolve_everything() {
    let mut s = Session::start(running(), SessionConfig::default()).unwrap();
    let first = s.suggest().unwrap();
    assert_eq!(first, Choice::new("~f", &["r4", "r6", "r10", "r11", "r13"]));
    s.resolve_with_suggestions().unwrap();
    assert_eq!(s.state().status, Status::Clean);
}
