use thiserror::Error;

use crate::ids::RuleId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate rule id `{id}` at line {line}")]
    DuplicateRuleId { id: RuleId, line: usize },
    #[error("unknown rule `{0}`")]
    UnknownRule(RuleId),
    #[error("no conflict group anchored at `{0}`")]
    UnknownGroup(RuleId),
    #[error("rule `{0}` is not part of any conflict")]
    NotConflicting(RuleId),
    #[error("extension `{key}` is inconsistent with the body of `{rule}`")]
    InconsistentExtension { rule: RuleId, key: String },
    #[error("program has {atoms} atoms, above the solver cap of {cap}")]
    TooLarge { atoms: usize, cap: usize },
    #[error("more than {cap} minimal extensions for `{rule}`")]
    TooManyExtensions { rule: RuleId, cap: usize },
    #[error("no resolvable conflict group covers rules {}", join_ids(.rules))]
    UnresolvableRules {
        rules: Vec<RuleId>,
        conflicts: Vec<(RuleId, RuleId)>,
    },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("extension `{0}` is not offered in the current state")]
    StaleExtension(String),
    #[error("history is empty")]
    EmptyHistory,
    #[error("selection index {index} out of range ({available} available)")]
    InvalidSelection { index: usize, available: usize },
    #[error("session is not clean")]
    NotClean,
    #[error("unknown graph format `{0}`")]
    UnknownFormat(String),
    #[error("malformed extension `{0}`")]
    MalformedExtension(String),
}

fn join_ids(ids: &[RuleId]) -> String {
    let parts: Vec<&str> = ids.iter().map(RuleId::as_str).collect();
    format!("{{{}}}", parts.join(","))
}
