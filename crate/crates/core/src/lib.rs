//! Conflict analysis and guided resolution for ground extended logic
//! programs.
//!
//! The pipeline runs parse → conflicts → λ-extensions → group cover →
//! λ-graph → orders, and [`session::Session`] wraps it into an undoable
//! resolution loop.

pub mod conflict;
pub mod cover;
pub mod error;
pub mod extension;
pub mod graph;
pub mod ids;
pub mod order;
pub mod program;
pub mod report;
pub mod session;
pub mod solver;
pub mod syntax;
pub mod uniform;

pub use conflict::{all_conflicts, conflict_group, is_conflicting, Conflict, ConflictGroup};
pub use error::{Error, Result};
pub use extension::{apply_extension, blockers, cautious_filter, min_extensions, LambdaExtension};
pub use ids::RuleId;
pub use program::{Atom, BodyLiteral, InterpretationSet, Literal, Program, Rule};
pub use solver::{answer_sets, AnswerSets};
pub use syntax::{parse_program, print_program};
