//! Finite MSO laboratory: word and truncated-tree structures, formulas,
//! evaluation, rank types and Ehrenfeucht–Fraïssé games.

pub mod eval;
pub mod formula;
pub mod game;
pub mod sample;
pub mod structure;
pub mod types;

use thiserror::Error;

pub use eval::{evaluate, evaluate_with_guard, Assignment, DEFAULT_EVAL_GUARD};
pub use formula::{parse_formula, quantifier_rank, Formula};
pub use game::{ef_game_search, GameTrace, MoveKind, Player, Round, Side};
pub use sample::{random_tree, random_word, resample_leaves, sample_sentences, Vocabulary};
pub use structure::{LabStructure, Shape, ROOT};
pub use types::{ef_equivalent, rank_type, RankType, TypeEngine, DEFAULT_TYPE_WORK};

/// Largest domain a structure may have (sets are `u64` bitmasks).
pub const MAX_DOMAIN: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsoError {
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("structure file: {0}")]
    File(String),
    #[error("syntax error at line {line}, offset {offset}: {msg}")]
    Syntax { line: usize, offset: usize, msg: String },
    #[error("unknown successor index {a} (structure has {branching})")]
    UnknownSuccessor { a: usize, branching: usize },
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("guard exceeded: {what} is {size}, limit {limit}")]
    Guard { what: &'static str, size: u128, limit: u128 },
    #[error("vocabulary mismatch: {0}")]
    Vocabulary(String),
    #[error("branch {j} out of range for branching {b}")]
    BranchOutOfRange { j: usize, b: usize },
    #[error("restriction needs a tree-shaped structure")]
    NotATree,
}
