//! Reasoner for resource-driven substructural defeasible logic.
//!
//! Literals are consumable resources: facts are the initial stock, rules
//! transform premises into conclusions, and deriving a conclusion spends
//! premise instances. Rules come in three strengths (strict, defeasible,
//! defeater), bodies and heads may be multisets or order-sensitive
//! sequences, and conflicts are settled by team defeat over a superiority
//! relation. Because consumption makes derivations order-sensitive, a
//! theory has many extensions; this crate derives them all, canonically
//! deduplicated, and ranks them by resource cost.
//!
//! Entry points:
//!
//! - [`parse_theory`] / [`serialize_theory`]: the `.rsdl` text format.
//! - [`DerivationState`] and the step operations in [`engine`].
//! - [`enumerate_extensions`], [`derive_deterministic`],
//!   [`rank_extensions`].
//! - [`oracle::oracle_extensions`]: an independent brute-force reference
//!   for small theories.

mod literal;
mod rule;
mod tags;
mod theory;

pub mod engine;
pub mod enumerate;
pub mod generator;
pub mod oracle;
pub mod parser;

pub use engine::{
    apply_move, enabled_moves, refute_defeasible, refute_strict, replay, step_defeasible,
    step_strict, strict_inconsistency, support, DerivationState, DerivationStep, EngineError,
    FailReason, Justification, Mode, Move, MoveKind,
};
pub use enumerate::{
    canonicalize, derive_deterministic, enumerate_extensions, enumerate_with_workers,
    rank_extensions, run, CostError, CostMap, Extension, ProvenCount,
};
pub use literal::{Atom, Literal, Polarity};
pub use parser::{parse_theory, parse_theory_with_config, serialize_theory, Diagnostic, SourceSpan};
pub use rule::{BodyKind, Label, Rule, RuleBody, RuleHead, RuleKind};
pub use tags::Tag;
pub use theory::{
    EnumerationMode, HeadVariant, ReasonerConfig, RuleSelector, Theory, TieBreak,
    ValidationReport, Violation,
};
