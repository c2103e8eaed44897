//! The proof theory: derivation states over a theory, the
//! applicability/consumability/discardability predicates for multiset and
//! sequence bodies, and one step operation per proof tag.
//!
//! A derivation is an append-only log of tagged steps. The step index
//! plays the column role of a proof matrix; consumption is recorded by
//! setting `consumed_at` on the spent instance exactly once. Facts are
//! simultaneous: they share the initial tick, so no fact precedes another
//! for sequence-ordering purposes.

mod firing;
mod moves;
mod predicates;
mod state;

pub use firing::strict_inconsistency;
pub use moves::{
    apply_move, enabled_moves, refute_defeasible, refute_strict, replay, step_defeasible,
    step_strict, support, Move, MoveKind,
};
pub use predicates::{
    is_applicable, is_consumable, is_discarded, is_sequence_applicable, is_sequence_consumable,
    is_sequence_discarded,
};
pub use state::{DerivationState, DerivationStep, Justification, Tag};

use crate::literal::Literal;
use crate::rule::Label;
use thiserror::Error;

/// The proof strength parameter: strict (Δ), defeasible (∂), or support
/// (σ). Strict proofs count only strict premises; defeasible proofs also
/// accept strict ones; support additionally accepts supported premises and
/// ignores consumption entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Strict,
    Defeasible,
    Support,
}

impl Mode {
    /// The tag a positive step of this mode carries.
    pub(crate) fn proven_tag(self) -> Tag {
        match self {
            Mode::Strict => Tag::StrictProven,
            Mode::Defeasible => Tag::DefeasiblyProven,
            Mode::Support => Tag::Supported,
        }
    }

    /// The refutation tag that discards a premise of this mode.
    pub(crate) fn refutation_tag(self) -> Tag {
        match self {
            Mode::Strict => Tag::StrictRefuted,
            Mode::Defeasible | Mode::Support => Tag::DefeasiblyRefuted,
        }
    }

    /// Whether a resource instance with `tag` counts as a proof here.
    pub(crate) fn accepts_instance(self, tag: Tag) -> bool {
        match self {
            Mode::Strict => tag == Tag::StrictProven,
            Mode::Defeasible | Mode::Support => {
                tag == Tag::StrictProven || tag == Tag::DefeasiblyProven
            }
        }
    }
}

/// Why a step operation could not apply; surfaced by the CLI `explain`
/// command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailReason {
    /// The literal is a fact and cannot be strictly refuted.
    IsFact,
    /// Not a fact and no strict rule for the literal is consumable.
    NoConsumableStrictRule,
    /// No strict or defeasible rule for the literal is consumable.
    NoConsumableRule,
    /// The literal appears only at a non-initial position of a sequence
    /// head; it can only be produced together with its predecessors.
    AdjacencyViolation,
    /// The strict complement is proven.
    StrictOppositeProven,
    /// The strict complement could not be refuted first.
    StrictOppositeNotRefuted(Literal),
    /// An attacker is neither discarded nor beaten by a consumable
    /// superior team member.
    UndefeatedAttacker(Label),
    /// A winning team exists but its premises cannot be jointly consumed.
    TeamConsumptionInfeasible,
    /// The target itself is already refuted at this strength.
    TargetRefuted,
    /// The target itself is already proven, so refuting it would break
    /// coherence.
    TargetProven,
    /// A consumable strict rule for the literal blocks strict refutation.
    ConsumableRuleBlocks(Label),
    /// Defeasible refutation requires the strict refutation first.
    StrictRefutationMissing,
    /// A rule for the literal is neither discarded nor attacked by an
    /// undefeated support-applicable rule for the complement.
    UndefeatedSupport(Label),
    /// No support-applicable undefeated rule for the literal.
    NoSupportingRule,
}

impl std::fmt::Display for FailReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailReason::IsFact => write!(f, "the literal is a fact"),
            FailReason::NoConsumableStrictRule => {
                write!(f, "not a fact and no consumable strict rule")
            }
            FailReason::NoConsumableRule => write!(f, "no consumable rule"),
            FailReason::AdjacencyViolation => write!(
                f,
                "only producible inside a sequence head, immediately after its predecessor"
            ),
            FailReason::StrictOppositeProven => write!(f, "the complement is strictly proven"),
            FailReason::StrictOppositeNotRefuted(q) => {
                write!(f, "the complement {q} is not strictly refuted")
            }
            FailReason::UndefeatedAttacker(s) => {
                write!(f, "attacker {s} not discarded and no consumable superior team member")
            }
            FailReason::TeamConsumptionInfeasible => {
                write!(f, "winning team premises cannot be consumed together")
            }
            FailReason::TargetRefuted => write!(f, "the literal is already refuted"),
            FailReason::TargetProven => write!(f, "the literal is already proven"),
            FailReason::ConsumableRuleBlocks(r) => {
                write!(f, "strict rule {r} is consumable and blocks refutation")
            }
            FailReason::StrictRefutationMissing => {
                write!(f, "the strict refutation has not been established")
            }
            FailReason::UndefeatedSupport(r) => {
                write!(f, "rule {r} is neither discarded nor attacked by undefeated support")
            }
            FailReason::NoSupportingRule => {
                write!(f, "no applicable undefeated rule for the literal")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("wrong body kind: rule {rule} does not have a {expected} body")]
    WrongBodyKind {
        rule: Label,
        expected: &'static str,
    },
    #[error("no step with index {index}")]
    NoSuchStep { index: u32 },
    #[error("step {index} is not an unconsumed resource instance")]
    NotAnInstance { index: u32 },
    #[error("instance already consumed: step {index}")]
    AlreadyConsumed { index: u32 },
    #[error("consumed instances must precede the consuming step (step {index})")]
    ConsumptionOrder { index: u32 },
    #[error("coherence violation: {tag} {literal} conflicts with the opposite tag already derived")]
    Coherence { literal: Literal, tag: Tag },
    #[error("strict inconsistency: both {literal} and its complement are strictly provable")]
    InconsistentStrict { literal: Literal },
    #[error("{target} is not derivable: {reason}")]
    NotDerivable { target: Literal, reason: FailReason },
    #[error("{target} is not refutable: {reason}")]
    NotRefutable { target: Literal, reason: FailReason },
    #[error("{target} is not supportable: {reason}")]
    NotSupportable { target: Literal, reason: FailReason },
    #[error("trace replay diverged at step {index}: {detail}")]
    ReplayMismatch { index: u32, detail: String },
}
