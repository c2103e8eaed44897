//! Per-operation behavior of the derivation engine: applicability,
//! consumability, discard, the step operations, and the move frontier.

mod common;

use common::*;
use rsdl_core::engine::{
    is_applicable, is_consumable, is_discarded, is_sequence_applicable, is_sequence_consumable,
    is_sequence_discarded,
};
use rsdl_core::{
    enabled_moves, refute_defeasible, refute_strict, step_defeasible, step_strict,
    strict_inconsistency, support, EngineError, FailReason, HeadVariant, Mode,
    MoveKind, ReasonerConfig, Tag,
};

#[test]
fn applicability_ignores_consumption_but_consumability_does_not() {
    // F={a}; r1: a => b; r2: a => c — after firing r1, r2 stays
    // applicable but is no longer consumable.
    let t = theory("fact a. r1: a => b. r2: a => c.");
    let state = init(&t);
    let r2 = t.rules().iter().find(|r| r.label.as_str() == "r2").unwrap();

    let fired = step_defeasible(&state, &lit("b")).unwrap();
    assert_eq!(pool_count(&fired, &lit("a")), 0);
    assert!(is_applicable(&fired, r2, Mode::Defeasible).unwrap());
    assert!(!is_consumable(&fired, r2, Mode::Defeasible).unwrap());
}

#[test]
fn vending_applicability() {
    let t = theory(VENDING);
    let state = init(&t);
    let r1 = t.rules().iter().find(|r| r.label.as_str() == "r1").unwrap();
    let r2 = t.rules().iter().find(|r| r.label.as_str() == "r2").unwrap();
    assert!(is_applicable(&state, r1, Mode::Defeasible).unwrap());
    assert!(!is_applicable(&state, r2, Mode::Defeasible).unwrap());
}

#[test]
fn empty_bodies_are_vacuously_applicable_and_never_discarded() {
    let t = theory("r: => b. s: a => c.");
    let state = init(&t);
    let r = t.rules().iter().find(|r| r.label.as_str() == "r").unwrap();
    for mode in [Mode::Strict, Mode::Defeasible, Mode::Support] {
        assert!(is_applicable(&state, r, mode).unwrap());
    }
    assert!(is_consumable(&state, r, Mode::Defeasible).unwrap());
    assert!(!is_discarded(&state, r, Mode::Defeasible).unwrap());
}

#[test]
fn multiplicity_counts_instances() {
    // body {a, a}: one pooled instance is not enough, two are.
    let one = theory("fact a. r: a, a => b.");
    let r = one.rules()[0].clone();
    assert!(!is_consumable(&init(&one), &r, Mode::Defeasible).unwrap());

    let two = theory("fact a. fact a. r: a, a => b.");
    let r = two.rules()[0].clone();
    let state = init(&two);
    assert!(is_consumable(&state, &r, Mode::Defeasible).unwrap());
    let fired = step_defeasible(&state, &lit("b")).unwrap();
    assert_eq!(pool_count(&fired, &lit("a")), 0);
}

#[test]
fn discard_is_three_valued() {
    let t = theory(VENDING);
    let state = init(&t);
    let r2 = t.rules().iter().find(|r| r.label.as_str() == "r2").unwrap();
    // undetermined: neither applicable nor discarded
    assert!(!is_applicable(&state, r2, Mode::Defeasible).unwrap());
    assert!(!is_discarded(&state, r2, Mode::Defeasible).unwrap());

    let state = refute_strict(&state, &lit("outOfOrder")).unwrap();
    let state = refute_defeasible(&state, &lit("outOfOrder")).unwrap();
    assert!(is_discarded(&state, r2, Mode::Defeasible).unwrap());
}

#[test]
fn predicates_reject_the_wrong_body_kind() {
    let t = theory(SEQUENCE);
    let state = init(&t);
    let seq_rule = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    let multi_rule = t.rules().iter().find(|r| r.label.as_str() == "r1").unwrap();
    assert!(matches!(
        is_applicable(&state, seq_rule, Mode::Defeasible),
        Err(EngineError::WrongBodyKind { .. })
    ));
    assert!(matches!(
        is_sequence_applicable(&state, multi_rule, Mode::Defeasible),
        Err(EngineError::WrongBodyKind { .. })
    ));
}

/// Drives the sequence corpus theory through one producer order.
fn produce(order: &[&str]) -> rsdl_core::DerivationState {
    let t = theory(SEQUENCE);
    let mut state = init(&t);
    for atom in order {
        state = step_defeasible(&state, &lit(atom)).unwrap();
    }
    state
}

#[test]
fn sequence_order_a_b_a_is_legit() {
    let t = theory(SEQUENCE);
    let r0 = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    let state = produce(&["a", "b", "a"]);
    assert!(is_sequence_applicable(&state, r0, Mode::Defeasible).unwrap());
    assert!(is_sequence_consumable(&state, r0, Mode::Defeasible).unwrap());
    assert!(!is_sequence_discarded(&state, r0, Mode::Defeasible).unwrap());
    let state = step_defeasible(&state, &lit("c")).unwrap();
    assert!(has(&state, "c", Tag::DefeasiblyProven));
}

#[test]
fn sequence_order_a_a_b_is_discarded() {
    let t = theory(SEQUENCE);
    let r0 = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    let state = produce(&["a", "a", "b"]);
    assert!(!is_sequence_applicable(&state, r0, Mode::Defeasible).unwrap());
    assert!(is_sequence_discarded(&state, r0, Mode::Defeasible).unwrap());
}

#[test]
fn sequence_order_b_a_a_is_discarded() {
    let t = theory(SEQUENCE);
    let r0 = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    let state = produce(&["b", "a", "a"]);
    assert!(!is_sequence_applicable(&state, r0, Mode::Defeasible).unwrap());
    assert!(is_sequence_discarded(&state, r0, Mode::Defeasible).unwrap());
}

#[test]
fn sequence_stays_undetermined_while_a_producer_lives() {
    let t = theory(SEQUENCE);
    let r0 = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    // a then b: the second a can still arrive through the live producer.
    let state = produce(&["a", "b"]);
    assert!(!is_sequence_applicable(&state, r0, Mode::Defeasible).unwrap());
    assert!(!is_sequence_discarded(&state, r0, Mode::Defeasible).unwrap());
}

#[test]
fn sequence_discarded_by_refuted_premise() {
    let t = theory("r0: a; b => c. r1: go => a.");
    let state = init(&t);
    let r0 = t.rules().iter().find(|r| r.label.as_str() == "r0").unwrap();
    let state = refute_strict(&state, &lit("b")).unwrap();
    let state = refute_defeasible(&state, &lit("b")).unwrap();
    assert!(is_sequence_discarded(&state, r0, Mode::Defeasible).unwrap());
}

#[test]
fn facts_are_simultaneous_for_sequence_matching() {
    // both premises are facts: no strict order between them, so the
    // sequence body is not applicable.
    let t = theory("fact a. fact b. r: a; b => c.");
    let r = t.rules()[0].clone();
    assert!(!is_sequence_applicable(&init(&t), &r, Mode::Defeasible).unwrap());

    // derived b arrives after the fact a: applicable.
    let t = theory("fact a. fact go. r: a; b => c. s: go => b.");
    let r = t.rules().iter().find(|r| r.label.as_str() == "r").unwrap();
    let state = step_defeasible(&init(&t), &lit("b")).unwrap();
    assert!(is_sequence_applicable(&state, r, Mode::Defeasible).unwrap());
}

#[test]
fn step_strict_fires_and_consumes() {
    let t = theory("fact a. r: a -> b.");
    let state = step_strict(&init(&t), &lit("b")).unwrap();
    assert!(has(&state, "b", Tag::StrictProven));
    assert_eq!(pool_count(&state, &lit("a")), 0);
    assert_eq!(consumed_count(&state, &lit("a")), 1);
}

#[test]
fn step_strict_without_rules_or_facts_fails() {
    let t = theory("fact a.");
    assert!(matches!(
        step_strict(&init(&t), &lit("b")),
        Err(EngineError::NotDerivable { .. })
    ));
    // facts are established at init; requesting one is a no-op
    let state = step_strict(&init(&t), &lit("a")).unwrap();
    assert_eq!(state.len(), 1);
}

#[test]
fn sequence_heads_emit_in_order_and_tail_positions_are_not_directly_derivable() {
    let t = theory("fact a. r: a -> b; c.");
    let state = step_strict(&init(&t), &lit("b")).unwrap();
    let steps = state.steps();
    let b = steps.iter().find(|s| s.literal == lit("b")).unwrap();
    let c = steps.iter().find(|s| s.literal == lit("c")).unwrap();
    assert_eq!(b.tag, Tag::StrictProven);
    assert_eq!(c.tag, Tag::StrictProven);
    assert_eq!(c.index, b.index + 1);
    assert_eq!(c.time(), b.time() + 1);
    assert_eq!(b.event(), c.event());

    assert!(matches!(
        step_strict(&init(&t), &lit("c")),
        Err(EngineError::NotDerivable {
            reason: FailReason::AdjacencyViolation,
            ..
        })
    ));
}

#[test]
fn refute_strict_scans_rules() {
    let t = theory(VENDING);
    let state = refute_strict(&init(&t), &lit("outOfOrder")).unwrap();
    assert!(has(&state, "outOfOrder", Tag::StrictRefuted));
    assert_eq!(state.pool().count(), 1); // refutations consume nothing

    // facts are not refutable
    assert!(matches!(
        refute_strict(&init(&t), &lit("dollar")),
        Err(EngineError::NotRefutable {
            reason: FailReason::IsFact,
            ..
        })
    ));

    // a consumable strict rule blocks refutation
    let t = theory("fact a. r: a -> p.");
    assert!(matches!(
        refute_strict(&init(&t), &lit("p")),
        Err(EngineError::NotRefutable {
            reason: FailReason::ConsumableRuleBlocks(_),
            ..
        })
    ));
}

#[test]
fn strict_refutation_survives_consumption_of_premises() {
    // after a -> p fires, the spent premise still blocks -Δp: its proven
    // occurrence keeps the rule from being non-consumable.
    let t = theory("fact a. r: a -> p. s: a -> q.");
    let state = step_strict(&init(&t), &lit("p")).unwrap();
    assert!(matches!(
        refute_strict(&state, &lit("q")),
        Err(EngineError::NotRefutable { .. })
    ));
}

#[test]
fn vending_defeasible_step_consumes_the_dollar() {
    let t = theory(VENDING);
    let mut state = init(&t);
    for q in ["outOfOrder", "off"] {
        state = refute_strict(&state, &lit(q)).unwrap();
        state = refute_defeasible(&state, &lit(q)).unwrap();
    }
    let state = step_defeasible(&state, &lit("cola")).unwrap();
    assert!(has(&state, "cola", Tag::DefeasiblyProven));
    assert!(has(&state, "~cola", Tag::StrictRefuted)); // auto-refutation
    assert_eq!(consumed_count(&state, &lit("dollar")), 1);
}

#[test]
fn undefeated_attacker_blocks_the_step() {
    let t = theory("fact dollar. fact off. r1: dollar => cola. r3: off => ~cola.");
    let err = step_defeasible(&init(&t), &lit("cola")).unwrap_err();
    assert!(matches!(
        err,
        EngineError::NotDerivable {
            reason: FailReason::UndefeatedAttacker(_),
            ..
        }
    ));
}

#[test]
fn team_defeater_consumes_only_the_winning_team() {
    let t = theory(TEAM);
    let state = step_defeasible(&init(&t), &lit("d")).unwrap();
    assert!(has(&state, "d", Tag::DefeasiblyProven));
    // only b is consumed; a and c stay available
    assert_eq!(consumed_count(&state, &lit("b")), 1);
    assert_eq!(pool_count(&state, &lit("a")), 1);
    assert_eq!(pool_count(&state, &lit("c")), 1);

    // a is still available and yields e through r1
    let state = step_defeasible(&state, &lit("e")).unwrap();
    assert!(has(&state, "e", Tag::DefeasiblyProven));
    assert_eq!(consumed_count(&state, &lit("a")), 1);
    assert_eq!(pool_count(&state, &lit("c")), 1);
}

#[test]
fn strict_conclusions_inherit_defeasibly_without_consumption() {
    let t = theory("fact q.");
    let state = step_defeasible(&init(&t), &lit("q")).unwrap();
    assert!(has(&state, "q", Tag::DefeasiblyProven));
    assert_eq!(state.pool().count(), 1); // no new instance, nothing spent
    let again = step_defeasible(&state, &lit("q")).unwrap();
    assert_eq!(again.len(), state.len()); // at most one restatement
}

#[test]
fn multiset_head_per_literal_emits_the_unblocked_members() {
    let t = theory(MULTI_HEAD);
    assert_eq!(t.config().head_variant, HeadVariant::PerLiteral);
    let state = step_defeasible(&init(&t), &lit("b")).unwrap();
    assert!(has(&state, "b", Tag::DefeasiblyProven));
    assert!(has(&state, "d", Tag::DefeasiblyProven));
    assert!(!has(&state, "c", Tag::DefeasiblyProven));
    assert_eq!(consumed_count(&state, &lit("a")), 1);
    // concurrent emissions share a tick
    let b = state.steps().iter().find(|s| s.literal == lit("b") && s.tag.is_proven()).unwrap();
    let d = state.steps().iter().find(|s| s.literal == lit("d") && s.tag.is_proven()).unwrap();
    assert_eq!(b.time(), d.time());
}

#[test]
fn multiset_head_whole_head_blocks_everything() {
    let config = ReasonerConfig {
        head_variant: HeadVariant::WholeHead,
        ..ReasonerConfig::default()
    };
    let t = theory_with(MULTI_HEAD, config);
    for q in ["b", "c", "d"] {
        assert!(step_defeasible(&init(&t), &lit(q)).is_err());
    }
}

#[test]
fn mutual_attack_refutes_both_sides() {
    let t = theory("fact a. fact b. r1: a => p. r2: b => ~p.");
    let mut state = init(&t);
    for q in ["p", "~p"] {
        state = refute_strict(&state, &lit(q)).unwrap();
    }
    let state = refute_defeasible(&state, &lit("p")).unwrap();
    let state = refute_defeasible(&state, &lit("~p")).unwrap();
    assert!(has(&state, "p", Tag::DefeasiblyRefuted));
    assert!(has(&state, "~p", Tag::DefeasiblyRefuted));
    assert_eq!(state.pool().count(), 2); // nothing consumed
}

#[test]
fn refutation_of_ruleless_literals_and_strict_opposites() {
    // no rules, not a fact: -∂ after -Δ
    let t = theory("fact a. r: a => b.");
    let state = refute_strict(&init(&t), &lit("c")).unwrap();
    let state = refute_defeasible(&state, &lit("c")).unwrap();
    assert!(has(&state, "c", Tag::DefeasiblyRefuted));

    // +Δ~q forces -∂q even with rules for q around
    let t = theory("fact p. r: a => ~p.");
    let state = refute_strict(&init(&t), &lit("~p")).unwrap();
    let state = refute_defeasible(&state, &lit("~p")).unwrap();
    assert!(has(&state, "~p", Tag::DefeasiblyRefuted));
}

#[test]
fn refute_defeasible_requires_the_strict_refutation_first() {
    let t = theory("fact a. r: a => b.");
    assert!(matches!(
        refute_defeasible(&init(&t), &lit("c")),
        Err(EngineError::NotRefutable {
            reason: FailReason::StrictRefutationMissing,
            ..
        })
    ));
}

#[test]
fn support_holds_after_the_resources_are_spent() {
    let t = theory("fact a. r1: a => b. r2: a => c.");
    let state = step_defeasible(&init(&t), &lit("b")).unwrap();
    // +∂c is out of reach but +σc holds
    assert!(step_defeasible(&state, &lit("c")).is_err());
    let state = support(&state, &lit("c")).unwrap();
    assert!(has(&state, "c", Tag::Supported));
    assert_eq!(state.pool().count(), 1); // support consumes nothing
}

#[test]
fn support_from_strict_proof_and_blocked_by_superior_attacker() {
    let t = theory("fact q.");
    let state = support(&init(&t), &lit("q")).unwrap();
    assert!(has(&state, "q", Tag::Supported));

    let t = theory("fact a. fact b. r: a => q. s: b => ~q. s > r.");
    assert!(matches!(
        support(&init(&t), &lit("q")),
        Err(EngineError::NotSupportable { .. })
    ));
}

#[test]
fn vending_frontier_lists_refutations_then_the_firing() {
    let t = theory(VENDING);
    let state = init(&t);
    let moves = enabled_moves(&state);
    let refutes: Vec<String> = moves
        .iter()
        .filter(|m| m.kind == MoveKind::RefuteStrict)
        .map(|m| m.target.to_string())
        .collect();
    assert!(refutes.contains(&"outOfOrder".to_string()));
    assert!(refutes.contains(&"off".to_string()));
    // kinds are ordered: refutations before firings
    assert!(moves.windows(2).all(|w| w[0].kind <= w[1].kind));

    let mut state = state;
    for q in ["outOfOrder", "off"] {
        state = refute_strict(&state, &lit(q)).unwrap();
        state = refute_defeasible(&state, &lit(q)).unwrap();
    }
    let moves = enabled_moves(&state);
    assert!(moves
        .iter()
        .any(|m| m.kind == MoveKind::DefeasibleStep
            && m.target == lit("cola")
            && m.via.as_deref_label() == Some("r1")));
}

#[test]
fn terminal_states_have_no_moves() {
    let t = theory("");
    assert!(enabled_moves(&init(&t)).is_empty());
}

#[test]
fn same_tick_instances_collapse_to_one_plan() {
    // two fact instances of a share the initial tick; no predicate can
    // tell them apart, so the frontier carries one firing.
    let t = theory("fact a. fact a. r: a => b. s0: a; x => y.");
    let state = init(&t);
    let firings: Vec<_> = enabled_moves(&state)
        .into_iter()
        .filter(|m| m.kind == MoveKind::DefeasibleStep && m.target == lit("b"))
        .collect();
    assert_eq!(firings.len(), 1);
}

#[test]
fn distinct_tick_instances_are_distinct_plans_under_sequence_bodies() {
    // the second a arrives later; with a sequence body in the theory the
    // choice of instance matters, so both plans are offered.
    let t = theory("fact a. fact go. p: go => a. r: a => b. s0: a; x => y.");
    let state = init(&t);
    let fire_p = enabled_moves(&state)
        .into_iter()
        .find(|m| m.kind == MoveKind::DefeasibleStep && m.target == lit("a"))
        .unwrap();
    let state = rsdl_core::apply_move(&state, &fire_p).unwrap();
    let firings: Vec<_> = enabled_moves(&state)
        .into_iter()
        .filter(|m| m.kind == MoveKind::DefeasibleStep && m.target == lit("b"))
        .collect();
    assert_eq!(firings.len(), 2);
}

#[test]
fn strict_inconsistency_is_detected_and_poisons_the_step() {
    let t = theory("fact a. fact b. r1: a -> p. r2: b -> ~p.");
    let state = init(&t);
    assert_eq!(strict_inconsistency(&state), None);
    let state = step_strict(&state, &lit("p")).unwrap();
    assert_eq!(strict_inconsistency(&state), Some(lit("p")));
    assert!(matches!(
        step_strict(&state, &lit("~p")),
        Err(EngineError::InconsistentStrict { .. })
    ));
}

trait LabelStr {
    fn as_deref_label(&self) -> Option<&str>;
}

impl LabelStr for Option<rsdl_core::Label> {
    fn as_deref_label(&self) -> Option<&str> {
        self.as_ref().map(|l| l.as_str())
    }
}
