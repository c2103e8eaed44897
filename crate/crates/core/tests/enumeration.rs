//! Extension enumeration, canonicalization, deterministic derivation,
//! and ranking.

mod common;

use common::*;
use rsdl_core::{
    canonicalize, derive_deterministic, enumerate_extensions, enumerate_with_workers,
    rank_extensions, refute_defeasible, refute_strict, replay, step_defeasible, CostMap, Tag,
    Theory,
};

#[test]
fn vending_has_exactly_one_extension() {
    let exts = enumerate_extensions(&theory(VENDING));
    assert_eq!(exts.len(), 1);
    let ext = &exts[0];
    assert_eq!(ext.proven_count(&lit("cola"), Tag::DefeasiblyProven), 1);
    assert_eq!(ext.consumed_count(&lit("cola")), 0);
    assert_eq!(ext.consumed_count(&lit("dollar")), 1);
    assert!(ext.is_refuted(&lit("outOfOrder"), Tag::DefeasiblyRefuted));
    assert!(ext.is_refuted(&lit("off"), Tag::DefeasiblyRefuted));
    assert!(!ext.cyclic);
}

#[test]
fn vending_when_off_refutes_both_sides_and_keeps_the_dollar() {
    let exts = enumerate_extensions(&corpus_theory("vending_off.rsdl"));
    assert_eq!(exts.len(), 1);
    let ext = &exts[0];
    assert!(ext.is_refuted(&lit("cola"), Tag::DefeasiblyRefuted));
    assert!(ext.is_refuted(&lit("~cola"), Tag::DefeasiblyRefuted));
    assert_eq!(ext.consumed_count(&lit("dollar")), 0);
    assert_eq!(ext.proven_count(&lit("cola"), Tag::DefeasiblyProven), 0);
}

#[test]
fn resource_competition_gives_two_extensions() {
    // r1 and r2 compete for the single b.
    let t = theory("fact a. fact b. r1: b => c. r2: b => d.");
    let exts = enumerate_extensions(&t);
    assert_eq!(exts.len(), 2);
    let with_c = exts
        .iter()
        .find(|e| e.proven_count(&lit("c"), Tag::DefeasiblyProven) == 1)
        .expect("one extension proves c");
    assert_eq!(with_c.consumed_count(&lit("b")), 1);
    assert_eq!(with_c.consumed_count(&lit("a")), 0);
    assert_eq!(with_c.proven_count(&lit("d"), Tag::DefeasiblyProven), 0);
    // the starved rule still supports its head
    assert!(with_c.supported.contains(&lit("d")));
    let with_d = exts
        .iter()
        .find(|e| e.proven_count(&lit("d"), Tag::DefeasiblyProven) == 1)
        .expect("one extension proves d");
    assert!(with_d.supported.contains(&lit("c")));
}

#[test]
fn concurrent_production_yields_two_instances_in_one_extension() {
    let exts = enumerate_extensions(&corpus_theory("pizza.rsdl"));
    assert_eq!(exts.len(), 1);
    assert_eq!(
        exts[0].proven_count(&lit("pizza"), Tag::DefeasiblyProven),
        2
    );
}

#[test]
fn team_defeater_theory_has_one_extension_with_the_paper_ledger() {
    let exts = enumerate_extensions(&theory(TEAM));
    assert_eq!(exts.len(), 1);
    let ext = &exts[0];
    assert_eq!(ext.proven_count(&lit("d"), Tag::DefeasiblyProven), 1);
    assert_eq!(ext.proven_count(&lit("e"), Tag::DefeasiblyProven), 1);
    assert_eq!(ext.consumed_count(&lit("a")), 1);
    assert_eq!(ext.consumed_count(&lit("b")), 1);
    assert_eq!(ext.consumed_count(&lit("c")), 0);
}

#[test]
fn interleavings_and_instance_choices_canonicalize_equally() {
    // two independent refutations in either order
    let t = theory("fact a. r: p => q.");
    let s1 = refute_strict(&init(&t), &lit("p")).unwrap();
    let s1 = refute_strict(&s1, &lit("q")).unwrap();
    let s2 = refute_strict(&init(&t), &lit("q")).unwrap();
    let s2 = refute_strict(&s2, &lit("p")).unwrap();
    assert_eq!(canonicalize(&s1), canonicalize(&s2));

    // consuming either same-tick instance is the same extension
    let t = theory("fact a. fact a. r: a => b.");
    let base = init(&t);
    let moves: Vec<_> = rsdl_core::enabled_moves(&base)
        .into_iter()
        .filter(|m| m.kind == rsdl_core::MoveKind::DefeasibleStep && m.target == lit("b"))
        .collect();
    assert_eq!(moves.len(), 1); // merged by symmetry
    let fired = rsdl_core::apply_move(&base, &moves[0]).unwrap();
    let manual = base.consume(&[2], 3).unwrap();
    // different literal choices stay distinct
    assert_ne!(canonicalize(&fired), canonicalize(&manual));
}

#[test]
fn deterministic_derivation_is_a_member_of_the_enumeration() {
    for text in [
        VENDING,
        TEAM,
        MULTI_HEAD,
        "fact a. fact b. r1: b => c. r2: b => d.",
    ] {
        let t = theory(text);
        let det = derive_deterministic(&t);
        let exts = enumerate_extensions(&t);
        assert!(
            exts.contains(&det),
            "deterministic branch missing from enumeration for {text}"
        );
    }
}

#[test]
fn deterministic_tie_break_prefers_the_lexicographically_first_rule() {
    let t = theory("fact a. fact b. r1: b => c. r2: b => d.");
    let det = derive_deterministic(&t);
    assert_eq!(det.proven_count(&lit("c"), Tag::DefeasiblyProven), 1);
    assert_eq!(det.proven_count(&lit("d"), Tag::DefeasiblyProven), 0);
}

#[test]
fn empty_theory_has_the_empty_extension() {
    let exts = enumerate_extensions(&Theory::empty());
    assert_eq!(exts.len(), 1);
    assert!(exts[0].proven.is_empty());
    assert!(exts[0].refuted.is_empty());
    let det = derive_deterministic(&Theory::empty());
    assert_eq!(det, exts[0]);
}

#[test]
fn login_retry_terminates_with_a_cyclic_extension() {
    let exts = enumerate_extensions(&corpus_theory("login_retry.rsdl"));
    assert!(!exts.is_empty());
    assert!(exts.iter().all(|e| e.cyclic));
    for e in &exts {
        assert!(e.trace.len() <= 1000);
    }
}

#[test]
fn self_consuming_rule_is_pruned_as_cyclic() {
    let t = theory("fact a. r: a => a.");
    let exts = enumerate_extensions(&t);
    assert!(exts.iter().any(|e| e.cyclic));
}

#[test]
fn worker_counts_do_not_change_the_result() {
    for text in [VENDING, TEAM, SEQUENCE, "fact a. fact b. r1: b => c. r2: b => d."] {
        let t = theory(text);
        let one = enumerate_with_workers(&t, 1);
        let two = enumerate_with_workers(&t, 2);
        let four = enumerate_with_workers(&t, 4);
        assert_eq!(one, two);
        assert_eq!(one, four);
    }
}

#[test]
fn strict_inconsistency_surfaces_as_an_error_extension() {
    let t = theory("fact a. fact b. r1: a -> p. r2: b -> ~p.");
    let exts = enumerate_extensions(&t);
    assert_eq!(exts.len(), 1);
    assert_eq!(exts[0].inconsistent, Some(lit("p")));
}

#[test]
fn traces_replay_through_the_engine() {
    for text in [VENDING, TEAM, SEQUENCE, MULTI_HEAD] {
        let t = theory(text);
        for ext in enumerate_extensions(&t) {
            let replayed = replay(&t, &ext.trace).expect("trace replays");
            assert_eq!(replayed.steps(), ext.trace.as_slice());
        }
    }
}

#[test]
fn sequence_theory_enumerates_firing_and_discarding_branches() {
    let exts = enumerate_extensions(&theory(SEQUENCE));
    assert_eq!(exts.len(), 2);
    let fired = exts
        .iter()
        .find(|e| e.proven_count(&lit("c"), Tag::DefeasiblyProven) == 1)
        .expect("an extension where r0 fired");
    assert_eq!(fired.consumed_count(&lit("a")), 2);
    assert_eq!(fired.consumed_count(&lit("b")), 1);
    let discarded = exts
        .iter()
        .find(|e| e.is_refuted(&lit("c"), Tag::DefeasiblyRefuted))
        .expect("an extension where r0 was discarded");
    assert_eq!(discarded.consumed_count(&lit("a")), 0);
    assert_eq!(discarded.consumed_count(&lit("b")), 0);
}

#[test]
fn ranking_prefers_cheaper_consumption() {
    let t = theory("fact a. fact b. r1: b => c. r2: b => d.");
    let exts = enumerate_extensions(&t);
    // consuming nothing beats consuming something under unit weights
    let idle = theory("fact a.");
    let mut all = enumerate_extensions(&idle);
    all.extend(exts.clone());
    let ranked = rank_extensions(&all, &CostMap::new()).unwrap();
    assert_eq!(ranked[0].1, 0.0);
    assert!(ranked.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn ranking_rejects_negative_weights_and_handles_empty_input() {
    let mut costs = CostMap::new();
    assert!(costs.set(rsdl_core::Atom::new("a"), -1.0).is_err());
    assert!(rank_extensions(&[], &CostMap::new()).unwrap().is_empty());
}

#[test]
fn energy_ranking_is_stable_under_scaling() {
    let t = corpus_theory("energy.rsdl");
    let exts = enumerate_extensions(&t);
    assert_eq!(exts.len(), 3);
    let costs = CostMap::parse(&std::fs::read_to_string(corpus_dir().join("energy.costs")).unwrap())
        .unwrap();
    let ranked = rank_extensions(&exts, &costs).unwrap();
    let order: Vec<&str> = ranked
        .iter()
        .map(|(e, _)| {
            for src in ["solar", "battery", "grid"] {
                if e.consumed_count(&lit(src)) == 1 {
                    return src;
                }
            }
            unreachable!("every extension consumes one source")
        })
        .collect();
    assert_eq!(order, vec!["solar", "battery", "grid"]);
    assert_eq!(ranked[0].1, 0.0);

    let scaled = rank_extensions(&exts, &costs.scaled(7.0)).unwrap();
    let scaled_order: Vec<_> = scaled.iter().map(|(e, _)| e.clone()).collect();
    let base_order: Vec<_> = ranked.iter().map(|(e, _)| e.clone()).collect();
    assert_eq!(scaled_order, base_order);
}

#[test]
fn cyclic_extensions_rank_after_acyclic_ones() {
    let mut exts = enumerate_extensions(&corpus_theory("login_retry.rsdl"));
    exts.extend(enumerate_extensions(&Theory::empty()));
    let ranked = rank_extensions(&exts, &CostMap::new()).unwrap();
    assert!(!ranked[0].0.cyclic);
    assert!(ranked.last().unwrap().0.cyclic);
}

#[test]
fn business_process_delivers_without_exceptions() {
    let exts = enumerate_extensions(&corpus_theory("business_process.rsdl"));
    assert_eq!(exts.len(), 1);
    assert_eq!(
        exts[0].proven_count(&lit("delivered"), Tag::DefeasiblyProven),
        1
    );

    // an exception in evidence blocks delivery: the defeater wins
    let t = theory(
        "fact order. fact feedstock. fact power. fact staff. fact accident.
         run: order, feedstock, power, staff => delivered.
         safety: accident ~> ~delivered.",
    );
    let exts = enumerate_extensions(&t);
    assert_eq!(exts.len(), 1);
    assert_eq!(
        exts[0].proven_count(&lit("delivered"), Tag::DefeasiblyProven),
        0
    );
    // the defeater blocks but never produces
    assert_eq!(
        exts[0].proven_count(&lit("~delivered"), Tag::DefeasiblyProven),
        0
    );
}
