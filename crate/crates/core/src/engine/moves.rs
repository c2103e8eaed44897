//! Step operations and the move frontier.
//!
//! A move reifies one application of a proof condition: a refutation, a
//! support step, or a rule firing with a resolved consumption plan.
//! `enabled_moves` lists every move that would succeed in the current
//! state (omitting strict firings that would expose an inconsistency,
//! which are surfaced through [`strict_inconsistency`] instead, and
//! restatements of strict conclusions as defeasible ones, which change no
//! resource and are available through [`step_defeasible`] directly).

use std::cmp::Ordering;
use std::sync::Arc;

use crate::engine::firing::{
    defeasible_firings, strict_firings, strict_refutable, EmitTiming, Firing,
};
use crate::engine::predicates::{applicable, discarded, View};
use crate::engine::state::{DerivationState, DerivationStep, Justification, Tag};
use crate::engine::{EngineError, FailReason, Mode};
use crate::literal::Literal;
use crate::rule::{Label, Rule, RuleHead, RuleKind};
use crate::theory::{RuleSelector, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    RefuteStrict,
    RefuteDefeasible,
    StrictStep,
    DefeasibleStep,
    SupportStep,
}

/// One applicable derivation step, with its consumption plan resolved
/// down to instance choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub target: Literal,
    pub via: Option<Label>,
    /// Step indices this move will consume.
    pub plan: Vec<u32>,
    pub(crate) firing: Option<Firing>,
}

impl Move {
    fn simple(kind: MoveKind, target: Literal) -> Move {
        Move {
            kind,
            target,
            via: None,
            plan: Vec::new(),
            firing: None,
        }
    }

    fn from_firing(firing: Firing) -> Move {
        Move {
            kind: match firing.mode {
                Mode::Strict => MoveKind::StrictStep,
                _ => MoveKind::DefeasibleStep,
            },
            target: firing.emissions[0].clone(),
            via: Some(firing.rule.clone()),
            plan: firing.plan.clone(),
            firing: Some(firing),
        }
    }
}

/// Deterministic move order: refutations, then strict and defeasible
/// firings, then support, tie-broken by target, rule label, and plan.
fn sort_moves(theory: &Theory, moves: &mut Vec<Move>) {
    moves.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| match (&a.via, &b.via) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(x), Some(y)) => theory.config().tie_break.cmp_labels(x, y),
            })
            .then_with(|| a.plan.cmp(&b.plan))
    });
}

/// Appends one failure-scan step.
fn append_scan(state: &DerivationState, tag: Tag, literal: Literal) -> DerivationState {
    let mut next = state.clone();
    let event = next.alloc_event();
    let time = next.alloc_time();
    next.append(
        tag,
        literal,
        Justification::FailureScan,
        Vec::new(),
        time,
        event,
        false,
    );
    next
}

/// Applies a resolved firing: automatic strict refutations first, then
/// consumption at the anchor step, then the emissions.
fn apply_firing(state: &DerivationState, firing: &Firing) -> Result<DerivationState, EngineError> {
    let mut next = state.clone();
    let event = next.alloc_event();

    for q in &firing.auto_refute {
        if next.has(q, Tag::StrictRefuted) {
            continue;
        }
        let view = View::new(&next);
        strict_refutable(&view, q).map_err(|_| EngineError::NotDerivable {
            target: q.complement(),
            reason: FailReason::StrictOppositeNotRefuted(q.clone()),
        })?;
        let time = next.alloc_time();
        next.append(
            Tag::StrictRefuted,
            q.clone(),
            Justification::FailureScan,
            Vec::new(),
            time,
            event,
            false,
        );
    }

    match firing.mode {
        Mode::Strict => {
            for (i, p) in firing.emissions.iter().enumerate() {
                let opposite = p.complement();
                if next.has(&opposite, Tag::StrictProven)
                    || firing.emissions[i + 1..].contains(&opposite)
                {
                    let literal = if p.is_positive() { p.clone() } else { opposite };
                    return Err(EngineError::InconsistentStrict { literal });
                }
                if next.has(p, Tag::StrictRefuted) {
                    return Err(EngineError::Coherence {
                        literal: p.clone(),
                        tag: Tag::StrictProven,
                    });
                }
            }
        }
        Mode::Defeasible => {
            for p in &firing.emissions {
                if next.has(p, Tag::DefeasiblyRefuted) {
                    return Err(EngineError::Coherence {
                        literal: p.clone(),
                        tag: Tag::DefeasiblyProven,
                    });
                }
                if !next.has(&p.complement(), Tag::StrictRefuted) {
                    return Err(EngineError::NotDerivable {
                        target: p.clone(),
                        reason: FailReason::StrictOppositeNotRefuted(p.complement()),
                    });
                }
            }
        }
        Mode::Support => unreachable!("support steps are not firings"),
    }

    let anchor = next.len() as u32 + 1;
    next.consume_in_place(&firing.plan, anchor)?;
    let tag = firing.mode.proven_tag();
    let justification = Justification::Rule(firing.rule.clone());
    match firing.timing {
        EmitTiming::Single | EmitTiming::Simultaneous => {
            let time = next.alloc_time();
            for (i, p) in firing.emissions.iter().enumerate() {
                let consumed_from = if i == 0 { firing.plan.clone() } else { Vec::new() };
                next.append(tag, p.clone(), justification.clone(), consumed_from, time, event, true);
            }
        }
        EmitTiming::Consecutive => {
            for (i, p) in firing.emissions.iter().enumerate() {
                let time = next.alloc_time();
                let consumed_from = if i == 0 { firing.plan.clone() } else { Vec::new() };
                next.append(tag, p.clone(), justification.clone(), consumed_from, time, event, true);
            }
        }
    }
    Ok(next)
}

/// Rules of the given kinds that can emit `q` first: single heads equal
/// to `q`, sequence heads starting with `q`, multiset heads containing
/// it.
fn emitting_candidates<'a>(
    theory: &'a Theory,
    q: &Literal,
    strict_only: bool,
) -> Vec<&'a Rule> {
    let mut rules: Vec<&Rule> = theory
        .rules()
        .iter()
        .filter(|r| match (strict_only, r.kind) {
            (true, RuleKind::Strict) => true,
            (false, RuleKind::Strict | RuleKind::Defeasible) => true,
            _ => false,
        })
        .filter(|r| match &r.head {
            RuleHead::Single(p) => p == q,
            RuleHead::Sequence(items) => &items[0] == q,
            RuleHead::Multiset(items) => items.contains(q),
        })
        .collect();
    rules.sort_by(|a, b| theory.config().tie_break.cmp_labels(&a.label, &b.label));
    rules
}

/// True when `q` occurs in some eligible head but only at a non-initial
/// sequence position, which makes it underivable on its own.
fn only_tail_position(theory: &Theory, q: &Literal, strict_only: bool) -> bool {
    let mut seen = false;
    for r in theory.rules() {
        let kind_ok = match (strict_only, r.kind) {
            (true, RuleKind::Strict) => true,
            (false, RuleKind::Strict | RuleKind::Defeasible) => true,
            _ => false,
        };
        if !kind_ok || !r.head.contains(q) {
            continue;
        }
        seen = true;
        match &r.head {
            RuleHead::Sequence(items) if &items[0] != q => {}
            _ => return false,
        }
    }
    seen
}

/// Derives `+Δ q`: fires the first consumable strict rule emitting `q`
/// (sequence heads emit every position, in order). A fact is already
/// established at the initial state, so the state is returned unchanged.
pub fn step_strict(state: &DerivationState, q: &Literal) -> Result<DerivationState, EngineError> {
    let theory = state.theory().clone();
    let view = View::new(state);
    let instance_sensitive = theory.has_sequence_bodies();
    for rule in emitting_candidates(&theory, q, true) {
        let firings = strict_firings(&view, rule, instance_sensitive);
        if let Some(firing) = firings.first() {
            return apply_firing(state, firing);
        }
    }
    if theory.is_fact(q) {
        return Ok(state.clone());
    }
    let reason = if only_tail_position(&theory, q, true) {
        FailReason::AdjacencyViolation
    } else {
        FailReason::NoConsumableStrictRule
    };
    Err(EngineError::NotDerivable {
        target: q.clone(),
        reason,
    })
}

/// Appends `-Δ q` when `q` is not a fact and every strict rule for it is
/// non-consumable. Refutations consume nothing. Idempotent when the
/// refutation is already recorded.
pub fn refute_strict(state: &DerivationState, q: &Literal) -> Result<DerivationState, EngineError> {
    if state.has(q, Tag::StrictRefuted) {
        return Ok(state.clone());
    }
    let view = View::new(state);
    match strict_refutable(&view, q) {
        Ok(()) => Ok(append_scan(state, Tag::StrictRefuted, q.clone())),
        Err(FailReason::TargetProven) => Err(EngineError::Coherence {
            literal: q.clone(),
            tag: Tag::StrictRefuted,
        }),
        Err(reason) => Err(EngineError::NotRefutable {
            target: q.clone(),
            reason,
        }),
    }
}

/// Derives `+∂ q`. If `+Δ q` is already in the state the defeasible tag
/// is inherited with no consumption; otherwise the first defeasible
/// firing emitting `q` applies, establishing `-Δ ~q` automatically.
pub fn step_defeasible(
    state: &DerivationState,
    q: &Literal,
) -> Result<DerivationState, EngineError> {
    if state.has(q, Tag::DefeasiblyRefuted) {
        return Err(EngineError::Coherence {
            literal: q.clone(),
            tag: Tag::DefeasiblyProven,
        });
    }
    if state.has(q, Tag::StrictProven) {
        // Condition (1): inherit, at most once, as a non-resource step;
        // the strict instance already sits in the pool.
        let restated = state
            .steps()
            .iter()
            .any(|s| s.tag == Tag::DefeasiblyProven && !s.is_resource() && &s.literal == q);
        if restated {
            return Ok(state.clone());
        }
        let justification = state
            .steps()
            .iter()
            .find(|s| s.tag == Tag::StrictProven && &s.literal == q)
            .map(|s| s.justification.clone())
            .unwrap_or(Justification::FailureScan);
        let mut next = state.clone();
        let event = next.alloc_event();
        let time = next.alloc_time();
        next.append(Tag::DefeasiblyProven, q.clone(), justification, Vec::new(), time, event, false);
        return Ok(next);
    }

    let theory = state.theory().clone();
    let view = View::new(state);
    let instance_sensitive = theory.has_sequence_bodies();
    let mut first_reason: Option<FailReason> = None;
    for rule in emitting_candidates(&theory, q, false) {
        match defeasible_firings(&view, rule, instance_sensitive) {
            Ok(firings) => {
                if let Some(firing) = firings.iter().find(|f| f.emissions.contains(q)) {
                    return apply_firing(state, firing);
                }
                // per-literal multiset head that dropped q
                first_reason.get_or_insert(FailReason::UndefeatedAttacker(rule.label.clone()));
            }
            Err(reason) => {
                first_reason.get_or_insert(reason);
            }
        }
    }
    let reason = first_reason.unwrap_or_else(|| {
        if only_tail_position(&theory, q, false) {
            FailReason::AdjacencyViolation
        } else {
            FailReason::NoConsumableRule
        }
    });
    Err(EngineError::NotDerivable {
        target: q.clone(),
        reason,
    })
}

pub(crate) fn refute_defeasible_check(view: &View, q: &Literal) -> Result<(), FailReason> {
    if view.state.has(q, Tag::DefeasiblyProven) || view.state.has(q, Tag::StrictProven) {
        return Err(FailReason::TargetProven);
    }
    if !view.state.has(q, Tag::StrictRefuted) {
        return Err(FailReason::StrictRefutationMissing);
    }
    let opposite = q.complement();
    if view.state.has(&opposite, Tag::StrictProven) {
        return Ok(());
    }
    for rule in view.theory.rules_for(q, RuleSelector::StrictOrDefeasible) {
        if discarded(view, rule, Mode::Defeasible) {
            continue;
        }
        let attacked = view
            .theory
            .rules_for(&opposite, RuleSelector::Any)
            .iter()
            .any(|s| {
                applicable(view, s, Mode::Support)
                    && view
                        .theory
                        .rules_for(q, RuleSelector::Any)
                        .iter()
                        .all(|t| {
                            discarded(view, t, Mode::Defeasible)
                                || !view.theory.superior(&t.label, &s.label)
                        })
            });
        if !attacked {
            return Err(FailReason::UndefeatedSupport(rule.label.clone()));
        }
    }
    Ok(())
}

/// Appends `-∂ q` following the ambiguity-propagating reading: the strict
/// refutation must already be recorded, and either the complement is
/// strictly proven or every rule for `q` is discarded or attacked by an
/// undefeated support-applicable rule for the complement. Consumes
/// nothing.
pub fn refute_defeasible(
    state: &DerivationState,
    q: &Literal,
) -> Result<DerivationState, EngineError> {
    if state.has(q, Tag::DefeasiblyRefuted) {
        return Ok(state.clone());
    }
    let view = View::new(state);
    match refute_defeasible_check(&view, q) {
        Ok(()) => Ok(append_scan(state, Tag::DefeasiblyRefuted, q.clone())),
        Err(FailReason::TargetProven) => Err(EngineError::Coherence {
            literal: q.clone(),
            tag: Tag::DefeasiblyRefuted,
        }),
        Err(reason) => Err(EngineError::NotRefutable {
            target: q.clone(),
            reason,
        }),
    }
}

/// Finds the justification for `+σ q`, if the support conditions hold:
/// `+Δ q`, or an applicable rule for `q` (consumption ignored) none of
/// whose attackers is both undiscarded and superior.
pub(crate) fn support_check(view: &View, q: &Literal) -> Result<Justification, FailReason> {
    if view.state.has(q, Tag::StrictProven) {
        let justification = view
            .state
            .steps()
            .iter()
            .find(|s| s.tag == Tag::StrictProven && &s.literal == q)
            .map(|s| s.justification.clone())
            .unwrap_or(Justification::FailureScan);
        return Ok(justification);
    }
    let opposite = q.complement();
    let mut candidates: Vec<&Rule> = view
        .theory
        .rules_for(q, RuleSelector::StrictOrDefeasible);
    candidates.sort_by(|a, b| view.theory.config().tie_break.cmp_labels(&a.label, &b.label));
    for rule in candidates {
        if !applicable(view, rule, Mode::Support) {
            continue;
        }
        let undefeated = view
            .theory
            .rules_for(&opposite, RuleSelector::Any)
            .iter()
            .all(|s| {
                discarded(view, s, Mode::Defeasible)
                    || !view.theory.superior(&s.label, &rule.label)
            });
        if undefeated {
            return Ok(Justification::Rule(rule.label.clone()));
        }
    }
    Err(FailReason::NoSupportingRule)
}

/// Appends `+σ q`; consumes nothing. Idempotent.
pub fn support(state: &DerivationState, q: &Literal) -> Result<DerivationState, EngineError> {
    if state.has(q, Tag::Supported) {
        return Ok(state.clone());
    }
    let view = View::new(state);
    match support_check(&view, q) {
        Ok(justification) => {
            let mut next = state.clone();
            let event = next.alloc_event();
            let time = next.alloc_time();
            next.append(Tag::Supported, q.clone(), justification, Vec::new(), time, event, false);
            Ok(next)
        }
        Err(reason) => Err(EngineError::NotSupportable {
            target: q.clone(),
            reason,
        }),
    }
}

/// The complete frontier: every move whose step operation succeeds right
/// now, with all distinct consumption plans, in deterministic order.
pub fn enabled_moves(state: &DerivationState) -> Vec<Move> {
    let theory = state.theory().clone();
    let view = View::new(state);
    let instance_sensitive = theory.has_sequence_bodies();
    let mut moves = Vec::new();

    for q in theory.signature() {
        if !state.has(&q, Tag::StrictRefuted) && strict_refutable(&view, &q).is_ok() {
            moves.push(Move::simple(MoveKind::RefuteStrict, q.clone()));
        }
        if !state.has(&q, Tag::DefeasiblyRefuted) && refute_defeasible_check(&view, &q).is_ok() {
            moves.push(Move::simple(MoveKind::RefuteDefeasible, q.clone()));
        }
        if !state.has(&q, Tag::Supported) && support_check(&view, &q).is_ok() {
            moves.push(Move::simple(MoveKind::SupportStep, q.clone()));
        }
    }

    for rule in theory.rules() {
        match rule.kind {
            RuleKind::Strict => {
                for firing in strict_firings(&view, rule, instance_sensitive) {
                    let clashes = firing.emissions.iter().enumerate().any(|(i, p)| {
                        let opposite = p.complement();
                        state.has(&opposite, Tag::StrictProven)
                            || firing.emissions[i + 1..].contains(&opposite)
                    });
                    if !clashes {
                        moves.push(Move::from_firing(firing));
                    }
                }
            }
            RuleKind::Defeasible => {
                if let Ok(firings) = defeasible_firings(&view, rule, instance_sensitive) {
                    moves.extend(firings.into_iter().map(Move::from_firing));
                }
            }
            RuleKind::Defeater => {}
        }
    }

    // Strict rules can also ground defeasible conclusions when their
    // premises are only defeasibly proven.
    for rule in theory.rules() {
        if rule.kind != RuleKind::Strict {
            continue;
        }
        if let Ok(firings) = defeasible_firings(&view, rule, instance_sensitive) {
            moves.extend(firings.into_iter().map(Move::from_firing));
        }
    }

    sort_moves(&theory, &mut moves);
    moves.dedup();
    moves
}

/// Applies one move from [`enabled_moves`].
pub fn apply_move(state: &DerivationState, mv: &Move) -> Result<DerivationState, EngineError> {
    match mv.kind {
        MoveKind::RefuteStrict => refute_strict(state, &mv.target),
        MoveKind::RefuteDefeasible => refute_defeasible(state, &mv.target),
        MoveKind::SupportStep => support(state, &mv.target),
        MoveKind::StrictStep | MoveKind::DefeasibleStep => {
            let firing = mv
                .firing
                .as_ref()
                .expect("firing moves carry their resolved firing");
            apply_firing(state, firing)
        }
    }
}

/// Re-derives a recorded step log from the initial state, verifying every
/// event against the engine. Returns the reconstructed state, which
/// equals the recorded log exactly.
pub fn replay(theory: &Theory, steps: &[DerivationStep]) -> Result<DerivationState, EngineError> {
    let mismatch = |index: u32, detail: &str| EngineError::ReplayMismatch {
        index,
        detail: detail.to_string(),
    };
    let mut state = DerivationState::init(Arc::new(theory.clone()));
    let fact_count = state.len();
    if steps.len() < fact_count {
        return Err(mismatch(0, "trace shorter than the fact block"));
    }
    for (expected, got) in state.steps().iter().zip(&steps[..fact_count]) {
        if expected.index != got.index
            || expected.tag != got.tag
            || expected.literal != got.literal
            || got.justification != Justification::Fact
        {
            return Err(mismatch(got.index, "fact block differs from the theory"));
        }
    }

    let mut i = fact_count;
    while i < steps.len() {
        let event = steps[i].event();
        let mut j = i;
        while j < steps.len() && steps[j].event() == event {
            j += 1;
        }
        let group = &steps[i..j];
        state = replay_event(&state, group)?;
        i = j;
    }

    // Exact reproduction, consumption marks included.
    if state.steps() != steps {
        let index = state
            .steps()
            .iter()
            .zip(steps)
            .find(|(a, b)| a != b)
            .map(|(a, _)| a.index)
            .unwrap_or(steps.len() as u32);
        return Err(mismatch(index, "replayed log differs from the recorded one"));
    }
    Ok(state)
}

fn replay_event(
    state: &DerivationState,
    group: &[DerivationStep],
) -> Result<DerivationState, EngineError> {
    let mismatch = |index: u32, detail: String| EngineError::ReplayMismatch { index, detail };
    let first = &group[0];
    if group.len() == 1 {
        match (first.tag, first.is_resource()) {
            (Tag::StrictRefuted, false) => return refute_strict(state, &first.literal),
            (Tag::DefeasiblyRefuted, false) => return refute_defeasible(state, &first.literal),
            (Tag::Supported, false) => return support(state, &first.literal),
            (Tag::DefeasiblyProven, false) => return step_defeasible(state, &first.literal),
            _ => {}
        }
    }

    // A firing: optional leading failure scans, then emissions justified
    // by one rule.
    let emissions: Vec<&DerivationStep> = group.iter().filter(|s| s.is_resource()).collect();
    let anchor = emissions
        .first()
        .ok_or_else(|| mismatch(first.index, "event has no emissions".to_string()))?;
    let label = match &anchor.justification {
        Justification::Rule(label) => label.clone(),
        other => {
            return Err(mismatch(
                anchor.index,
                format!("emission justified by {other}, expected a rule"),
            ))
        }
    };
    let rule = state
        .theory()
        .rule(&label)
        .cloned()
        .ok_or_else(|| mismatch(anchor.index, format!("unknown rule {label}")))?;
    let mode = match anchor.tag {
        Tag::StrictProven => Mode::Strict,
        Tag::DefeasiblyProven => Mode::Defeasible,
        other => {
            return Err(mismatch(
                anchor.index,
                format!("emission carries tag {other}"),
            ))
        }
    };
    let recorded_emissions: Vec<Literal> =
        emissions.iter().map(|s| s.literal.clone()).collect();
    let recorded_plan = anchor.consumed_from.clone();
    let signature = plan_signature(state, &recorded_plan)
        .ok_or_else(|| mismatch(anchor.index, "plan references unknown steps".to_string()))?;

    let view = View::new(state);
    let candidates = match mode {
        Mode::Strict => strict_firings(&view, &rule, true),
        Mode::Defeasible => defeasible_firings(&view, &rule, true).unwrap_or_default(),
        Mode::Support => unreachable!(),
    };
    let matched = candidates
        .into_iter()
        .find(|f| {
            f.emissions == recorded_emissions
                && plan_signature(state, &f.plan).as_ref() == Some(&signature)
        })
        .ok_or_else(|| {
            mismatch(
                anchor.index,
                format!("no firing of {label} matches the recorded emissions and plan"),
            )
        })?;
    // Same-tick instances are interchangeable; consume exactly the
    // recorded ones so the logs align.
    let firing = Firing {
        plan: recorded_plan,
        ..matched
    };
    apply_firing(state, &firing)
}

/// The consumption plan as (literal, tick) pairs, the identity that
/// matters for matching; same-tick same-literal instances are
/// interchangeable.
fn plan_signature(state: &DerivationState, plan: &[u32]) -> Option<Vec<(Literal, u32)>> {
    let mut out = Vec::new();
    for &index in plan {
        let step = state.step(index)?;
        out.push((step.literal.clone(), step.time()));
    }
    out.sort();
    Some(out)
}
