//! Rule firings: resolved applications of one strict or defeasible rule,
//! including the team-defeater fight and the resulting consumption plan.
//!
//! Consumption follows the team reading: when at least one applicable
//! attacker is beaten by a team member, the winning members' premises are
//! consumed and the firing rule's own premises are left alone; otherwise
//! the firing rule pays.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::engine::predicates::{applicable, consumable, discarded, non_consumable, View};
use crate::engine::state::{DerivationState, Tag};
use crate::engine::{FailReason, Mode};
use crate::literal::Literal;
use crate::rule::{BodyKind, Label, Rule, RuleHead, RuleKind};
use crate::theory::{HeadVariant, RuleSelector};

/// How a firing's emissions are ticked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EmitTiming {
    /// One step.
    Single,
    /// Consecutive ticks, one per head position, in head order.
    Consecutive,
    /// All emissions share one tick (concurrent production).
    Simultaneous,
}

/// A fully resolved rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Firing {
    pub rule: Label,
    pub mode: Mode,
    pub emissions: Vec<Literal>,
    pub timing: EmitTiming,
    /// Instance indices to consume, sorted.
    pub plan: Vec<u32>,
    /// Complements that still need a strict refutation step first.
    pub auto_refute: Vec<Literal>,
}

fn head_timing(head: &RuleHead) -> EmitTiming {
    match head {
        RuleHead::Single(_) => EmitTiming::Single,
        RuleHead::Sequence(_) => EmitTiming::Consecutive,
        RuleHead::Multiset(_) => EmitTiming::Simultaneous,
    }
}

/// Enumerates the consumption matchings of `body` against the pool,
/// excluding instances in `used`. When no sequence body exists in the
/// theory, same-literal instances are interchangeable and only the oldest
/// matching is produced; otherwise matchings with distinct tick
/// signatures are distinct.
fn body_matchings(
    view: &View,
    rule: &Rule,
    mode: Mode,
    used: &BTreeSet<u32>,
    instance_sensitive: bool,
) -> Vec<Vec<u32>> {
    match rule.body.kind() {
        BodyKind::Multiset => {
            let mut per_literal: Vec<Vec<Vec<u32>>> = Vec::new();
            for (lit, m) in rule.body.multiplicities() {
                let avail: Vec<_> = view
                    .pool_of(lit, mode)
                    .into_iter()
                    .filter(|e| !used.contains(&e.index))
                    .collect();
                if avail.len() < m {
                    return Vec::new();
                }
                let choices = if !instance_sensitive {
                    vec![avail[..m].iter().map(|e| e.index).collect::<Vec<u32>>()]
                } else {
                    let mut seen_times = HashSet::new();
                    let mut out = Vec::new();
                    for combo in combinations(avail.len(), m) {
                        let times: Vec<u32> = combo.iter().map(|&i| avail[i].time).collect();
                        if seen_times.insert(times) {
                            out.push(combo.iter().map(|&i| avail[i].index).collect());
                        }
                    }
                    out
                };
                per_literal.push(choices);
            }
            // cross product over literals
            let mut plans: Vec<Vec<u32>> = vec![Vec::new()];
            for choices in per_literal {
                let mut next = Vec::new();
                for plan in &plans {
                    for choice in &choices {
                        let mut merged = plan.clone();
                        merged.extend_from_slice(choice);
                        next.push(merged);
                    }
                }
                plans = next;
            }
            plans
        }
        BodyKind::Sequence => {
            let items = rule.body.items();
            let avail: Vec<_> = view
                .proofs_for(mode)
                .filter(|p| {
                    p.unconsumed_resource
                        && mode.accepts_instance(p.tag)
                        && !used.contains(&p.index)
                })
                .map(|p| (p.time, p.index, p.literal.clone()))
                .collect();
            let mut plans = Vec::new();
            let mut seen_times = HashSet::new();
            let mut current = Vec::new();
            let mut sink = |plan: &[(u32, u32)]| {
                let times: Vec<u32> = plan.iter().map(|(t, _)| *t).collect();
                if seen_times.insert(times) {
                    plans.push(plan.iter().map(|(_, i)| *i).collect());
                }
            };
            injections(items, &avail, 0, 0, None, &mut current, &mut sink);
            plans
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

fn injections(
    items: &[Literal],
    avail: &[(u32, u32, Literal)],
    pos: usize,
    start: usize,
    last_time: Option<u32>,
    current: &mut Vec<(u32, u32)>,
    sink: &mut impl FnMut(&[(u32, u32)]),
) {
    if pos == items.len() {
        sink(current);
        return;
    }
    for i in start..avail.len() {
        let (time, index, ref lit) = avail[i];
        if lit != &items[pos] {
            continue;
        }
        if let Some(t) = last_time {
            if time <= t {
                continue;
            }
        }
        current.push((time, index));
        injections(items, avail, pos + 1, i + 1, Some(time), current, sink);
        current.pop();
    }
}

/// Joint matching of several bodies against the pool without sharing
/// instances. Produces the union plans, deduplicated.
fn joint_matchings(
    view: &View,
    rules: &[&Rule],
    mode: Mode,
    instance_sensitive: bool,
) -> Vec<Vec<u32>> {
    fn rec(
        view: &View,
        rules: &[&Rule],
        mode: Mode,
        instance_sensitive: bool,
        used: BTreeSet<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        match rules.split_first() {
            None => out.push(used.into_iter().collect()),
            Some((rule, rest)) => {
                for plan in body_matchings(view, rule, mode, &used, instance_sensitive) {
                    let mut next = used.clone();
                    next.extend(plan);
                    rec(view, rest, mode, instance_sensitive, next, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(
        view,
        rules,
        mode,
        instance_sensitive,
        BTreeSet::new(),
        &mut out,
    );
    out.sort();
    out.dedup();
    out
}

/// True when the strict refutation of `q` could be established right now
/// (or already is): `q` is not a fact and every strict rule for it is
/// non-consumable.
pub(crate) fn strict_refutable(view: &View, q: &Literal) -> Result<(), FailReason> {
    if view.state.has(q, Tag::StrictRefuted) {
        return Ok(());
    }
    if view.theory.is_fact(q) {
        return Err(FailReason::IsFact);
    }
    if view.state.has(q, Tag::StrictProven) {
        return Err(FailReason::TargetProven);
    }
    for rule in view.theory.rules_for(q, RuleSelector::Strict) {
        if !non_consumable(view, rule, Mode::Strict) {
            return Err(FailReason::ConsumableRuleBlocks(rule.label.clone()));
        }
    }
    Ok(())
}

/// All strict firings of `rule` in the current state. Strict steps ignore
/// contrary evidence; a firing is withheld only when an emission is
/// already strictly refuted (coherence). Inconsistency with the strict
/// complement is the caller's concern.
pub(crate) fn strict_firings(
    view: &View,
    rule: &Rule,
    instance_sensitive: bool,
) -> Vec<Firing> {
    if rule.kind != RuleKind::Strict || !consumable(view, rule, Mode::Strict) {
        return Vec::new();
    }
    let emissions: Vec<Literal> = rule.head.literals().to_vec();
    if emissions
        .iter()
        .any(|p| view.state.has(p, Tag::StrictRefuted))
    {
        return Vec::new();
    }
    body_matchings(view, rule, Mode::Strict, &BTreeSet::new(), instance_sensitive)
        .into_iter()
        .map(|plan| Firing {
            rule: rule.label.clone(),
            mode: Mode::Strict,
            emissions: emissions.clone(),
            timing: head_timing(&rule.head),
            plan,
            auto_refute: Vec::new(),
        })
        .collect()
}

/// The literal whose strict derivation would collide with its complement,
/// if any strict firing available right now would create one. Such a
/// theory is inconsistent from this state on.
pub fn strict_inconsistency(state: &DerivationState) -> Option<Literal> {
    let view = View::new(state);
    let mut clash: Option<Literal> = None;
    let mut note = |lit: &Literal| {
        let positive = if lit.is_positive() {
            lit.clone()
        } else {
            lit.complement()
        };
        if clash.as_ref().map_or(true, |c| positive < *c) {
            clash = Some(positive);
        }
    };
    for rule in view.theory.rules() {
        if rule.kind != RuleKind::Strict || !consumable(&view, rule, Mode::Strict) {
            continue;
        }
        let emissions = rule.head.literals();
        for (i, p) in emissions.iter().enumerate() {
            let opposite = p.complement();
            if view.state.has(&opposite, Tag::StrictProven) {
                note(p);
            }
            if emissions[i + 1..].contains(&opposite) {
                note(p);
            }
        }
    }
    clash
}

/// The outcome of one head literal's team fight.
struct Fight<'a> {
    /// Eligible superior consumable team members per live attacker.
    options: Vec<Vec<&'a Rule>>,
    /// Live attackers that are defeasibly applicable; beating one makes a
    /// team member pay.
    applicable_attackers: Vec<&'a Rule>,
}

fn fight<'a>(view: &View<'a>, member: &Literal) -> Result<Fight<'a>, FailReason>
where
{
    let opposite = member.complement();
    let attackers = view.theory.rules_for(&opposite, RuleSelector::Any);
    let team_pool = view.theory.rules_for(member, RuleSelector::Any);
    let mut options = Vec::new();
    let mut applicable_attackers = Vec::new();
    for attacker in attackers {
        if discarded(view, attacker, Mode::Defeasible) {
            continue;
        }
        let eligible: Vec<&Rule> = team_pool
            .iter()
            .filter(|t| {
                view.theory.superior(&t.label, &attacker.label)
                    && consumable(view, t, Mode::Defeasible)
            })
            .copied()
            .collect();
        if eligible.is_empty() {
            return Err(FailReason::UndefeatedAttacker(attacker.label.clone()));
        }
        if applicable(view, attacker, Mode::Defeasible) {
            applicable_attackers.push(attacker);
        }
        options.push(eligible);
    }
    Ok(Fight {
        options,
        applicable_attackers,
    })
}

/// Checks the preconditions of emitting `member` defeasibly, fights
/// aside: the strict complement must be refutable and the member itself
/// not defeasibly refuted.
fn member_preconditions(view: &View, member: &Literal) -> Result<(), FailReason> {
    if view.state.has(member, Tag::DefeasiblyRefuted) {
        return Err(FailReason::TargetRefuted);
    }
    let opposite = member.complement();
    if view.state.has(&opposite, Tag::StrictProven) {
        return Err(FailReason::StrictOppositeProven);
    }
    strict_refutable(view, &opposite)
        .map_err(|_| FailReason::StrictOppositeNotRefuted(opposite.clone()))
}

/// All defeasible firings of `rule`, or the reason none exists. Multiset
/// heads dispatch on the configured variant: per-literal emits the
/// members that win their own fights, whole-head requires every member to
/// win. Single and sequence heads require every position to pass.
pub(crate) fn defeasible_firings<'a>(
    view: &View<'a>,
    rule: &'a Rule,
    instance_sensitive: bool,
) -> Result<Vec<Firing>, FailReason> {
    debug_assert_ne!(rule.kind, RuleKind::Defeater);
    if !consumable(view, rule, Mode::Defeasible) {
        return Err(FailReason::NoConsumableRule);
    }

    let per_literal =
        matches!(rule.head, RuleHead::Multiset(_))
            && view.theory.config().head_variant == HeadVariant::PerLiteral;

    // Resolve each distinct member's preconditions and fight once.
    let mut outcomes: BTreeMap<&Literal, Result<Fight<'a>, FailReason>> = BTreeMap::new();
    for member in rule.head.literals() {
        outcomes.entry(member).or_insert_with(|| {
            member_preconditions(view, member).and_then(|()| fight(view, member))
        });
    }

    let emissions: Vec<Literal> = if per_literal {
        rule.head
            .literals()
            .iter()
            .filter(|m| outcomes[*m].is_ok())
            .cloned()
            .collect()
    } else {
        if let Some((_, Err(reason))) = outcomes.iter().find(|(_, r)| r.is_err()) {
            return Err(reason.clone());
        }
        rule.head.literals().to_vec()
    };
    if emissions.is_empty() {
        let (_, first_err) = outcomes.iter().find(|(_, r)| r.is_err()).unwrap();
        return Err(first_err.as_ref().err().unwrap().clone());
    }

    // Team assignment slots: one eligible-team-member choice per live
    // attacker of each emitted member.
    let mut slots: Vec<&Vec<&Rule>> = Vec::new();
    let mut payer_checks: Vec<(&Literal, usize)> = Vec::new(); // (member, slot offset)
    let mut emitted_distinct: Vec<&Literal> = Vec::new();
    for member in emissions.iter() {
        if emitted_distinct.contains(&member) {
            continue;
        }
        emitted_distinct.push(member);
        let outcome = outcomes[member].as_ref().expect("emitted members won");
        for eligible in &outcome.options {
            payer_checks.push((member, slots.len()));
            slots.push(eligible);
        }
    }

    let assignments = cross_product(&slots);
    let mut firings = Vec::new();
    let mut seen = HashSet::new();
    for assignment in assignments {
        // Winning members that beat an applicable attacker pay with their
        // premises; if none does, the firing rule pays.
        let mut paying: BTreeMap<&Label, &Rule> = BTreeMap::new();
        for (member, offset) in &payer_checks {
            let t = assignment[*offset];
            let beats_applicable = outcomes[*member]
                .as_ref()
                .unwrap()
                .applicable_attackers
                .iter()
                .any(|w| view.theory.superior(&t.label, &w.label));
            if beats_applicable {
                paying.insert(&t.label, t);
            }
        }
        let plans = if paying.is_empty() {
            body_matchings(view, rule, Mode::Defeasible, &BTreeSet::new(), instance_sensitive)
        } else {
            let bodies: Vec<&Rule> = paying.values().copied().collect();
            joint_matchings(view, &bodies, Mode::Defeasible, instance_sensitive)
        };
        for mut plan in plans {
            plan.sort();
            if seen.insert((emissions.clone(), plan.clone())) {
                let auto_refute: Vec<Literal> = {
                    let mut out = Vec::new();
                    for member in &emissions {
                        let opposite = member.complement();
                        if !view.state.has(&opposite, Tag::StrictRefuted)
                            && !out.contains(&opposite)
                        {
                            out.push(opposite);
                        }
                    }
                    out
                };
                firings.push(Firing {
                    rule: rule.label.clone(),
                    mode: Mode::Defeasible,
                    emissions: emissions.clone(),
                    timing: head_timing(&rule.head),
                    plan,
                    auto_refute,
                });
            }
        }
    }
    if firings.is_empty() {
        return Err(FailReason::TeamConsumptionInfeasible);
    }
    Ok(firings)
}

fn cross_product<'a>(slots: &[&Vec<&'a Rule>]) -> Vec<Vec<&'a Rule>> {
    let mut out: Vec<Vec<&Rule>> = vec![Vec::new()];
    for slot in slots {
        let mut next = Vec::new();
        for partial in &out {
            for choice in slot.iter() {
                let mut extended = partial.clone();
                extended.push(*choice);
                next.push(extended);
            }
        }
        out = next;
    }
    out
}
