//! Independent brute-force reference: a literal transcription of the
//! proof conditions, explored over every move order and every consumption
//! plan, for small theories only. It deliberately shares no code with the
//! derivation engine beyond the domain vocabulary, so the two can check
//! each other.
//!
//! Deliberately the dumb-but-obviously-right path: predicates recompute
//! everything from the raw record, moves are enumerated exhaustively with
//! no symmetry reduction, and branches end only at maximal derivations or
//! at the step bound.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::enumerate::{Extension, ProvenCount};
use crate::literal::Literal;
use crate::rule::{BodyKind, Label, Rule, RuleHead, RuleKind};
use crate::tags::Tag;
use crate::theory::{HeadVariant, RuleSelector, Theory};
use thiserror::Error;

/// Input limits; the oracle refuses anything larger.
#[derive(Debug, Clone, Copy)]
pub struct OracleBounds;

impl OracleBounds {
    pub const MAX_RULES: usize = 8;
    pub const MAX_FACTS: usize = 6;
    pub const MAX_ATOMS: usize = 6;
    pub const MAX_STEPS: usize = 30;
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle bounds exceeded: {0}")]
    BoundsExceeded(String),
}

/// Proof strength, transcribed: Δ, ∂, σ.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Strength {
    Delta,
    Partial,
    Sigma,
}

impl Strength {
    fn accepts_instance(self, tag: Tag) -> bool {
        match self {
            Strength::Delta => tag == Tag::StrictProven,
            Strength::Partial | Strength::Sigma => {
                tag == Tag::StrictProven || tag == Tag::DefeasiblyProven
            }
        }
    }

    fn refutation(self) -> Tag {
        match self {
            Strength::Delta => Tag::StrictRefuted,
            _ => Tag::DefeasiblyRefuted,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Entry {
    literal: Literal,
    tag: Tag,
    tick: u32,
    consumed: bool,
}

#[derive(Clone)]
struct Record {
    entries: Vec<Entry>,
    next_tick: u32,
}

impl Record {
    fn init(theory: &Theory) -> Record {
        Record {
            entries: theory
                .facts()
                .iter()
                .map(|f| Entry {
                    literal: f.clone(),
                    tag: Tag::StrictProven,
                    tick: 0,
                    consumed: false,
                })
                .collect(),
            next_tick: 1,
        }
    }

    fn has(&self, lit: &Literal, tag: Tag) -> bool {
        self.entries
            .iter()
            .any(|e| e.tag == tag && &e.literal == lit)
    }

    fn count_instances(&self, lit: &Literal, strength: Strength) -> usize {
        let base = self
            .entries
            .iter()
            .filter(|e| strength.accepts_instance(e.tag) && &e.literal == lit)
            .count();
        match strength {
            Strength::Sigma if self.has(lit, Tag::Supported) => base + 1,
            _ => base,
        }
    }

    fn unconsumed(&self, lit: &Literal, strength: Strength) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                strength.accepts_instance(e.tag) && !e.consumed && &e.literal == lit
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn refuted(&self, lit: &Literal, strength: Strength) -> bool {
        self.has(lit, strength.refutation())
    }

    /// Proof entries visible at this strength, in tick order: instances
    /// always, support entries only at σ.
    fn proofs(&self, strength: Strength) -> Vec<(u32, &Literal, usize)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                strength.accepts_instance(e.tag)
                    || (matches!(strength, Strength::Sigma) && e.tag == Tag::Supported)
            })
            .map(|(i, e)| (e.tick, &e.literal, i))
            .collect()
    }
}

fn prefix_match(items: &[Literal], proofs: &[(u32, &Literal, usize)]) -> usize {
    let mut matched = 0;
    let mut last: Option<u32> = None;
    for (tick, lit, _) in proofs {
        if matched == items.len() {
            break;
        }
        if last.map_or(true, |t| *tick > t) && *lit == &items[matched] {
            last = Some(*tick);
            matched += 1;
        }
    }
    matched
}

fn applicable(rec: &Record, rule: &Rule, strength: Strength) -> bool {
    match rule.body.kind() {
        BodyKind::Multiset => rule
            .body
            .multiplicities()
            .iter()
            .all(|(lit, m)| rec.count_instances(lit, strength) >= *m),
        BodyKind::Sequence => {
            let proofs = rec.proofs(strength);
            prefix_match(rule.body.items(), &proofs) == rule.body.len()
        }
    }
}

fn consumable(rec: &Record, rule: &Rule, strength: Strength) -> bool {
    match rule.body.kind() {
        BodyKind::Multiset => {
            applicable(rec, rule, strength)
                && rule
                    .body
                    .multiplicities()
                    .iter()
                    .all(|(lit, m)| rec.unconsumed(lit, strength).len() >= *m)
        }
        BodyKind::Sequence => {
            let proofs: Vec<_> = rec
                .proofs(strength)
                .into_iter()
                .filter(|(_, _, i)| {
                    let e = &rec.entries[*i];
                    strength.accepts_instance(e.tag) && !e.consumed
                })
                .collect();
            prefix_match(rule.body.items(), &proofs) == rule.body.len()
        }
    }
}

fn producible(rec: &Record, theory: &Theory, strength: Strength) -> HashSet<Literal> {
    let mut out: HashSet<Literal> = HashSet::new();
    loop {
        let mut changed = false;
        for rule in theory.rules() {
            let produces = match strength {
                Strength::Delta => rule.kind == RuleKind::Strict,
                _ => rule.kind != RuleKind::Defeater,
            };
            if !produces || rule.head.literals().iter().all(|l| out.contains(l)) {
                continue;
            }
            if rule.body.items().iter().any(|l| rec.refuted(l, strength)) {
                continue;
            }
            let feasible = rule.body.multiplicities().iter().all(|(lit, m)| {
                rec.unconsumed(lit, strength).len() >= *m || out.contains(*lit)
            });
            if feasible {
                for l in rule.head.literals() {
                    changed |= out.insert(l.clone());
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

fn discarded(rec: &Record, theory: &Theory, rule: &Rule, strength: Strength) -> bool {
    if rule.body.items().iter().any(|l| rec.refuted(l, strength)) {
        return true;
    }
    if rule.body.kind() == BodyKind::Multiset {
        return false;
    }
    let proofs = rec.proofs(strength);
    let prefix = prefix_match(rule.body.items(), &proofs);
    if prefix == rule.body.len() {
        return false;
    }
    let future = producible(rec, theory, strength);
    !rule.body.items()[prefix..]
        .iter()
        .all(|l| future.contains(l))
}

fn non_consumable(rec: &Record, theory: &Theory, rule: &Rule, strength: Strength) -> bool {
    discarded(rec, theory, rule, strength)
        || rule
            .body
            .multiplicities()
            .keys()
            .any(|lit| rec.count_instances(lit, strength) == 0)
}

fn strict_refutable(rec: &Record, theory: &Theory, q: &Literal) -> bool {
    if rec.has(q, Tag::StrictRefuted) {
        return true;
    }
    if theory.is_fact(q) || rec.has(q, Tag::StrictProven) {
        return false;
    }
    theory
        .rules_for(q, RuleSelector::Strict)
        .iter()
        .all(|r| non_consumable(rec, theory, r, Strength::Delta))
}

fn defeasibly_refutable(rec: &Record, theory: &Theory, q: &Literal) -> bool {
    if rec.has(q, Tag::DefeasiblyProven) || !rec.has(q, Tag::StrictRefuted) {
        return false;
    }
    let opposite = q.complement();
    if rec.has(&opposite, Tag::StrictProven) {
        return true;
    }
    theory
        .rules_for(q, RuleSelector::StrictOrDefeasible)
        .iter()
        .all(|r| {
            discarded(rec, theory, r, Strength::Partial)
                || theory.rules_for(&opposite, RuleSelector::Any).iter().any(|s| {
                    applicable(rec, s, Strength::Sigma)
                        && theory.rules_for(q, RuleSelector::Any).iter().all(|t| {
                            discarded(rec, theory, t, Strength::Partial)
                                || !theory.superior(&t.label, &s.label)
                        })
                })
        })
}

fn supportable(rec: &Record, theory: &Theory, q: &Literal) -> bool {
    if rec.has(q, Tag::Supported) {
        return false;
    }
    if rec.has(q, Tag::StrictProven) {
        return true;
    }
    let opposite = q.complement();
    theory
        .rules_for(q, RuleSelector::StrictOrDefeasible)
        .iter()
        .any(|r| {
            applicable(rec, r, Strength::Sigma)
                && theory.rules_for(&opposite, RuleSelector::Any).iter().all(|s| {
                    discarded(rec, theory, s, Strength::Partial)
                        || !theory.superior(&s.label, &r.label)
                })
        })
}

/// Every exact instance matching of one body against the unconsumed pool,
/// avoiding `used`. No symmetry reduction.
fn matchings(
    rec: &Record,
    rule: &Rule,
    strength: Strength,
    used: &BTreeSet<usize>,
) -> Vec<Vec<usize>> {
    match rule.body.kind() {
        BodyKind::Multiset => {
            let mut plans: Vec<Vec<usize>> = vec![Vec::new()];
            for (lit, m) in rule.body.multiplicities() {
                let avail: Vec<usize> = rec
                    .unconsumed(lit, strength)
                    .into_iter()
                    .filter(|i| !used.contains(i))
                    .collect();
                if avail.len() < m {
                    return Vec::new();
                }
                let combos = index_combinations(&avail, m);
                let mut next = Vec::new();
                for plan in &plans {
                    for combo in &combos {
                        let mut merged = plan.clone();
                        merged.extend(combo);
                        next.push(merged);
                    }
                }
                plans = next;
            }
            plans
        }
        BodyKind::Sequence => {
            let avail: Vec<(u32, Literal, usize)> = rec
                .entries
                .iter()
                .enumerate()
                .filter(|(i, e)| {
                    strength.accepts_instance(e.tag) && !e.consumed && !used.contains(i)
                })
                .map(|(i, e)| (e.tick, e.literal.clone(), i))
                .collect();
            let mut out = Vec::new();
            let mut current = Vec::new();
            fn rec_inject(
                items: &[Literal],
                avail: &[(u32, Literal, usize)],
                pos: usize,
                start: usize,
                last: Option<u32>,
                current: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if pos == items.len() {
                    out.push(current.clone());
                    return;
                }
                for i in start..avail.len() {
                    let (tick, ref lit, index) = avail[i];
                    if lit != &items[pos] || last.map_or(false, |t| tick <= t) {
                        continue;
                    }
                    current.push(index);
                    rec_inject(items, avail, pos + 1, i + 1, Some(tick), current, out);
                    current.pop();
                }
            }
            rec_inject(
                rule.body.items(),
                &avail,
                0,
                0,
                None,
                &mut current,
                &mut out,
            );
            out
        }
    }
}

fn index_combinations(avail: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(avail: &[usize], start: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..avail.len() {
            current.push(avail[i]);
            rec(avail, i + 1, k, current, out);
            current.pop();
        }
    }
    rec(avail, 0, k, &mut current, &mut out);
    out
}

#[derive(Clone, PartialEq, Eq)]
enum OMove {
    RefuteStrict(Literal),
    RefuteDefeasible(Literal),
    Support(Literal),
    Fire {
        rule: Label,
        strict: bool,
        emissions: Vec<Literal>,
        /// Sequence heads tick per position; single and multiset heads
        /// share one tick.
        consecutive: bool,
        plan: Vec<usize>,
        auto_refute: Vec<Literal>,
    },
}

/// One defeasible member's team fight, transcribed: every non-discarded
/// attacker needs a consumable superior team member; beating an
/// applicable attacker makes the member pay.
fn member_fight<'a>(
    rec: &Record,
    theory: &'a Theory,
    member: &Literal,
) -> Option<(Vec<Vec<&'a Rule>>, Vec<&'a Rule>)> {
    let opposite = member.complement();
    if rec.has(member, Tag::DefeasiblyRefuted)
        || rec.has(&opposite, Tag::StrictProven)
        || !strict_refutable(rec, theory, &opposite)
    {
        return None;
    }
    let mut options = Vec::new();
    let mut applicable_attackers = Vec::new();
    for attacker in theory.rules_for(&opposite, RuleSelector::Any) {
        if discarded(rec, theory, attacker, Strength::Partial) {
            continue;
        }
        let eligible: Vec<&Rule> = theory
            .rules_for(member, RuleSelector::Any)
            .into_iter()
            .filter(|t| {
                theory.superior(&t.label, &attacker.label)
                    && consumable(rec, t, Strength::Partial)
            })
            .collect();
        if eligible.is_empty() {
            return None;
        }
        if applicable(rec, attacker, Strength::Partial) {
            applicable_attackers.push(attacker);
        }
        options.push(eligible);
    }
    Some((options, applicable_attackers))
}

fn firings(rec: &Record, theory: &Theory, rule: &Rule) -> Vec<OMove> {
    let mut out = Vec::new();

    if rule.kind == RuleKind::Strict && consumable(rec, rule, Strength::Delta) {
        let emissions: Vec<Literal> = rule.head.literals().to_vec();
        let blocked = emissions.iter().any(|p| rec.has(p, Tag::StrictRefuted));
        let clashes = emissions.iter().enumerate().any(|(i, p)| {
            rec.has(&p.complement(), Tag::StrictProven)
                || emissions[i + 1..].contains(&p.complement())
        });
        if !blocked && !clashes {
            for plan in matchings(rec, rule, Strength::Delta, &BTreeSet::new()) {
                out.push(OMove::Fire {
                    rule: rule.label.clone(),
                    strict: true,
                    emissions: emissions.clone(),
                    consecutive: matches!(rule.head, RuleHead::Sequence(_)),
                    plan,
                    auto_refute: auto_refutes(rec, &emissions, true),
                });
            }
        }
    }

    if rule.kind != RuleKind::Defeater && consumable(rec, rule, Strength::Partial) {
        let per_literal = matches!(rule.head, RuleHead::Multiset(_))
            && theory.config().head_variant == HeadVariant::PerLiteral;
        let mut fights = BTreeMap::new();
        for member in rule.head.literals() {
            fights
                .entry(member.clone())
                .or_insert_with(|| member_fight(rec, theory, member));
        }
        let emissions: Vec<Literal> = if per_literal {
            rule.head
                .literals()
                .iter()
                .filter(|m| fights[*m].is_some())
                .cloned()
                .collect()
        } else if rule.head.literals().iter().all(|m| fights[m].is_some()) {
            rule.head.literals().to_vec()
        } else {
            Vec::new()
        };
        if !emissions.is_empty() {
            // assignment slots across distinct emitted members
            let mut slots: Vec<(&Literal, usize)> = Vec::new();
            let mut slot_options: Vec<Vec<&Rule>> = Vec::new();
            let mut seen_members: Vec<&Literal> = Vec::new();
            for member in &emissions {
                if seen_members.contains(&member) {
                    continue;
                }
                seen_members.push(member);
                let (options, _) = fights[member].as_ref().unwrap();
                for opt in options {
                    slots.push((member, slot_options.len()));
                    slot_options.push(opt.clone());
                }
            }
            let mut assignments: Vec<Vec<&Rule>> = vec![Vec::new()];
            for options in &slot_options {
                let mut next = Vec::new();
                for partial in &assignments {
                    for t in options {
                        let mut ext = partial.clone();
                        ext.push(*t);
                        next.push(ext);
                    }
                }
                assignments = next;
            }
            let mut seen_plans = HashSet::new();
            for assignment in assignments {
                let mut paying: BTreeMap<&Label, &Rule> = BTreeMap::new();
                for ((member, offset), _) in slots.iter().zip(&slot_options) {
                    let t = assignment[*offset];
                    let (_, applicable_attackers) = fights[*member].as_ref().unwrap();
                    if applicable_attackers
                        .iter()
                        .any(|w| theory.superior(&t.label, &w.label))
                    {
                        paying.insert(&t.label, t);
                    }
                }
                let plans = if paying.is_empty() {
                    matchings(rec, rule, Strength::Partial, &BTreeSet::new())
                } else {
                    let mut plans = Vec::new();
                    joint(rec, &paying.values().copied().collect::<Vec<_>>(), BTreeSet::new(), &mut plans);
                    plans
                };
                for mut plan in plans {
                    plan.sort();
                    if seen_plans.insert(plan.clone()) {
                        out.push(OMove::Fire {
                            rule: rule.label.clone(),
                            strict: false,
                            emissions: emissions.clone(),
                            consecutive: matches!(rule.head, RuleHead::Sequence(_)),
                            plan,
                            auto_refute: auto_refutes(rec, &emissions, false),
                        });
                    }
                }
            }
        }
    }
    out
}

fn joint(rec: &Record, rules: &[&Rule], used: BTreeSet<usize>, out: &mut Vec<Vec<usize>>) {
    match rules.split_first() {
        None => out.push(used.into_iter().collect()),
        Some((rule, rest)) => {
            for plan in matchings(rec, rule, Strength::Partial, &used) {
                let mut next = used.clone();
                next.extend(plan);
                joint(rec, rest, next, out);
            }
        }
    }
}

fn auto_refutes(rec: &Record, emissions: &[Literal], strict: bool) -> Vec<Literal> {
    if strict {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p in emissions {
        let opposite = p.complement();
        if !rec.has(&opposite, Tag::StrictRefuted) && !out.contains(&opposite) {
            out.push(opposite);
        }
    }
    out
}

fn moves(rec: &Record, theory: &Theory) -> Vec<OMove> {
    let mut out = Vec::new();
    for q in theory.signature() {
        if !rec.has(&q, Tag::StrictRefuted) && strict_refutable(rec, theory, &q) {
            out.push(OMove::RefuteStrict(q.clone()));
        }
        if !rec.has(&q, Tag::DefeasiblyRefuted) && defeasibly_refutable(rec, theory, &q) {
            out.push(OMove::RefuteDefeasible(q.clone()));
        }
        if supportable(rec, theory, &q) {
            out.push(OMove::Support(q.clone()));
        }
    }
    for rule in theory.rules() {
        out.extend(firings(rec, theory, rule));
    }
    out
}

fn apply(rec: &Record, mv: &OMove) -> Record {
    let mut next = rec.clone();
    match mv {
        OMove::RefuteStrict(q) => {
            let tick = next.next_tick;
            next.next_tick += 1;
            next.entries.push(Entry {
                literal: q.clone(),
                tag: Tag::StrictRefuted,
                tick,
                consumed: false,
            });
        }
        OMove::RefuteDefeasible(q) => {
            let tick = next.next_tick;
            next.next_tick += 1;
            next.entries.push(Entry {
                literal: q.clone(),
                tag: Tag::DefeasiblyRefuted,
                tick,
                consumed: false,
            });
        }
        OMove::Support(q) => {
            let tick = next.next_tick;
            next.next_tick += 1;
            next.entries.push(Entry {
                literal: q.clone(),
                tag: Tag::Supported,
                tick,
                consumed: false,
            });
        }
        OMove::Fire {
            strict,
            emissions,
            consecutive,
            plan,
            auto_refute,
            ..
        } => {
            for q in auto_refute {
                if !next.has(q, Tag::StrictRefuted) {
                    let tick = next.next_tick;
                    next.next_tick += 1;
                    next.entries.push(Entry {
                        literal: q.clone(),
                        tag: Tag::StrictRefuted,
                        tick,
                        consumed: false,
                    });
                }
            }
            for &i in plan {
                next.entries[i].consumed = true;
            }
            let tag = if *strict {
                Tag::StrictProven
            } else {
                Tag::DefeasiblyProven
            };
            let mut tick = next.next_tick;
            next.next_tick += 1;
            for (i, p) in emissions.iter().enumerate() {
                if *consecutive && i > 0 {
                    tick = next.next_tick;
                    next.next_tick += 1;
                }
                next.entries.push(Entry {
                    literal: p.clone(),
                    tag,
                    tick,
                    consumed: false,
                });
            }
        }
    }
    next
}

fn snapshot(rec: &Record) -> (Vec<Vec<(Literal, Tag, bool)>>, Vec<(Literal, Tag)>) {
    let mut groups: Vec<Vec<(Literal, Tag, bool)>> = Vec::new();
    let mut last = None;
    let mut flat = Vec::new();
    for e in &rec.entries {
        match e.tag {
            Tag::StrictProven | Tag::DefeasiblyProven => {
                if last != Some(e.tick) {
                    groups.push(Vec::new());
                    last = Some(e.tick);
                }
                groups
                    .last_mut()
                    .unwrap()
                    .push((e.literal.clone(), e.tag, e.consumed));
            }
            _ => flat.push((e.literal.clone(), e.tag)),
        }
    }
    for g in &mut groups {
        g.sort();
    }
    flat.sort();
    flat.dedup();
    (groups, flat)
}

fn to_extension(rec: &Record, cyclic: bool) -> Extension {
    let mut proven: BTreeMap<(Literal, Tag), ProvenCount> = BTreeMap::new();
    let mut refuted = BTreeSet::new();
    let mut supported = BTreeSet::new();
    for e in &rec.entries {
        match e.tag {
            Tag::StrictProven | Tag::DefeasiblyProven => {
                let c = proven.entry((e.literal.clone(), e.tag)).or_default();
                c.count += 1;
                if e.consumed {
                    c.consumed += 1;
                }
            }
            Tag::StrictRefuted | Tag::DefeasiblyRefuted => {
                refuted.insert((e.literal.clone(), e.tag));
            }
            Tag::Supported => {
                supported.insert(e.literal.clone());
            }
        }
    }
    Extension {
        proven,
        refuted,
        supported,
        cyclic,
        inconsistent: None,
        trace: Vec::new(),
    }
}

fn inconsistency(rec: &Record, theory: &Theory) -> Option<Literal> {
    let mut found: Option<Literal> = None;
    for rule in theory.rules() {
        if rule.kind != RuleKind::Strict || !consumable(rec, rule, Strength::Delta) {
            continue;
        }
        let emissions = rule.head.literals();
        for (i, p) in emissions.iter().enumerate() {
            let opposite = p.complement();
            if rec.has(&opposite, Tag::StrictProven) || emissions[i + 1..].contains(&opposite) {
                let positive = if p.is_positive() { p.clone() } else { opposite };
                if found.as_ref().map_or(true, |f| positive < *f) {
                    found = Some(positive);
                }
            }
        }
    }
    found
}

type Memo = HashMap<(Vec<Vec<(Literal, Tag, bool)>>, Vec<(Literal, Tag)>), Vec<Extension>>;

fn explore(rec: &Record, theory: &Theory, memo: &mut Memo) -> Vec<Extension> {
    if rec.entries.len() >= theory.config().max_steps as usize {
        return vec![to_extension(rec, true)];
    }
    if let Some(literal) = inconsistency(rec, theory) {
        return vec![Extension {
            proven: BTreeMap::new(),
            refuted: BTreeSet::new(),
            supported: BTreeSet::new(),
            cyclic: false,
            inconsistent: Some(literal),
            trace: Vec::new(),
        }];
    }
    let key = snapshot(rec);
    if let Some(found) = memo.get(&key) {
        return found.clone();
    }
    let all = moves(rec, theory);
    let mut out: Vec<Extension> = if all.is_empty() {
        vec![to_extension(rec, false)]
    } else {
        let mut out = Vec::new();
        for mv in &all {
            out.extend(explore(&apply(rec, mv), theory, memo));
        }
        out
    };
    out.sort();
    out.dedup();
    memo.insert(key, out.clone());
    out
}

/// The complete canonical extension set by exhaustive search, for
/// theories within [`OracleBounds`].
pub fn oracle_extensions(theory: &Theory) -> Result<Vec<Extension>, OracleError> {
    if theory.rules().len() > OracleBounds::MAX_RULES {
        return Err(OracleError::BoundsExceeded(format!(
            "{} rules (max {})",
            theory.rules().len(),
            OracleBounds::MAX_RULES
        )));
    }
    if theory.facts().len() > OracleBounds::MAX_FACTS {
        return Err(OracleError::BoundsExceeded(format!(
            "{} fact instances (max {})",
            theory.facts().len(),
            OracleBounds::MAX_FACTS
        )));
    }
    let atoms: BTreeSet<_> = theory.signature().iter().map(|l| l.atom().clone()).collect();
    if atoms.len() > OracleBounds::MAX_ATOMS {
        return Err(OracleError::BoundsExceeded(format!(
            "{} atoms (max {})",
            atoms.len(),
            OracleBounds::MAX_ATOMS
        )));
    }
    if theory.config().max_steps as usize > OracleBounds::MAX_STEPS {
        return Err(OracleError::BoundsExceeded(format!(
            "max_steps {} (max {})",
            theory.config().max_steps,
            OracleBounds::MAX_STEPS
        )));
    }
    let mut memo = Memo::new();
    let mut out = explore(&Record::init(theory), theory, &mut memo);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Symmetric difference between an engine result and the oracle result.
#[derive(Debug, Clone, Default)]
pub struct DiffReport {
    /// Extensions the oracle finds but the engine does not.
    pub missing: Vec<Extension>,
    /// Extensions the engine reports but the oracle does not; each
    /// carries the engine trace for debugging.
    pub extra: Vec<Extension>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("extension sets agree");
        }
        for ext in &self.missing {
            writeln!(f, "missing from engine: {ext}")?;
        }
        for ext in &self.extra {
            writeln!(f, "extra in engine: {ext}")?;
        }
        Ok(())
    }
}

/// Compares two canonical extension sets.
pub fn compare(engine: &[Extension], oracle: &[Extension]) -> DiffReport {
    let engine_set: BTreeSet<&Extension> = engine.iter().collect();
    let oracle_set: BTreeSet<&Extension> = oracle.iter().collect();
    DiffReport {
        missing: oracle
            .iter()
            .filter(|e| !engine_set.contains(*e))
            .cloned()
            .collect(),
        extra: engine
            .iter()
            .filter(|e| !oracle_set.contains(*e))
            .cloned()
            .collect(),
    }
}
