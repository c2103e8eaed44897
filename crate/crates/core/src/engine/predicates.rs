//! The applicability, consumability, and discardability predicates for
//! multiset and sequence bodies.
//!
//! Applicability counts proven instances without regard to consumption;
//! consumability additionally requires the matched instances to be
//! unconsumed. Sequence applicability asks for an order-preserving
//! injection from body positions to distinct proven steps with strictly
//! increasing ticks, so simultaneous proofs (facts, one multiset-head
//! firing) never satisfy two ordered positions between them.

use std::collections::{HashMap, HashSet};

use crate::engine::state::{DerivationState, Tag};
use crate::engine::{EngineError, Mode};
use crate::literal::Literal;
use crate::rule::{BodyKind, Rule, RuleKind};
use crate::theory::Theory;

/// A read view over one state with per-literal indexes. Built once per
/// frontier computation or step operation.
pub(crate) struct View<'a> {
    pub state: &'a DerivationState,
    pub theory: &'a Theory,
    /// Unconsumed instances per literal, in log (= tick) order.
    pool: HashMap<&'a Literal, Vec<PoolEntry>>,
    /// Instance counts per literal, consumed included.
    strict_count: HashMap<&'a Literal, usize>,
    defeasible_count: HashMap<&'a Literal, usize>,
    sigma: HashSet<&'a Literal>,
    refuted_strict: HashSet<&'a Literal>,
    refuted_defeasible: HashSet<&'a Literal>,
    /// Every proof step in log order, for sequence matching.
    proofs: Vec<ProofEntry<'a>>,
}

#[derive(Clone, Copy)]
pub(crate) struct PoolEntry {
    pub time: u32,
    pub index: u32,
    pub tag: Tag,
}

#[derive(Clone, Copy)]
pub(crate) struct ProofEntry<'a> {
    pub time: u32,
    pub index: u32,
    pub literal: &'a Literal,
    pub tag: Tag,
    pub unconsumed_resource: bool,
}

impl<'a> View<'a> {
    pub fn new(state: &'a DerivationState) -> View<'a> {
        let theory = state.theory().as_ref();
        let mut view = View {
            state,
            theory,
            pool: HashMap::new(),
            strict_count: HashMap::new(),
            defeasible_count: HashMap::new(),
            sigma: HashSet::new(),
            refuted_strict: HashSet::new(),
            refuted_defeasible: HashSet::new(),
            proofs: Vec::new(),
        };
        for step in state.steps() {
            match step.tag {
                Tag::StrictProven | Tag::DefeasiblyProven => {
                    if step.is_resource() {
                        let counter = if step.tag == Tag::StrictProven {
                            &mut view.strict_count
                        } else {
                            &mut view.defeasible_count
                        };
                        *counter.entry(&step.literal).or_insert(0) += 1;
                        if step.consumed_at.is_none() {
                            view.pool.entry(&step.literal).or_default().push(PoolEntry {
                                time: step.time(),
                                index: step.index,
                                tag: step.tag,
                            });
                        }
                        view.proofs.push(ProofEntry {
                            time: step.time(),
                            index: step.index,
                            literal: &step.literal,
                            tag: step.tag,
                            unconsumed_resource: step.consumed_at.is_none(),
                        });
                    }
                    // Restatements of strict conclusions are proofs for
                    // membership checks but not instances; they are kept
                    // out of counting and matching.
                }
                Tag::Supported => {
                    view.sigma.insert(&step.literal);
                    view.proofs.push(ProofEntry {
                        time: step.time(),
                        index: step.index,
                        literal: &step.literal,
                        tag: step.tag,
                        unconsumed_resource: false,
                    });
                }
                Tag::StrictRefuted => {
                    view.refuted_strict.insert(&step.literal);
                }
                Tag::DefeasiblyRefuted => {
                    view.refuted_defeasible.insert(&step.literal);
                }
            }
        }
        view
    }

    /// Proven instance count for applicability, with the support tag
    /// contributing one occurrence in support mode.
    pub fn proven_count(&self, lit: &Literal, mode: Mode) -> usize {
        let strict = self.strict_count.get(lit).copied().unwrap_or(0);
        match mode {
            Mode::Strict => strict,
            Mode::Defeasible => strict + self.defeasible_count.get(lit).copied().unwrap_or(0),
            Mode::Support => {
                strict
                    + self.defeasible_count.get(lit).copied().unwrap_or(0)
                    + usize::from(self.sigma.contains(lit))
            }
        }
    }

    /// Unconsumed instances of `lit` usable at this mode, oldest first.
    pub fn pool_of(&self, lit: &Literal, mode: Mode) -> Vec<PoolEntry> {
        self.pool
            .get(lit)
            .map(|entries| {
                entries
                    .iter()
                    .filter(|e| mode.accepts_instance(e.tag))
                    .copied()
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn pool_count(&self, lit: &Literal, mode: Mode) -> usize {
        self.pool
            .get(lit)
            .map(|entries| entries.iter().filter(|e| mode.accepts_instance(e.tag)).count())
            .unwrap_or(0)
    }

    pub fn is_refuted(&self, lit: &Literal, mode: Mode) -> bool {
        match mode.refutation_tag() {
            Tag::StrictRefuted => self.refuted_strict.contains(lit),
            _ => self.refuted_defeasible.contains(lit),
        }
    }

    /// Proof steps accepted at this mode, in log order. For strict and
    /// defeasible modes these are instances only; support mode also sees
    /// support steps.
    pub fn proofs_for(&self, mode: Mode) -> impl Iterator<Item = &ProofEntry<'a>> {
        self.proofs.iter().filter(move |p| match mode {
            Mode::Strict => p.tag == Tag::StrictProven,
            Mode::Defeasible => p.tag != Tag::Supported,
            Mode::Support => true,
        })
    }
}

/// Longest body prefix realizable by an order-preserving injection into
/// `steps` (already in tick order). Greedy leftmost matching realizes the
/// maximal prefix.
fn matchable_prefix<'s>(
    items: &[Literal],
    steps: impl Iterator<Item = (u32, &'s Literal)>,
) -> usize {
    let mut matched = 0;
    let mut last_time: Option<u32> = None;
    for (time, lit) in steps {
        if matched == items.len() {
            break;
        }
        let later = last_time.map_or(true, |t| time > t);
        if later && lit == &items[matched] {
            last_time = Some(time);
            matched += 1;
        }
    }
    matched
}

fn multiset_applicable(view: &View, rule: &Rule, mode: Mode) -> bool {
    rule.body
        .multiplicities()
        .iter()
        .all(|(lit, m)| view.proven_count(lit, mode) >= *m)
}

fn multiset_consumable(view: &View, rule: &Rule, mode: Mode) -> bool {
    multiset_applicable(view, rule, mode)
        && rule
            .body
            .multiplicities()
            .iter()
            .all(|(lit, m)| view.pool_count(lit, mode) >= *m)
}

fn multiset_discarded(view: &View, rule: &Rule, mode: Mode) -> bool {
    rule.body
        .items()
        .iter()
        .any(|lit| view.is_refuted(lit, mode))
}

fn sequence_applicable(view: &View, rule: &Rule, mode: Mode) -> bool {
    let items = rule.body.items();
    matchable_prefix(items, view.proofs_for(mode).map(|p| (p.time, p.literal)))
        == items.len()
}

fn sequence_consumable(view: &View, rule: &Rule, mode: Mode) -> bool {
    let items = rule.body.items();
    matchable_prefix(
        items,
        view.proofs_for(mode)
            .filter(|p| p.unconsumed_resource && mode.accepts_instance(p.tag))
            .map(|p| (p.time, p.literal)),
    ) == items.len()
}

/// Sequence discard, conservatively: a premise is refuted, or no
/// order-preserving injection can ever exist even counting future
/// instances of literals some live rule can still produce. Future proofs
/// arrive after every current tick, so they can only serve a suffix of
/// the body.
fn sequence_discarded(view: &View, rule: &Rule, mode: Mode) -> bool {
    let items = rule.body.items();
    if items.iter().any(|lit| view.is_refuted(lit, mode)) {
        return true;
    }
    let prefix = matchable_prefix(items, view.proofs_for(mode).map(|p| (p.time, p.literal)));
    if prefix == items.len() {
        return false;
    }
    let producible = can_produce(view, mode);
    !items[prefix..].iter().all(|lit| producible.contains(lit))
}

/// Literals that may still gain new instances: the least fixpoint over
/// rules that are not discarded and whose premises are each either still
/// available in the pool or themselves producible. Deliberately loose
/// (order and competition between future firings are ignored), so it only
/// ever overestimates what the future can bring.
pub(crate) fn can_produce(view: &View, mode: Mode) -> HashSet<Literal> {
    let producers: Vec<&Rule> = view
        .theory
        .rules()
        .iter()
        .filter(|r| match mode {
            Mode::Strict => r.kind == RuleKind::Strict,
            _ => r.kind != RuleKind::Defeater,
        })
        .collect();
    let mut out: HashSet<Literal> = HashSet::new();
    loop {
        let mut changed = false;
        for rule in &producers {
            if rule.head.literals().iter().all(|l| out.contains(l)) {
                continue;
            }
            let dead = rule
                .body
                .items()
                .iter()
                .any(|lit| view.is_refuted(lit, mode));
            if dead {
                continue;
            }
            let feasible = rule.body.multiplicities().iter().all(|(lit, m)| {
                view.pool_count(lit, mode) >= *m || out.contains(*lit)
            });
            if feasible {
                for l in rule.head.literals() {
                    if out.insert(l.clone()) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

fn expect_kind(rule: &Rule, expected: BodyKind) -> Result<(), EngineError> {
    if rule.body.kind() == expected {
        Ok(())
    } else {
        Err(EngineError::WrongBodyKind {
            rule: rule.label.clone(),
            expected: match expected {
                BodyKind::Multiset => "multiset",
                BodyKind::Sequence => "sequence",
            },
        })
    }
}

/// Every body literal (with multiplicity) proven at this strength at an
/// earlier step, consumed or not. Multiset bodies only.
pub fn is_applicable(state: &DerivationState, rule: &Rule, mode: Mode) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Multiset)?;
    Ok(multiset_applicable(&View::new(state), rule, mode))
}

/// Applicable, and the unconsumed pool contains the body as a
/// sub-multiset. Multiset bodies only.
pub fn is_consumable(state: &DerivationState, rule: &Rule, mode: Mode) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Multiset)?;
    Ok(multiset_consumable(&View::new(state), rule, mode))
}

/// Some body literal is refuted at this strength. Multiset bodies only.
pub fn is_discarded(state: &DerivationState, rule: &Rule, mode: Mode) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Multiset)?;
    Ok(multiset_discarded(&View::new(state), rule, mode))
}

/// Order-preserving injection from body positions to distinct proven
/// steps with strictly increasing ticks. Sequence bodies only.
pub fn is_sequence_applicable(
    state: &DerivationState,
    rule: &Rule,
    mode: Mode,
) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Sequence)?;
    Ok(sequence_applicable(&View::new(state), rule, mode))
}

/// An injection as above whose matched instances are all unconsumed.
pub fn is_sequence_consumable(
    state: &DerivationState,
    rule: &Rule,
    mode: Mode,
) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Sequence)?;
    Ok(sequence_consumable(&View::new(state), rule, mode))
}

/// See [`sequence_discarded`]: refuted premise or definitive order
/// violation.
pub fn is_sequence_discarded(
    state: &DerivationState,
    rule: &Rule,
    mode: Mode,
) -> Result<bool, EngineError> {
    expect_kind(rule, BodyKind::Sequence)?;
    Ok(sequence_discarded(&View::new(state), rule, mode))
}

/// Kind-dispatching internal forms.
pub(crate) fn applicable(view: &View, rule: &Rule, mode: Mode) -> bool {
    match rule.body.kind() {
        BodyKind::Multiset => multiset_applicable(view, rule, mode),
        BodyKind::Sequence => sequence_applicable(view, rule, mode),
    }
}

pub(crate) fn consumable(view: &View, rule: &Rule, mode: Mode) -> bool {
    match rule.body.kind() {
        BodyKind::Multiset => multiset_consumable(view, rule, mode),
        BodyKind::Sequence => sequence_consumable(view, rule, mode),
    }
}

pub(crate) fn discarded(view: &View, rule: &Rule, mode: Mode) -> bool {
    match rule.body.kind() {
        BodyKind::Multiset => multiset_discarded(view, rule, mode),
        BodyKind::Sequence => sequence_discarded(view, rule, mode),
    }
}

/// Non-consumability in the strong-negation sense used by strict
/// refutation: discarded, or some premise literal has no proven
/// occurrence at all (consumed occurrences still count as proven, which
/// keeps refutation coherent with earlier firings).
pub(crate) fn non_consumable(view: &View, rule: &Rule, mode: Mode) -> bool {
    discarded(view, rule, mode)
        || rule
            .body
            .multiplicities()
            .keys()
            .any(|lit| view.proven_count(lit, mode) == 0)
}
