//! Extension enumeration: explore the nondeterministic move tree to
//! completion, canonicalize and deduplicate the outcomes, detect loops,
//! and rank extensions by resource cost.
//!
//! Branch points are resource-affecting moves and refutations that could
//! race a proof. Support steps and refutations of literals no rule can
//! ever produce commute with every other move and never foreclose one,
//! so they are applied eagerly; distinct interleavings of the remaining
//! moves converge in a memo keyed by the forward-relevant state.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::engine::{
    apply_move, enabled_moves, strict_inconsistency, DerivationState, DerivationStep, Move,
    MoveKind, Tag,
};
use crate::literal::{Atom, Literal};
use crate::rule::Label;
use crate::theory::{EnumerationMode, RuleSelector, Theory};
use thiserror::Error;

/// Counts for one proven (literal, tag) entry of an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ProvenCount {
    pub count: u32,
    pub consumed: u32,
}

/// The canonical outcome of one maximal derivation: proven instances with
/// consumption counts, refuted and supported sets, one representative
/// trace, and flags for bounded loops and strict inconsistency.
///
/// Equality, ordering, and hashing ignore the trace: two derivations that
/// differ only in the interleaving of independent steps or in same-tick
/// instance choices are the same extension.
#[derive(Debug, Clone)]
pub struct Extension {
    pub proven: BTreeMap<(Literal, Tag), ProvenCount>,
    pub refuted: BTreeSet<(Literal, Tag)>,
    pub supported: BTreeSet<Literal>,
    pub cyclic: bool,
    pub inconsistent: Option<Literal>,
    pub trace: Vec<DerivationStep>,
}

impl Extension {
    fn key(
        &self,
    ) -> (
        &Option<Literal>,
        bool,
        &BTreeMap<(Literal, Tag), ProvenCount>,
        &BTreeSet<(Literal, Tag)>,
        &BTreeSet<Literal>,
    ) {
        (
            &self.inconsistent,
            self.cyclic,
            &self.proven,
            &self.refuted,
            &self.supported,
        )
    }

    /// Total instances of `q` proven with `tag`.
    pub fn proven_count(&self, q: &Literal, tag: Tag) -> u32 {
        self.proven
            .get(&(q.clone(), tag))
            .map(|c| c.count)
            .unwrap_or(0)
    }

    /// Consumed instances of `q` across both proven tags.
    pub fn consumed_count(&self, q: &Literal) -> u32 {
        [Tag::StrictProven, Tag::DefeasiblyProven]
            .iter()
            .filter_map(|tag| self.proven.get(&(q.clone(), *tag)))
            .map(|c| c.consumed)
            .sum()
    }

    pub fn is_refuted(&self, q: &Literal, tag: Tag) -> bool {
        self.refuted.contains(&(q.clone(), tag))
    }
}

impl PartialEq for Extension {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Extension {}

impl PartialOrd for Extension {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extension {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(lit) = &self.inconsistent {
            return write!(f, "inconsistent({lit})");
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            Ok(())
        };
        for ((lit, tag), counts) in &self.proven {
            sep(f)?;
            write!(f, "{tag}{lit}")?;
            if counts.count > 1 {
                write!(f, "×{}", counts.count)?;
            }
            if counts.consumed > 0 {
                write!(f, "✓{}", counts.consumed)?;
            }
        }
        for (lit, tag) in &self.refuted {
            sep(f)?;
            write!(f, "{tag}{lit}")?;
        }
        for lit in &self.supported {
            sep(f)?;
            write!(f, "+σ{lit}")?;
        }
        if self.cyclic {
            sep(f)?;
            f.write_str("cyclic")?;
        }
        if first {
            f.write_str("empty")?;
        }
        Ok(())
    }
}

/// Aggregates a state into its canonical extension: proven instances
/// grouped by (literal, tag) with consumption counts, sorted refuted and
/// supported sets. Interleaving order and same-tick instance identity
/// disappear here.
pub fn canonicalize(state: &DerivationState) -> Extension {
    let mut proven: BTreeMap<(Literal, Tag), ProvenCount> = BTreeMap::new();
    let mut refuted = BTreeSet::new();
    let mut supported = BTreeSet::new();
    for step in state.steps() {
        match step.tag {
            Tag::StrictProven | Tag::DefeasiblyProven => {
                let entry = proven
                    .entry((step.literal.clone(), step.tag))
                    .or_default();
                entry.count += 1;
                if step.consumed_at.is_some() {
                    entry.consumed += 1;
                }
            }
            Tag::StrictRefuted | Tag::DefeasiblyRefuted => {
                refuted.insert((step.literal.clone(), step.tag));
            }
            Tag::Supported => {
                supported.insert(step.literal.clone());
            }
        }
    }
    Extension {
        proven,
        refuted,
        supported,
        cyclic: false,
        inconsistent: None,
        trace: state.steps().to_vec(),
    }
}

/// The forward-relevant part of a state: unconsumed instances in tick
/// order, proven counts, refutation and support sets, and per-rule
/// realizable sequence prefixes. Two states with equal full keys have
/// identical futures and identical conclusions so far.
#[derive(PartialEq, Eq, Hash, Clone)]
struct StateKey {
    /// Tick groups of instances: (literal, tag, consumed), sorted within
    /// a group. The full key keeps consumed instances (their order still
    /// drives sequence applicability); the loop key drops them.
    groups: Vec<Vec<(Literal, Tag, bool)>>,
    counts: Vec<((Literal, Tag), u32)>,
    refuted: Vec<(Literal, Tag)>,
    supported: Vec<Literal>,
    /// Greedy matchable prefix per sequence-bodied rule, per mode, over
    /// all proofs. Captures the order history that capped counts lose.
    prefixes: Vec<(Label, u8)>,
}

fn state_key(state: &DerivationState, capped: bool) -> StateKey {
    let theory = state.theory();
    let mut groups: Vec<Vec<(Literal, Tag, bool)>> = Vec::new();
    let mut last_time = None;
    let mut counts: BTreeMap<(Literal, Tag), u32> = BTreeMap::new();
    let mut refuted = BTreeSet::new();
    let mut supported = BTreeSet::new();
    for step in state.steps() {
        match step.tag {
            Tag::StrictProven | Tag::DefeasiblyProven if step.is_resource() => {
                let consumed = step.consumed_at.is_some();
                if !capped || !consumed {
                    if last_time != Some(step.time()) {
                        groups.push(Vec::new());
                        last_time = Some(step.time());
                    }
                    groups
                        .last_mut()
                        .unwrap()
                        .push((step.literal.clone(), step.tag, consumed));
                }
                *counts.entry((step.literal.clone(), step.tag)).or_insert(0) += 1;
            }
            Tag::StrictProven | Tag::DefeasiblyProven => {
                *counts.entry((step.literal.clone(), step.tag)).or_insert(0) += 1;
            }
            Tag::StrictRefuted | Tag::DefeasiblyRefuted => {
                refuted.insert((step.literal.clone(), step.tag));
            }
            Tag::Supported => {
                supported.insert(step.literal.clone());
            }
        }
    }
    for group in &mut groups {
        group.sort();
    }
    if capped {
        for ((lit, _), count) in counts.iter_mut() {
            let cap = theory.multiplicity_cap(lit) as u32;
            *count = (*count).min(cap);
        }
    }

    let mut prefixes = Vec::new();
    if capped {
        for rule in theory.rules() {
            if rule.body.kind() != crate::rule::BodyKind::Sequence {
                continue;
            }
            for mode in [
                crate::engine::Mode::Strict,
                crate::engine::Mode::Defeasible,
                crate::engine::Mode::Support,
            ] {
                let prefix = matchable_prefix_over(state, rule.body.items(), mode);
                prefixes.push((rule.label.clone(), prefix as u8));
            }
        }
    }

    StateKey {
        groups,
        counts: counts.into_iter().collect(),
        refuted: refuted.into_iter().collect(),
        supported: supported.into_iter().collect(),
        prefixes,
    }
}

fn matchable_prefix_over(
    state: &DerivationState,
    items: &[Literal],
    mode: crate::engine::Mode,
) -> usize {
    let mut matched = 0;
    let mut last_time: Option<u32> = None;
    for step in state.steps() {
        if matched == items.len() {
            break;
        }
        let counts = match (mode, step.tag, step.is_resource()) {
            (crate::engine::Mode::Strict, Tag::StrictProven, true) => true,
            (crate::engine::Mode::Defeasible, Tag::StrictProven | Tag::DefeasiblyProven, true) => {
                true
            }
            (
                crate::engine::Mode::Support,
                Tag::StrictProven | Tag::DefeasiblyProven,
                true,
            ) => true,
            (crate::engine::Mode::Support, Tag::Supported, _) => true,
            _ => false,
        };
        if !counts {
            continue;
        }
        let later = last_time.map_or(true, |t| step.time() > t);
        if later && step.literal == items[matched] {
            last_time = Some(step.time());
            matched += 1;
        }
    }
    matched
}

/// Moves that commute with every other move and can never be foreclosed,
/// so exploring their orders adds nothing.
///
/// Support steps qualify: no fight, emission, or payment reads the
/// support set. A strict refutation qualifies when no strict rule
/// concludes the literal: it can then never be proven strictly, every
/// strict rule consuming it is already permanently non-consumable, and
/// the defeasible fights never read strict refutations. A defeasible
/// refutation additionally requires that no rule consumes the literal:
/// refuting a body literal discards rules, and the timing of a discard
/// changes which members a firing emits and which team pays.
fn is_eager(theory: &Theory, mv: &Move) -> bool {
    match mv.kind {
        MoveKind::SupportStep => true,
        MoveKind::RefuteStrict => theory
            .rules_for(&mv.target, RuleSelector::Strict)
            .is_empty(),
        MoveKind::RefuteDefeasible => {
            theory
                .rules_for(&mv.target, RuleSelector::StrictOrDefeasible)
                .is_empty()
                && !theory.rules().iter().any(|r| r.body.contains(&mv.target))
        }
        _ => false,
    }
}

struct Explorer {
    theory: Arc<Theory>,
    max_steps: usize,
    memo: HashMap<StateKey, MemoEntry>,
}

struct MemoEntry {
    extensions: Vec<Extension>,
    /// False when the subtree was cut by the loop bound, making it
    /// path-dependent and unsafe to reuse.
    clean: bool,
    /// Steps beyond the memo point the subtree needed.
    needed: usize,
}

enum Saturated {
    Done(DerivationState),
    Bounded(DerivationState),
}

impl Explorer {
    /// Applies eager moves to a fixpoint, in deterministic order.
    fn saturate(&self, mut state: DerivationState) -> Saturated {
        loop {
            let next = enabled_moves(&state)
                .into_iter()
                .find(|mv| is_eager(&self.theory, mv));
            match next {
                None => return Saturated::Done(state),
                Some(mv) => {
                    if state.len() >= self.max_steps {
                        return Saturated::Bounded(state);
                    }
                    state = apply_move(&state, &mv).expect("eager moves are enabled");
                }
            }
        }
    }

    fn explore(&mut self, state: DerivationState, path: &mut Vec<StateKey>) -> (Vec<Extension>, bool) {
        let state = match self.saturate(state) {
            Saturated::Done(state) => state,
            Saturated::Bounded(state) => {
                let mut ext = canonicalize(&state);
                ext.cyclic = true;
                return (vec![ext], false);
            }
        };

        if let Some(literal) = strict_inconsistency(&state) {
            let ext = Extension {
                proven: BTreeMap::new(),
                refuted: BTreeSet::new(),
                supported: BTreeSet::new(),
                cyclic: false,
                inconsistent: Some(literal),
                trace: state.steps().to_vec(),
            };
            return (vec![ext], true);
        }

        let loop_key = state_key(&state, true);
        if path.contains(&loop_key) {
            let mut ext = canonicalize(&state);
            ext.cyclic = true;
            return (vec![ext], false);
        }

        let full_key = state_key(&state, false);
        let remaining = self.max_steps.saturating_sub(state.len());
        if let Some(entry) = self.memo.get(&full_key) {
            if entry.clean && entry.needed <= remaining {
                return (entry.extensions.clone(), true);
            }
        }

        let moves: Vec<Move> = enabled_moves(&state)
            .into_iter()
            .filter(|mv| !is_eager(&self.theory, mv))
            .collect();
        if moves.is_empty() {
            let ext = canonicalize(&state);
            let entry = MemoEntry {
                extensions: vec![ext.clone()],
                clean: true,
                needed: 0,
            };
            self.memo.insert(full_key, entry);
            return (vec![ext], true);
        }

        path.push(loop_key);
        let mut extensions: Vec<Extension> = Vec::new();
        let mut clean = true;
        for mv in &moves {
            if state.len() >= self.max_steps {
                let mut ext = canonicalize(&state);
                ext.cyclic = true;
                extensions.push(ext);
                clean = false;
                break;
            }
            match apply_move(&state, mv) {
                Ok(child) => {
                    let (child_exts, child_clean) = self.explore(child, path);
                    extensions.extend(child_exts);
                    clean &= child_clean;
                }
                Err(crate::engine::EngineError::InconsistentStrict { literal }) => {
                    extensions.push(Extension {
                        proven: BTreeMap::new(),
                        refuted: BTreeSet::new(),
                        supported: BTreeSet::new(),
                        cyclic: false,
                        inconsistent: Some(literal),
                        trace: state.steps().to_vec(),
                    });
                }
                Err(err) => {
                    unreachable!("enabled move failed to apply: {err}");
                }
            }
        }
        path.pop();

        extensions.sort();
        extensions.dedup();
        let needed = extensions
            .iter()
            .map(|e| e.trace.len().saturating_sub(state.len()))
            .max()
            .unwrap_or(0);
        if clean {
            self.memo.insert(
                full_key,
                MemoEntry {
                    extensions: extensions.clone(),
                    clean,
                    needed,
                },
            );
        }
        (extensions, clean)
    }
}

/// Depth-first exploration of every derivation order from the initial
/// state. Branches end at maximal derivations, at the step bound, or on
/// path-local state recurrence (both flagged cyclic); the result is the
/// canonical, deduplicated extension set, sorted.
pub fn enumerate_extensions(theory: &Theory) -> Vec<Extension> {
    enumerate_with_workers(theory, 1)
}

/// [`enumerate_extensions`] with the top-level branches split across
/// `workers` threads. The result is identical for every worker count.
pub fn enumerate_with_workers(theory: &Theory, workers: usize) -> Vec<Extension> {
    let theory = Arc::new(theory.clone());
    let max_steps = theory.config().max_steps as usize;
    let root = DerivationState::init(theory.clone());

    let mut explorer = Explorer {
        theory: theory.clone(),
        max_steps,
        memo: HashMap::new(),
    };
    let root = match explorer.saturate(root) {
        Saturated::Done(state) => state,
        Saturated::Bounded(state) => {
            let mut ext = canonicalize(&state);
            ext.cyclic = true;
            return vec![ext];
        }
    };
    if let Some(literal) = strict_inconsistency(&root) {
        return vec![Extension {
            proven: BTreeMap::new(),
            refuted: BTreeSet::new(),
            supported: BTreeSet::new(),
            cyclic: false,
            inconsistent: Some(literal),
            trace: root.steps().to_vec(),
        }];
    }

    let moves: Vec<Move> = enabled_moves(&root)
        .into_iter()
        .filter(|mv| !is_eager(&theory, mv))
        .collect();
    if moves.is_empty() {
        return vec![canonicalize(&root)];
    }

    let workers = workers.max(1).min(moves.len());
    let mut extensions: Vec<Extension> = if workers == 1 {
        let root_key = state_key(&root, true);
        let mut out = Vec::new();
        for mv in &moves {
            let child = apply_or_inconsistency(&root, mv, &mut out);
            if let Some(child) = child {
                let mut path = vec![root_key.clone()];
                let (exts, _) = explorer.explore(child, &mut path);
                out.extend(exts);
            }
        }
        out
    } else {
        let root_key = state_key(&root, true);
        let mut slots: Vec<Vec<Extension>> = vec![Vec::new(); moves.len()];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in slot_chunks(moves.len(), workers) {
                let theory = theory.clone();
                let root = root.clone();
                let root_key = root_key.clone();
                let moves = &moves;
                handles.push(scope.spawn(move || {
                    let mut local = Explorer {
                        theory,
                        max_steps,
                        memo: HashMap::new(),
                    };
                    let mut results = Vec::new();
                    for i in chunk {
                        let mut out = Vec::new();
                        if let Some(child) = apply_or_inconsistency(&root, &moves[i], &mut out) {
                            let mut path = vec![root_key.clone()];
                            let (exts, _) = local.explore(child, &mut path);
                            out.extend(exts);
                        }
                        results.push((i, out));
                    }
                    results
                }));
            }
            for handle in handles {
                for (i, out) in handle.join().expect("worker panicked") {
                    slots[i] = out;
                }
            }
        });
        slots.into_iter().flatten().collect()
    };

    extensions.sort();
    extensions.dedup();
    extensions
}

fn slot_chunks(n: usize, workers: usize) -> Vec<Vec<usize>> {
    let count = workers.min(n).max(1);
    let mut chunks = vec![Vec::new(); count];
    for i in 0..n {
        chunks[i % count].push(i);
    }
    chunks
}

fn apply_or_inconsistency(
    state: &DerivationState,
    mv: &Move,
    out: &mut Vec<Extension>,
) -> Option<DerivationState> {
    match apply_move(state, mv) {
        Ok(child) => Some(child),
        Err(crate::engine::EngineError::InconsistentStrict { literal }) => {
            out.push(Extension {
                proven: BTreeMap::new(),
                refuted: BTreeSet::new(),
                supported: BTreeSet::new(),
                cyclic: false,
                inconsistent: Some(literal),
                trace: state.steps().to_vec(),
            });
            None
        }
        Err(err) => unreachable!("enabled move failed to apply: {err}"),
    }
}

/// Follows the single branch selected by the tie-break order at every
/// choice point. Loop-free deterministic derivations are members of the
/// enumerated set.
pub fn derive_deterministic(theory: &Theory) -> Extension {
    let theory_arc = Arc::new(theory.clone());
    let max_steps = theory.config().max_steps as usize;
    let explorer = Explorer {
        theory: theory_arc.clone(),
        max_steps,
        memo: HashMap::new(),
    };
    let mut state = DerivationState::init(theory_arc);
    let mut seen: Vec<StateKey> = Vec::new();
    loop {
        state = match explorer.saturate(state) {
            Saturated::Done(state) => state,
            Saturated::Bounded(state) => {
                let mut ext = canonicalize(&state);
                ext.cyclic = true;
                return ext;
            }
        };
        if let Some(literal) = strict_inconsistency(&state) {
            return Extension {
                proven: BTreeMap::new(),
                refuted: BTreeSet::new(),
                supported: BTreeSet::new(),
                cyclic: false,
                inconsistent: Some(literal),
                trace: state.steps().to_vec(),
            };
        }
        let key = state_key(&state, true);
        if seen.contains(&key) {
            let mut ext = canonicalize(&state);
            ext.cyclic = true;
            return ext;
        }
        let mv = enabled_moves(&state)
            .into_iter()
            .find(|mv| !is_eager(&explorer.theory, mv));
        match mv {
            None => return canonicalize(&state),
            Some(mv) => {
                if state.len() >= max_steps {
                    let mut ext = canonicalize(&state);
                    ext.cyclic = true;
                    return ext;
                }
                seen.push(key);
                state = apply_move(&state, &mv).expect("enabled move applies");
            }
        }
    }
}

/// Runs the derivation the configured way: one deterministic branch or
/// the full enumeration.
pub fn run(theory: &Theory) -> Vec<Extension> {
    match theory.config().enumeration {
        EnumerationMode::All => enumerate_extensions(theory),
        EnumerationMode::Deterministic => vec![derive_deterministic(theory)],
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CostError {
    #[error("negative weight {weight} for atom {atom}")]
    NegativeWeight { atom: Atom, weight: f64 },
    #[error("cost file line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Per-atom nonnegative weights; unlisted atoms weigh 1. The cost of an
/// extension is the weighted count of its consumed instances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostMap {
    weights: BTreeMap<Atom, f64>,
}

impl CostMap {
    pub fn new() -> CostMap {
        CostMap::default()
    }

    pub fn set(&mut self, atom: Atom, weight: f64) -> Result<(), CostError> {
        if weight < 0.0 {
            return Err(CostError::NegativeWeight { atom, weight });
        }
        self.weights.insert(atom, weight);
        Ok(())
    }

    pub fn weight(&self, atom: &Atom) -> f64 {
        self.weights.get(atom).copied().unwrap_or(1.0)
    }

    /// Every weight multiplied by a positive constant; ranking order is
    /// invariant under this.
    pub fn scaled(&self, factor: f64) -> CostMap {
        CostMap {
            weights: self
                .weights
                .iter()
                .map(|(a, w)| (a.clone(), w * factor))
                .collect(),
        }
    }

    /// Parses the cost-map file format: one `<atom> <weight>` pair per
    /// line; blank lines and `%` comments ignored.
    pub fn parse(text: &str) -> Result<CostMap, CostError> {
        let mut map = CostMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('%').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(atom), Some(weight), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(CostError::Malformed {
                    line: i + 1,
                    message: "expected `<atom> <weight>`".to_string(),
                });
            };
            let weight: f64 = weight.parse().map_err(|_| CostError::Malformed {
                line: i + 1,
                message: format!("bad weight {weight:?}"),
            })?;
            map.set(Atom::new(atom), weight)?;
        }
        Ok(map)
    }

    pub fn cost(&self, extension: &Extension) -> f64 {
        extension
            .proven
            .iter()
            .map(|((lit, _), counts)| counts.consumed as f64 * self.weight(lit.atom()))
            .sum()
    }
}

/// Orders extensions by ascending consumed cost; ties break on the
/// canonical extension order, and cyclic extensions rank after all
/// acyclic ones.
pub fn rank_extensions(
    extensions: &[Extension],
    costs: &CostMap,
) -> Result<Vec<(Extension, f64)>, CostError> {
    for (atom, weight) in &costs.weights {
        if *weight < 0.0 {
            return Err(CostError::NegativeWeight {
                atom: atom.clone(),
                weight: *weight,
            });
        }
    }
    let mut ranked: Vec<(Extension, f64)> = extensions
        .iter()
        .map(|e| (e.clone(), costs.cost(e)))
        .collect();
    ranked.sort_by(|(a, ca), (b, cb)| {
        a.cyclic
            .cmp(&b.cyclic)
            .then_with(|| ca.total_cmp(cb))
            .then_with(|| a.cmp(b))
    });
    Ok(ranked)
}
