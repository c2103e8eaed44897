//! Derivation states: the append-only step log plus its derived views.

use std::fmt;
use std::sync::Arc;

use crate::engine::EngineError;
use crate::literal::Literal;
use crate::rule::Label;
use crate::theory::Theory;

pub use crate::tags::Tag;

/// What licensed a step: a fact instance, a rule firing, or a failure
/// scan (refutations).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Fact,
    Rule(Label),
    FailureScan,
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Fact => f.write_str("fact"),
            Justification::Rule(label) => write!(f, "rule {label}"),
            Justification::FailureScan => f.write_str("scan"),
        }
    }
}

/// One column of the derivation log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    /// 1-based position in the log.
    pub index: u32,
    pub tag: Tag,
    pub literal: Literal,
    pub justification: Justification,
    /// Index of the step that consumed this instance, always greater than
    /// `index`, set at most once.
    pub consumed_at: Option<u32>,
    /// For the anchor step of a firing: the instances it consumed.
    pub consumed_from: Vec<u32>,
    /// Ordering tick. Facts share tick 0; each later event takes fresh
    /// ticks, and simultaneous multiset-head emissions share one.
    time: u32,
    /// The operation that appended this step; steps of one firing
    /// (including its automatic strict refutations) share an event.
    event: u32,
    /// Whether this step is a consumable instance. Refutations, support
    /// steps, and restatements of strict conclusions are not.
    resource: bool,
}

impl DerivationStep {
    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn event(&self) -> u32 {
        self.event
    }

    pub fn is_resource(&self) -> bool {
        self.resource
    }

    pub fn is_unconsumed_resource(&self) -> bool {
        self.resource && self.consumed_at.is_none()
    }
}

/// An immutable derivation state. Step operations return new states; the
/// log is never edited except for setting `consumed_at` exactly once per
/// instance, and replaying the log from the initial state reproduces the
/// state exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationState {
    theory: Arc<Theory>,
    steps: Vec<DerivationStep>,
    next_time: u32,
    next_event: u32,
}

impl DerivationState {
    /// The initial state: one strictly-proven step per fact instance, all
    /// unconsumed and simultaneous.
    pub fn init(theory: Arc<Theory>) -> DerivationState {
        let steps = theory
            .facts()
            .iter()
            .enumerate()
            .map(|(i, fact)| DerivationStep {
                index: (i + 1) as u32,
                tag: Tag::StrictProven,
                literal: fact.clone(),
                justification: Justification::Fact,
                consumed_at: None,
                consumed_from: Vec::new(),
                time: 0,
                event: 0,
                resource: true,
            })
            .collect();
        DerivationState {
            theory,
            steps,
            next_time: 1,
            next_event: 1,
        }
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }

    pub fn steps(&self) -> &[DerivationStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, index: u32) -> Option<&DerivationStep> {
        if index == 0 {
            return None;
        }
        self.steps.get(index as usize - 1)
    }

    /// True if any step carries `(literal, tag)`.
    pub fn has(&self, literal: &Literal, tag: Tag) -> bool {
        self.steps
            .iter()
            .any(|s| s.tag == tag && &s.literal == literal)
    }

    /// The available pool: unconsumed proven instances.
    pub fn pool(&self) -> impl Iterator<Item = &DerivationStep> {
        self.steps.iter().filter(|s| s.is_unconsumed_resource())
    }

    /// Marks every plan entry as consumed at step index `at`. Entries must
    /// be unconsumed proven instances appearing before `at`; consuming an
    /// instance twice is an error.
    pub fn consume(&self, plan: &[u32], at: u32) -> Result<DerivationState, EngineError> {
        let mut next = self.clone();
        next.consume_in_place(plan, at)?;
        Ok(next)
    }

    pub(crate) fn consume_in_place(&mut self, plan: &[u32], at: u32) -> Result<(), EngineError> {
        for &index in plan {
            let step = self
                .steps
                .get_mut(index.wrapping_sub(1) as usize)
                .filter(|_| index >= 1)
                .ok_or(EngineError::NoSuchStep { index })?;
            if !step.resource || !step.tag.is_proven() {
                return Err(EngineError::NotAnInstance { index });
            }
            if step.consumed_at.is_some() {
                return Err(EngineError::AlreadyConsumed { index });
            }
            if index >= at {
                return Err(EngineError::ConsumptionOrder { index });
            }
            step.consumed_at = Some(at);
        }
        Ok(())
    }

    pub(crate) fn alloc_time(&mut self) -> u32 {
        let t = self.next_time;
        self.next_time += 1;
        t
    }

    pub(crate) fn alloc_event(&mut self) -> u32 {
        let e = self.next_event;
        self.next_event += 1;
        e
    }

    pub(crate) fn append(
        &mut self,
        tag: Tag,
        literal: Literal,
        justification: Justification,
        consumed_from: Vec<u32>,
        time: u32,
        event: u32,
        resource: bool,
    ) -> u32 {
        let index = (self.steps.len() + 1) as u32;
        self.steps.push(DerivationStep {
            index,
            tag,
            literal,
            justification,
            consumed_at: None,
            consumed_from,
            time,
            event,
            resource,
        });
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::ReasonerConfig;

    fn lit(s: &str) -> Literal {
        s.parse().unwrap()
    }

    fn theory_with_facts(facts: &[&str]) -> Arc<Theory> {
        Arc::new(
            Theory::new(
                facts.iter().map(|s| lit(s)).collect(),
                vec![],
                vec![],
                ReasonerConfig::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn init_emits_one_step_per_fact_instance() {
        let state = DerivationState::init(theory_with_facts(&["dollar"]));
        assert_eq!(state.len(), 1);
        assert_eq!(state.steps()[0].tag, Tag::StrictProven);
        assert_eq!(state.steps()[0].literal, lit("dollar"));
        assert_eq!(state.steps()[0].justification, Justification::Fact);

        let empty = DerivationState::init(theory_with_facts(&[]));
        assert_eq!(empty.len(), 0);
    }

    #[test]
    fn duplicate_facts_are_distinct_instances() {
        let state = DerivationState::init(theory_with_facts(&["a", "a"]));
        assert_eq!(state.pool().count(), 2);
        // simultaneous for ordering purposes
        assert_eq!(state.steps()[0].time(), state.steps()[1].time());
        assert_ne!(state.steps()[0].index, state.steps()[1].index);
    }

    #[test]
    fn consume_marks_instances_once() {
        let state = DerivationState::init(theory_with_facts(&["a", "b"]));
        let consumed = state.consume(&[1], 3).unwrap();
        assert_eq!(consumed.steps()[0].consumed_at, Some(3));
        assert_eq!(consumed.pool().count(), 1);
        // the original state is untouched
        assert_eq!(state.pool().count(), 2);

        assert_eq!(
            consumed.consume(&[1], 4),
            Err(EngineError::AlreadyConsumed { index: 1 })
        );
        assert_eq!(
            state.consume(&[5], 6),
            Err(EngineError::NoSuchStep { index: 5 })
        );
        assert_eq!(
            state.consume(&[2], 2),
            Err(EngineError::ConsumptionOrder { index: 2 })
        );
    }

    #[test]
    fn empty_plan_changes_nothing() {
        let state = DerivationState::init(theory_with_facts(&["a"]));
        let next = state.consume(&[], 2).unwrap();
        assert_eq!(next.steps(), state.steps());
    }
}
