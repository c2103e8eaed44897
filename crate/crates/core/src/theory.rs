//! Theories: initial resources, rules, and the superiority relation.
//! A `Theory` value is always validated; construction fails with a
//! `ValidationReport` otherwise, and everything downstream may assume
//! well-formedness.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::literal::{Atom, Literal};
use crate::rule::{BodyKind, Label, Rule, RuleHead, RuleKind};

/// Which team-defeater comparison the multiset-head defeasible step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadVariant {
    /// A winning team is required for every literal in the head; one lost
    /// fight blocks the whole firing.
    WholeHead,
    /// Each head literal fights its own attackers; lost members are
    /// skipped, the rest are produced.
    #[default]
    PerLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationMode {
    #[default]
    All,
    Deterministic,
}

/// Total order on rule labels, used to break ties between otherwise
/// equivalent choices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Lexicographic,
    /// Labels listed first rank first; unlisted labels compare
    /// lexicographically after all listed ones.
    Custom(Vec<Label>),
}

impl TieBreak {
    pub fn cmp_labels(&self, a: &Label, b: &Label) -> Ordering {
        match self {
            TieBreak::Lexicographic => a.cmp(b),
            TieBreak::Custom(order) => {
                let pos = |l: &Label| order.iter().position(|o| o == l);
                match (pos(a), pos(b)) {
                    (Some(x), Some(y)) => x.cmp(&y),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => a.cmp(b),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReasonerConfig {
    pub head_variant: HeadVariant,
    pub max_steps: u32,
    pub enumeration: EnumerationMode,
    pub tie_break: TieBreak,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig {
            head_variant: HeadVariant::default(),
            max_steps: 1000,
            enumeration: EnumerationMode::default(),
            tie_break: TieBreak::default(),
        }
    }
}

/// One well-formedness violation found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateLabel(Label),
    DanglingSuperiority(Label),
    ReflexiveSuperiority(Label),
    SuperiorityCycle(Vec<Label>),
    EmptyHead(Label),
    /// Complementary facts while a strict rule produces either literal:
    /// the strict fragment would be inconsistent from the start.
    ComplementaryFacts(Atom),
    MaxStepsBelowFacts {
        max_steps: u32,
        facts: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateLabel(l) => write!(f, "duplicate rule label `{l}`"),
            Violation::DanglingSuperiority(l) => {
                write!(f, "superiority refers to unknown label `{l}`")
            }
            Violation::ReflexiveSuperiority(l) => {
                write!(f, "irreflexive superiority violated: `{l} > {l}`")
            }
            Violation::SuperiorityCycle(ls) => {
                write!(f, "superiority cycle: ")?;
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        write!(f, " > ")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
            Violation::EmptyHead(l) => write!(f, "rule `{l}` has an empty head"),
            Violation::ComplementaryFacts(a) => write!(
                f,
                "facts contain both `{a}` and `~{a}` while a strict rule concludes one of them"
            ),
            Violation::MaxStepsBelowFacts { max_steps, facts } => write!(
                f,
                "max_steps {max_steps} is below the number of fact instances {facts}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Rule selection, mirroring the usual abbreviations over a rule set:
/// all rules for a literal, the strict subset, the non-defeater subset,
/// and the positional head lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSelector {
    /// Every rule with the literal anywhere in its head, defeaters included.
    Any,
    Strict,
    StrictOrDefeasible,
    /// Rules with a sequence head whose i-th position (1-based) is the
    /// literal. Out-of-range indices select nothing.
    HeadSeqIndex(usize),
    /// Rules with the literal in a multiset head.
    HeadMultiset,
}

/// A validated theory: fact multiset, rule set, superiority relation,
/// reasoner configuration. Immutable after construction and safe to share
/// across concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    facts: Vec<Literal>,
    rules: Vec<Rule>,
    superiority: Vec<(Label, Label)>,
    config: ReasonerConfig,
}

impl Theory {
    /// Validates and builds. Facts keep multiplicity but are sorted;
    /// superiority pairs are sorted and deduplicated.
    pub fn new(
        facts: Vec<Literal>,
        rules: Vec<Rule>,
        superiority: Vec<(Label, Label)>,
        config: ReasonerConfig,
    ) -> Result<Theory, ValidationReport> {
        let report = Theory::validate(&facts, &rules, &superiority, &config);
        if !report.is_valid() {
            return Err(report);
        }
        let mut facts = facts;
        facts.sort();
        let mut rules = rules;
        rules.sort_by(|a, b| a.label.cmp(&b.label));
        let mut superiority = superiority;
        superiority.sort();
        superiority.dedup();
        Ok(Theory {
            facts,
            rules,
            superiority,
            config,
        })
    }

    pub fn empty() -> Theory {
        Theory::new(Vec::new(), Vec::new(), Vec::new(), ReasonerConfig::default())
            .expect("empty theory is valid")
    }

    /// Deterministic, side-effect-free well-formedness check. The report
    /// lists every violation found; a theory is valid iff there are none.
    pub fn validate(
        facts: &[Literal],
        rules: &[Rule],
        superiority: &[(Label, Label)],
        config: &ReasonerConfig,
    ) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = HashSet::new();
        for rule in rules {
            if !seen.insert(&rule.label) {
                violations.push(Violation::DuplicateLabel(rule.label.clone()));
            }
            if rule.head.is_empty() {
                violations.push(Violation::EmptyHead(rule.label.clone()));
            }
        }

        let labels: HashSet<&Label> = rules.iter().map(|r| &r.label).collect();
        let mut edges: BTreeMap<&Label, Vec<&Label>> = BTreeMap::new();
        let mut dangling = BTreeSet::new();
        for (stronger, weaker) in superiority {
            for l in [stronger, weaker] {
                if !labels.contains(l) {
                    dangling.insert(l.clone());
                }
            }
            if stronger == weaker {
                violations.push(Violation::ReflexiveSuperiority(stronger.clone()));
            } else if labels.contains(stronger) && labels.contains(weaker) {
                edges.entry(stronger).or_default().push(weaker);
            }
        }
        violations.extend(dangling.into_iter().map(Violation::DanglingSuperiority));
        if let Some(cycle) = find_cycle(&edges) {
            violations.push(Violation::SuperiorityCycle(cycle));
        }

        // Complementary fact pairs are rejected only when the strict
        // fragment could turn them into an inconsistency.
        let fact_set: HashSet<&Literal> = facts.iter().collect();
        let mut flagged = BTreeSet::new();
        for fact in facts {
            let opposite = fact.complement();
            if fact.is_positive() && fact_set.contains(&opposite) {
                let strict_for_either = rules.iter().any(|r| {
                    r.kind == RuleKind::Strict
                        && (r.head.contains(fact) || r.head.contains(&opposite))
                });
                if strict_for_either {
                    flagged.insert(fact.atom().clone());
                }
            }
        }
        violations.extend(flagged.into_iter().map(Violation::ComplementaryFacts));

        if (config.max_steps as usize) < facts.len() {
            violations.push(Violation::MaxStepsBelowFacts {
                max_steps: config.max_steps,
                facts: facts.len(),
            });
        }

        ValidationReport { violations }
    }

    pub fn facts(&self) -> &[Literal] {
        &self.facts
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn superiority(&self) -> &[(Label, Label)] {
        &self.superiority
    }

    pub fn config(&self) -> &ReasonerConfig {
        &self.config
    }

    /// Same theory under a different configuration; re-validates the
    /// config-dependent invariants.
    pub fn with_config(self, config: ReasonerConfig) -> Result<Theory, ValidationReport> {
        Theory::new(self.facts, self.rules, self.superiority, config)
    }

    pub fn rule(&self, label: &Label) -> Option<&Rule> {
        self.rules.iter().find(|r| &r.label == label)
    }

    pub fn is_fact(&self, q: &Literal) -> bool {
        self.facts.contains(q)
    }

    /// True when `stronger > weaker` is in the superiority relation.
    pub fn superior(&self, stronger: &Label, weaker: &Label) -> bool {
        self.superiority
            .iter()
            .any(|(s, w)| s == stronger && w == weaker)
    }

    /// The rules matching a selector for `q`; see [`RuleSelector`].
    pub fn rules_for(&self, q: &Literal, selector: RuleSelector) -> Vec<&Rule> {
        self.rules
            .iter()
            .filter(|r| match selector {
                RuleSelector::Any => r.head.contains(q),
                RuleSelector::Strict => r.kind == RuleKind::Strict && r.head.contains(q),
                RuleSelector::StrictOrDefeasible => {
                    r.kind != RuleKind::Defeater && r.head.contains(q)
                }
                RuleSelector::HeadSeqIndex(i) => match &r.head {
                    RuleHead::Sequence(items) => {
                        i >= 1 && i <= items.len() && &items[i - 1] == q
                    }
                    _ => false,
                },
                RuleSelector::HeadMultiset => {
                    matches!(&r.head, RuleHead::Multiset(items) if items.contains(q))
                }
            })
            .collect()
    }

    /// Every literal that appears textually in the theory: facts, bodies,
    /// and heads. Refutation and support moves range over this set.
    pub fn signature(&self) -> BTreeSet<Literal> {
        let mut out: BTreeSet<Literal> = self.facts.iter().cloned().collect();
        for rule in &self.rules {
            out.extend(rule.body.items().iter().cloned());
            out.extend(rule.head.literals().iter().cloned());
        }
        out
    }

    /// True if any rule has a sequence body; instance identity within the
    /// pool only matters then.
    pub fn has_sequence_bodies(&self) -> bool {
        self.rules
            .iter()
            .any(|r| r.body.kind() == BodyKind::Sequence)
    }

    /// Largest multiplicity of `q` across rule bodies, at least 1. Proven
    /// counts beyond this cap are indistinguishable to every predicate.
    pub fn multiplicity_cap(&self, q: &Literal) -> usize {
        self.rules
            .iter()
            .map(|r| r.body.items().iter().filter(|l| *l == q).count())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// Structural equality: facts, rules, and superiority, ignoring the
    /// reasoner configuration. The round-trip guarantee of the text format
    /// is stated in these terms.
    pub fn structural_eq(&self, other: &Theory) -> bool {
        self.facts == other.facts
            && self.rules == other.rules
            && self.superiority == other.superiority
    }
}

/// Finds one cycle in the superiority digraph, if any.
fn find_cycle<'a>(edges: &BTreeMap<&'a Label, Vec<&'a Label>>) -> Option<Vec<Label>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<&Label, Mark> = HashMap::new();
    let mut stack: Vec<&Label> = Vec::new();

    fn visit<'a>(
        node: &'a Label,
        edges: &BTreeMap<&'a Label, Vec<&'a Label>>,
        marks: &mut HashMap<&'a Label, Mark>,
        stack: &mut Vec<&'a Label>,
    ) -> Option<Vec<Label>> {
        match marks.get(node) {
            Some(Mark::Done) => return None,
            Some(Mark::Open) => {
                let start = stack.iter().position(|l| *l == node).unwrap();
                let mut cycle: Vec<Label> =
                    stack[start..].iter().map(|l| (*l).clone()).collect();
                cycle.push(node.clone());
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(node, Mark::Open);
        stack.push(node);
        if let Some(next) = edges.get(node) {
            for n in next {
                if let Some(cycle) = visit(n, edges, marks, stack) {
                    return Some(cycle);
                }
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        None
    }

    for node in edges.keys() {
        if let Some(cycle) = visit(node, edges, &mut marks, &mut stack) {
            return Some(cycle);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::RuleBody;

    fn lit(s: &str) -> Literal {
        s.parse().unwrap()
    }

    fn defeasible(label: &str, body: &[&str], head: &str) -> Rule {
        Rule::new(
            Label::new(label),
            RuleBody::multiset(body.iter().map(|s| lit(s)).collect()),
            RuleKind::Defeasible,
            RuleHead::single(lit(head)),
        )
    }

    fn vending() -> Theory {
        Theory::new(
            vec![lit("dollar")],
            vec![
                defeasible("r1", &["dollar"], "cola"),
                defeasible("r2", &["outOfOrder"], "~cola"),
                defeasible("r3", &["off"], "~cola"),
            ],
            vec![],
            ReasonerConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn vending_theory_is_valid() {
        let report = Theory::validate(
            vending().facts(),
            vending().rules(),
            vending().superiority(),
            vending().config(),
        );
        assert!(report.is_valid());
    }

    #[test]
    fn reflexive_superiority_is_a_violation() {
        let rules = vec![defeasible("r", &["a"], "b")];
        let report = Theory::validate(
            &[],
            &rules,
            &[(Label::new("r"), Label::new("r"))],
            &ReasonerConfig::default(),
        );
        assert!(report
            .violations
            .contains(&Violation::ReflexiveSuperiority(Label::new("r"))));
    }

    #[test]
    fn superiority_cycle_is_detected() {
        let rules = vec![defeasible("r", &["a"], "b"), defeasible("s", &["a"], "c")];
        let report = Theory::validate(
            &[],
            &rules,
            &[
                (Label::new("r"), Label::new("s")),
                (Label::new("s"), Label::new("r")),
            ],
            &ReasonerConfig::default(),
        );
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SuperiorityCycle(_))));
    }

    #[test]
    fn duplicate_labels_and_dangling_superiority_are_violations() {
        let rules = vec![defeasible("r", &["a"], "b"), defeasible("r", &["a"], "c")];
        let report = Theory::validate(
            &[],
            &rules,
            &[(Label::new("r"), Label::new("ghost"))],
            &ReasonerConfig::default(),
        );
        assert!(report
            .violations
            .contains(&Violation::DuplicateLabel(Label::new("r"))));
        assert!(report
            .violations
            .contains(&Violation::DanglingSuperiority(Label::new("ghost"))));
    }

    #[test]
    fn complementary_facts_rejected_only_with_strict_rules() {
        let facts = vec![lit("p"), lit("~p")];
        let no_strict = Theory::validate(&facts, &[], &[], &ReasonerConfig::default());
        assert!(no_strict.is_valid());

        let strict = Rule::new(
            Label::new("s"),
            RuleBody::multiset(vec![lit("a")]),
            RuleKind::Strict,
            RuleHead::single(lit("p")),
        );
        let with_strict =
            Theory::validate(&facts, &[strict], &[], &ReasonerConfig::default());
        assert!(with_strict
            .violations
            .contains(&Violation::ComplementaryFacts(Atom::new("p"))));
    }

    #[test]
    fn max_steps_must_cover_facts() {
        let facts = vec![lit("a"), lit("b"), lit("c")];
        let config = ReasonerConfig {
            max_steps: 2,
            ..ReasonerConfig::default()
        };
        let report = Theory::validate(&facts, &[], &[], &config);
        assert!(!report.is_valid());
    }

    #[test]
    fn rules_for_selectors() {
        let t = vending();
        let names = |rules: Vec<&Rule>| {
            rules
                .iter()
                .map(|r| r.label.as_str().to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(
            names(t.rules_for(&lit("~cola"), RuleSelector::Any)),
            vec!["r2", "r3"]
        );
        assert!(t.rules_for(&lit("cola"), RuleSelector::Strict).is_empty());

        let seq_head = Theory::new(
            vec![],
            vec![Rule::new(
                Label::new("r"),
                RuleBody::multiset(vec![lit("a")]),
                RuleKind::Strict,
                RuleHead::sequence(vec![lit("b"), lit("c")]),
            )],
            vec![],
            ReasonerConfig::default(),
        )
        .unwrap();
        assert_eq!(
            names(seq_head.rules_for(&lit("b"), RuleSelector::HeadSeqIndex(1))),
            vec!["r"]
        );
        assert!(seq_head
            .rules_for(&lit("b"), RuleSelector::HeadSeqIndex(2))
            .is_empty());
        assert!(seq_head
            .rules_for(&lit("b"), RuleSelector::HeadSeqIndex(0))
            .is_empty());
        assert!(seq_head
            .rules_for(&lit("b"), RuleSelector::HeadSeqIndex(9))
            .is_empty());
    }

    #[test]
    fn selector_inclusions_hold() {
        let t = vending();
        for q in t.signature() {
            let strict = t.rules_for(&q, RuleSelector::Strict);
            let sd = t.rules_for(&q, RuleSelector::StrictOrDefeasible);
            let any = t.rules_for(&q, RuleSelector::Any);
            for r in &strict {
                assert!(sd.contains(r));
            }
            for r in &sd {
                assert!(any.contains(r));
            }
        }
    }
}
