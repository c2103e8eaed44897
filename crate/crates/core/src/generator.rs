//! Seeded random theories for the agreement corpus and property suites.
//!
//! Generated theories are stratified: every rule's body draws on atoms
//! strictly below its head atoms, so production is acyclic. A static
//! worst-case step bound keeps every derivation comfortably inside the
//! oracle step budget, and complementary fact pairs and strict-on-strict
//! complements are avoided so the strict fragment stays consistent.
//! Conflicts, defeaters, superiority chains, sequence bodies and heads,
//! and both multiset-head variants all occur.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::literal::{Atom, Literal, Polarity};
use crate::rule::{Label, Rule, RuleBody, RuleHead, RuleKind};
use crate::theory::{HeadVariant, ReasonerConfig, Theory};

const ATOM_NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

/// One random theory within the oracle bounds whose derivations cannot
/// reach the step budget.
pub fn random_theory(rng: &mut ChaCha8Rng) -> Theory {
    loop {
        if let Some(theory) = try_random_theory(rng) {
            return theory;
        }
    }
}

/// A deterministic corpus of `count` theories derived from `seed`.
pub fn corpus(seed: u64, count: usize) -> Vec<Theory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_theory(&mut rng)).collect()
}

fn try_random_theory(rng: &mut ChaCha8Rng) -> Option<Theory> {
    let n_atoms = rng.gen_range(2..=4usize);
    let atoms: Vec<Atom> = ATOM_NAMES[..n_atoms].iter().map(|s| Atom::new(*s)).collect();
    let lit = |rng: &mut ChaCha8Rng, atom: &Atom| {
        let polarity = if rng.gen_bool(0.3) {
            Polarity::Negative
        } else {
            Polarity::Positive
        };
        Literal::new(atom.clone(), polarity)
    };

    let n_rules = rng.gen_range(1..=4usize);
    let mut rules = Vec::new();
    let mut strict_heads: Vec<Literal> = Vec::new();
    for i in 0..n_rules {
        let pivot = rng.gen_range(1..n_atoms);
        let body_len = match rng.gen_range(0..10u8) {
            0..=6 => 1,
            _ => 2,
        };
        let body_items: Vec<Literal> = (0..body_len)
            .map(|_| {
                let idx = rng.gen_range(0..pivot);
                lit(rng, &atoms[idx])
            })
            .collect();
        let body = if body_len >= 2 && rng.gen_bool(0.45) {
            RuleBody::sequence(body_items)
        } else {
            RuleBody::multiset(body_items)
        };

        let head_len = if rng.gen_bool(0.25) { 2 } else { 1 };
        let head_items: Vec<Literal> = (0..head_len)
            .map(|_| {
                let idx = rng.gen_range(pivot..n_atoms);
                lit(rng, &atoms[idx])
            })
            .collect();
        let head = if head_len == 1 {
            RuleHead::single(head_items.into_iter().next().unwrap())
        } else if rng.gen_bool(0.5) {
            RuleHead::sequence(head_items)
        } else {
            RuleHead::multiset(head_items)
        };

        let kind = match rng.gen_range(0..10u8) {
            0 => RuleKind::Strict,
            1..=2 => RuleKind::Defeater,
            _ => RuleKind::Defeasible,
        };
        // keep the strict fragment consistent by construction
        let kind = if kind == RuleKind::Strict {
            let clashes = head
                .literals()
                .iter()
                .any(|p| strict_heads.contains(&p.complement()));
            if clashes {
                RuleKind::Defeasible
            } else {
                strict_heads.extend(head.literals().iter().cloned());
                RuleKind::Strict
            }
        } else {
            kind
        };

        rules.push(Rule::new(Label::new(format!("r{i}")), body, kind, head));
    }

    let n_facts = rng.gen_range(0..=3usize);
    let mut facts: Vec<Literal> = Vec::new();
    for _ in 0..n_facts {
        // bias facts toward low strata so that bodies can fire
        let idx = if rng.gen_bool(0.7) {
            rng.gen_range(0..(n_atoms / 2).max(1))
        } else {
            rng.gen_range(0..n_atoms)
        };
        let candidate = lit(rng, &atoms[idx]);
        if facts.contains(&candidate.complement())
            || strict_heads.contains(&candidate.complement())
        {
            continue;
        }
        facts.push(candidate);
    }

    let mut superiority = Vec::new();
    for i in 0..n_rules {
        for j in (i + 1)..n_rules {
            if rng.gen_bool(0.25) {
                superiority.push((Label::new(format!("r{i}")), Label::new(format!("r{j}"))));
            }
        }
    }

    let config = ReasonerConfig {
        head_variant: if rng.gen_bool(0.5) {
            HeadVariant::PerLiteral
        } else {
            HeadVariant::WholeHead
        },
        max_steps: 30,
        ..ReasonerConfig::default()
    };

    let theory = Theory::new(facts, rules, superiority, config).ok()?;
    if step_bound(&theory) + 2 > theory.config().max_steps as usize {
        return None;
    }
    Some(theory)
}

/// A static worst-case step count: fact instances, an overestimate of how
/// many instances the stratified rules can ever produce, and one step per
/// possible refutation and support conclusion. Derivations of a theory
/// passing this bound can never be cut off by the step budget, so the
/// enumerator and the oracle see exactly the same maximal branches.
fn step_bound(theory: &Theory) -> usize {
    let base_supply = || {
        let mut supply: HashMap<Literal, usize> = HashMap::new();
        for fact in theory.facts() {
            *supply.entry(fact.clone()).or_insert(0) += 1;
        }
        supply
    };
    // fixpoint over the stratified production graph, never depleting
    // supply: a pure overestimate
    let mut supply = base_supply();
    let mut firings: HashMap<Label, usize> = HashMap::new();
    loop {
        let mut changed = false;
        for rule in theory.rules() {
            if rule.kind == RuleKind::Defeater {
                continue;
            }
            let times = rule
                .body
                .multiplicities()
                .iter()
                .map(|(lit, m)| supply.get(*lit).copied().unwrap_or(0) / m)
                .min()
                .unwrap_or(0);
            let previous = firings.get(&rule.label).copied().unwrap_or(0);
            if times > previous {
                firings.insert(rule.label.clone(), times);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        supply = base_supply();
        for rule in theory.rules() {
            let times = firings.get(&rule.label).copied().unwrap_or(0);
            for head in rule.head.literals() {
                *supply.entry(head.clone()).or_insert(0) += times;
            }
        }
    }
    let production: usize = theory
        .rules()
        .iter()
        .map(|r| firings.get(&r.label).copied().unwrap_or(0) * r.head.literals().len())
        .sum();

    let signature = theory.signature();
    let mut refutable = signature.clone();
    for rule in theory.rules() {
        for head in rule.head.literals() {
            refutable.insert(head.complement());
        }
    }
    // one -Δ per refutable literal, one -∂ and one +σ per signature
    // literal, at most
    theory.facts().len() + production + refutable.len() + 2 * signature.len()
}
