//! Rules: labelled transformations from a body of premises to a head of
//! conclusions. Bodies are multisets or sequences of literals; heads are a
//! single literal, a multiset, or a sequence.

use std::collections::BTreeMap;
use std::fmt;

use crate::literal::Literal;

/// A rule name, unique within a theory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "rule labels must be nonempty");
        Label(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Always yields its head; immune to attack.
    Strict,
    /// Normally yields its head; defeated by undefeated contrary evidence.
    Defeasible,
    /// Blocks contrary conclusions but never produces instances itself.
    Defeater,
}

impl RuleKind {
    pub fn arrow(self) -> &'static str {
        match self {
            RuleKind::Strict => "->",
            RuleKind::Defeasible => "=>",
            RuleKind::Defeater => "~>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BodyKind {
    Multiset,
    Sequence,
}

/// The antecedent of a rule. Multiplicity is semantic for both kinds; item
/// order is semantic only for sequences, so multisets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleBody {
    kind: BodyKind,
    items: Vec<Literal>,
}

impl RuleBody {
    pub fn multiset(mut items: Vec<Literal>) -> Self {
        items.sort();
        RuleBody {
            kind: BodyKind::Multiset,
            items,
        }
    }

    /// A sequence of fewer than two literals carries no ordering
    /// information and is normalized to a multiset.
    pub fn sequence(items: Vec<Literal>) -> Self {
        if items.len() < 2 {
            RuleBody::multiset(items)
        } else {
            RuleBody {
                kind: BodyKind::Sequence,
                items,
            }
        }
    }

    /// The empty body: vacuously applicable and consumable.
    pub fn empty() -> Self {
        RuleBody::multiset(Vec::new())
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn items(&self) -> &[Literal] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Literals with their multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<&Literal, usize> {
        let mut out = BTreeMap::new();
        for item in &self.items {
            *out.entry(item).or_insert(0) += 1;
        }
        out
    }

    pub fn contains(&self, q: &Literal) -> bool {
        self.items.contains(q)
    }
}

/// The consequent of a rule. Nonempty for every valid rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleHead {
    Single(Literal),
    Multiset(Vec<Literal>),
    Sequence(Vec<Literal>),
}

impl RuleHead {
    pub fn single(item: Literal) -> Self {
        RuleHead::Single(item)
    }

    /// One-element multisets and sequences are the single-conclusion case.
    pub fn multiset(mut items: Vec<Literal>) -> Self {
        if items.len() == 1 {
            RuleHead::Single(items.pop().unwrap())
        } else {
            items.sort();
            RuleHead::Multiset(items)
        }
    }

    pub fn sequence(mut items: Vec<Literal>) -> Self {
        if items.len() == 1 {
            RuleHead::Single(items.pop().unwrap())
        } else {
            RuleHead::Sequence(items)
        }
    }

    pub fn literals(&self) -> &[Literal] {
        match self {
            RuleHead::Single(item) => std::slice::from_ref(item),
            RuleHead::Multiset(items) | RuleHead::Sequence(items) => items,
        }
    }

    pub fn contains(&self, q: &Literal) -> bool {
        self.literals().contains(q)
    }

    pub fn is_empty(&self) -> bool {
        self.literals().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub label: Label,
    pub body: RuleBody,
    pub kind: RuleKind,
    pub head: RuleHead,
}

impl Rule {
    pub fn new(label: Label, body: RuleBody, kind: RuleKind, head: RuleHead) -> Self {
        Rule {
            label,
            body,
            kind,
            head,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.label)?;
        let sep = match self.body.kind() {
            BodyKind::Multiset => ", ",
            BodyKind::Sequence => "; ",
        };
        for (i, item) in self.body.items().iter().enumerate() {
            if i == 0 {
                write!(f, " {item}")?;
            } else {
                write!(f, "{sep}{item}")?;
            }
        }
        write!(f, " {}", self.kind.arrow())?;
        let (items, sep) = match &self.head {
            RuleHead::Single(item) => (std::slice::from_ref(item), ", "),
            RuleHead::Multiset(items) => (items.as_slice(), ", "),
            RuleHead::Sequence(items) => (items.as_slice(), "; "),
        };
        for (i, item) in items.iter().enumerate() {
            if i == 0 {
                write!(f, " {item}")?;
            } else {
                write!(f, "{sep}{item}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_bodies_sort_but_keep_multiplicity() {
        let body = RuleBody::multiset(vec![
            Literal::positive("b"),
            Literal::positive("a"),
            Literal::positive("a"),
        ]);
        assert_eq!(
            body.items(),
            &[
                Literal::positive("a"),
                Literal::positive("a"),
                Literal::positive("b"),
            ]
        );
        assert_eq!(body.multiplicities()[&Literal::positive("a")], 2);
    }

    #[test]
    fn sequence_bodies_preserve_order_and_repetition() {
        let body = RuleBody::sequence(vec![
            Literal::positive("a"),
            Literal::positive("b"),
            Literal::positive("a"),
        ]);
        assert_eq!(body.kind(), BodyKind::Sequence);
        assert_eq!(
            body.items(),
            &[
                Literal::positive("a"),
                Literal::positive("b"),
                Literal::positive("a"),
            ]
        );
    }

    #[test]
    fn degenerate_shapes_normalize() {
        assert_eq!(
            RuleBody::sequence(vec![Literal::positive("a")]).kind(),
            BodyKind::Multiset
        );
        assert_eq!(
            RuleHead::multiset(vec![Literal::positive("a")]),
            RuleHead::Single(Literal::positive("a"))
        );
        assert_eq!(
            RuleHead::sequence(vec![Literal::positive("a")]),
            RuleHead::Single(Literal::positive("a"))
        );
    }

    #[test]
    fn display_renders_the_theory_syntax() {
        let rule = Rule::new(
            Label::new("r0"),
            RuleBody::sequence(vec![
                Literal::positive("a"),
                Literal::positive("b"),
                Literal::positive("a"),
            ]),
            RuleKind::Defeasible,
            RuleHead::single(Literal::negative("c")),
        );
        assert_eq!(rule.to_string(), "r0: a; b; a => ~c");
    }
}
