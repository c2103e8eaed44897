//! Literals: signed propositional atoms. A literal is also the unit of
//! consumable resource — deriving one produces an instance, firing a rule
//! whose body mentions it spends an instance.

use std::fmt;
use std::str::FromStr;

/// A propositional atom name. Names are case-sensitive and nonempty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    /// Panics if `name` is empty; atom names are nonempty tokens.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "atom names must be nonempty");
        Atom(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

/// An atom or its negation. Two literals are equal iff atom and polarity
/// are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: Atom,
    polarity: Polarity,
}

impl Literal {
    pub fn new(atom: Atom, polarity: Polarity) -> Self {
        Literal { atom, polarity }
    }

    pub fn positive(atom: impl Into<String>) -> Self {
        Literal::new(Atom::new(atom), Polarity::Positive)
    }

    pub fn negative(atom: impl Into<String>) -> Self {
        Literal::new(Atom::new(atom), Polarity::Negative)
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    /// The complement flips polarity and leaves the atom unchanged, so
    /// `q.complement().complement() == q`.
    pub fn complement(&self) -> Literal {
        let polarity = match self.polarity {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        };
        Literal {
            atom: self.atom.clone(),
            polarity,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negative => write!(f, "~{}", self.atom),
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the textual rendering used everywhere in the tool: `atom` or
/// `~atom`, with identifier atoms.
impl FromStr for Literal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (polarity, name) = match s.strip_prefix('~') {
            Some(rest) => (Polarity::Negative, rest),
            None => (Polarity::Positive, s),
        };
        if !is_ident(name) {
            return Err(format!("invalid literal {s:?}: expected `atom` or `~atom`"));
        }
        Ok(Literal::new(Atom::new(name), polarity))
    }
}
