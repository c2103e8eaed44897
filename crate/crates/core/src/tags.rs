//! Proof tags: the vocabulary shared by derivation steps, extensions,
//! and the reference oracle.

use std::fmt;

/// A proof tag. Consumption markers are not tags; they are recorded on
/// proven steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    StrictProven,
    StrictRefuted,
    DefeasiblyProven,
    DefeasiblyRefuted,
    Supported,
}

impl Tag {
    pub fn symbol(self) -> &'static str {
        match self {
            Tag::StrictProven => "+Δ",
            Tag::StrictRefuted => "-Δ",
            Tag::DefeasiblyProven => "+∂",
            Tag::DefeasiblyRefuted => "-∂",
            Tag::Supported => "+σ",
        }
    }

    /// ASCII rendering used by machine-readable output.
    pub fn ascii(self) -> &'static str {
        match self {
            Tag::StrictProven => "+delta",
            Tag::StrictRefuted => "-delta",
            Tag::DefeasiblyProven => "+partial",
            Tag::DefeasiblyRefuted => "-partial",
            Tag::Supported => "+sigma",
        }
    }

    pub fn is_proven(self) -> bool {
        matches!(self, Tag::StrictProven | Tag::DefeasiblyProven)
    }

    pub fn is_refutation(self) -> bool {
        matches!(self, Tag::StrictRefuted | Tag::DefeasiblyRefuted)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
