//! Shared helpers for the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use rsdl_core::{
    parse_theory, parse_theory_with_config, DerivationState, Literal, ReasonerConfig, Tag, Theory,
};

pub fn lit(s: &str) -> Literal {
    s.parse().unwrap()
}

pub fn theory(text: &str) -> Theory {
    parse_theory(text).unwrap_or_else(|diags| panic!("bad test theory: {diags:?}"))
}

pub fn theory_with(text: &str, config: ReasonerConfig) -> Theory {
    parse_theory_with_config(text, config).unwrap_or_else(|diags| panic!("bad test theory: {diags:?}"))
}

pub fn init(t: &Theory) -> DerivationState {
    DerivationState::init(Arc::new(t.clone()))
}

pub const VENDING: &str =
    "fact dollar. r1: dollar => cola. r2: outOfOrder => ~cola. r3: off => ~cola.";

/// The team-defeater worked example: d is provable through the team
/// {r2 > r3}, consuming only b; a stays available for e.
pub const TEAM: &str = "fact a. fact b. fact c.
r0: a => d. r1: a => e. r2: b => d. r3: c => ~d.
r2 > r3.";

/// Sequence-ordering example: r0 needs a, then b, then a again; each
/// producer can fire once.
pub const SEQUENCE: &str = "fact go1. fact go2. fact go3.
r0: a; b; a => c.
r1: go1 => a. r2: go2 => a. r3: go3 => b.";

/// Multiset head with one contested member.
pub const MULTI_HEAD: &str = "fact a. fact e. r: a => b, c, d. s: e => ~c.";

/// Number of unconsumed instances of `q` in the pool.
pub fn pool_count(state: &DerivationState, q: &Literal) -> usize {
    state.pool().filter(|s| &s.literal == q).count()
}

/// Number of consumed instances of `q`.
pub fn consumed_count(state: &DerivationState, q: &Literal) -> usize {
    state
        .steps()
        .iter()
        .filter(|s| s.tag.is_proven() && &s.literal == q && s.consumed_at.is_some())
        .count()
}

pub fn has(state: &DerivationState, q: &str, tag: Tag) -> bool {
    state.has(&lit(q), tag)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .canonicalize()
        .expect("corpus directory exists")
}

pub fn corpus_theory(name: &str) -> Theory {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    theory(&text)
}
