//! Text front-end for the `.rsdl` theory language.
//!
//! Statements end with `.`:
//!
//! ```text
//! % a comment runs to end of line
//! fact dollar.                  % one fact instance, repeatable
//! r1: dollar => cola.           % defeasible rule
//! r2: outOfOrder -> ~cola.      % strict rule
//! r3: off ~> ~cola.             % defeater
//! r0: a; b; a => c.             % sequence body (order-sensitive)
//! r4: a, b => c, d.             % multiset body and head
//! r5: => c.                     % empty body
//! r2 > r3.                      % superiority
//! ```
//!
//! `;` separates sequences, `,` separates multisets; one body or head may
//! not mix them. Atoms and labels are `[A-Za-z_][A-Za-z0-9_]*`; `fact` is
//! reserved. Parsing is total: any byte sequence yields either a validated
//! theory or a list of diagnostics with source spans.

use std::fmt;

use crate::literal::{Atom, Literal, Polarity};
use crate::rule::{Label, Rule, RuleBody, RuleHead, RuleKind};
use crate::theory::{ReasonerConfig, Theory};

/// Location of a diagnostic in the source text. Lines and columns are
/// 1-based; length counts characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Dot,
    Colon,
    Comma,
    Semi,
    Tilde,
    Greater,
    ArrowStrict,
    ArrowDefeasible,
    ArrowDefeater,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    span: SourceSpan,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self, length: u32) -> SourceSpan {
        SourceSpan {
            line: self.line,
            column: self.column,
            length,
        }
    }

    /// Tokenizes the whole input, reporting unknown characters as
    /// diagnostics and skipping them.
    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        let mut tokens = Vec::new();
        let mut diagnostics = Vec::new();
        loop {
            match self.chars.peek() {
                None => break,
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(&c) if c.is_ascii_alphabetic() || c == '_' => {
                    let span = self.span(0);
                    let mut ident = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            ident.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    tokens.push(Token {
                        kind: TokenKind::Ident(ident.clone()),
                        span: SourceSpan {
                            length: ident.chars().count() as u32,
                            ..span
                        },
                    });
                }
                Some(&c) => {
                    let span = self.span(1);
                    self.bump();
                    let kind = match c {
                        '.' => Some(TokenKind::Dot),
                        ':' => Some(TokenKind::Colon),
                        ',' => Some(TokenKind::Comma),
                        ';' => Some(TokenKind::Semi),
                        '>' => Some(TokenKind::Greater),
                        '~' => {
                            if self.chars.peek() == Some(&'>') {
                                self.bump();
                                Some(TokenKind::ArrowDefeater)
                            } else {
                                Some(TokenKind::Tilde)
                            }
                        }
                        '-' => {
                            if self.chars.peek() == Some(&'>') {
                                self.bump();
                                Some(TokenKind::ArrowStrict)
                            } else {
                                diagnostics.push(Diagnostic {
                                    span,
                                    message: "expected `->`".to_string(),
                                });
                                None
                            }
                        }
                        '=' => {
                            if self.chars.peek() == Some(&'>') {
                                self.bump();
                                Some(TokenKind::ArrowDefeasible)
                            } else {
                                diagnostics.push(Diagnostic {
                                    span,
                                    message: "expected `=>`".to_string(),
                                });
                                None
                            }
                        }
                        _ => {
                            diagnostics.push(Diagnostic {
                                span,
                                message: format!("unexpected character `{c}`"),
                            });
                            None
                        }
                    };
                    if let Some(kind) = kind {
                        tokens.push(Token { kind, span });
                    }
                }
            }
        }
        (tokens, diagnostics)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    facts: Vec<Literal>,
    rules: Vec<Rule>,
    superiority: Vec<(Label, Label)>,
}

/// Items of one body or head together with the separator discipline.
enum ListKind {
    Undecided,
    Multiset,
    Sequence,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| t.span)
            .unwrap_or(SourceSpan {
                line: 1,
                column: 1,
                length: 0,
            })
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, span: SourceSpan, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            span,
            message: message.into(),
        });
    }

    /// Skips past the next `.` so one bad statement does not poison the
    /// rest of the file.
    fn recover(&mut self) {
        while let Some(t) = self.bump() {
            if t.kind == TokenKind::Dot {
                break;
            }
        }
    }

    fn expect_dot(&mut self) -> bool {
        match self.peek() {
            Some(TokenKind::Dot) => {
                self.bump();
                true
            }
            _ => {
                let span = self.peek_span();
                self.error(span, "expected `.` to end the statement");
                self.recover();
                false
            }
        }
    }

    fn parse_literal(&mut self) -> Option<Literal> {
        let negative = matches!(self.peek(), Some(TokenKind::Tilde));
        if negative {
            self.bump();
        }
        match self.peek().cloned() {
            Some(TokenKind::Ident(name)) if name != "fact" => {
                self.bump();
                let polarity = if negative {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                };
                Some(Literal::new(Atom::new(name), polarity))
            }
            Some(TokenKind::Ident(_)) => {
                let span = self.peek_span();
                self.error(span, "`fact` is reserved and cannot be used as an atom");
                self.bump();
                None
            }
            _ => {
                let span = self.peek_span();
                self.error(span, "expected a literal (`atom` or `~atom`)");
                None
            }
        }
    }

    /// Parses `lit (sep lit)*` where sep is uniformly `,` or `;`. Stops at
    /// an arrow, `.`, or anything unexpected. Returns the items, whether
    /// the list is a sequence, and whether parsing may continue.
    fn parse_literal_list(&mut self) -> Option<(Vec<Literal>, bool)> {
        let mut items = Vec::new();
        let mut kind = ListKind::Undecided;
        loop {
            let lit = self.parse_literal()?;
            items.push(lit);
            match self.peek() {
                Some(TokenKind::Comma) => {
                    let span = self.peek_span();
                    match kind {
                        ListKind::Sequence => {
                            self.error(span, "mixed nesting unsupported");
                            return None;
                        }
                        _ => kind = ListKind::Multiset,
                    }
                    self.bump();
                }
                Some(TokenKind::Semi) => {
                    let span = self.peek_span();
                    match kind {
                        ListKind::Multiset => {
                            self.error(span, "mixed nesting unsupported");
                            return None;
                        }
                        _ => kind = ListKind::Sequence,
                    }
                    self.bump();
                }
                _ => break,
            }
        }
        Some((items, matches!(kind, ListKind::Sequence)))
    }

    fn parse_fact(&mut self) {
        self.bump(); // `fact`
        match self.parse_literal() {
            Some(lit) => {
                if self.expect_dot() {
                    self.facts.push(lit);
                }
            }
            None => self.recover(),
        }
    }

    fn arrow_kind(&mut self) -> Option<RuleKind> {
        let kind = match self.peek() {
            Some(TokenKind::ArrowStrict) => RuleKind::Strict,
            Some(TokenKind::ArrowDefeasible) => RuleKind::Defeasible,
            Some(TokenKind::ArrowDefeater) => RuleKind::Defeater,
            _ => return None,
        };
        self.bump();
        Some(kind)
    }

    fn parse_rule(&mut self, label: Label) {
        self.bump(); // `:`
        let (body, arrow) = if let Some(kind) = self.arrow_kind() {
            (RuleBody::empty(), kind)
        } else {
            let Some((items, is_seq)) = self.parse_literal_list() else {
                self.recover();
                return;
            };
            let body = if is_seq {
                RuleBody::sequence(items)
            } else {
                RuleBody::multiset(items)
            };
            let Some(kind) = self.arrow_kind() else {
                let span = self.peek_span();
                self.error(span, "expected `->`, `=>`, or `~>`");
                self.recover();
                return;
            };
            (body, kind)
        };
        let Some((items, is_seq)) = self.parse_literal_list() else {
            self.recover();
            return;
        };
        let head = if is_seq {
            RuleHead::sequence(items)
        } else {
            RuleHead::multiset(items)
        };
        if self.expect_dot() {
            self.rules.push(Rule::new(label, body, arrow, head));
        }
    }

    fn parse_superiority(&mut self, stronger: Label) {
        self.bump(); // `>`
        match self.peek().cloned() {
            Some(TokenKind::Ident(name)) if name != "fact" => {
                self.bump();
                if self.expect_dot() {
                    self.superiority.push((stronger, Label::new(name)));
                }
            }
            _ => {
                let span = self.peek_span();
                self.error(span, "expected a rule label after `>`");
                self.recover();
            }
        }
    }

    fn parse_statement(&mut self) {
        match self.peek().cloned() {
            Some(TokenKind::Ident(name)) if name == "fact" => self.parse_fact(),
            Some(TokenKind::Ident(name)) => {
                let span = self.peek_span();
                self.bump();
                match self.peek() {
                    Some(TokenKind::Colon) => self.parse_rule(Label::new(name)),
                    Some(TokenKind::Greater) => self.parse_superiority(Label::new(name)),
                    _ => {
                        self.error(span, "expected `:` (rule) or `>` (superiority) after label");
                        self.recover();
                    }
                }
            }
            Some(_) => {
                let span = self.peek_span();
                self.error(span, "expected a statement (`fact`, rule, or superiority)");
                self.recover();
            }
            None => {}
        }
    }
}

/// Parses a theory, returning either a validated [`Theory`] or every
/// diagnostic found. Never panics on any input.
pub fn parse_theory(text: &str) -> Result<Theory, Vec<Diagnostic>> {
    parse_theory_with_config(text, ReasonerConfig::default())
}

/// [`parse_theory`] with an explicit reasoner configuration (the text
/// format carries none).
pub fn parse_theory_with_config(
    text: &str,
    config: ReasonerConfig,
) -> Result<Theory, Vec<Diagnostic>> {
    let (tokens, lex_diagnostics) = Lexer::new(text).run();
    let mut parser = Parser {
        tokens,
        pos: 0,
        diagnostics: lex_diagnostics,
        facts: Vec::new(),
        rules: Vec::new(),
        superiority: Vec::new(),
    };
    while parser.peek().is_some() {
        parser.parse_statement();
    }

    let report = Theory::validate(&parser.facts, &parser.rules, &parser.superiority, &config);
    if !report.is_valid() {
        let span = SourceSpan {
            line: 1,
            column: 1,
            length: 0,
        };
        for violation in &report.violations {
            parser.diagnostics.push(Diagnostic {
                span,
                message: violation.to_string(),
            });
        }
    }

    if parser.diagnostics.is_empty() {
        Ok(
            Theory::new(parser.facts, parser.rules, parser.superiority, config)
                .expect("validated above"),
        )
    } else {
        Err(parser.diagnostics)
    }
}

/// Canonical text for a theory: facts first (sorted), rules by label,
/// superiority pairs last. `parse_theory(serialize_theory(t))` is
/// structurally equal to `t`.
pub fn serialize_theory(theory: &Theory) -> String {
    let mut out = String::new();
    for fact in theory.facts() {
        out.push_str(&format!("fact {fact}.\n"));
    }
    let mut rules: Vec<&Rule> = theory.rules().iter().collect();
    rules.sort_by(|a, b| a.label.cmp(&b.label));
    for rule in rules {
        out.push_str(&format!("{rule}.\n"));
    }
    for (stronger, weaker) in theory.superiority() {
        out.push_str(&format!("{stronger} > {weaker}.\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::BodyKind;

    fn lit(s: &str) -> Literal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_the_vending_theory() {
        let text = "fact dollar. r1: dollar => cola. r2: outOfOrder => ~cola. r3: off => ~cola.";
        let theory = parse_theory(text).unwrap();
        assert_eq!(theory.facts(), &[lit("dollar")]);
        assert_eq!(theory.rules().len(), 3);
        assert!(theory
            .rules()
            .iter()
            .all(|r| r.kind == RuleKind::Defeasible));
    }

    #[test]
    fn empty_input_is_the_empty_theory() {
        let theory = parse_theory("").unwrap();
        assert!(theory.facts().is_empty());
        assert!(theory.rules().is_empty());
        assert_eq!(serialize_theory(&theory), "");
    }

    #[test]
    fn mixed_nesting_is_rejected_at_the_second_separator() {
        let diags = parse_theory("r: a; b, c => d.").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "mixed nesting unsupported");
        // the `,` after b
        assert_eq!(diags[0].span.line, 1);
        assert_eq!(diags[0].span.column, 8);
    }

    #[test]
    fn multiplicity_is_preserved() {
        let theory = parse_theory("r: a, a, b => c.").unwrap();
        let body = &theory.rules()[0].body;
        assert_eq!(body.multiplicities()[&lit("a")], 2);
    }

    #[test]
    fn sequences_keep_order_and_repetition() {
        let theory = parse_theory("r0: a; b; a => c.").unwrap();
        let body = &theory.rules()[0].body;
        assert_eq!(body.kind(), BodyKind::Sequence);
        assert_eq!(body.items(), &[lit("a"), lit("b"), lit("a")]);
        assert_eq!(serialize_theory(&theory), "r0: a; b; a => c.\n");
    }

    #[test]
    fn arrows_map_to_rule_kinds() {
        let theory = parse_theory("r1: a -> b. r2: a => b. r3: a ~> ~b.").unwrap();
        let kinds: Vec<RuleKind> = theory.rules().iter().map(|r| r.kind).collect();
        assert_eq!(
            kinds,
            vec![RuleKind::Strict, RuleKind::Defeasible, RuleKind::Defeater]
        );
    }

    #[test]
    fn empty_body_form() {
        let theory = parse_theory("r: => c.").unwrap();
        assert!(theory.rules()[0].body.is_empty());
    }

    #[test]
    fn negation_and_comments() {
        let theory = parse_theory("% setup\nfact a. % trailing\nr: a => ~b.").unwrap();
        assert_eq!(theory.rules()[0].head.literals(), &[lit("~b")]);
    }

    #[test]
    fn validation_failures_become_diagnostics() {
        let diags = parse_theory("r: a => b. r: a => c.").unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("duplicate")));
        let diags = parse_theory("r: a => b. s: a => c. r > s. s > r.").unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("cycle")));
    }

    #[test]
    fn recovery_reports_multiple_errors() {
        let diags = parse_theory("r: a ==> b. s: ; => c. fact ~~x.").unwrap_err();
        assert!(diags.len() >= 3);
    }

    #[test]
    fn round_trips_structurally() {
        let text = "fact b.\nfact a.\nr2: x, y => z.\nr1: a; b; a ~> w.\nr1 > r2.\n";
        let theory = parse_theory(text).unwrap();
        let reparsed = parse_theory(&serialize_theory(&theory)).unwrap();
        assert!(theory.structural_eq(&reparsed));
    }

    #[test]
    fn totality_on_garbage() {
        for garbage in ["@@@###!!!", "r: a =>", "fact", ". . .", "~>~>~>", "r >"] {
            let _ = parse_theory(garbage);
        }
    }
}
