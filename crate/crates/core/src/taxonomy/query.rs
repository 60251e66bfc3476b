//! Boolean keyword queries.
//!
//! Grammar (keywords are case-insensitive, `OR` binds looser than `AND`):
//!
//! ```text
//! expr   := term ("OR" term)*
//! term   := factor ("AND" factor)*
//! factor := phrase | "(" expr ")"
//! phrase := '"' text '"' | bare-word
//! ```
//!
//! Matching is contiguous-token matching over case-folded documents, where a
//! token is a maximal run of letters or digits.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("empty query")]
    EmptyQuery,
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
}

impl QueryError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        QueryError::SyntaxError {
            offset,
            message: message.into(),
        }
    }
}

/// A parsed query tree.
///
/// `Or` and `And` carry at least two children; a `Phrase` holds one or more
/// whitespace-separated words, stored with single spaces between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanQuery {
    Or(Vec<BooleanQuery>),
    And(Vec<BooleanQuery>),
    Phrase(String),
}

impl BooleanQuery {
    /// Builds a phrase node, normalizing internal whitespace. Returns `None`
    /// for blank text or text containing a double quote (unprintable).
    pub fn phrase(text: &str) -> Option<Self> {
        let normalized = normalize_phrase(text);
        if normalized.is_empty() || normalized.contains('"') {
            None
        } else {
            Some(BooleanQuery::Phrase(normalized))
        }
    }

    pub fn parse(text: &str) -> Result<Self, QueryError> {
        parse_query(text)
    }

    /// Checks the structural invariants: non-empty phrases, and at least two
    /// children under every `Or`/`And`.
    pub fn is_well_formed(&self) -> bool {
        match self {
            BooleanQuery::Phrase(p) => !p.trim().is_empty() && !p.contains('"'),
            BooleanQuery::Or(children) | BooleanQuery::And(children) => {
                children.len() >= 2 && children.iter().all(Self::is_well_formed)
            }
        }
    }

    /// All phrase leaves, left to right.
    pub fn phrases(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_phrases(&mut out);
        out
    }

    fn collect_phrases<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BooleanQuery::Phrase(p) => out.push(p),
            BooleanQuery::Or(c) | BooleanQuery::And(c) => {
                c.iter().for_each(|q| q.collect_phrases(out))
            }
        }
    }

    pub fn matches(&self, document: &str) -> bool {
        let tokens = tokenize(document);
        self.matches_tokens(&tokens)
    }

    /// Evaluates against a pre-tokenized (case-folded) document.
    pub fn matches_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        match self {
            BooleanQuery::Or(children) => children.iter().any(|c| c.matches_tokens(tokens)),
            BooleanQuery::And(children) => children.iter().all(|c| c.matches_tokens(tokens)),
            BooleanQuery::Phrase(p) => {
                let needle = tokenize(p);
                contains_run(tokens, &needle)
            }
        }
    }

    /// Renders in GDELT DOC syntax: multi-word phrases quoted, `OR` groups
    /// parenthesized, conjunction by juxtaposition.
    pub fn to_gdelt(&self) -> String {
        match self {
            BooleanQuery::Phrase(p) => {
                if p.contains(' ') {
                    format!("\"{p}\"")
                } else {
                    p.clone()
                }
            }
            BooleanQuery::Or(children) => {
                let parts: Vec<String> = children.iter().map(Self::to_gdelt).collect();
                format!("({})", parts.join(" OR "))
            }
            BooleanQuery::And(children) => {
                let parts: Vec<String> = children.iter().map(Self::to_gdelt).collect();
                parts.join(" ")
            }
        }
    }
}

/// Prints in the canonical form accepted by [`parse_query`]: every phrase
/// quoted, nested groups parenthesized whenever the parser would otherwise
/// flatten or re-associate them.
impl fmt::Display for BooleanQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanQuery::Phrase(p) => write!(f, "\"{p}\""),
            BooleanQuery::Or(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" OR ")?;
                    }
                    match child {
                        BooleanQuery::Or(_) => write!(f, "({child})")?,
                        _ => write!(f, "{child}")?,
                    }
                }
                Ok(())
            }
            BooleanQuery::And(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    match child {
                        BooleanQuery::Phrase(_) => write!(f, "{child}")?,
                        _ => write!(f, "({child})")?,
                    }
                }
                Ok(())
            }
        }
    }
}

fn normalize_phrase(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

fn contains_run<A: AsRef<str>, B: AsRef<str>>(haystack: &[A], needle: &[B]) -> bool {
    if needle.is_empty() || needle.len() > haystack.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|w| w.iter().zip(needle).all(|(a, b)| a.as_ref() == b.as_ref()))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Phrase(String),
    Or,
    And,
    LParen,
    RParen,
}

fn is_open_quote(c: char) -> Option<char> {
    match c {
        '"' => Some('"'),
        '\u{201C}' => Some('\u{201D}'),
        _ => None,
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, QueryError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((start, Tok::LParen));
        } else if c == ')' {
            chars.next();
            out.push((start, Tok::RParen));
        } else if let Some(close) = is_open_quote(c) {
            chars.next();
            let mut body = String::new();
            let mut closed = false;
            for (_, ch) in chars.by_ref() {
                if ch == close || (close == '"' && ch == '\u{201D}') {
                    closed = true;
                    break;
                }
                body.push(ch);
            }
            if !closed {
                return Err(QueryError::syntax(start, "unterminated quoted phrase"));
            }
            let phrase = normalize_phrase(&body);
            if phrase.is_empty() {
                return Err(QueryError::syntax(start, "empty quoted phrase"));
            }
            out.push((start, Tok::Phrase(phrase)));
        } else {
            let mut word = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_whitespace() || ch == '(' || ch == ')' || is_open_quote(ch).is_some() {
                    break;
                }
                if ch == '\u{201D}' {
                    return Err(QueryError::syntax(start, "stray closing quote"));
                }
                word.push(ch);
                chars.next();
            }
            let tok = if word.eq_ignore_ascii_case("or") {
                Tok::Or
            } else if word.eq_ignore_ascii_case("and") {
                Tok::And
            } else {
                Tok::Phrase(word)
            };
            out.push((start, tok));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(o, _)| *o)
    }

    fn expr(&mut self) -> Result<BooleanQuery, QueryError> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(collapse(terms, BooleanQuery::Or))
    }

    fn term(&mut self) -> Result<BooleanQuery, QueryError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(collapse(factors, BooleanQuery::And))
    }

    fn factor(&mut self) -> Result<BooleanQuery, QueryError> {
        let offset = self.offset();
        match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Phrase(p)) => {
                self.pos += 1;
                Ok(BooleanQuery::Phrase(p))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(QueryError::syntax(offset, "unbalanced parenthesis"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::RParen) => Err(QueryError::syntax(offset, "unexpected ')'")),
            Some(Tok::Or) | Some(Tok::And) => {
                Err(QueryError::syntax(offset, "operator without left operand"))
            }
            None => Err(QueryError::syntax(
                offset,
                "dangling operator at end of query",
            )),
        }
    }
}

fn collapse(
    mut items: Vec<BooleanQuery>,
    make: fn(Vec<BooleanQuery>) -> BooleanQuery,
) -> BooleanQuery {
    if items.len() == 1 {
        items.pop().expect("one item")
    } else {
        make(items)
    }
}

pub fn parse_query(text: &str) -> Result<BooleanQuery, QueryError> {
    if text.trim().is_empty() {
        return Err(QueryError::EmptyQuery);
    }
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let tree = parser.expr()?;
    if parser.pos < parser.toks.len() {
        let offset = parser.offset();
        let message = match parser.peek() {
            Some(Tok::RParen) => "unbalanced parenthesis",
            _ => "expected OR/AND between terms",
        };
        return Err(QueryError::syntax(offset, message));
    }
    Ok(tree)
}
