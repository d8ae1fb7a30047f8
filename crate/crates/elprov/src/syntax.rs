//! Line-oriented lexer shared by the ontology and query parsers.

use std::fmt;

use thiserror::Error;

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

/// The class of a parse failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    NamespaceCollision,
    AnnotationNotVariable,
    ReservedName,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError { line, col, kind, message: message.into() }
    }

    pub(crate) fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError::new(line, col, ParseErrorKind::Syntax, message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    /// A `?`-prefixed query variable.
    QVar(String),
    LParen,
    RParen,
    Comma,
    Le,
    At,
    Star,
    Amp,
    Bang,
    Arrow,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::QVar(s) => write!(f, "`?{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::At => f.write_str("`@`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes one line; everything after `#` is a comment.
pub(crate) fn lex_line(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '@' => Some(Tok::At),
            '*' => Some(Tok::Star),
            '&' => Some(Tok::Amp),
            '!' => Some(Tok::Bang),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push(Token { tok, line, col });
            i += 1;
            continue;
        }
        if c == '<' && chars.get(i + 1) == Some(&'=') {
            tokens.push(Token { tok: Tok::Le, line, col });
            i += 2;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            tokens.push(Token { tok: Tok::Arrow, line, col });
            i += 2;
            continue;
        }
        if c == '?' {
            let start = i + 1;
            let mut j = start;
            if j < chars.len() && is_ident_start(chars[j]) {
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                tokens.push(Token { tok: Tok::QVar(chars[start..j].iter().collect()), line, col });
                i = j;
                continue;
            }
            return Err(ParseError::syntax(line, col, "expected a variable name after `?`"));
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            tokens.push(Token { tok: Tok::Ident(chars[i..j].iter().collect()), line, col });
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j < chars.len() && is_ident_char(chars[j]) {
                return Err(ParseError::syntax(line, col, "names must not start with a digit"));
            }
            tokens.push(Token { tok: Tok::Number(chars[i..j].iter().collect()), line, col });
            i = j;
            continue;
        }
        return Err(ParseError::syntax(line, col, format!("unexpected character `{c}`")));
    }
    Ok(tokens)
}

/// A cursor over the tokens of one statement.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>, line: usize, end_col: usize) -> Self {
        Cursor { tokens, pos: 0, line, end_col }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    /// Position of the next token, or of the end of input.
    pub fn position(&self) -> (usize, usize) {
        match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.tokens.last().map_or(self.line, |t| t.line), self.end_col),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.position();
        ParseError::syntax(line, col, message)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(tok) => self.error(format!("expected {expected}, found {tok}")),
            None => self.error(format!("expected {expected}, found end of input")),
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Consumes an identifier, returning it with its position.
    pub fn ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.tokens.get(self.pos) {
            Some(Token { tok: Tok::Ident(s), line, col }) => {
                let out = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(tok) => Err(self.error(format!("unexpected trailing {tok}"))),
        }
    }
}
