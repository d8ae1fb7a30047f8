//! Parser for the line-oriented ontology format.
//!
//! ```text
//! concept := Top | NAME | and(concept, concept) | some(NAME, concept) | some(NAME)
//! line    := gci concept <= concept @ annot
//!          | ri NAME <= NAME @ annot
//!          | rr ran(NAME) <= NAME @ annot
//!          | ca NAME(NAME) @ annot
//!          | ra NAME(NAME, NAME) @ annot
//! annot   := NAME | 1
//! ```

use std::collections::HashMap;
use std::fmt;

use crate::ontology::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, RoleName};
use crate::provenance::{Monomial, Variable};
use crate::syntax::{lex_line, Cursor, ParseError, ParseErrorKind, Tok};

/// Words that cannot be used as names in any namespace.
const RESERVED_WORDS: [&str; 4] = ["Top", "and", "some", "ran"];

/// Prefix of names the library generates; rejected in user input.
pub const RESERVED_PREFIX: &str = "__";

/// How strictly annotations and names are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// User input: annotations are a single variable or `1`, the `__`
    /// prefix is rejected, and ⊤ may not appear in assertions or on the
    /// right of a GCI.
    #[default]
    Input,
    /// Reasoner output: annotations may be arbitrary monomials and
    /// generated names are accepted.
    Derived,
}

/// The four disjoint namespaces of an ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Namespace {
    Concept,
    Role,
    Individual,
    Variable,
}

/// The namespace name with its indefinite article.
fn article(ns: Namespace) -> String {
    match ns {
        Namespace::Individual => format!("an {ns}"),
        _ => format!("a {ns}"),
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Namespace::Concept => "concept",
            Namespace::Role => "role",
            Namespace::Individual => "individual",
            Namespace::Variable => "variable",
        })
    }
}

struct Names {
    mode: ParseMode,
    seen: HashMap<String, (Namespace, usize, usize)>,
}

impl Names {
    fn new(mode: ParseMode) -> Self {
        Names { mode, seen: HashMap::new() }
    }

    fn declare(&mut self, name: &str, ns: Namespace, line: usize, col: usize) -> Result<(), ParseError> {
        if RESERVED_WORDS.contains(&name) {
            return Err(ParseError::new(
                line,
                col,
                ParseErrorKind::ReservedName,
                format!("`{name}` is a reserved word and cannot be used as {} name", article(ns)),
            ));
        }
        if self.mode == ParseMode::Input && name.starts_with(RESERVED_PREFIX) {
            return Err(ParseError::new(
                line,
                col,
                ParseErrorKind::ReservedName,
                format!("names starting with `{RESERVED_PREFIX}` are reserved: `{name}`"),
            ));
        }
        match self.seen.get(name) {
            Some((other, l, c)) if *other != ns => Err(ParseError::new(
                line,
                col,
                ParseErrorKind::NamespaceCollision,
                format!(
                    "`{name}` used as {} name but already used as {} name at {l}:{c}",
                    article(ns),
                    article(*other)
                ),
            )),
            Some(_) => Ok(()),
            None => {
                self.seen.insert(name.to_string(), (ns, line, col));
                Ok(())
            }
        }
    }

    fn name(&mut self, cur: &mut Cursor, ns: Namespace) -> Result<String, ParseError> {
        let (name, line, col) = cur.ident(&format!("a {ns} name"))?;
        self.declare(&name, ns, line, col)?;
        Ok(name)
    }
}

fn parse_concept(cur: &mut Cursor, names: &mut Names) -> Result<Concept, ParseError> {
    let is_call = cur.peek_at(1) == Some(&Tok::LParen);
    match cur.peek() {
        Some(Tok::Ident(s)) if s == "Top" => {
            cur.next();
            Ok(Concept::Top)
        }
        Some(Tok::Ident(s)) if s == "and" && is_call => {
            cur.next();
            cur.expect(Tok::LParen)?;
            let a = parse_concept(cur, names)?;
            cur.expect(Tok::Comma)?;
            let b = parse_concept(cur, names)?;
            cur.expect(Tok::RParen)?;
            Ok(Concept::and(a, b))
        }
        Some(Tok::Ident(s)) if s == "some" && is_call => {
            cur.next();
            cur.expect(Tok::LParen)?;
            let role = RoleName::new(&names.name(cur, Namespace::Role)?);
            if cur.eat(&Tok::Comma) {
                let filler = parse_concept(cur, names)?;
                cur.expect(Tok::RParen)?;
                Ok(Concept::ExistsQ(role, Box::new(filler)))
            } else {
                cur.expect(Tok::RParen)?;
                Ok(Concept::Exists(role))
            }
        }
        Some(Tok::Ident(_)) => Ok(Concept::Atomic(ConceptName::new(&names.name(cur, Namespace::Concept)?))),
        _ => Err(cur.error("expected a concept")),
    }
}

fn parse_annotation(cur: &mut Cursor, names: &mut Names) -> Result<Monomial, ParseError> {
    cur.expect(Tok::At)?;
    let (line, col) = cur.position();
    let not_variable = || {
        ParseError::new(
            line,
            col,
            ParseErrorKind::AnnotationNotVariable,
            "input annotations must be a single variable or `1`",
        )
    };
    let mut vars = Vec::new();
    loop {
        match cur.peek() {
            Some(Tok::Number(n)) if n == "1" => {
                cur.next();
            }
            Some(Tok::Number(_)) => return Err(not_variable()),
            Some(Tok::Ident(_)) => {
                let name = names.name(cur, Namespace::Variable)?;
                vars.push(Variable::new(&name).expect("lexer produced an identifier"));
            }
            _ => return Err(cur.error("expected a variable or `1` after `@`")),
        }
        if !cur.eat(&Tok::Star) {
            break;
        }
        if names.mode == ParseMode::Input {
            return Err(not_variable());
        }
    }
    Ok(Monomial::representative(vars))
}

fn parse_axiom_body(cur: &mut Cursor, names: &mut Names) -> Result<Axiom, ParseError> {
    let (keyword, line, col) = cur.ident("an axiom keyword (gci, ri, rr, ca, ra)")?;
    let derived = names.mode == ParseMode::Derived;
    match keyword.as_str() {
        "gci" => {
            let lhs = parse_concept(cur, names)?;
            cur.expect(Tok::Le)?;
            let (rl, rc) = cur.position();
            let rhs = parse_concept(cur, names)?;
            if !(rhs.is_rhs() || derived && rhs == Concept::Top) {
                return Err(ParseError::syntax(
                    rl,
                    rc,
                    "the right-hand side of a gci must be a concept name or some(R)",
                ));
            }
            Ok(Axiom::Gci { lhs, rhs })
        }
        "ri" => {
            let sub = RoleName::new(&names.name(cur, Namespace::Role)?);
            cur.expect(Tok::Le)?;
            let sup = RoleName::new(&names.name(cur, Namespace::Role)?);
            Ok(Axiom::Ri { sub, sup })
        }
        "rr" => {
            match cur.ident("`ran`")? {
                (s, _, _) if s == "ran" => {}
                (_, l, c) => return Err(ParseError::syntax(l, c, "expected `ran`")),
            }
            cur.expect(Tok::LParen)?;
            let role = RoleName::new(&names.name(cur, Namespace::Role)?);
            cur.expect(Tok::RParen)?;
            cur.expect(Tok::Le)?;
            let filler = ConceptName::new(&names.name(cur, Namespace::Concept)?);
            Ok(Axiom::Rr { role, filler })
        }
        "ca" => {
            let concept = match cur.peek() {
                Some(Tok::Ident(s)) if s == "Top" && derived => {
                    cur.next();
                    Concept::Top
                }
                _ => Concept::Atomic(ConceptName::new(&names.name(cur, Namespace::Concept)?)),
            };
            cur.expect(Tok::LParen)?;
            let ind = IndividualName::new(&names.name(cur, Namespace::Individual)?);
            cur.expect(Tok::RParen)?;
            Ok(Axiom::Ca { concept, ind })
        }
        "ra" => {
            let role = RoleName::new(&names.name(cur, Namespace::Role)?);
            cur.expect(Tok::LParen)?;
            let subject = IndividualName::new(&names.name(cur, Namespace::Individual)?);
            cur.expect(Tok::Comma)?;
            let object = IndividualName::new(&names.name(cur, Namespace::Individual)?);
            cur.expect(Tok::RParen)?;
            Ok(Axiom::Ra { role, subject, object })
        }
        other => Err(ParseError::syntax(
            line,
            col,
            format!("unknown axiom keyword `{other}`; expected gci, ri, rr, ca or ra"),
        )),
    }
}

/// Parses an ontology in input mode.
pub fn parse_ontology(text: &str) -> Result<AnnotatedOntology, ParseError> {
    parse_ontology_with(text, ParseMode::Input)
}

/// Parses an ontology with the given strictness.
pub fn parse_ontology_with(text: &str, mode: ParseMode) -> Result<AnnotatedOntology, ParseError> {
    let mut names = Names::new(mode);
    let mut ontology = AnnotatedOntology::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let tokens = lex_line(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(tokens, line_no, line.chars().count() + 1);
        let axiom = parse_axiom_body(&mut cur, &mut names)?;
        let annotation = parse_annotation(&mut cur, &mut names)?;
        cur.finish()?;
        ontology.insert(AnnotatedAxiom { axiom, annotation });
    }
    Ok(ontology)
}

fn single_line(text: &str) -> Result<Cursor, ParseError> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        tokens.extend(lex_line(line, i + 1)?);
    }
    let end = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    Ok(Cursor::new(tokens, 1, end))
}

/// Parses one unannotated axiom, e.g. `gci A <= some(R)` or `ca A(a)`.
/// A GCI left-hand side may be any concept; the right-hand side must be a
/// concept name or `some(R)`.
pub fn parse_axiom(text: &str) -> Result<Axiom, ParseError> {
    let mut cur = single_line(text)?;
    let mut names = Names::new(ParseMode::Input);
    let axiom = parse_axiom_body(&mut cur, &mut names)?;
    if cur.peek() == Some(&Tok::At) {
        return Err(cur.error("annotations are not allowed here; pass the monomial separately"));
    }
    cur.finish()?;
    Ok(axiom)
}

/// Parses an instance query `C(a)`, optionally prefixed by `iq`.
pub fn parse_instance_query(text: &str) -> Result<(Concept, IndividualName), ParseError> {
    let mut cur = single_line(text)?;
    let mut names = Names::new(ParseMode::Input);
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "iq") && cur.peek_at(1) != Some(&Tok::LParen) {
        cur.next();
    }
    let concept = parse_concept(&mut cur, &mut names)?;
    cur.expect(Tok::LParen)?;
    let ind = IndividualName::new(&names.name(&mut cur, Namespace::Individual)?);
    cur.expect(Tok::RParen)?;
    cur.finish()?;
    Ok((concept, ind))
}
