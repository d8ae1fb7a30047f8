//! Annotated Boolean conjunctive queries: syntax, match enumeration and
//! query provenance.
//!
//! Query files contain atoms `A(t, ?p)` and `R(t1, t2, ?p)` joined by `&`,
//! possibly over several lines. Terms are `?`-variables or individual
//! names; the last argument of each atom is its provenance variable, which
//! must occur nowhere else.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::{AnnotatedInterpretation, DomainElement};
use crate::canonical::RewritingConditions;
use crate::ontology::{ConceptName, IndividualName, RoleName};
use crate::provenance::{Monomial, Polynomial};
use crate::syntax::{lex_line, Cursor, ParseError, ParseErrorKind, Tok};

/// The name of a query variable, without the `?`.
pub type VarName = String;

/// A query term. Individuals order before variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Ind(IndividualName),
    Var(VarName),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn ind(name: &str) -> Term {
        Term::Ind(IndividualName::new(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Ind(a) => write!(f, "{a}"),
            Term::Var(x) => write!(f, "?{x}"),
        }
    }
}

/// A query atom; `prov` is the provenance variable in last position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Concept { name: ConceptName, arg: Term, prov: VarName },
    Role { role: RoleName, subject: Term, object: Term, prov: VarName },
}

impl Atom {
    pub fn concept(name: &str, arg: Term, prov: &str) -> Atom {
        Atom::Concept { name: ConceptName::new(name), arg, prov: prov.to_string() }
    }

    pub fn role(role: &str, subject: Term, object: Term, prov: &str) -> Atom {
        Atom::Role { role: RoleName::new(role), subject, object, prov: prov.to_string() }
    }

    pub fn prov(&self) -> &str {
        match self {
            Atom::Concept { prov, .. } | Atom::Role { prov, .. } => prov,
        }
    }

    /// The terms in object positions.
    pub fn objects(&self) -> Vec<&Term> {
        match self {
            Atom::Concept { arg, .. } => vec![arg],
            Atom::Role { subject, object, .. } => vec![subject, object],
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept { name, arg, prov } => write!(f, "{name}({arg}, ?{prov})"),
            Atom::Role { role, subject, object, prov } => write!(f, "{role}({subject}, {object}, ?{prov})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("query is not in standard form: {0}")]
    NotStandard(String),
    #[error("individual `{0}` does not occur in the ontology")]
    UnknownIndividual(IndividualName),
}

/// A Boolean conjunctive query in standard form: every provenance variable
/// occurs exactly once.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Bcq {
    atoms: Vec<Atom>,
}

impl Bcq {
    /// Validates standard form. Atom order is kept.
    pub fn new(atoms: Vec<Atom>) -> Result<Bcq, QueryError> {
        let mut provs = BTreeSet::new();
        for atom in &atoms {
            if !provs.insert(atom.prov()) {
                return Err(QueryError::NotStandard(format!("provenance variable `?{}` occurs twice", atom.prov())));
            }
        }
        for atom in &atoms {
            for t in atom.objects() {
                if let Term::Var(x) = t {
                    if provs.contains(x.as_str()) {
                        return Err(QueryError::NotStandard(format!(
                            "provenance variable `?{x}` also occurs as an object term"
                        )));
                    }
                }
            }
        }
        Ok(Bcq { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Object terms (everything but provenance variables), sorted.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.atoms.iter().flat_map(|a| a.objects().into_iter().cloned()).collect()
    }

    /// Individuals mentioned by the query.
    pub fn individuals(&self) -> BTreeSet<IndividualName> {
        self.terms()
            .into_iter()
            .filter_map(|t| match t {
                Term::Ind(a) => Some(a),
                Term::Var(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for Bcq {
    /// Atoms joined by ` & ` in the query grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Concept,
    Role,
    Individual,
}

fn declare(
    kinds: &mut HashMap<String, Kind>,
    name: &str,
    kind: Kind,
    line: usize,
    col: usize,
) -> Result<(), ParseError> {
    match kinds.get(name) {
        Some(k) if *k != kind => Err(ParseError::new(
            line,
            col,
            ParseErrorKind::NamespaceCollision,
            format!("`{name}` is used both as {k:?} and as {kind:?}").to_lowercase(),
        )),
        _ => {
            kinds.insert(name.to_string(), kind);
            Ok(())
        }
    }
}

fn parse_term(cur: &mut Cursor, kinds: &mut HashMap<String, Kind>) -> Result<(Term, usize, usize), ParseError> {
    let (line, col) = cur.position();
    match cur.peek().cloned() {
        Some(Tok::QVar(x)) => {
            cur.next();
            Ok((Term::Var(x), line, col))
        }
        Some(Tok::Ident(_)) => {
            let (name, line, col) = cur.ident("a term")?;
            declare(kinds, &name, Kind::Individual, line, col)?;
            Ok((Term::Ind(IndividualName::new(&name)), line, col))
        }
        _ => Err(cur.error("expected a `?`-variable or an individual name")),
    }
}

fn parse_atom(cur: &mut Cursor, kinds: &mut HashMap<String, Kind>) -> Result<Atom, ParseError> {
    let (name, line, col) = cur.ident("a concept or role name")?;
    cur.expect(Tok::LParen)?;
    let mut args = vec![parse_term(cur, kinds)?];
    while cur.eat(&Tok::Comma) {
        args.push(parse_term(cur, kinds)?);
    }
    cur.expect(Tok::RParen)?;
    let prov = match args.pop() {
        Some((Term::Var(p), _, _)) if !args.is_empty() => p,
        Some((_, l, c)) if !args.is_empty() => {
            return Err(ParseError::syntax(l, c, "the last argument of an atom must be a `?`-variable"))
        }
        _ => return Err(ParseError::syntax(line, col, "an atom needs at least two arguments")),
    };
    let mut args = args.into_iter().map(|(t, _, _)| t);
    match (args.next(), args.next(), args.next()) {
        (Some(arg), None, None) => {
            declare(kinds, &name, Kind::Concept, line, col)?;
            Ok(Atom::Concept { name: ConceptName::new(&name), arg, prov })
        }
        (Some(subject), Some(object), None) => {
            declare(kinds, &name, Kind::Role, line, col)?;
            Ok(Atom::Role { role: RoleName::new(&name), subject, object, prov })
        }
        _ => Err(ParseError::syntax(line, col, "an atom takes two (concept) or three (role) arguments")),
    }
}

/// Parses a query file.
pub fn parse_query(text: &str) -> Result<Bcq, QueryError> {
    let mut tokens = Vec::new();
    let mut last = (1, 1);
    for (i, line) in text.lines().enumerate() {
        let toks = lex_line(line, i + 1)?;
        if !toks.is_empty() {
            last = (i + 1, line.chars().count() + 1);
        }
        tokens.extend(toks);
    }
    let mut cur = Cursor::new(tokens, last.0, last.1);
    if cur.peek().is_none() {
        return Err(cur.error("empty query").into());
    }
    let mut kinds = HashMap::new();
    let mut atoms = vec![parse_atom(&mut cur, &mut kinds)?];
    while cur.eat(&Tok::Amp) {
        atoms.push(parse_atom(&mut cur, &mut kinds)?);
    }
    cur.finish()?;
    Bcq::new(atoms)
}

/// A homomorphism from the query into an interpretation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Match {
    /// Images of the object terms, individuals included.
    pub objects: BTreeMap<Term, DomainElement>,
    /// Monomials bound to the provenance variables.
    pub provenance: BTreeMap<VarName, Monomial>,
}

impl Match {
    /// The product of the provenance bindings.
    pub fn monomial(&self) -> Monomial {
        self.provenance.values().fold(Monomial::one(), |acc, m| acc.product(m))
    }
}

/// The candidate tuples of one atom with lookup by first and second element.
struct Candidates<'a> {
    tuples: Vec<(&'a DomainElement, Option<&'a DomainElement>, &'a Monomial)>,
    by_first: HashMap<&'a DomainElement, Vec<usize>>,
    by_second: HashMap<&'a DomainElement, Vec<usize>>,
}

impl<'a> Candidates<'a> {
    fn new(i: &'a AnnotatedInterpretation, atom: &Atom) -> Self {
        let tuples: Vec<_> = match atom {
            Atom::Concept { name, .. } => i.concept(name).iter().map(|(e, m)| (e, None, m)).collect(),
            Atom::Role { role, .. } => i.role(role).iter().map(|(d, e, m)| (d, Some(e), m)).collect(),
        };
        let mut by_first: HashMap<_, Vec<usize>> = HashMap::new();
        let mut by_second: HashMap<_, Vec<usize>> = HashMap::new();
        for (k, (d, e, _)) in tuples.iter().enumerate() {
            by_first.entry(*d).or_default().push(k);
            if let Some(e) = e {
                by_second.entry(*e).or_default().push(k);
            }
        }
        Candidates { tuples, by_first, by_second }
    }
}

struct Search<'a> {
    interp: &'a AnnotatedInterpretation,
    atoms: Vec<(&'a Atom, Candidates<'a>)>,
    side: Option<&'a RewritingConditions>,
    objects: HashMap<&'a Term, &'a DomainElement>,
    provenance: Vec<(&'a str, &'a Monomial)>,
    out: Vec<Match>,
}

impl<'a> Search<'a> {
    /// Whether `e` may be bound to term `t` under the cycle condition.
    fn allowed(&self, t: &Term, e: &DomainElement) -> bool {
        match self.side {
            Some(side) if side.cyc.contains(t) => !self.interp.is_aux(e),
            _ => true,
        }
    }

    fn forks_hold(&self) -> bool {
        let Some(side) = self.side else { return true };
        side.forks.iter().all(|fork| {
            let rep = self.objects[&fork.representative];
            if !self.interp.is_aux(rep) {
                return true;
            }
            let first = self.objects[&fork.pre[0]];
            fork.pre.iter().all(|t| self.objects[t] == first)
        })
    }

    /// Binds `t` to `e` if consistent; returns whether it was newly bound,
    /// or `None` on conflict.
    fn bind(&mut self, t: &'a Term, e: &'a DomainElement) -> Option<bool> {
        match self.objects.get(t) {
            Some(bound) => (*bound == e).then_some(false),
            None => {
                if !self.allowed(t, e) {
                    return None;
                }
                self.objects.insert(t, e);
                Some(true)
            }
        }
    }

    fn run(&mut self, depth: usize) {
        if depth == self.atoms.len() {
            if self.forks_hold() {
                self.out.push(Match {
                    objects: self.objects.iter().map(|(t, e)| ((*t).clone(), (*e).clone())).collect(),
                    provenance: self.provenance.iter().map(|(p, m)| (p.to_string(), (*m).clone())).collect(),
                });
            }
            return;
        }
        let atom: &'a Atom = self.atoms[depth].0;
        let objects = atom.objects();
        let (first, second) = (objects[0], objects.get(1).copied());
        let cands = &self.atoms[depth].1;
        let indices: Vec<usize> = if let Some(e) = self.objects.get(first) {
            cands.by_first.get(e).cloned().unwrap_or_default()
        } else if let Some(e) = second.and_then(|t| self.objects.get(t)) {
            cands.by_second.get(e).cloned().unwrap_or_default()
        } else {
            (0..cands.tuples.len()).collect()
        };
        for k in indices {
            let (d, e, m) = self.atoms[depth].1.tuples[k];
            let Some(new_first) = self.bind(first, d) else { continue };
            let new_second = match (second, e) {
                (Some(t), Some(e)) => match self.bind(t, e) {
                    Some(b) => b,
                    None => {
                        if new_first {
                            self.objects.remove(first);
                        }
                        continue;
                    }
                },
                _ => false,
            };
            self.provenance.push((atom.prov(), m));
            self.run(depth + 1);
            self.provenance.pop();
            if new_second {
                self.objects.remove(second.expect("bound above"));
            }
            if new_first {
                self.objects.remove(first);
            }
        }
    }
}

/// All matches of `q` in `interp`, sorted. With side conditions, terms in
/// the cycle set must map to named elements, and for every fork whose
/// representative maps to an anonymous element, the fork's predecessor
/// terms must map to the same element.
pub fn enumerate_matches(
    interp: &AnnotatedInterpretation,
    q: &Bcq,
    side: Option<&RewritingConditions>,
) -> Result<Vec<Match>, QueryError> {
    let mut search =
        Search { interp, atoms: Vec::new(), side, objects: HashMap::new(), provenance: Vec::new(), out: Vec::new() };
    let terms: Vec<&Term> = q.atoms().iter().flat_map(Atom::objects).collect();
    for t in terms {
        if let Term::Ind(a) = t {
            let e = interp.individual(a).ok_or_else(|| QueryError::UnknownIndividual(a.clone()))?;
            if search.bind(t, e).is_none() {
                // An individual interpreted as an anonymous element under a
                // cycle condition cannot match.
                return Ok(Vec::new());
            }
        }
    }
    let mut atoms: Vec<(&Atom, Candidates)> = q.atoms().iter().map(|a| (a, Candidates::new(interp, a))).collect();
    atoms.sort_by_key(|(_, c)| c.tuples.len());
    search.atoms = atoms;
    search.run(0);
    let mut out = search.out;
    out.sort();
    debug_assert!(out.windows(2).all(|w| w[0] != w[1]), "a match was enumerated twice");
    Ok(out)
}

/// The provenance polynomial of `q`: the sum over matches of the product
/// of their provenance bindings.
pub fn query_provenance(
    interp: &AnnotatedInterpretation,
    q: &Bcq,
    side: Option<&RewritingConditions>,
) -> Result<Polynomial, QueryError> {
    let mut p = Polynomial::zero();
    for m in enumerate_matches(interp, q, side)? {
        p.add_term(m.monomial(), 1);
    }
    Ok(p)
}
