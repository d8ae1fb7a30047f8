//! Finite annotated interpretations.
//!
//! An interpretation stores, for every concept name, a set of
//! (element, monomial) pairs and, for every role name, a set of
//! (element, element, monomial) triples. Monomials are canonical, so the
//! monomial domain is implicit. The extension of ⊤ is not stored: it is the
//! domain paired with the monomial `1`. Extensions of complex concepts are
//! computed on demand.

mod query;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::ontology::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, RoleName};
use crate::provenance::Monomial;

pub use query::{enumerate_matches, parse_query, query_provenance, Atom, Bcq, Match, QueryError, Term, VarName};

/// An element of an interpretation domain: a named individual or an
/// anonymous element identified by the role and monomial of the edge that
/// created it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DomainElement {
    Named(IndividualName),
    Aux { role: RoleName, mon: Monomial },
}

impl DomainElement {
    pub fn named(name: &str) -> Self {
        DomainElement::Named(IndividualName::new(name))
    }

    pub fn aux(role: &str, mon: Monomial) -> Self {
        DomainElement::Aux { role: RoleName::new(role), mon }
    }

    pub fn is_named(&self) -> bool {
        matches!(self, DomainElement::Named(_))
    }

    fn to_json(&self) -> Value {
        match self {
            DomainElement::Named(a) => json!({ "id": self.to_string(), "kind": "named", "name": a.as_str() }),
            DomainElement::Aux { role, mon } => {
                json!({ "id": self.to_string(), "kind": "aux", "role": role.as_str(), "monomial": mon.to_string() })
            }
        }
    }
}

impl fmt::Display for DomainElement {
    /// Named elements print as their name, anonymous ones as `aux(R, m)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainElement::Named(a) => write!(f, "{a}"),
            DomainElement::Aux { role, mon } => write!(f, "aux({role}, {mon})"),
        }
    }
}

/// An (element, monomial) pair of a concept extension.
pub type ConceptPair = (DomainElement, Monomial);
/// An (element, element, monomial) triple of a role extension.
pub type RoleTriple = (DomainElement, DomainElement, Monomial);

/// A finite annotated interpretation; immutable once built.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AnnotatedInterpretation {
    domain: BTreeSet<DomainElement>,
    individuals: BTreeMap<IndividualName, DomainElement>,
    concepts: BTreeMap<ConceptName, BTreeSet<ConceptPair>>,
    roles: BTreeMap<RoleName, BTreeSet<RoleTriple>>,
}

/// Incremental construction of an [`AnnotatedInterpretation`].
#[derive(Clone, Debug, Default)]
pub struct InterpretationBuilder {
    inner: AnnotatedInterpretation,
}

impl InterpretationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an element; a named element also interprets its individual
    /// unless that individual was mapped explicitly.
    pub fn add_element(&mut self, e: DomainElement) -> bool {
        if let DomainElement::Named(a) = &e {
            self.inner.individuals.entry(a.clone()).or_insert_with(|| e.clone());
        }
        self.inner.domain.insert(e)
    }

    /// Interprets individual `a` as `e`, adding `e` to the domain.
    pub fn map_individual(&mut self, a: IndividualName, e: DomainElement) {
        self.inner.domain.insert(e.clone());
        self.inner.individuals.insert(a, e);
    }

    /// Adds `(e, m)` to the extension of `name`. Returns true if new.
    pub fn add_concept(&mut self, name: ConceptName, e: DomainElement, m: Monomial) -> bool {
        self.add_element(e.clone());
        self.inner.concepts.entry(name).or_default().insert((e, m))
    }

    /// Adds `(d, e, m)` to the extension of `role`. Returns true if new.
    pub fn add_role(&mut self, role: RoleName, d: DomainElement, e: DomainElement, m: Monomial) -> bool {
        self.add_element(d.clone());
        self.add_element(e.clone());
        self.inner.roles.entry(role).or_default().insert((d, e, m))
    }

    pub fn build(self) -> AnnotatedInterpretation {
        self.inner
    }
}

static NO_PAIRS: BTreeSet<ConceptPair> = BTreeSet::new();
static NO_TRIPLES: BTreeSet<RoleTriple> = BTreeSet::new();

fn group<'a, I>(pairs: I) -> HashMap<&'a DomainElement, Vec<&'a Monomial>>
where
    I: IntoIterator<Item = &'a ConceptPair>,
{
    let mut out: HashMap<&DomainElement, Vec<&Monomial>> = HashMap::new();
    for (e, m) in pairs {
        out.entry(e).or_default().push(m);
    }
    out
}

impl AnnotatedInterpretation {
    pub fn builder() -> InterpretationBuilder {
        InterpretationBuilder::new()
    }

    pub fn domain(&self) -> &BTreeSet<DomainElement> {
        &self.domain
    }

    /// The element interpreting `a`, if any.
    pub fn individual(&self, a: &IndividualName) -> Option<&DomainElement> {
        self.individuals.get(a)
    }

    pub fn individuals(&self) -> &BTreeMap<IndividualName, DomainElement> {
        &self.individuals
    }

    /// Whether `e` is anonymous, i.e. interprets no individual. The `Aux`
    /// predicate of rewritten queries holds exactly of these elements
    /// (with monomial `1`).
    pub fn is_aux(&self, e: &DomainElement) -> bool {
        match e {
            DomainElement::Named(a) => self.individuals.get(a) != Some(e),
            DomainElement::Aux { .. } => true,
        }
    }

    /// Number of anonymous elements.
    pub fn aux_count(&self) -> usize {
        self.domain.iter().filter(|e| self.is_aux(e)).count()
    }

    /// The stored extension of a concept name.
    pub fn concept(&self, name: &ConceptName) -> &BTreeSet<ConceptPair> {
        self.concepts.get(name).unwrap_or(&NO_PAIRS)
    }

    /// The stored extension of a role name.
    pub fn role(&self, name: &RoleName) -> &BTreeSet<RoleTriple> {
        self.roles.get(name).unwrap_or(&NO_TRIPLES)
    }

    /// Concept names with a non-empty extension.
    pub fn concept_names(&self) -> impl Iterator<Item = &ConceptName> + '_ {
        self.concepts.iter().filter(|(_, s)| !s.is_empty()).map(|(n, _)| n)
    }

    /// Role names with a non-empty extension.
    pub fn role_names(&self) -> impl Iterator<Item = &RoleName> + '_ {
        self.roles.iter().filter(|(_, s)| !s.is_empty()).map(|(n, _)| n)
    }

    /// Total number of stored concept pairs and role triples.
    pub fn size(&self) -> usize {
        self.concepts.values().map(BTreeSet::len).sum::<usize>() + self.roles.values().map(BTreeSet::len).sum::<usize>()
    }

    /// The extension of a concept, with monomials of conjunctions and
    /// existential restrictions multiplied.
    pub fn extend_concept(&self, c: &Concept) -> BTreeSet<ConceptPair> {
        match c {
            Concept::Top => self.domain.iter().map(|d| (d.clone(), Monomial::one())).collect(),
            Concept::Atomic(a) => self.concept(a).clone(),
            Concept::Conj(a, b) => {
                let left = self.extend_concept(a);
                let right = self.extend_concept(b);
                let right = group(&right);
                let mut out = BTreeSet::new();
                for (d, m) in &left {
                    for n in right.get(d).into_iter().flatten() {
                        out.insert((d.clone(), m.product(n)));
                    }
                }
                out
            }
            Concept::ExistsQ(r, filler) => {
                let filler = self.extend_concept(filler);
                let filler = group(&filler);
                let mut out = BTreeSet::new();
                for (d, e, m) in self.role(r) {
                    for n in filler.get(e).into_iter().flatten() {
                        out.insert((d.clone(), m.product(n)));
                    }
                }
                out
            }
            Concept::Exists(r) => self.role(r).iter().map(|(d, _, m)| (d.clone(), m.clone())).collect(),
        }
    }

    /// The extension of `ran(role)`: every object paired with its edge's
    /// monomial.
    pub fn extend_range(&self, role: &RoleName) -> BTreeSet<ConceptPair> {
        self.role(role).iter().map(|(_, e, m)| (e.clone(), m.clone())).collect()
    }

    /// Whether the interpretation satisfies an annotated axiom.
    pub fn satisfies_axiom(&self, ax: &AnnotatedAxiom) -> bool {
        let m = &ax.annotation;
        let included = |sub: BTreeSet<ConceptPair>, sup: BTreeSet<ConceptPair>| {
            sub.iter().all(|(d, n)| sup.contains(&(d.clone(), m.product(n))))
        };
        match &ax.axiom {
            Axiom::Gci { lhs, rhs } => included(self.extend_concept(lhs), self.extend_concept(rhs)),
            Axiom::Rr { role, filler } => included(self.extend_range(role), self.concept(filler).clone()),
            Axiom::Ri { sub, sup } => {
                let sup = self.role(sup);
                self.role(sub).iter().all(|(d, e, n)| sup.contains(&(d.clone(), e.clone(), m.product(n))))
            }
            Axiom::Ca { concept, ind } => match self.individual(ind) {
                Some(d) => self.extend_concept(concept).contains(&(d.clone(), m.clone())),
                None => false,
            },
            Axiom::Ra { role, subject, object } => match (self.individual(subject), self.individual(object)) {
                (Some(d), Some(e)) => self.role(role).contains(&(d.clone(), e.clone(), m.clone())),
                _ => false,
            },
        }
    }

    /// Whether every axiom of the ontology is satisfied.
    pub fn satisfies(&self, ontology: &AnnotatedOntology) -> bool {
        ontology.iter().all(|ax| self.satisfies_axiom(ax))
    }

    /// The axioms of the ontology that are not satisfied.
    pub fn violations<'a>(&self, ontology: &'a AnnotatedOntology) -> Vec<&'a AnnotatedAxiom> {
        ontology.iter().filter(|ax| !self.satisfies_axiom(ax)).collect()
    }

    /// The JSON dump: elements, the individual map, and extensions as
    /// arrays of `[element, ..., monomial]` with element ids, all sorted.
    pub fn to_json(&self) -> Value {
        let elements: Vec<Value> = self.domain.iter().map(DomainElement::to_json).collect();
        let individuals: serde_json::Map<String, Value> =
            self.individuals.iter().map(|(a, e)| (a.to_string(), Value::String(e.to_string()))).collect();
        let concepts: serde_json::Map<String, Value> = self
            .concepts
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(name, pairs)| {
                let pairs: Vec<Value> = pairs.iter().map(|(e, m)| json!([e.to_string(), m.to_string()])).collect();
                (name.to_string(), Value::Array(pairs))
            })
            .collect();
        let roles: serde_json::Map<String, Value> = self
            .roles
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(name, triples)| {
                let triples: Vec<Value> =
                    triples.iter().map(|(d, e, m)| json!([d.to_string(), e.to_string(), m.to_string()])).collect();
                (name.to_string(), Value::Array(triples))
            })
            .collect();
        json!({
            "elements": elements,
            "individuals": individuals,
            "concepts": concepts,
            "roles": roles,
        })
    }
}

impl fmt::Display for AnnotatedInterpretation {
    /// A readable listing: the domain, then one line per extension.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let domain: Vec<String> = self.domain.iter().map(ToString::to_string).collect();
        writeln!(f, "domain: {}", domain.join(", "))?;
        for (name, pairs) in self.concepts.iter().filter(|(_, s)| !s.is_empty()) {
            let pairs: Vec<String> = pairs.iter().map(|(e, m)| format!("({e}, {m})")).collect();
            writeln!(f, "{name}: {}", pairs.join(", "))?;
        }
        for (name, triples) in self.roles.iter().filter(|(_, s)| !s.is_empty()) {
            let triples: Vec<String> = triples.iter().map(|(d, e, m)| format!("({d}, {e}, {m})")).collect();
            writeln!(f, "{name}: {}", triples.join(", "))?;
        }
        Ok(())
    }
}
