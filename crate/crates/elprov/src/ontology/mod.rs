//! Annotated ELHr ontologies: names, concepts, axioms, and signatures.

mod normalize;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::provenance::{Monomial, Variable};

pub use normalize::{normalize, translate_general_gci, NameSupply, NormalizeError};
pub use parser::{
    parse_axiom, parse_instance_query, parse_ontology, parse_ontology_with, Namespace, ParseMode, RESERVED_PREFIX,
};

macro_rules! name_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        ///
        /// Names are not validated on construction; the parser only produces
        /// identifiers matching `[A-Za-z_][A-Za-z0-9_]*`.
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: &str) -> Self {
                $name(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                $name::new(name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// A concept name (element of N_C).
    ConceptName
);
name_type!(
    /// A role name (element of N_R).
    RoleName
);
name_type!(
    /// An individual name (element of N_I).
    IndividualName
);

/// An ELHr concept.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Concept {
    Top,
    Atomic(ConceptName),
    Conj(Box<Concept>, Box<Concept>),
    /// Qualified existential restriction ∃R.C.
    ExistsQ(RoleName, Box<Concept>),
    /// Unqualified existential restriction ∃R (equivalent to ∃R.⊤).
    Exists(RoleName),
}

impl Concept {
    pub fn atomic(name: &str) -> Concept {
        Concept::Atomic(ConceptName::new(name))
    }

    pub fn and(lhs: Concept, rhs: Concept) -> Concept {
        Concept::Conj(Box::new(lhs), Box::new(rhs))
    }

    pub fn some(role: &str, filler: Concept) -> Concept {
        Concept::ExistsQ(RoleName::new(role), Box::new(filler))
    }

    pub fn exists(role: &str) -> Concept {
        Concept::Exists(RoleName::new(role))
    }

    /// ⊤ or a concept name.
    pub fn is_basic(&self) -> bool {
        matches!(self, Concept::Top | Concept::Atomic(_))
    }

    /// Satisfies the right-hand-side grammar `D ::= A | ∃R`.
    pub fn is_rhs(&self) -> bool {
        matches!(self, Concept::Atomic(_) | Concept::Exists(_))
    }

    pub fn mentions_top(&self) -> bool {
        match self {
            Concept::Top => true,
            Concept::Atomic(_) | Concept::Exists(_) => false,
            Concept::Conj(a, b) => a.mentions_top() || b.mentions_top(),
            Concept::ExistsQ(_, c) => c.mentions_top(),
        }
    }

    fn collect(&self, concepts: &mut BTreeSet<ConceptName>, roles: &mut BTreeSet<RoleName>) {
        match self {
            Concept::Top => {}
            Concept::Atomic(a) => {
                concepts.insert(a.clone());
            }
            Concept::Conj(a, b) => {
                a.collect(concepts, roles);
                b.collect(concepts, roles);
            }
            Concept::ExistsQ(r, c) => {
                roles.insert(r.clone());
                c.collect(concepts, roles);
            }
            Concept::Exists(r) => {
                roles.insert(r.clone());
            }
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("Top"),
            Concept::Atomic(a) => write!(f, "{a}"),
            Concept::Conj(a, b) => write!(f, "and({a}, {b})"),
            Concept::ExistsQ(r, c) => write!(f, "some({r}, {c})"),
            Concept::Exists(r) => write!(f, "some({r})"),
        }
    }
}

/// An ELHr axiom.
///
/// `Ca` holds a concept name or ⊤; ⊤ only occurs in derived assertions
/// `⊤(a)`, never in parsed input.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Axiom {
    Gci { lhs: Concept, rhs: Concept },
    Ri { sub: RoleName, sup: RoleName },
    Rr { role: RoleName, filler: ConceptName },
    Ca { concept: Concept, ind: IndividualName },
    Ra { role: RoleName, subject: IndividualName, object: IndividualName },
}

impl Axiom {
    pub fn gci(lhs: Concept, rhs: Concept) -> Axiom {
        Axiom::Gci { lhs, rhs }
    }

    pub fn ri(sub: &str, sup: &str) -> Axiom {
        Axiom::Ri { sub: sub.into(), sup: sup.into() }
    }

    pub fn rr(role: &str, filler: &str) -> Axiom {
        Axiom::Rr { role: role.into(), filler: filler.into() }
    }

    pub fn ca(concept: &str, ind: &str) -> Axiom {
        Axiom::Ca { concept: Concept::atomic(concept), ind: ind.into() }
    }

    pub fn ra(role: &str, subject: &str, object: &str) -> Axiom {
        Axiom::Ra { role: role.into(), subject: subject.into(), object: object.into() }
    }

    pub fn is_assertion(&self) -> bool {
        matches!(self, Axiom::Ca { .. } | Axiom::Ra { .. })
    }

    /// Checks the restricted syntax: GCI right-hand sides are `A` or `∃R`,
    /// concept assertions use a concept name.
    pub fn is_restricted(&self) -> bool {
        match self {
            Axiom::Gci { rhs, .. } => rhs.is_rhs(),
            Axiom::Ca { concept, .. } => matches!(concept, Concept::Atomic(_)),
            _ => true,
        }
    }

    /// True if the axiom has one of the normal-form shapes; ⊤ is allowed
    /// wherever a concept name is, except on the right of a GCI.
    pub fn is_normal(&self) -> bool {
        match self {
            Axiom::Gci { lhs, rhs } => match (lhs, rhs) {
                (l, Concept::Atomic(_)) if l.is_basic() => true,
                (Concept::Conj(a, b), Concept::Atomic(_)) => a.is_basic() && b.is_basic(),
                (Concept::ExistsQ(_, a), Concept::Atomic(_)) => a.is_basic(),
                (l, Concept::Exists(_)) => l.is_basic(),
                _ => false,
            },
            Axiom::Ca { concept, .. } => concept.is_basic(),
            _ => true,
        }
    }

    fn collect(&self, sig: &mut Signature) {
        match self {
            Axiom::Gci { lhs, rhs } => {
                lhs.collect(&mut sig.concepts, &mut sig.roles);
                rhs.collect(&mut sig.concepts, &mut sig.roles);
                sig.has_top |= lhs.mentions_top() || rhs.mentions_top();
            }
            Axiom::Ri { sub, sup } => {
                sig.roles.insert(sub.clone());
                sig.roles.insert(sup.clone());
            }
            Axiom::Rr { role, filler } => {
                sig.roles.insert(role.clone());
                sig.concepts.insert(filler.clone());
            }
            Axiom::Ca { concept, ind } => {
                concept.collect(&mut sig.concepts, &mut sig.roles);
                sig.has_top |= concept.mentions_top();
                sig.individuals.insert(ind.clone());
            }
            Axiom::Ra { role, subject, object } => {
                sig.roles.insert(role.clone());
                sig.individuals.insert(subject.clone());
                sig.individuals.insert(object.clone());
            }
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Gci { lhs, rhs } => write!(f, "gci {lhs} <= {rhs}"),
            Axiom::Ri { sub, sup } => write!(f, "ri {sub} <= {sup}"),
            Axiom::Rr { role, filler } => write!(f, "rr ran({role}) <= {filler}"),
            Axiom::Ca { concept, ind } => write!(f, "ca {concept}({ind})"),
            Axiom::Ra { role, subject, object } => write!(f, "ra {role}({subject}, {object})"),
        }
    }
}

/// An axiom paired with a provenance monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AnnotatedAxiom {
    pub axiom: Axiom,
    pub annotation: Monomial,
}

impl AnnotatedAxiom {
    pub fn new(axiom: Axiom, annotation: Monomial) -> Self {
        AnnotatedAxiom { axiom, annotation }
    }

    /// Annotates with the unit monomial.
    pub fn unit(axiom: Axiom) -> Self {
        AnnotatedAxiom { axiom, annotation: Monomial::one() }
    }

    /// Annotates with a single variable. Panics if `var` is not an
    /// identifier.
    pub fn with_var(axiom: Axiom, var: &str) -> Self {
        let v = Variable::new(var).expect("annotation variable must be an identifier");
        AnnotatedAxiom { axiom, annotation: Monomial::var(v) }
    }
}

impl fmt::Display for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.axiom, self.annotation)
    }
}

/// The names occurring in an ontology, each set in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<ConceptName>,
    pub roles: BTreeSet<RoleName>,
    pub individuals: BTreeSet<IndividualName>,
    pub vars: BTreeSet<Variable>,
    /// Whether ⊤ occurs literally in some axiom.
    pub has_top: bool,
}

impl Signature {
    /// Every name of every namespace, as plain strings.
    pub fn all_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.concepts
            .iter()
            .map(|n| n.as_str())
            .chain(self.roles.iter().map(|n| n.as_str()))
            .chain(self.individuals.iter().map(|n| n.as_str()))
            .chain(self.vars.iter().map(|n| n.as_str()))
    }
}

/// A finite set of annotated axioms.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct AnnotatedOntology {
    axioms: BTreeSet<AnnotatedAxiom>,
}

impl AnnotatedOntology {
    pub fn new() -> Self {
        AnnotatedOntology::default()
    }

    pub fn insert(&mut self, axiom: AnnotatedAxiom) -> bool {
        self.axioms.insert(axiom)
    }

    pub fn contains(&self, axiom: &AnnotatedAxiom) -> bool {
        self.axioms.contains(axiom)
    }

    /// Axioms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &AnnotatedAxiom> + '_ {
        self.axioms.iter()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.axioms {
            ax.axiom.collect(&mut sig);
            sig.vars.extend(ax.annotation.vars().iter().cloned());
        }
        sig
    }

    /// The individual names occurring in the ontology.
    pub fn individuals(&self) -> BTreeSet<IndividualName> {
        self.signature().individuals
    }

    /// The provenance variables occurring in the ontology.
    pub fn vars(&self) -> BTreeSet<Variable> {
        self.signature().vars
    }

    /// True if every axiom is in normal form.
    pub fn is_normalized(&self) -> bool {
        self.axioms.iter().all(|a| a.axiom.is_normal())
    }
}

impl FromIterator<AnnotatedAxiom> for AnnotatedOntology {
    fn from_iter<I: IntoIterator<Item = AnnotatedAxiom>>(iter: I) -> Self {
        AnnotatedOntology { axioms: iter.into_iter().collect() }
    }
}

impl Extend<AnnotatedAxiom> for AnnotatedOntology {
    fn extend<I: IntoIterator<Item = AnnotatedAxiom>>(&mut self, iter: I) {
        self.axioms.extend(iter)
    }
}

impl<'a> IntoIterator for &'a AnnotatedOntology {
    type Item = &'a AnnotatedAxiom;
    type IntoIter = std::collections::btree_set::Iter<'a, AnnotatedAxiom>;
    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

impl fmt::Display for AnnotatedOntology {
    /// One axiom per line in the ontology file grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}
