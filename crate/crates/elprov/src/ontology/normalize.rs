//! Translation of general GCIs into the restricted syntax, and
//! normalization into the four normal-form GCI shapes.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::ontology::parser::RESERVED_PREFIX;
use crate::ontology::{
    AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, RoleName, Signature,
};
use crate::provenance::{Monomial, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    /// ⊤ on the right of an inclusion constrains the annotation itself
    /// (⊤ only holds with the unit monomial), which the restricted syntax
    /// cannot express.
    #[error("`{0}` has Top on its right-hand side, which is not supported")]
    TopOnRight(String),
    #[error("concept assertion `{0}` must use a concept name or Top")]
    ComplexAssertion(String),
}

/// Deterministic supply of fresh names that avoid a given set of used
/// names. All generated names start with the reserved `__` prefix.
#[derive(Debug, Clone, Default)]
pub struct NameSupply {
    used: HashSet<String>,
    counters: HashMap<&'static str, usize>,
}

impl NameSupply {
    pub fn new() -> Self {
        NameSupply::default()
    }

    /// A supply avoiding every name of `ontology`.
    pub fn for_ontology(ontology: &AnnotatedOntology) -> Self {
        let mut supply = NameSupply::new();
        supply.reserve_signature(&ontology.signature());
        supply
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn reserve_signature(&mut self, sig: &Signature) {
        for name in sig.all_names() {
            self.used.insert(name.to_string());
        }
    }

    fn fresh(&mut self, prefix: &'static str) -> String {
        let counter = self.counters.entry(prefix).or_insert(0);
        loop {
            *counter += 1;
            let name = format!("{RESERVED_PREFIX}{prefix}{counter}");
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn fresh_concept(&mut self) -> ConceptName {
        ConceptName::new(&self.fresh("nf"))
    }

    pub fn fresh_role(&mut self) -> RoleName {
        RoleName::new(&self.fresh("role"))
    }

    pub fn fresh_individual(&mut self) -> IndividualName {
        IndividualName::new(&self.fresh("ind"))
    }

    pub fn fresh_variable(&mut self) -> Variable {
        Variable::new(&self.fresh("v")).expect("generated names are identifiers")
    }
}

/// Rewrites `(lhs ⊑ rhs, annotation)` with an arbitrary right-hand side
/// into restricted-syntax axioms: conjunctions on the right are split,
/// and `C ⊑ ∃R.D` becomes `C ⊑ ∃S`, `S ⊑ R`, `ran(S) ⊑ D` for a fresh
/// role `S`. Every produced axiom keeps the original annotation.
///
/// A range restriction whose filler is not a concept name is split the
/// same way, or routed through a fresh concept `X` with
/// `(ran(S) ⊑ X, annotation)` and `(X ⊑ D, 1)`.
pub fn translate_general_gci(
    lhs: &Concept,
    rhs: &Concept,
    annotation: &Monomial,
    fresh: &mut NameSupply,
) -> Result<Vec<AnnotatedAxiom>, NormalizeError> {
    let mut out = Vec::new();
    translate_into(Side::Concept(lhs.clone()), rhs, annotation, fresh, &mut out)?;
    Ok(out)
}

enum Side {
    Concept(Concept),
    Range(RoleName),
}

fn translate_into(
    lhs: Side,
    rhs: &Concept,
    annotation: &Monomial,
    fresh: &mut NameSupply,
    out: &mut Vec<AnnotatedAxiom>,
) -> Result<(), NormalizeError> {
    let emit = |axiom: Axiom, out: &mut Vec<AnnotatedAxiom>| {
        out.push(AnnotatedAxiom::new(axiom, annotation.clone()));
    };
    match (lhs, rhs) {
        (lhs, Concept::Conj(a, b)) => {
            let copy = match &lhs {
                Side::Concept(c) => Side::Concept(c.clone()),
                Side::Range(r) => Side::Range(r.clone()),
            };
            translate_into(copy, a, annotation, fresh, out)?;
            translate_into(lhs, b, annotation, fresh, out)?;
        }
        (Side::Concept(c), Concept::Top) => {
            return Err(NormalizeError::TopOnRight(format!("gci {c} <= Top")));
        }
        (Side::Range(r), Concept::Top) => {
            return Err(NormalizeError::TopOnRight(format!("rr ran({r}) <= Top")));
        }
        (Side::Concept(c), Concept::Atomic(_) | Concept::Exists(_)) => {
            emit(Axiom::Gci { lhs: c, rhs: rhs.clone() }, out);
        }
        (Side::Concept(c), Concept::ExistsQ(r, filler)) => {
            let s = fresh.fresh_role();
            emit(Axiom::Gci { lhs: c, rhs: Concept::Exists(s.clone()) }, out);
            emit(Axiom::Ri { sub: s.clone(), sup: r.clone() }, out);
            translate_into(Side::Range(s), filler, annotation, fresh, out)?;
        }
        (Side::Range(r), Concept::Atomic(a)) => {
            emit(Axiom::Rr { role: r, filler: a.clone() }, out);
        }
        (Side::Range(r), Concept::Exists(_) | Concept::ExistsQ(..)) => {
            let x = fresh.fresh_concept();
            emit(Axiom::Rr { role: r, filler: x.clone() }, out);
            translate_into(Side::Concept(Concept::Atomic(x)), rhs, &Monomial::one(), fresh, out)?;
        }
    }
    Ok(())
}

struct Normalizer<'a> {
    fresh: &'a mut NameSupply,
    memo: HashMap<Concept, ConceptName>,
    out: Vec<AnnotatedAxiom>,
}

impl Normalizer<'_> {
    /// Returns `c` if it is ⊤ or a concept name, otherwise a fresh name
    /// `X` with `(c ⊑ X, 1)` normalized into the output.
    fn basic(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Top | Concept::Atomic(_) => c.clone(),
            _ => Concept::Atomic(self.name_for(c)),
        }
    }

    fn name_for(&mut self, c: &Concept) -> ConceptName {
        if let Some(x) = self.memo.get(c) {
            return x.clone();
        }
        let x = self.fresh.fresh_concept();
        self.memo.insert(c.clone(), x.clone());
        self.gci(c, &Concept::Atomic(x.clone()), &Monomial::one());
        x
    }

    /// Normalizes a restricted-syntax GCI.
    fn gci(&mut self, lhs: &Concept, rhs: &Concept, annotation: &Monomial) {
        let lhs = match rhs {
            Concept::Exists(_) => self.basic(lhs),
            _ => match lhs {
                Concept::Top | Concept::Atomic(_) => lhs.clone(),
                Concept::Conj(a, b) => Concept::and(self.basic(a), self.basic(b)),
                Concept::ExistsQ(r, c) => Concept::ExistsQ(r.clone(), Box::new(self.basic(c))),
                Concept::Exists(r) => Concept::ExistsQ(r.clone(), Box::new(Concept::Top)),
            },
        };
        self.out.push(AnnotatedAxiom::new(Axiom::Gci { lhs, rhs: rhs.clone() }, annotation.clone()));
    }
}

/// Normalizes an ontology: every GCI gets one of the shapes `A ⊑ B`,
/// `A ⊓ A' ⊑ B`, `A ⊑ ∃R`, `∃R.A ⊑ B` with `A, A'` concept names or ⊤ and
/// `B` a concept name. Complex subconcepts are replaced by fresh names
/// (one per distinct subconcept), defined by helper axioms annotated `1`.
/// GCIs outside the restricted syntax are first translated with
/// [`translate_general_gci`].
pub fn normalize(ontology: &AnnotatedOntology, fresh: &mut NameSupply) -> Result<AnnotatedOntology, NormalizeError> {
    fresh.reserve_signature(&ontology.signature());
    let mut restricted = Vec::new();
    for ax in ontology {
        match &ax.axiom {
            Axiom::Gci { lhs, rhs } if !rhs.is_rhs() => {
                restricted.extend(translate_general_gci(lhs, rhs, &ax.annotation, fresh)?);
            }
            Axiom::Ca { concept, .. } if !concept.is_basic() => {
                return Err(NormalizeError::ComplexAssertion(ax.axiom.to_string()));
            }
            _ => restricted.push(ax.clone()),
        }
    }
    let mut n = Normalizer { fresh, memo: HashMap::new(), out: Vec::new() };
    for ax in restricted {
        match &ax.axiom {
            Axiom::Gci { lhs, rhs } => n.gci(lhs, rhs, &ax.annotation),
            _ => n.out.push(ax),
        }
    }
    Ok(n.out.into_iter().collect())
}
