//! Saturation with the completion rules and annotated entailment.
//!
//! Assertion entailment is decided by membership in the saturated set
//! bounded by the size of the queried monomial. GCIs, role inclusions,
//! range restrictions and instance queries are reduced to assertion
//! entailment over an extended ontology (see [`Reduction`]).

pub(crate) mod engine;
mod reductions;

use std::fmt;

use thiserror::Error;

use crate::ontology::{normalize, AnnotatedAxiom, AnnotatedOntology, Axiom, NameSupply, NormalizeError};
use crate::provenance::Monomial;

pub use engine::{LimitExceeded, LimitKind, Limits, Rule, RuleSet, SaturationStats};
pub use reductions::{
    gci_reduction, iq_reduction, reduce_ca_to_gci, reduce_ra_to_ri, ri_reduction, rr_reduction, AssertionReduction,
    Reduction, RoleAssertionReduction,
};

use engine::{Engine, Policy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("axiom `{0}` is not in normal form")]
    NotNormalized(Axiom),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Limit(#[from] LimitExceeded),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

/// Options shared by saturation and the entailment procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    pub limits: Limits,
    /// Enabled completion rules; disabling rules is only useful for
    /// experiments.
    pub rules: RuleSet,
}

impl Options {
    pub fn with_limits(limits: Limits) -> Self {
        Options { limits, rules: RuleSet::all() }
    }
}

/// An annotated axiom of a saturated set with derivation bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedAxiom {
    pub axiom: AnnotatedAxiom,
    /// The rule that first derived it; `None` for input axioms.
    pub rule: Option<Rule>,
    /// How many rule instances (or input occurrences) produced it.
    pub derivations: u64,
}

/// The closure of a normalized ontology under the completion rules,
/// restricted to monomials with at most `bound` variables.
#[derive(Debug, Clone)]
pub struct SaturatedSet {
    engine: Engine,
    bound: Option<usize>,
}

impl SaturatedSet {
    /// The bound on monomial size, `None` for full saturation.
    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn stats(&self) -> &SaturationStats {
        self.engine.stats()
    }

    /// Number of stored annotated axioms.
    pub fn len(&self) -> usize {
        self.engine.stats().axioms
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `(axiom, m)` is in the set. The axiom must have a normal-form
    /// shape; `some(R)` on the left is read as `some(R, Top)`.
    pub fn contains(&self, axiom: &Axiom, m: &Monomial) -> bool {
        let Some(fact) = self.engine.symbols.lookup_axiom(axiom) else { return false };
        let Some(mono) = self.engine.symbols.lookup_monomial(m) else { return false };
        self.engine.annotations(fact).iter().any(|(x, _)| *x == mono)
    }

    /// All monomials stored for `axiom`, in canonical order.
    pub fn annotations(&self, axiom: &Axiom) -> Vec<Monomial> {
        let Some(fact) = self.engine.symbols.lookup_axiom(axiom) else { return Vec::new() };
        let mut out: Vec<Monomial> =
            self.engine.annotations(fact).iter().map(|(m, _)| self.engine.symbols.monomial(m)).collect();
        out.sort();
        out
    }

    /// Every member, sorted canonically by axiom then monomial.
    pub fn axioms(&self) -> Vec<DerivedAxiom> {
        let mut out: Vec<DerivedAxiom> = self
            .engine
            .annotated_axioms()
            .into_iter()
            .map(|(axiom, origin)| DerivedAxiom { axiom, rule: origin.rule, derivations: origin.derivations })
            .collect();
        out.sort_by(|a, b| a.axiom.cmp(&b.axiom));
        out
    }

    /// The members as an ontology.
    pub fn to_ontology(&self) -> AnnotatedOntology {
        self.engine.annotated_axioms().into_iter().map(|(a, _)| a).collect()
    }
}

impl fmt::Display for SaturatedSet {
    /// One member per line in the ontology grammar, sorted canonically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.axioms() {
            writeln!(f, "{}", d.axiom)?;
        }
        Ok(())
    }
}

/// Saturates a normalized ontology. `bound` limits the number of
/// variables per monomial; `None` saturates fully.
pub fn saturate(
    ontology: &AnnotatedOntology,
    bound: Option<usize>,
    limits: &Limits,
) -> Result<SaturatedSet, CompletionError> {
    saturate_with(ontology, bound, &Options::with_limits(*limits))
}

/// [`saturate`] with an explicit rule set.
pub fn saturate_with(
    ontology: &AnnotatedOntology,
    bound: Option<usize>,
    options: &Options,
) -> Result<SaturatedSet, CompletionError> {
    let mut engine =
        Engine::new(ontology, Policy::Collect { bound }, options.rules).map_err(CompletionError::NotNormalized)?;
    engine.run(&options.limits)?;
    Ok(SaturatedSet { engine, bound })
}

/// Normalizes `ontology` with a supply avoiding its names.
pub(crate) fn normalized(ontology: &AnnotatedOntology) -> Result<AnnotatedOntology, CompletionError> {
    let mut supply = NameSupply::for_ontology(ontology);
    Ok(normalize(ontology, &mut supply)?)
}

/// The answer of an entailment check.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Entailment {
    pub entailed: bool,
    /// Reasons why the question could not be meaningfully posed, e.g. a
    /// name outside the ontology's signature. Non-empty only when
    /// `entailed` is false.
    pub warnings: Vec<String>,
}

impl Entailment {
    fn answer(entailed: bool) -> Self {
        Entailment { entailed, warnings: Vec::new() }
    }

    fn warning(message: String) -> Self {
        Entailment { entailed: false, warnings: vec![message] }
    }
}

/// Decides `O ⊨ (alpha, m)` for a concept or role assertion.
pub fn entails_assertion(
    ontology: &AnnotatedOntology,
    alpha: &Axiom,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    if !alpha.is_assertion() {
        return Err(CompletionError::InvalidQuery(format!("`{alpha}` is not an assertion")));
    }
    if let Some(unknown) = unknown_names(ontology, alpha) {
        return Ok(Entailment::warning(unknown));
    }
    let normal = normalized(ontology)?;
    let sat = saturate_with(&normal, Some(m.len()), options)?;
    Ok(Entailment::answer(sat.contains(alpha, m)))
}

fn unknown_names(ontology: &AnnotatedOntology, alpha: &Axiom) -> Option<String> {
    let sig = ontology.signature();
    let mut missing = Vec::new();
    match alpha {
        Axiom::Ca { concept, ind } => {
            if let crate::ontology::Concept::Atomic(a) = concept {
                if !sig.concepts.contains(a) {
                    missing.push(format!("concept `{a}`"));
                }
            }
            if !sig.individuals.contains(ind) {
                missing.push(format!("individual `{ind}`"));
            }
        }
        Axiom::Ra { role, subject, object } => {
            if !sig.roles.contains(role) {
                missing.push(format!("role `{role}`"));
            }
            for i in [subject, object] {
                if !sig.individuals.contains(i) {
                    missing.push(format!("individual `{i}`"));
                }
            }
        }
        _ => {}
    }
    missing.dedup();
    (!missing.is_empty()).then(|| format!("{} not in the ontology's signature", missing.join(", ")))
}

/// Decides `O ⊨ (C ⊑ D, m)` for `C` any concept and `D` a concept name or
/// `∃R`.
pub fn entails_gci(
    ontology: &AnnotatedOntology,
    lhs: &crate::ontology::Concept,
    rhs: &crate::ontology::Concept,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    let reduction = gci_reduction(ontology, lhs, rhs)?;
    Ok(Entailment::answer(reduction.entails(m, options)?))
}

/// Decides `O ⊨ (sub ⊑ sup, m)`.
pub fn entails_ri(
    ontology: &AnnotatedOntology,
    sub: &crate::ontology::RoleName,
    sup: &crate::ontology::RoleName,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    let reduction = ri_reduction(ontology, sub, sup);
    Ok(Entailment::answer(reduction.entails(m, options)?))
}

/// Decides `O ⊨ (ran(role) ⊑ filler, m)`.
pub fn entails_rr(
    ontology: &AnnotatedOntology,
    role: &crate::ontology::RoleName,
    filler: &crate::ontology::ConceptName,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    let reduction = rr_reduction(ontology, role, filler);
    Ok(Entailment::answer(reduction.entails(m, options)?))
}

/// Decides `O ⊨ (C(a), m)` for any concept `C`.
pub fn entails_iq(
    ontology: &AnnotatedOntology,
    concept: &crate::ontology::Concept,
    ind: &crate::ontology::IndividualName,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    if !ontology.individuals().contains(ind) {
        return Ok(Entailment::warning(format!("individual `{ind}` not in the ontology's signature")));
    }
    let reduction = iq_reduction(ontology, concept, ind);
    Ok(Entailment::answer(reduction.entails(m, options)?))
}

/// Dispatches on the axiom kind: assertions directly, GCIs, role
/// inclusions and range restrictions through their reductions.
pub fn entails_axiom(
    ontology: &AnnotatedOntology,
    axiom: &Axiom,
    m: &Monomial,
    options: &Options,
) -> Result<Entailment, CompletionError> {
    match axiom {
        Axiom::Ca { .. } | Axiom::Ra { .. } => entails_assertion(ontology, axiom, m, options),
        Axiom::Gci { lhs, rhs } => entails_gci(ontology, lhs, rhs, m, options),
        Axiom::Ri { sub, sup } => entails_ri(ontology, sub, sup, m, options),
        Axiom::Rr { role, filler } => entails_rr(ontology, role, filler, m, options),
    }
}
