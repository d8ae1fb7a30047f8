//! Relevant provenance variables.
//!
//! A variable is relevant for a consequence if it occurs in some monomial
//! the consequence is entailed with. Instead of enumerating all such
//! monomials, the merged saturation keeps a single monomial per axiom and
//! grows it by union whenever a rule derives the axiom again; the variables
//! of the final entry of an assertion are exactly its relevant variables.
//! The number of updates is bounded by the number of axioms times the
//! number of variables, so the computation is polynomial.

use std::collections::BTreeSet;

use crate::completion::engine::{Engine, Policy};
use crate::completion::{
    gci_reduction, iq_reduction, normalized, ri_reduction, rr_reduction, CompletionError, Options, Reduction,
    SaturationStats,
};
use crate::ontology::{AnnotatedOntology, Axiom, Concept, IndividualName, RESERVED_PREFIX};
use crate::provenance::{Monomial, Variable};

/// The result of the merged saturation: at most one monomial per axiom.
#[derive(Debug, Clone)]
pub struct MergedSet {
    engine: Engine,
}

impl MergedSet {
    /// The merged monomial of `axiom`, if it was derived.
    pub fn entry(&self, axiom: &Axiom) -> Option<Monomial> {
        let fact = self.engine.symbols.lookup_axiom(axiom)?;
        self.engine.annotations(fact).first().map(|(m, _)| self.engine.symbols.monomial(m))
    }

    /// All entries sorted by axiom.
    pub fn entries(&self) -> Vec<(Axiom, Monomial)> {
        let mut out: Vec<(Axiom, Monomial)> =
            self.engine.annotated_axioms().into_iter().map(|(a, _)| (a.axiom, a.annotation)).collect();
        out.sort();
        out
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.engine.stats().axioms
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of times a rule application grew an existing entry.
    pub fn merges(&self) -> u64 {
        self.engine.stats().merges
    }

    pub fn stats(&self) -> &SaturationStats {
        self.engine.stats()
    }
}

/// Runs the merged saturation on a normalized ontology with default
/// options.
pub fn merged_saturate(ontology: &AnnotatedOntology) -> Result<MergedSet, CompletionError> {
    merged_saturate_with(ontology, &Options::default())
}

/// [`merged_saturate`] with explicit limits and rule set.
pub fn merged_saturate_with(ontology: &AnnotatedOntology, options: &Options) -> Result<MergedSet, CompletionError> {
    let mut engine = Engine::new(ontology, Policy::Merge, options.rules).map_err(CompletionError::NotNormalized)?;
    engine.run(&options.limits)?;
    Ok(MergedSet { engine })
}

fn user_variables(m: Option<Monomial>) -> BTreeSet<Variable> {
    m.map(|m| m.vars().iter().filter(|v| !v.as_str().starts_with(RESERVED_PREFIX)).cloned().collect())
        .unwrap_or_default()
}

/// The variables relevant for a concept or role assertion. The ontology is
/// normalized first; normalization introduces no variables.
pub fn relevant_variables(
    ontology: &AnnotatedOntology,
    alpha: &Axiom,
    options: &Options,
) -> Result<BTreeSet<Variable>, CompletionError> {
    if !alpha.is_assertion() {
        return Err(CompletionError::InvalidQuery(format!("`{alpha}` is not an assertion")));
    }
    let merged = merged_saturate_with(&normalized(ontology)?, options)?;
    Ok(user_variables(merged.entry(alpha)))
}

fn reduced_variables(reduction: &Reduction, options: &Options) -> Result<BTreeSet<Variable>, CompletionError> {
    let merged = merged_saturate_with(&normalized(&reduction.ontology)?, options)?;
    Ok(user_variables(merged.entry(&reduction.goal)))
}

/// The variables relevant for any axiom: assertions directly, GCIs, role
/// inclusions and range restrictions through their entailment reductions.
/// Variables of the helper assertions added by a reduction are removed.
///
/// For TBox axioms the answer may over-approximate: merging cannot tell
/// whether a variable reached the goal through the query's own helper
/// assertions, so e.g. `w` is reported for `A ⊑ B` given `(⊤ ⊑ B, w)`.
pub fn relevant_variables_for_axiom(
    ontology: &AnnotatedOntology,
    axiom: &Axiom,
    options: &Options,
) -> Result<BTreeSet<Variable>, CompletionError> {
    match axiom {
        Axiom::Ca { concept, ind } if !concept.is_basic() => relevant_variables_for_iq(ontology, concept, ind, options),
        Axiom::Ca { .. } | Axiom::Ra { .. } => relevant_variables(ontology, axiom, options),
        Axiom::Gci { lhs, rhs } => reduced_variables(&gci_reduction(ontology, lhs, rhs)?, options),
        Axiom::Ri { sub, sup } => reduced_variables(&ri_reduction(ontology, sub, sup), options),
        Axiom::Rr { role, filler } => reduced_variables(&rr_reduction(ontology, role, filler), options),
    }
}

/// Whether `v` is relevant for `axiom`.
pub fn relevant_for_axiom(
    ontology: &AnnotatedOntology,
    axiom: &Axiom,
    v: &Variable,
    options: &Options,
) -> Result<bool, CompletionError> {
    Ok(relevant_variables_for_axiom(ontology, axiom, options)?.contains(v))
}

/// The variables relevant for the instance query `concept(ind)`.
pub fn relevant_variables_for_iq(
    ontology: &AnnotatedOntology,
    concept: &Concept,
    ind: &IndividualName,
    options: &Options,
) -> Result<BTreeSet<Variable>, CompletionError> {
    reduced_variables(&iq_reduction(ontology, concept, ind), options)
}

/// Whether `v` is relevant for the instance query `concept(ind)`.
pub fn relevant_for_iq(
    ontology: &AnnotatedOntology,
    concept: &Concept,
    ind: &IndividualName,
    v: &Variable,
    options: &Options,
) -> Result<bool, CompletionError> {
    Ok(relevant_variables_for_iq(ontology, concept, ind, options)?.contains(v))
}
