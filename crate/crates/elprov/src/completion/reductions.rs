//! Reductions of GCI, role inclusion, range restriction and instance query
//! entailment to assertion entailment, and the converse reductions used as
//! cross-checks.

use std::collections::BTreeMap;

use crate::completion::{normalized, saturate_with, CompletionError, Options, SaturatedSet};
use crate::ontology::{
    AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, NameSupply, RoleName,
};
use crate::provenance::Monomial;

/// An extended ontology and a goal assertion such that the original
/// question holds with monomial `m` iff the goal is entailed with
/// `m × helper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub ontology: AnnotatedOntology,
    pub goal: Axiom,
    /// Product of the fresh variables annotating the helper assertions.
    pub helper: Monomial,
}

impl Reduction {
    /// The monomial the goal must be entailed with.
    pub fn goal_monomial(&self, m: &Monomial) -> Monomial {
        m.product(&self.helper)
    }

    /// Normalizes and saturates the extended ontology.
    pub fn saturate(&self, bound: Option<usize>, options: &Options) -> Result<SaturatedSet, CompletionError> {
        saturate_with(&normalized(&self.ontology)?, bound, options)
    }

    /// Decides the reduced question for `m`.
    pub fn entails(&self, m: &Monomial, options: &Options) -> Result<bool, CompletionError> {
        let target = self.goal_monomial(m);
        let sat = self.saturate(Some(target.len()), options)?;
        Ok(sat.contains(&self.goal, &target))
    }
}

fn supply_for(ontology: &AnnotatedOntology, extra: &[Axiom]) -> NameSupply {
    let mut supply = NameSupply::for_ontology(ontology);
    let extra: AnnotatedOntology = extra.iter().cloned().map(AnnotatedAxiom::unit).collect();
    supply.reserve_signature(&extra.signature());
    supply
}

/// Adds the assertions describing a tree-shaped instance of `c` rooted at
/// `a`, each annotated with a fresh variable multiplied into `helper`.
fn describe(
    c: &Concept,
    a: &IndividualName,
    supply: &mut NameSupply,
    out: &mut Vec<AnnotatedAxiom>,
    helper: &mut Monomial,
) {
    let mut annotate = |axiom: Axiom, supply: &mut NameSupply, out: &mut Vec<AnnotatedAxiom>| {
        let v = supply.fresh_variable();
        *helper = helper.product(&Monomial::var(v.clone()));
        out.push(AnnotatedAxiom::new(axiom, Monomial::var(v)));
    };
    match c {
        Concept::Top => {}
        Concept::Atomic(name) => {
            annotate(Axiom::Ca { concept: Concept::Atomic(name.clone()), ind: a.clone() }, supply, out)
        }
        Concept::Conj(l, r) => {
            describe(l, a, supply, out, helper);
            describe(r, a, supply, out, helper);
        }
        Concept::ExistsQ(role, filler) => {
            let b = supply.fresh_individual();
            annotate(Axiom::Ra { role: role.clone(), subject: a.clone(), object: b.clone() }, supply, out);
            describe(filler, &b, supply, out, helper);
        }
        Concept::Exists(role) => {
            let b = supply.fresh_individual();
            annotate(Axiom::Ra { role: role.clone(), subject: a.clone(), object: b }, supply, out);
        }
    }
}

/// Reduces `(lhs ⊑ rhs, m)` to the assertion `E(a0)`: adds
/// `(D' ⊑ E, 1)` with `D'` the right-hand side (`∃R.⊤` for `∃R`), and a
/// tree of fresh assertions describing `lhs` at a fresh root `a0`, each
/// with its own fresh variable.
///
/// The root is additionally asserted as `(⊤(a0), 1)` so that it is an
/// individual of the extended ontology even when `lhs` is ⊤.
pub fn gci_reduction(ontology: &AnnotatedOntology, lhs: &Concept, rhs: &Concept) -> Result<Reduction, CompletionError> {
    if !rhs.is_rhs() {
        return Err(CompletionError::InvalidQuery(format!(
            "right-hand side `{rhs}` must be a concept name or some(R)"
        )));
    }
    let mut supply = supply_for(ontology, &[Axiom::gci(lhs.clone(), rhs.clone())]);
    let goal_concept = supply.fresh_concept();
    let root = supply.fresh_individual();
    let d = match rhs {
        Concept::Exists(r) => Concept::ExistsQ(r.clone(), Box::new(Concept::Top)),
        other => other.clone(),
    };
    let mut extended = ontology.clone();
    extended.insert(AnnotatedAxiom::unit(Axiom::Gci { lhs: d, rhs: Concept::Atomic(goal_concept.clone()) }));
    extended.insert(AnnotatedAxiom::unit(Axiom::Ca { concept: Concept::Top, ind: root.clone() }));
    let mut description = Vec::new();
    let mut helper = Monomial::one();
    describe(lhs, &root, &mut supply, &mut description, &mut helper);
    extended.extend(description);
    Ok(Reduction { ontology: extended, goal: Axiom::Ca { concept: Concept::Atomic(goal_concept), ind: root }, helper })
}

/// Reduces `(sub ⊑ sup, m)` to `sup(a0, b0)` after adding `(sub(a0, b0), 1)`.
pub fn ri_reduction(ontology: &AnnotatedOntology, sub: &RoleName, sup: &RoleName) -> Reduction {
    let mut supply = supply_for(ontology, &[Axiom::Ri { sub: sub.clone(), sup: sup.clone() }]);
    let (a, b) = (supply.fresh_individual(), supply.fresh_individual());
    let mut extended = ontology.clone();
    extended.insert(AnnotatedAxiom::unit(Axiom::Ra { role: sub.clone(), subject: a.clone(), object: b.clone() }));
    Reduction {
        ontology: extended,
        goal: Axiom::Ra { role: sup.clone(), subject: a, object: b },
        helper: Monomial::one(),
    }
}

/// Reduces `(ran(role) ⊑ filler, m)` to `filler(b0)` after adding
/// `(role(a0, b0), 1)`.
pub fn rr_reduction(ontology: &AnnotatedOntology, role: &RoleName, filler: &ConceptName) -> Reduction {
    let mut supply = supply_for(ontology, &[Axiom::Rr { role: role.clone(), filler: filler.clone() }]);
    let (a, b) = (supply.fresh_individual(), supply.fresh_individual());
    let mut extended = ontology.clone();
    extended.insert(AnnotatedAxiom::unit(Axiom::Ra { role: role.clone(), subject: a, object: b.clone() }));
    Reduction {
        ontology: extended,
        goal: Axiom::Ca { concept: Concept::Atomic(filler.clone()), ind: b },
        helper: Monomial::one(),
    }
}

/// Reduces `(C(a), m)` to `A_C(a)` after adding `(C ⊑ A_C, 1)` for a fresh
/// concept name `A_C`. Concept names and ⊤ are queried directly.
pub fn iq_reduction(ontology: &AnnotatedOntology, concept: &Concept, ind: &IndividualName) -> Reduction {
    if concept.is_basic() {
        return Reduction {
            ontology: ontology.clone(),
            goal: Axiom::Ca { concept: concept.clone(), ind: ind.clone() },
            helper: Monomial::one(),
        };
    }
    let mut supply = supply_for(ontology, &[Axiom::Ca { concept: concept.clone(), ind: ind.clone() }]);
    let name = supply.fresh_concept();
    let mut extended = ontology.clone();
    extended.insert(AnnotatedAxiom::unit(Axiom::Gci { lhs: concept.clone(), rhs: Concept::Atomic(name.clone()) }));
    Reduction {
        ontology: extended,
        goal: Axiom::Ca { concept: Concept::Atomic(name), ind: ind.clone() },
        helper: Monomial::one(),
    }
}

/// The terminology simulating the assertions of a normalized ontology,
/// together with the concept name standing for the chosen individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionReduction {
    pub ontology: AnnotatedOntology,
    /// The concept `C_a0` standing for the individual.
    pub lhs: ConceptName,
    /// The concept standing for each individual of the original ontology.
    pub individuals: BTreeMap<IndividualName, ConceptName>,
}

/// Replaces the assertions of a normalized ontology by GCIs over fresh
/// concepts `C_a` (one per individual) and `C_ran(R)` (one per role), and
/// fresh roles `R_ab` (one per role assertion), so that for every concept
/// name `B`: `O ⊨ (B(a0), m)` iff the result entails `(C_a0 ⊑ B, m)` or
/// `(⊤ ⊑ B, m)`.
pub fn reduce_ca_to_gci(ontology: &AnnotatedOntology, a0: &IndividualName) -> AssertionReduction {
    let sig = ontology.signature();
    let mut supply = supply_for(ontology, &[Axiom::Ca { concept: Concept::Top, ind: a0.clone() }]);
    let mut individuals: BTreeMap<IndividualName, ConceptName> =
        sig.individuals.iter().map(|a| (a.clone(), supply.fresh_concept())).collect();
    let lhs = individuals.entry(a0.clone()).or_insert_with(|| supply.fresh_concept()).clone();
    let ranges: BTreeMap<RoleName, ConceptName> =
        sig.roles.iter().map(|r| (r.clone(), supply.fresh_concept())).collect();
    let mut pair_roles: BTreeMap<(RoleName, IndividualName, IndividualName), RoleName> = BTreeMap::new();

    let concept = |c: &ConceptName| Concept::Atomic(c.clone());
    let mut out = AnnotatedOntology::new();
    for ax in ontology {
        let v = ax.annotation.clone();
        match &ax.axiom {
            Axiom::Ca { concept: Concept::Atomic(a), ind } => {
                out.insert(AnnotatedAxiom::new(Axiom::gci(concept(&individuals[ind]), concept(a)), v));
            }
            Axiom::Ca { .. } => {}
            Axiom::Ra { role, subject, object } => {
                let pair_role = pair_roles
                    .entry((role.clone(), subject.clone(), object.clone()))
                    .or_insert_with(|| supply.fresh_role())
                    .clone();
                out.insert(AnnotatedAxiom::unit(Axiom::gci(
                    concept(&individuals[subject]),
                    Concept::Exists(pair_role.clone()),
                )));
                out.insert(AnnotatedAxiom::new(Axiom::Ri { sub: pair_role.clone(), sup: role.clone() }, v.clone()));
                out.insert(AnnotatedAxiom::unit(Axiom::Rr { role: pair_role, filler: individuals[object].clone() }));
                out.insert(AnnotatedAxiom::new(Axiom::gci(concept(&individuals[object]), concept(&ranges[role])), v));
            }
            Axiom::Ri { sub, sup } => {
                out.insert(AnnotatedAxiom::new(Axiom::gci(concept(&ranges[sub]), concept(&ranges[sup])), v));
                out.insert(ax.clone());
            }
            Axiom::Rr { role, filler } => {
                out.insert(AnnotatedAxiom::new(Axiom::gci(concept(&ranges[role]), concept(filler)), v));
                out.insert(ax.clone());
            }
            Axiom::Gci { .. } => {
                out.insert(ax.clone());
            }
        }
    }
    AssertionReduction { ontology: out, lhs, individuals }
}

/// The role inclusions simulating the role assertions between `a0` and
/// `b0`, with the fresh role `sub` standing for the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssertionReduction {
    pub ontology: AnnotatedOntology,
    pub sub: RoleName,
}

/// Builds `{(S ⊑ P, v) | (P(a0, b0), v) ∈ O}` plus the role inclusions of
/// `O`, so that `O ⊨ (R(a0, b0), m)` iff the result entails `(S ⊑ R, m)`.
pub fn reduce_ra_to_ri(
    ontology: &AnnotatedOntology,
    a0: &IndividualName,
    b0: &IndividualName,
) -> RoleAssertionReduction {
    let mut supply = NameSupply::for_ontology(ontology);
    let sub = supply.fresh_role();
    let mut out = AnnotatedOntology::new();
    for ax in ontology {
        match &ax.axiom {
            Axiom::Ra { role, subject, object } if subject == a0 && object == b0 => {
                out.insert(AnnotatedAxiom::new(
                    Axiom::Ri { sub: sub.clone(), sup: role.clone() },
                    ax.annotation.clone(),
                ));
            }
            Axiom::Ri { .. } => {
                out.insert(ax.clone());
            }
            _ => {}
        }
    }
    RoleAssertionReduction { ontology: out, sub }
}
