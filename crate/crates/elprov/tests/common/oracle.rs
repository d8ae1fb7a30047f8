//! An independent ground chase used as a semantic oracle.
//!
//! The chase evaluates the ontology directly, without normalization or the
//! completion rules: every GCI whose left-hand side holds at an element
//! with some monomial forces its right-hand side with that monomial times
//! the axiom's annotation. Existential right-hand sides create an anonymous
//! element keyed by the role and the monomial of its incoming edge; all
//! facts about such an element depend only on that key, so sharing it
//! between creators keeps the model universal while guaranteeing
//! termination.

use std::collections::{BTreeMap, BTreeSet};

use elprov::{AnnotatedOntology, Axiom, Concept, Monomial};

/// A monomial as a sorted set of variable names.
pub type Mono = BTreeSet<String>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Ind(String),
    Aux(String, Vec<String>),
}

#[derive(Clone, Debug, Default)]
pub struct ChaseModel {
    pub domain: BTreeSet<Elem>,
    pub concepts: BTreeMap<String, BTreeSet<(Elem, Mono)>>,
    pub roles: BTreeMap<String, BTreeSet<(Elem, Elem, Mono)>>,
}

pub fn mono_of(m: &Monomial) -> Mono {
    m.vars().iter().map(|v| v.as_str().to_string()).collect()
}

fn union(a: &Mono, b: &Mono) -> Mono {
    a.union(b).cloned().collect()
}

impl ChaseModel {
    fn add_concept(&mut self, name: &str, d: Elem, m: Mono) -> bool {
        self.concepts.entry(name.to_string()).or_default().insert((d, m))
    }

    fn add_role(&mut self, name: &str, d: Elem, e: Elem, m: Mono) -> bool {
        self.domain.insert(e.clone());
        self.roles.entry(name.to_string()).or_default().insert((d, e, m))
    }

    /// The extension of an arbitrary concept.
    pub fn eval(&self, c: &Concept) -> BTreeSet<(Elem, Mono)> {
        match c {
            Concept::Top => self.domain.iter().map(|d| (d.clone(), Mono::new())).collect(),
            Concept::Atomic(a) => self.concepts.get(a.as_str()).cloned().unwrap_or_default(),
            Concept::Conj(l, r) => {
                let l = self.eval(l);
                let r = self.eval(r);
                let mut out = BTreeSet::new();
                for (d, m1) in &l {
                    for (e, m2) in &r {
                        if d == e {
                            out.insert((d.clone(), union(m1, m2)));
                        }
                    }
                }
                out
            }
            Concept::Exists(r) => self.eval(&Concept::ExistsQ(r.clone(), Box::new(Concept::Top))),
            Concept::ExistsQ(r, filler) => {
                let filler = self.eval(filler);
                let mut out = BTreeSet::new();
                if let Some(edges) = self.roles.get(r.as_str()) {
                    for (d, e, m1) in edges {
                        for (f, m2) in &filler {
                            if e == f {
                                out.insert((d.clone(), union(m1, m2)));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Whether the model satisfies the assertion with exactly monomial `m`.
    pub fn holds(&self, alpha: &Axiom, m: &Monomial) -> bool {
        let m = mono_of(m);
        match alpha {
            Axiom::Ca { concept, ind } => self.eval(concept).contains(&(Elem::Ind(ind.to_string()), m)),
            Axiom::Ra { role, subject, object } => self
                .roles
                .get(role.as_str())
                .is_some_and(|r| r.contains(&(Elem::Ind(subject.to_string()), Elem::Ind(object.to_string()), m))),
            _ => panic!("holds() only answers assertions"),
        }
    }

    pub fn size(&self) -> usize {
        self.concepts.values().map(BTreeSet::len).sum::<usize>() + self.roles.values().map(BTreeSet::len).sum::<usize>()
    }
}

/// Chases `o` to a fixpoint. Returns `None` if more than `cap` facts would
/// be produced.
pub fn chase(o: &AnnotatedOntology, cap: usize) -> Option<ChaseModel> {
    let mut model = ChaseModel::default();
    for i in o.individuals() {
        model.domain.insert(Elem::Ind(i.to_string()));
    }
    loop {
        let mut changed = false;
        for ax in o.iter() {
            let v = mono_of(&ax.annotation);
            match &ax.axiom {
                Axiom::Ca { concept, ind } => match concept {
                    Concept::Atomic(a) => changed |= model.add_concept(a.as_str(), Elem::Ind(ind.to_string()), v),
                    Concept::Top => {}
                    other => panic!("complex concept assertion {other} in chase input"),
                },
                Axiom::Ra { role, subject, object } => {
                    changed |=
                        model.add_role(role.as_str(), Elem::Ind(subject.to_string()), Elem::Ind(object.to_string()), v);
                }
                Axiom::Gci { lhs, rhs } => {
                    for (d, n) in model.eval(lhs) {
                        let m = union(&n, &v);
                        match rhs {
                            Concept::Atomic(b) => changed |= model.add_concept(b.as_str(), d, m),
                            Concept::Exists(r) => {
                                let e = Elem::Aux(r.to_string(), m.iter().cloned().collect());
                                changed |= model.add_role(r.as_str(), d, e, m);
                            }
                            Concept::Top => {}
                            other => panic!("right-hand side {other} outside the restricted syntax"),
                        }
                    }
                }
                Axiom::Ri { sub, sup } => {
                    let edges = model.roles.get(sub.as_str()).cloned().unwrap_or_default();
                    for (d, e, n) in edges {
                        changed |= model.add_role(sup.as_str(), d, e, union(&n, &v));
                    }
                }
                Axiom::Rr { role, filler } => {
                    let edges = model.roles.get(role.as_str()).cloned().unwrap_or_default();
                    for (_, e, n) in edges {
                        changed |= model.add_concept(filler.as_str(), e, union(&n, &v));
                    }
                }
            }
            if model.size() > cap {
                return None;
            }
        }
        if !changed {
            return Some(model);
        }
    }
}
