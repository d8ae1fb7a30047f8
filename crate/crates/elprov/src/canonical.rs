//! Canonical models and query rewriting for annotated conjunctive query
//! entailment.
//!
//! The canonical model starts from the entailed assertions of the
//! normalized ontology and is completed by three rules: concept inclusions
//! (including range restrictions) add pairs to concept extensions,
//! `C ⊑ ∃R` axioms add an edge to the anonymous element `aux(R, m)` where
//! `m` is the edge's monomial, and role inclusions copy edges. Anonymous
//! elements are created only when first targeted by an edge.
//!
//! Matches in the anonymous part that have no counterpart in every model
//! are blocked by rewriting the query: variables that reach a cycle must
//! map to named elements, and predecessors of a term mapped to an
//! anonymous element must coincide.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::completion::{normalized, saturate, CompletionError, LimitExceeded, LimitKind, Limits, SaturationStats};
use crate::interpretation::{
    enumerate_matches, AnnotatedInterpretation, Atom, Bcq, DomainElement, InterpretationBuilder, QueryError, Term,
};
use crate::ontology::{
    AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, NameSupply, RoleName,
};
use crate::provenance::{Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error(transparent)]
    Completion(#[from] CompletionError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl From<LimitExceeded> for CanonicalError {
    fn from(e: LimitExceeded) -> Self {
        CanonicalError::Completion(CompletionError::Limit(e))
    }
}

/// Options for building canonical models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CanonicalOptions {
    /// Caps for both the saturation and the model; `max_axioms` bounds the
    /// number of stored concept pairs and role triples.
    pub limits: Limits,
    /// Add every `aux(R, m)` for the ontology's roles and all monomials over
    /// its variables to the domain up front, instead of creating anonymous
    /// elements on demand. Only useful for comparisons on small inputs.
    pub materialize_all_aux: bool,
}

impl CanonicalOptions {
    pub fn with_limits(limits: Limits) -> Self {
        CanonicalOptions { limits, materialize_all_aux: false }
    }
}

/// `None` stands for ⊤.
type Key = Option<ConceptName>;

/// The normalized terminology, indexed for the model completion rules.
#[derive(Default)]
struct Rules {
    /// `A ⊑ B` by `A`.
    sub: HashMap<Key, Vec<(ConceptName, Monomial)>>,
    /// `A ⊑ ∃R` by `A`.
    ex: HashMap<Key, Vec<(RoleName, Monomial)>>,
    /// `A1 ⊓ A2 ⊑ B` by each operand, with the other operand.
    conj: HashMap<Key, Vec<(Key, ConceptName, Monomial)>>,
    /// `∃R.A ⊑ B` by `A`.
    exq_by_filler: HashMap<Key, Vec<(RoleName, ConceptName, Monomial)>>,
    /// `∃R.A ⊑ B` by `R`.
    exq_by_role: HashMap<RoleName, Vec<(Key, ConceptName, Monomial)>>,
    /// `R ⊑ S` by `R`.
    ri: HashMap<RoleName, Vec<(RoleName, Monomial)>>,
    /// `ran(R) ⊑ A` by `R`.
    ran: HashMap<RoleName, Vec<(ConceptName, Monomial)>>,
}

fn key(c: &Concept) -> Option<Key> {
    match c {
        Concept::Top => Some(None),
        Concept::Atomic(a) => Some(Some(a.clone())),
        _ => None,
    }
}

impl Rules {
    fn new(ontology: &AnnotatedOntology) -> Rules {
        let mut rules = Rules::default();
        for ax in ontology {
            let m = ax.annotation.clone();
            match &ax.axiom {
                Axiom::Gci { lhs, rhs } => {
                    let lhs = match lhs {
                        Concept::Exists(r) => Concept::ExistsQ(r.clone(), Box::new(Concept::Top)),
                        other => other.clone(),
                    };
                    match (&lhs, rhs) {
                        (l, Concept::Atomic(b)) if l.is_basic() => {
                            rules.sub.entry(key(l).unwrap()).or_default().push((b.clone(), m))
                        }
                        (l, Concept::Exists(r)) if l.is_basic() => {
                            rules.ex.entry(key(l).unwrap()).or_default().push((r.clone(), m))
                        }
                        (Concept::Conj(x, y), Concept::Atomic(b)) => {
                            let (x, y) = (key(x).expect("normal form"), key(y).expect("normal form"));
                            rules.conj.entry(x.clone()).or_default().push((y.clone(), b.clone(), m.clone()));
                            if x != y {
                                rules.conj.entry(y).or_default().push((x, b.clone(), m));
                            }
                        }
                        (Concept::ExistsQ(r, f), Concept::Atomic(b)) => {
                            let f = key(f).expect("normal form");
                            rules.exq_by_filler.entry(f.clone()).or_default().push((r.clone(), b.clone(), m.clone()));
                            rules.exq_by_role.entry(r.clone()).or_default().push((f, b.clone(), m));
                        }
                        _ => unreachable!("normalized ontologies contain only normal GCIs"),
                    }
                }
                Axiom::Ri { sub, sup } => rules.ri.entry(sub.clone()).or_default().push((sup.clone(), m)),
                Axiom::Rr { role, filler } => rules.ran.entry(role.clone()).or_default().push((filler.clone(), m)),
                Axiom::Ca { .. } | Axiom::Ra { .. } => {}
            }
        }
        rules
    }
}

enum Event {
    Concept(Key, DomainElement, Monomial),
    Role(RoleName, DomainElement, DomainElement, Monomial),
}

struct ModelState {
    rules: Rules,
    domain: BTreeSet<DomainElement>,
    concepts: HashMap<(Key, DomainElement), HashSet<Monomial>>,
    roles: HashSet<(RoleName, DomainElement, DomainElement, Monomial)>,
    by_object: HashMap<(RoleName, DomainElement), Vec<(DomainElement, Monomial)>>,
    queue: VecDeque<Event>,
    stored: usize,
    processed: u64,
}

impl ModelState {
    fn add_element(&mut self, e: DomainElement) {
        if self.domain.insert(e.clone()) {
            self.add_concept(None, e, Monomial::one());
        }
    }

    fn add_concept(&mut self, k: Key, e: DomainElement, m: Monomial) {
        if self.concepts.entry((k.clone(), e.clone())).or_default().insert(m.clone()) {
            if k.is_some() {
                self.stored += 1;
            }
            self.queue.push_back(Event::Concept(k, e, m));
        }
    }

    fn add_role(&mut self, r: RoleName, d: DomainElement, e: DomainElement, m: Monomial) {
        if self.roles.insert((r.clone(), d.clone(), e.clone(), m.clone())) {
            self.stored += 1;
            self.add_element(e.clone());
            self.by_object.entry((r.clone(), e.clone())).or_default().push((d.clone(), m.clone()));
            self.queue.push_back(Event::Role(r, d, e, m));
        }
    }

    fn monomials(&self, k: &Key, e: &DomainElement) -> Vec<Monomial> {
        self.concepts.get(&(k.clone(), e.clone())).map(|s| s.iter().cloned().collect()).unwrap_or_default()
    }

    fn process(&mut self, event: Event) {
        match event {
            Event::Concept(k, d, m) => {
                let rules = &self.rules;
                let mut concepts = Vec::new();
                let mut roles = Vec::new();
                for (b, v) in rules.sub.get(&k).into_iter().flatten() {
                    concepts.push((b.clone(), d.clone(), m.product(v)));
                }
                for (r, v) in rules.ex.get(&k).into_iter().flatten() {
                    let n = m.product(v);
                    roles.push((r.clone(), d.clone(), DomainElement::Aux { role: r.clone(), mon: n.clone() }, n));
                }
                for (other, b, v) in rules.conj.get(&k).into_iter().flatten() {
                    for n in self.monomials(other, &d) {
                        concepts.push((b.clone(), d.clone(), m.product(&n).product(v)));
                    }
                }
                for (r, b, v) in rules.exq_by_filler.get(&k).into_iter().flatten() {
                    for (subject, n) in self.by_object.get(&(r.clone(), d.clone())).into_iter().flatten() {
                        concepts.push((b.clone(), subject.clone(), m.product(n).product(v)));
                    }
                }
                for (b, e, n) in concepts {
                    self.add_concept(Some(b), e, n);
                }
                for (r, x, y, n) in roles {
                    self.add_role(r, x, y, n);
                }
            }
            Event::Role(r, d, e, m) => {
                let rules = &self.rules;
                let mut concepts = Vec::new();
                let mut roles = Vec::new();
                for (s, v) in rules.ri.get(&r).into_iter().flatten() {
                    roles.push((s.clone(), d.clone(), e.clone(), m.product(v)));
                }
                for (a, v) in rules.ran.get(&r).into_iter().flatten() {
                    concepts.push((a.clone(), e.clone(), m.product(v)));
                }
                for (filler, b, v) in rules.exq_by_role.get(&r).into_iter().flatten() {
                    for n in self.monomials(filler, &e) {
                        concepts.push((b.clone(), d.clone(), m.product(&n).product(v)));
                    }
                }
                for (b, x, n) in concepts {
                    self.add_concept(Some(b), x, n);
                }
                for (s, x, y, n) in roles {
                    self.add_role(s, x, y, n);
                }
            }
        }
    }

    fn check(&self, limits: &Limits, start: Instant) -> Result<(), LimitExceeded> {
        let exceeded = |limit| LimitExceeded {
            limit,
            stats: SaturationStats { axioms: self.stored, processed: self.processed, ..Default::default() },
        };
        if self.stored > limits.max_axioms {
            return Err(exceeded(LimitKind::Axioms(limits.max_axioms)));
        }
        if let Some(budget) = limits.time_budget {
            if self.processed.is_multiple_of(256) && start.elapsed() > budget {
                return Err(exceeded(LimitKind::Time(budget)));
            }
        }
        Ok(())
    }
}

/// All monomials over `vars`, smallest first.
fn all_monomials(vars: &[crate::provenance::Variable]) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for v in vars {
        let with: Vec<Monomial> = out.iter().map(|m| m.product(&Monomial::var(v.clone()))).collect();
        out.extend(with);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The normalized ontology closed under entailed range restrictions, and
/// the entailed assertions about its individuals.
struct Seed {
    terminology: AnnotatedOntology,
    individuals: BTreeSet<IndividualName>,
    concepts: Vec<(ConceptName, IndividualName, Monomial)>,
    roles: Vec<(RoleName, IndividualName, IndividualName, Monomial)>,
}

/// Saturates the normalized ontology extended with `(R(a_R, b_R), 1)` for
/// fresh `a_R, b_R` per role `R`: the assertions about `b_R` are exactly
/// the entailed range restrictions of `R`, and those about the original
/// individuals are unaffected by the extension.
fn seed(normal: &AnnotatedOntology, limits: &Limits, start: Instant) -> Result<Seed, CompletionError> {
    // Entailed range restrictions are read off a probe edge per role: with
    // a fresh variable w on the edge R(a_R, b_R), O ⊨ (ran(R) ⊑ B, n) iff
    // (B(b_R), n × w) is entailed. Facts about b_R without w (e.g. from
    // ⊤ ⊑ B) do not depend on the edge and are not range restrictions.
    let sig = normal.signature();
    let mut supply = NameSupply::for_ontology(normal);
    let mut probes = BTreeMap::new();
    let mut probe_vars = BTreeSet::new();
    let mut extended = normal.clone();
    for r in &sig.roles {
        let (a, b) = (supply.fresh_individual(), supply.fresh_individual());
        let w = supply.fresh_variable();
        extended.insert(AnnotatedAxiom::new(
            Axiom::Ra { role: r.clone(), subject: a, object: b.clone() },
            Monomial::var(w.clone()),
        ));
        probes.insert(b, (r.clone(), w.clone()));
        probe_vars.insert(w);
    }
    let sat = saturate(&extended, None, &remaining(limits, start))?;
    let mut terminology: AnnotatedOntology = normal.iter().filter(|ax| !ax.axiom.is_assertion()).cloned().collect();
    let mut concepts = Vec::new();
    let mut roles = Vec::new();
    for d in sat.axioms() {
        let m = d.axiom.annotation;
        match d.axiom.axiom {
            Axiom::Ca { concept: Concept::Atomic(a), ind } => {
                if let Some((r, w)) = probes.get(&ind) {
                    if m.contains(w) && m.vars().iter().filter(|v| probe_vars.contains(*v)).count() == 1 {
                        let n = Monomial::representative(m.vars().iter().filter(|v| *v != w).cloned());
                        terminology.insert(AnnotatedAxiom::new(Axiom::Rr { role: r.clone(), filler: a }, n));
                    }
                } else if sig.individuals.contains(&ind) {
                    concepts.push((a, ind, m));
                }
            }
            Axiom::Ra { role, subject, object } if sig.individuals.contains(&subject) => {
                roles.push((role, subject, object, m));
            }
            _ => {}
        }
    }
    Ok(Seed { terminology, individuals: sig.individuals, concepts, roles })
}

fn remaining(limits: &Limits, start: Instant) -> Limits {
    Limits {
        max_axioms: limits.max_axioms,
        time_budget: limits.time_budget.map(|b| b.saturating_sub(start.elapsed()).max(Duration::from_millis(1))),
    }
}

/// Builds the canonical model of an ontology (normalized internally) with
/// anonymous elements created on demand.
pub fn build_canonical_model(
    ontology: &AnnotatedOntology,
    limits: &Limits,
) -> Result<AnnotatedInterpretation, CompletionError> {
    build_canonical_model_with(ontology, &CanonicalOptions::with_limits(*limits))
}

/// [`build_canonical_model`] with explicit options.
pub fn build_canonical_model_with(
    ontology: &AnnotatedOntology,
    options: &CanonicalOptions,
) -> Result<AnnotatedInterpretation, CompletionError> {
    let start = Instant::now();
    let limits = &options.limits;
    let normal = normalized(ontology)?;
    let seed = seed(&normal, limits, start)?;
    let mut state = ModelState {
        rules: Rules::new(&seed.terminology),
        domain: BTreeSet::new(),
        concepts: HashMap::new(),
        roles: HashSet::new(),
        by_object: HashMap::new(),
        queue: VecDeque::new(),
        stored: 0,
        processed: 0,
    };
    for a in &seed.individuals {
        state.add_element(DomainElement::Named(a.clone()));
    }
    if options.materialize_all_aux {
        let vars: Vec<_> = normal.vars().into_iter().collect();
        for r in normal.signature().roles {
            for m in all_monomials(&vars) {
                state.add_element(DomainElement::Aux { role: r.clone(), mon: m });
                state.check(limits, start)?;
            }
        }
    }
    for (a, i, m) in seed.concepts {
        state.add_concept(Some(a), DomainElement::Named(i), m);
    }
    for (r, i, j, m) in seed.roles {
        state.add_role(r, DomainElement::Named(i), DomainElement::Named(j), m);
    }
    while let Some(event) = state.queue.pop_front() {
        state.processed += 1;
        state.process(event);
        state.check(limits, start)?;
    }

    let mut builder = InterpretationBuilder::new();
    for e in &state.domain {
        builder.add_element(e.clone());
    }
    for ((k, e), monos) in &state.concepts {
        if let Some(a) = k {
            for m in monos {
                builder.add_concept(a.clone(), e.clone(), m.clone());
            }
        }
    }
    for (r, d, e, m) in state.roles {
        builder.add_role(r, d, e, m);
    }
    Ok(builder.build())
}

/// A fork: terms `pre` with a role edge into the class `class` must all be
/// equal whenever `representative` maps to an anonymous element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fork {
    /// At least two terms, sorted.
    pub pre: Vec<Term>,
    /// The equivalence class, sorted.
    pub class: Vec<Term>,
    /// The smallest term of the class.
    pub representative: Term,
}

/// The side conditions of a rewritten query.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RewritingConditions {
    /// Equivalence classes of the object terms, each sorted, ordered by
    /// their smallest term.
    pub sim: Vec<Vec<Term>>,
    /// Variables that must map to named elements.
    pub cyc: BTreeSet<Term>,
    pub forks: Vec<Fork>,
    /// Number of class merges performed by the closure.
    pub merges: usize,
}

impl RewritingConditions {
    /// The class containing `t`, if `t` is an object term of the query.
    pub fn class_of(&self, t: &Term) -> Option<&[Term]> {
        self.sim.iter().find(|c| c.contains(t)).map(Vec::as_slice)
    }

    /// Whether no condition restricts matches.
    pub fn is_trivial(&self) -> bool {
        self.cyc.is_empty() && self.forks.is_empty()
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut x = x;
    while parent[x] != root {
        let next = parent[x];
        parent[x] = root;
        x = next;
    }
    root
}

/// Computes the term equivalence, the forks and the cycle set of a query.
///
/// Two subjects of role atoms whose objects are equivalent become
/// equivalent, to a fixpoint. A fork is a class with at least two distinct
/// predecessor terms. A variable is in the cycle set if its class reaches
/// a cycle of the class graph, whose edges lead from the class of each
/// role atom's subject to the class of its object.
pub fn compute_rewriting(q: &Bcq) -> RewritingConditions {
    let terms: Vec<Term> = q.terms().into_iter().collect();
    let index: HashMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let edges: Vec<(usize, usize)> = q
        .atoms()
        .iter()
        .filter_map(|a| match a {
            Atom::Role { subject, object, .. } => Some((index[subject], index[object])),
            Atom::Concept { .. } => None,
        })
        .collect();

    let mut parent: Vec<usize> = (0..terms.len()).collect();
    let mut merges = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(s1, o1)) in edges.iter().enumerate() {
            for &(s2, o2) in &edges[i + 1..] {
                if find(&mut parent, o1) == find(&mut parent, o2) {
                    let (a, b) = (find(&mut parent, s1), find(&mut parent, s2));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                        merges += 1;
                        changed = true;
                    }
                }
            }
        }
    }

    let roots: Vec<usize> = (0..terms.len()).map(|i| find(&mut parent, i)).collect();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &r) in roots.iter().enumerate() {
        classes.entry(r).or_default().push(i);
    }
    // Terms are sorted, so each class is sorted and its root is its
    // smallest member.
    let sim: Vec<Vec<Term>> = classes.values().map(|c| c.iter().map(|&i| terms[i].clone()).collect()).collect();

    let mut forks = Vec::new();
    for (&root, members) in &classes {
        let pre: BTreeSet<usize> = edges.iter().filter(|(_, o)| roots[*o] == root).map(|(s, _)| *s).collect();
        if pre.len() >= 2 {
            forks.push(Fork {
                pre: pre.into_iter().map(|i| terms[i].clone()).collect(),
                class: members.iter().map(|&i| terms[i].clone()).collect(),
                representative: terms[members[0]].clone(),
            });
        }
    }

    // Classes reaching a cycle: repeatedly drop classes without successors
    // among the remaining ones; the survivors are exactly those that reach
    // a cycle.
    let class_edges: BTreeSet<(usize, usize)> = edges.iter().map(|&(s, o)| (roots[s], roots[o])).collect();
    let mut alive: BTreeSet<usize> = classes.keys().copied().collect();
    loop {
        let dead: Vec<usize> =
            alive.iter().copied().filter(|c| !class_edges.iter().any(|(s, o)| s == c && alive.contains(o))).collect();
        if dead.is_empty() {
            break;
        }
        for c in dead {
            alive.remove(&c);
        }
    }
    let cyc: BTreeSet<Term> = terms
        .iter()
        .enumerate()
        .filter(|(i, t)| t.is_var() && alive.contains(&roots[*i]))
        .map(|(_, t)| t.clone())
        .collect();

    RewritingConditions { sim, cyc, forks, merges }
}

/// A query together with its rewriting conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewriting {
    pub query: Bcq,
    pub conditions: RewritingConditions,
}

impl Rewriting {
    pub fn new(query: Bcq) -> Self {
        let conditions = compute_rewriting(&query);
        Rewriting { query, conditions }
    }
}

impl fmt::Display for Rewriting {
    /// The query line, then `!aux(x)` for each cycle variable and
    /// `aux(y) -> x1 = x2 & x2 = x3 ...` for each fork.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.query)?;
        for x in &self.conditions.cyc {
            writeln!(f, "!aux({x})")?;
        }
        for fork in &self.conditions.forks {
            let eqs: Vec<String> = fork.pre.windows(2).map(|w| format!("{} = {}", w[0], w[1])).collect();
            writeln!(f, "aux({}) -> {}", fork.representative, eqs.join(" & "))?;
        }
        Ok(())
    }
}

/// The answer to an annotated query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAnswer {
    /// Matches of the rewritten query in the canonical model.
    pub matches: usize,
    /// Their provenance polynomial.
    pub provenance: Polynomial,
}

impl QueryAnswer {
    /// Whether the query is entailed with polynomial `p`: it has a match and
    /// `p` is contained in the provenance polynomial.
    pub fn entails(&self, p: &Polynomial) -> bool {
        self.matches > 0 && p.contained_in(&self.provenance)
    }
}

/// Evaluates the rewriting of `q` over the canonical model of `ontology`.
pub fn answer_query(
    ontology: &AnnotatedOntology,
    q: &Bcq,
    options: &CanonicalOptions,
) -> Result<QueryAnswer, CanonicalError> {
    let individuals = ontology.individuals();
    if let Some(a) = q.individuals().into_iter().find(|a| !individuals.contains(a)) {
        return Err(QueryError::UnknownIndividual(a).into());
    }
    let model = build_canonical_model_with(ontology, options)?;
    answer_in_model(&model, q)
}

/// Evaluates the rewriting of `q` over an already built canonical model.
pub fn answer_in_model(model: &AnnotatedInterpretation, q: &Bcq) -> Result<QueryAnswer, CanonicalError> {
    let conditions = compute_rewriting(q);
    let matches = enumerate_matches(model, q, Some(&conditions))?;
    let mut provenance = Polynomial::zero();
    for m in &matches {
        provenance.add_term(m.monomial(), 1);
    }
    Ok(QueryAnswer { matches: matches.len(), provenance })
}

/// Decides whether `ontology` entails the annotated query `(q, p)`.
pub fn entails_query(
    ontology: &AnnotatedOntology,
    q: &Bcq,
    p: &Polynomial,
    limits: &Limits,
) -> Result<bool, CanonicalError> {
    Ok(answer_query(ontology, q, &CanonicalOptions::with_limits(*limits))?.entails(p))
}
