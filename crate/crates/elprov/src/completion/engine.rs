//! Worklist saturation with the completion rules CR0–CR16.
//!
//! Axioms are interned into compact [`Fact`]s over numeric symbol ids, and
//! every fact kind is indexed by the positions rules join on. Each newly
//! derived (fact, monomial) pair is joined against the stored facts once,
//! so every rule instance is found when its last premise is processed.
//!
//! The engine supports two update policies: `Collect` keeps every distinct
//! monomial of a fact (optionally bounded in size), `Merge` keeps a single
//! monomial per fact and grows it by union.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::ontology::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, RoleName};
use crate::provenance::{Monomial, Variable};

/// The completion rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Cr0,
    Cr1,
    Cr2,
    Cr3,
    Cr4,
    Cr5,
    Cr6,
    Cr7,
    Cr8,
    Cr9,
    Cr10,
    Cr11,
    Cr12,
    Cr13,
    Cr14,
    Cr15,
    Cr16,
}

impl Rule {
    pub const ALL: [Rule; 17] = [
        Rule::Cr0,
        Rule::Cr1,
        Rule::Cr2,
        Rule::Cr3,
        Rule::Cr4,
        Rule::Cr5,
        Rule::Cr6,
        Rule::Cr7,
        Rule::Cr8,
        Rule::Cr9,
        Rule::Cr10,
        Rule::Cr11,
        Rule::Cr12,
        Rule::Cr13,
        Rule::Cr14,
        Rule::Cr15,
        Rule::Cr16,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CR{}", self.index())
    }
}

/// A set of enabled rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet(u32);

impl RuleSet {
    pub fn all() -> Self {
        RuleSet((1 << Rule::ALL.len()) - 1)
    }

    pub fn without(self, rule: Rule) -> Self {
        RuleSet(self.0 & !(1 << rule.index()))
    }

    pub fn contains(self, rule: Rule) -> bool {
        self.0 & (1 << rule.index()) != 0
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::all()
    }
}

/// Resource caps for saturation and model construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of stored annotated axioms (or model tuples).
    pub max_axioms: usize,
    /// Wall-clock budget, if any.
    pub time_budget: Option<Duration>,
}

impl Limits {
    pub const DEFAULT_MAX_AXIOMS: usize = 1_000_000;

    pub fn unlimited() -> Self {
        Limits { max_axioms: usize::MAX, time_budget: None }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_axioms: Limits::DEFAULT_MAX_AXIOMS, time_budget: None }
    }
}

/// Counters collected during saturation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SaturationStats {
    /// Stored annotated axioms (for the merge policy: distinct axioms).
    pub axioms: usize,
    /// Successful applications per rule, indexed by rule number.
    pub rule_applications: Vec<u64>,
    /// Worklist items processed.
    pub processed: u64,
    /// Merge policy only: updates that grew an existing monomial.
    pub merges: u64,
}

/// Which cap was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Axioms(usize),
    Time(Duration),
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::Axioms(n) => write!(f, "more than {n} derived axioms"),
            LimitKind::Time(d) => write!(f, "time budget of {} ms", d.as_millis()),
        }
    }
}

/// A resource cap was exceeded; carries the statistics gathered so far.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource limit exceeded: {limit}")]
pub struct LimitExceeded {
    pub limit: LimitKind,
    pub stats: SaturationStats,
}

pub(crate) type Sym = u32;
pub(crate) const TOP: Sym = 0;

/// A normalized axiom over interned symbols. `Conj` operands are sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Fact {
    Sub(Sym, Sym),
    Conj(Sym, Sym, Sym),
    Ex(Sym, Sym),
    ExQ(Sym, Sym, Sym),
    RoleSub(Sym, Sym),
    Ran(Sym, Sym),
    Inst(Sym, Sym),
    Rel(Sym, Sym, Sym),
}

/// A monomial over interned variable ids, sorted and duplicate-free.
pub(crate) type Mono = Box<[Sym]>;

fn union(a: &[Sym], b: &[Sym]) -> Vec<Sym> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Debug, Clone)]
struct Interner<T> {
    names: Vec<T>,
    ids: HashMap<T, Sym>,
}

impl<T: Clone + Eq + std::hash::Hash> Interner<T> {
    fn new() -> Self {
        Interner { names: Vec::new(), ids: HashMap::new() }
    }

    fn intern(&mut self, name: &T) -> Sym {
        if let Some(id) = self.ids.get(name) {
            return *id;
        }
        let id = self.names.len() as Sym;
        self.names.push(name.clone());
        self.ids.insert(name.clone(), id);
        id
    }

    fn get(&self, name: &T) -> Option<Sym> {
        self.ids.get(name).copied()
    }
}

/// Symbol tables. Concept id 0 is ⊤.
#[derive(Debug, Clone)]
pub(crate) struct Symbols {
    concepts: Interner<Option<ConceptName>>,
    roles: Interner<RoleName>,
    inds: Interner<IndividualName>,
    vars: Interner<Variable>,
}

impl Symbols {
    fn new() -> Self {
        let mut concepts = Interner::new();
        concepts.intern(&None);
        Symbols { concepts, roles: Interner::new(), inds: Interner::new(), vars: Interner::new() }
    }

    fn basic(&mut self, c: &Concept) -> Option<Sym> {
        match c {
            Concept::Top => Some(TOP),
            Concept::Atomic(a) => Some(self.concepts.intern(&Some(a.clone()))),
            _ => None,
        }
    }

    fn lookup_basic(&self, c: &Concept) -> Option<Sym> {
        match c {
            Concept::Top => Some(TOP),
            Concept::Atomic(a) => self.concepts.get(&Some(a.clone())),
            _ => None,
        }
    }

    /// Interns a normal-form axiom; `None` if it is not normal.
    fn intern_axiom(&mut self, axiom: &Axiom) -> Option<Fact> {
        Some(match axiom {
            Axiom::Gci { lhs, rhs } => match (lhs, rhs) {
                (Concept::Conj(a, b), Concept::Atomic(_)) => {
                    let (a, b) = (self.basic(a)?, self.basic(b)?);
                    let c = self.basic(rhs)?;
                    Fact::Conj(a.min(b), a.max(b), c)
                }
                (Concept::ExistsQ(r, a), Concept::Atomic(_)) => {
                    let a = self.basic(a)?;
                    let r = self.roles.intern(r);
                    Fact::ExQ(r, a, self.basic(rhs)?)
                }
                (Concept::Exists(r), Concept::Atomic(_)) => {
                    let r = self.roles.intern(r);
                    Fact::ExQ(r, TOP, self.basic(rhs)?)
                }
                (l, Concept::Exists(r)) => {
                    let a = self.basic(l)?;
                    Fact::Ex(a, self.roles.intern(r))
                }
                (l, r) => Fact::Sub(self.basic(l)?, self.basic(r)?),
            },
            Axiom::Ri { sub, sup } => Fact::RoleSub(self.roles.intern(sub), self.roles.intern(sup)),
            Axiom::Rr { role, filler } => {
                let r = self.roles.intern(role);
                Fact::Ran(r, self.concepts.intern(&Some(filler.clone())))
            }
            Axiom::Ca { concept, ind } => {
                let c = self.basic(concept)?;
                Fact::Inst(c, self.inds.intern(ind))
            }
            Axiom::Ra { role, subject, object } => {
                let r = self.roles.intern(role);
                Fact::Rel(r, self.inds.intern(subject), self.inds.intern(object))
            }
        })
    }

    /// Translates an axiom without interning new symbols.
    pub(crate) fn lookup_axiom(&self, axiom: &Axiom) -> Option<Fact> {
        Some(match axiom {
            Axiom::Gci { lhs, rhs } => match (lhs, rhs) {
                (Concept::Conj(a, b), Concept::Atomic(_)) => {
                    let (a, b) = (self.lookup_basic(a)?, self.lookup_basic(b)?);
                    Fact::Conj(a.min(b), a.max(b), self.lookup_basic(rhs)?)
                }
                (Concept::ExistsQ(r, a), Concept::Atomic(_)) => {
                    Fact::ExQ(self.roles.get(r)?, self.lookup_basic(a)?, self.lookup_basic(rhs)?)
                }
                (Concept::Exists(r), Concept::Atomic(_)) => Fact::ExQ(self.roles.get(r)?, TOP, self.lookup_basic(rhs)?),
                (l, Concept::Exists(r)) => Fact::Ex(self.lookup_basic(l)?, self.roles.get(r)?),
                (l, r) => Fact::Sub(self.lookup_basic(l)?, self.lookup_basic(r)?),
            },
            Axiom::Ri { sub, sup } => Fact::RoleSub(self.roles.get(sub)?, self.roles.get(sup)?),
            Axiom::Rr { role, filler } => Fact::Ran(self.roles.get(role)?, self.concepts.get(&Some(filler.clone()))?),
            Axiom::Ca { concept, ind } => Fact::Inst(self.lookup_basic(concept)?, self.inds.get(ind)?),
            Axiom::Ra { role, subject, object } => {
                Fact::Rel(self.roles.get(role)?, self.inds.get(subject)?, self.inds.get(object)?)
            }
        })
    }

    /// Translates a monomial; `None` if it uses an unknown variable.
    pub(crate) fn lookup_monomial(&self, m: &Monomial) -> Option<Mono> {
        let mut ids = m.vars().iter().map(|v| self.vars.get(v)).collect::<Option<Vec<_>>>()?;
        ids.sort_unstable();
        Some(ids.into_boxed_slice())
    }

    fn concept(&self, c: Sym) -> Concept {
        match &self.concepts.names[c as usize] {
            None => Concept::Top,
            Some(name) => Concept::Atomic(name.clone()),
        }
    }

    fn role(&self, r: Sym) -> RoleName {
        self.roles.names[r as usize].clone()
    }

    fn ind(&self, i: Sym) -> IndividualName {
        self.inds.names[i as usize].clone()
    }

    pub(crate) fn axiom(&self, fact: Fact) -> Axiom {
        match fact {
            Fact::Sub(a, b) => Axiom::Gci { lhs: self.concept(a), rhs: self.concept(b) },
            Fact::Conj(a, b, c) => {
                Axiom::Gci { lhs: Concept::and(self.concept(a), self.concept(b)), rhs: self.concept(c) }
            }
            Fact::Ex(a, r) => Axiom::Gci { lhs: self.concept(a), rhs: Concept::Exists(self.role(r)) },
            Fact::ExQ(r, a, b) => {
                Axiom::Gci { lhs: Concept::ExistsQ(self.role(r), Box::new(self.concept(a))), rhs: self.concept(b) }
            }
            Fact::RoleSub(r, s) => Axiom::Ri { sub: self.role(r), sup: self.role(s) },
            Fact::Ran(r, a) => Axiom::Rr {
                role: self.role(r),
                filler: match self.concept(a) {
                    Concept::Atomic(name) => name,
                    _ => unreachable!("range fillers are concept names"),
                },
            },
            Fact::Inst(a, i) => Axiom::Ca { concept: self.concept(a), ind: self.ind(i) },
            Fact::Rel(r, i, j) => Axiom::Ra { role: self.role(r), subject: self.ind(i), object: self.ind(j) },
        }
    }

    pub(crate) fn monomial(&self, m: &[Sym]) -> Monomial {
        Monomial::representative(m.iter().map(|v| self.vars.names[*v as usize].clone()))
    }
}

/// How derived monomials are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Policy {
    /// Keep every distinct monomial with at most `bound` variables.
    Collect { bound: Option<usize> },
    /// Keep one monomial per fact, growing it by union.
    Merge,
}

/// How a stored (fact, monomial) pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Origin {
    /// The rule that first produced it; `None` for input axioms.
    pub rule: Option<Rule>,
    /// Number of rule instances that produced it.
    pub derivations: u64,
}

#[derive(Debug, Clone, Default)]
struct Entry {
    monos: Vec<(Mono, Origin)>,
    seen: HashMap<Mono, usize>,
}

#[derive(Default, Clone, Debug)]
struct Indexes {
    sub_by_lhs: HashMap<Sym, Vec<u32>>,
    sub_by_rhs: HashMap<Sym, Vec<u32>>,
    conj_by_operand: HashMap<Sym, Vec<u32>>,
    ex_by_lhs: HashMap<Sym, Vec<u32>>,
    ex_by_role: HashMap<Sym, Vec<u32>>,
    exq_by_role: HashMap<Sym, Vec<u32>>,
    exq_by_filler: HashMap<Sym, Vec<u32>>,
    exq_by_role_filler: HashMap<(Sym, Sym), Vec<u32>>,
    rs_by_sub: HashMap<Sym, Vec<u32>>,
    rs_by_sup: HashMap<Sym, Vec<u32>>,
    ran_by_role: HashMap<Sym, Vec<u32>>,
    ran_by_concept: HashMap<Sym, Vec<u32>>,
    inst_by_concept: HashMap<Sym, Vec<u32>>,
    rel_by_role: HashMap<Sym, Vec<u32>>,
    rel_by_role_object: HashMap<(Sym, Sym), Vec<u32>>,
}

fn push<K: std::hash::Hash + Eq>(map: &mut HashMap<K, Vec<u32>>, key: K, id: u32) {
    map.entry(key).or_default().push(id);
}

const EMPTY: &[u32] = &[];

fn get<'a, K: std::hash::Hash + Eq>(map: &'a HashMap<K, Vec<u32>>, key: &K) -> &'a [u32] {
    map.get(key).map_or(EMPTY, |v| v.as_slice())
}

impl Indexes {
    fn add(&mut self, id: u32, fact: Fact) {
        match fact {
            Fact::Sub(a, b) => {
                push(&mut self.sub_by_lhs, a, id);
                push(&mut self.sub_by_rhs, b, id);
            }
            Fact::Conj(a, b, _) => {
                push(&mut self.conj_by_operand, a, id);
                if b != a {
                    push(&mut self.conj_by_operand, b, id);
                }
            }
            Fact::Ex(a, r) => {
                push(&mut self.ex_by_lhs, a, id);
                push(&mut self.ex_by_role, r, id);
            }
            Fact::ExQ(r, a, _) => {
                push(&mut self.exq_by_role, r, id);
                push(&mut self.exq_by_filler, a, id);
                push(&mut self.exq_by_role_filler, (r, a), id);
            }
            Fact::RoleSub(r, s) => {
                push(&mut self.rs_by_sub, r, id);
                push(&mut self.rs_by_sup, s, id);
            }
            Fact::Ran(r, a) => {
                push(&mut self.ran_by_role, r, id);
                push(&mut self.ran_by_concept, a, id);
            }
            Fact::Inst(a, _) => push(&mut self.inst_by_concept, a, id),
            Fact::Rel(r, _, j) => {
                push(&mut self.rel_by_role, r, id);
                push(&mut self.rel_by_role_object, (r, j), id);
            }
        }
    }
}

/// The other operand of a conjunction containing `x`.
fn other_operand(a: Sym, b: Sym, x: Sym) -> Sym {
    if a == x {
        b
    } else {
        a
    }
}

/// A rule instance found by a join: the conclusion and the stored facts
/// used as premises besides the one being processed.
struct Instance {
    rule: Rule,
    conclusion: Fact,
    premises: [u32; 4],
    len: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Engine {
    pub symbols: Symbols,
    policy: Policy,
    rules: RuleSet,
    facts: Vec<Fact>,
    ids: HashMap<Fact, u32>,
    entries: Vec<Entry>,
    idx: Indexes,
    queue: VecDeque<(u32, Mono)>,
    stats: SaturationStats,
    stored: usize,
}

impl Engine {
    /// Loads a normalized ontology and applies CR0 and CR11.
    ///
    /// Returns an error naming the first axiom that is not in normal form.
    pub fn new(ontology: &AnnotatedOntology, policy: Policy, rules: RuleSet) -> Result<Engine, Axiom> {
        let mut symbols = Symbols::new();
        // Variables are interned in name order so that id order agrees with
        // the canonical monomial order.
        let sig = ontology.signature();
        for v in &sig.vars {
            symbols.vars.intern(v);
        }
        // Concept names likewise, so that the sorted operands of a
        // conjunction are reported in name order whatever the input order.
        for c in &sig.concepts {
            symbols.concepts.intern(&Some(c.clone()));
        }
        let mut engine = Engine {
            symbols,
            policy,
            rules,
            facts: Vec::new(),
            ids: HashMap::new(),
            entries: Vec::new(),
            idx: Indexes::default(),
            queue: VecDeque::new(),
            stats: SaturationStats { rule_applications: vec![0; Rule::ALL.len()], ..Default::default() },
            stored: 0,
        };
        let mut input = Vec::new();
        for ax in ontology {
            let fact = engine.symbols.intern_axiom(&ax.axiom).ok_or_else(|| ax.axiom.clone())?;
            let mono = engine.symbols.lookup_monomial(&ax.annotation).expect("variables were interned");
            input.push((fact, mono));
        }
        // ⊤ occurs if it is mentioned or if CR11 introduces it.
        let top_occurs = sig.has_top || !sig.individuals.is_empty();
        for (fact, mono) in input {
            engine.insert(fact, mono, None, Policy::Merge == policy);
        }
        let unit: Mono = Box::new([]);
        if rules.contains(Rule::Cr0) {
            if top_occurs {
                engine.insert(Fact::Sub(TOP, TOP), unit.clone(), Some(Rule::Cr0), false);
            }
            for c in &sig.concepts {
                let id = engine.symbols.concepts.intern(&Some(c.clone()));
                engine.insert(Fact::Sub(id, id), unit.clone(), Some(Rule::Cr0), false);
            }
            for r in &sig.roles {
                let id = engine.symbols.roles.intern(r);
                engine.insert(Fact::RoleSub(id, id), unit.clone(), Some(Rule::Cr0), false);
            }
        }
        if rules.contains(Rule::Cr11) {
            for a in &sig.individuals {
                let id = engine.symbols.inds.intern(a);
                engine.insert(Fact::Inst(TOP, id), unit.clone(), Some(Rule::Cr11), false);
            }
        }
        engine.stats.merges = 0;
        Ok(engine)
    }

    fn within_bound(&self, m: &[Sym]) -> bool {
        match self.policy {
            Policy::Collect { bound: Some(k) } => m.len() <= k,
            _ => true,
        }
    }

    /// Stores `(fact, mono)`. With `merge_input`, input annotations of the
    /// same axiom are merged regardless of policy bookkeeping. Returns true
    /// if the store changed.
    fn insert(&mut self, fact: Fact, mono: Mono, rule: Option<Rule>, merge_input: bool) -> bool {
        if !self.within_bound(&mono) {
            return false;
        }
        let id = match self.ids.get(&fact) {
            Some(id) => *id,
            None => {
                let id = self.facts.len() as u32;
                self.facts.push(fact);
                self.ids.insert(fact, id);
                self.entries.push(Entry::default());
                self.idx.add(id, fact);
                id
            }
        };
        let entry = &mut self.entries[id as usize];
        match self.policy {
            Policy::Collect { .. } => {
                if let Some(&pos) = entry.seen.get(&mono) {
                    entry.monos[pos].1.derivations += 1;
                    return false;
                }
                entry.seen.insert(mono.clone(), entry.monos.len());
                entry.monos.push((mono.clone(), Origin { rule, derivations: 1 }));
                self.stored += 1;
            }
            Policy::Merge => {
                if let Some((current, origin)) = entry.monos.first_mut() {
                    let merged = union(current, &mono);
                    if merged.len() == current.len() {
                        origin.derivations += 1;
                        return false;
                    }
                    *current = merged.into_boxed_slice();
                    origin.derivations += 1;
                    if !merge_input {
                        self.stats.merges += 1;
                    }
                    let current = current.clone();
                    self.queue.push_back((id, current));
                    self.bump(rule);
                    return true;
                }
                entry.monos.push((mono.clone(), Origin { rule, derivations: 1 }));
                self.stored += 1;
            }
        }
        self.queue.push_back((id, mono));
        self.bump(rule);
        true
    }

    fn bump(&mut self, rule: Option<Rule>) {
        if let Some(r) = rule {
            self.stats.rule_applications[r.index()] += 1;
        }
    }

    fn id(&self, fact: Fact) -> Option<u32> {
        self.ids.get(&fact).copied()
    }

    fn monos(&self, id: u32) -> impl Iterator<Item = &Mono> + '_ {
        self.entries[id as usize].monos.iter().map(|(m, _)| m)
    }

    /// Runs the worklist to a fixpoint.
    pub fn run(&mut self, limits: &Limits) -> Result<(), LimitExceeded> {
        let start = Instant::now();
        let mut instances = Vec::new();
        let mut conclusions = Vec::new();
        while let Some((id, mono)) = self.queue.pop_front() {
            if self.policy == Policy::Merge && self.entries[id as usize].monos[0].0 != mono {
                // A later queue item carries the grown monomial.
                continue;
            }
            self.stats.processed += 1;
            instances.clear();
            self.join(self.facts[id as usize], &mut instances);
            conclusions.clear();
            for inst in &instances {
                self.combine(&mono, &inst.premises[..inst.len], &mut |m| {
                    conclusions.push((inst.rule, inst.conclusion, m))
                });
            }
            for (rule, fact, m) in conclusions.drain(..) {
                self.insert(fact, m, Some(rule), false);
            }
            if self.stored > limits.max_axioms {
                return Err(self.exceeded(LimitKind::Axioms(limits.max_axioms)));
            }
            if let Some(budget) = limits.time_budget {
                if self.stats.processed.is_multiple_of(256) && start.elapsed() > budget {
                    return Err(self.exceeded(LimitKind::Time(budget)));
                }
            }
        }
        self.stats.axioms = self.stored;
        Ok(())
    }

    fn exceeded(&self, limit: LimitKind) -> LimitExceeded {
        let mut stats = self.stats.clone();
        stats.axioms = self.stored;
        LimitExceeded { limit, stats }
    }

    /// Calls `emit` with every product of `base` and one monomial of each
    /// premise, pruning products that exceed the bound.
    fn combine(&self, base: &[Sym], premises: &[u32], emit: &mut dyn FnMut(Mono)) {
        match premises.split_first() {
            None => emit(base.to_vec().into_boxed_slice()),
            Some((first, rest)) => {
                for m in self.monos(*first) {
                    let product = union(base, m);
                    if self.within_bound(&product) {
                        self.combine(&product, rest, emit);
                    }
                }
            }
        }
    }

    /// Finds every rule instance in which `fact` is one of the premises,
    /// joined against the stored facts.
    fn join(&self, fact: Fact, out: &mut Vec<Instance>) {
        let rules = self.rules;
        let idx = &self.idx;
        let facts = &self.facts;
        let mut emit = |rule: Rule, conclusion: Fact, premises: &[u32]| {
            if rules.contains(rule) {
                let mut p = [0; 4];
                p[..premises.len()].copy_from_slice(premises);
                out.push(Instance { rule, conclusion, premises: p, len: premises.len() });
            }
        };
        match fact {
            Fact::Sub(a, b) => {
                // CR4: A ⊑ B, B ⊑ C  ⟹  A ⊑ C
                for &f in get(&idx.sub_by_lhs, &b) {
                    if let Fact::Sub(_, c) = facts[f as usize] {
                        emit(Rule::Cr4, Fact::Sub(a, c), &[f]);
                    }
                }
                for &f in get(&idx.sub_by_rhs, &a) {
                    if let Fact::Sub(x, _) = facts[f as usize] {
                        emit(Rule::Cr4, Fact::Sub(x, b), &[f]);
                    }
                }
                // CR5: A ⊑ B, B ⊑ ∃R  ⟹  A ⊑ ∃R
                for &f in get(&idx.ex_by_lhs, &b) {
                    if let Fact::Ex(_, r) = facts[f as usize] {
                        emit(Rule::Cr5, Fact::Ex(a, r), &[f]);
                    }
                }
                // CR6: A ⊑ B1, A ⊑ B2, B1 ⊓ B2 ⊑ C  ⟹  A ⊑ C
                for &fc in get(&idx.conj_by_operand, &b) {
                    if let Fact::Conj(x, y, c) = facts[fc as usize] {
                        if let Some(fs) = self.id(Fact::Sub(a, other_operand(x, y, b))) {
                            emit(Rule::Cr6, Fact::Sub(a, c), &[fs, fc]);
                        }
                    }
                }
                // CR7 with this fact as B1 ⊑ C1:
                // ran(R) ⊑ B1, ran(R) ⊑ B2, B1 ⊑ C1, B2 ⊑ C2, C1 ⊓ C2 ⊑ C  ⟹  ran(R) ⊑ C
                for &fr in get(&idx.ran_by_concept, &a) {
                    let Fact::Ran(r, _) = facts[fr as usize] else { continue };
                    for &fc in get(&idx.conj_by_operand, &b) {
                        let Fact::Conj(x, y, c) = facts[fc as usize] else { continue };
                        let c2 = other_operand(x, y, b);
                        for &fs in get(&idx.sub_by_rhs, &c2) {
                            let Fact::Sub(b2, _) = facts[fs as usize] else { continue };
                            if let Some(fr2) = self.id(Fact::Ran(r, b2)) {
                                emit(Rule::Cr7, Fact::Ran(r, c), &[fr, fr2, fs, fc]);
                            }
                        }
                    }
                }
                if a == TOP {
                    // CR8: A ⊓ B ⊑ C, ⊤ ⊑ B  ⟹  A ⊑ C
                    for &fc in get(&idx.conj_by_operand, &b) {
                        if let Fact::Conj(x, y, c) = facts[fc as usize] {
                            emit(Rule::Cr8, Fact::Sub(other_operand(x, y, b), c), &[fc]);
                        }
                    }
                    // CR10: A ⊑ ∃R, ⊤ ⊑ B, ∃R.B ⊑ C  ⟹  A ⊑ C
                    for &fq in get(&idx.exq_by_filler, &b) {
                        let Fact::ExQ(r, _, c) = facts[fq as usize] else { continue };
                        for &fe in get(&idx.ex_by_role, &r) {
                            if let Fact::Ex(x, _) = facts[fe as usize] {
                                emit(Rule::Cr10, Fact::Sub(x, c), &[fe, fq]);
                            }
                        }
                    }
                }
                // CR9 with this fact as B ⊑ C:
                // A ⊑ ∃S, ran(S) ⊑ B, B ⊑ C, S ⊑ R, ∃R.C ⊑ D  ⟹  A ⊑ D
                for &fr in get(&idx.ran_by_concept, &a) {
                    let Fact::Ran(s, _) = facts[fr as usize] else { continue };
                    for &frs in get(&idx.rs_by_sub, &s) {
                        let Fact::RoleSub(_, r) = facts[frs as usize] else { continue };
                        for &fq in get(&idx.exq_by_role_filler, &(r, b)) {
                            let Fact::ExQ(_, _, d) = facts[fq as usize] else { continue };
                            for &fe in get(&idx.ex_by_role, &s) {
                                if let Fact::Ex(x, _) = facts[fe as usize] {
                                    emit(Rule::Cr9, Fact::Sub(x, d), &[fe, fr, frs, fq]);
                                }
                            }
                        }
                    }
                }
                // CR13: A(a), A ⊑ B  ⟹  B(a)
                for &fi in get(&idx.inst_by_concept, &a) {
                    if let Fact::Inst(_, i) = facts[fi as usize] {
                        emit(Rule::Cr13, Fact::Inst(b, i), &[fi]);
                    }
                }
            }
            Fact::Conj(x, y, c) => {
                // CR6
                for &fs in get(&idx.sub_by_rhs, &x) {
                    let Fact::Sub(a, _) = facts[fs as usize] else { continue };
                    if let Some(fs2) = self.id(Fact::Sub(a, y)) {
                        emit(Rule::Cr6, Fact::Sub(a, c), &[fs, fs2]);
                    }
                }
                // CR7
                for &fs1 in get(&idx.sub_by_rhs, &x) {
                    let Fact::Sub(b1, _) = facts[fs1 as usize] else { continue };
                    for &fr1 in get(&idx.ran_by_concept, &b1) {
                        let Fact::Ran(r, _) = facts[fr1 as usize] else { continue };
                        for &fs2 in get(&idx.sub_by_rhs, &y) {
                            let Fact::Sub(b2, _) = facts[fs2 as usize] else { continue };
                            if let Some(fr2) = self.id(Fact::Ran(r, b2)) {
                                emit(Rule::Cr7, Fact::Ran(r, c), &[fr1, fr2, fs1, fs2]);
                            }
                        }
                    }
                }
                // CR8
                if let Some(ft) = self.id(Fact::Sub(TOP, y)) {
                    emit(Rule::Cr8, Fact::Sub(x, c), &[ft]);
                }
                if x != y {
                    if let Some(ft) = self.id(Fact::Sub(TOP, x)) {
                        emit(Rule::Cr8, Fact::Sub(y, c), &[ft]);
                    }
                }
                // CR14: A1(a), A2(a), A1 ⊓ A2 ⊑ B  ⟹  B(a)
                for &fi in get(&idx.inst_by_concept, &x) {
                    let Fact::Inst(_, i) = facts[fi as usize] else { continue };
                    if let Some(fi2) = self.id(Fact::Inst(y, i)) {
                        emit(Rule::Cr14, Fact::Inst(c, i), &[fi, fi2]);
                    }
                }
            }
            Fact::Ex(a, r) => {
                // CR3: A ⊑ ∃R, R ⊑ S  ⟹  A ⊑ ∃S
                for &f in get(&idx.rs_by_sub, &r) {
                    if let Fact::RoleSub(_, s) = facts[f as usize] {
                        emit(Rule::Cr3, Fact::Ex(a, s), &[f]);
                    }
                }
                // CR5
                for &f in get(&idx.sub_by_rhs, &a) {
                    if let Fact::Sub(x, _) = facts[f as usize] {
                        emit(Rule::Cr5, Fact::Ex(x, r), &[f]);
                    }
                }
                // CR9 with this fact as A ⊑ ∃S
                for &fr in get(&idx.ran_by_role, &r) {
                    let Fact::Ran(_, b) = facts[fr as usize] else { continue };
                    for &fs in get(&idx.sub_by_lhs, &b) {
                        let Fact::Sub(_, c) = facts[fs as usize] else { continue };
                        for &frs in get(&idx.rs_by_sub, &r) {
                            let Fact::RoleSub(_, r2) = facts[frs as usize] else { continue };
                            for &fq in get(&idx.exq_by_role_filler, &(r2, c)) {
                                if let Fact::ExQ(_, _, d) = facts[fq as usize] {
                                    emit(Rule::Cr9, Fact::Sub(a, d), &[fr, fs, frs, fq]);
                                }
                            }
                        }
                    }
                }
                // CR10
                for &fq in get(&idx.exq_by_role, &r) {
                    let Fact::ExQ(_, b, c) = facts[fq as usize] else { continue };
                    if let Some(ft) = self.id(Fact::Sub(TOP, b)) {
                        emit(Rule::Cr10, Fact::Sub(a, c), &[ft, fq]);
                    }
                }
            }
            Fact::ExQ(r, b, d) => {
                // CR9 with this fact as ∃R.C ⊑ D
                for &frs in get(&idx.rs_by_sup, &r) {
                    let Fact::RoleSub(s, _) = facts[frs as usize] else { continue };
                    for &fr in get(&idx.ran_by_role, &s) {
                        let Fact::Ran(_, b2) = facts[fr as usize] else { continue };
                        let Some(fs) = self.id(Fact::Sub(b2, b)) else { continue };
                        for &fe in get(&idx.ex_by_role, &s) {
                            if let Fact::Ex(a, _) = facts[fe as usize] {
                                emit(Rule::Cr9, Fact::Sub(a, d), &[fe, fr, fs, frs]);
                            }
                        }
                    }
                }
                // CR10
                if let Some(ft) = self.id(Fact::Sub(TOP, b)) {
                    for &fe in get(&idx.ex_by_role, &r) {
                        if let Fact::Ex(a, _) = facts[fe as usize] {
                            emit(Rule::Cr10, Fact::Sub(a, d), &[fe, ft]);
                        }
                    }
                }
                // CR15: R(a,b), A(b), ∃R.A ⊑ B  ⟹  B(a)
                for &fl in get(&idx.rel_by_role, &r) {
                    let Fact::Rel(_, i, j) = facts[fl as usize] else { continue };
                    if let Some(fi) = self.id(Fact::Inst(b, j)) {
                        emit(Rule::Cr15, Fact::Inst(d, i), &[fl, fi]);
                    }
                }
            }
            Fact::RoleSub(r, s) => {
                // CR1: R1 ⊑ R2, R2 ⊑ R3  ⟹  R1 ⊑ R3
                for &f in get(&idx.rs_by_sub, &s) {
                    if let Fact::RoleSub(_, t) = facts[f as usize] {
                        emit(Rule::Cr1, Fact::RoleSub(r, t), &[f]);
                    }
                }
                for &f in get(&idx.rs_by_sup, &r) {
                    if let Fact::RoleSub(q, _) = facts[f as usize] {
                        emit(Rule::Cr1, Fact::RoleSub(q, s), &[f]);
                    }
                }
                // CR2: R ⊑ S, ran(S) ⊑ A  ⟹  ran(R) ⊑ A
                for &f in get(&idx.ran_by_role, &s) {
                    if let Fact::Ran(_, a) = facts[f as usize] {
                        emit(Rule::Cr2, Fact::Ran(r, a), &[f]);
                    }
                }
                // CR3
                for &f in get(&idx.ex_by_role, &r) {
                    if let Fact::Ex(a, _) = facts[f as usize] {
                        emit(Rule::Cr3, Fact::Ex(a, s), &[f]);
                    }
                }
                // CR9 with this fact as S ⊑ R
                for &fr in get(&idx.ran_by_role, &r) {
                    let Fact::Ran(_, b) = facts[fr as usize] else { continue };
                    for &fs in get(&idx.sub_by_lhs, &b) {
                        let Fact::Sub(_, c) = facts[fs as usize] else { continue };
                        for &fq in get(&idx.exq_by_role_filler, &(s, c)) {
                            let Fact::ExQ(_, _, d) = facts[fq as usize] else { continue };
                            for &fe in get(&idx.ex_by_role, &r) {
                                if let Fact::Ex(a, _) = facts[fe as usize] {
                                    emit(Rule::Cr9, Fact::Sub(a, d), &[fe, fr, fs, fq]);
                                }
                            }
                        }
                    }
                }
                // CR12: R(a,b), R ⊑ S  ⟹  S(a,b)
                for &f in get(&idx.rel_by_role, &r) {
                    if let Fact::Rel(_, i, j) = facts[f as usize] {
                        emit(Rule::Cr12, Fact::Rel(s, i, j), &[f]);
                    }
                }
            }
            Fact::Ran(r, b) => {
                // CR2
                for &f in get(&idx.rs_by_sup, &r) {
                    if let Fact::RoleSub(q, _) = facts[f as usize] {
                        emit(Rule::Cr2, Fact::Ran(q, b), &[f]);
                    }
                }
                // CR7 with this fact as ran(R) ⊑ B1
                for &fs1 in get(&idx.sub_by_lhs, &b) {
                    let Fact::Sub(_, c1) = facts[fs1 as usize] else { continue };
                    for &fc in get(&idx.conj_by_operand, &c1) {
                        let Fact::Conj(x, y, c) = facts[fc as usize] else { continue };
                        let c2 = other_operand(x, y, c1);
                        for &fs2 in get(&idx.sub_by_rhs, &c2) {
                            let Fact::Sub(b2, _) = facts[fs2 as usize] else { continue };
                            if let Some(fr2) = self.id(Fact::Ran(r, b2)) {
                                emit(Rule::Cr7, Fact::Ran(r, c), &[fr2, fs1, fs2, fc]);
                            }
                        }
                    }
                }
                // CR9 with this fact as ran(S) ⊑ B
                for &fs in get(&idx.sub_by_lhs, &b) {
                    let Fact::Sub(_, c) = facts[fs as usize] else { continue };
                    for &frs in get(&idx.rs_by_sub, &r) {
                        let Fact::RoleSub(_, r2) = facts[frs as usize] else { continue };
                        for &fq in get(&idx.exq_by_role_filler, &(r2, c)) {
                            let Fact::ExQ(_, _, d) = facts[fq as usize] else { continue };
                            for &fe in get(&idx.ex_by_role, &r) {
                                if let Fact::Ex(a, _) = facts[fe as usize] {
                                    emit(Rule::Cr9, Fact::Sub(a, d), &[fe, fs, frs, fq]);
                                }
                            }
                        }
                    }
                }
                // CR16: R(a,b), ran(R) ⊑ A  ⟹  A(b)
                for &f in get(&idx.rel_by_role, &r) {
                    if let Fact::Rel(_, _, j) = facts[f as usize] {
                        emit(Rule::Cr16, Fact::Inst(b, j), &[f]);
                    }
                }
            }
            Fact::Inst(a, i) => {
                // CR13
                for &f in get(&idx.sub_by_lhs, &a) {
                    if let Fact::Sub(_, b) = facts[f as usize] {
                        emit(Rule::Cr13, Fact::Inst(b, i), &[f]);
                    }
                }
                // CR14
                for &fc in get(&idx.conj_by_operand, &a) {
                    let Fact::Conj(x, y, c) = facts[fc as usize] else { continue };
                    if let Some(fi) = self.id(Fact::Inst(other_operand(x, y, a), i)) {
                        emit(Rule::Cr14, Fact::Inst(c, i), &[fi, fc]);
                    }
                }
                // CR15 with this fact as A(b)
                for &fq in get(&idx.exq_by_filler, &a) {
                    let Fact::ExQ(r, _, d) = facts[fq as usize] else { continue };
                    for &fl in get(&idx.rel_by_role_object, &(r, i)) {
                        if let Fact::Rel(_, x, _) = facts[fl as usize] {
                            emit(Rule::Cr15, Fact::Inst(d, x), &[fl, fq]);
                        }
                    }
                }
            }
            Fact::Rel(r, i, j) => {
                // CR12
                for &f in get(&idx.rs_by_sub, &r) {
                    if let Fact::RoleSub(_, s) = facts[f as usize] {
                        emit(Rule::Cr12, Fact::Rel(s, i, j), &[f]);
                    }
                }
                // CR15
                for &fq in get(&idx.exq_by_role, &r) {
                    let Fact::ExQ(_, b, d) = facts[fq as usize] else { continue };
                    if let Some(fi) = self.id(Fact::Inst(b, j)) {
                        emit(Rule::Cr15, Fact::Inst(d, i), &[fi, fq]);
                    }
                }
                // CR16
                for &f in get(&idx.ran_by_role, &r) {
                    if let Fact::Ran(_, a) = facts[f as usize] {
                        emit(Rule::Cr16, Fact::Inst(a, j), &[f]);
                    }
                }
            }
        }
    }

    pub fn stats(&self) -> &SaturationStats {
        &self.stats
    }

    /// Stored monomials of a fact, with their origins.
    pub fn annotations(&self, fact: Fact) -> &[(Mono, Origin)] {
        match self.id(fact) {
            Some(id) => &self.entries[id as usize].monos,
            None => &[],
        }
    }

    /// Every stored (fact, monomial, origin) triple.
    pub fn iter(&self) -> impl Iterator<Item = (Fact, &Mono, Origin)> + '_ {
        self.facts.iter().zip(&self.entries).flat_map(|(f, e)| e.monos.iter().map(move |(m, o)| (*f, m, *o)))
    }

    /// Converts every stored pair to an annotated axiom.
    pub fn annotated_axioms(&self) -> Vec<(AnnotatedAxiom, Origin)> {
        self.iter().map(|(f, m, o)| (AnnotatedAxiom::new(self.symbols.axiom(f), self.symbols.monomial(m)), o)).collect()
    }
}
