//! A naive re-statement of the completion rules, used to check that a
//! saturated set is closed: every rule instance whose premises are in the
//! set has its conclusion in the set too (if it fits the bound).

use std::collections::BTreeSet;

use elprov::{Axiom, Concept, ConceptName, IndividualName, Monomial, RoleName};

type Key = Option<ConceptName>;

fn key(c: &Concept) -> Option<Key> {
    match c {
        Concept::Top => Some(None),
        Concept::Atomic(a) => Some(Some(a.clone())),
        _ => None,
    }
}

fn concept(k: &Key) -> Concept {
    match k {
        None => Concept::Top,
        Some(a) => Concept::Atomic(a.clone()),
    }
}

#[derive(Default)]
struct Split {
    sub: Vec<(Key, Key, Monomial)>,
    ex: Vec<(Key, RoleName, Monomial)>,
    conj: Vec<(Key, Key, Key, Monomial)>,
    exq: Vec<(RoleName, Key, Key, Monomial)>,
    ri: Vec<(RoleName, RoleName, Monomial)>,
    rr: Vec<(RoleName, ConceptName, Monomial)>,
    ca: Vec<(Key, IndividualName, Monomial)>,
    ra: Vec<(RoleName, IndividualName, IndividualName, Monomial)>,
}

fn split(entries: &[(Axiom, Monomial)]) -> Split {
    let mut s = Split::default();
    for (ax, m) in entries {
        let m = m.clone();
        match ax {
            Axiom::Gci { lhs, rhs } => match (lhs, rhs) {
                (Concept::Conj(a, b), r) => {
                    if let (Some(a), Some(b), Some(r)) = (key(a), key(b), key(r)) {
                        s.conj.push((a, b, r, m));
                    }
                }
                (Concept::ExistsQ(role, a), r) => {
                    if let (Some(a), Some(r)) = (key(a), key(r)) {
                        s.exq.push((role.clone(), a, r, m));
                    }
                }
                (l, Concept::Exists(role)) => {
                    if let Some(l) = key(l) {
                        s.ex.push((l, role.clone(), m));
                    }
                }
                (l, r) => {
                    if let (Some(l), Some(r)) = (key(l), key(r)) {
                        s.sub.push((l, r, m));
                    }
                }
            },
            Axiom::Ri { sub, sup } => s.ri.push((sub.clone(), sup.clone(), m)),
            Axiom::Rr { role, filler } => s.rr.push((role.clone(), filler.clone(), m)),
            Axiom::Ca { concept, ind } => {
                if let Some(k) = key(concept) {
                    s.ca.push((k, ind.clone(), m));
                }
            }
            Axiom::Ra { role, subject, object } => s.ra.push((role.clone(), subject.clone(), object.clone(), m)),
        }
    }
    s
}

struct Checker<'a> {
    set: BTreeSet<(&'a Axiom, &'a Monomial)>,
    bound: Option<usize>,
    missing: Vec<String>,
}

impl Checker<'_> {
    fn require(&mut self, rule: &str, axiom: Axiom, parts: &[&Monomial]) {
        let m = parts.iter().fold(Monomial::one(), |acc, p| acc.product(p));
        if self.bound.is_some_and(|k| m.len() > k) {
            return;
        }
        if !self.set.contains(&(&axiom, &m)) {
            self.missing.push(format!("{rule}: ({axiom}, {m})"));
        }
    }
}

/// Returns the rule conclusions missing from `entries`, formatted for
/// diagnostics. An empty result means the set is closed.
pub fn missing_conclusions(entries: &[(Axiom, Monomial)], bound: Option<usize>) -> Vec<String> {
    let s = split(entries);
    let mut c = Checker { set: entries.iter().map(|(a, m)| (a, m)).collect(), bound, missing: Vec::new() };
    let one = Monomial::one();

    let mut concepts = BTreeSet::new();
    let mut roles = BTreeSet::new();
    let mut individuals = BTreeSet::new();
    let top = s.sub.iter().any(|(l, r, _)| l.is_none() || r.is_none())
        || s.ex.iter().any(|(l, _, _)| l.is_none())
        || s.conj.iter().any(|(a, b, _, _)| a.is_none() || b.is_none())
        || s.exq.iter().any(|(_, a, _, _)| a.is_none())
        || s.ca.iter().any(|(k, _, _)| k.is_none());
    for (ax, _) in entries {
        match ax {
            Axiom::Ca { ind, .. } => {
                individuals.insert(ind.clone());
            }
            Axiom::Ra { role, subject, object } => {
                roles.insert(role.clone());
                individuals.insert(subject.clone());
                individuals.insert(object.clone());
            }
            Axiom::Ri { sub, sup } => {
                roles.insert(sub.clone());
                roles.insert(sup.clone());
            }
            Axiom::Rr { role, filler } => {
                roles.insert(role.clone());
                concepts.insert(filler.clone());
            }
            Axiom::Gci { .. } => {}
        }
    }
    for (l, r, _) in &s.sub {
        concepts.extend(l.iter().cloned().chain(r.iter().cloned()));
    }
    for (l, r, _) in &s.ex {
        concepts.extend(l.iter().cloned());
        roles.insert(r.clone());
    }
    for (a, b, r, _) in &s.conj {
        concepts.extend(a.iter().cloned().chain(b.iter().cloned()).chain(r.iter().cloned()));
    }
    for (role, a, r, _) in &s.exq {
        roles.insert(role.clone());
        concepts.extend(a.iter().cloned().chain(r.iter().cloned()));
    }
    for (k, _, _) in &s.ca {
        concepts.extend(k.iter().cloned());
    }

    // CR0
    for a in &concepts {
        c.require("CR0", Axiom::gci(Concept::Atomic(a.clone()), Concept::Atomic(a.clone())), &[]);
    }
    for r in &roles {
        c.require("CR0", Axiom::ri(r.as_str(), r.as_str()), &[]);
    }
    if top || !individuals.is_empty() {
        c.require("CR0", Axiom::gci(Concept::Top, Concept::Top), &[]);
    }
    // CR1, CR2, CR3
    for (r1, r2, m1) in &s.ri {
        for (r2b, r3, m2) in &s.ri {
            if r2 == r2b {
                c.require("CR1", Axiom::ri(r1.as_str(), r3.as_str()), &[m1, m2]);
            }
        }
        for (sr, a, m2) in &s.rr {
            if sr == r2 {
                c.require("CR2", Axiom::rr(r1.as_str(), a.as_str()), &[m1, m2]);
            }
        }
        for (a, er, m0) in &s.ex {
            if er == r1 {
                c.require("CR3", Axiom::gci(concept(a), Concept::Exists(r2.clone())), &[m0, m1]);
            }
        }
    }
    // CR4, CR5, CR6
    for (a, b, m1) in &s.sub {
        for (b2, cc, m2) in &s.sub {
            if b == b2 {
                c.require("CR4", Axiom::gci(concept(a), concept(cc)), &[m1, m2]);
            }
        }
        for (b2, r, m2) in &s.ex {
            if b == b2 {
                c.require("CR5", Axiom::gci(concept(a), Concept::Exists(r.clone())), &[m1, m2]);
            }
        }
        for (a2, b2, m2) in &s.sub {
            if a != a2 {
                continue;
            }
            for (c1, c2, cc, m3) in &s.conj {
                if c1 == b && c2 == b2 {
                    c.require("CR6", Axiom::gci(concept(a), concept(cc)), &[m1, m2, m3]);
                }
            }
        }
    }
    // CR7
    for (r, b1, m1) in &s.rr {
        for (r2, b2, m2) in &s.rr {
            if r != r2 {
                continue;
            }
            for (x1, c1, m3) in &s.sub {
                if x1.as_ref() != Some(b1) {
                    continue;
                }
                for (x2, c2, m4) in &s.sub {
                    if x2.as_ref() != Some(b2) {
                        continue;
                    }
                    for (y1, y2, cc, m5) in &s.conj {
                        if y1 == c1 && y2 == c2 {
                            if let Some(cc) = cc {
                                c.require("CR7", Axiom::rr(r.as_str(), cc.as_str()), &[m1, m2, m3, m4, m5]);
                            }
                        }
                    }
                }
            }
        }
    }
    // CR8
    for (a, b, cc, m1) in &s.conj {
        for (t, b2, m2) in &s.sub {
            if t.is_none() && b2 == b {
                c.require("CR8", Axiom::gci(concept(a), concept(cc)), &[m1, m2]);
            }
        }
    }
    // CR9, CR10
    for (a, sr, m1) in &s.ex {
        for (sr2, b, m2) in &s.rr {
            if sr2 != sr {
                continue;
            }
            for (b2, cc, m3) in &s.sub {
                if b2.as_ref() != Some(b) {
                    continue;
                }
                for (s3, r, m4) in &s.ri {
                    if s3 != sr {
                        continue;
                    }
                    for (r2, c2, d, m5) in &s.exq {
                        if r2 == r && c2 == cc {
                            c.require("CR9", Axiom::gci(concept(a), concept(d)), &[m1, m2, m3, m4, m5]);
                        }
                    }
                }
            }
        }
        for (t, b, m2) in &s.sub {
            if t.is_some() {
                continue;
            }
            for (r2, b2, cc, m3) in &s.exq {
                if r2 == sr && b2 == b {
                    c.require("CR10", Axiom::gci(concept(a), concept(cc)), &[m1, m2, m3]);
                }
            }
        }
    }
    // CR11
    for a in &individuals {
        c.require("CR11", Axiom::Ca { concept: Concept::Top, ind: a.clone() }, &[&one]);
    }
    // CR12, CR15, CR16
    for (r, a, b, m1) in &s.ra {
        for (r2, sr, m2) in &s.ri {
            if r2 == r {
                c.require("CR12", Axiom::ra(sr.as_str(), a.as_str(), b.as_str()), &[m1, m2]);
            }
        }
        for (x, b2, m2) in &s.ca {
            if b2 != b {
                continue;
            }
            for (r2, x2, d, m3) in &s.exq {
                if r2 == r && x2 == x {
                    c.require("CR15", Axiom::Ca { concept: concept(d), ind: a.clone() }, &[m1, m2, m3]);
                }
            }
        }
        for (r2, x, m2) in &s.rr {
            if r2 == r {
                c.require("CR16", Axiom::ca(x.as_str(), b.as_str()), &[m1, m2]);
            }
        }
    }
    // CR13, CR14
    for (x, a, m1) in &s.ca {
        for (x2, y, m2) in &s.sub {
            if x2 == x {
                c.require("CR13", Axiom::Ca { concept: concept(y), ind: a.clone() }, &[m1, m2]);
            }
        }
        for (x2, a2, m2) in &s.ca {
            if a2 != a {
                continue;
            }
            for (y1, y2, d, m3) in &s.conj {
                if y1 == x && y2 == x2 {
                    c.require("CR14", Axiom::Ca { concept: concept(d), ind: a.clone() }, &[m1, m2, m3]);
                }
            }
        }
    }
    c.missing.sort();
    c.missing.dedup();
    c.missing
}
