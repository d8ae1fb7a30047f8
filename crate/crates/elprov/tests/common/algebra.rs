//! Randomized algebraic laws of monomials and Trio polynomials.

use std::collections::{BTreeMap, BTreeSet};

use elprov::provenance::{poly_contains, BooleanSemiring, FuzzySemiring, Semiring, SemiringSpec, TrioSemiring};
use elprov::{Monomial, Polynomial, Variable};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const VARS: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];

pub fn monomial() -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0..VARS.len(), 0..4)
        .prop_map(|ix| Monomial::representative(ix.into_iter().map(|i| Variable::new(VARS[i]).unwrap())))
}

pub fn polynomial() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((monomial(), 1u64..4), 0..4).prop_map(|terms| {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    })
}

/// Values for every variable in three target semirings.
#[derive(Debug, Clone)]
pub struct Assignment {
    boolean: Vec<bool>,
    fuzzy: Vec<f64>,
    trio: Vec<Monomial>,
}

fn assignment() -> impl Strategy<Value = Assignment> {
    (
        proptest::collection::vec(any::<bool>(), VARS.len()),
        proptest::collection::vec(0u8..=10, VARS.len()),
        proptest::collection::vec(monomial(), VARS.len()),
    )
        .prop_map(|(boolean, fuzzy, trio)| Assignment {
            boolean,
            fuzzy: fuzzy.into_iter().map(|k| f64::from(k) / 10.0).collect(),
            trio,
        })
}

pub type Case = (Polynomial, Polynomial, Polynomial, Monomial, Monomial, Assignment);

pub fn case() -> impl Strategy<Value = Case> {
    (polynomial(), polynomial(), polynomial(), monomial(), monomial(), assignment())
}

fn index(v: &Variable) -> usize {
    VARS.iter().position(|n| *n == v.as_str()).unwrap()
}

/// The lineage semiring: `None` is zero, sets of variables otherwise, with
/// union as both operations on non-zero values.
fn lineage() -> impl Semiring<Value = Option<BTreeSet<String>>> {
    fn join(a: &Option<BTreeSet<String>>, b: &Option<BTreeSet<String>>) -> Option<BTreeSet<String>> {
        match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => Some(x.union(y).cloned().collect()),
        }
    }
    fn meet(a: &Option<BTreeSet<String>>, b: &Option<BTreeSet<String>>) -> Option<BTreeSet<String>> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.union(y).cloned().collect()),
            _ => None,
        }
    }
    SemiringSpec { zero: None, one: Some(BTreeSet::new()), add: join, mul: meet }
}

type Law = fn(&Case) -> Result<(), TestCaseError>;

fn semiring_laws(c: &Case) -> Result<(), TestCaseError> {
    let (p, q, r, _, _, _) = c;
    let zero = Polynomial::zero();
    let one = Polynomial::one();
    prop_assert_eq!(p.add(q).add(r), p.add(&q.add(r)));
    prop_assert_eq!(p.add(q), q.add(p));
    prop_assert_eq!(&p.add(&zero), p);
    prop_assert_eq!(p.mul(q).mul(r), p.mul(&q.mul(r)));
    prop_assert_eq!(p.mul(q), q.mul(p));
    prop_assert_eq!(&p.mul(&one), p);
    prop_assert_eq!(p.mul(&q.add(r)), p.mul(q).add(&p.mul(r)));
    prop_assert_eq!(p.add(q).mul(r), p.mul(r).add(&q.mul(r)));
    prop_assert!(p.mul(&zero).is_zero());
    Ok(())
}

fn idempotent_product(c: &Case) -> Result<(), TestCaseError> {
    let (_, _, _, m, n, _) = c;
    prop_assert_eq!(&m.product(m), m);
    prop_assert_eq!(m.product(n), n.product(m));
    prop_assert_eq!(m.product(n).product(n), m.product(n));
    let pm = Polynomial::from(m.clone());
    prop_assert_eq!(pm.mul(&pm), pm);
    let vars: BTreeSet<&Variable> = m.vars().iter().chain(n.vars()).collect();
    prop_assert_eq!(m.product(n).len(), vars.len());
    prop_assert!(m.vars().windows(2).all(|w| w[0] < w[1]));
    prop_assert_eq!(m.to_string().parse::<Monomial>().unwrap(), m.clone());
    Ok(())
}

fn containment_order(c: &Case) -> Result<(), TestCaseError> {
    let (p, q, r, _, _, _) = c;
    prop_assert!(poly_contains(p, p));
    if poly_contains(p, q) && poly_contains(q, p) {
        prop_assert_eq!(p, q);
    }
    let pq = p.add(q);
    let pqr = pq.add(r);
    prop_assert!(poly_contains(p, &pq));
    prop_assert!(poly_contains(&pq, &pqr));
    prop_assert!(poly_contains(p, &pqr));
    prop_assert!(poly_contains(&Polynomial::zero(), p));
    if !p.is_zero() {
        prop_assert!(!poly_contains(&p.add(p), p));
    }
    prop_assert_eq!(p.to_string().parse::<Polynomial>().unwrap(), p.clone());
    Ok(())
}

fn homomorphism(c: &Case) -> Result<(), TestCaseError> {
    let (p, q, _, _, _, a) = c;
    let bool_of = |x: &Polynomial| x.evaluate(|v| Some(a.boolean[index(v)]), &BooleanSemiring).unwrap();
    prop_assert_eq!(bool_of(&p.add(q)), bool_of(p) || bool_of(q));
    prop_assert_eq!(bool_of(&p.mul(q)), bool_of(p) && bool_of(q));

    let fuzzy_of = |x: &Polynomial| x.evaluate(|v| Some(a.fuzzy[index(v)]), &FuzzySemiring).unwrap();
    prop_assert_eq!(fuzzy_of(&p.add(q)), fuzzy_of(p).max(fuzzy_of(q)));
    prop_assert_eq!(fuzzy_of(&p.mul(q)), fuzzy_of(p).min(fuzzy_of(q)));

    let lin = lineage();
    let lineage_of = |x: &Polynomial| x.evaluate(|v| Some(Some([v.to_string()].into())), &lin).unwrap();
    prop_assert_eq!(lineage_of(&p.add(q)), lin.add(&lineage_of(p), &lineage_of(q)));
    prop_assert_eq!(lineage_of(&p.mul(q)), lin.mul(&lineage_of(p), &lineage_of(q)));

    let trio_of =
        |x: &Polynomial| x.evaluate(|v| Some(Polynomial::from(a.trio[index(v)].clone())), &TrioSemiring).unwrap();
    prop_assert_eq!(trio_of(&p.add(q)), trio_of(p).add(&trio_of(q)));
    prop_assert_eq!(trio_of(&p.mul(q)), trio_of(p).mul(&trio_of(q)));
    let identity = p.evaluate(|v| Some(Polynomial::from(Monomial::var(v.clone()))), &TrioSemiring).unwrap();
    prop_assert_eq!(&identity, p);
    Ok(())
}

/// Every law with its name.
pub fn laws() -> BTreeMap<&'static str, Law> {
    let mut out: BTreeMap<&'static str, Law> = BTreeMap::new();
    out.insert("semiring laws", semiring_laws);
    out.insert("idempotent product", idempotent_product);
    out.insert("containment order", containment_order);
    out.insert("evaluation homomorphism", homomorphism);
    out
}

/// Runs one law on `cases` random inputs.
pub fn run_law(name: &str, cases: u32) -> Result<(), String> {
    let law = laws()[name];
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&case(), |c| law(&c)).map_err(|e| format!("{name}: {e}"))
}
