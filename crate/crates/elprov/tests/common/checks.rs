//! Acceptance checks shared by the integration tests and the acceptance
//! runner. Each check returns a short summary on success and a diagnostic
//! on failure.

use std::collections::BTreeSet;

use elprov::canonical::{answer_query, build_canonical_model, compute_rewriting, entails_query, CanonicalOptions};
use elprov::completion::{
    entails_assertion, entails_gci, entails_ri, gci_reduction, reduce_ca_to_gci, reduce_ra_to_ri, saturate,
    saturate_with, Limits, Options, Rule, RuleSet,
};
use elprov::interpretation::{parse_query, query_provenance, DomainElement, Term};
use elprov::ontology::{normalize, parse_ontology, NameSupply};
use elprov::provenance::poly_contains;
use elprov::relevance::{merged_saturate, relevant_variables, relevant_variables_for_axiom};
use elprov::{AnnotatedOntology, Axiom, Concept, Monomial, Polynomial, Variable};
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::corpus::{self, all_assertions, all_monomials, VARIABLES};
use super::oracle::chase;

pub type Check = Result<String, String>;

pub const ORACLE_CORPUS_SEED: u64 = 0x5eed_0009;
pub const ORACLE_CORPUS_SIZE: usize = 500;
pub const RELEVANCE_CORPUS_SEED: u64 = 0x5eed_0004;
pub const RELEVANCE_CORPUS_SIZE: usize = 200;
pub const NORMALIZATION_CORPUS_SEED: u64 = 0x5eed_0012;
pub const NORMALIZATION_CORPUS_SIZE: usize = 200;
const CHASE_CAP: usize = 1_000_000;

pub fn mono(s: &str) -> Monomial {
    s.parse().unwrap()
}

pub fn poly(s: &str) -> Polynomial {
    s.parse().unwrap()
}

pub fn ontology(text: &str) -> AnnotatedOntology {
    parse_ontology(text).unwrap()
}

fn opts() -> Options {
    Options::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The corpus of random normalized ontologies.
pub fn oracle_corpus() -> Vec<AnnotatedOntology> {
    let mut rng = StdRng::seed_from_u64(ORACLE_CORPUS_SEED);
    (0..ORACLE_CORPUS_SIZE).map(|_| corpus::random_normalized(&mut rng)).collect()
}

pub fn relevance_corpus() -> Vec<AnnotatedOntology> {
    let mut rng = StdRng::seed_from_u64(RELEVANCE_CORPUS_SEED);
    (0..RELEVANCE_CORPUS_SIZE).map(|_| corpus::random_normalized(&mut rng)).collect()
}

pub fn normalization_corpus() -> Vec<AnnotatedOntology> {
    let mut rng = StdRng::seed_from_u64(NORMALIZATION_CORPUS_SEED);
    (0..NORMALIZATION_CORPUS_SIZE).map(|_| corpus::random_general(&mut rng)).collect()
}

/// The mayor chain: `Mayor(Brugnaro)` needs all four axioms.
pub fn mayor_chain() -> Check {
    let o = ontology(corpus::MAYOR);
    let goal = Axiom::ca("Mayor", "Brugnaro");
    let full = mono("v1*v2*v3*v4");
    ensure(entails_assertion(&o, &goal, &full, &opts()).map_err(err)?.entailed, || {
        format!("({goal}, {full}) is not entailed")
    })?;
    let vars = ["v1", "v2", "v3", "v4"];
    let mut rejected = 0;
    for m in all_monomials(&vars) {
        if m == full {
            continue;
        }
        ensure(!entails_assertion(&o, &goal, &m, &opts()).map_err(err)?.entailed, || {
            format!("({goal}, {m}) is entailed with a strict sub-monomial")
        })?;
        rejected += 1;
    }
    Ok(format!("entailed with {full}; {rejected} strict sub-monomials rejected"))
}

/// A conjunction over two consequences of the same concept.
pub fn shared_conjuncts() -> Check {
    let o = ontology(corpus::SHARED_CONJUNCTS);
    let (a, c) = (Concept::atomic("A"), Concept::atomic("C"));
    let m = mono("v1*v2*v3");
    ensure(entails_gci(&o, &a, &c, &m, &opts()).map_err(err)?.entailed, || format!("(A ⊑ C, {m}) not entailed"))?;
    let gci = Axiom::gci(a.clone(), c.clone());
    let full = saturate(&o, None, &Limits::default()).map_err(err)?;
    ensure(full.contains(&gci, &m), || format!("saturation lacks (A ⊑ C, {m})"))?;
    let no_cr6 = Options { rules: RuleSet::all().without(Rule::Cr6), ..opts() };
    let control = saturate_with(&o, None, &no_cr6).map_err(err)?;
    ensure(!control.contains(&gci, &m), || "saturation without CR6 still derives A ⊑ C".into())?;
    // Through the reduction the same conjunction is applied at the
    // instance level, so both conjunction rules must be off.
    let no_conj = Options { rules: RuleSet::all().without(Rule::Cr6).without(Rule::Cr14), ..opts() };
    ensure(!entails_gci(&o, &a, &c, &m, &no_conj).map_err(err)?.entailed, || {
        "entails_gci without the conjunction rules still answers true".into()
    })?;
    Ok(format!("(A ⊑ C, {m}) entailed; control without conjunction rules: not entailed"))
}

fn diamond_monomial(n: usize, subset: u32) -> Monomial {
    let mut vars = vec![Variable::new("u").unwrap()];
    for i in 1..=n {
        if subset & (1 << (i - 1)) != 0 {
            vars.push(Variable::new(&format!("u{i}")).unwrap());
            vars.push(Variable::new(&format!("v{i}")).unwrap());
        }
    }
    Monomial::representative(vars)
}

/// The diamond ontology yields one annotation of `B ⊑ A` per subset.
pub fn diamond_blowup() -> Check {
    let n = 3;
    let o = ontology(&corpus::diamonds(n));
    let sat = saturate(&o, None, &Limits::default()).map_err(err)?;
    let got: BTreeSet<Monomial> =
        sat.annotations(&Axiom::gci(Concept::atomic("B"), Concept::atomic("A"))).into_iter().collect();
    let want: BTreeSet<Monomial> = (0..1u32 << n).map(|s| diamond_monomial(n, s)).collect();
    ensure(got == want, || format!("B ⊑ A annotations {got:?}, expected {want:?}"))?;
    Ok(format!("{} annotations on B ⊑ A", got.len()))
}

fn diamond_inclusions(n: usize) -> Vec<Axiom> {
    let mut names = vec!["A".to_string(), "B".to_string()];
    names.extend((1..=n).map(|i| format!("A{i}")));
    let mut out = Vec::new();
    for x in &names {
        for y in &names {
            out.push(Axiom::gci(Concept::atomic(x), Concept::atomic(y)));
        }
    }
    out
}

/// Checks that relevance of every assertion over the fixed vocabulary
/// matches the variables of its full-saturation annotations.
pub fn relevance_matches_saturation_on(o: &AnnotatedOntology) -> Result<(), String> {
    let full = saturate(o, None, &Limits::default()).map_err(err)?;
    for alpha in all_assertions() {
        let union: BTreeSet<Variable> = full.annotations(&alpha).iter().flat_map(|m| m.vars().to_vec()).collect();
        let relevant = relevant_variables(o, &alpha, &opts()).map_err(err)?;
        ensure(relevant == union, || {
            format!("{alpha}: relevant {relevant:?}, union of annotations {union:?}\nontology:\n{o}")
        })?;
    }
    Ok(())
}

/// Merged saturation of the diamond ontology, and relevance agreeing with
/// the variables of the full saturation.
pub fn diamond_relevance() -> Check {
    let n = 3;
    let o = ontology(&corpus::diamonds(n));
    let merged = merged_saturate(&o).map_err(err)?;
    let m = diamond_monomial(n, (1 << n) - 1);
    let inclusions = diamond_inclusions(n);
    for ax in &inclusions {
        ensure(merged.entry(ax).as_ref() == Some(&m), || {
            format!("merged entry of {ax} is {:?}, expected {m}", merged.entry(ax))
        })?;
    }
    let full = saturate(&o, None, &Limits::default()).map_err(err)?;
    for ax in &inclusions {
        let union: BTreeSet<Variable> = full.annotations(ax).iter().flat_map(|m| m.vars().to_vec()).collect();
        let relevant = relevant_variables_for_axiom(&o, ax, &opts()).map_err(err)?;
        ensure(relevant == union, || format!("{ax}: relevant {relevant:?}, union {union:?}"))?;
    }
    let corpus = relevance_corpus();
    for o in &corpus {
        relevance_matches_saturation_on(o)?;
    }
    Ok(format!(
        "{} inclusions carry {m}; relevance matches saturation on the instance and {} random ontologies",
        inclusions.len(),
        corpus.len()
    ))
}

fn aux(m: &str) -> DomainElement {
    DomainElement::aux("R", mono(m))
}

/// The canonical model of the looping-existential ontology.
pub fn looping_canonical_model() -> Check {
    let o = ontology(corpus::LOOPING_EXISTENTIAL);
    let model = build_canonical_model(&o, &Limits::default()).map_err(err)?;
    let a = DomainElement::named("a");
    let want_a: BTreeSet<(DomainElement, Monomial)> = [
        (a.clone(), mono("u2")),
        (a.clone(), mono("u1*v2")),
        (aux("u2*v1"), mono("u2*v1*v2")),
        (aux("u1*v1*v2"), mono("u1*v1*v2")),
        (aux("u2*v1*v2"), mono("u2*v1*v2")),
    ]
    .into_iter()
    .collect();
    let want_r: BTreeSet<(DomainElement, DomainElement, Monomial)> = [
        (a.clone(), a.clone(), mono("u1")),
        (a.clone(), aux("u2*v1"), mono("u2*v1")),
        (a.clone(), aux("u1*v1*v2"), mono("u1*v1*v2")),
        (aux("u2*v1"), aux("u2*v1*v2"), mono("u2*v1*v2")),
        (aux("u1*v1*v2"), aux("u1*v1*v2"), mono("u1*v1*v2")),
        (aux("u2*v1*v2"), aux("u2*v1*v2"), mono("u2*v1*v2")),
    ]
    .into_iter()
    .collect();
    let got_a = model.concept(&"A".into());
    let got_r = model.role(&"R".into());
    ensure(*got_a == want_a, || format!("A extension {got_a:?}, expected {want_a:?}"))?;
    ensure(*got_r == want_r, || format!("R extension {got_r:?}, expected {want_r:?}"))?;
    Ok(format!("{} concept pairs and {} role triples as expected", got_a.len(), got_r.len()))
}

pub const LOOP_QUERY: &str = "R(?x, ?x, ?t) & R(?x, ?y, ?t1) & R(?z, ?y, ?t2)";

/// Query entailment over the looping-existential ontology and the
/// rewriting conditions of its query.
pub fn looping_query() -> Check {
    let o = ontology(corpus::LOOPING_EXISTENTIAL);
    let q = parse_query(LOOP_QUERY).map_err(err)?;
    ensure(entails_query(&o, &q, &poly("u1"), &Limits::default()).map_err(err)?, || "(q, u1) not entailed".into())?;
    ensure(!entails_query(&o, &q, &poly("u2*v1*v2"), &Limits::default()).map_err(err)?, || {
        "(q, u2*v1*v2) entailed".into()
    })?;
    let cond = compute_rewriting(&q);
    let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
    let xz = vec![x.clone(), z.clone()];
    ensure(cond.class_of(&x) == Some(xz.as_slice()), || format!("class of x is {:?}", cond.class_of(&x)))?;
    ensure(cond.class_of(&y) == Some(std::slice::from_ref(&y)), || format!("class of y is {:?}", cond.class_of(&y)))?;
    ensure(cond.forks.len() == 1 && cond.forks[0].pre == xz && cond.forks[0].class == vec![y.clone()], || {
        format!("forks {:?}", cond.forks)
    })?;
    ensure(cond.cyc == [x, z].into_iter().collect(), || format!("cyc {:?}", cond.cyc))?;
    Ok("(q, u1) entailed, (q, u2*v1*v2) not; sim {x,z}, fork ({x,z},[y]), cyc {x,z}".into())
}

/// Two matches with the same monomial add up to coefficient two.
pub fn symmetric_pair_multiplicity() -> Check {
    let o = ontology(corpus::SYMMETRIC_PAIR);
    let q = parse_query("R(?x, ?y, ?t) & R(?y, ?x, ?t2)").map_err(err)?;
    let model = build_canonical_model(&o, &Limits::default()).map_err(err)?;
    let p = query_provenance(&model, &q, Some(&compute_rewriting(&q))).map_err(err)?;
    let want = Polynomial::term(mono("v1*v2"), 2);
    ensure(p == want, || format!("provenance {p}, expected {want}"))?;
    ensure(poly_contains(&poly("v1*v2 + v1*v2"), &p), || "v1*v2 + v1*v2 rejected".into())?;
    ensure(!poly_contains(&Polynomial::term(mono("v1*v2"), 3), &p), || "3*v1*v2 accepted".into())?;
    Ok(format!("provenance {p}"))
}

/// Both mayors contribute one monomial to the query provenance.
pub fn two_mayors_provenance() -> Check {
    let o = ontology(corpus::TWO_MAYORS);
    let q = parse_query("Mayor(?x, ?t)").map_err(err)?;
    let answer = answer_query(&o, &q, &CanonicalOptions::default()).map_err(err)?;
    let want = poly("v1*v3 + v2*v3");
    ensure(answer.provenance == want, || format!("provenance {}, expected {want}", answer.provenance))?;
    Ok(format!("provenance {}", answer.provenance))
}

/// Compares `entails_assertion` with the chase on one ontology. Returns
/// the number of checked pairs and how many of them are entailed.
pub fn oracle_agrees_on(o: &AnnotatedOntology) -> Result<(usize, usize), String> {
    let model = chase(o, CHASE_CAP).ok_or_else(|| format!("chase exceeded its cap on\n{o}"))?;
    let mut checked = 0;
    let mut entailed = 0;
    for alpha in all_assertions() {
        for m in all_monomials(&VARIABLES) {
            let got = entails_assertion(o, &alpha, &m, &opts()).map_err(err)?.entailed;
            let want = model.holds(&alpha, &m);
            ensure(got == want, || format!("({alpha}, {m}): reasoner {got}, chase {want}\nontology:\n{o}"))?;
            checked += 1;
            entailed += usize::from(got);
        }
    }
    Ok((checked, entailed))
}

pub fn oracle_equivalence() -> Check {
    let corpus = oracle_corpus();
    let (mut checked, mut entailed) = (0, 0);
    for o in &corpus {
        let (c, e) = oracle_agrees_on(o)?;
        checked += c;
        entailed += e;
    }
    Ok(format!("{} ontologies, {checked} annotated assertions ({entailed} entailed), 0 disagreements", corpus.len()))
}

/// Compares assertion entailment with the inclusion-based reductions on
/// one ontology.
pub fn reductions_agree_on(o: &AnnotatedOntology) -> Result<usize, String> {
    let sig = o.signature();
    let monomials = all_monomials(&VARIABLES);
    let mut checked = 0;
    for a in o.individuals() {
        let red = reduce_ca_to_gci(o, &a);
        let lhs = Concept::Atomic(red.lhs.clone());
        for b in &sig.concepts {
            let rhs = Concept::Atomic(b.clone());
            let alpha = Axiom::Ca { concept: rhs.clone(), ind: a.clone() };
            for m in &monomials {
                let direct = entails_assertion(o, &alpha, m, &opts()).map_err(err)?.entailed;
                let via = entails_gci(&red.ontology, &lhs, &rhs, m, &opts()).map_err(err)?.entailed
                    || entails_gci(&red.ontology, &Concept::Top, &rhs, m, &opts()).map_err(err)?.entailed;
                ensure(direct == via, || {
                    format!("({alpha}, {m}): direct {direct}, via inclusions {via}\nontology:\n{o}")
                })?;
                checked += 1;
            }
        }
    }
    for a in o.individuals() {
        for b in o.individuals() {
            let red = reduce_ra_to_ri(o, &a, &b);
            for r in &sig.roles {
                let alpha = Axiom::Ra { role: r.clone(), subject: a.clone(), object: b.clone() };
                for m in &monomials {
                    let direct = entails_assertion(o, &alpha, m, &opts()).map_err(err)?.entailed;
                    let via = entails_ri(&red.ontology, &red.sub, r, m, &opts()).map_err(err)?.entailed;
                    ensure(direct == via, || {
                        format!("({alpha}, {m}): direct {direct}, via role inclusion {via}\nontology:\n{o}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

pub fn reductions_crosscheck() -> Check {
    let corpus = oracle_corpus();
    let mut checked = 0;
    for o in &corpus {
        checked += reductions_agree_on(o)?;
    }
    Ok(format!("{} ontologies, {checked} annotated assertions, 0 disagreements", corpus.len()))
}

/// Checks that normalization preserves entailments over the original
/// signature of one ontology.
pub fn normalization_preserves_on(o: &AnnotatedOntology) -> Result<usize, String> {
    let n = normalize(o, &mut NameSupply::for_ontology(o)).map_err(err)?;
    let original = chase(o, CHASE_CAP).ok_or_else(|| format!("chase exceeded its cap on\n{o}"))?;
    let normal = chase(&n, CHASE_CAP).ok_or_else(|| format!("chase exceeded its cap on\n{n}"))?;
    let saturated = saturate(&n, None, &Limits::default()).map_err(err)?;
    let monomials = all_monomials(&VARIABLES);
    let mut checked = 0;
    for alpha in all_assertions() {
        for m in &monomials {
            let want = original.holds(&alpha, m);
            let after = normal.holds(&alpha, m);
            let reasoner = saturated.contains(&alpha, m);
            ensure(want == after && want == reasoner, || {
                format!(
                    "({alpha}, {m}): original {want}, normalized chase {after}, saturation {reasoner}\n\
                     ontology:\n{o}\nnormalized:\n{n}"
                )
            })?;
            checked += 1;
        }
    }
    let sig = o.signature();
    let lhss: Vec<Concept> =
        std::iter::once(Concept::Top).chain(sig.concepts.iter().map(|c| Concept::Atomic(c.clone()))).collect();
    for lhs in &lhss {
        for b in &sig.concepts {
            let rhs = Concept::Atomic(b.clone());
            let red = gci_reduction(o, lhs, &rhs).map_err(err)?;
            let model = chase(&red.ontology, CHASE_CAP).ok_or_else(|| format!("chase exceeded its cap on\n{o}"))?;
            for m in &monomials {
                let want = model.holds(&red.goal, &red.goal_monomial(m));
                let got = entails_gci(&n, lhs, &rhs, m, &opts()).map_err(err)?.entailed;
                ensure(want == got, || {
                    format!("({lhs} ⊑ {rhs}, {m}): original {want}, normalized {got}\nontology:\n{o}\nnormalized:\n{n}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

pub fn normalization_preserves_entailment() -> Check {
    let corpus = normalization_corpus();
    let mut checked = 0;
    for o in &corpus {
        checked += normalization_preserves_on(o)?;
    }
    Ok(format!("{} ontologies, {checked} annotated axioms, 0 disagreements", corpus.len()))
}
