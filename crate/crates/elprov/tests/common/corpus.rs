//! Seeded random ontologies and the small worked ontologies used by the
//! golden tests.

use elprov::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, Monomial, Variable};
use rand::rngs::StdRng;
use rand::Rng;

pub const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
pub const ROLES: [&str; 2] = ["R", "S"];
pub const INDIVIDUALS: [&str; 3] = ["a", "b", "c"];
pub const VARIABLES: [&str; 4] = ["v1", "v2", "v3", "v4"];
pub const MAX_AXIOMS: usize = 6;

/// Mayor ontology: the mayor's predecessor was a mayor too.
pub const MAYOR: &str = "\
ra mayor(Venice, Orsoni) @ v1
ra predecessor(Brugnaro, Orsoni) @ v2
gci some(predecessor, Mayor) <= Mayor @ v3
rr ran(mayor) <= Mayor @ v4
";

/// Two mayors of Venice, each recorded by a separate source.
pub const TWO_MAYORS: &str = "\
ra mayor(Venice, Brugnaro) @ v1
ra mayor(Venice, Orsoni) @ v2
rr ran(mayor) <= Mayor @ v3
";

/// A conjunction whose two conjuncts are both derived from `A`.
pub const SHARED_CONJUNCTS: &str = "\
gci A <= B1 @ v1
gci A <= B2 @ v2
gci and(B1, B2) <= C @ v3
";

/// A self-loop, a fact, an existential and a range restriction feeding it
/// back into the existential.
pub const LOOPING_EXISTENTIAL: &str = "\
ra R(a, a) @ u1
ca A(a) @ u2
gci A <= some(R) @ v1
rr ran(R) <= A @ v2
";

/// Two individuals related in both directions.
pub const SYMMETRIC_PAIR: &str = "\
ra R(a, b) @ v1
ra R(b, a) @ v2
";

/// The diamond ontology `{A ⊑ A_i (v_i), A_i ⊑ B (u_i) | 1 ≤ i ≤ n} ∪
/// {B ⊑ A (u)}` whose saturation carries one annotation of `B ⊑ A` per
/// subset of the diamonds.
pub fn diamonds(n: usize) -> String {
    let mut text = String::new();
    for i in 1..=n {
        text.push_str(&format!("gci A <= A{i} @ v{i}\ngci A{i} <= B @ u{i}\n"));
    }
    text.push_str("gci B <= A @ u\n");
    text
}

fn pick<'a>(rng: &mut StdRng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn annotation(rng: &mut StdRng) -> Monomial {
    if rng.gen_bool(0.15) {
        Monomial::one()
    } else {
        Monomial::var(Variable::new(pick(rng, &VARIABLES)).unwrap())
    }
}

fn name(rng: &mut StdRng) -> Concept {
    Concept::atomic(pick(rng, &CONCEPTS))
}

fn basic(rng: &mut StdRng) -> Concept {
    if rng.gen_bool(0.15) {
        Concept::Top
    } else {
        name(rng)
    }
}

fn assertion(rng: &mut StdRng) -> Axiom {
    if rng.gen_bool(0.55) {
        Axiom::ca(pick(rng, &CONCEPTS), pick(rng, &INDIVIDUALS))
    } else {
        Axiom::ra(pick(rng, &ROLES), pick(rng, &INDIVIDUALS), pick(rng, &INDIVIDUALS))
    }
}

fn normal_axiom(rng: &mut StdRng) -> Axiom {
    match rng.gen_range(0..100) {
        0..=29 => assertion(rng),
        30..=44 => Axiom::gci(basic(rng), name(rng)),
        45..=54 => Axiom::gci(Concept::and(basic(rng), basic(rng)), name(rng)),
        55..=69 => Axiom::gci(basic(rng), Concept::exists(pick(rng, &ROLES))),
        70..=81 => Axiom::gci(Concept::some(pick(rng, &ROLES), basic(rng)), name(rng)),
        82..=90 => Axiom::ri(pick(rng, &ROLES), pick(rng, &ROLES)),
        _ => Axiom::rr(pick(rng, &ROLES), pick(rng, &CONCEPTS)),
    }
}

fn general_concept(rng: &mut StdRng, depth: usize) -> Concept {
    if depth == 0 {
        return basic(rng);
    }
    match rng.gen_range(0..10) {
        0..=2 => basic(rng),
        3..=5 => Concept::and(general_concept(rng, depth - 1), general_concept(rng, depth - 1)),
        6..=8 => Concept::some(pick(rng, &ROLES), general_concept(rng, depth - 1)),
        _ => Concept::exists(pick(rng, &ROLES)),
    }
}

fn general_axiom(rng: &mut StdRng) -> Axiom {
    match rng.gen_range(0..100) {
        0..=29 => assertion(rng),
        30..=69 => {
            let rhs = if rng.gen_bool(0.7) { name(rng) } else { Concept::exists(pick(rng, &ROLES)) };
            Axiom::gci(general_concept(rng, 2), rhs)
        }
        70..=84 => Axiom::ri(pick(rng, &ROLES), pick(rng, &ROLES)),
        _ => Axiom::rr(pick(rng, &ROLES), pick(rng, &CONCEPTS)),
    }
}

fn build(rng: &mut StdRng, axiom: fn(&mut StdRng) -> Axiom) -> AnnotatedOntology {
    let n = rng.gen_range(1..=MAX_AXIOMS);
    let mut o = AnnotatedOntology::new();
    // At least one assertion, so that there is an individual to ask about.
    let first = assertion(rng);
    o.insert(AnnotatedAxiom::new(first, annotation(rng)));
    while o.len() < n {
        let ax = axiom(rng);
        o.insert(AnnotatedAxiom::new(ax, annotation(rng)));
    }
    o
}

/// A random ontology in normal form over [`CONCEPTS`], [`ROLES`],
/// [`INDIVIDUALS`] and [`VARIABLES`].
pub fn random_normalized(rng: &mut StdRng) -> AnnotatedOntology {
    build(rng, normal_axiom)
}

/// A random ontology with nested left-hand sides.
pub fn random_general(rng: &mut StdRng) -> AnnotatedOntology {
    build(rng, general_axiom)
}

/// Every monomial over `vars`.
pub fn all_monomials(vars: &[&str]) -> Vec<Monomial> {
    (0u32..1 << vars.len())
        .map(|mask| {
            Monomial::representative(
                vars.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| Variable::new(v).unwrap()),
            )
        })
        .collect()
}

/// Every concept and role assertion over the fixed vocabulary.
pub fn all_assertions() -> Vec<Axiom> {
    let mut out = Vec::new();
    for c in CONCEPTS {
        for a in INDIVIDUALS {
            out.push(Axiom::ca(c, a));
        }
    }
    for r in ROLES {
        for a in INDIVIDUALS {
            for b in INDIVIDUALS {
                out.push(Axiom::ra(r, a, b));
            }
        }
    }
    out
}
