//! Reasoning over ELHr ontologies whose axioms carry provenance monomials.
//!
//! * [`provenance`]: monomials, Trio polynomials and semiring evaluation.
//! * [`ontology`]: the ontology AST, parser and normalizer.
//! * [`completion`]: rule saturation and annotated entailment.
//! * [`relevance`]: which provenance variables a consequence depends on.
//! * [`interpretation`]: finite annotated interpretations and query matching.
//! * [`canonical`]: canonical models and query rewriting for conjunctive
//!   query entailment.

pub mod canonical;
pub mod completion;
pub mod interpretation;
pub mod ontology;
pub mod provenance;
pub mod relevance;
pub mod syntax;

pub use ontology::{AnnotatedAxiom, AnnotatedOntology, Axiom, Concept, ConceptName, IndividualName, RoleName};
pub use provenance::{Monomial, Polynomial, Variable};
pub use syntax::{ParseError, ParseErrorKind};
