//! The `elprov` command-line front end.
//!
//! Every subcommand reads an ontology (`-i FILE`, or standard input when
//! absent), writes its result to standard output (or `-o FILE`) and reports
//! through the exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success; for `entail`/`query`: entailed   |
//! | 1    | not entailed                              |
//! | 2    | usage or parse error                      |
//! | 3    | resource cap exceeded                     |
//!
//! `--json` switches to machine-readable output described by the schema
//! files in `schemas/`. The environment variable `ELPROV_MAX_AXIOMS`
//! overrides the cap on stored derived axioms (and model tuples).
//!
//! # Provenance syntax
//!
//! ```text
//! monomial   ::= "1" | var ("*" var)*
//! polynomial ::= "0" | summand ("+" summand)*
//! summand    ::= [coefficient (" " | "*")] monomial
//! var        ::= [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Repeated variables in a monomial collapse (`v1*v1` is `v1`), and a
//! coefficient is the same as repeating the summand: `2 v1*v2` and
//! `v1*v2 + v1*v2` denote the same polynomial.
//!
//! # Query files
//!
//! A Boolean conjunctive query is a list of atoms joined by `&`, possibly
//! across lines. Concept atoms are `A(t, ?p)`, role atoms `R(t, u, ?p)`;
//! terms are individual names or `?`-variables, all implicitly
//! existentially quantified, and the last argument of every atom is a
//! provenance variable occurring nowhere else.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use elprov::canonical::{answer_query, build_canonical_model, CanonicalError, CanonicalOptions, Rewriting};
use elprov::completion::{entails_axiom, entails_iq, saturate, CompletionError, Entailment, Limits, Options};
use elprov::interpretation::{parse_query, Bcq, QueryError};
use elprov::ontology::{normalize, parse_axiom, parse_instance_query, parse_ontology, NameSupply};
use elprov::relevance::relevant_variables_for_axiom;
use elprov::{AnnotatedOntology, Axiom, Monomial, ParseError, Polynomial};
use serde::Serialize;
use thiserror::Error;

/// Exit code for success, or a positive entailment answer.
pub const EXIT_OK: i32 = 0;
/// Exit code for a negative entailment answer.
pub const EXIT_NOT_ENTAILED: i32 = 1;
/// Exit code for malformed arguments or input files.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for a saturation or model that outgrew its caps.
pub const EXIT_LIMIT: i32 = 3;

/// Environment variable overriding the derived-axiom cap.
pub const MAX_AXIOMS_VAR: &str = "ELPROV_MAX_AXIOMS";

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "elprov", version, about = "Provenance-aware reasoning over ELHr ontologies")]
pub struct Cli {
    /// Ontology file; standard input when absent.
    #[arg(short = 'i', long = "input", global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the result to FILE instead of standard output.
    #[arg(short = 'o', long = "output", global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// The kind of axiom an `entail` call asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// A concept assertion `ca A(a)` or role assertion `ra R(a, b)`.
    Assertion,
    /// A concept inclusion `gci C <= D`.
    Gci,
    /// A role inclusion `ri R <= S`.
    Ri,
    /// A range restriction `rr ran(R) <= A`.
    Rr,
    /// An instance query `C(a)` for any concept `C`.
    Iq,
}

/// One subcommand per invocation.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the normalized ontology.
    Normalize,
    /// Print the saturation of the normalized ontology.
    Saturate {
        /// Keep only monomials with at most K variables (default: all).
        #[arg(long = "k", value_name = "K")]
        k: Option<usize>,
    },
    /// Decide whether the ontology entails an annotated axiom.
    Entail {
        #[arg(long, value_enum)]
        kind: Kind,
        /// The axiom, without annotation.
        #[arg(long)]
        axiom: String,
        /// The monomial, e.g. `v1*v2` or `1`.
        #[arg(long)]
        prov: String,
    },
    /// List the provenance variables relevant for an axiom.
    Relevant {
        #[arg(long)]
        axiom: String,
    },
    /// Decide whether the ontology entails an annotated conjunctive query.
    Query {
        /// Query file.
        #[arg(short = 'q', long = "query", value_name = "FILE")]
        query: PathBuf,
        /// The polynomial, e.g. `u1 + 2 v1*v2`.
        #[arg(long)]
        prov: String,
    },
    /// Print the canonical model.
    Model,
    /// Print a query with its rewriting conditions.
    Rewrite {
        #[arg(short = 'q', long = "query", value_name = "FILE")]
        query: PathBuf,
    },
}

/// Failures of a CLI invocation, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}:{error}")]
    Parse { origin: String, error: ParseError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Limit(String),
    #[error("{path}: {error}")]
    Io { path: String, error: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Limit(_) => EXIT_LIMIT,
            _ => EXIT_USAGE,
        }
    }
}

impl From<CompletionError> for CliError {
    fn from(e: CompletionError) -> Self {
        match e {
            CompletionError::Limit(l) => CliError::Limit(l.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    fn query(source: &str, e: QueryError) -> Self {
        match e {
            QueryError::Parse(error) => CliError::Parse { origin: source.to_string(), error },
            other => CliError::Input(format!("{source}: {other}")),
        }
    }

    fn canonical(source: &str, e: CanonicalError) -> Self {
        match e {
            CanonicalError::Completion(e) => e.into(),
            CanonicalError::Query(e) => CliError::query(source, e),
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Results go to `stdout` (unless `-o` is given), diagnostics
/// to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let limits = match limits_from_env(std::env::var(MAX_AXIOMS_VAR).ok().as_deref()) {
        Ok(l) => l,
        Err(e) => return report(stderr, &e),
    };
    match execute(&cli, &limits) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let written = match &cli.output {
                Some(path) => fs::write(path, &outcome.text)
                    .map_err(|error| CliError::Io { path: path.display().to_string(), error }),
                None => stdout
                    .write_all(outcome.text.as_bytes())
                    .map_err(|error| CliError::Io { path: "<stdout>".to_string(), error }),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => report(stderr, &e),
            }
        }
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

/// The caps, with `max_axioms` taken from the environment value if set.
pub fn limits_from_env(value: Option<&str>) -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Some(v) = value {
        limits.max_axioms = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_AXIOMS_VAR} must be a non-negative integer, got `{v}`")))?;
    }
    Ok(limits)
}

/// What a command produced: the text for the output stream, warnings for
/// the error stream, and the exit code.
struct Outcome {
    text: String,
    warnings: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, warnings: Vec::new(), code: EXIT_OK }
    }
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializing plain data cannot fail");
    s.push('\n');
    s
}

fn read_source(path: Option<&Path>) -> Result<(String, String), CliError> {
    match path {
        Some(p) => {
            let name = p.display().to_string();
            let text = fs::read_to_string(p).map_err(|error| CliError::Io { path: name.clone(), error })?;
            Ok((name, text))
        }
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|error| CliError::Io { path: "<stdin>".to_string(), error })?;
            Ok(("<stdin>".to_string(), text))
        }
    }
}

fn load_ontology(path: Option<&Path>) -> Result<AnnotatedOntology, CliError> {
    let (name, text) = read_source(path)?;
    parse_ontology(&text).map_err(|error| CliError::Parse { origin: name, error })
}

fn load_query(path: &Path) -> Result<Bcq, CliError> {
    let (name, text) = read_source(Some(path))?;
    parse_query(&text).map_err(|e| CliError::query(&name, e))
}

fn parse_monomial(text: &str) -> Result<Monomial, CliError> {
    text.trim().parse().map_err(|e| CliError::Usage(format!("--prov: {e}")))
}

fn parse_polynomial(text: &str) -> Result<Polynomial, CliError> {
    text.trim().parse().map_err(|e| CliError::Usage(format!("--prov: {e}")))
}

fn axiom_arg(text: &str) -> Result<Axiom, CliError> {
    parse_axiom(text).map_err(|error| CliError::Parse { origin: "--axiom".to_string(), error })
}

fn normalized(ontology: &AnnotatedOntology) -> Result<AnnotatedOntology, CliError> {
    let mut supply = NameSupply::for_ontology(ontology);
    normalize(ontology, &mut supply).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Serialize)]
struct AxiomEntry {
    axiom: String,
    monomial: String,
}

#[derive(Serialize)]
struct NormalizeOutput {
    axioms: Vec<AxiomEntry>,
}

#[derive(Serialize)]
struct DerivedEntry {
    axiom: String,
    monomial: String,
    rule: Option<String>,
    derivations: u64,
}

#[derive(Serialize)]
struct SaturateOutput {
    bound: Option<usize>,
    axioms: Vec<DerivedEntry>,
    rule_applications: Vec<u64>,
}

#[derive(Serialize)]
struct EntailOutput {
    kind: &'static str,
    axiom: String,
    monomial: String,
    entailed: bool,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct RelevantOutput {
    axiom: String,
    variables: Vec<String>,
    monomial: String,
}

#[derive(Serialize)]
struct QueryOutput {
    query: String,
    polynomial: String,
    entailed: bool,
    matches: usize,
    provenance: String,
}

#[derive(Serialize)]
struct ForkOutput {
    representative: String,
    pre: Vec<String>,
    class: Vec<String>,
}

#[derive(Serialize)]
struct RewriteOutput {
    query: String,
    classes: Vec<Vec<String>>,
    cyc: Vec<String>,
    forks: Vec<ForkOutput>,
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Assertion => "assertion",
        Kind::Gci => "gci",
        Kind::Ri => "ri",
        Kind::Rr => "rr",
        Kind::Iq => "iq",
    }
}

fn execute(cli: &Cli, limits: &Limits) -> Result<Outcome, CliError> {
    let input = cli.input.as_deref();
    let options = Options::with_limits(*limits);
    match &cli.command {
        Command::Normalize => {
            let normal = normalized(&load_ontology(input)?)?;
            Ok(Outcome::ok(if cli.json {
                let axioms = normal
                    .iter()
                    .map(|a| AxiomEntry { axiom: a.axiom.to_string(), monomial: a.annotation.to_string() })
                    .collect();
                json_text(&NormalizeOutput { axioms })
            } else {
                normal.to_string()
            }))
        }
        Command::Saturate { k } => {
            let normal = normalized(&load_ontology(input)?)?;
            let sat = saturate(&normal, *k, limits)?;
            Ok(Outcome::ok(if cli.json {
                let axioms = sat
                    .axioms()
                    .into_iter()
                    .map(|d| DerivedEntry {
                        axiom: d.axiom.axiom.to_string(),
                        monomial: d.axiom.annotation.to_string(),
                        rule: d.rule.map(|r| r.to_string()),
                        derivations: d.derivations,
                    })
                    .collect();
                json_text(&SaturateOutput {
                    bound: sat.bound(),
                    axioms,
                    rule_applications: sat.stats().rule_applications.clone(),
                })
            } else {
                sat.to_string()
            }))
        }
        Command::Entail { kind, axiom, prov } => {
            let ontology = load_ontology(input)?;
            let m = parse_monomial(prov)?;
            let (shown, answer) = if *kind == Kind::Iq {
                let (concept, ind) = parse_instance_query(axiom)
                    .map_err(|error| CliError::Parse { origin: "--axiom".to_string(), error })?;
                (format!("{concept}({ind})"), entails_iq(&ontology, &concept, &ind, &m, &options)?)
            } else {
                let ax = axiom_arg(axiom)?;
                check_kind(*kind, &ax)?;
                (ax.to_string(), entails_axiom(&ontology, &ax, &m, &options)?)
            };
            Ok(entail_outcome(cli.json, *kind, shown, &m, answer))
        }
        Command::Relevant { axiom } => {
            let ontology = load_ontology(input)?;
            let ax = axiom_arg(axiom)?;
            let vars = relevant_variables_for_axiom(&ontology, &ax, &options)?;
            let monomial = Monomial::representative(vars.iter().cloned());
            let names: Vec<String> = vars.iter().map(ToString::to_string).collect();
            Ok(Outcome::ok(if cli.json {
                json_text(&RelevantOutput { axiom: ax.to_string(), variables: names, monomial: monomial.to_string() })
            } else {
                names.iter().map(|v| format!("{v}\n")).collect()
            }))
        }
        Command::Query { query, prov } => {
            let ontology = load_ontology(input)?;
            let q = load_query(query)?;
            let p = parse_polynomial(prov)?;
            let source = query.display().to_string();
            let answer = answer_query(&ontology, &q, &CanonicalOptions::with_limits(*limits))
                .map_err(|e| CliError::canonical(&source, e))?;
            let entailed = answer.entails(&p);
            let text = if cli.json {
                json_text(&QueryOutput {
                    query: q.to_string(),
                    polynomial: p.to_string(),
                    entailed,
                    matches: answer.matches,
                    provenance: answer.provenance.to_string(),
                })
            } else {
                format!(
                    "{}\nmatches: {}\nprovenance: {}\n",
                    if entailed { "entailed" } else { "not entailed" },
                    answer.matches,
                    answer.provenance
                )
            };
            Ok(Outcome { text, warnings: Vec::new(), code: if entailed { EXIT_OK } else { EXIT_NOT_ENTAILED } })
        }
        Command::Model => {
            let model = build_canonical_model(&load_ontology(input)?, limits)?;
            Ok(Outcome::ok(if cli.json { json_text(&model.to_json()) } else { model.to_string() }))
        }
        Command::Rewrite { query } => {
            let rewriting = Rewriting::new(load_query(query)?);
            Ok(Outcome::ok(if cli.json {
                let c = &rewriting.conditions;
                let strings = |ts: &[elprov::interpretation::Term]| ts.iter().map(ToString::to_string).collect();
                json_text(&RewriteOutput {
                    query: rewriting.query.to_string(),
                    classes: c.sim.iter().map(|class| strings(class)).collect(),
                    cyc: c.cyc.iter().map(ToString::to_string).collect(),
                    forks: c
                        .forks
                        .iter()
                        .map(|f| ForkOutput {
                            representative: f.representative.to_string(),
                            pre: strings(&f.pre),
                            class: strings(&f.class),
                        })
                        .collect(),
                })
            } else {
                rewriting.to_string()
            }))
        }
    }
}

fn check_kind(kind: Kind, axiom: &Axiom) -> Result<(), CliError> {
    let fits = match kind {
        Kind::Assertion => axiom.is_assertion(),
        Kind::Gci => matches!(axiom, Axiom::Gci { .. }),
        Kind::Ri => matches!(axiom, Axiom::Ri { .. }),
        Kind::Rr => matches!(axiom, Axiom::Rr { .. }),
        Kind::Iq => true,
    };
    if fits {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--kind {} does not match axiom `{axiom}`", kind_name(kind))))
    }
}

fn entail_outcome(json: bool, kind: Kind, axiom: String, m: &Monomial, answer: Entailment) -> Outcome {
    let code = if answer.entailed { EXIT_OK } else { EXIT_NOT_ENTAILED };
    let text = if json {
        json_text(&EntailOutput {
            kind: kind_name(kind),
            axiom,
            monomial: m.to_string(),
            entailed: answer.entailed,
            warnings: answer.warnings.clone(),
        })
    } else if answer.entailed {
        "entailed\n".to_string()
    } else {
        "not entailed\n".to_string()
    };
    Outcome { text, warnings: answer.warnings, code }
}
