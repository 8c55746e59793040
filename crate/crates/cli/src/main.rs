//! Command-line front end for the `qspace` library.
//!
//! Subcommands load JSON artifacts, run the corresponding library checks, and
//! emit JSON, text, or DOT. Identical inputs produce byte-identical outputs.
//!
//! Exit codes: `0` all checks pass, `1` a law or cross-check fails (the
//! report names the law and a witness), `2` I/O or schema problem, `3`
//! enumeration budget exceeded, `4` a class-stability precondition fails
//! (the report names the violating weight).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use qspace::budget::Budget;
use qspace::canext::{CanExt, ClassSpec};
use qspace::dot::concepts_dot;
use qspace::error::Error;
use qspace::funext::{check_exchange, FunctorExtension};
use qspace::json::{
    self, AutomatonDoc, AutomatonReportDoc, CompletionConfigDoc, CompletionDoc, ConceptEntry,
    ConceptsDoc, ExtendReportDoc, FunctorDoc, LiftOutcome, OutcomeEntry, QuantaleDoc,
    RelationDoc, SpaceDoc,
};
use qspace::limits::{observability, reachability, Battery};
use qspace::macneille::Completion;
use qspace::oracle::{oracle_backward_behaviour, oracle_forward_behaviour, oracle_concepts};
use qspace::quantale::{check_quantale_laws, QVal, Quantale, QuantaleKind, WordSet};
use qspace::random::sweep_relation_laws;
use qspace::space::{transitive_closure_space, Mat};

type Result<T> = std::result::Result<T, Error>;

#[derive(Parser)]
#[command(
    name = "qspace",
    version,
    about = "Exact checks and constructions for quantale-valued spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a quantale, space, or relation file; optionally run seeded
    /// random law sweeps over a quantale.
    Check {
        /// Quantale, space, or relation JSON file (detected by its fields).
        input: Option<PathBuf>,
        /// Quantale shorthand (bool2 | lawvere:N | similarity:N |
        /// language:SYMBOLS:MAXLEN) or inline JSON description.
        #[arg(long)]
        quantale: Option<String>,
        /// Run this many rounds of randomized relation-law checks.
        #[arg(long)]
        sweep: Option<usize>,
        /// Seed for the randomized sweeps.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Largest space size used in sweeps.
        #[arg(long, default_value_t = 4)]
        points: usize,
        /// Uniform cap for all enumeration budgets.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Enumerate the concepts of a context file.
    Concepts {
        /// Relation JSON file read as a context.
        input: PathBuf,
        /// Write the concept list here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write a DOT rendering of the concept order here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Cross-check against the brute-force concept oracle.
        #[arg(long)]
        oracle: bool,
        /// Uniform cap for all enumeration budgets.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Build the completion of a space from filter and ideal classes.
    Canext {
        /// Completion config JSON file (space plus classes), or a space file
        /// combined with --filters/--ideals.
        input: PathBuf,
        /// Filter class: all | representables | finLimPreserving.
        #[arg(long)]
        filters: Option<String>,
        /// Ideal class: all | representables | finLimPreserving.
        #[arg(long)]
        ideals: Option<String>,
        /// Write the completion report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Uniform cap for all enumeration budgets.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Extend a map of spaces to the completions on both ends and check the
    /// induced adjunctions.
    Extend {
        /// Functor JSON file (point assignment).
        #[arg(long)]
        functor: PathBuf,
        /// Completion config for the source space.
        #[arg(long)]
        source: PathBuf,
        /// Completion config for the target space.
        #[arg(long)]
        target: PathBuf,
        /// Write the extension report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Uniform cap for all enumeration budgets.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Observability and reachability weights of a word-weighted automaton.
    Automata {
        /// Automaton JSON file.
        input: PathBuf,
        /// Cross-check the weights against the word-splitting oracle.
        #[arg(long)]
        oracle: bool,
        /// Write the behaviour report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Uniform cap for all enumeration budgets.
        #[arg(long)]
        budget: Option<u128>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Map an error to the documented exit code.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::Schema(_)
        | Error::InvalidDesc(_)
        | Error::UnknownPoint(_)
        | Error::InvalidCase(_)
        | Error::Shape(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::ClassNotClosed { .. } => 4,
        _ => 1,
    }
}

fn budget_of(cap: Option<u128>) -> Budget {
    cap.map(Budget::uniform).unwrap_or_default()
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Print a document to stdout, or write it to `path` when given.
fn emit<T: serde::Serialize>(doc: &T, path: Option<&Path>) -> Result<()> {
    let text = json::to_string(doc)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_quantale(text: &str) -> Result<Quantale> {
    let t = text.trim();
    if t.starts_with('{') {
        let kind: QuantaleKind = serde_json::from_str(t)?;
        return Quantale::new(kind);
    }
    let parts: Vec<&str> = t.split(':').collect();
    let bad = || Error::InvalidDesc(format!("unrecognized quantale shorthand {t:?}"));
    let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
    match parts.as_slice() {
        ["bool2"] => Ok(Quantale::bool2()),
        ["lawvere", n] => Ok(Quantale::lawvere(num(n)?)),
        ["similarity", n] => Ok(Quantale::similarity(num(n)?)),
        ["language", symbols, max_len] => {
            let alphabet: Vec<char> = symbols.chars().collect();
            Quantale::language(&alphabet, num(max_len)? as usize)
        }
        _ => Err(bad()),
    }
}

fn parse_class(text: &str) -> Result<ClassSpec> {
    serde_json::from_value(serde_json::Value::String(text.to_string()))
        .map_err(|_| Error::Schema(format!("unknown class {text:?}; expected all | representables | finLimPreserving")))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check {
            input,
            quantale,
            sweep,
            seed,
            points,
            budget,
        } => cmd_check(input, quantale, sweep, seed, points, budget_of(budget)),
        Command::Concepts {
            input,
            json,
            dot,
            oracle,
            budget,
        } => cmd_concepts(&input, json.as_deref(), dot.as_deref(), oracle, budget_of(budget)),
        Command::Canext {
            input,
            filters,
            ideals,
            json,
            budget,
        } => cmd_canext(&input, filters, ideals, json.as_deref(), budget_of(budget)),
        Command::Extend {
            functor,
            source,
            target,
            json,
            budget,
        } => cmd_extend(&functor, &source, &target, json.as_deref(), budget_of(budget)),
        Command::Automata {
            input,
            oracle,
            json,
            budget,
        } => cmd_automata(&input, oracle, json.as_deref(), budget_of(budget)),
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(
    input: Option<PathBuf>,
    quantale: Option<String>,
    sweep: Option<usize>,
    seed: u64,
    points: usize,
    budget: Budget,
) -> Result<u8> {
    let mut failed = false;

    if let Some(path) = &input {
        failed |= !check_file(path, &budget)?;
    }

    if let Some(rounds) = sweep {
        let q = match &quantale {
            Some(text) => Arc::new(parse_quantale(text)?),
            None => {
                return Err(Error::Schema(
                    "--sweep needs --quantale to know what to sweep over".into(),
                ))
            }
        };
        match sweep_relation_laws(&q, rounds, points.max(1), seed, &budget) {
            Ok(report) => println!(
                "sweep ok: {} rounds, {} law checks (seed {seed})",
                report.rounds, report.checks
            ),
            Err(e @ Error::SweepFailed { .. }) => {
                println!("FAIL: {e}");
                failed = true;
            }
            Err(e) => return Err(e),
        }
    } else if let (Some(text), None) = (&quantale, &input) {
        let q = parse_quantale(text)?;
        failed |= !report_quantale_laws(&q, &budget)?;
    }

    if input.is_none() && quantale.is_none() {
        return Err(Error::Schema(
            "nothing to check: give an input file or --quantale".into(),
        ));
    }
    Ok(u8::from(failed))
}

/// Detect the document type by its fields and run the matching validation.
fn check_file(path: &Path, budget: &Budget) -> Result<bool> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("matrix") {
        let doc: RelationDoc = json::from_str(&text)?;
        match doc.build() {
            Ok(rel) => {
                println!(
                    "relation ok: {}x{} between validated spaces",
                    rel.source().len(),
                    rel.target().len()
                );
                Ok(true)
            }
            Err(e) => law_failure(e),
        }
    } else if has("hom") || has("points") {
        let doc: SpaceDoc = json::from_str(&text)?;
        match doc.build() {
            Ok(space) => {
                println!("space ok: {} points", space.len());
                Ok(true)
            }
            Err(e) => law_failure(e),
        }
    } else if has("quantale") {
        let doc: QuantaleDoc = json::from_str(&text)?;
        let q = Quantale::new(doc.quantale)?;
        report_quantale_laws(&q, budget)
    } else {
        Err(Error::Schema(
            "unrecognized file: expected a quantale, space, or relation document".into(),
        ))
    }
}

/// Structural law violations print a report and flip the exit code; genuine
/// input problems propagate as errors.
fn law_failure(e: Error) -> Result<bool> {
    if exit_code(&e) == 1 {
        println!("FAIL: {e}");
        Ok(false)
    } else {
        Err(e)
    }
}

fn report_quantale_laws(q: &Quantale, budget: &Budget) -> Result<bool> {
    let report = check_quantale_laws(q, budget)?;
    println!(
        "quantale {}: carrier {}, {} triples checked",
        report.quantale, report.carrier_size, report.checked_triples
    );
    let mut ok = true;
    for law in &report.laws {
        if law.holds {
            println!("  {}: ok", law.name);
        } else {
            ok = false;
            let witness = law
                .witness
                .as_ref()
                .map(|vals| {
                    vals.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .unwrap_or_default();
            println!("  {}: FAIL at ({})", law.name, witness);
        }
    }
    match &report.noncommutative_witness {
        Some((a, b)) => println!("  commutativity: no ({a}·{b} differs from {b}·{a})"),
        None => println!("  commutativity: yes"),
    }
    Ok(ok)
}

// ---------------------------------------------------------------------------
// concepts
// ---------------------------------------------------------------------------

fn cmd_concepts(
    input: &Path,
    json_out: Option<&Path>,
    dot_out: Option<&Path>,
    oracle: bool,
    budget: Budget,
) -> Result<u8> {
    let doc: RelationDoc = json::from_str(&read(input)?)?;
    let rel = doc.build()?;
    let completion = Completion::new(rel, &budget)?;

    if oracle {
        let ctx = completion.context();
        let expected = oracle_concepts(
            ctx.source().quantale(),
            &ctx.matrix().to_rows(),
            &budget,
        )?;
        let got: Vec<(Vec<QVal>, Vec<QVal>)> = completion
            .concepts()
            .iter()
            .map(|c| (c.extent.vals().to_vec(), c.intent.vals().to_vec()))
            .collect();
        if got != expected {
            println!(
                "FAIL: concept enumeration disagrees with the oracle ({} vs {} concepts)",
                got.len(),
                expected.len()
            );
            return Ok(1);
        }
    }

    let ctx = completion.context();
    let out = ConceptsDoc {
        format_version: json::FORMAT_VERSION,
        quantale: ctx.source().quantale().kind().clone(),
        source_points: ctx.source().points().to_vec(),
        target_points: ctx.target().points().to_vec(),
        concepts: completion
            .concepts()
            .iter()
            .map(|c| ConceptEntry {
                extent: c.extent.vals().to_vec(),
                intent: c.intent.vals().to_vec(),
            })
            .collect(),
        covering: completion.covering_pairs(),
    };
    emit(&out, json_out)?;
    if let Some(p) = dot_out {
        fs::write(p, concepts_dot(&completion))?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// canext
// ---------------------------------------------------------------------------

fn cmd_canext(
    input: &Path,
    filters: Option<String>,
    ideals: Option<String>,
    json_out: Option<&Path>,
    budget: Budget,
) -> Result<u8> {
    let text = read(input)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let (space, fclass, jclass) = if value.get("space").is_some() {
        let cfg: CompletionConfigDoc = json::from_str(&text)?;
        let q = Arc::new(Quantale::new(cfg.quantale.clone())?);
        (cfg.space.build(&q)?, cfg.filters, cfg.ideals)
    } else {
        let doc: SpaceDoc = json::from_str(&text)?;
        let f = parse_class(filters.as_deref().unwrap_or("finLimPreserving"))?;
        let j = parse_class(ideals.as_deref().unwrap_or("finLimPreserving"))?;
        (doc.build()?, f, j)
    };

    let ext = CanExt::new(&space, fclass, jclass, &budget)?;
    let checks = vec![
        OutcomeEntry {
            label: "compactness".into(),
            holds: ext.check_compactness()?,
        },
        OutcomeEntry {
            label: "density".into(),
            holds: ext.check_density()?,
        },
        OutcomeEntry {
            label: "embeddingDistances".into(),
            holds: ext.check_embedding_distances()?,
        },
        OutcomeEntry {
            label: "intermediateYoneda".into(),
            holds: ext.check_intermediate_yoneda()?,
        },
    ];
    let (fp, jp) = ext.check_embedding_preservation(Battery::finite(), &budget)?;
    let to_entries = |outcomes: Vec<qspace::canext::PreservationOutcome>| {
        outcomes
            .into_iter()
            .map(|o| OutcomeEntry {
                label: o.label,
                holds: o.preserved,
            })
            .collect::<Vec<_>>()
    };
    let failed = checks.iter().any(|c| !c.holds);
    let out = CompletionDoc {
        format_version: json::FORMAT_VERSION,
        quantale: space.quantale().kind().clone(),
        points: space.points().to_vec(),
        filter_class: ext.filter_class(),
        ideal_class: ext.ideal_class(),
        filters: ext.filters().iter().map(|f| f.vals().to_vec()).collect(),
        ideals: ext.ideals().iter().map(|j| j.vals().to_vec()).collect(),
        concepts: ext
            .completion()
            .concepts()
            .iter()
            .map(|c| ConceptEntry {
                extent: c.extent.vals().to_vec(),
                intent: c.intent.vals().to_vec(),
            })
            .collect(),
        embedding: ext.embed().indices().to_vec(),
        checks,
        filter_preservation: to_entries(fp),
        ideal_preservation: to_entries(jp),
    };
    emit(&out, json_out)?;
    Ok(u8::from(failed))
}

// ---------------------------------------------------------------------------
// extend
// ---------------------------------------------------------------------------

fn build_canext(path: &Path, budget: &Budget) -> Result<(Arc<qspace::space::FinSpace>, CanExt)> {
    let cfg: CompletionConfigDoc = json::from_str(&read(path)?)?;
    let q = Arc::new(Quantale::new(cfg.quantale.clone())?);
    let space = cfg.space.build(&q)?;
    let ext = CanExt::new(&space, cfg.filters, cfg.ideals, budget)?;
    Ok((space, ext))
}

fn cmd_extend(
    functor: &Path,
    source: &Path,
    target: &Path,
    json_out: Option<&Path>,
    budget: Budget,
) -> Result<u8> {
    let (src_space, src_ext) = build_canext(source, &budget)?;
    let (tgt_space, tgt_ext) = build_canext(target, &budget)?;
    let fdoc: FunctorDoc = json::from_str(&read(functor)?)?;
    let g = fdoc.build(src_space, tgt_space)?;
    let ext = FunctorExtension::new(g, src_ext, tgt_ext)?;

    let exchange = check_exchange(ext.map(), &budget)?;
    let extends_base = ext.check_extends_base()?;
    let lift_outcome = |r: Result<Vec<usize>>| -> Result<LiftOutcome> {
        match r {
            Ok(_) => Ok(LiftOutcome {
                closed: true,
                violator: None,
            }),
            Err(Error::ClassNotClosed { member, .. }) => Ok(LiftOutcome {
                closed: false,
                violator: Some(member),
            }),
            Err(e) => Err(e),
        }
    };
    let filter_lift = lift_outcome(ext.restricted_filter_indices())?;
    let ideal_lift = lift_outcome(ext.restricted_ideal_indices())?;
    let both_closed = filter_lift.closed && ideal_lift.closed;
    // The lift-based checks only make sense once both classes survived
    // restriction; otherwise the lifts are undefined.
    let (virtual_adjoints, adjunctions, lift_functorial) = if both_closed {
        (
            Some(ext.check_virtual_adjoints()?),
            Some(ext.check_adjunctions()?),
            Some(ext.check_lift_functorial()?),
        )
    } else {
        (None, None, None)
    };

    let out = ExtendReportDoc {
        format_version: json::FORMAT_VERSION,
        exchange,
        extends_base,
        filter_lift: filter_lift.clone(),
        ideal_lift: ideal_lift.clone(),
        virtual_adjoints,
        adjunctions,
        lift_functorial,
    };
    emit(&out, json_out)?;

    if !both_closed {
        let (side, violator) = if !filter_lift.closed {
            ("filter", filter_lift.violator.unwrap_or_default())
        } else {
            ("ideal", ideal_lift.violator.unwrap_or_default())
        };
        eprintln!("error: {side} class is not stable under restriction; violator {violator}");
        return Ok(4);
    }
    let all_hold = exchange
        && extends_base
        && virtual_adjoints.unwrap_or(false)
        && adjunctions.unwrap_or(false)
        && lift_functorial.unwrap_or(false);
    Ok(u8::from(!all_hold))
}

// ---------------------------------------------------------------------------
// automata
// ---------------------------------------------------------------------------

fn word_set(v: &QVal) -> Result<WordSet> {
    match v {
        QVal::Words(ws) => Ok(ws.clone()),
        other => Err(Error::Schema(format!(
            "expected a word set, found {other}"
        ))),
    }
}

fn cmd_automata(
    input: &Path,
    oracle: bool,
    json_out: Option<&Path>,
    _budget: Budget,
) -> Result<u8> {
    let doc: AutomatonDoc = json::from_str(&read(input)?)?;
    let (alphabet, max_len) = match &doc.quantale {
        QuantaleKind::Language { alphabet, max_len } => (alphabet.clone(), *max_len),
        other => {
            return Err(Error::Schema(format!(
                "automata need a language quantale, found {other:?}"
            )))
        }
    };
    let q = Arc::new(Quantale::new(doc.quantale.clone())?);
    let n = doc.states.len();
    let seed = Mat::from_rows(doc.transitions.clone())?;
    let space = transitive_closure_space(&q, doc.states.clone(), &seed)?;
    let obs = observability(&space, &doc.final_states)?;
    let reach = reachability(&space, &doc.initial)?;

    if oracle {
        let closed: Vec<Vec<WordSet>> = (0..n)
            .map(|i| (0..n).map(|j| word_set(space.hom(i, j))).collect())
            .collect::<Result<_>>()?;
        let finals: Vec<WordSet> = doc.final_states.iter().map(word_set).collect::<Result<_>>()?;
        let initials: Vec<WordSet> = doc.initial.iter().map(word_set).collect::<Result<_>>()?;
        for s in 0..n {
            let expect = oracle_forward_behaviour(&closed, &finals, s, &alphabet, max_len);
            if word_set(obs.at(s))? != expect {
                println!(
                    "FAIL: observability at state {} disagrees with the word-splitting oracle",
                    doc.states[s]
                );
                return Ok(1);
            }
            let expect = oracle_backward_behaviour(&closed, &initials, s, &alphabet, max_len);
            if word_set(reach.at(s))? != expect {
                println!(
                    "FAIL: reachability at state {} disagrees with the word-splitting oracle",
                    doc.states[s]
                );
                return Ok(1);
            }
        }
    }

    let out = AutomatonReportDoc {
        format_version: json::FORMAT_VERSION,
        states: doc.states.clone(),
        transitions: space.hom_mat().to_rows(),
        observability: obs.vals().to_vec(),
        reachability: reach.vals().to_vec(),
        oracle_checked: oracle,
    };
    emit(&out, json_out)?;
    Ok(0)
}
