use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use evstruct::enumeration::{
    brute_force_es, brute_force_full_graph_count, brute_force_posets, count_posets,
    count_table_sharded, enumerate_event_structures, Limits, Shard,
};
use evstruct::{
    build_fg_representation, build_representation, check_representation, es_to_fullgraph,
    fullgraph_to_es, is_full_graph, is_injective_nonempty, validate_es, EsVerdict, FgReason,
};
use serde_json::json;

use crate::doc::{CountKind, CountMethod, CountReport, CountRow, Document, ShardInfo};
use crate::dot;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "evstruct", version, about = "Event structures, set-family representations and full graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the event-structure axioms and list every violation found.
    Validate { file: PathBuf },
    /// Check that a representation document realises an event structure.
    Check { es: PathBuf, rep: PathBuf },
    /// Build a set-family representation of an event structure or full graph.
    Represent { file: PathBuf },
    /// Convert between event structures and full graphs.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        file: PathBuf,
    },
    /// Decide whether a full-graph document describes a full graph.
    IsFullgraph { file: PathBuf },
    /// Exact counts for every size from 0 up to N.
    Count {
        #[arg(long, value_enum)]
        kind: CountKind,
        #[arg(long)]
        n: usize,
        /// Use the brute-force enumeration instead of the counting engine.
        #[arg(long)]
        oracle: bool,
        #[arg(long, requires = "shard")]
        shards: Option<usize>,
        #[arg(long, requires = "shards")]
        shard: Option<usize>,
    },
    /// Print every structure of size N, one JSON document per line.
    Enumerate {
        #[arg(long, value_enum)]
        kind: EnumKind,
        #[arg(long)]
        n: usize,
    },
    /// Render an event structure or full graph in Graphviz DOT.
    ExportDot { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fullgraph,
    Es,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumKind {
    Es,
    Fullgraph,
}

impl ValueEnum for CountKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[CountKind::Es, CountKind::Fullgraph, CountKind::Posets]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            CountKind::Es => "es",
            CountKind::Fullgraph => "fullgraph",
            CountKind::Posets => "posets",
        }))
    }
}

/// What a successful or domain-failing command prints, and its exit status.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }

    fn failing(stdout: String) -> Self {
        Outcome { stdout, code: 1 }
    }
}

fn load(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Document::parse(&text)
}

pub fn verdict_json(verdict: &EsVerdict) -> serde_json::Value {
    let violations: Vec<_> = verdict
        .violations
        .iter()
        .map(|v| {
            json!({
                "axiom": v.axiom.tag(),
                "witness": v.witness.iter().map(|e| e.0).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "valid": verdict.valid(), "violations": violations })
}

pub fn reason_json(reason: Option<&FgReason>) -> serde_json::Value {
    match reason {
        None => json!({ "full_graph": true }),
        Some(FgReason::InducedConflictInvalid(v)) => json!({
            "full_graph": false,
            "reason": "InducedConflictInvalid",
            "violations": verdict_json(v)["violations"],
        }),
        Some(r) => json!({ "full_graph": false, "reason": r.tag(), "detail": r.to_string() }),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise")
}

/// Runs one command. `out` receives streamed output (used by `enumerate`);
/// everything else is returned in the outcome.
pub fn run(cli: Cli, limits: &Limits, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Validate { file } => {
            let (d, u) = load(&file)?.raw_es()?;
            let verdict = validate_es(&d, &u)?;
            let text = pretty(&verdict_json(&verdict));
            Ok(if verdict.valid() { Outcome::ok(text) } else { Outcome::failing(text) })
        }
        Command::Check { es, rep } => {
            let es = load(&es)?.es()?;
            let f = load(&rep)?.rep()?;
            if f.domain() != es.events() {
                return Err(CliError::Domain(format!(
                    "the map is defined on {:?} but the events are {:?}",
                    f.domain(),
                    es.events()
                )));
            }
            let represents = check_representation(&f, es.causality(), es.conflict())?;
            let injective = is_injective_nonempty(&f);
            let text = pretty(&json!({ "representation": represents, "injective_nonempty": injective }));
            Ok(if represents { Outcome::ok(text) } else { Outcome::failing(text) })
        }
        Command::Represent { file } => {
            let doc = load(&file)?;
            let f = match doc {
                Document::FullGraph { .. } => build_fg_representation(&doc.fullgraph()?)?,
                _ => build_representation(&doc.es()?)?,
            };
            Ok(Outcome::ok(Document::from_rep(&f).to_json()))
        }
        Command::Convert { to, file } => {
            let doc = load(&file)?;
            let converted = match to {
                Target::Fullgraph => Document::from_fullgraph(&es_to_fullgraph(&doc.es()?)?),
                Target::Es => Document::from_es(&fullgraph_to_es(&doc.fullgraph()?)?),
            };
            Ok(Outcome::ok(converted.to_json()))
        }
        Command::IsFullgraph { file } => {
            let (d, t) = load(&file)?.raw_fullgraph()?;
            Ok(match is_full_graph(&d, &t) {
                Ok(()) => Outcome::ok(pretty(&reason_json(None))),
                Err(r) => Outcome::failing(pretty(&reason_json(Some(&r)))),
            })
        }
        Command::Count { kind, n, oracle, shards, shard } => {
            let shard = match (shards, shard) {
                (Some(count), Some(index)) => Some(Shard::new(index, count)?),
                _ => None,
            };
            if oracle && shard.is_some() {
                return Err(CliError::Malformed("--oracle cannot be combined with --shards".into()));
            }
            let report = count(kind, n, oracle, shard, limits)?;
            Ok(Outcome::ok(Document::CountReport(report).to_json()))
        }
        Command::Enumerate { kind, n } => {
            limits.check(n)?;
            for es in enumerate_event_structures(n, limits)? {
                let doc = match kind {
                    EnumKind::Es => Document::from_es(&es),
                    EnumKind::Fullgraph => Document::from_fullgraph(&es_to_fullgraph(&es)?),
                };
                writeln!(out, "{}", doc.to_json_line())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            }
            Ok(Outcome::ok(String::new()))
        }
        Command::ExportDot { file } => {
            let doc = load(&file)?;
            let text = match doc {
                Document::FullGraph { .. } => dot::fullgraph(&doc.fullgraph()?),
                _ => dot::event_structure(&doc.es()?),
            };
            Ok(Outcome::ok(text))
        }
    }
}

fn count(
    kind: CountKind,
    n: usize,
    oracle: bool,
    shard: Option<Shard>,
    limits: &Limits,
) -> Result<CountReport, CliError> {
    limits.check(n)?;
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let c = match (kind, oracle) {
            (CountKind::Posets, false) if shard.is_none() => count_posets(k, limits)?,
            (CountKind::Posets, false) => {
                count_table_sharded(k, limits, shard.unwrap_or(Shard::WHOLE))?.posets
            }
            (CountKind::Posets, true) => brute_force_posets(k, limits)?.len() as u128,
            (CountKind::Es, true) => brute_force_es(k, limits)?.count() as u128,
            (CountKind::Fullgraph, true) => brute_force_full_graph_count(k, limits)?,
            (CountKind::Es, false) => {
                count_table_sharded(k, limits, shard.unwrap_or(Shard::WHOLE))?.event_structures
            }
            (CountKind::Fullgraph, false) => {
                count_table_sharded(k, limits, shard.unwrap_or(Shard::WHOLE))?.full_graphs
            }
        };
        let c = u64::try_from(c)
            .map_err(|_| CliError::Domain(format!("count for n = {k} does not fit in 64 bits")))?;
        let log2_ratio = (kind != CountKind::Posets && shard.is_none() && k > 0 && c > 0)
            .then(|| (c as f64).log2() / (k * k) as f64);
        rows.push(CountRow { n: k, count: c, log2_ratio });
    }
    Ok(CountReport {
        n,
        count_kind: kind,
        method: if oracle { CountMethod::Oracle } else { CountMethod::Engine },
        shard: shard.map(|s| ShardInfo { index: s.index, count: s.count }),
        count: rows[n].count,
        rows,
    })
}
