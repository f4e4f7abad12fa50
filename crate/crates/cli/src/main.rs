//! `dlsim` command-line front end.
//!
//! Exit codes: 0 success or "holds", 1 negative answer or inconsistent
//! knowledge base, 2 usage, parse or reasoning error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dlsim::gen::{GenConfig, Generator};
use dlsim::{
    agglomerate, parse_concept, parse_kb, serialize_kb, Backend, Dendrogram, Engine, Item, KnowledgeBase,
    Linkage, MscResult, SimMatrix, SimilarityReport,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "dlsim", version, about = "Reasoning and extension-based similarity over ALC knowledge bases")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// How concept extensions are computed.
    #[arg(long, global = true, default_value = "canonical")]
    backend: Backend,
    /// Role depth of MSC approximations: a number, or `auto` for the ABox depth.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_depth)]
    depth: Depth,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Memoize extensions within one command.
    #[arg(long, global = true)]
    cache: bool,
}

#[derive(Clone, Copy)]
struct Depth(Option<usize>);

fn parse_depth(s: &str) -> Result<Depth, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Depth(None));
    }
    s.parse().map(|n| Depth(Some(n))).map_err(|_| format!("expected a non-negative integer or `auto`, got `{s}`"))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a knowledge base and check its consistency.
    Check { kb: PathBuf },
    /// Test whether concept C is subsumed by concept D.
    Subsumes { kb: PathBuf, c: String, d: String },
    /// List the individuals in the extension of a concept.
    Retrieve { kb: PathBuf, concept: String },
    /// Approximate the most specific concept of an individual.
    Msc { kb: PathBuf, individual: String },
    /// Similarity of two items. An item is a concept expression or an
    /// individual name; prefix with `concept:` or `ind:` to force either.
    Sim { kb: PathBuf, x: String, y: String },
    /// Pairwise similarity matrix.
    Matrix {
        kb: PathBuf,
        #[arg(required = true)]
        items: Vec<String>,
    },
    /// Agglomerative clustering over the similarity matrix.
    Cluster {
        kb: PathBuf,
        #[arg(required = true)]
        items: Vec<String>,
        #[arg(long, default_value = "complete")]
        linkage: Linkage,
    },
    /// Print a random knowledge base.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        individuals: usize,
        #[arg(long, default_value_t = 6)]
        concepts: usize,
        #[arg(long, default_value_t = 2)]
        defined: usize,
        #[arg(long, default_value_t = 2)]
        roles: usize,
        #[arg(long, default_value_t = 8)]
        concept_assertions: usize,
        #[arg(long, default_value_t = 7)]
        role_assertions: usize,
        #[arg(long, default_value_t = 2)]
        max_depth: usize,
    },
}

/// A failed command; the message goes to stderr and the exit code is 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    match run(&cli, &mut out) {
        Ok(positive) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if positive { 0 } else { 1 })
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_kb(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn engine<'kb>(kb: &'kb KnowledgeBase, cfg: &RunConfig) -> Result<Engine<'kb>, Failure> {
    Ok(Engine::new(kb)?.with_cache(cfg.cache))
}

fn json(out: &mut String, value: &impl Serialize) -> Result<(), Failure> {
    out.push_str(&serde_json::to_string_pretty(value)?);
    out.push('\n');
    Ok(())
}

fn csv_rows(out: &mut String, rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.write_record(row)?;
    }
    out.push_str(&String::from_utf8(w.into_inner().map_err(|e| Failure(e.to_string()))?)?);
    Ok(())
}

fn run(cli: &Cli, out: &mut String) -> Outcome {
    let cfg = &cli.run;
    match &cli.command {
        Command::Check { kb } => check(cfg, &load(kb)?, out),
        Command::Subsumes { kb, c, d } => subsumes(cfg, &load(kb)?, c, d, out),
        Command::Retrieve { kb, concept } => retrieve(cfg, &load(kb)?, concept, out),
        Command::Msc { kb, individual } => msc(cfg, &load(kb)?, individual, out),
        Command::Sim { kb, x, y } => sim(cfg, &load(kb)?, x, y, out),
        Command::Matrix { kb, items } => matrix(cfg, &load(kb)?, items, out),
        Command::Cluster { kb, items, linkage } => cluster(cfg, &load(kb)?, items, *linkage, out),
        &Command::Gen {
            seed,
            individuals,
            concepts,
            defined,
            roles,
            concept_assertions,
            role_assertions,
            max_depth,
        } => {
            let gen_cfg = GenConfig {
                individuals,
                concept_names: concepts,
                defined,
                role_names: roles,
                concept_assertions,
                role_assertions,
                max_depth,
                ..GenConfig::default()
            };
            out.push_str(&serialize_kb(&Generator::new(seed, gen_cfg).kb()));
            Ok(true)
        }
    }
}

#[derive(Serialize)]
struct CheckReport {
    consistent: bool,
    acyclic: bool,
    definitions: usize,
    concept_assertions: usize,
    role_assertions: usize,
    assertions: usize,
    individuals: usize,
}

fn check(cfg: &RunConfig, kb: &KnowledgeBase, out: &mut String) -> Outcome {
    let consistent = engine(kb, cfg)?.reasoner().abox_consistent()?;
    let r = CheckReport {
        consistent,
        acyclic: true,
        definitions: kb.tbox.len(),
        concept_assertions: kb.abox.concept_assertions().len(),
        role_assertions: kb.abox.role_assertions().len(),
        assertions: kb.abox.len(),
        individuals: kb.individuals().len(),
    };
    match cfg.format {
        Format::Text => writeln!(
            out,
            "{}, {} definitions, {} assertions, {} individuals",
            if consistent { "consistent" } else { "inconsistent" },
            r.definitions,
            r.assertions,
            r.individuals
        )?,
        Format::Json => json(out, &r)?,
        Format::Csv => csv_rows(
            out,
            &[
                ["consistent", "definitions", "concept_assertions", "role_assertions", "individuals"].map(String::from).to_vec(),
                vec![
                    consistent.to_string(),
                    r.definitions.to_string(),
                    r.concept_assertions.to_string(),
                    r.role_assertions.to_string(),
                    r.individuals.to_string(),
                ],
            ],
        )?,
    }
    Ok(consistent)
}

#[derive(Serialize)]
struct SubsumptionReport {
    sub: String,
    sup: String,
    holds: bool,
}

fn subsumes(cfg: &RunConfig, kb: &KnowledgeBase, c: &str, d: &str, out: &mut String) -> Outcome {
    let (c, d) = (parse_concept(c)?, parse_concept(d)?);
    let holds = engine(kb, cfg)?.reasoner().subsumes(&d, &c)?;
    let r = SubsumptionReport { sub: c.to_string(), sup: d.to_string(), holds };
    match cfg.format {
        Format::Text => {
            let verdict = if holds { "holds" } else { "does not hold" };
            writeln!(out, "{verdict}: {} is subsumed by {}", r.sub, r.sup)?;
        }
        Format::Json => json(out, &r)?,
        Format::Csv => csv_rows(out, &[vec!["sub".into(), "sup".into(), "holds".into()], vec![r.sub, r.sup, holds.to_string()]])?,
    }
    Ok(holds)
}

#[derive(Serialize)]
struct Retrieval {
    concept: String,
    backend: Backend,
    members: Vec<String>,
}

fn retrieve(cfg: &RunConfig, kb: &KnowledgeBase, text: &str, out: &mut String) -> Outcome {
    let c = parse_concept(text)?;
    let members: Vec<String> = engine(kb, cfg)?.extension(&c, cfg.backend)?.iter().cloned().collect();
    let r = Retrieval { concept: c.to_string(), backend: cfg.backend, members };
    match cfg.format {
        Format::Text => r.members.iter().try_for_each(|a| writeln!(out, "{a}"))?,
        Format::Json => json(out, &r)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                std::iter::once(vec!["individual".to_string()]).chain(r.members.iter().map(|a| vec![a.clone()])).collect();
            csv_rows(out, &rows)?
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct MscReport {
    #[serde(flatten)]
    msc: MscResult,
    cardinality: usize,
    members: Vec<String>,
}

fn msc(cfg: &RunConfig, kb: &KnowledgeBase, a: &str, out: &mut String) -> Outcome {
    let e = engine(kb, cfg)?;
    let msc = e.msc(a, cfg.depth.0, cfg.backend)?;
    let members: Vec<String> = e.extension(&msc.concept, cfg.backend)?.iter().cloned().collect();
    let r = msc;
    match cfg.format {
        Format::Text => {
            writeln!(out, "{}", r.concept)?;
            writeln!(out, "depth {}, extension ({}): {}", r.depth, members.len(), members.join(", "))?;
        }
        Format::Json => json(out, &MscReport { cardinality: members.len(), members, msc: r })?,
        Format::Csv => csv_rows(
            out,
            &[
                ["individual", "depth", "concept", "cardinality"].map(String::from).to_vec(),
                vec![r.individual, r.depth.to_string(), r.concept.to_string(), members.len().to_string()],
            ],
        )?,
    }
    Ok(true)
}

/// Resolves a command-line item. Bare names that denote an individual are
/// individuals, unless they are also used as a concept name.
fn resolve(kb: &KnowledgeBase, text: &str) -> Result<Item, Failure> {
    if let Some(a) = text.strip_prefix("ind:") {
        let a = a.trim();
        if !kb.has_individual(a) {
            return Err(Failure(format!("unknown individual `{a}`")));
        }
        return Ok(Item::Individual(a.to_string()));
    }
    if let Some(c) = text.strip_prefix("concept:") {
        return Ok(Item::Concept(parse_concept(c)?));
    }
    let name = text.trim();
    if kb.has_individual(name) {
        if kb.signature().concepts.contains(name) {
            return Err(Failure(format!(
                "`{name}` is both an individual and a concept name; write `ind:{name}` or `concept:{name}`"
            )));
        }
        return Ok(Item::Individual(name.to_string()));
    }
    Ok(Item::Concept(parse_concept(text)?))
}

fn report_rows(r: &SimilarityReport) -> Vec<Vec<String>> {
    let header = [
        "value",
        "ext_c",
        "ext_d",
        "ext_i",
        "backend",
        "extension_computations",
        "msc_computations",
        "msc_depth",
    ];
    let row = vec![
        r.value.to_string(),
        r.ext_c.to_string(),
        r.ext_d.to_string(),
        r.ext_i.to_string(),
        r.backend.to_string(),
        r.extension_computations.to_string(),
        r.msc_computations.to_string(),
        r.msc_depth.map(|d| d.to_string()).unwrap_or_default(),
    ];
    vec![header.map(String::from).to_vec(), row]
}

fn sim(cfg: &RunConfig, kb: &KnowledgeBase, x: &str, y: &str, out: &mut String) -> Outcome {
    let (x, y) = (resolve(kb, x)?, resolve(kb, y)?);
    let r = engine(kb, cfg)?.sim_items(&x, &y, cfg.depth.0, cfg.backend)?;
    match cfg.format {
        Format::Text => {
            writeln!(out, "{:.4}", r.value)?;
            writeln!(out, "ext ({}, {}, {})", r.ext_c, r.ext_d, r.ext_i)?;
            write!(out, "extension_computations {}, msc_computations {}", r.extension_computations, r.msc_computations)?;
            match r.msc_depth {
                Some(d) => writeln!(out, ", msc_depth {d}")?,
                None => writeln!(out)?,
            }
        }
        Format::Json => json(out, &r)?,
        Format::Csv => csv_rows(out, &report_rows(&r))?,
    }
    Ok(true)
}

fn build_matrix(cfg: &RunConfig, kb: &KnowledgeBase, items: &[String]) -> Result<SimMatrix, Failure> {
    let items = items.iter().map(|s| resolve(kb, s)).collect::<Result<Vec<_>, _>>()?;
    let labels: BTreeSet<String> = items.iter().map(Item::to_string).collect();
    if labels.len() != items.len() {
        return Err(Failure("matrix items must be distinct".into()));
    }
    Ok(engine(kb, cfg)?.sim_matrix(&items, cfg.depth.0, cfg.backend)?)
}

fn matrix(cfg: &RunConfig, kb: &KnowledgeBase, items: &[String], out: &mut String) -> Outcome {
    let m = build_matrix(cfg, kb, items)?;
    match cfg.format {
        Format::Text => {
            let width = m.labels.iter().map(String::len).max().unwrap_or(0);
            for (label, row) in m.labels.iter().zip(&m.values) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
                writeln!(out, "{label:<width$}  {}", cells.join("  "))?;
            }
        }
        Format::Json => json(out, &m)?,
        Format::Csv => {
            let mut rows = vec![std::iter::once(String::new()).chain(m.labels.iter().cloned()).collect::<Vec<_>>()];
            for (label, row) in m.labels.iter().zip(&m.values) {
                rows.push(std::iter::once(label.clone()).chain(row.iter().map(f64::to_string)).collect());
            }
            csv_rows(out, &rows)?
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct ClusterReport<'a> {
    linkage: Linkage,
    #[serde(flatten)]
    dendrogram: &'a Dendrogram,
}

fn cluster(cfg: &RunConfig, kb: &KnowledgeBase, items: &[String], linkage: Linkage, out: &mut String) -> Outcome {
    let d = agglomerate(&build_matrix(cfg, kb, items)?, linkage);
    match cfg.format {
        Format::Text => {
            for (k, m) in d.merges.iter().enumerate() {
                writeln!(out, "merge {k}: {} + {} at {:.4}", m.left, m.right, m.similarity)?;
            }
            out.push_str(&d.render());
        }
        Format::Json => json(out, &ClusterReport { linkage, dendrogram: &d })?,
        Format::Csv => {
            let mut rows = vec![["step", "left", "right", "similarity"].map(String::from).to_vec()];
            for (k, m) in d.merges.iter().enumerate() {
                rows.push(vec![k.to_string(), m.left.to_string(), m.right.to_string(), m.similarity.to_string()]);
            }
            csv_rows(out, &rows)?
        }
    }
    Ok(true)
}
