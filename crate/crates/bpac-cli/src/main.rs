//! `bpac`: command-line driver for the BPA Canvas toolkit.
//!
//! The subcommands follow the analysis workflow: scaffold a canvas
//! (`init`), validate it (`check`), mine the narrative texts for glossary
//! and AAO candidates (`extract-terms`, `extract-aao`), and generate the
//! class diagrams and the ontology (`diagram`, `ontology`). `report`
//! prints a synoptic view of the whole canvas.
//!
//! Exit status: 0 when no errors were found, 1 when error-level
//! diagnostics exist, 2 on unusable input (unreadable root, parse-fatal
//! canvas, bad flags).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bpac_core::consistency;
use bpac_core::diagnostics::{self, Diagnostic};
use bpac_core::diagram::{build_diagrams, emit_dot, merge_diagrams};
use bpac_core::io::{self, parse_canvas, ParseResult};
use bpac_core::mining;
use bpac_core::model::{Canvas, SourceMap};
use bpac_core::morphology::MiningData;
use bpac_core::ontology::{build_ontology, check_ontology, emit_turtle, DEFAULT_BASE_IRI};

const DATA_DIR_ENV: &str = "BPAC_DATA_DIR";

#[derive(Parser)]
#[command(name = "bpac", version, about = "Business process analysis canvas toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Scaffold an empty canvas directory with commented template files
    Init {
        /// Directory to create
        dir: PathBuf,
    },
    /// Parse a canvas and run every consistency check
    Check {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Output format for the diagnostics
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Propose glossary terms mined from the narrative texts
    ExtractTerms {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Directory overriding the built-in stopword/morphology tables
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Propose AAO triples mined from the narrative texts
    ExtractAao {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Directory overriding the built-in stopword/morphology tables
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Generate structural, functional and merged class diagrams as DOT
    Diagram {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Output directory (default: <dir>/diagrams)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate the ontology as Turtle
    Ontology {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Output file (default: <dir>/ontology.ttl)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Base IRI for the default namespace
        #[arg(long, default_value = DEFAULT_BASE_IRI)]
        base_iri: String,
    },
    /// Print section fill-in counts and diagnostic totals
    Report {
        /// Canvas root directory
        #[arg(default_value = ".")]
        dir: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Init { dir } => run_init(&dir),
        Command::Check { dir, format } => run_check(&dir, format),
        Command::ExtractTerms { dir, data_dir } => run_extract_terms(&dir, data_dir.as_deref()),
        Command::ExtractAao { dir, data_dir } => run_extract_aao(&dir, data_dir.as_deref()),
        Command::Diagram { dir, output } => run_diagram(&dir, output.as_deref()),
        Command::Ontology {
            dir,
            output,
            base_iri,
        } => run_ontology(&dir, output.as_deref(), &base_iri),
        Command::Report { dir, format } => run_report(&dir, format),
    };
    ExitCode::from(code)
}

fn fail(message: impl std::fmt::Display) -> u8 {
    eprintln!("bpac: {message}");
    2
}

/// Writes a payload chunk to standard output. A closed pipe (e.g. the
/// output piped into `head`) ends the process quietly; any other write
/// failure is fatal.
fn out(payload: impl std::fmt::Display) {
    use std::io::Write;
    if let Err(err) = write!(std::io::stdout(), "{payload}") {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        std::process::exit(fail(format_args!("failed to write to stdout: {err}")) as i32);
    }
}

fn parse_root(dir: &Path) -> Result<ParseResult, u8> {
    if !dir.is_dir() {
        return Err(fail(format_args!("{} is not a readable directory", dir.display())));
    }
    Ok(parse_canvas(dir))
}

/// Diagnostics from every stage that applies: the parse, the rule
/// catalog, and (once the canvas is error-free) the generated ontology.
fn full_diagnostics(result: &ParseResult) -> Vec<Diagnostic> {
    let mut all = result.diagnostics.clone();
    if let Some(canvas) = &result.canvas {
        let report = consistency::check(canvas, &result.sources);
        all.extend(report.diagnostics.iter().cloned());
        diagnostics::sort_and_dedup(&mut all);
        if !diagnostics::has_errors(&all) {
            if let Ok(graph) = build_artifacts(canvas).map(|(_, _, _, graph)| graph) {
                all.extend(check_ontology(&graph));
            }
            diagnostics::sort_and_dedup(&mut all);
        }
    }
    all
}

fn exit_for(diagnostics: &[Diagnostic], canvas_present: bool) -> u8 {
    if !canvas_present || diagnostics::has_fatal(diagnostics) {
        2
    } else if diagnostics::has_errors(diagnostics) {
        1
    } else {
        0
    }
}

fn run_check(dir: &Path, format: Format) -> u8 {
    let result = match parse_root(dir) {
        Ok(result) => result,
        Err(code) => return code,
    };
    let all = full_diagnostics(&result);
    match format {
        Format::Text => out(consistency::render_text(&all)),
        Format::Json => out(format_args!("{}\n", consistency::render_json(&all))),
    }
    exit_for(&all, result.canvas.is_some())
}

fn resolve_data(flag: Option<&Path>) -> Result<MiningData, u8> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
    match dir {
        Some(dir) => MiningData::load(&dir).map_err(fail),
        None => Ok(MiningData::builtin()),
    }
}

/// Parses for the extraction commands: diagnostics go to standard error,
/// the canvas must at least be loadable.
fn parse_for_extraction(dir: &Path) -> Result<(Canvas, Vec<Diagnostic>), u8> {
    let result = parse_root(dir)?;
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    match result.canvas {
        Some(canvas) => Ok((canvas, result.diagnostics)),
        None => Err(2),
    }
}

fn narrative_bodies(canvas: &Canvas) -> Vec<&str> {
    let mut bodies: Vec<&str> = Vec::new();
    if let Some(statement) = &canvas.statement {
        bodies.push(&statement.body);
    }
    bodies.extend(canvas.stories.iter().map(|s| s.body.as_str()));
    bodies
}

fn run_extract_terms(dir: &Path, data_dir: Option<&Path>) -> u8 {
    let (canvas, diagnostics) = match parse_for_extraction(dir) {
        Ok(ok) => ok,
        Err(code) => return code,
    };
    let data = match resolve_data(data_dir) {
        Ok(data) => data,
        Err(code) => return code,
    };
    let candidates = mining::extract_terms_multi(
        &narrative_bodies(&canvas),
        &canvas.lexicon,
        &canvas.glossary,
        &data,
    );
    for candidate in candidates {
        out(format_args!(
            "{}\t{}\t{}\n",
            candidate.surface, candidate.count, candidate.known
        ));
    }
    exit_for(&diagnostics, true)
}

fn run_extract_aao(dir: &Path, data_dir: Option<&Path>) -> u8 {
    let (canvas, diagnostics) = match parse_for_extraction(dir) {
        Ok(ok) => ok,
        Err(code) => return code,
    };
    let data = match resolve_data(data_dir) {
        Ok(data) => data,
        Err(code) => return code,
    };
    for body in narrative_bodies(&canvas) {
        for candidate in mining::extract_aao(body, &canvas.lexicon, &canvas.glossary, &data) {
            out(format_args!(
                "{}\t{}\t{}\t{}\n",
                candidate.triple.actor,
                candidate.triple.action,
                candidate.triple.outcome,
                candidate.confidence
            ));
        }
    }
    exit_for(&diagnostics, true)
}

type Artifacts = (
    bpac_core::diagram::ClassDiagram,
    bpac_core::diagram::ClassDiagram,
    bpac_core::diagram::ClassDiagram,
    bpac_core::ontology::OntologyGraph,
);

/// Builds diagrams and ontology for a canvas that passed the error rules.
fn build_artifacts(canvas: &Canvas) -> Result<Artifacts, String> {
    let (structural, functional) =
        build_diagrams(&canvas.lexicon).map_err(|e| e.to_string())?;
    let merged = merge_diagrams(&[structural.clone(), functional.clone()], "merged")
        .map_err(|e| e.to_string())?;
    let graph = build_ontology(&canvas.lexicon, &merged).map_err(|e| e.to_string())?;
    Ok((structural, functional, merged, graph))
}

/// Shared gate for the generator commands: print diagnostics to standard
/// error and stop on error-level findings.
fn checked_canvas(dir: &Path) -> Result<(Canvas, SourceMap), u8> {
    let result = parse_root(dir)?;
    let mut all = result.diagnostics.clone();
    if let Some(canvas) = &result.canvas {
        all.extend(consistency::check(canvas, &result.sources).diagnostics);
        diagnostics::sort_and_dedup(&mut all);
    }
    for d in &all {
        eprintln!("{d}");
    }
    match result.canvas {
        None => Err(2),
        Some(_) if diagnostics::has_errors(&all) => Err(1),
        Some(canvas) => Ok((canvas, result.sources)),
    }
}

fn run_diagram(dir: &Path, output: Option<&Path>) -> u8 {
    let (canvas, _) = match checked_canvas(dir) {
        Ok(ok) => ok,
        Err(code) => return code,
    };
    let (structural, functional, merged, _) = match build_artifacts(&canvas) {
        Ok(artifacts) => artifacts,
        Err(message) => return fail(message),
    };
    let out_dir = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join("diagrams"));
    for diagram in [&structural, &functional, &merged] {
        let path = out_dir.join(format!("{}.dot", diagram.name));
        if let Err(err) = io::write_file(&path, &emit_dot(diagram)) {
            return fail(err);
        }
        eprintln!("wrote {}", path.display());
    }
    0
}

fn run_ontology(dir: &Path, output: Option<&Path>, base_iri: &str) -> u8 {
    let (canvas, _) = match checked_canvas(dir) {
        Ok(ok) => ok,
        Err(code) => return code,
    };
    let (_, _, _, graph) = match build_artifacts(&canvas) {
        Ok(artifacts) => artifacts,
        Err(message) => return fail(message),
    };
    let findings = check_ontology(&graph);
    for d in &findings {
        eprintln!("{d}");
    }
    if diagnostics::has_errors(&findings) {
        return 1;
    }
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join("ontology.ttl"));
    if let Err(err) = io::write_file(&path, &emit_turtle(&graph, base_iri)) {
        return fail(err);
    }
    eprintln!("wrote {}", path.display());
    0
}

fn run_report(dir: &Path, format: Format) -> u8 {
    let result = match parse_root(dir) {
        Ok(result) => result,
        Err(code) => return code,
    };
    let Some(canvas) = &result.canvas else {
        for d in &result.diagnostics {
            eprintln!("{d}");
        }
        return 2;
    };
    let all = full_diagnostics(&result);
    let errors = all.iter().filter(|d| d.level == bpac_core::Level::Error).count();
    let warnings = all.iter().filter(|d| d.level == bpac_core::Level::Warning).count();
    let lexicon = &canvas.lexicon;

    match format {
        Format::Text => {
            out(format_args!("name: {}\n", canvas.signature.name));
            out(format_args!(
                "signature: {}/7 fields\n",
                canvas.signature.filled_fields()
            ));
            out(format_args!(
                "statement: {}\n",
                if canvas.statement.is_some() { "present" } else { "missing" }
            ));
            out(format_args!("stories: {}\n", canvas.stories.len()));
            out(format_args!("aao rows: {}\n", canvas.aao.rows.len()));
            out(format_args!("glossary entries: {}\n", canvas.glossary.len()));
            out(format_args!(
                "lexicon: {} objects, {} processes, {} actors, {} attributes, {} links\n",
                lexicon.objects.len(),
                lexicon.processes.len(),
                lexicon.actors.len(),
                lexicon.attributes.len(),
                lexicon.links.len()
            ));
            out(format_args!("errors: {errors}\n"));
            out(format_args!("warnings: {warnings}\n"));
        }
        Format::Json => {
            let value = serde_json::json!({
                "name": canvas.signature.name,
                "signature_fields": canvas.signature.filled_fields(),
                "statement": canvas.statement.is_some(),
                "stories": canvas.stories.len(),
                "aao_rows": canvas.aao.rows.len(),
                "glossary_entries": canvas.glossary.len(),
                "lexicon": {
                    "objects": lexicon.objects.len(),
                    "processes": lexicon.processes.len(),
                    "actors": lexicon.actors.len(),
                    "attributes": lexicon.attributes.len(),
                    "links": lexicon.links.len(),
                },
                "errors": errors,
                "warnings": warnings,
            });
            out(format_args!(
                "{}\n",
                serde_json::to_string_pretty(&value).expect("serializable")
            ));
        }
    }
    exit_for(&all, true)
}

const SIGNATURE_TEMPLATE: &str = "\
# Business process signature: one \"key: value\" per line.
# Keys: name, trigger, key-actors, key-objects, input, objective, output.
# key-actors and key-objects take comma-separated terms.
name:
trigger:
key-actors:
key-objects:
input:
objective:
output:
";

const AAO_TEMPLATE: &str = "\
# Curated actor/action/outcome rows; keep actions in gerund form.
# An empty actor cell inherits the previous row's actor.
actor\taction\toutcome
";

const GLOSSARY_TEMPLATE: &str = "\
# One described term per row; synonyms separated by \";\".
term\tsynonyms\tdescription
";

const LEXICON_TEMPLATE: &str = "\
# OPAAL lexicon directives:
#   object: Term
#   process: Term
#   actor: Term
#   attribute: Term [of Owner, Owner]
#   link: isa Child Parent
#   link: partof Part Whole
#   link: fn Process Actor Target
";

fn run_init(dir: &Path) -> u8 {
    let signature = dir.join(io::SIGNATURE_FILE);
    if signature.exists() {
        return fail(format_args!(
            "{} already exists, refusing to overwrite",
            signature.display()
        ));
    }
    let steps: [(&str, &str); 5] = [
        (io::SIGNATURE_FILE, SIGNATURE_TEMPLATE),
        (io::STATEMENT_FILE, ""),
        (io::AAO_FILE, AAO_TEMPLATE),
        (io::GLOSSARY_FILE, GLOSSARY_TEMPLATE),
        (io::LEXICON_FILE, LEXICON_TEMPLATE),
    ];
    for (name, content) in steps {
        if let Err(err) = io::write_file(&dir.join(name), content) {
            return fail(err);
        }
    }
    if let Err(err) = std::fs::create_dir_all(dir.join(io::STORIES_DIR)) {
        return fail(format_args!("failed to create stories/: {err}"));
    }
    eprintln!("initialised canvas in {}", dir.display());
    0
}
