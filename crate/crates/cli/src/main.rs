//! `usdkg` — the pipeline as a command line: parse, compose, translate,
//! materialize, query, watch.
//!
//! Results go to standard output (or `--out`); diagnostics — warnings,
//! validation findings, progress notes — go to standard error, never mixed.
//! Every error family has its own documented exit code (see `EXIT_CODES`),
//! so scripts can branch on what went wrong.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use usdkg::compose::{compose_stage, resolve_sublayers, ComposeError, FsLoader, Stage};
use usdkg::iri::iri_of_path;
use usdkg::kg::{
    export_turtle, load_graph, parse_update_line, serialize_graph, JointUpdate, KgError,
    UpdateError,
};
use usdkg::reason::{
    check_consistency, container_states, materialize_capped, query_connected, query_instances,
    QueryError, ReasonError, StateWatcher, WatchError,
};
use usdkg::schema::{
    builtin_registry, load_schema_extensions, SchemaError, SchemaRegistry, Severity,
};
use usdkg::tbox::{builtin_tbox, generate_tagging_sublayer, load_tbox, vocab, TBox, TboxError};
use usdkg::translate::{translate, TranslateError};
use usdkg::usda::{parse_source, print_layer, ParseError, PrimPath};
use usdkg::{Graph, Iri};

/// Exit codes, one per error family. 0 is success (diagnostics allowed);
/// clap itself exits 2 on usage errors.
const EXIT_CODES: &[(u8, &str)] = &[
    (0, "success (diagnostics on stderr are allowed)"),
    (2, "command-line usage error"),
    (3, "config file unreadable or invalid"),
    (4, "file I/O failure"),
    (5, "scene text failed to parse"),
    (6, "layer composition failed"),
    (7, "schema validation errors under --strict"),
    (8, "terminology document invalid"),
    (9, "schema extension document invalid"),
    (10, "translation failed"),
    (11, "reasoning aborted (iteration cap)"),
    (12, "query invalid (unknown concept, bad path or IRI)"),
    (13, "knowledge-graph file failed to load"),
    (14, "update stream invalid"),
];

#[derive(Error, Debug)]
enum CliError {
    #[error("config `{path}`: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("{0} schema validation error(s); rerun without --strict to continue anyway")]
    Validation(usize),
    #[error(transparent)]
    Tbox(#[from] TboxError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error("{0}")]
    Query(String),
    #[error(transparent)]
    KgLoad(#[from] KgError),
    #[error("{0}")]
    Updates(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Io { .. } => 4,
            CliError::Parse(_) => 5,
            CliError::Compose(_) => 6,
            CliError::Validation(_) => 7,
            CliError::Tbox(_) => 8,
            CliError::Schema(_) => 9,
            CliError::Translate(_) => 10,
            CliError::Reason(_) => 11,
            CliError::Query(_) => 12,
            CliError::KgLoad(_) => 13,
            CliError::Updates(_) => 14,
        }
    }
}

fn exit_code_help() -> String {
    let mut out = String::from("Exit codes:\n");
    for (code, meaning) in EXIT_CODES {
        out.push_str(&format!("  {code:>2}  {meaning}\n"));
    }
    out
}

#[derive(Parser)]
#[command(
    name = "usdkg",
    version,
    about = "Scene descriptions in, queryable knowledge graphs out",
    after_long_help = exit_code_help()
)]
struct Cli {
    /// TOML config supplying defaults for the pipeline flags
    /// (root_usda, tbox_file, base_iri, schema_extensions, output_path,
    /// max_iterations). Explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, compose, and translate a scene into a knowledge graph.
    Translate(TranslateArgs),
    /// Translate (or load) a graph, materialize inferences, report
    /// consistency, and write the enlarged graph.
    Reason(ReasonArgs),
    /// Materialize, then answer an instance, connectivity, or container
    /// state query.
    Query(QueryArgs),
    /// Statistics for a serialized knowledge graph.
    Stats(StatsArgs),
    /// Render a terminology as a taggable scene sublayer.
    GenTboxLayer(GenTboxLayerArgs),
    /// Apply a stream of joint updates and print reclassification events.
    Watch(WatchArgs),
}

/// Flags shared by every command that runs the scene pipeline.
#[derive(Args, Clone, Default)]
struct PipelineArgs {
    /// Root scene file (.usda).
    #[arg(long, value_name = "FILE")]
    root: Option<PathBuf>,
    /// Terminology document extending the built-in concepts and rules.
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    /// Schema extension document (extra typed/API schemas).
    #[arg(long, value_name = "FILE")]
    schemas: Option<PathBuf>,
    /// Base IRI under which scene paths are minted.
    #[arg(long, value_name = "IRI")]
    base: Option<String>,
    /// Treat schema validation errors as fatal (exit 7).
    #[arg(long)]
    strict: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable lines.
    Text,
    /// One JSON object per line.
    JsonLines,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Emit {
    /// The native line-oriented knowledge-graph format (loadable).
    Kg,
    /// Turtle for interop with external stores (export only).
    Turtle,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Serialization to emit.
    #[arg(long, value_enum, default_value = "kg")]
    emit: Emit,
    /// Print fact/node counts on the diagnostics stream.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct ReasonArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Serialized knowledge graph to materialize instead of a scene.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "root")]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Serialization to emit.
    #[arg(long, value_enum, default_value = "kg")]
    emit: Emit,
    /// Abort if materialization adds more facts than this.
    #[arg(long, value_name = "N")]
    max_iterations: Option<usize>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Serialized knowledge graph to query instead of a scene.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "root")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    max_iterations: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    kind: QueryKind,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QueryKind {
    /// All individuals of a concept (or its sub-concepts). Accepts a full
    /// IRI or a terminology local name such as `Box`.
    #[arg(long, value_name = "CONCEPT")]
    instances: Option<String>,
    /// Whether two individuals are transitively connected. Each accepts a
    /// scene path (`/world/box`) or a full IRI.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    connected: Option<Vec<String>>,
    /// Opened/closed/unlabeled state of every container individual.
    #[arg(long)]
    states: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Serialized knowledge graph.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct GenTboxLayerArgs {
    /// Terminology document; the built-in terminology when omitted.
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    /// Output file; standard output when omitted. Give the file the same
    /// name the scene's subLayers entry uses.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Source identifier recorded in the generated layer.
    #[arg(long, value_name = "NAME", default_value = "tags.usda")]
    source_id: String,
}

#[derive(Args)]
struct WatchArgs {
    /// Serialized knowledge graph holding the scene's current state.
    #[arg(long, value_name = "FILE")]
    kg: PathBuf,
    /// Update stream: `<path> <value> <timestamp>` per line; `-` reads
    /// standard input.
    #[arg(long, value_name = "FILE", default_value = "-")]
    updates: String,
    #[arg(long, value_name = "FILE")]
    tbox: Option<PathBuf>,
    #[arg(long, value_name = "IRI")]
    base: Option<String>,
    /// Rebuild the whole materialization per update instead of the
    /// incremental retract-and-rerun path (slower; useful for audits).
    #[arg(long)]
    full_rematerialize: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Defaults loadable from `--config`; field names double as the TOML keys.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    root_usda: Option<PathBuf>,
    tbox_file: Option<PathBuf>,
    base_iri: Option<String>,
    schema_extensions: Option<PathBuf>,
    output_path: Option<PathBuf>,
    max_iterations: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Pipeline inputs after merging flags over config-file defaults.
struct Pipeline {
    root: PathBuf,
    base: String,
    tbox: TBox,
    registry: SchemaRegistry,
    strict: bool,
}

impl Pipeline {
    fn new(args: &PipelineArgs, config: &FileConfig) -> Result<Self, CliError> {
        let root = args
            .root
            .clone()
            .or_else(|| config.root_usda.clone())
            .ok_or_else(|| CliError::Query("no scene given: pass --root or set root_usda in the config".into()))?;
        let tbox = load_tbox_arg(args.tbox.as_deref().or(config.tbox_file.as_deref()))?;
        let mut registry = builtin_registry();
        if let Some(path) = args.schemas.as_deref().or(config.schema_extensions.as_deref()) {
            load_schema_extensions(&read_file(path)?, &mut registry)?;
        }
        Ok(Pipeline {
            root,
            base: args
                .base
                .clone()
                .or_else(|| config.base_iri.clone())
                .unwrap_or_else(|| vocab::DEFAULT_BASE.to_string()),
            tbox,
            registry,
            strict: args.strict,
        })
    }

    /// parse → compose → validate → translate; diagnostics to stderr.
    fn translate_scene(&self) -> Result<Graph, CliError> {
        let source_id = self.root.to_string_lossy().into_owned();
        let text = read_file(&self.root)?;
        // The root parses here so its errors land in the parse family;
        // failures inside referenced sublayers are composition errors.
        let root = parse_source(&text, &source_id)?;
        let stack = resolve_sublayers(root, &FsLoader)?;
        let (stage, warnings) = compose_stage(&stack)?;
        for warning in &warnings {
            eprintln!("compose: {warning}");
        }
        let errors = validate_stage(&stage, &self.registry);
        if self.strict && errors > 0 {
            return Err(CliError::Validation(errors));
        }
        let translation = translate(&stage, &self.tbox, &self.registry, &self.base)?;
        for warning in &translation.warnings {
            eprintln!("translate: {warning}");
        }
        Ok(translation.graph)
    }
}

fn load_tbox_arg(path: Option<&Path>) -> Result<TBox, CliError> {
    match path {
        Some(path) => Ok(load_tbox(&read_file(path)?)?),
        None => Ok(builtin_tbox()),
    }
}

/// Validates every composed prim; findings go to stderr. Returns how many
/// were errors (as opposed to warnings).
fn validate_stage(stage: &Stage, registry: &SchemaRegistry) -> usize {
    let mut errors = 0;
    for prim in stage.iter() {
        for diagnostic in registry.validate_prim(
            &prim.path,
            prim.typed_schema.as_deref(),
            &prim.api_schemas,
            &prim.properties,
        ) {
            let label = match diagnostic.severity() {
                Severity::Error => {
                    errors += 1;
                    "error"
                }
                Severity::Warning => "warning",
            };
            eprintln!("validate: {label}: {diagnostic}");
        }
    }
    errors
}

fn render_graph(graph: &Graph, emit: Emit) -> String {
    match emit {
        Emit::Kg => serialize_graph(graph),
        Emit::Turtle => export_turtle(graph),
    }
}

fn materialize_with_cap(
    graph: &mut Graph,
    tbox: &TBox,
    max_iterations: Option<usize>,
) -> Result<usdkg::reason::InferenceReport, CliError> {
    let cap = max_iterations.unwrap_or_else(|| usdkg::reason::default_cap(graph.len()));
    Ok(materialize_capped(graph, tbox, cap)?)
}

/// An individual argument: a scene path or a full IRI.
fn resolve_individual(text: &str, base: &str) -> Result<Iri, CliError> {
    if text.starts_with('/') {
        let path = PrimPath::parse(text)
            .map_err(|e| CliError::Query(format!("`{text}`: {e}")))?;
        iri_of_path(base, &path).map_err(|e| CliError::Query(format!("`{text}`: {e}")))
    } else {
        Iri::new(text).map_err(|e| CliError::Query(format!("`{text}`: {e}")))
    }
}

/// A concept argument: a full IRI or a terminology local name.
fn resolve_concept(text: &str, tbox: &TBox) -> Result<Iri, CliError> {
    if text.contains("://") {
        Iri::new(text).map_err(|e| CliError::Query(format!("`{text}`: {e}")))
    } else {
        tbox.find_by_local_name(text)
            .ok_or_else(|| CliError::Query(format!("`{text}` names no terminology concept")))
    }
}

fn cmd_translate(args: &TranslateArgs, config: &FileConfig) -> Result<(), CliError> {
    let pipeline = Pipeline::new(&args.pipeline, config)?;
    let graph = pipeline.translate_scene()?;
    if args.stats {
        print_stats(&graph, Format::Text, true);
    }
    let out = args.out.clone().or_else(|| config.output_path.clone());
    write_output(out.as_deref(), &render_graph(&graph, args.emit))
}

fn cmd_reason(args: &ReasonArgs, config: &FileConfig) -> Result<(), CliError> {
    let (mut graph, tbox) = match &args.input {
        Some(path) => (
            load_graph(&read_file(path)?)?,
            load_tbox_arg(args.pipeline.tbox.as_deref().or(config.tbox_file.as_deref()))?,
        ),
        None => {
            let pipeline = Pipeline::new(&args.pipeline, config)?;
            (pipeline.translate_scene()?, pipeline.tbox)
        }
    };
    let report = materialize_with_cap(
        &mut graph,
        &tbox,
        args.max_iterations.or(config.max_iterations),
    )?;
    eprintln!(
        "reason: added {} facts over {} rounds",
        report.added, report.rounds
    );
    for violation in check_consistency(&graph, &tbox) {
        eprintln!("reason: violation: {violation}");
    }
    let out = args.out.clone().or_else(|| config.output_path.clone());
    write_output(out.as_deref(), &render_graph(&graph, args.emit))
}

fn cmd_query(args: &QueryArgs, config: &FileConfig) -> Result<(), CliError> {
    let (mut graph, tbox, base) = match &args.input {
        Some(path) => (
            load_graph(&read_file(path)?)?,
            load_tbox_arg(args.pipeline.tbox.as_deref().or(config.tbox_file.as_deref()))?,
            args.pipeline
                .base
                .clone()
                .or_else(|| config.base_iri.clone())
                .unwrap_or_else(|| vocab::DEFAULT_BASE.to_string()),
        ),
        None => {
            let pipeline = Pipeline::new(&args.pipeline, config)?;
            let graph = pipeline.translate_scene()?;
            (graph, pipeline.tbox, pipeline.base)
        }
    };
    materialize_with_cap(&mut graph, &tbox, args.max_iterations.or(config.max_iterations))?;

    if let Some(concept_text) = &args.kind.instances {
        let concept = resolve_concept(concept_text, &tbox)?;
        let found = query_instances(&graph, &tbox, &concept)
            .map_err(|QueryError::UnknownConcept(iri)| {
                CliError::Query(format!("`{iri}` is not a known concept"))
            })?;
        for iri in found {
            match args.format {
                Format::Text => println!("{iri}"),
                Format::JsonLines => println!(
                    "{}",
                    serde_json::json!({ "instance": iri.as_str(), "concept": concept.as_str() })
                ),
            }
        }
    } else if let Some(pair) = &args.kind.connected {
        let a = resolve_individual(&pair[0], &base)?;
        let b = resolve_individual(&pair[1], &base)?;
        let connected = query_connected(&graph, &a, &b);
        match args.format {
            Format::Text => println!("{connected}"),
            Format::JsonLines => println!(
                "{}",
                serde_json::json!({ "a": a.as_str(), "b": b.as_str(), "connected": connected })
            ),
        }
    } else {
        for (individual, state) in container_states(&graph, &tbox) {
            match args.format {
                Format::Text => println!("{individual} {}", state.as_str()),
                Format::JsonLines => println!(
                    "{}",
                    serde_json::json!({ "individual": individual.as_str(), "state": state.as_str() })
                ),
            }
        }
    }
    Ok(())
}

fn print_stats(graph: &Graph, format: Format, to_stderr: bool) {
    let stats = graph.stats();
    let rows = [
        ("nodes", stats.nodes),
        ("facts", stats.facts),
        ("concept_facts", stats.concept_facts),
        ("edge_facts", stats.edge_facts),
        ("existential_facts", stats.existential_facts),
        ("data_facts", stats.data_facts),
    ];
    match format {
        Format::Text => {
            for (key, value) in rows {
                if to_stderr {
                    eprintln!("{key}: {value}");
                } else {
                    println!("{key}: {value}");
                }
            }
        }
        Format::JsonLines => {
            let object = serde_json::Value::Object(
                rows.iter()
                    .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                    .collect(),
            );
            if to_stderr {
                eprintln!("{object}");
            } else {
                println!("{object}");
            }
        }
    }
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let graph = load_graph(&read_file(&args.input)?)?;
    print_stats(&graph, args.format, false);
    Ok(())
}

fn cmd_gen_tbox_layer(args: &GenTboxLayerArgs, config: &FileConfig) -> Result<(), CliError> {
    let tbox = load_tbox_arg(args.tbox.as_deref().or(config.tbox_file.as_deref()))?;
    let layer = generate_tagging_sublayer(&tbox, &args.source_id);
    let out = args.out.clone().or_else(|| config.output_path.clone());
    write_output(out.as_deref(), &print_layer(&layer))
}

fn cmd_watch(args: &WatchArgs, config: &FileConfig) -> Result<(), CliError> {
    let graph = load_graph(&read_file(&args.kg)?)?;
    let tbox = load_tbox_arg(args.tbox.as_deref().or(config.tbox_file.as_deref()))?;
    let base = args
        .base
        .clone()
        .or_else(|| config.base_iri.clone())
        .unwrap_or_else(|| vocab::DEFAULT_BASE.to_string());
    let mut watcher = StateWatcher::new(graph, tbox, base, args.full_rematerialize)?;

    let mut apply = |update: JointUpdate| -> Result<(), CliError> {
        match watcher.apply(&update) {
            Ok(events) => {
                for event in events {
                    match args.format {
                        Format::Text => println!("{event}"),
                        Format::JsonLines => println!(
                            "{}",
                            serde_json::json!({
                                "individual": event.individual.as_str(),
                                "label": event.label.as_str(),
                                "name": event.label.local_name(),
                            })
                        ),
                    }
                }
                std::io::stdout().flush().ok();
                Ok(())
            }
            // A live feed keeps going when one sample bounces; only the
            // reasoner cap is fatal.
            Err(WatchError::Update(e)) => {
                eprintln!("watch: skipped update: {e}");
                Ok(())
            }
            Err(WatchError::Reason(e)) => Err(CliError::Reason(e)),
        }
    };

    if args.updates == "-" {
        let stdin = std::io::stdin();
        for (idx, line) in stdin.lock().lines().enumerate() {
            let line = line.map_err(|e| CliError::Updates(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match parse_update_line(trimmed, idx + 1) {
                Ok(update) => apply(update)?,
                Err(e) => eprintln!("watch: skipped update: {e}"),
            }
        }
    } else {
        // A file is a finished artifact: malformed lines are fatal there,
        // unlike on a live stream.
        let text = read_file(Path::new(&args.updates))?;
        let updates = usdkg::kg::parse_update_stream(&text)
            .map_err(|e: UpdateError| CliError::Updates(e.to_string()))?;
        for update in updates {
            apply(update)?;
        }
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Translate(args) => cmd_translate(args, &config),
        Command::Reason(args) => cmd_reason(args, &config),
        Command::Query(args) => cmd_query(args, &config),
        Command::Stats(args) => cmd_stats(args),
        Command::GenTboxLayer(args) => cmd_gen_tbox_layer(args, &config),
        Command::Watch(args) => cmd_watch(args, &config),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
