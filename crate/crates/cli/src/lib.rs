//! `mtnlp serve`, `mtnlp parse` and `mtnlp models`.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtnlp_core::pipeline::registry::Registry;
use mtnlp_core::{Input, Pipeline, PipelineError, Task};
use mtnlp_server::{serve, PipelineEngine, ServerConfig};

#[derive(Debug, Parser)]
#[command(name = "mtnlp", version, about = "Multi-task NLP pipelines: offline parsing and an HTTP server")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve POST /parse and GET /healthz until interrupted.
    Serve(ServeArgs),
    /// Parse documents from a file or stdin, one JSON document per line.
    Parse(ParseArgs),
    /// List the models of a manifest.
    Models(ModelsArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "0.0.0.0")]
    pub host: String,

    #[arg(long, default_value_t = 8000)]
    pub port: u16,

    #[arg(long, default_value_t = 4)]
    pub workers: usize,

    /// How long a batch waits for more requests.
    #[arg(long, default_value_t = 5.0)]
    pub batch_window_ms: f64,

    /// Sentence cap per batch [default: the first model's batch size].
    #[arg(long)]
    pub max_batch_sentences: Option<usize>,

    /// Requests held at once before answering 503.
    #[arg(long, default_value_t = 1024)]
    pub queue_depth: usize,

    /// Run every request as its own batch.
    #[arg(long)]
    pub no_batching: bool,

    /// Model manifest [default: the bundled one].
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Model to load, in preference order; repeatable [default: all].
    #[arg(long = "model", value_name = "ID")]
    pub models: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Raw text, one document per line.
    Text,
    /// A JSON array of token arrays per line.
    Tokens,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Comma-separated tasks [default: all tasks of the model].
    #[arg(long, value_delimiter = ',')]
    pub tasks: Vec<Task>,

    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Model identifier [default: the first model serving --tasks].
    #[arg(long)]
    pub model: Option<String>,

    #[arg(long, value_enum, default_value_t = InputFormat::Text)]
    pub input_format: InputFormat,

    /// Input file [default: stdin].
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelsArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Input { line: usize, message: String },
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input { .. } | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{}", m),
            CliError::Input { line, message } => write!(f, "line {}: {}", line, message),
            CliError::Io(e) => write!(f, "{}", e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn config_error(e: PipelineError) -> CliError {
    CliError::Config(e.to_string())
}

pub fn registry(manifest: Option<&Path>) -> Result<Registry, CliError> {
    match manifest {
        Some(path) => Registry::from_file(path).map_err(config_error),
        None => Ok(Registry::builtin()),
    }
}

/// Manifest identifiers, models with more tasks first.
pub fn preferred_models(registry: &Registry) -> Result<Vec<String>, CliError> {
    let mut ranked = Vec::new();
    for id in registry.identifiers() {
        let tasks = registry.config(&id).map_err(config_error)?.tasks.len();
        ranked.push((std::cmp::Reverse(tasks), id));
    }
    ranked.sort();
    Ok(ranked.into_iter().map(|(_, id)| id).collect())
}

/// The named model, or the first preferred model serving every task.
pub fn pick_model(registry: &Registry, model: Option<&str>, tasks: &[Task]) -> Result<Arc<Pipeline>, CliError> {
    let candidates = match model {
        Some(id) => vec![id.to_string()],
        None => preferred_models(registry)?,
    };
    for id in &candidates {
        let pipeline = registry.load(id).map_err(config_error)?;
        if tasks.iter().all(|t| pipeline.tasks().contains(t)) {
            return Ok(pipeline);
        }
    }
    let names: Vec<&str> = tasks.iter().map(|t| t.as_str()).collect();
    Err(CliError::Config(format!(
        "no model among {} serves {}",
        candidates.join(", "),
        names.join(",")
    )))
}

/// Parses every line of `input` and writes one JSON document per line.
pub fn run_parse(args: &ParseArgs, input: impl BufRead, mut output: impl Write) -> Result<(), CliError> {
    let registry = registry(args.manifest.as_deref())?;
    let pipeline = pick_model(&registry, args.model.as_deref(), &args.tasks)?;
    let tasks = (!args.tasks.is_empty()).then_some(args.tasks.as_slice());
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let bad = |message: String| CliError::Input { line: i + 1, message };
        let input = match args.input_format {
            InputFormat::Text => Input::from(line.as_str()),
            InputFormat::Tokens if line.trim().is_empty() => Input::Tokens(Vec::new()),
            InputFormat::Tokens => Input::Tokens(
                serde_json::from_str(&line).map_err(|e| bad(format!("expected [[token, ...], ...]: {}", e)))?,
            ),
        };
        let doc = pipeline.parse(input, tasks).map_err(|e| bad(e.to_string()))?;
        let json = doc.to_json().map_err(|e| bad(e.to_string()))?;
        writeln!(output, "{}", json)?;
    }
    output.flush()?;
    Ok(())
}

pub fn server_config(args: &ServeArgs, registry: &Registry, models: &[String]) -> Result<ServerConfig, CliError> {
    if !(args.batch_window_ms.is_finite() && args.batch_window_ms >= 0.0) {
        return Err(CliError::Config(format!("invalid batch window {} ms", args.batch_window_ms)));
    }
    let first = models
        .first()
        .ok_or_else(|| CliError::Config("the manifest has no models".into()))?;
    let cap = match args.max_batch_sentences {
        Some(cap) => cap,
        None => registry.config(first).map_err(config_error)?.batch.batch_size,
    };
    Ok(ServerConfig {
        host: args.host.clone(),
        port: args.port,
        workers: args.workers,
        batch_window: Duration::from_secs_f64(args.batch_window_ms / 1000.0),
        max_batch_sentences: cap,
        batching: !args.no_batching,
        queue_depth: args.queue_depth,
        record_tickets: false,
    })
}

/// Loads the models and serves until Ctrl-C.
pub fn run_serve(args: &ServeArgs) -> Result<(), CliError> {
    let registry = registry(args.manifest.as_deref())?;
    let models = if args.models.is_empty() {
        preferred_models(&registry)?
    } else {
        args.models.clone()
    };
    let config = server_config(args, &registry, &models)?;
    let engine = PipelineEngine::load(&registry, &models).map_err(config_error)?;

    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let server = serve(&config, Arc::new(engine))
            .await
            .map_err(|e| CliError::Config(format!("cannot listen on {}:{}: {}", config.host, config.port, e)))?;
        eprintln!("mtnlp: serving {} on http://{}", models.join(", "), server.local_addr());
        tokio::signal::ctrl_c().await?;
        eprintln!("mtnlp: shutting down");
        server.shutdown().await?;
        Ok(())
    })
}

pub fn run_models(args: &ModelsArgs, mut output: impl Write) -> Result<(), CliError> {
    let registry = registry(args.manifest.as_deref())?;
    for id in preferred_models(&registry)? {
        let config = registry.config(&id).map_err(config_error)?;
        let tasks: Vec<&str> = config.tasks.iter().map(|t| t.as_str()).collect();
        writeln!(output, "{}\t{}\t{}", id, config.language, tasks.join(","))?;
    }
    Ok(())
}
