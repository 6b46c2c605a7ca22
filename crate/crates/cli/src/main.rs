use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use guide_core::catalog::{load_catalog, measure_token_reduction};
use guide_core::engine::{run_pipeline, HeuristicBackend, Outcome};
use guide_core::ir::{validate_document_value, FeatureStatus};
use guide_core::llm::tokens::estimator_by_name;
use guide_core::llm::{FixtureStore, Gateway, GatewayConfig, Mode};
use guide_core::render::{render_svg, RenderOptions};
use guide_core::{Catalog, ChatModel, Frame, GuiDocument, PipelineConfig};
use guide_service::{AppState, ProjectStore, ServiceConfig};

#[derive(Parser)]
#[command(name = "guide", version, about = "Generate GUI prototypes from app descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    /// OpenAI-compatible chat completions endpoint.
    Http,
    /// Offline rule-based stand-in for demos.
    Heuristic,
}

#[derive(clap::Args)]
struct LlmArgs {
    /// live, record or replay. Defaults to GUIDE_LLM_MODE, then replay.
    #[arg(long)]
    mode: Option<Mode>,
    /// JSONL fixture file, required for record and replay.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Model behind live and record modes.
    #[arg(long, value_enum, default_value = "http")]
    backend: BackendKind,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the REST API.
    Serve {
        #[arg(long, env = "GUIDE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "GUIDE_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Allowed CORS origin; repeatable. Any origin when omitted.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
        /// Built UI assets to serve under /ui.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[command(flatten)]
        llm: LlmArgs,
    },
    /// Run the whole pipeline on one description.
    Generate {
        #[arg(long)]
        description_file: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value = "doc.json")]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Stage traces as JSON.
        #[arg(long)]
        traces: Option<PathBuf>,
        /// Frame as WIDTHxHEIGHT.
        #[arg(long, default_value = "412x915", value_parser = parse_frame)]
        frame: Frame,
        #[command(flatten)]
        llm: LlmArgs,
    },
    /// Catalog utilities.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Validate a document against the IR schema and the catalog.
    Validate {
        doc: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Render a document to SVG.
    Render {
        doc: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        outlines: bool,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Write the OpenAPI description of the service.
    Openapi {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Token reduction of the simplified view against full specs.
    Stats {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value = "word-punct")]
        estimator: String,
        #[arg(long)]
        json: bool,
    },
}

fn parse_frame(s: &str) -> Result<Frame, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT, e.g. 412x915")?;
    let frame = Frame::new(
        w.trim().parse().map_err(|e| format!("width: {e}"))?,
        h.trim().parse().map_err(|e| format!("height: {e}"))?,
    );
    if frame.is_valid() {
        Ok(frame)
    } else {
        Err("frame dimensions must be positive".into())
    }
}

fn usage_error(message: String) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, message).exit()
}

fn catalog_from(path: Option<&Path>) -> Result<Catalog> {
    let Some(path) = path else {
        return Ok(Catalog::bundled());
    };
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let loaded = load_catalog(file).with_context(|| format!("loading {}", path.display()))?;
    for w in &loaded.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(loaded.catalog)
}

fn gateway_from(args: &LlmArgs) -> Result<Gateway> {
    let mut cfg = GatewayConfig::from_env()?;
    if let Some(mode) = args.mode {
        cfg.mode = mode;
    }
    cfg.fixtures = args.fixtures.clone();
    if cfg.mode != Mode::Live && cfg.fixtures.is_none() {
        usage_error(format!("--mode {} needs --fixtures <PATH>", cfg.mode));
    }
    Ok(match (cfg.mode, args.backend) {
        (_, BackendKind::Http) => Gateway::from_config(&cfg)?,
        (Mode::Replay, BackendKind::Heuristic) => Gateway::from_config(&cfg)?,
        (Mode::Live, BackendKind::Heuristic) => Gateway::live(Arc::new(HeuristicBackend::default())),
        (Mode::Record, BackendKind::Heuristic) => {
            let path = cfg.fixtures.as_ref().expect("checked above");
            Gateway::record(Arc::new(HeuristicBackend::default()), Arc::new(FixtureStore::open_or_create(path)?))
        }
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_document(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))
}

fn generate(
    description_file: &Path,
    catalog: Option<&Path>,
    out: &Path,
    svg: Option<&Path>,
    traces_out: Option<&Path>,
    frame: Frame,
    llm: &LlmArgs,
) -> Result<ExitCode> {
    let gateway = gateway_from(llm)?;
    let description = fs::read_to_string(description_file)
        .with_context(|| format!("reading {}", description_file.display()))?;
    let catalog = catalog_from(catalog)?;
    let cfg = PipelineConfig::default();
    let (doc, traces) = match run_pipeline(description.trim(), &catalog, frame, &cfg, &gateway) {
        Ok(done) => done,
        Err(failure) => {
            if let Some(path) = traces_out {
                write(path, &serde_json::to_string_pretty(&failure.traces)?)?;
            }
            bail!("{}", failure.error);
        }
    };
    for t in &traces {
        let feature = t.feature_id.as_deref().unwrap_or("-");
        let outcome = match t.outcome {
            Outcome::Ok => "ok",
            Outcome::Repaired => "repaired",
            Outcome::Failed => "FAILED",
        };
        eprintln!("{:<10} {feature:<28} {outcome:<9} attempts={}", t.stage.to_string(), t.attempts);
        for w in &t.warnings {
            eprintln!("  warning: {w}");
        }
        if let Some(e) = &t.error {
            eprintln!("  error: {e}");
        }
    }
    write(out, &(doc.to_json_pretty() + "\n"))?;
    if let Some(path) = svg {
        write(path, &render_svg(&doc, &catalog, &RenderOptions::default())?)?;
    }
    if let Some(path) = traces_out {
        write(path, &serde_json::to_string_pretty(&traces)?)?;
    }
    let pending: Vec<&str> =
        doc.features.iter().filter(|f| f.status == FeatureStatus::Pending).map(|f| f.name.as_str()).collect();
    if !pending.is_empty() {
        eprintln!("not implemented: {}", pending.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Serve { port, data_dir, host, catalog, cors_origins, ui_dir, llm } => {
            let catalog = catalog_from(catalog.as_deref())?;
            let llm: Arc<dyn ChatModel> = Arc::new(gateway_from(&llm)?);
            let store = ProjectStore::open(&data_dir)?;
            let pipeline = PipelineConfig::default();
            let state = Arc::new(AppState::new(store, catalog, llm, pipeline.clone()));
            let addr: SocketAddr = format!("{host}:{port}").parse().context("bad --host/--port")?;
            let cfg = ServiceConfig { cors_origins, ui_dir, pipeline };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(guide_service::serve(addr, state, cfg))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate { description_file, catalog, out, svg, traces, frame, llm } => generate(
            &description_file,
            catalog.as_deref(),
            &out,
            svg.as_deref(),
            traces.as_deref(),
            frame,
            &llm,
        ),
        Command::Catalog { command: CatalogCommand::Stats { catalog, estimator, json } } => {
            let catalog = catalog_from(catalog.as_deref())?;
            let est = estimator_by_name(&estimator).ok_or_else(|| anyhow!("unknown estimator `{estimator}`"))?;
            let report = measure_token_reduction(&catalog, est.as_ref())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("components:        {}", report.components);
                println!("estimator:         {}", report.estimator);
                println!("full specs:        {} tokens", report.full_tokens);
                println!("simplified view:   {} tokens", report.simplified_tokens);
                println!("reduction ratio:   {:.4}", report.ratio);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { doc, catalog } => {
            let catalog = catalog_from(catalog.as_deref())?;
            let report = validate_document_value(&read_document(&doc)?, &catalog);
            if report.valid {
                println!("{}: valid", doc.display());
                return Ok(ExitCode::SUCCESS);
            }
            for v in &report.violations {
                println!("{} [{}] {}", if v.path.is_empty() { "/" } else { &v.path }, v.rule, v.message);
            }
            eprintln!("{}: {} violation(s)", doc.display(), report.violations.len());
            Ok(ExitCode::FAILURE)
        }
        Command::Render { doc, svg, scale, outlines, catalog } => {
            let catalog = catalog_from(catalog.as_deref())?;
            let doc: GuiDocument = serde_json::from_value(read_document(&doc)?)?;
            let opts = RenderOptions { scale, show_feature_outlines: outlines, ..RenderOptions::default() };
            write(&svg, &render_svg(&doc, &catalog, &opts)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Openapi { out } => {
            let text = serde_json::to_string_pretty(&guide_service::openapi::openapi())? + "\n";
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
