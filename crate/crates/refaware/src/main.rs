use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use refaware::render::{render, Format};
use refaware::report::parse_report;
use refaware::{
    analyze, to_canonical, AnalyzeRequest, CommitSource, ConfigOverrides, DocumentStore, FsStore,
    GitRepo, Result,
};

/// Refactoring-aware change analysis and review service.
#[derive(Parser)]
#[command(name = "refaware", version)]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect refactorings and compute churn metrics for a change set.
    Analyze(Box<AnalyzeArgs>),
    /// Serve stored reports and collect review events over HTTP.
    Serve(ServeArgs),
    /// Render a report file.
    Report(ReportArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("change").required(true).args(["head", "commits"])))]
struct AnalyzeArgs {
    #[arg(long, default_value = ".")]
    repo: PathBuf,
    /// Integration target the change set is compared against.
    #[arg(long)]
    base: String,
    /// Tip of the change set; commits are the first-parent history `base..head`.
    #[arg(long)]
    head: Option<String>,
    /// Explicit commit list, oldest first.
    #[arg(long, num_args = 1..)]
    commits: Vec<String>,
    /// TOML file with detector thresholds.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also save the report in the document store.
    #[arg(long)]
    store: bool,
    #[arg(long, default_value = "refaware-data")]
    data_dir: PathBuf,
    /// Defaults to the repository directory name.
    #[arg(long)]
    repo_id: Option<String>,
    /// Defaults to `<base>..<head>`.
    #[arg(long)]
    change_set: Option<String>,
    #[arg(long)]
    tau_match: Option<f64>,
    #[arg(long)]
    tau_extract: Option<f64>,
    #[arg(long)]
    min_extract_tokens: Option<usize>,
    #[arg(long)]
    idf_smoothing: Option<f64>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    #[arg(long, default_value = "refaware-data")]
    data_dir: PathBuf,
    /// Directory of static files for the review interface.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_analyze(a: AnalyzeArgs) -> Result<()> {
    let file = match &a.config {
        Some(path) => ConfigOverrides::load(path)?,
        None => ConfigOverrides::default(),
    };
    let flags = ConfigOverrides {
        tau_match: a.tau_match,
        tau_extract: a.tau_extract,
        min_extract_tokens: a.min_extract_tokens,
        idf_smoothing: a.idf_smoothing,
    };
    let config = file.merge(flags).resolve()?;

    let repo = GitRepo::open(&a.repo)?;
    let repo_id = match a.repo_id {
        Some(id) => id,
        None => std::fs::canonicalize(repo.root())?
            .file_name()
            .map_or_else(|| "repo".to_string(), |n| n.to_string_lossy().into_owned()),
    };
    let tip = a
        .head
        .clone()
        .or_else(|| a.commits.last().cloned())
        .unwrap_or_default();
    let change_set_id = a.change_set.unwrap_or_else(|| format!("{}..{tip}", a.base));
    let commits = match a.head {
        Some(head) if a.commits.is_empty() => CommitSource::Range { head },
        _ => CommitSource::List(a.commits),
    };
    let report = analyze(
        &repo,
        &AnalyzeRequest {
            repo_id,
            change_set_id,
            base: a.base,
            commits,
            config,
        },
    )?;
    if a.store {
        FsStore::open(&a.data_dir)?.store(&report)?;
    }
    write_output(a.out.as_deref(), &to_canonical(&report))
}

fn run_report(a: ReportArgs) -> Result<()> {
    let bytes = std::fs::read(&a.input)?;
    let report = parse_report(&bytes)?;
    write_output(a.out.as_deref(), &render(&report, a.format))
}

fn run_serve(a: ServeArgs) -> Result<()> {
    let store: Arc<dyn DocumentStore> = Arc::new(FsStore::open(&a.data_dir)?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(refaware::server::serve(
        SocketAddr::new(a.bind, a.port),
        store,
        a.ui_dir,
    ))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Analyze(a) => run_analyze(*a),
        Command::Serve(a) => run_serve(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", to_canonical(&e.document()));
            ExitCode::FAILURE
        }
    }
}
