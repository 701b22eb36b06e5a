use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use stcb_core::pipeline::{
    read_snippet_file, render_tree, Pipeline, PipelineConfig, PipelineError, Scheme, SchemeReport,
    CONFIG_ENV,
};
use stcb_core::snippet::write_snippet_xml;

/// Clusters Arabic search-result snippets into labeled groups.
#[derive(Parser)]
#[command(name = "stcb", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML config file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Search provider name.
    #[arg(long, global = true)]
    provider: Option<String>,
    /// Fixture corpus directory for the "fixture" provider.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Clustering scheme: new or stem-first.
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// Number of base clusters kept for merging.
    #[arg(long, global = true)]
    k_top: Option<usize>,
    /// Overlap threshold for merging base clusters.
    #[arg(long, global = true)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a snippet file (XML or JSON lines).
    Cluster {
        input: PathBuf,
        /// Print the full result as JSON.
        #[arg(long, conflicts_with = "tree")]
        json: bool,
        /// Print an indented cluster tree (the default).
        #[arg(long)]
        tree: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Cluster a snippet file with both schemes and report the difference.
    Compare {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Fetch snippets for a query, cache them and write them as XML.
    Fetch {
        query: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Port to listen on; 0 picks a free one.
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

/// Failure classes, each with its own exit status.
enum Failure {
    Parse(anyhow::Error),
    Config(anyhow::Error),
    Provider(anyhow::Error),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Config(_) => 3,
            Failure::Provider(_) => 4,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Parse(e) | Failure::Config(e) | Failure::Provider(e) | Failure::Other(e) => e,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Fetch(_) => Failure::Provider(e.into()),
            PipelineError::Read { .. } | PipelineError::Parse { .. } => Failure::Parse(e.into()),
            _ => Failure::Other(e.into()),
        }
    }
}

fn config_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into().context("config"))
}

fn build_pipeline(global: &Global) -> Result<Pipeline, Failure> {
    let mut config = PipelineConfig::resolve(global.config.as_deref()).map_err(config_failure)?;
    if let Some(p) = &global.provider {
        config.provider_name = p.clone();
    }
    if let Some(dir) = &global.corpus {
        config.corpus_dir = Some(dir.clone());
    }
    if let Some(s) = &global.scheme {
        config.scheme = s.parse::<Scheme>().map_err(config_failure)?;
    }
    if let Some(k) = global.k_top {
        config.similarity.k_top = k;
    }
    if let Some(a) = global.alpha {
        config.similarity.alpha_sim = a;
    }
    Pipeline::new(config).map_err(config_failure)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Other),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Other(e.into()))
        }
    }
}

fn percent(rate: f64) -> String {
    format!("{:.0}%", rate * 100.0)
}

fn render_report(report: &SchemeReport) -> String {
    let (a, b) = (&report.stem_first, &report.new_scheme);
    let mut out = format!(
        "query: {}\nsnippets: {}\n\n",
        report.query, report.snippet_count
    );
    out.push_str(&format!("{:<22}{:>12}{:>12}\n", "", "stem-first", "new"));
    out.push_str(&format!(
        "{:<22}{:>12}{:>12}\n",
        "clusters", a.cluster_count, b.cluster_count
    ));
    out.push_str(&format!(
        "{:<22}{:>12.2}{:>12.2}\n",
        "mean label words", a.mean_label_length, b.mean_label_length
    ));
    out.push_str(&format!(
        "{:<22}{:>12}{:>12}\n",
        "surface labels",
        percent(a.surface_label_rate),
        percent(b.surface_label_rate)
    ));
    out.push_str(&format!(
        "{:<22}{:>12}{:>12}\n",
        "bare-root labels",
        percent(a.bare_root_fraction),
        percent(b.bare_root_fraction)
    ));
    for summary in [a, b] {
        out.push_str(&format!("\n[{}]\n", summary.scheme));
        for c in &summary.clusters {
            let ids: Vec<String> = c.members.iter().map(u32::to_string).collect();
            out.push_str(&format!("  {} ({})\n", c.display_label, ids.join(",")));
        }
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cluster {
            input,
            json,
            tree: _,
            output,
        } => {
            let pipeline = build_pipeline(&cli.global)?;
            let result = pipeline.run_file(&input)?;
            let text = if json {
                let mut s =
                    serde_json::to_string_pretty(&result).map_err(|e| Failure::Other(e.into()))?;
                s.push('\n');
                s
            } else {
                render_tree(&result.tree_view())
            };
            emit(output.as_deref(), &text)
        }
        Command::Compare {
            input,
            json,
            output,
        } => {
            let pipeline = build_pipeline(&cli.global)?;
            let snippets = read_snippet_file(&input)?;
            let query = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let report = pipeline.compare(&query, snippets);
            let text = if json {
                let mut s =
                    serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.into()))?;
                s.push('\n');
                s
            } else {
                render_report(&report)
            };
            emit(output.as_deref(), &text)
        }
        Command::Fetch { query, output } => {
            let pipeline = build_pipeline(&cli.global)?;
            let snippets = pipeline.fetch(&query)?;
            emit(output.as_deref(), &write_snippet_xml(&snippets))
        }
        Command::Serve { host, port } => {
            let pipeline = build_pipeline(&cli.global)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Other(e.into()))?;
            runtime
                .block_on(stcb_service::serve(
                    pipeline,
                    SocketAddr::new(host, port),
                    |addr| {
                        println!("listening on http://{addr}");
                        let _ = std::io::stdout().flush();
                    },
                    stcb_service::shutdown_signal(),
                ))
                .map_err(|e| {
                    Failure::Other(anyhow!(e).context(format!("cannot serve on {host}:{port}")))
                })
        }
    }
}

/// Joins the error chain, skipping causes whose text the previous message
/// already includes.
fn describe(error: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in error.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("stcb: {}", describe(failure.error()));
            ExitCode::from(failure.code())
        }
    }
}
