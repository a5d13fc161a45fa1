use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plscan::cli::{self, InputKind, RunConfig};
use plscan::pipeline::{FitParams, DEFAULT_LEAF_CAPACITY};
use plscan::{Measure, Metric, PlscanError, TreeKind};

#[derive(Parser)]
#[command(name = "plscan", version, about = "Persistent leaf-cluster selection for density-based clustering")]
struct Cli {
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster the input and write labels, trace, layers and the leaf tree.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory.
        #[arg(short, long, default_value = "plscan_out")]
        output: PathBuf,
        /// Also write condensed_tree.csv.
        #[arg(long)]
        condensed: bool,
    },
    /// Print labels for the leaves alive at one trace breakpoint.
    Layer {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        cut: f64,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check every stage against brute-force references.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Check this leaf_tree.csv instead of the computed one.
        #[arg(long)]
        leaf_tree: Option<PathBuf>,
    },
    /// Print the leaf tree as CSV.
    ExportLeafTree {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Points,
    Forest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tree {
    Kd,
    Ball,
}

#[derive(Args)]
struct InputArgs {
    /// Points CSV (one row per point) or forest CSV with header u,v,weight.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "points")]
    kind: Kind,
    /// euclidean, manhattan or cosine.
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Neighbour count for core distances.
    #[arg(short, long, default_value_t = 4)]
    k: usize,
    /// Smallest minimum cluster size considered; defaults to max(k, 2).
    #[arg(long)]
    min_cluster_size: Option<f64>,
    /// size, d, lambda, size_d or size_lambda.
    #[arg(long, default_value = "size")]
    measure: Measure,
    #[arg(long, default_value_t = 5)]
    top_layers: usize,
    /// One positive weight per point.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Vertex count of a forest input, when isolated vertices trail the edges.
    #[arg(long)]
    num_points: Option<usize>,
    #[arg(long, value_enum)]
    tree: Option<Tree>,
    #[arg(long, default_value_t = DEFAULT_LEAF_CAPACITY)]
    leaf_capacity: usize,
}

impl InputArgs {
    fn config(&self, output: PathBuf) -> RunConfig {
        RunConfig {
            input: self.input.clone(),
            kind: match self.kind {
                Kind::Points => InputKind::Points,
                Kind::Forest => InputKind::Forest,
            },
            metric: self.metric,
            params: FitParams {
                k: self.k,
                min_cluster_size: self.min_cluster_size,
                measure: self.measure,
                tree: self.tree.map(|t| match t {
                    Tree::Kd => TreeKind::KdTree,
                    Tree::Ball => TreeKind::BallTree,
                }),
                leaf_capacity: self.leaf_capacity,
                top_layers: self.top_layers,
            },
            weights: self.weights.clone(),
            num_points: self.num_points,
            output,
            write_condensed: false,
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), PlscanError> {
    match output {
        Some(path) => plscan::io::write_file(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(PlscanError::from),
    }
}

fn execute(command: Command) -> Result<ExitCode, PlscanError> {
    match command {
        Command::Fit { input, output, condensed } => {
            let mut config = input.config(output);
            config.write_condensed = condensed;
            let summary = cli::run(&config)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!("{summary}");
            println!("wrote {} files to {}", summary.files.len(), config.output.display());
        }
        Command::Layer { input, cut, output } => {
            let text = cli::layer(&input.config(PathBuf::new()), cut)?;
            emit(&text, output.as_ref())?;
        }
        Command::Verify { input, leaf_tree } => {
            let report = cli::verify(&input.config(PathBuf::new()), leaf_tree.as_deref())?;
            print!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ExportLeafTree { input, output } => {
            let text = cli::export_leaf_tree(&input.config(PathBuf::new()))?;
            emit(&text, output.as_ref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
