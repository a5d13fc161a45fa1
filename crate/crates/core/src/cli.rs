//! Command-line orchestration: loading inputs, running the pipeline, writing
//! artefacts and the `verify` cross-check runner.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{PlscanError, Result};
use crate::io;
use crate::leaf_tree::Segment;
use crate::oracle;
use crate::pipeline::{fit_forest, fit_points, Fit, FitParams};
use crate::select::extract_layer;
use crate::spatial::{Metric, PointSet, SpatialIndex, TreeKind};

/// Largest input for which `verify` runs the full-scan neighbour and Prim checks.
pub const BRUTE_LIMIT: usize = 3000;
/// Largest input for which `verify` re-condenses at every threshold.
pub const SWEEP_LIMIT: usize = 3000;
/// Largest input for which `verify` builds the pruning metric space.
pub const BARCODE_LIMIT: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputKind {
    #[default]
    Points,
    Forest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub kind: InputKind,
    pub metric: Metric,
    pub params: FitParams,
    pub weights: Option<PathBuf>,
    /// Vertex count for forest inputs; inferred from the edges when absent.
    pub num_points: Option<usize>,
    pub output: PathBuf,
    /// Also write `condensed_tree.csv`.
    pub write_condensed: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            kind: InputKind::Points,
            metric: Metric::Euclidean,
            params: FitParams::default(),
            weights: None,
            num_points: None,
            output: output.into(),
            write_condensed: false,
        }
    }
}

/// Parsed inputs of a run.
#[derive(Debug, Clone)]
pub enum Input {
    Points(PointSet),
    Forest(crate::mst::SpanningForest),
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| PlscanError::Io(format!("{}: {e}", path.display())))
}

pub fn load_input(config: &RunConfig) -> Result<(Input, Option<Vec<f64>>)> {
    let name = config.input.display().to_string();
    let input = match config.kind {
        InputKind::Points => {
            let (data, dim) = io::read_points(&name, open(&config.input)?)?;
            Input::Points(PointSet::new(data, dim, config.metric)?)
        }
        InputKind::Forest => Input::Forest(io::read_forest(&name, open(&config.input)?, config.num_points)?),
    };
    let weights = match &config.weights {
        Some(path) => Some(io::read_weights(&path.display().to_string(), open(path)?)?),
        None => None,
    };
    Ok((input, weights))
}

pub fn fit_input(input: &Input, weights: Option<&[f64]>, params: &FitParams) -> Result<Fit> {
    match input {
        Input::Points(points) => fit_points(points, weights, params),
        Input::Forest(forest) => fit_forest(forest.clone(), weights, params),
    }
}

/// What `run` wrote, for the summary line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub num_points: usize,
    pub num_clusters: usize,
    pub noise_fraction: f64,
    pub cut: f64,
    pub total_persistence: f64,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} points, {} clusters, noise fraction {}, cut at min_size {} (total persistence {})",
            self.num_points,
            self.num_clusters,
            io::format_float(self.noise_fraction, 4),
            io::format_float(self.cut, 9),
            io::format_float(self.total_persistence, 9),
        )
    }
}

fn no_leaf_warnings(fit: &Fit) -> Vec<String> {
    fit.components_without_leaves()
        .into_iter()
        .map(|(c, size)| {
            format!(
                "component {c} ({size} points) never splits into two clusters of the minimum size; \
                 its points are noise at every cut"
            )
        })
        .collect()
}

/// Fits the input and writes every artefact into the output directory.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let (input, weights) = load_input(config)?;
    let fit = fit_input(&input, weights.as_deref(), &config.params)?;
    std::fs::create_dir_all(&config.output)?;

    let mut files = Vec::new();
    let mut emit = |name: String, text: String| -> Result<()> {
        let path = config.output.join(name);
        io::write_file(&path, &text)?;
        files.push(path);
        Ok(())
    };
    emit("labels.csv".into(), io::labels_csv(&fit.clustering))?;
    emit("trace.csv".into(), io::trace_csv(&fit.trace))?;
    emit("layers.csv".into(), io::layers_csv(&fit.layers))?;
    emit("leaf_tree.csv".into(), io::leaf_tree_csv(fit.leaf_tree.segments()))?;
    for (rank, layer) in fit.layers.layers.iter().enumerate() {
        let clustering = extract_layer(layer.cut, &fit.leaf_tree, &fit.condensed);
        emit(format!("layer_{rank}.csv"), io::labels_csv(&clustering))?;
    }
    if config.write_condensed {
        emit("condensed_tree.csv".into(), io::condensed_csv(&fit.condensed))?;
    }

    let best = fit.trace.totals.iter().copied().fold(0.0, f64::max);
    Ok(RunSummary {
        num_points: fit.clustering.labels.len(),
        num_clusters: fit.clustering.num_clusters(),
        noise_fraction: fit.clustering.noise_fraction(),
        cut: fit.clustering.cut,
        total_persistence: best,
        files,
        warnings: no_leaf_warnings(&fit),
    })
}

/// `labels.csv`-formatted clustering at trace breakpoint `cut`.
pub fn layer(config: &RunConfig, cut: f64) -> Result<String> {
    let (input, weights) = load_input(config)?;
    let fit = fit_input(&input, weights.as_deref(), &config.params)?;
    Ok(io::labels_csv(&extract_layer(cut, &fit.leaf_tree, &fit.condensed)))
}

/// `leaf_tree.csv` contents for the input.
pub fn export_leaf_tree(config: &RunConfig) -> Result<String> {
    let (input, weights) = load_input(config)?;
    let fit = fit_input(&input, weights.as_deref(), &config.params)?;
    Ok(io::leaf_tree_csv(fit.leaf_tree.segments()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Differences on failure, the reason when skipped.
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    fn record(&mut self, name: &'static str, diffs: Vec<String>) {
        let status = if diffs.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(CheckOutcome { name, status, details: diffs });
    }

    fn skip(&mut self, name: &'static str, reason: impl Into<String>) {
        self.checks.push(CheckOutcome { name, status: CheckStatus::Skip, details: vec![reason.into()] });
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => writeln!(f, "PASS {}", c.name)?,
                CheckStatus::Skip => writeln!(f, "SKIP {} ({})", c.name, c.details.join("; "))?,
                CheckStatus::Fail => {
                    writeln!(f, "FAIL {}", c.name)?;
                    for d in &c.details {
                        writeln!(f, "  {d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Cross-checks every stage against the reference implementations. When
/// `leaf_tree` is given, its segments replace the computed ones in the leaf
/// interval comparisons.
pub fn verify(config: &RunConfig, leaf_tree: Option<&Path>) -> Result<VerifyReport> {
    let (input, weights) = load_input(config)?;
    let fit = fit_input(&input, weights.as_deref(), &config.params)?;
    let n = fit.linkage.n();
    let mut report = VerifyReport::default();

    match &input {
        Input::Points(points) if n <= BRUTE_LIMIT => {
            let params = &config.params;
            let kind = params.tree.unwrap_or_else(|| TreeKind::default_for(points.metric()));
            let index = SpatialIndex::build(points, kind, params.leaf_capacity)?;
            report.record("neighbours", oracle::check_neighbours(points, &index, params.k));
            report.record("mst", oracle::check_mst(points, &index, params.k));
        }
        Input::Points(_) => {
            report.skip("neighbours", format!("n > {BRUTE_LIMIT}"));
            report.skip("mst", format!("n > {BRUTE_LIMIT}"));
        }
        Input::Forest(_) => {
            report.skip("neighbours", "precomputed forest");
            report.skip("mst", "precomputed forest");
        }
    }

    report.record("condense", oracle::check_condense(&fit.linkage, &fit.condensed));

    let segments: Vec<Segment> = match leaf_tree {
        Some(path) => io::read_leaf_tree(&path.display().to_string(), open(path)?)?,
        None => fit.leaf_tree.segments().to_vec(),
    };
    let mut shape = Vec::new();
    if segments.len() != fit.leaf_tree.len() {
        shape.push(format!("{} segments, expected {}", segments.len(), fit.leaf_tree.len()));
    }
    for (i, (a, b)) in segments.iter().zip(fit.leaf_tree.segments()).enumerate() {
        if a.parent != b.parent {
            shape.push(format!("segment {i}: parent {}, expected {}", a.parent, b.parent));
        }
    }
    report.record("leaf tree shape", shape);

    let unit = weights.as_ref().is_none_or(|w| w.iter().all(|&x| x == 1.0));
    let single = fit.forest.num_components() == 1;
    let whole = fit.condensed.min_cluster_size().fract() == 0.0;
    let skip_reason = if !unit {
        Some("needs unit sample weights".to_owned())
    } else if !single {
        Some("needs a connected input".to_owned())
    } else if !whole {
        Some("needs an integer minimum cluster size".to_owned())
    } else {
        None
    };
    match &skip_reason {
        Some(why) => report.skip("sweep", why.clone()),
        None if n > SWEEP_LIMIT => report.skip("sweep", format!("n > {SWEEP_LIMIT}")),
        None => report
            .record("sweep", oracle::check_sweep(&fit.linkage, &fit.condensed, &fit.leaf_tree, &segments)),
    }
    match &skip_reason {
        Some(why) => report.skip("barcode", why.clone()),
        None if n > BARCODE_LIMIT => report.skip("barcode", format!("n > {BARCODE_LIMIT}")),
        None => report.record(
            "barcode",
            oracle::check_barcode(&fit.linkage, &fit.condensed, &fit.leaf_tree, &segments),
        ),
    }
    Ok(report)
}
