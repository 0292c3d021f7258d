//! Query execution and the `pathsum` command line.
//!
//! Indices are 1-based on the command line and in every emitted document,
//! 0-based everywhere else in the crate.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::engine::{assemble, PathSumEngine};
use crate::error::{Error, Result};
use crate::gabp::{gabp_marginals, MessageTable};
use crate::graph::{EdgeWeight, ModelGraph};
use crate::io::load_matrix;
use crate::model::{BlockPartition, InformationModel};
use crate::validation::{
    determinant_formula_entry, diagnose, direct_inverse, require_positive_definite,
    DiagnosticReport,
};

/// Deviation from the direct oracle above which `--verify` fails with exit status 2.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pathsum,
    Gabp,
    Determinant,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    /// `Σ[I_omega, I_alpha]`, 1-based block indices.
    Entry {
        alpha: usize,
        omega: usize,
    },
    Diag {
        alpha: usize,
    },
    Full,
    Mean,
}

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub matrix_path: PathBuf,
    /// 1-based index lists; `None` means singletons.
    pub partition: Option<Vec<Vec<usize>>>,
    pub queries: Vec<Query>,
    pub method: Method,
    pub verify: bool,
    pub diagnose: bool,
    pub skip_spd_check: bool,
    pub drop_tolerance: f64,
    pub threads: usize,
}

impl QuerySpec {
    pub fn new(matrix_path: impl Into<PathBuf>, method: Method) -> Self {
        Self {
            matrix_path: matrix_path.into(),
            partition: None,
            queries: Vec::new(),
            method,
            verify: false,
            diagnose: false,
            skip_spd_check: false,
            drop_tolerance: 0.0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryResult {
    pub query: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<usize>,
    pub value: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaf_count: Option<usize>,
    #[serde(skip)]
    numeric: Numeric,
}

#[derive(Debug, Clone, Default)]
enum Numeric {
    #[default]
    None,
    Matrix(DMatrix<f64>),
    Vector(DVector<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub method: Method,
    pub n: usize,
    pub blocks: usize,
    pub results: Vec<QueryResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_deviation: Option<f64>,
}

impl Report {
    /// True when verification ran and exceeded [`VERIFY_TOLERANCE`].
    pub fn verification_failed(&self) -> bool {
        self.max_relative_deviation
            .is_some_and(|d| d.is_nan() || d > VERIFY_TOLERANCE)
    }
}

fn matrix_json(m: &DMatrix<f64>) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    serde_json::json!(rows)
}

struct Block {
    value: DMatrix<f64>,
    path_count: Option<usize>,
    max_depth: Option<usize>,
    leaf_count: Option<usize>,
}

impl Block {
    fn plain(value: DMatrix<f64>) -> Self {
        Self {
            value,
            path_count: None,
            max_depth: None,
            leaf_count: None,
        }
    }
}

/// One way of producing covariance blocks (0-based block indices).
trait Backend {
    fn block(&self, alpha: usize, omega: usize) -> Result<Block>;

    fn full(&self, partition: &BlockPartition) -> Result<DMatrix<f64>> {
        let n = partition.dim();
        let mut sigma = DMatrix::zeros(n, n);
        for a in 0..partition.num_blocks() {
            for w in 0..partition.num_blocks() {
                let b = self.block(a, w)?;
                for (r, &i) in partition.block(w).iter().enumerate() {
                    for (c, &k) in partition.block(a).iter().enumerate() {
                        sigma[(i, k)] = b.value[(r, c)];
                    }
                }
            }
        }
        Ok(sigma)
    }
}

struct PathSumBackend<'g, W> {
    engine: PathSumEngine<'g, W>,
    threads: usize,
}

impl<W: EdgeWeight> Backend for PathSumBackend<'_, W> {
    fn block(&self, alpha: usize, omega: usize) -> Result<Block> {
        let r = self.engine.entry(alpha, omega)?;
        debug!(
            "pathsum ({}, {}): {} paths, depth {}, {} leaves",
            omega + 1,
            alpha + 1,
            r.path_count,
            r.max_depth,
            r.leaf_count
        );
        Ok(Block {
            value: r.value,
            path_count: Some(r.path_count),
            max_depth: Some(r.max_depth),
            leaf_count: Some(r.leaf_count),
        })
    }

    fn full(&self, _partition: &BlockPartition) -> Result<DMatrix<f64>> {
        assemble(&self.engine, self.threads)
    }
}

/// Diagonal from tree messages, off-diagonal from the unique tree path.
struct GabpBackend<'g> {
    table: MessageTable,
    paths: PathSumEngine<'g, f64>,
}

impl Backend for GabpBackend<'_> {
    fn block(&self, alpha: usize, omega: usize) -> Result<Block> {
        if alpha == omega {
            return Ok(Block::plain(DMatrix::from_element(
                1,
                1,
                self.table.variance(alpha),
            )));
        }
        let r = self.paths.off_diagonal_entry(alpha, omega)?;
        Ok(Block {
            value: r.value,
            path_count: Some(r.path_count),
            max_depth: Some(r.max_depth),
            leaf_count: Some(r.leaf_count),
        })
    }
}

struct DeterminantBackend<'m> {
    model: &'m InformationModel,
    partition: &'m BlockPartition,
}

impl Backend for DeterminantBackend<'_> {
    fn block(&self, alpha: usize, omega: usize) -> Result<Block> {
        let v = determinant_formula_entry(self.model, self.partition, alpha, omega)?;
        Ok(Block::plain(DMatrix::from_element(1, 1, v)))
    }
}

struct DirectBackend<'m> {
    inverse: DMatrix<f64>,
    partition: &'m BlockPartition,
}

impl Backend for DirectBackend<'_> {
    fn block(&self, alpha: usize, omega: usize) -> Result<Block> {
        Ok(Block::plain(extract_block(
            &self.inverse,
            self.partition,
            alpha,
            omega,
        )))
    }

    fn full(&self, _partition: &BlockPartition) -> Result<DMatrix<f64>> {
        Ok(self.inverse.clone())
    }
}

fn extract_block(
    sigma: &DMatrix<f64>,
    partition: &BlockPartition,
    alpha: usize,
    omega: usize,
) -> DMatrix<f64> {
    let rows = partition.block(omega);
    let cols = partition.block(alpha);
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| sigma[(rows[r], cols[c])])
}

/// Loads the model named in `spec` and runs its queries.
pub fn run_queries(spec: &QuerySpec) -> Result<Report> {
    let model = load_matrix(&spec.matrix_path)?;
    run_queries_on(&model, spec)
}

/// Runs the queries of `spec` against an already loaded model.
pub fn run_queries_on(model: &InformationModel, spec: &QuerySpec) -> Result<Report> {
    let n = model.dim();
    let partition = match &spec.partition {
        Some(blocks) => BlockPartition::from_one_based(n, blocks.clone())?,
        None => BlockPartition::singletons(n),
    };
    let b = partition.num_blocks();
    for q in &spec.queries {
        let indices: &[usize] = match q {
            Query::Entry { alpha, omega } => &[*alpha, *omega],
            Query::Diag { alpha } => std::slice::from_ref(alpha),
            _ => &[],
        };
        for &i in indices {
            if i == 0 || i > b {
                return Err(Error::Configuration(format!(
                    "block index {i} is outside 1..={b}"
                )));
            }
        }
    }
    if spec.queries.contains(&Query::Mean) && model.potential().is_none() {
        return Err(Error::Configuration(
            "mean query needs a potential vector h in the model file".into(),
        ));
    }
    if spec.skip_spd_check {
        info!("skipping positive-definiteness check");
    } else {
        require_positive_definite(model)?;
    }
    info!("method {:?}, n = {n}, {b} blocks", spec.method);

    let results = match spec.method {
        Method::Pathsum if partition.is_singletons() => {
            let graph = ModelGraph::<f64>::from_model(model, &partition, spec.drop_tolerance)?;
            let backend = PathSumBackend {
                engine: PathSumEngine::new(&graph),
                threads: spec.threads,
            };
            execute(&backend, model, &partition, &spec.queries)?
        }
        Method::Pathsum => {
            let graph =
                ModelGraph::<DMatrix<f64>>::from_model(model, &partition, spec.drop_tolerance)?;
            let backend = PathSumBackend {
                engine: PathSumEngine::new(&graph),
                threads: spec.threads,
            };
            execute(&backend, model, &partition, &spec.queries)?
        }
        Method::Gabp => {
            if !partition.is_singletons() {
                return Err(Error::UnsupportedPartition(
                    "belief propagation runs on scalar trees; use pathsum for blocks",
                ));
            }
            let table = gabp_marginals(model)?;
            let graph = ModelGraph::<f64>::from_model(model, &partition, spec.drop_tolerance)?;
            let backend = GabpBackend {
                table,
                paths: PathSumEngine::new(&graph),
            };
            execute(&backend, model, &partition, &spec.queries)?
        }
        Method::Determinant => {
            if !partition.is_singletons() {
                return Err(Error::UnsupportedPartition(
                    "the determinant formula needs commuting scalar entries",
                ));
            }
            let backend = DeterminantBackend {
                model,
                partition: &partition,
            };
            execute(&backend, model, &partition, &spec.queries)?
        }
        Method::Direct => {
            let backend = DirectBackend {
                inverse: direct_inverse(model)?,
                partition: &partition,
            };
            execute(&backend, model, &partition, &spec.queries)?
        }
    };

    let max_relative_deviation = if spec.verify {
        let oracle = direct_inverse(model)?;
        let mut worst = 0.0f64;
        for r in &results {
            let dev = match (&r.numeric, r.query) {
                (Numeric::Matrix(m), "entry" | "diag") => {
                    let alpha = r.alpha.expect("entry has alpha") - 1;
                    let omega = r.omega.unwrap_or(r.alpha.expect("diag has alpha")) - 1;
                    relative_deviation(
                        m.as_slice(),
                        extract_block(&oracle, &partition, alpha, omega).as_slice(),
                    )
                }
                (Numeric::Matrix(m), _) => relative_deviation(m.as_slice(), oracle.as_slice()),
                (Numeric::Vector(v), _) => {
                    let h = model.potential().expect("checked above");
                    relative_deviation(v.as_slice(), (&oracle * h).as_slice())
                }
                (Numeric::None, _) => 0.0,
            };
            worst = if dev.is_nan() {
                f64::NAN
            } else {
                worst.max(dev)
            };
        }
        info!("max relative deviation from direct inversion: {worst:e}");
        Some(worst)
    } else {
        None
    };

    Ok(Report {
        method: spec.method,
        n,
        blocks: b,
        results,
        diagnostics: spec.diagnose.then(|| diagnose(model)),
        max_relative_deviation,
    })
}

/// `‖x - y‖ / ‖y‖`, or `‖x - y‖` when `y` vanishes.
fn relative_deviation(x: &[f64], y: &[f64]) -> f64 {
    let diff = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn block_result(
    backend: &dyn Backend,
    query: &'static str,
    alpha: usize,
    omega: Option<usize>,
) -> Result<QueryResult> {
    let b = backend.block(alpha - 1, omega.unwrap_or(alpha) - 1)?;
    Ok(QueryResult {
        query,
        alpha: Some(alpha),
        omega,
        value: matrix_json(&b.value),
        path_count: b.path_count,
        max_depth: b.max_depth,
        leaf_count: b.leaf_count,
        numeric: Numeric::Matrix(b.value),
    })
}

fn execute(
    backend: &dyn Backend,
    model: &InformationModel,
    partition: &BlockPartition,
    queries: &[Query],
) -> Result<Vec<QueryResult>> {
    let mut full_cache: Option<DMatrix<f64>> = None;
    let mut out = Vec::with_capacity(queries.len());
    for q in queries {
        let result = match *q {
            Query::Entry { alpha, omega } => block_result(backend, "entry", alpha, Some(omega))?,
            Query::Diag { alpha } => block_result(backend, "diag", alpha, None)?,
            Query::Full | Query::Mean => {
                if full_cache.is_none() {
                    full_cache = Some(backend.full(partition)?);
                }
                let sigma = full_cache.as_ref().expect("filled above");
                if *q == Query::Full {
                    QueryResult {
                        query: "full",
                        alpha: None,
                        omega: None,
                        value: matrix_json(sigma),
                        path_count: None,
                        max_depth: None,
                        leaf_count: None,
                        numeric: Numeric::Matrix(sigma.clone()),
                    }
                } else {
                    let h = model.potential().expect("checked before execution");
                    let mu = sigma * h;
                    QueryResult {
                        query: "mean",
                        alpha: None,
                        omega: None,
                        value: serde_json::json!(mu.iter().copied().collect::<Vec<f64>>()),
                        path_count: None,
                        max_depth: None,
                        leaf_count: None,
                        numeric: Numeric::Vector(mu),
                    }
                }
            }
        };
        out.push(result);
    }
    Ok(out)
}

/// Exact marginals of Gaussian graphical models by path-sums.
#[derive(Debug, Parser)]
#[command(name = "pathsum", version)]
pub struct Args {
    /// Model file (.mtx Matrix Market or .json triplets)
    #[arg(long, value_name = "PATH")]
    pub matrix: PathBuf,
    /// Partition as JSON lists of 1-based indices, inline or a file path
    #[arg(long, value_name = "JSON")]
    pub partition: Option<String>,
    /// Covariance block Σ[W, A] (repeatable)
    #[arg(long, num_args = 2, value_names = ["A", "W"])]
    pub entry: Vec<usize>,
    /// Diagonal block Σ[A, A] (repeatable)
    #[arg(long, value_name = "A")]
    pub diag: Vec<usize>,
    /// Full covariance matrix
    #[arg(long)]
    pub full: bool,
    /// Mean vector J^{-1} h
    #[arg(long)]
    pub mean: bool,
    #[arg(long, value_enum, default_value = "pathsum")]
    pub method: Method,
    /// Compare every result with direct inversion (exit status 2 above 1e-8)
    #[arg(long)]
    pub verify: bool,
    /// Report walk-summability and definiteness
    #[arg(long)]
    pub diagnose: bool,
    #[arg(long)]
    pub skip_spd_check: bool,
    #[arg(long, default_value_t = 0.0, value_name = "X")]
    pub drop_tolerance: f64,
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
}

impl Args {
    pub fn to_spec(&self) -> Result<QuerySpec> {
        let partition = match &self.partition {
            None => None,
            Some(text) => Some(parse_partition(text)?),
        };
        let mut queries: Vec<Query> = self
            .entry
            .chunks(2)
            .map(|p| Query::Entry {
                alpha: p[0],
                omega: p[1],
            })
            .collect();
        queries.extend(self.diag.iter().map(|&alpha| Query::Diag { alpha }));
        if self.full {
            queries.push(Query::Full);
        }
        if self.mean {
            queries.push(Query::Mean);
        }
        if self.threads == 0 {
            return Err(Error::Configuration("--threads must be at least 1".into()));
        }
        Ok(QuerySpec {
            matrix_path: self.matrix.clone(),
            partition,
            queries,
            method: self.method,
            verify: self.verify,
            diagnose: self.diagnose,
            skip_spd_check: self.skip_spd_check,
            drop_tolerance: self.drop_tolerance,
            threads: self.threads,
        })
    }
}

/// Reads a partition given inline (`[[1,2],[3]]`) or from a JSON file.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>> {
    let trimmed = text.trim_start();
    let (source, body) = if trimmed.starts_with('[') {
        (PathBuf::from("--partition"), text.to_string())
    } else {
        let path = Path::new(text);
        let body = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        (path.to_path_buf(), body)
    };
    serde_json::from_str(&body).map_err(|e| Error::Parse {
        path: source,
        line: e.line(),
        message: format!("partition must be a list of index lists: {e}"),
    })
}

/// Human-readable rendering with 6 decimals.
pub fn render_table(report: &Report) -> String {
    let mut s = format!(
        "method: {}  n: {}  blocks: {}\n",
        report
            .method
            .to_possible_value()
            .map_or_else(String::new, |v| v.get_name().to_string()),
        report.n,
        report.blocks
    );
    for r in &report.results {
        let label = match (r.alpha, r.omega) {
            (Some(a), Some(w)) => format!("entry ({w}, {a})"),
            (Some(a), None) => format!("diag {a}"),
            _ => r.query.to_string(),
        };
        s.push_str(&label);
        s.push('\n');
        match &r.numeric {
            Numeric::Matrix(m) => {
                for row in m.row_iter() {
                    for x in row.iter() {
                        s.push_str(&format!("{x:>14.6}"));
                    }
                    s.push('\n');
                }
            }
            Numeric::Vector(v) => {
                for x in v.iter() {
                    s.push_str(&format!("{x:>14.6}"));
                }
                s.push('\n');
            }
            Numeric::None => {}
        }
    }
    if let Some(d) = &report.diagnostics {
        s.push_str(&format!(
            "rho(|R|): {:.6}  walk-summable: {}  positive definite: {}  min eigenvalue: {:.6}\n",
            d.spectral_radius_abs_r,
            d.is_walk_summable,
            d.is_positive_definite,
            d.min_eigenvalue_estimate
        ));
    }
    if let Some(dev) = report.max_relative_deviation {
        s.push_str(&format!("max relative deviation: {dev:.6e}\n"));
    }
    s
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Runs the command line; returns the process exit status.
///
/// Status 0 on success, 2 when `--verify` exceeds [`VERIFY_TOLERANCE`],
/// 1 on any error. Errors are written to stderr as a JSON object.
pub fn main_with_args<I, T>(
    args: I,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "{}", error_json("usage", e.to_string().trim()));
            return 1;
        }
    };
    let outcome = args.to_spec().and_then(|spec| run_queries(&spec));
    match outcome {
        Ok(report) => {
            let text = match args.output {
                OutputFormat::Json => serde_json::to_string_pretty(&report).expect("serializable"),
                OutputFormat::Table => render_table(&report),
            };
            let _ = writeln!(stdout, "{}", text.trim_end());
            if report.verification_failed() {
                let _ = writeln!(
                    stderr,
                    "{}",
                    error_json(
                        "verification",
                        &format!(
                            "max relative deviation {:e} exceeds {VERIFY_TOLERANCE:e}",
                            report.max_relative_deviation.unwrap_or(f64::NAN)
                        )
                    )
                );
                2
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(e.kind(), &e.to_string()));
            1
        }
    }
}

/// Initializes logging from `PATHSUM_LOG` (default `warn`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("PATHSUM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}
