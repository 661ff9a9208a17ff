//! JSON formats, run configuration and the command reports behind the CLI.

use crate::bridges::{realize_edm, EdmInstance};
use crate::completion::pipeline::{flatten_and_fold_with, PipelineOptions};
use crate::completion::unique::uniqueness_probe;
use crate::completion::CompletionResult;
use crate::error::{invalid, Error, Result};
use crate::graph::named::by_name;
use crate::graph::{barvinok_bound, classify_gram_dimension, treewidth_at_most, Edge, GdBand, Graph, MinorWitness};
use crate::linalg::{Configuration, Mat};
use crate::partial::{canonical_k222, project, PartialMatrix, ValidationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Exit statuses of the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const NOT_FOUND: i32 = 3;
    pub const PARSE: i32 = 4;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => exit::INFEASIBLE,
        Error::NotFound { .. } => exit::NOT_FOUND,
        Error::Parse(_) | Error::InvalidInput(_) => exit::PARSE,
        Error::Numerical(_) => exit::FAILURE,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub rank_tol: f64,
    pub restarts: usize,
    pub step_budget: usize,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tol: 1e-8, rank_tol: 1e-7, restarts: 100, step_budget: 50, output_path: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.rank_tol > 0.0) {
            return invalid("tolerances must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum GraphSpec {
    Name(String),
    Explicit {
        n: usize,
        edges: Vec<[usize; 2]>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

impl GraphSpec {
    fn build(self) -> Result<Graph> {
        match self {
            GraphSpec::Name(s) => by_name(&s),
            GraphSpec::Explicit { n, edges, labels } => {
                let edges: Vec<Edge> = edges.into_iter().map(|[i, j]| (i, j)).collect();
                let g = Graph::from_edges(n, &edges).map_err(parse_context("edges"))?;
                match labels {
                    Some(l) => g.with_labels(l).map_err(parse_context("labels")),
                    None => Ok(g),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
struct EntryJson {
    i: usize,
    j: usize,
    v: f64,
}

#[derive(Clone, Debug, Deserialize)]
struct InstanceJson {
    graph: GraphSpec,
    #[serde(default)]
    diag: Option<Vec<f64>>,
    entries: Vec<EntryJson>,
}

#[derive(Clone, Debug, Deserialize)]
struct EdmJson {
    graph: GraphSpec,
    entries: Vec<EntryJson>,
    #[serde(default)]
    apex: Option<usize>,
}

fn parse_context(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Parse(format!("field \"{field}\": {e}"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn entry_map(entries: Vec<EntryJson>) -> Result<BTreeMap<Edge, f64>> {
    let mut m = BTreeMap::new();
    for (k, e) in entries.into_iter().enumerate() {
        if e.i == e.j {
            return Err(Error::Parse(format!("entries[{k}]: diagonal pair ({},{})", e.i, e.j)));
        }
        if m.insert(crate::graph::norm_edge(e.i, e.j), e.v).is_some() {
            return Err(Error::Parse(format!("entries[{k}]: pair ({},{}) given twice", e.i, e.j)));
        }
    }
    Ok(m)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    serde_json::from_str::<GraphSpec>(text).map_err(json_err)?.build()
}

/// Instance JSON; a missing "diag" means a unit diagonal.
pub fn parse_instance(text: &str) -> Result<PartialMatrix> {
    let raw: InstanceJson = serde_json::from_str(text).map_err(json_err)?;
    let g = raw.graph.build()?;
    let diag = raw.diag.unwrap_or_else(|| vec![1.0; g.n()]);
    PartialMatrix::new(g, diag, entry_map(raw.entries)?).map_err(parse_context("entries"))
}

pub fn parse_edm(text: &str) -> Result<EdmInstance> {
    let raw: EdmJson = serde_json::from_str(text).map_err(json_err)?;
    let g = raw.graph.build()?;
    EdmInstance::new(g, entry_map(raw.entries)?, raw.apex).map_err(parse_context("entries"))
}

#[derive(Serialize)]
struct EntryOut {
    i: usize,
    j: usize,
    v: f64,
}

#[derive(Serialize)]
struct GraphOut<'a> {
    n: usize,
    edges: Vec<[usize; 2]>,
    labels: &'a [String],
}

fn graph_json(g: &Graph) -> serde_json::Value {
    serde_json::to_value(GraphOut { n: g.n(), edges: g.edges().map(|(i, j)| [i, j]).collect(), labels: g.labels() })
        .expect("plain data")
}

pub fn instance_to_json(a: &PartialMatrix) -> serde_json::Value {
    let entries: Vec<EntryOut> = a.entries().iter().map(|(&(i, j), &v)| EntryOut { i, j, v }).collect();
    serde_json::json!({ "graph": graph_json(a.graph()), "diag": a.diag(), "entries": entries })
}

pub fn edm_to_json(d: &EdmInstance) -> serde_json::Value {
    let entries: Vec<EntryOut> = d.distances().iter().map(|(&(i, j), &v)| EntryOut { i, j, v }).collect();
    serde_json::json!({ "graph": graph_json(d.graph()), "entries": entries, "apex": d.apex() })
}

fn read_or_name(input: &str) -> Result<Option<String>> {
    let path = Path::new(input);
    if path.is_file() {
        return std::fs::read_to_string(path).map(Some).map_err(|e| Error::Parse(format!("{input}: {e}")));
    }
    Ok(None)
}

/// Prefix a parse or validation message with the input it came from.
fn from_input(input: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("{input}: {m}")),
        Error::InvalidInput(m) => Error::InvalidInput(format!("{input}: {m}")),
        other => other,
    }
}

/// A JSON file path or a built-in graph name.
pub fn load_graph(input: &str) -> Result<Graph> {
    match read_or_name(input)? {
        Some(text) => parse_graph(&text).map_err(from_input(input)),
        None => by_name(input),
    }
}

/// A JSON file path, "K222" for the canonical instance, or a built-in graph
/// name, which yields the projection of a random Gram matrix (rank n) drawn
/// from `seed`.
pub fn load_instance(input: &str, seed: u64) -> Result<PartialMatrix> {
    if let Some(text) = read_or_name(input)? {
        return parse_instance(&text).map_err(from_input(input));
    }
    if by_name(input)? == crate::graph::named::k222() {
        return Ok(canonical_k222());
    }
    Ok(random_instance(&by_name(input)?, seed))
}

pub fn load_edm(input: &str) -> Result<EdmInstance> {
    match read_or_name(input)? {
        Some(text) => parse_edm(&text).map_err(from_input(input)),
        None => Err(Error::Parse(format!("{input}: no such file"))),
    }
}

/// Projection of M Mᵀ for M with entries uniform in [−1, 1].
pub fn random_instance(g: &Graph, seed: u64) -> PartialMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let m = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    project(&(&m * m.transpose()), g).expect("sizes match")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub edges: usize,
    pub gd_band: String,
    pub witness: Option<MinorWitness>,
    pub treewidth: String,
    pub barvinok_bound: usize,
}

pub fn cmd_classify(g: &Graph) -> ClassifyReport {
    let band = classify_gram_dimension(g);
    let witness = match &band {
        GdBand::AtLeast5(w) => Some(w.clone()),
        GdBand::AtMost(_) => None,
    };
    let treewidth = (0..=4)
        .find(|&k| treewidth_at_most(g, k).is_some())
        .map_or_else(|| ">4".to_string(), |k| format!("<={k}"));
    ClassifyReport {
        n: g.n(),
        edges: g.edge_count(),
        gd_band: band.describe(),
        witness,
        treewidth,
        barvinok_bound: barvinok_bound(g),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompleteReport {
    /// "found", "infeasible" or "not_found".
    pub status: String,
    pub target_k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<CompletionResult>,
    /// Whether the completion is the only one (probed for n ≤ 12).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated_clique: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Largest n for which the uniqueness probe runs in `complete`.
pub const PROBE_MAX_N: usize = 12;

pub fn cmd_complete(a: &PartialMatrix, k: usize, cfg: &RunConfig) -> Result<(CompleteReport, i32)> {
    cfg.validate()?;
    let mut report = CompleteReport {
        status: String::new(),
        target_k: k,
        result: None,
        unique: None,
        violated_clique: None,
        detail: None,
    };
    if let ValidationReport::ViolatedClique { clique, min_eigenvalue } = a.validate(cfg.tol) {
        report.status = "infeasible".into();
        report.detail = Some(format!("clique submatrix has eigenvalue {min_eigenvalue:.6e}"));
        report.violated_clique = Some(clique);
        return Ok((report, exit::INFEASIBLE));
    }
    let opts = PipelineOptions { restarts: cfg.restarts, step_budget: cfg.step_budget, ..Default::default() };
    match flatten_and_fold_with(a, k, cfg.seed, &opts) {
        Ok(mut r) => {
            r.rank = r.configuration.rank(cfg.rank_tol);
            if a.n() <= PROBE_MAX_N {
                report.unique = uniqueness_probe(a, 1e-6).ok().map(|u| u.is_unique());
            }
            report.status = "found".into();
            report.result = Some(r);
            Ok((report, exit::OK))
        }
        Err(Error::Infeasible(m)) => {
            report.status = "infeasible".into();
            report.detail = Some(m);
            Ok((report, exit::INFEASIBLE))
        }
        Err(Error::NotFound { .. }) => {
            report.status = "not_found".into();
            report.detail = Some(format!("no completion of rank {k} found"));
            Ok((report, exit::NOT_FOUND))
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizeReport {
    /// "found" or "not_found".
    pub status: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Configuration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

pub fn cmd_realize_edm(d: &EdmInstance, dim: usize, cfg: &RunConfig) -> Result<(RealizeReport, i32)> {
    cfg.validate()?;
    match realize_edm(d, dim, cfg.restarts, cfg.seed) {
        Some(u) if d.residual(&u) <= cfg.tol * d.scale() => {
            let residual = d.residual(&u);
            let report = RealizeReport { status: "found".into(), dim, coordinates: Some(u), residual: Some(residual) };
            Ok((report, exit::OK))
        }
        _ => Ok((RealizeReport { status: "not_found".into(), dim, coordinates: None, residual: None }, exit::NOT_FOUND)),
    }
}
