//! Scenario ingestion and the `run` / `sweep` commands.
//!
//! Scenarios are JSON documents. The short form expands a client count into
//! a linear chain; the long form spells out an explicit topology:
//!
//! ```json
//! {
//!   "clients": 4,
//!   "bases": ["z", "y", "x"],
//!   "forced_outcomes": ["+", "-", "+"],
//!   "b0_overrides": { "2": 4 },
//!   "seed": 7,
//!   "channel_delay_ns": 1000,
//!   "tolerance": 1e-9
//! }
//! ```
//!
//! Exit codes: 0 on success, 1 on usage or protocol errors, 2 when a run
//! verifies against the predicted state and fails.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use qlan::engine::{Outcome, PauliAxis};
use qlan::graph::{Graph, Role, VertexId};
use qlan::netsim::{
    run_scenario_with, sweep, RunOptions, Scenario, SimError, SimReport, SweepReport,
};
use qlan::resources::BasisChoice;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    clients: Option<usize>,
    topology: Option<TopologyFile>,
    bases: Vec<String>,
    forced_outcomes: Option<Vec<String>>,
    b0_overrides: Option<BTreeMap<usize, u32>>,
    seed: Option<u64>,
    channel_delay_ns: Option<u64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    vertices: Vec<u32>,
    edges: Vec<(u32, u32)>,
    orchestrator_vertices: Vec<u32>,
    /// Optional; defaults to every vertex not held by the orchestrator.
    client_vertices: Option<Vec<u32>>,
}

fn build_topology(t: &TopologyFile) -> Result<Graph, CliError> {
    let parse = |msg: String| CliError::Parse(msg);
    let mut graph = Graph::new();
    for &v in &t.orchestrator_vertices {
        if !t.vertices.contains(&v) {
            return Err(parse(format!(
                "topology.orchestrator_vertices: vertex {v} not in topology.vertices"
            )));
        }
    }
    if let Some(clients) = &t.client_vertices {
        for &v in clients {
            if !t.vertices.contains(&v) {
                return Err(parse(format!(
                    "topology.client_vertices: vertex {v} not in topology.vertices"
                )));
            }
            if t.orchestrator_vertices.contains(&v) {
                return Err(parse(format!(
                    "topology.client_vertices: vertex {v} is also in orchestrator_vertices; \
                     the two sides must be disjoint"
                )));
            }
        }
        for &v in &t.vertices {
            if !t.orchestrator_vertices.contains(&v) && !clients.contains(&v) {
                return Err(parse(format!(
                    "topology.client_vertices: vertex {v} assigned to neither side; \
                     the two sides must cover all vertices"
                )));
            }
        }
    }
    for &v in &t.vertices {
        let role = if t.orchestrator_vertices.contains(&v) {
            Role::Orchestrator
        } else {
            Role::Client
        };
        graph
            .add_vertex(VertexId(v), role)
            .map_err(|_| parse(format!("topology.vertices: duplicate vertex {v}")))?;
    }
    for (i, &(a, b)) in t.edges.iter().enumerate() {
        graph
            .add_edge(VertexId(a), VertexId(b))
            .map_err(|e| parse(format!("topology.edges[{i}]: {e}")))?;
    }
    Ok(graph)
}

fn parse_axis(s: &str, index: usize) -> Result<PauliAxis, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "x" => Ok(PauliAxis::X),
        "y" => Ok(PauliAxis::Y),
        "z" => Ok(PauliAxis::Z),
        other => Err(CliError::Parse(format!(
            "bases[{index}]: unknown axis {other:?}, expected \"x\", \"y\" or \"z\""
        ))),
    }
}

fn parse_outcome(s: &str, index: usize) -> Result<Outcome, CliError> {
    match s {
        "+" => Ok(Outcome::Plus),
        "-" => Ok(Outcome::Minus),
        other => Err(CliError::Parse(format!(
            "forced_outcomes[{index}]: expected \"+\" or \"-\", got {other:?}"
        ))),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("scenario JSON: {e}")))?;

    let graph = match (&file.clients, &file.topology) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(CliError::Parse(
                "scenario must set exactly one of \"clients\" or \"topology\"".into(),
            ))
        }
        (Some(k), None) => Graph::linear_chain(*k)
            .map_err(|_| CliError::Parse(format!("clients: must be at least 2, got {k}")))?,
        (None, Some(t)) => build_topology(t)?,
    };

    let mut bases: Vec<BasisChoice> = file
        .bases
        .iter()
        .enumerate()
        .map(|(i, s)| parse_axis(s, i).map(BasisChoice::new))
        .collect::<Result<_, _>>()?;

    if let Some(overrides) = &file.b0_overrides {
        for (&index, &vertex) in overrides {
            if index >= bases.len() {
                return Err(CliError::Parse(format!(
                    "b0_overrides: measurement index {index} out of range (bases has {} entries)",
                    bases.len()
                )));
            }
            if !graph.contains(VertexId(vertex)) {
                return Err(CliError::Parse(format!(
                    "b0_overrides[{index}]: vertex {vertex} not in the graph"
                )));
            }
            bases[index].b0_override = Some(VertexId(vertex));
        }
    }

    let forced_outcomes = file
        .forced_outcomes
        .as_ref()
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(i, s)| parse_outcome(s, i))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;

    let seed = file
        .seed
        .ok_or_else(|| CliError::Parse("scenario must set \"seed\"".into()))?;

    let mut sc = Scenario::new(graph, bases);
    sc.forced_outcomes = forced_outcomes;
    sc.seed = seed;
    if let Some(delay) = file.channel_delay_ns {
        sc.channel_delay_ns = delay;
    }
    if let Some(tol) = file.tolerance {
        sc.tolerance = tol;
    }
    // Cross-field checks (bases length vs n_o, partition, sizes) live in the
    // scenario itself; surface them as parse errors naming the field.
    sc.validate().map_err(|e| match e {
        SimError::InvalidScenario(msg) => CliError::Parse(msg),
        other => CliError::Sim(other),
    })?;
    Ok(sc)
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

/// Writes via a temporary file in the target directory plus rename, so
/// readers never observe a half-written report.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn write_dots(dir: &Path, initial: &Graph, fin: &Graph) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    write_atomic(&dir.join("initial.dot"), initial.to_dot().as_bytes())?;
    write_atomic(&dir.join("final.dot"), fin.to_dot().as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RunArgs {
    pub scenario: PathBuf,
    pub seed: Option<u64>,
    pub force_outcomes: Option<String>,
    pub report: Option<PathBuf>,
    pub dot_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    /// Test hook: disable client corrections so verification fails.
    pub tamper_corrections: bool,
}

fn parse_forced_flag(s: &str, n_o: usize) -> Result<Vec<Outcome>, CliError> {
    let outcomes: Vec<Outcome> = s
        .chars()
        .map(|c| match c {
            '+' => Ok(Outcome::Plus),
            '-' => Ok(Outcome::Minus),
            other => Err(CliError::Parse(format!(
                "--force-outcomes: expected '+' or '-', got {other:?}"
            ))),
        })
        .collect::<Result<_, _>>()?;
    if outcomes.len() != n_o {
        return Err(CliError::Parse(format!(
            "--force-outcomes must have one +/- per measurement (n_o={n_o})"
        )));
    }
    Ok(outcomes)
}

fn run_inner(args: &RunArgs) -> Result<(SimReport, i32), CliError> {
    let mut sc = load_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        sc.seed = seed;
    }
    if let Some(tol) = args.tolerance {
        sc.tolerance = tol;
    }
    if let Some(forced) = &args.force_outcomes {
        sc.forced_outcomes = Some(parse_forced_flag(forced, sc.n_o())?);
    }
    let opts = RunOptions { tamper_corrections: args.tamper_corrections, ..Default::default() };
    let (report, _) = run_scenario_with(&sc, &opts)?;
    if let Some(path) = &args.report {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        write_atomic(path, json.as_bytes())?;
    }
    if let Some(dir) = &args.dot_dir {
        write_dots(dir, &sc.graph, &report.predicted_graph)?;
    }
    let code = if report.passed() { EXIT_OK } else { EXIT_VERIFY };
    Ok((report, code))
}

/// Runs one scenario; prints a one-line summary and returns the exit code.
pub fn cmd_run(args: &RunArgs) -> i32 {
    match run_inner(args) {
        Ok((report, code)) => {
            let mut line = String::new();
            write!(
                line,
                "verdict {v}  fidelity {f:.12}  measurements {m}  messages {n}",
                v = if report.passed() { "PASS" } else { "FAIL" },
                f = report.fidelity,
                m = report.measurements.len(),
                n = report.messages.len(),
            )
            .expect("write to string");
            println!("{line}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepArgs {
    pub scenario: PathBuf,
    pub all_outcomes: bool,
    pub all_bases: bool,
    pub report: Option<PathBuf>,
}

fn sweep_inner(args: &SweepArgs) -> Result<SweepReport, CliError> {
    let sc = load_scenario(&args.scenario)?;
    let report = sweep(&sc, args.all_outcomes, args.all_bases)?;
    if let Some(path) = &args.report {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        write_atomic(path, json.as_bytes())?;
    }
    Ok(report)
}

/// Runs a sweep; prints the aggregate `PASS p/n` line and returns the exit
/// code (0 only when every run passed).
pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    match sweep_inner(args) {
        Ok(report) => {
            println!("{}", report.summary_line());
            if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
