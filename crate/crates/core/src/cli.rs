//! Command-line front end: argument parsing, run configuration, report
//! envelopes and exit codes.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 capacity exceeded,
//! 3 mathematical invariant violated.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    corollary_bound, scaling_sweep, write_sweep_csv, ALTERNATIVE_FORMS, COEFFICIENT_CONVENTION,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{
    covering_set, hadamard_graph_with, hadamard_parity_class, independence_number,
    independent_set_lower_bound_with_cap, orthogonality_graph, sign_graph, GraphJson,
    IndependenceResult, MeasurementBasis, OrthogonalityGraph, DEFAULT_GRAPH_CAP,
};
use crate::ksqubit::{self, BlochVector};
use crate::ontomodel::{
    born_check, max_total_overlap_lp, proposition1_search, Arithmetic, LpOptions, RandomModelShape,
    DEFAULT_ASSIGNMENT_CAP,
};
use crate::states::{
    hadamard_family_with_cap, quantum_overlap, PureState, DEFAULT_ENUMERATION_CAP,
};

pub const CAP_ENV: &str = "ONTO_OVERLAP_CAP";
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "onto-overlap",
    version,
    about = "Overlap bounds for psi-epistemic ontological models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Time budget in seconds for the independence-number search.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub budget: f64,
    /// Run data-parallel stages on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the orthogonality graph of a Hadamard family.
    Graph(GraphArgs),
    /// Independence number of a Hadamard family graph or a graph JSON file.
    Alpha(AlphaArgs),
    /// Closed-form overlap-ratio bounds at one dimension.
    Bounds(BoundsArgs),
    /// Maximize total classical overlap over finite models.
    Lp(LpArgs),
    /// Overlaps of the hemisphere qubit model on a Bloch-angle grid.
    Ksqubit(KsArgs),
    /// Bounds over a range of dimensions.
    Sweep(SweepArgs),
    /// Randomized search for violations of the measure-one overlap bound.
    Prop1(Prop1Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    /// All 2^d sign vectors.
    Hadamard,
    /// Sign vectors of even weight.
    HadamardEven,
    /// Sign vectors of odd weight.
    HadamardOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpFamily {
    /// |0>, |1>, |+>, |-> with the Z and X bases (d = 2).
    Bb84,
    /// Even-weight Hadamard states with a greedy covering set.
    HadamardEven,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = GraphFamily::Hadamard)]
    pub family: GraphFamily,
}

#[derive(Args, Debug)]
pub struct AlphaArgs {
    #[arg(long, required_unless_present = "graph", conflicts_with = "graph")]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value_t = GraphFamily::Hadamard)]
    pub family: GraphFamily,
    /// Graph JSON file ({"d", "vertices", "edges"}).
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub epsilon: f64,
    /// Independence number for a custom corollary evaluation.
    #[arg(long, requires_all = ["n_states", "min_born"])]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    pub n_states: Option<usize>,
    #[arg(long, requires = "alpha")]
    pub min_born: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum)]
    pub family: LpFamily,
    /// Solve in exact rational arithmetic.
    #[arg(long)]
    pub rational: bool,
    /// Also write the witness model JSON here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KsArgs {
    /// Grid points in [0, pi].
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Quadrature bands.
    #[arg(long, default_value_t = ksqubit::DEFAULT_RESOLUTION)]
    pub resolution: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Dimensions as `a..b` or `a..b:step` (inclusive).
    #[arg(long)]
    pub d: DimRange,
    #[arg(long)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct Prop1Args {
    #[arg(long, default_value_t = 1000)]
    pub models: usize,
}

/// Inclusive dimension range with a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl DimRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:{}", self.start, self.end, self.step)
    }
}

impl FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (range, step) = match s.split_once(':') {
            Some((r, st)) => (
                r,
                st.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad step: {e}"))?,
            ),
            None => (s, 1),
        };
        let (start, end) = match range.split_once("..") {
            Some((a, b)) => (
                a.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad start: {e}"))?,
                b.trim()
                    .trim_start_matches('=')
                    .parse::<usize>()
                    .map_err(|e| format!("bad end: {e}"))?,
            ),
            None => {
                let v = range
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad dimension: {e}"))?;
                (v, v)
            }
        };
        if step == 0 {
            return Err("step must be positive".into());
        }
        if start > end {
            return Err(format!("empty range {start}..{end}"));
        }
        Ok(DimRange { start, end, step })
    }
}

impl Serialize for DimRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub enumeration: usize,
    pub graph: usize,
    pub assignments: usize,
    /// Set from the environment override.
    pub overridden: bool,
}

impl Caps {
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Ok(v) => {
                let cap = v.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidParameter(format!(
                        "{CAP_ENV} must be a positive integer, got {v:?}"
                    ))
                })?;
                if cap == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "{CAP_ENV} must be positive"
                    )));
                }
                Ok(Caps {
                    enumeration: cap,
                    graph: cap,
                    assignments: cap,
                    overridden: true,
                })
            }
            Err(_) => Ok(Caps {
                enumeration: DEFAULT_ENUMERATION_CAP,
                graph: DEFAULT_GRAPH_CAP,
                assignments: DEFAULT_ASSIGNMENT_CAP,
                overridden: false,
            }),
        }
    }
}

/// Everything that determines a report; embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_range: Option<DimRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<usize>,
    pub budget_seconds: f64,
    pub caps: Caps,
    pub emit: Emit,
    pub seed: u64,
    pub execution: Execution,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli, caps: Caps) -> Result<Self> {
        if !(cli.budget > 0.0 && cli.budget.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "budget must be positive, got {}",
                cli.budget
            )));
        }
        let mut cfg = RunConfig {
            command: "",
            d: None,
            d_range: None,
            epsilon: None,
            family: None,
            graph_input: None,
            rational: None,
            points: None,
            resolution: None,
            models: None,
            budget_seconds: cli.budget,
            caps,
            emit: cli.emit,
            seed: cli.seed,
            execution: if cli.sequential {
                Execution::Sequential
            } else {
                Execution::default()
            },
        };
        let name = |v: &dyn erased::Named| Some(v.name());
        match &cli.command {
            Command::Graph(a) => {
                cfg.command = "graph";
                cfg.d = Some(a.d);
                cfg.family = name(&a.family);
            }
            Command::Alpha(a) => {
                cfg.command = "alpha";
                cfg.d = a.d;
                if a.d.is_some() {
                    cfg.family = name(&a.family);
                }
                cfg.graph_input = a.graph.as_ref().map(|p| p.display().to_string());
            }
            Command::Bounds(a) => {
                cfg.command = "bounds";
                cfg.d = Some(a.d);
                cfg.epsilon = Some(a.epsilon);
            }
            Command::Lp(a) => {
                cfg.command = "lp";
                cfg.d = Some(a.d);
                cfg.family = name(&a.family);
                cfg.rational = Some(a.rational);
            }
            Command::Ksqubit(a) => {
                cfg.command = "ksqubit";
                cfg.points = Some(a.points);
                cfg.resolution = Some(a.resolution);
            }
            Command::Sweep(a) => {
                cfg.command = "sweep";
                cfg.d_range = Some(a.d);
                cfg.epsilon = Some(a.epsilon);
            }
            Command::Prop1(a) => {
                cfg.command = "prop1";
                cfg.models = Some(a.models);
            }
        }
        if let Some(eps) = cfg.epsilon {
            if !(eps > 0.0 && eps < 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "epsilon must lie in (0, 2), got {eps}"
                )));
            }
        }
        if let Some(d) = cfg.d {
            if d < 2 {
                return Err(Error::DimensionTooSmall(d));
            }
        }
        Ok(cfg)
    }
}

mod erased {
    use clap::ValueEnum;

    pub trait Named {
        fn name(&self) -> String;
    }

    impl<T: ValueEnum> Named for T {
        fn name(&self) -> String {
            self.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        }
    }
}

/// A finished computation: the JSON result, its CSV form, extra `# key:
/// value` lines for CSV output, and an invariant failure to report after
/// the output is written.
pub struct Output {
    pub json: Value,
    pub csv: Vec<u8>,
    pub csv_metadata: Vec<(String, String)>,
    pub violation: Option<String>,
}

impl Output {
    fn new(json: Value, csv: Vec<u8>) -> Self {
        Output {
            json,
            csv,
            csv_metadata: Vec::new(),
            violation: None,
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::InvariantViolation(_) | Error::Infeasible | Error::Unbounded => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::from_cli(cli, Caps::from_env()?)?;
    let output = match &cli.command {
        Command::Graph(a) => cmd_graph(&cfg, a)?,
        Command::Alpha(a) => cmd_alpha(&cfg, a)?,
        Command::Bounds(a) => cmd_bounds(&cfg, a)?,
        Command::Lp(a) => cmd_lp(&cfg, a)?,
        Command::Ksqubit(a) => cmd_ksqubit(&cfg, a)?,
        Command::Sweep(a) => cmd_sweep(&cfg, a)?,
        Command::Prop1(a) => cmd_prop1(&cfg, a)?,
    };
    let bytes = render(&cfg, &output)?;
    match &cli.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    match output.violation {
        Some(msg) => Err(Error::InvariantViolation(msg)),
        None => Ok(()),
    }
}

/// Serializes the report envelope.
pub fn render(cfg: &RunConfig, output: &Output) -> Result<Vec<u8>> {
    match cfg.emit {
        Emit::Json => {
            let envelope = json!({
                "tool": TOOL,
                "version": VERSION,
                "config": cfg,
                "result": output.json,
            });
            let mut bytes = serde_json::to_vec_pretty(&envelope)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Emit::Csv => {
            let mut bytes = Vec::new();
            writeln!(bytes, "# tool: {TOOL} {VERSION}")?;
            writeln!(bytes, "# config: {}", serde_json::to_string(cfg)?)?;
            for (k, v) in &output.csv_metadata {
                writeln!(bytes, "# {k}: {v}")?;
            }
            bytes.extend_from_slice(&output.csv);
            Ok(bytes)
        }
    }
}

fn family_graph(cfg: &RunConfig, d: usize, family: GraphFamily) -> Result<OrthogonalityGraph> {
    match family {
        GraphFamily::Hadamard => {
            hadamard_graph_with(d, cfg.caps.enumeration, cfg.caps.graph, cfg.execution)
        }
        GraphFamily::HadamardEven | GraphFamily::HadamardOdd => {
            if d % 2 == 1 {
                return Err(Error::OddDimension(d));
            }
            let all = hadamard_family_with_cap(d, cfg.caps.enumeration)?;
            let odd = family == GraphFamily::HadamardOdd;
            let class: Vec<_> = all
                .into_iter()
                .filter(|v| (v.weight() % 2 == 1) == odd)
                .collect();
            if class.len() > cfg.caps.graph {
                return Err(Error::Capacity {
                    what: "graph vertices",
                    requested: class.len() as u128,
                    cap: cfg.caps.graph as u128,
                });
            }
            sign_graph(&class, cfg.execution)
        }
    }
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn cmd_graph(cfg: &RunConfig, a: &GraphArgs) -> Result<Output> {
    let g = family_graph(cfg, a.d, a.family)?;
    let mut json = serde_json::to_value(g.to_json())?;
    let components: Vec<usize> = g.components().iter().map(Vec::len).collect();
    let histogram: Vec<[usize; 2]> = g
        .degree_histogram()
        .into_iter()
        .map(|(d, c)| [d, c])
        .collect();
    json["summary"] = json!({
        "vertex_count": g.len(),
        "edge_count": g.edge_count(),
        "component_sizes": components,
        "degree_histogram": histogram,
    });
    let mut csv = Vec::new();
    g.write_degree_histogram_csv(&mut csv)?;
    Ok(Output::new(json, csv))
}

fn alpha_json(g: &OrthogonalityGraph, r: &IndependenceResult) -> Result<Value> {
    let mut v = serde_json::to_value(r)?;
    v["vertex_count"] = json!(g.len());
    v["edge_count"] = json!(g.edge_count());
    Ok(v)
}

fn cmd_alpha(cfg: &RunConfig, a: &AlphaArgs) -> Result<Output> {
    let g = match (&a.graph, a.d) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            // Accepts a bare graph or a `graph` command report.
            let mut value: Value = serde_json::from_str(&text)?;
            if let Some(inner) = value.get_mut("result") {
                value = inner.take();
            }
            let parsed: GraphJson = serde_json::from_value(value)?;
            if parsed.vertices.len() > cfg.caps.graph {
                return Err(Error::Capacity {
                    what: "graph vertices",
                    requested: parsed.vertices.len() as u128,
                    cap: cfg.caps.graph as u128,
                });
            }
            OrthogonalityGraph::from_json(&parsed)?
        }
        (None, Some(d)) => family_graph(cfg, d, a.family)?,
        (None, None) => return Err(Error::InvalidParameter("give --d or --graph".into())),
    };
    let r = independence_number(&g, Duration::from_secs_f64(cfg.budget_seconds));
    if !r.verify(&g) {
        return Err(Error::InvariantViolation(
            "independence witness contains an edge".into(),
        ));
    }
    let mut json = alpha_json(&g, &r)?;
    if let (None, Some(d), GraphFamily::Hadamard) = (&a.graph, a.d, a.family) {
        let shell = independent_set_lower_bound_with_cap(d, 0)?.value;
        json["weight_shell_lower_bound"] = json!(shell);
        if r.status == crate::graph::AlphaStatus::Exact && r.value < shell {
            return Err(Error::InvariantViolation(format!(
                "exact independence number {} is below the weight-shell set size {shell}",
                r.value
            )));
        }
    }
    let witness = r
        .witness
        .as_ref()
        .map(|w| w.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    let status = serde_json::to_value(r.status)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    let csv = csv_rows(
        &["value", "status", "vertex_count", "edge_count", "witness"],
        &[vec![
            r.value.to_string(),
            status,
            g.len().to_string(),
            g.edge_count().to_string(),
            witness,
        ]],
    )?;
    Ok(Output::new(json, csv))
}

fn coefficient_metadata() -> Vec<(String, String)> {
    vec![
        (
            "coefficient_convention".into(),
            COEFFICIENT_CONVENTION.into(),
        ),
        ("alternative_forms".into(), ALTERNATIVE_FORMS.join(" | ")),
    ]
}

fn cmd_bounds(cfg: &RunConfig, a: &BoundsArgs) -> Result<Output> {
    let rows = scaling_sweep(&[a.d], a.epsilon, cfg.execution)?;
    let mut json = json!({
        "coefficient_convention": COEFFICIENT_CONVENTION,
        "alternative_forms": ALTERNATIVE_FORMS,
        "divisible_by_four": a.d.is_multiple_of(4),
        "report": rows[0],
    });
    let mut meta = coefficient_metadata();
    if let (Some(alpha), Some(n), Some(min_born)) = (a.alpha, a.n_states, a.min_born) {
        let value = corollary_bound(alpha, n, min_born)?;
        json["corollary_custom"] = json!({
            "alpha": alpha,
            "n_states": n,
            "min_born": min_born,
            "value": value,
            "vacuous": value >= 1.0,
        });
        meta.push((
            "corollary_custom".into(),
            format!("alpha={alpha} n_states={n} min_born={min_born} value={value}"),
        ));
    }
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &[], &mut csv)?;
    let mut out = Output::new(json, csv);
    out.csv_metadata = meta;
    Ok(out)
}

fn bb84_setup() -> Result<(Vec<PureState>, Vec<MeasurementBasis>, Vec<String>)> {
    let states = vec![
        PureState::from_real(&[1.0, 0.0])?,
        PureState::from_real(&[0.0, 1.0])?,
        PureState::from_real(&[1.0, 1.0])?,
        PureState::from_real(&[1.0, -1.0])?,
    ];
    let bases = vec![
        MeasurementBasis::new(0, states[..2].to_vec())?,
        MeasurementBasis::new(1, states[2..].to_vec())?,
    ];
    let labels = ["0", "1", "+", "-"].iter().map(|s| s.to_string()).collect();
    Ok((states, bases, labels))
}

fn cmd_lp(cfg: &RunConfig, a: &LpArgs) -> Result<Output> {
    let (psi, states, bases, labels, graph) = match a.family {
        LpFamily::Bb84 => {
            if a.d != 2 {
                return Err(Error::InvalidParameter(format!(
                    "family bb84 needs --d 2, got {}",
                    a.d
                )));
            }
            let (states, bases, labels) = bb84_setup()?;
            let graph = orthogonality_graph(&states)?;
            (states[0].clone(), states, bases, labels, graph)
        }
        LpFamily::HadamardEven => {
            let graph = family_graph(cfg, a.d, GraphFamily::HadamardEven)?;
            let signs = hadamard_parity_class(a.d, false)?;
            let states: Vec<PureState> = signs.iter().map(|v| v.to_state()).collect();
            let mut bases = covering_set(&graph)?.bases;
            if bases.is_empty() {
                bases.push(MeasurementBasis::computational(0, a.d)?);
            }
            let labels = signs.iter().map(|v| v.to_string()).collect();
            (
                PureState::basis_vector(a.d, 0)?,
                states,
                bases,
                labels,
                graph,
            )
        }
    };
    let alpha = independence_number(&graph, Duration::from_secs_f64(cfg.budget_seconds));
    let options = LpOptions {
        arithmetic: if a.rational {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        },
        assignment_cap: cfg.caps.assignments,
        ..LpOptions::default()
    };
    let out = max_total_overlap_lp(&psi, &states, &bases, options)?;
    let born_error = born_check(&out.model);
    let mut pairs = Vec::with_capacity(states.len());
    let mut rows = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let quantum = quantum_overlap(&psi, s)?;
        let exact = out.exact_pair_overlaps.as_ref().map(|v| v[k].to_string());
        pairs.push(json!({
            "index": k,
            "state": labels[k],
            "classical_overlap": out.pair_overlaps[k],
            "classical_overlap_exact": exact,
            "quantum_overlap": quantum,
        }));
        rows.push(vec![
            k.to_string(),
            labels[k].clone(),
            out.pair_overlaps[k].to_string(),
            exact.unwrap_or_default(),
            quantum.to_string(),
        ]);
    }
    let json = json!({
        "objective": out.value,
        "objective_exact": out.exact_value.as_ref().map(|v| v.to_string()),
        "alpha": alpha,
        "bound_holds": out.value <= alpha_bound(&alpha) + 1e-9,
        "covering_bases": bases.len(),
        "born_max_error": born_error,
        "pairs": pairs,
        "solver": out.stats,
    });
    let csv = csv_rows(
        &[
            "index",
            "state",
            "classical_overlap",
            "classical_overlap_exact",
            "quantum_overlap",
        ],
        &rows,
    )?;
    if let Some(path) = &a.model_out {
        let mut bytes = serde_json::to_vec_pretty(&out.model.to_json())?;
        bytes.push(b'\n');
        std::fs::write(path, bytes)?;
    }
    let mut output = Output::new(json, csv);
    output.csv_metadata = vec![
        ("objective".into(), out.value.to_string()),
        (
            "objective_exact".into(),
            out.exact_value
                .as_ref()
                .map(|v| v.to_string())
                .unwrap_or_default(),
        ),
        (
            "alpha".into(),
            format!("{} ({:?})", alpha.value, alpha.status),
        ),
    ];
    if out.value > alpha_bound(&alpha) + 1e-9 {
        output.violation = Some(format!(
            "total classical overlap {} exceeds the independence number {}",
            out.value, alpha.value
        ));
    } else if born_error > 1e-7 {
        output.violation = Some(format!(
            "witness model misses Born statistics by {born_error}"
        ));
    }
    Ok(output)
}

/// A value that is certainly `>= alpha`, or infinity when only a lower
/// bound is known.
fn alpha_bound(r: &IndependenceResult) -> f64 {
    match r.status {
        crate::graph::AlphaStatus::LowerBound => f64::INFINITY,
        _ => r.value as f64,
    }
}

fn cmd_ksqubit(cfg: &RunConfig, a: &KsArgs) -> Result<Output> {
    let rows = ksqubit::overlap_grid(a.points, a.resolution, cfg.execution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut born_error: f64 = 0.0;
    for _ in 0..100 {
        let mut unit = || {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let p: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - z * z).sqrt();
            BlochVector::normalized(r * p.cos(), r * p.sin(), z)
        };
        let (m, psi) = (unit()?, unit()?);
        let got = ksqubit::born_quadrature_with(&m, &psi, a.resolution, cfg.execution)?;
        born_error = born_error.max((got - (1.0 + m.dot(&psi)) / 2.0).abs());
    }
    let excess = rows
        .iter()
        .map(|r| r.classical - r.quantum)
        .fold(f64::NEG_INFINITY, f64::max);
    let json = json!({
        "born_max_error": born_error,
        "max_classical_minus_quantum": excess,
        "rows": rows,
    });
    let mut csv = Vec::new();
    ksqubit::write_grid_csv(&rows, &mut csv)?;
    let mut out = Output::new(json, csv);
    out.csv_metadata = vec![("born_max_error".into(), born_error.to_string())];
    if excess > 1e-6 {
        out.violation = Some(format!(
            "classical overlap exceeds quantum overlap by {excess}"
        ));
    }
    Ok(out)
}

fn cmd_sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<Output> {
    let rows = scaling_sweep(&a.d.values(), a.epsilon, cfg.execution)?;
    let json = json!({
        "coefficient_convention": COEFFICIENT_CONVENTION,
        "alternative_forms": ALTERNATIVE_FORMS,
        "rows": rows,
    });
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &[], &mut csv)?;
    let mut out = Output::new(json, csv);
    out.csv_metadata = coefficient_metadata();
    Ok(out)
}

fn cmd_prop1(cfg: &RunConfig, a: &Prop1Args) -> Result<Output> {
    let s = proposition1_search(
        cfg.seed,
        a.models,
        &RandomModelShape::default(),
        cfg.execution,
    )?;
    let json = serde_json::to_value(&s)?;
    let csv = csv_rows(
        &[
            "models",
            "checks",
            "violations",
            "max_excess",
            "max_born_deviation",
        ],
        &[vec![
            s.models.to_string(),
            s.checks.to_string(),
            s.violations.to_string(),
            s.max_excess.to_string(),
            s.max_born_deviation.to_string(),
        ]],
    )?;
    let mut out = Output::new(json, csv);
    if s.violations > 0 {
        out.violation = Some(format!(
            "{} measure-one subsets carry less psi-mass than the classical overlap",
            s.violations
        ));
    }
    Ok(out)
}
