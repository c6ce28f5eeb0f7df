//! `mse-lab`: reduce Vertex Cover files to planar MSE instances, verify and
//! solve them, and emit gadgets.
//!
//! Exit codes: 0 accept/yes, 1 reject/no, 2 usage or parse error, 3 an oracle
//! cap was hit, 4 the two oracles disagreed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mse_core::gadgets::{make_bundle, make_chain, make_crossing, make_feather, make_grid, make_rainbow, GadgetHandle};
use mse_core::graph::{export, ExportFormat};
use mse_core::oracles::{
    build_canonical_routes, check_invariant_1, check_invariant_2, solve_mse_exact_flow, solve_mse_exact_paths, verify_routes, FlowConfig,
    InvariantReport, MseVerdict, OracleError, PathsConfig, RouteSet, RouteVerdict,
};
use mse_core::reduction::{
    compute_params, continue_pipeline, estimate_pipeline, run_pipeline, LayoutMap, MseInstance, PipelineReport, ReductionError, Stage,
    StageReport, VcInstance,
};
use thiserror::Error;

/// `println!` that ignores a closed stdout, so piping into `head` is quiet.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout(), $($arg)*);
    }};
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Disagreement(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Disagreement(_) => 4,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } => CliError::Cap(format!("refusing: {e}")),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Accept,
    Reject,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Accept
        } else {
            Outcome::Reject
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mse-lab", version, about = "Vertex Cover to planar Minimum Shared Edges reduction lab")]
struct Cli {
    /// Worker threads for the flow oracle; 0 picks one per core.
    #[arg(long, global = true, env = "MSE_LAB_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce a VC file, running every stage up to --stage.
    Reduce {
        input: PathBuf,
        #[arg(long, default_value = "base")]
        stage: Stage,
        /// Instance JSON to write.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Layout JSON to write; defaults to `<out>.layout.json`.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Print stage reports as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Run further stages on a written instance and its layout.
    Resume {
        instance: PathBuf,
        layout: PathBuf,
        #[arg(long)]
        stage: Stage,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        layout_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the closed-form size of every stage without building anything.
    Estimate { input: PathBuf },
    /// Check a routes file against an instance.
    Verify {
        instance: PathBuf,
        routes: PathBuf,
        /// Layout of the instance; enables the invariant checks.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Decide an instance exactly.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Flow)]
        method: Method,
        #[arg(long, default_value_t = 200)]
        max_edges: usize,
        #[arg(long, default_value_t = 4)]
        max_k: u64,
        #[arg(long, default_value_t = 100_000)]
        max_paths: usize,
        #[arg(long, default_value_t = 5)]
        max_p: u64,
        /// Write the witness routes here when the answer is yes.
        #[arg(long)]
        routes_out: Option<PathBuf>,
    },
    /// Build the routes induced by a vertex cover.
    Canonical {
        instance: PathBuf,
        layout: PathBuf,
        /// Comma-separated 1-based VC vertices, e.g. `1,3`.
        #[arg(long, value_delimiter = ',')]
        cover: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert an instance graph to JSON or DOT.
    Export {
        instance: PathBuf,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a standalone gadget as an instance between its two terminals.
    Gadget {
        #[arg(value_enum)]
        kind: GadgetKind,
        /// Shape parameters: chain m, bundle l m, feather q l m, rainbow l m,
        /// grid a b, crossing len.
        params: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
        /// `instance`, `json` or `dot`.
        #[arg(long, default_value = "instance")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Flow,
    Paths,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GadgetKind {
    Chain,
    Bundle,
    Feather,
    Rainbow,
    Grid,
    Crossing,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or to stdout when it is absent or `-`.
fn write(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn read_vc(path: &Path) -> Result<VcInstance, CliError> {
    let text = String::from_utf8(read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<(MseInstance, mse_core::reduction::InstanceFile), CliError> {
    MseInstance::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_layout(path: &Path) -> Result<LayoutMap, CliError> {
    serde_json::from_slice(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Loads an instance and a layout and checks that they belong together.
fn read_pair(instance: &Path, layout: &Path) -> Result<(MseInstance, LayoutMap), CliError> {
    let (inst, file) = read_instance(instance)?;
    let layout = read_layout(layout)?;
    file.check_layout(&layout)?;
    Ok((inst, layout))
}

fn default_layout_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".layout.json");
    out.with_file_name(name)
}

fn print_stage(st: &StageReport, json: bool) {
    if json {
        out!("{}", serde_json::to_string(st).expect("report serialises"));
        return;
    }
    let planar = match &st.planar_verdict {
        Ok(v) if v.is_certified() => "certified".to_string(),
        Ok(v) => format!("{v:?}"),
        Err(e) => format!("unchecked ({e})"),
    };
    let opt = |x: Option<usize>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
    out!(
        "stage={} vertices={} edges={} budget={} routes={} minProperChain={} maxDegree={} maxInDegree={} maxOutDegree={} planar={} wallTimeMs={:.1}",
        st.stage,
        st.vertex_count,
        st.edge_count,
        st.budget,
        st.routes,
        opt(st.min_proper_chain_length),
        st.max_degree,
        opt(st.max_in_degree),
        opt(st.max_out_degree),
        planar,
        st.wall_time_ms
    );
}

fn print_pipeline(report: &PipelineReport, layout: &LayoutMap, json: bool) -> bool {
    if let Some(from) = report.padded_from {
        out!("padded: n {from} -> {} with isolated vertices", layout.n());
    }
    if let Some(ledger) = &report.subdivision {
        out!("subdivision: {} rounds, threshold 2Mc' = {}", ledger.rounds, ledger.threshold);
    }
    report.stages.iter().for_each(|st| print_stage(st, json));
    report.stages.iter().all(StageReport::is_planar)
}

fn write_outputs(inst: &MseInstance, layout: &LayoutMap, out: &Path, layout_out: Option<&Path>) -> Result<(), CliError> {
    let layout_path = layout_out.map(Path::to_path_buf).unwrap_or_else(|| default_layout_path(out));
    write(Some(out), &inst.to_json(Some(layout.stage), Some(layout)))?;
    write(Some(&layout_path), &serde_json::to_vec(layout).expect("layout serialises"))?;
    out!("wrote {} and {} (layout digest {})", out.display(), layout_path.display(), layout.digest());
    Ok(())
}

fn cmd_reduce(input: &Path, stage: Stage, out: Option<&Path>, layout_out: Option<&Path>, json: bool) -> Result<Outcome, CliError> {
    let vc = read_vc(input)?;
    let params = compute_params(&vc)?;
    out!(
        "n={} m={} k={} M={} k'={} p={}",
        params.n, params.m, params.k, params.big_m, params.k_prime, params.p
    );
    let (inst, layout, report) = run_pipeline(&vc, stage)?;
    let planar = print_pipeline(&report, &layout, json);
    if let Some(out) = out {
        write_outputs(&inst, &layout, out, layout_out)?;
    }
    Ok(Outcome::from_bool(planar))
}

fn cmd_resume(instance: &Path, layout: &Path, stage: Stage, out: &Path, layout_out: Option<&Path>, json: bool) -> Result<Outcome, CliError> {
    let (inst, layout) = read_pair(instance, layout)?;
    if layout.stage >= stage {
        return Err(CliError::Input(format!("instance is already at the {} stage", layout.stage)));
    }
    let (inst, layout, report) = continue_pipeline(inst, layout, stage)?;
    let planar = print_pipeline(&report, &layout, json);
    write_outputs(&inst, &layout, out, layout_out)?;
    Ok(Outcome::from_bool(planar))
}

fn cmd_estimate(input: &Path) -> Result<Outcome, CliError> {
    let est = estimate_pipeline(&read_vc(input)?)?;
    out!("padded n={} bundles={} rounds={}", est.n, est.bundles, est.rounds);
    for stage in Stage::ALL {
        out!("stage={} edges={} budget={}", stage, est.edges_at(stage), est.budget_at(stage));
    }
    Ok(Outcome::Accept)
}

fn print_invariant(name: &str, r: &InvariantReport) {
    let verdict = if r.holds { "holds" } else { "violated" };
    out!("{name}: {verdict} (routes per row {:?}, validation {})", r.per_row, r.validation);
    for v in &r.violations {
        out!("  {v}");
    }
}

fn cmd_verify(instance: &Path, routes: &Path, layout: Option<&Path>) -> Result<Outcome, CliError> {
    let (inst, file) = read_instance(instance)?;
    let layout = match layout {
        Some(p) => {
            let l = read_layout(p)?;
            file.check_layout(&l)?;
            Some(l)
        }
        None => None,
    };
    let set = RouteSet::from_json(&read(routes)?, &inst.graph).map_err(|e| CliError::Input(format!("{}: {e}", routes.display())))?;
    let verdict = verify_routes(&inst, &set);
    if let Some(report) = verdict.report() {
        out!("shared={} budget={} routes={}", report.count, inst.k, set.len());
        out!("{}", serde_json::to_string(report).expect("report serialises"));
    }
    let mut ok = verdict.is_accept();
    match &verdict {
        RouteVerdict::Accept(_) => out!("accept"),
        RouteVerdict::Reject { reason, .. } => out!("reject: {reason}"),
    }
    if let (Some(layout), Some(_)) = (&layout, verdict.report()) {
        let one = check_invariant_1(layout, &set)?;
        let two = check_invariant_2(layout, &set)?;
        print_invariant("invariant 1", &one);
        print_invariant("invariant 2", &two);
        ok &= one.holds && two.holds;
    }
    Ok(Outcome::from_bool(ok))
}

fn print_verdict(name: &str, v: &MseVerdict) {
    match v {
        MseVerdict::Yes { shared, routes } => {
            let ids: Vec<u32> = shared.iter().map(|e| e.0).collect();
            out!("{name}: yes, shared edges {ids:?}");
            for (i, r) in routes.routes.iter().enumerate() {
                let edges: Vec<u32> = r.edges.iter().map(|e| e.0).collect();
                out!("  route {i}: {edges:?}");
            }
        }
        MseVerdict::No => out!("{name}: no"),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: &Path,
    method: Method,
    jobs: usize,
    max_edges: usize,
    max_k: u64,
    max_paths: usize,
    max_p: u64,
    routes_out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (inst, _) = read_instance(instance)?;
    out!("p={} k={} edges={}", inst.p, inst.k, inst.graph.edge_count());
    let flow = matches!(method, Method::Flow | Method::Both)
        .then(|| solve_mse_exact_flow(&inst, &FlowConfig { max_edges, max_k, jobs }))
        .transpose()?;
    let paths = matches!(method, Method::Paths | Method::Both)
        .then(|| solve_mse_exact_paths(&inst, &PathsConfig { max_paths, max_p }))
        .transpose()?;
    if let Some(v) = &flow {
        print_verdict("flow", v);
    }
    if let Some(v) = &paths {
        print_verdict("paths", v);
    }
    if let (Some(a), Some(b)) = (&flow, &paths) {
        if a.is_yes() != b.is_yes() {
            return Err(CliError::Disagreement(format!("oracles disagree: flow {}, paths {}", a.is_yes(), b.is_yes())));
        }
    }
    let verdict = flow.or(paths).expect("at least one method runs");
    if let (MseVerdict::Yes { routes, .. }, Some(path)) = (&verdict, routes_out) {
        write(Some(path), &routes.to_json())?;
    }
    Ok(Outcome::from_bool(verdict.is_yes()))
}

fn cmd_canonical(instance: &Path, layout: &Path, cover: &[u32], out: Option<&Path>) -> Result<Outcome, CliError> {
    let (inst, layout) = read_pair(instance, layout)?;
    let routes = match build_canonical_routes(&inst, &layout, cover) {
        Ok(r) => r,
        Err(e @ (OracleError::NotACover { .. } | OracleError::CoverSize { .. } | OracleError::BadCover(_))) => {
            eprintln!("error: {e}");
            return Ok(Outcome::Reject);
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = verify_routes(&inst, &routes);
    let shared = verdict.report().map_or(0, |r| r.count);
    let summary = format!("routes={} shared={} budget={}", routes.len(), shared, inst.k);
    write(out, &routes.to_json())?;
    // Keep stdout clean for the routes when they go there.
    if out.is_some() {
        out!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::from_bool(verdict.is_accept()))
}

fn cmd_export(instance: &Path, format: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let format: ExportFormat = format.parse().map_err(|e: mse_core::graph::GraphError| CliError::Input(e.to_string()))?;
    let (inst, _) = read_instance(instance)?;
    write(out, &export(&inst.graph, format))?;
    Ok(Outcome::Accept)
}

fn build_gadget(kind: GadgetKind, params: &[u32]) -> Result<GadgetHandle, CliError> {
    let want = match kind {
        GadgetKind::Chain | GadgetKind::Crossing => 1,
        GadgetKind::Bundle | GadgetKind::Rainbow | GadgetKind::Grid => 2,
        GadgetKind::Feather => 3,
    };
    if params.len() != want {
        return Err(CliError::Input(format!("{kind:?} takes {want} parameters, got {}", params.len())));
    }
    let h = match kind {
        GadgetKind::Chain => make_chain(params[0]),
        GadgetKind::Bundle => make_bundle(params[0], params[1]),
        GadgetKind::Feather => make_feather(params[0], params[1], params[2]),
        GadgetKind::Rainbow => make_rainbow(params[0], params[1]),
        GadgetKind::Grid => make_grid(params[0], params[1]),
        GadgetKind::Crossing => make_crossing(params[0]),
    };
    h.map_err(|e| CliError::Input(e.to_string()))
}

fn cmd_gadget(kind: GadgetKind, params: &[u32], p: u64, k: u64, format: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let h = build_gadget(kind, params)?;
    let bytes = match format {
        "instance" => {
            let inst = MseInstance::new(h.graph, h.terminals.0, h.terminals.1, p, k).map_err(|e| CliError::Input(e.to_string()))?;
            inst.to_json(None, None)
        }
        other => {
            let format: ExportFormat = other.parse().map_err(|e: mse_core::graph::GraphError| CliError::Input(e.to_string()))?;
            export(&h.graph, format)
        }
    };
    write(out, &bytes)?;
    Ok(Outcome::Accept)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Reduce {
            input,
            stage,
            out,
            layout,
            json,
        } => cmd_reduce(&input, stage, out.as_deref(), layout.as_deref(), json),
        Command::Resume {
            instance,
            layout,
            stage,
            out,
            layout_out,
            json,
        } => cmd_resume(&instance, &layout, stage, &out, layout_out.as_deref(), json),
        Command::Estimate { input } => cmd_estimate(&input),
        Command::Verify { instance, routes, layout } => cmd_verify(&instance, &routes, layout.as_deref()),
        Command::Solve {
            instance,
            method,
            max_edges,
            max_k,
            max_paths,
            max_p,
            routes_out,
        } => cmd_solve(&instance, method, cli.jobs, max_edges, max_k, max_paths, max_p, routes_out.as_deref()),
        Command::Canonical { instance, layout, cover, out } => cmd_canonical(&instance, &layout, &cover, out.as_deref()),
        Command::Export { instance, format, out } => cmd_export(&instance, &format, out.as_deref()),
        Command::Gadget {
            kind,
            params,
            p,
            k,
            format,
            out,
        } => cmd_gadget(kind, &params, p, k, &format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Accept) => ExitCode::SUCCESS,
        Ok(Outcome::Reject) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
