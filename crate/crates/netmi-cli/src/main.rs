//! `netmi` — measure degree/attribute information in attributed networks,
//! generate synthetic ones, and tune a randomized edge-addition
//! distribution against the measure.
//!
//! Every experiment subcommand takes all of its configuration by flags
//! (no environment variables), requires an explicit seed, and writes a
//! `manifest.json` next to its CSV outputs; re-running with the same
//! manifest reproduces the CSVs byte for byte.
//!
//! Exit codes: 0 on success, 2 when a sweep completed but skipped
//! degenerate replicates (a warning goes to stderr), 1 on error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use netmi::experiments::{
    self, alpha_sweep_csv, dmpa_sweep_csv, temporal_csv, theta_csv, trace_csv,
};
use netmi::generators::{self, DmpaConfig, SbmConfig};
use netmi::io;
use netmi::measures::{measure_graph_capped, RenyiOrder};
use netmi::spsa::{self, Direction, EdgePmf, ObjectiveMode, SpsaConfig};

const MANIFEST_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "netmi", version, about = "Degree/attribute information measures for networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure one graph and print a flat JSON report to stdout.
    Measure(MeasureArgs),
    /// Generate a synthetic network and write an edge/attribute file pair.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Export the joint degree-and-attribute matrix as CSV.
    Jdam(JdamArgs),
    /// Correlate the measure with attribute assortativity across SBM
    /// replicates, per Rényi order.
    SweepAlpha(SweepAlphaArgs),
    /// Measure growth-model networks over a (p_f, rho_att) grid.
    SweepDmpa(SweepDmpaArgs),
    /// Tune the conditional-logit edge-addition model.
    Optimize(OptimizeArgs),
    /// Add sampled edges to a graph and trace the metrics.
    AddEdges(AddEdgesArgs),
    /// Measure a directory of snapshot pairs in tag order.
    Temporal(TemporalArgs),
}

#[derive(Args)]
struct GraphInput {
    /// Edge file: one `u v [w]` per line, `#` comments ignored.
    #[arg(long)]
    edges: PathBuf,
    /// Attribute file: one `node attr` per line, attr in {+1, -1, m, f}.
    #[arg(long)]
    attrs: PathBuf,
}

impl GraphInput {
    fn load(&self) -> Result<netmi::AttributedMultigraph> {
        io::load_graph(&self.edges, &self.attrs)
            .with_context(|| format!("loading {} / {}", self.edges.display(), self.attrs.display()))
    }
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Rényi order.
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    /// Clamp degrees to this value before binning.
    #[arg(long)]
    kmax_cutoff: Option<u64>,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// 2-block stochastic blockmodel, resampled until connected.
    Sbm(GenerateSbmArgs),
    /// Condensed directed mixed preferential-attachment growth model,
    /// projected to an undirected multigraph.
    Dmpa(GenerateDmpaArgs),
}

#[derive(Args)]
struct GenerateSbmArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    p_in: f64,
    #[arg(long)]
    p_out: f64,
    #[arg(long)]
    seed: u64,
    /// Output prefix; writes `<prefix>.edges` and `<prefix>.attrs`.
    #[arg(long, value_name = "PREFIX")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateDmpaArgs {
    /// Probability that an arriving node is the minority type.
    #[arg(long)]
    p_f: f64,
    /// Same-type edge acceptance probability.
    #[arg(long)]
    rho_att: f64,
    #[arg(long, default_value_t = 0.15)]
    p_event: f64,
    #[arg(long, default_value_t = 0.15)]
    q_event: f64,
    /// Preferential-attachment offset.
    #[arg(long, default_value_t = 10.0)]
    delta: f64,
    /// Directed edges to grow (including the seed edge).
    #[arg(long = "edges", value_name = "COUNT")]
    target_edges: usize,
    #[arg(long)]
    seed: u64,
    /// Swap the in-/out-degree attachment rule of the two arrival events.
    #[arg(long)]
    swap_pa_degrees: bool,
    /// Output prefix; writes `<prefix>.edges` and `<prefix>.attrs`.
    #[arg(long, value_name = "PREFIX")]
    out: PathBuf,
}

#[derive(Args)]
struct JdamArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Write probabilities (sum 1) instead of integer counts.
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    kmax_cutoff: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepAlphaArgs {
    #[arg(long, default_value_t = 30)]
    n1: usize,
    #[arg(long, default_value_t = 30)]
    n2: usize,
    #[arg(long, default_value_t = 0.3)]
    p_in: f64,
    #[arg(long, default_value_t = 0.05)]
    p_out: f64,
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[arg(long, default_value_t = 0.6)]
    alpha_start: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha_stop: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha_step: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepDmpaArgs {
    /// Comma-separated minority-arrival probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    p_f_list: Vec<f64>,
    /// Comma-separated acceptance probabilities.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.05,0.15,0.25,0.35,0.45,0.55,0.65,0.75,0.85,0.95"
    )]
    rho_list: Vec<f64>,
    #[arg(long = "edges", value_name = "COUNT", default_value_t = 2000)]
    target_edges: usize,
    #[arg(long, default_value_t = 0.15)]
    p_event: f64,
    #[arg(long, default_value_t = 0.15)]
    q_event: f64,
    #[arg(long, default_value_t = 10.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    #[arg(long)]
    swap_pa_degrees: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Minimize,
    Maximize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ObjectiveModeArg {
    GraphExact,
    JdamPaper,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    /// Perturbation scale.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Step size.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Decay exponent for the perturbation scale (0 = constant).
    #[arg(long, default_value_t = 0.0)]
    delta_decay: f64,
    /// Decay exponent for the step size (0 = constant).
    #[arg(long, default_value_t = 0.0)]
    epsilon_decay: f64,
    #[arg(long, value_enum, default_value_t = DirectionArg::Minimize)]
    direction: DirectionArg,
    #[arg(long, default_value_t = 1)]
    samples_per_eval: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveModeArg::GraphExact)]
    objective_mode: ObjectiveModeArg,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct AddEdgesArgs {
    #[command(flatten)]
    input: GraphInput,
    /// `uniform` or a path to a theta.csv written by `optimize`.
    #[arg(long)]
    pmf: String,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct TemporalArgs {
    /// Directory of `<tag>.edges` / `<tag>.attrs` pairs.
    #[arg(long)]
    snapshots: PathBuf,
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), content).with_context(|| format!("writing {name}"))?;
    Ok(())
}

fn write_manifest(dir: &Path, manifest: &serde_json::Value) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(manifest)?);
    write_output(dir, "manifest.json", &text)
}

fn alpha_list(start: f64, stop: f64, step: f64) -> Vec<f64> {
    // Integer stepping keeps grid values exact (0.6, 0.7, ... not 0.7000001).
    let scale = 1.0 / step;
    let lo = (start * scale).round() as i64;
    let hi = (stop * scale).round() as i64;
    (lo..=hi).map(|i| i as f64 / scale).collect()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Measure(args) => {
            let g = args.input.load()?;
            let alpha = RenyiOrder::new(args.alpha)?;
            let report = measure_graph_capped(&g, alpha, args.kmax_cutoff)?;
            let gammas = netmi::assortativity::assortativity_report(&g)?;
            let out = json!({
                "alpha": report.alpha,
                "shannon_H": report.shannon_h,
                "degree_mi": report.degree_mi,
                "joint_mi": report.joint_mi,
                "delta_i": report.attribute_conditional_mi,
                "gamma_deg": gammas.gamma_deg,
                "gamma_att": gammas.gamma_att,
            });
            println!("{}", serde_json::to_string(&out)?);
            Ok(0)
        }
        Command::Generate(GenerateCmd::Sbm(args)) => {
            let cfg = SbmConfig {
                n1: args.n1,
                n2: args.n2,
                p_in: args.p_in,
                p_out: args.p_out,
                seed: args.seed,
            };
            let g = generators::generate_sbm(&cfg)?;
            write_graph_pair(&g, &args.out)?;
            Ok(0)
        }
        Command::Generate(GenerateCmd::Dmpa(args)) => {
            let cfg = DmpaConfig {
                p_f: args.p_f,
                rho_att: args.rho_att,
                p_event: args.p_event,
                q_event: args.q_event,
                delta: args.delta,
                target_edges: args.target_edges,
                seed: args.seed,
                swap_pa_degrees: args.swap_pa_degrees,
            };
            let g = generators::project_undirected(&generators::generate_dmpa(&cfg)?);
            write_graph_pair(&g, &args.out)?;
            Ok(0)
        }
        Command::Jdam(args) => {
            let g = args.input.load()?;
            let csv = if args.normalized {
                let jdam = netmi::dist::build_jdam_capped(&g, args.kmax_cutoff)?;
                let nj = netmi::dist::NormalizedJdam::from_jdam(&jdam)?;
                normalized_jdam_csv(&nj)
            } else {
                let jdam = netmi::dist::build_jdam_capped(&g, args.kmax_cutoff)?;
                jdam_csv(&jdam)
            };
            match args.out {
                Some(path) => fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::SweepAlpha(args) => {
            let sbm = SbmConfig {
                n1: args.n1,
                n2: args.n2,
                p_in: args.p_in,
                p_out: args.p_out,
                seed: 0,
            };
            let alphas = alpha_list(args.alpha_start, args.alpha_stop, args.alpha_step);
            let result = experiments::sweep_alpha(&sbm, &alphas, args.replicates, args.seed)?;
            write_output(&args.out, "alpha_sweep.csv", &alpha_sweep_csv(&result))?;
            write_manifest(
                &args.out,
                &json!({
                    "artifact": "netmi",
                    "version": MANIFEST_VERSION,
                    "command": "sweep-alpha",
                    "master_seed": args.seed,
                    "config": {
                        "n1": args.n1, "n2": args.n2,
                        "p_in": args.p_in, "p_out": args.p_out,
                        "replicates": args.replicates,
                        "alphas": alphas,
                    },
                }),
            )?;
            let skipped = result
                .records
                .first()
                .map(|r| r.n_skipped_degenerate)
                .unwrap_or(0);
            if skipped > 0 {
                eprintln!("warning: skipped {skipped} degenerate replicates");
                return Ok(2);
            }
            Ok(0)
        }
        Command::SweepDmpa(args) => {
            let base = DmpaConfig {
                p_f: 0.3,
                rho_att: 0.5,
                p_event: args.p_event,
                q_event: args.q_event,
                delta: args.delta,
                target_edges: args.target_edges,
                seed: 0,
                swap_pa_degrees: args.swap_pa_degrees,
            };
            let alpha = RenyiOrder::new(args.alpha)?;
            let result =
                experiments::sweep_dmpa(&args.p_f_list, &args.rho_list, &base, alpha, args.seed)?;
            write_output(&args.out, "dmpa_sweep.csv", &dmpa_sweep_csv(&result))?;
            write_manifest(
                &args.out,
                &json!({
                    "artifact": "netmi",
                    "version": MANIFEST_VERSION,
                    "command": "sweep-dmpa",
                    "master_seed": args.seed,
                    "config": {
                        "p_f_list": args.p_f_list,
                        "rho_list": args.rho_list,
                        "target_edges": args.target_edges,
                        "p_event": args.p_event,
                        "q_event": args.q_event,
                        "delta": args.delta,
                        "alpha": args.alpha,
                        "swap_pa_degrees": args.swap_pa_degrees,
                    },
                }),
            )?;
            Ok(0)
        }
        Command::Optimize(args) => {
            let g = args.input.load()?;
            let alpha = RenyiOrder::new(args.alpha)?;
            let cfg = SpsaConfig {
                delta: args.delta,
                epsilon: args.epsilon,
                iterations: args.iterations,
                direction: match args.direction {
                    DirectionArg::Minimize => Direction::Minimize,
                    DirectionArg::Maximize => Direction::Maximize,
                },
                seed: args.seed,
                samples_per_eval: args.samples_per_eval,
                mode: match args.objective_mode {
                    ObjectiveModeArg::GraphExact => ObjectiveMode::GraphExact,
                    ObjectiveModeArg::JdamPaper => ObjectiveMode::JdamPaper,
                },
                delta_decay: args.delta_decay,
                epsilon_decay: args.epsilon_decay,
            };
            let run = spsa::optimize_full(&g, alpha, &cfg)?;
            write_output(&args.out, "theta.csv", &theta_csv(&run))?;
            write_manifest(
                &args.out,
                &json!({
                    "artifact": "netmi",
                    "version": MANIFEST_VERSION,
                    "command": "optimize",
                    "seed": args.seed,
                    "config": {
                        "edges": args.input.edges.display().to_string(),
                        "attrs": args.input.attrs.display().to_string(),
                        "alpha": args.alpha,
                        "iterations": args.iterations,
                        "delta": args.delta,
                        "epsilon": args.epsilon,
                        "delta_decay": args.delta_decay,
                        "epsilon_decay": args.epsilon_decay,
                        "direction": match args.direction {
                            DirectionArg::Minimize => "minimize",
                            DirectionArg::Maximize => "maximize",
                        },
                        "samples_per_eval": args.samples_per_eval,
                        "objective_mode": match args.objective_mode {
                            ObjectiveModeArg::GraphExact => "graph-exact",
                            ObjectiveModeArg::JdamPaper => "jdam-paper",
                        },
                    },
                }),
            )?;
            Ok(0)
        }
        Command::AddEdges(args) => {
            let g = args.input.load()?;
            let alpha = RenyiOrder::new(args.alpha)?;
            let pmf = if args.pmf == "uniform" {
                EdgePmf::Uniform
            } else {
                let text = fs::read_to_string(&args.pmf)
                    .with_context(|| format!("reading pmf file {}", args.pmf))?;
                EdgePmf::Table(experiments::parse_pmf_csv(&text)?)
            };
            let mut rng = netmi::numeric::seeded_rng(args.seed);
            let (_, trace) = spsa::apply_edges(&g, &pmf, args.count, alpha, &mut rng)?;
            write_output(&args.out, "trace.csv", &trace_csv(&trace))?;
            write_manifest(
                &args.out,
                &json!({
                    "artifact": "netmi",
                    "version": MANIFEST_VERSION,
                    "command": "add-edges",
                    "seed": args.seed,
                    "config": {
                        "edges": args.input.edges.display().to_string(),
                        "attrs": args.input.attrs.display().to_string(),
                        "pmf": args.pmf,
                        "count": args.count,
                        "alpha": args.alpha,
                    },
                }),
            )?;
            Ok(0)
        }
        Command::Temporal(args) => {
            let alpha = RenyiOrder::new(args.alpha)?;
            let result = experiments::temporal_analysis(&args.snapshots, alpha)?;
            write_output(&args.out, "temporal.csv", &temporal_csv(&result))?;
            let summary = format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({ "kendall_tau": result.kendall_tau }))?
            );
            write_output(&args.out, "summary.json", &summary)?;
            write_manifest(
                &args.out,
                &json!({
                    "artifact": "netmi",
                    "version": MANIFEST_VERSION,
                    "command": "temporal",
                    "config": {
                        "snapshots": args.snapshots.display().to_string(),
                        "alpha": args.alpha,
                    },
                }),
            )?;
            Ok(0)
        }
    }
}

fn write_graph_pair(g: &netmi::AttributedMultigraph, prefix: &Path) -> Result<()> {
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if stem.is_empty() {
        bail!("--out prefix must name a file stem");
    }
    let edges = prefix.with_extension("edges");
    let attrs = prefix.with_extension("attrs");
    io::save_graph(g, &edges, &attrs)?;
    Ok(())
}

fn jdam_csv(jdam: &netmi::dist::Jdam) -> String {
    let k_rows = jdam.k_rows();
    let label = |row: usize| {
        let (k, attr) = netmi::dist::row_group(row);
        format!("{k}:{attr}")
    };
    let mut out = String::new();
    for col in 0..2 * k_rows {
        out.push(',');
        out.push_str(&label(col));
    }
    out.push('\n');
    for row in 0..2 * k_rows {
        out.push_str(&label(row));
        for col in 0..2 * k_rows {
            out.push(',');
            out.push_str(&jdam.cells().get(row, col).to_string());
        }
        out.push('\n');
    }
    out
}

fn normalized_jdam_csv(nj: &netmi::dist::NormalizedJdam) -> String {
    let k_rows = nj.k_rows();
    let label = |row: usize| {
        let (k, attr) = netmi::dist::row_group(row);
        format!("{k}:{attr}")
    };
    let mut out = String::new();
    for col in 0..2 * k_rows {
        out.push(',');
        out.push_str(&label(col));
    }
    out.push('\n');
    for row in 0..2 * k_rows {
        out.push_str(&label(row));
        for col in 0..2 * k_rows {
            out.push(',');
            out.push_str(&nj.p4().get(row, col).to_string());
        }
        out.push('\n');
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
