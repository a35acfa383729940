//! `pagen` — generate, measure, forecast and audit polynomial
//! preferential-attachment graphs.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pagen::analytics;
use pagen::audit::{
    audit_increment_probabilities, audit_loop_probability, audit_pair_increments,
    default_audit_pairs, default_audit_vertices,
};
use pagen::generator::{generate, GenerationConfig};
use pagen::graph::{MultiGraph, SeedKind, SeedSpec};
use pagen::model::{preset, Preset, ThreeParamSpec, WeightTable};
use pagen::rng::RandomStream;
use pagen::theory;

mod sweep;

#[derive(Parser)]
#[command(
    name = "pagen",
    version,
    about = "Polynomial preferential-attachment graph toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a graph and write its edge list (and optional growth trace).
    Generate(GenerateArgs),
    /// Read an edge list and write a statistics report.
    Stats(StatsArgs),
    /// Print the closed-form constants and forecasts of a model.
    Theory(TheoryArgs),
    /// Monte Carlo audit of the one-step attachment laws.
    Audit(AuditArgs),
    /// Clustering/P2/triangle sweep over a geometric size grid.
    Sweep(sweep::SweepArgs),
}

/// Model selection shared by the generating commands. Exactly one source:
/// a weight-table file, the three-parameter family, or a preset.
#[derive(Args, Debug)]
struct ModelArgs {
    /// Number of edges each new vertex creates.
    #[arg(long)]
    m: u32,
    /// Weight-table CSV file with header "k,l,weight".
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,
    /// Three-parameter model: probability of a double-preferential pair.
    #[arg(long)]
    alpha: Option<f64>,
    /// Three-parameter model: probability of an edge-endpoint pair
    /// (delta is inferred as 1 - alpha - beta).
    #[arg(long)]
    beta: Option<f64>,
    /// Built-in table: "lcd-approx" or "uniform".
    #[arg(long)]
    preset: Option<String>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(WeightTable, Value), CliError> {
        let sources = [
            self.weights.is_some(),
            self.alpha.is_some() || self.beta.is_some(),
            self.preset.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::Usage(
                "pick exactly one model source: --weights, --alpha/--beta, or --preset".into(),
            ));
        }
        if let Some(path) = &self.weights {
            let file = File::open(path).map_err(|e| {
                CliError::Failure(format!("cannot open {}: {e}", path.display()))
            })?;
            let table = WeightTable::read_csv(self.m, BufReader::new(file))?;
            let desc = json!({ "source": "weights", "file": path.display().to_string(), "m": self.m });
            return Ok((table, desc));
        }
        if let Some(name) = &self.preset {
            let table = preset(name.parse::<Preset>()?, self.m)?;
            let desc = json!({ "source": "preset", "name": name, "m": self.m });
            return Ok((table, desc));
        }
        let alpha = self.alpha.unwrap_or(0.0);
        let beta = self.beta.unwrap_or(0.0);
        let spec = ThreeParamSpec::new(self.m, alpha, beta)?;
        let desc = json!({
            "source": "three-param",
            "m": self.m,
            "alpha": alpha,
            "beta": beta,
            "delta": spec.delta,
        });
        Ok((spec.to_table(), desc))
    }
}

#[derive(Args, Debug)]
struct SeedGraphArgs {
    /// Seed graph size.
    #[arg(long, default_value_t = 1)]
    n0: u32,
    /// Seed graph shape.
    #[arg(long, value_enum, default_value_t = SeedKindArg::SelfLoops)]
    seed_kind: SeedKindArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeedKindArg {
    SelfLoops,
    Cycle,
}

impl SeedGraphArgs {
    fn spec(&self) -> SeedSpec {
        let kind = match self.seed_kind {
            SeedKindArg::SelfLoops => SeedKind::SelfLoops,
            SeedKindArg::Cycle => SeedKind::Cycle,
        };
        SeedSpec { n0: self.n0, kind }
    }

    fn describe(&self) -> Value {
        json!({ "n0": self.n0, "kind": format!("{:?}", self.seed_kind) })
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Target vertex count.
    #[arg(long)]
    n: u64,
    /// Master seed of the random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    seed_graph: SeedGraphArgs,
    /// Edge-list output path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Growth-trace CSV output path.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Comma-separated checkpoint sizes (default: geometric grid).
    #[arg(long)]
    checkpoints: Option<String>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Edge-list input path.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Report JSON output path (default: stdout).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional degree-histogram CSV output.
    #[arg(long, value_name = "FILE")]
    histogram: Option<PathBuf>,
    /// Optional average-neighbor-degree CSV output.
    #[arg(long, value_name = "FILE")]
    dnn: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Graph size for size-dependent forecasts (critical clustering).
    #[arg(long)]
    n: Option<u64>,
    /// Number of degree-law rows in the cTable.
    #[arg(long, default_value_t = 50)]
    cmax: u32,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Size of the frozen graph audited for increments and pairs.
    #[arg(long, default_value_t = 10_000)]
    n: u64,
    /// Trials per audited observable.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    seed_graph: SeedGraphArgs,
    /// Comma-separated graph sizes for the loop-probability audit.
    #[arg(long, default_value = "100,1000,10000")]
    loop_sizes: String,
    /// Highest acceptable |z|.
    #[arg(long, default_value_t = 4.0)]
    z_bound: f64,
    /// Report JSON output path (default: stdout).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

enum CliError {
    /// Argument-level problem: exit code 2.
    Usage(String),
    /// Validation or runtime failure: exit code 1.
    Failure(String),
}

impl From<pagen::Error> for CliError {
    fn from(e: pagen::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Stats(args) => run_stats(args),
        Command::Theory(args) => run_theory(args),
        Command::Audit(args) => run_audit(args),
        Command::Sweep(args) => sweep::run(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("pagen: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("pagen: {msg}");
            ExitCode::from(1)
        }
    }
}

fn echo_config(command: &str, config: &Value) {
    eprintln!("pagen {command} config: {config}");
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("'{s}' is not a size")))
        })
        .collect()
}

fn write_or_stdout(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => {
            io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn run_generate(args: GenerateArgs) -> Result<ExitCode, CliError> {
    let (table, model_desc) = args.model.resolve()?;
    let checkpoints = match &args.checkpoints {
        Some(text) => parse_u64_list(text)?,
        None => Vec::new(),
    };
    let cfg = GenerationConfig {
        n: args.n,
        table,
        seed_spec: args.seed_graph.spec(),
        master_seed: args.seed,
        stream_index: 0,
        checkpoints,
    };
    let config = json!({
        "command": "generate",
        "n": args.n,
        "model": model_desc,
        "seedGraph": args.seed_graph.describe(),
        "masterSeed": args.seed,
        "streamIndex": 0,
    });
    echo_config("generate", &config);

    let started = Instant::now();
    let (graph, trace) = generate(&cfg)?;
    eprintln!(
        "pagen generate: {} vertices, {} edges in {:.6}s",
        graph.vertex_count(),
        graph.edge_count(),
        started.elapsed().as_secs_f64()
    );

    let comments = vec![format!("config: {config}")];
    let mut out = BufWriter::new(File::create(&args.out)?);
    graph.write_edge_list(&mut out, &comments)?;
    out.flush()?;
    if let Some(path) = &args.trace {
        let mut tf = BufWriter::new(File::create(path)?);
        trace.write_csv(&mut tf, &comments)?;
        tf.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_stats(args: StatsArgs) -> Result<ExitCode, CliError> {
    let file = File::open(&args.input)
        .map_err(|e| CliError::Failure(format!("cannot open {}: {e}", args.input.display())))?;
    let graph = MultiGraph::read_edge_list(BufReader::new(file))?;
    let config = json!({
        "command": "stats",
        "in": args.input.display().to_string(),
        "m": graph.m(),
        "n": graph.vertex_count(),
    });
    echo_config("stats", &config);

    let mut report = analytics::stats_report(&graph);
    report.config = Some(config.clone());
    let mut body = serde_json::to_vec_pretty(&report)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    body.push(b'\n');
    write_or_stdout(args.out.as_ref(), &body)?;

    let comments = vec![format!("config: {config}")];
    if let Some(path) = &args.histogram {
        let mut f = BufWriter::new(File::create(path)?);
        analytics::degree_histogram(&graph).write_csv(&mut f, &comments)?;
        f.flush()?;
    }
    if let Some(path) = &args.dnn {
        let mut f = BufWriter::new(File::create(path)?);
        analytics::dnn_curve(&graph).write_csv(&mut f, &comments)?;
        f.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_theory(args: TheoryArgs) -> Result<ExitCode, CliError> {
    let (table, model_desc) = args.model.resolve()?;
    let constants = table.constants();
    let config = json!({ "command": "theory", "model": model_desc, "n": args.n });
    echo_config("theory", &config);

    let m = table.m();
    let mut c_table: Vec<Value> = Vec::new();
    if constants.a > 0.0 {
        for d in m..m + args.cmax {
            match theory::degree_law(m, constants.a, constants.b, d) {
                Ok(p) => c_table.push(json!([d, p.cmd])),
                Err(_) => break,
            }
        }
    }
    let mut block = serde_json::to_value(constants)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let obj = block.as_object_mut().expect("constants serialize to an object");
    if constants.gamma.is_none() {
        obj.insert("gammaNote".into(), json!("not power-law (A=0)"));
    }
    match theory::clustering_prediction(&constants, m, args.n) {
        Ok(theory::ClusteringPrediction::AtSize(v)) => {
            obj.insert("clusteringAtN".into(), json!(v));
        }
        Ok(theory::ClusteringPrediction::Decay { exponent }) => {
            obj.insert("clusteringDecayExponent".into(), json!(exponent));
        }
        _ => {}
    }
    if let theory::P2Prediction::Supercritical { exponent } =
        theory::p2_prediction(m, constants.a, constants.b)
    {
        obj.insert("p2GrowthExponent".into(), json!(exponent));
    }
    obj.insert("m".into(), json!(m));
    obj.insert("cTable".into(), json!(c_table));
    obj.insert("config".into(), config);

    let mut body =
        serde_json::to_vec_pretty(&block).map_err(|e| CliError::Failure(e.to_string()))?;
    body.push(b'\n');
    io::stdout().write_all(&body)?;
    Ok(ExitCode::SUCCESS)
}

fn run_audit(args: AuditArgs) -> Result<ExitCode, CliError> {
    let (table, model_desc) = args.model.resolve()?;
    let loop_sizes = parse_u64_list(&args.loop_sizes)?;
    let config = json!({
        "command": "audit",
        "n": args.n,
        "trials": args.trials,
        "model": model_desc,
        "seedGraph": args.seed_graph.describe(),
        "masterSeed": args.seed,
        "loopSizes": loop_sizes,
        "zBound": args.z_bound,
    });
    echo_config("audit", &config);

    let cfg = GenerationConfig {
        n: args.n,
        table: table.clone(),
        seed_spec: args.seed_graph.spec(),
        master_seed: args.seed,
        stream_index: 0,
        checkpoints: vec![args.n],
    };
    let (graph, _) = generate(&cfg)?;

    let mut stream = RandomStream::derive(args.seed, 10);
    let vertices = default_audit_vertices(&graph, &mut stream);
    let increment =
        audit_increment_probabilities(&graph, &table, args.trials, &vertices, &mut stream)?;
    let pairs = default_audit_pairs(&graph, &mut stream);
    let pair_report = audit_pair_increments(&graph, &table, args.trials, &pairs, &mut stream)?;
    let loops = audit_loop_probability(
        &table,
        args.seed_graph.spec(),
        &loop_sizes,
        args.trials,
        args.seed,
    )?;

    let max_abs_z = increment
        .max_abs_z()
        .max(pair_report.max_abs_z())
        .max(loops.max_abs_z());
    let decay_ok = loops.decay_slope.is_none_or(|s| (s + 1.0).abs() <= 0.3);
    let passed = max_abs_z <= args.z_bound && decay_ok;

    let report = json!({
        "config": config,
        "increment": increment,
        "pairs": pair_report,
        "loops": loops,
        "maxAbsZ": max_abs_z,
        "zBound": args.z_bound,
        "decaySlopeOk": decay_ok,
        "passed": passed,
    });
    let mut body =
        serde_json::to_vec_pretty(&report).map_err(|e| CliError::Failure(e.to_string()))?;
    body.push(b'\n');
    write_or_stdout(args.out.as_ref(), &body)?;

    if passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("pagen audit: FAILED (max |z| = {max_abs_z:.2}, bound {})", args.z_bound);
        Ok(ExitCode::from(1))
    }
}
