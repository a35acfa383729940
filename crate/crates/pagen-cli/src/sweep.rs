//! Replica sweep over a geometric size grid.
//!
//! Each replica is one growth run to the largest size, checkpointed at
//! every grid size; replicas run on a worker pool with independent derived
//! streams (stream index `1000 + replica`). Output rows are keyed by
//! `(n, replica)` so results do not depend on scheduling.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use pagen::generator::{default_checkpoints, generate, GenerationConfig};

use crate::{echo_config, CliError, ModelArgs, SeedGraphArgs};

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Largest graph size; the grid is round(10^(1 + 0.06 i)) capped here.
    #[arg(long, default_value_t = 1_000_000)]
    max_n: u64,
    /// Independent replicas per size.
    #[arg(long, default_value_t = 40)]
    replicas: u32,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    seed_graph: SeedGraphArgs,
    /// Per-replica rows CSV output path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Per-size means CSV output path (default: stdout).
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

struct ReplicaRow {
    n: u64,
    replica: u32,
    clustering: f64,
    p2: u64,
    triangles: u64,
}

pub fn run(args: SweepArgs) -> Result<ExitCode, CliError> {
    if args.replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    let (table, model_desc) = args.model.resolve()?;
    let seed_spec = args.seed_graph.spec();
    let sizes = default_checkpoints(seed_spec.n0 as u64, args.max_n);
    let config = json!({
        "command": "sweep",
        "maxN": args.max_n,
        "replicas": args.replicas,
        "sizes": sizes.len(),
        "model": model_desc,
        "seedGraph": args.seed_graph.describe(),
        "masterSeed": args.seed,
    });
    echo_config("sweep", &config);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let traces: Vec<_> = pool.install(|| {
        (0..args.replicas)
            .into_par_iter()
            .map(|replica| {
                let cfg = GenerationConfig {
                    n: args.max_n,
                    table: table.clone(),
                    seed_spec,
                    master_seed: args.seed,
                    stream_index: 1_000 + replica as u64,
                    checkpoints: sizes.clone(),
                };
                generate(&cfg).map(|(_, trace)| trace)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut rows: Vec<ReplicaRow> = Vec::with_capacity(sizes.len() * args.replicas as usize);
    for (size_idx, &n) in sizes.iter().enumerate() {
        for (replica, trace) in traces.iter().enumerate() {
            let row = &trace.rows[size_idx];
            debug_assert_eq!(row.n, n);
            rows.push(ReplicaRow {
                n,
                replica: replica as u32,
                clustering: row.clustering.unwrap_or(f64::NAN),
                p2: row.p2,
                triangles: row.triangles,
            });
        }
    }

    let mut out = BufWriter::new(File::create(&args.out)?);
    writeln!(out, "# config: {config}")?;
    writeln!(out, "n,replica,clustering,p2,triangles")?;
    for r in &rows {
        writeln!(out, "{},{},{},{},{}", r.n, r.replica, r.clustering, r.p2, r.triangles)?;
    }
    out.flush()?;

    let mut summary = String::new();
    summary.push_str(&format!("# config: {config}\n"));
    summary.push_str("n,replicas,mean_clustering,mean_p2,mean_triangles\n");
    for &n in &sizes {
        let group: Vec<&ReplicaRow> = rows.iter().filter(|r| r.n == n).collect();
        let count = group.len() as f64;
        let mc = group.iter().map(|r| r.clustering).sum::<f64>() / count;
        let mp = group.iter().map(|r| r.p2 as f64).sum::<f64>() / count;
        let mt = group.iter().map(|r| r.triangles as f64).sum::<f64>() / count;
        summary.push_str(&format!("{n},{},{mc},{mp},{mt}\n", group.len()));
    }
    crate::write_or_stdout(args.summary.as_ref(), summary.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

/// Worker pool size: `PAGEN_THREADS` when set, else the machine default.
fn worker_count() -> usize {
    std::env::var("PAGEN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}
