use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use clearfield::scenario;
use clearfield::Error;

/// Run a scenario file and write fields, heatmaps, and a manifest.
#[derive(Parser)]
#[command(name = "clearfield", version, about)]
struct Args {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,

    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,

    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Override grid spacing on all non-periodic axes.
    #[arg(long)]
    spacing: Option<f64>,

    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(workers) = args.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: failed to configure {workers} workers: {e}");
            return ExitCode::from(1);
        }
    }

    let spec = match scenario::load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match scenario::run(&spec, &args.out, args.spacing, args.seed) {
        Ok(manifest) => {
            for c in &manifest.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {}", c.kind, c.description);
            }
            println!(
                "{}: {} nodes, {} edges, {} files -> {}",
                manifest.scenario,
                manifest.node_count,
                manifest.edge_count,
                manifest.files.len(),
                args.out.display()
            );
            if manifest.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Parse(msg)) => {
            eprintln!("error: scenario parse error: {msg}");
            ExitCode::from(2)
        }
        Err(Error::Resource(msg)) => {
            eprintln!("error: resource cap exceeded: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
