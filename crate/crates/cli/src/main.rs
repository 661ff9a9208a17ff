use clap::{Args, Parser, Subcommand};
use gramdim::io::{
    cmd_classify, cmd_complete, cmd_realize_edm, exit, exit_code, load_edm, load_graph, load_instance, RunConfig,
};
use gramdim::Result;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Gram dimension tools: classify graphs, complete partial psd matrices at
/// a target rank, realize partial distance data.
#[derive(Parser, Debug)]
#[command(name = "gramdim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Compact JSON on stdout, no summary line.
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON on stdout (default).
    #[arg(long, global = true)]
    pretty: bool,
    /// Also write the JSON report to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    rank_tol: f64,
    #[arg(long, global = true, default_value_t = 100)]
    restarts: usize,
    #[arg(long, global = true, default_value_t = 50)]
    step_budget: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram dimension band, minor witness, tree-width band, Barvinok bound.
    Classify {
        /// JSON file or built-in name (K5, K222, V8, C5xC2, petersen, K<n>, C<n>, path<n>).
        #[arg(long)]
        graph: String,
    },
    /// Psd completion of rank at most --target-k.
    Complete {
        /// JSON file, or a built-in graph name for a random instance (K222
        /// gives the canonical one).
        #[arg(long)]
        instance: String,
        #[arg(long)]
        target_k: usize,
    },
    /// Points in R^dim with the given squared distances.
    RealizeEdm {
        /// EDM JSON file.
        #[arg(long)]
        instance: String,
        #[arg(long)]
        dim: usize,
    },
}

fn emit<T: Serialize>(report: &T, c: &Common) -> Result<()> {
    let text = if c.json {
        serde_json::to_string(report)
    } else {
        serde_json::to_string_pretty(report)
    }
    .map_err(|e| gramdim::Error::Numerical(e.to_string()))?;
    // a closed pipe downstream is not an error here
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(p) = &c.output {
        std::fs::write(p, format!("{text}\n")).map_err(|e| gramdim::Error::Parse(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn note(c: &Common, line: String) {
    if !c.json {
        eprintln!("{line}");
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    let cfg = RunConfig {
        seed: c.seed,
        tol: c.tol,
        rank_tol: c.rank_tol,
        restarts: c.restarts,
        step_budget: c.step_budget,
        output_path: c.output.clone(),
    };
    cfg.validate()?;
    match &cli.command {
        Command::Classify { graph } => {
            let g = load_graph(graph)?;
            let r = cmd_classify(&g);
            note(c, format!("gd {}  treewidth {}  barvinok {}", r.gd_band, r.treewidth, r.barvinok_bound));
            emit(&r, c)?;
            Ok(exit::OK)
        }
        Command::Complete { instance, target_k } => {
            let a = load_instance(instance, cfg.seed)?;
            let (r, code) = cmd_complete(&a, *target_k, &cfg)?;
            let summary = match &r.result {
                Some(res) => format!("found rank {} residual {:.2e}, {} trail steps", res.rank, res.residual, res.trail.len()),
                None => format!("{}: {}", r.status, r.detail.clone().unwrap_or_default()),
            };
            note(c, summary);
            emit(&r, c)?;
            Ok(code)
        }
        Command::RealizeEdm { instance, dim } => {
            let d = load_edm(instance)?;
            let (r, code) = cmd_realize_edm(&d, *dim, &cfg)?;
            note(c, format!("{} in dimension {}", r.status, r.dim));
            emit(&r, c)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::PARSE as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
