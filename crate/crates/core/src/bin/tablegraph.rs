use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tablegraph_core::bench::{run_bench, BenchOp, DEFAULT_REPS};
use tablegraph_core::parallel::{default_workers, with_workers};
use tablegraph_core::pipeline::run_script;
use tablegraph_core::synth;
use tablegraph_core::table::save_tsv;
use tablegraph_core::{EdgeSpec, Schema};

#[derive(Parser)]
#[command(
    name = "tablegraph",
    version,
    about = "Columnar tables and graphs: pipelines, benchmarks, synthetic data"
)]
struct Cli {
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a pipeline script.
    Run { script: PathBuf },
    /// Time one operation on a TSV dataset and print a TSV report line.
    Bench {
        dataset: PathBuf,
        /// pagerank, triangles, sssp, scc, kcore, select, join, to-graph or to-table.
        #[arg(long)]
        op: BenchOp,
        /// Column schema of the dataset, e.g. `src:int,dst:int`.
        #[arg(long, default_value = "src:int,dst:int")]
        schema: String,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value = "src")]
        src: String,
        #[arg(long, default_value = "dst")]
        dst: String,
    },
    /// Write a deterministic synthetic dataset as TSV.
    Generate {
        #[command(subcommand)]
        kind: Dataset,
    },
}

#[derive(Subcommand)]
enum Dataset {
    /// Uniform random directed edges `src, dst` over nodes `0..nodes`.
    RandomEdges {
        #[arg(long)]
        nodes: u64,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Question/answer forum posts with schema
    /// `PostId:int,Type:str,Tag:str,UserId:int,AnswerId:int`.
    QaForum {
        #[arg(long)]
        questions: usize,
        #[arg(long)]
        answers: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let workers = cli.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        eprintln!("error: --workers must be positive");
        return ExitCode::from(2);
    }
    with_workers(workers, || execute(cli.command, workers))
}

fn execute(command: Command, workers: usize) -> ExitCode {
    match command {
        Command::Run { script } => match run_script(&script) {
            Ok(_) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}: {e}", script.display());
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Bench {
            dataset,
            op,
            schema,
            reps,
            src,
            dst,
        } => {
            let schema = match Schema::parse(&schema) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: --schema: {e}");
                    return ExitCode::from(2);
                }
            };
            if reps == 0 {
                eprintln!("error: --reps must be positive");
                return ExitCode::from(2);
            }
            match run_bench(&dataset, op, &schema, &EdgeSpec::new(src, dst), reps, workers) {
                Ok(report) => {
                    println!("{}", report.to_tsv_line());
                    eprintln!("{} checksum={:016x} {}", report.op, report.checksum, report.detail);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Generate { kind } => {
            let (table, out) = match kind {
                Dataset::RandomEdges {
                    nodes,
                    edges,
                    seed,
                    out,
                } => (synth::random_edges(nodes, edges, seed), out),
                Dataset::QaForum {
                    questions,
                    answers,
                    seed,
                    out,
                } => (synth::qa_forum(questions, answers, seed), out),
            };
            match table.and_then(|t| save_tsv(&t, &out)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
