//! Benchmark runner.
//!
//! Each benchmark loads its dataset once (untimed), prepares any derived
//! input (the graph for graph kernels, the probe table for joins), runs the
//! operation once as a warm-up, then times `reps` further runs and reports
//! the mean. Only the operation itself is timed, never loading.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algo;
use crate::containers::mix64;
use crate::convert::{graph_to_edge_table, table_to_graph, EdgeSpec};
use crate::error::{Error, Result};
use crate::parallel::with_workers;
use crate::table::{load_tsv, CmpOp, ColumnTable, ColumnType, Predicate, Schema};

pub const DEFAULT_REPS: usize = 5;
/// Sources sampled per sssp run.
pub const SSSP_SOURCES: usize = 10;
/// Rows kept by the select benchmark and matched by the join benchmark.
pub const TARGET_ROWS: usize = 10_000;
pub const KCORE_K: usize = 3;
const SSSP_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    PageRank,
    Triangles,
    Sssp,
    Scc,
    KCore,
    Select,
    Join,
    ToGraph,
    ToTable,
}

impl BenchOp {
    pub const ALL: [BenchOp; 9] = [
        BenchOp::PageRank,
        BenchOp::Triangles,
        BenchOp::Sssp,
        BenchOp::Scc,
        BenchOp::KCore,
        BenchOp::Select,
        BenchOp::Join,
        BenchOp::ToGraph,
        BenchOp::ToTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::PageRank => "pagerank",
            BenchOp::Triangles => "triangles",
            BenchOp::Sssp => "sssp",
            BenchOp::Scc => "scc",
            BenchOp::KCore => "kcore",
            BenchOp::Select => "select",
            BenchOp::Join => "join",
            BenchOp::ToGraph => "to-graph",
            BenchOp::ToTable => "to-table",
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown benchmark operation '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub op: BenchOp,
    pub dataset: String,
    pub workers: usize,
    pub reps: usize,
    pub mean_seconds: f64,
    /// Rows or edges processed per second of mean wall time.
    pub units_per_second: f64,
    pub units: u64,
    pub peak_bytes: Option<u64>,
    /// Digest of the operation's result; identical across repeated runs of
    /// a deterministic operation.
    pub checksum: u64,
    /// Short human-readable summary of the result.
    pub detail: String,
}

impl BenchReport {
    /// Single-line TSV record:
    /// `op, dataset, workers, reps, mean_seconds, units_per_second, peak_bytes`.
    pub fn to_tsv_line(&self) -> String {
        let peak = self.peak_bytes.map_or_else(|| "-1".to_string(), |b| b.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{:.1}\t{}",
            self.op, self.dataset, self.workers, self.reps, self.mean_seconds, self.units_per_second, peak
        )
    }
}

/// Peak resident set size of this process, where the platform exposes it.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Outcome of one run: processed units, checksum, summary.
struct Outcome {
    units: u64,
    checksum: u64,
    detail: String,
}

fn combine(acc: u64, x: u64) -> u64 {
    mix64((acc ^ x) as i64)
}

/// Loads `dataset` with `schema` and benchmarks `op` on it.
///
/// Graph operations and `to-graph` read the edge columns `spec`; `select`
/// and `join` use the first integer column of the table.
pub fn run_bench(
    dataset: &Path,
    op: BenchOp,
    schema: &Schema,
    spec: &EdgeSpec,
    reps: usize,
    workers: usize,
) -> Result<BenchReport> {
    let table = load_tsv(dataset, schema)?;
    let name = dataset
        .file_name()
        .map_or_else(|| dataset.display().to_string(), |n| n.to_string_lossy().into_owned());
    bench_table(&table, &name, op, spec, reps, workers)
}

/// Benchmarks `op` on an already loaded table.
pub fn bench_table(
    table: &ColumnTable,
    dataset: &str,
    op: BenchOp,
    spec: &EdgeSpec,
    reps: usize,
    workers: usize,
) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be positive".into()));
    }
    with_workers(workers, || {
        let mut run = prepare(table, op, spec)?;
        let warm = run()?;
        let mut total = 0.0;
        for _ in 0..reps {
            let start = Instant::now();
            let outcome = run()?;
            total += start.elapsed().as_secs_f64();
            debug_assert_eq!(outcome.checksum, warm.checksum);
        }
        // Guard against a zero reading from a coarse clock.
        let mean_seconds = (total / reps as f64).max(1e-9);
        Ok(BenchReport {
            op,
            dataset: dataset.to_string(),
            workers,
            reps,
            mean_seconds,
            units_per_second: warm.units as f64 / mean_seconds,
            units: warm.units,
            peak_bytes: peak_rss_bytes(),
            checksum: warm.checksum,
            detail: warm.detail,
        })
    })
}

type Runner<'a> = Box<dyn FnMut() -> Result<Outcome> + 'a>;

fn prepare<'a>(table: &'a ColumnTable, op: BenchOp, spec: &EdgeSpec) -> Result<Runner<'a>> {
    let graph_op = !matches!(op, BenchOp::Select | BenchOp::Join | BenchOp::ToGraph);
    let graph = if graph_op {
        Some(table_to_graph(table, spec)?)
    } else {
        None
    };
    if let Some(g) = &graph {
        if g.is_empty() && op != BenchOp::ToTable {
            return Err(Error::EmptyGraph);
        }
    }
    let edges = graph.as_ref().map_or(0, |g| g.edge_count() as u64);
    Ok(match op {
        BenchOp::PageRank => {
            let g = graph.unwrap();
            Box::new(move || {
                let ranks = algo::pagerank(&g, algo::DEFAULT_DAMPING, algo::DEFAULT_ITERATIONS)?;
                let checksum = ranks.scores().iter().fold(0, |acc, s| combine(acc, s.to_bits()));
                let detail = if ranks.len() <= 10 {
                    format!("scores={:?}", ranks.scores())
                } else {
                    let (id, score) = ranks.argmax().expect("non-empty");
                    format!("top={id}:{score:.6e}")
                };
                Ok(Outcome {
                    units: edges * algo::DEFAULT_ITERATIONS as u64,
                    checksum,
                    detail,
                })
            })
        }
        BenchOp::Triangles => {
            let g = graph.unwrap();
            Box::new(move || {
                let count = algo::triangle_count(&g);
                Ok(Outcome {
                    units: edges,
                    checksum: count,
                    detail: format!("triangles={count}"),
                })
            })
        }
        BenchOp::Sssp => {
            let g = graph.unwrap();
            let ids = g.node_ids();
            let mut rng = ChaCha8Rng::seed_from_u64(SSSP_SEED);
            let sources: Vec<i64> = (0..SSSP_SOURCES).map(|_| ids[rng.gen_range(0..ids.len())]).collect();
            Box::new(move || {
                let mut checksum = 0;
                let mut reached = 0;
                for &s in &sources {
                    let d = algo::sssp(&g, s)?;
                    reached += d.reachable();
                    let total: u64 = d.distances().iter().flatten().sum();
                    checksum = combine(checksum, total);
                }
                // The timed figure is per source.
                Ok(Outcome {
                    units: edges * SSSP_SOURCES as u64,
                    checksum,
                    detail: format!("sources={} mean_reached={}", SSSP_SOURCES, reached / SSSP_SOURCES),
                })
            })
        }
        BenchOp::Scc => {
            let g = graph.unwrap();
            Box::new(move || {
                let c = algo::scc(&g);
                let largest = c.groups().iter().map(Vec::len).max().unwrap_or(0);
                Ok(Outcome {
                    units: edges,
                    checksum: combine(c.count() as u64, largest as u64),
                    detail: format!("components={} largest={largest}", c.count()),
                })
            })
        }
        BenchOp::KCore => {
            let g = graph.unwrap();
            Box::new(move || {
                let core = algo::k_core(&g, KCORE_K)?;
                Ok(Outcome {
                    units: edges,
                    checksum: combine(core.node_count() as u64, core.edge_count() as u64),
                    detail: format!("k={KCORE_K} nodes={} edges={}", core.node_count(), core.edge_count()),
                })
            })
        }
        BenchOp::ToTable => {
            let g = graph.unwrap();
            Box::new(move || {
                let t = graph_to_edge_table(&g);
                Ok(Outcome {
                    units: edges,
                    checksum: t.num_rows() as u64,
                    detail: format!("rows={}", t.num_rows()),
                })
            })
        }
        BenchOp::ToGraph => {
            let spec = spec.clone();
            let rows = table.num_rows() as u64;
            Box::new(move || {
                let g = table_to_graph(table, &spec)?;
                Ok(Outcome {
                    units: rows,
                    checksum: combine(g.node_count() as u64, g.edge_count() as u64),
                    detail: format!("nodes={} edges={}", g.node_count(), g.edge_count()),
                })
            })
        }
        BenchOp::Select => {
            let (col, values) = first_int_column(table)?;
            let mut sorted = values.to_vec();
            sorted.sort_unstable();
            let threshold = sorted.get(TARGET_ROWS.min(sorted.len())).copied().unwrap_or(i64::MAX);
            let pred = Predicate::new(col, CmpOp::Lt, threshold);
            let rows = table.num_rows() as u64;
            Box::new(move || {
                // Selection runs in place, so each run filters a fresh copy.
                let mut copy = table.clone();
                copy.select_in_place(&pred)?;
                Ok(Outcome {
                    units: rows,
                    checksum: copy.num_rows() as u64,
                    detail: format!("kept={}", copy.num_rows()),
                })
            })
        }
        BenchOp::Join => {
            let (col, values) = first_int_column(table)?;
            let mut probe = values.to_vec();
            probe.sort_unstable();
            probe.dedup();
            probe.truncate(TARGET_ROWS);
            let probe = ColumnTable::from_int_columns([("key", probe)])?;
            let units = (table.num_rows() + probe.num_rows()) as u64;
            Box::new(move || {
                let out = table.join(&probe, &col, "key")?;
                Ok(Outcome {
                    units,
                    checksum: out.num_rows() as u64,
                    detail: format!("rows={}", out.num_rows()),
                })
            })
        }
    })
}

fn first_int_column(table: &ColumnTable) -> Result<(String, &[i64])> {
    let schema = table.schema();
    let index = (0..schema.len())
        .find(|&i| schema.column_type(i) == ColumnType::Int)
        .ok_or_else(|| Error::Schema("benchmark needs an integer column".into()))?;
    let name = schema.name(index).to_string();
    let values = table.int_column(&name)?;
    Ok((name, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> ColumnTable {
        ColumnTable::from_int_columns([("src", vec![0, 1]), ("dst", vec![1, 0])]).unwrap()
    }

    #[test]
    fn pagerank_on_two_cycle_echoes_scores() {
        let r = bench_table(&two_cycle(), "cycle", BenchOp::PageRank, &EdgeSpec::default(), 2, 1).unwrap();
        assert_eq!(r.reps, 2);
        assert!(r.mean_seconds > 0.0);
        assert_eq!(r.units, 20);
        assert!(r.detail.starts_with("scores=[0.5"), "{}", r.detail);
    }

    #[test]
    fn every_op_runs_and_is_repeatable() {
        let t = crate::synth::random_edges(200, 2000, 1).unwrap();
        for op in BenchOp::ALL {
            let a = bench_table(&t, "rand", op, &EdgeSpec::default(), 1, 2).unwrap();
            let b = bench_table(&t, "rand", op, &EdgeSpec::default(), 1, 1).unwrap();
            assert_eq!(a.checksum, b.checksum, "{op}");
            assert_eq!(a.to_tsv_line().split('\t').count(), 7);
            assert!((a.units_per_second * a.mean_seconds - a.units as f64).abs() < 1e-6 * a.units as f64 + 1e-9);
        }
    }

    #[test]
    fn select_and_join_sizes() {
        let t = ColumnTable::from_int_columns([("x", (0..25_000).rev().collect::<Vec<i64>>())]).unwrap();
        let spec = EdgeSpec::default();
        let s = bench_table(&t, "x", BenchOp::Select, &spec, 1, 1).unwrap();
        assert_eq!(s.checksum, TARGET_ROWS as u64);
        let j = bench_table(&t, "x", BenchOp::Join, &spec, 1, 1).unwrap();
        assert_eq!(j.checksum, TARGET_ROWS as u64);
        assert_eq!(j.units, 35_000);
    }

    #[test]
    fn op_names_round_trip() {
        for op in BenchOp::ALL {
            assert_eq!(op.name().parse::<BenchOp>().unwrap(), op);
        }
        assert!("bogus".parse::<BenchOp>().is_err());
    }

    #[test]
    fn argument_checks() {
        let spec = EdgeSpec::default();
        assert!(bench_table(&two_cycle(), "c", BenchOp::Scc, &spec, 0, 1).is_err());
        assert!(bench_table(&two_cycle(), "c", BenchOp::Scc, &spec, 1, 0).is_err());
        let missing = Path::new("/nonexistent/edges.tsv");
        let schema = Schema::parse("src:int,dst:int").unwrap();
        assert!(matches!(
            run_bench(missing, BenchOp::Scc, &schema, &spec, 1, 1),
            Err(Error::Io { .. })
        ));
    }
}
