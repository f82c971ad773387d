//! Parallel conversion between edge tables and graphs.
//!
//! Table to graph uses the sort-first build: copy the endpoint columns, sort
//! the copies in parallel, count each node's distinct neighbors from the
//! sorted runs, size the node table and every adjacency vector exactly, fill
//! the vectors with claim-by-increment appends, then sort each vector.
//! Graph to table pre-allocates the output and hands every worker a
//! disjoint slice of it.

use rayon::prelude::*;

use crate::algo::RankVector;
use crate::containers::{ClaimVector, IdHashMap, SlotMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeRecord};
use crate::parallel::{partitions, split_ranges};
use crate::table::{Column, ColumnTable, ColumnType, Schema, StringPool};

/// Names of the source and destination columns of an edge table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpec {
    pub src: String,
    pub dst: String,
}

impl EdgeSpec {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Self {
        EdgeSpec {
            src: src.into(),
            dst: dst.into(),
        }
    }
}

impl Default for EdgeSpec {
    fn default() -> Self {
        EdgeSpec::new("src", "dst")
    }
}

/// Builds the graph whose nodes are the distinct values of both columns and
/// whose edges are the distinct `(src, dst)` row pairs.
pub fn table_to_graph(table: &ColumnTable, spec: &EdgeSpec) -> Result<Graph> {
    let src = table.int_column(&spec.src)?;
    let dst = table.int_column(&spec.dst)?;
    Ok(edges_to_graph(src, dst))
}

/// Sort-first build from parallel endpoint slices of equal length.
pub fn edges_to_graph(src: &[i64], dst: &[i64]) -> Graph {
    build_sort_first(src, dst).0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BuildStats {
    pub nodes: usize,
    pub edges: usize,
    /// Adjacency vectors whose claimed length differs from the pre-computed
    /// degree. Always zero for a correct build.
    pub missized_vectors: usize,
}

/// Distinct keys of a sorted, deduplicated pair list with their run lengths.
fn runs(pairs: &[(i64, i64)]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &(k, _) in pairs {
        match out.last_mut() {
            Some((last, n)) if *last == k => *n += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

pub(crate) fn build_sort_first(src: &[i64], dst: &[i64]) -> (Graph, BuildStats) {
    assert_eq!(src.len(), dst.len(), "endpoint columns differ in length");

    // copy and sort both orientations
    let mut out_pairs: Vec<(i64, i64)> = src.par_iter().zip(dst).map(|(&s, &d)| (s, d)).collect();
    let mut in_pairs: Vec<(i64, i64)> = src.par_iter().zip(dst).map(|(&s, &d)| (d, s)).collect();
    rayon::join(|| out_pairs.par_sort_unstable(), || in_pairs.par_sort_unstable());
    rayon::join(|| out_pairs.dedup(), || in_pairs.dedup());

    // distinct-neighbor degrees from sorted runs, merged into one node list
    let (out_runs, in_runs) = rayon::join(|| runs(&out_pairs), || runs(&in_pairs));
    let mut nodes: Vec<(i64, usize, usize)> = Vec::with_capacity(out_runs.len().max(in_runs.len()));
    let (mut i, mut j) = (0, 0);
    while i < out_runs.len() || j < in_runs.len() {
        let next_out = out_runs.get(i).map(|r| r.0);
        let next_in = in_runs.get(j).map(|r| r.0);
        let id = match (next_out, next_in) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let out_deg = if next_out == Some(id) {
            i += 1;
            out_runs[i - 1].1
        } else {
            0
        };
        let in_deg = if next_in == Some(id) {
            j += 1;
            in_runs[j - 1].1
        } else {
            0
        };
        nodes.push((id, out_deg, in_deg));
    }

    // exact sizing: node slots and per-node adjacency vectors
    let map = SlotMap::for_keys(nodes.len());
    let slots: Vec<usize> = nodes
        .par_iter()
        .map(|&(id, _, _)| map.insert(id).expect("slot map sized from node count"))
        .collect();
    let mut position = vec![u32::MAX; map.capacity()];
    for (pos, &slot) in slots.iter().enumerate() {
        position[slot] = pos as u32;
    }
    let locate = |id: i64| position[map.get(id).expect("every endpoint was inserted")] as usize;
    let out_vecs: Vec<ClaimVector> = nodes
        .par_iter()
        .map(|&(_, d, _)| ClaimVector::with_capacity(d))
        .collect();
    let in_vecs: Vec<ClaimVector> = nodes
        .par_iter()
        .map(|&(_, _, d)| ClaimVector::with_capacity(d))
        .collect();

    // contention-free fill: each claimed cell is written by exactly one
    // worker. Both pair lists are sorted by their first element, so node
    // lookups are only needed at run boundaries.
    let fill = |pairs: &[(i64, i64)], vecs: &[ClaimVector]| {
        let chunk = pairs.len().div_ceil(partitions()).max(1);
        pairs.par_chunks(chunk).for_each(|pairs| {
            let mut cached = None;
            for &(owner, nbr) in pairs {
                let pos = match cached {
                    Some((id, pos)) if id == owner => pos,
                    _ => {
                        let pos = locate(owner);
                        cached = Some((owner, pos));
                        pos
                    }
                };
                vecs[pos].claim_append(nbr).expect("degree pre-computed");
            }
        });
    };
    fill(&out_pairs, &out_vecs);
    fill(&in_pairs, &in_vecs);
    let edges = out_pairs.len();
    drop(out_pairs);
    drop(in_pairs);

    let missized_vectors = out_vecs
        .par_iter()
        .chain(in_vecs.par_iter())
        .filter(|v| !v.is_full())
        .count();

    // per-node sort, then hand the records to the graph's node table
    let records: Vec<(i64, NodeRecord)> = nodes
        .par_iter()
        .zip(out_vecs.into_par_iter().zip(in_vecs.into_par_iter()))
        .map(|(&(id, _, _), (out_v, in_v))| {
            let mut out_nbrs = out_v.into_vec();
            let mut in_nbrs = in_v.into_vec();
            out_nbrs.sort_unstable();
            in_nbrs.sort_unstable();
            (id, NodeRecord { in_nbrs, out_nbrs })
        })
        .collect();
    let mut table: IdHashMap<i64, NodeRecord> = IdHashMap::default();
    table.reserve(records.len());
    table.extend(records);

    let stats = BuildStats {
        nodes: nodes.len(),
        edges,
        missized_vectors,
    };
    (Graph::from_records(table, edges), stats)
}

/// Node ids ascending together with their records.
fn sorted_records(g: &Graph) -> Vec<(i64, &NodeRecord)> {
    let mut records: Vec<(i64, &NodeRecord)> = g.nodes().collect();
    records.par_sort_unstable_by_key(|&(id, _)| id);
    records
}

/// Two-column `(src, dst)` edge table sorted by `(src, dst)`.
pub fn graph_to_edge_table(g: &Graph) -> ColumnTable {
    let records = sorted_records(g);
    let mut offsets = Vec::with_capacity(records.len() + 1);
    offsets.push(0usize);
    for (_, r) in &records {
        offsets.push(offsets.last().unwrap() + r.out_degree());
    }
    let total = *offsets.last().unwrap();
    let mut src = vec![0i64; total];
    let mut dst = vec![0i64; total];

    // one disjoint output slice per node partition
    let mut work = Vec::new();
    let (mut src_rest, mut dst_rest) = (src.as_mut_slice(), dst.as_mut_slice());
    for range in split_ranges(records.len(), partitions()) {
        let len = offsets[range.end] - offsets[range.start];
        let (s, sr) = std::mem::take(&mut src_rest).split_at_mut(len);
        let (d, dr) = std::mem::take(&mut dst_rest).split_at_mut(len);
        src_rest = sr;
        dst_rest = dr;
        work.push((&records[range], s, d));
    }
    work.into_par_iter().for_each(|(part, s, d)| {
        let mut at = 0;
        for &(id, r) in part {
            let n = r.out_degree();
            s[at..at + n].fill(id);
            d[at..at + n].copy_from_slice(r.out_neighbors());
            at += n;
        }
    });
    ColumnTable::from_int_columns([("src", src), ("dst", dst)]).expect("fixed edge schema")
}

/// One row per node, ascending by id: `(node, out_deg, in_deg[, value])`.
///
/// When `values` is given its key set must equal the node set.
pub fn graph_to_node_table(g: &Graph, values: Option<&RankVector>, value_name: &str) -> Result<ColumnTable> {
    let records = sorted_records(g);
    let ids: Vec<i64> = records.iter().map(|&(id, _)| id).collect();
    let mut schema = vec![
        ("node".to_string(), ColumnType::Int),
        ("out_deg".to_string(), ColumnType::Int),
        ("in_deg".to_string(), ColumnType::Int),
    ];
    let mut columns = vec![
        Column::Int(ids.clone()),
        Column::Int(records.par_iter().map(|(_, r)| r.out_degree() as i64).collect()),
        Column::Int(records.par_iter().map(|(_, r)| r.in_degree() as i64).collect()),
    ];
    if let Some(values) = values {
        if values.ids() != ids.as_slice() {
            let example = values
                .ids()
                .iter()
                .zip(&ids)
                .find(|(a, b)| a != b)
                .map(|(a, _)| *a)
                .or_else(|| values.ids().get(ids.len()).copied())
                .or_else(|| ids.get(values.len()).copied())
                .unwrap_or_default();
            return Err(Error::Coverage {
                values: values.len(),
                nodes: ids.len(),
                example,
            });
        }
        schema.push((value_name.to_string(), ColumnType::Float));
        columns.push(Column::Float(values.scores().to_vec()));
    }
    ColumnTable::from_columns(Schema::new(schema)?, columns, StringPool::default())
}
