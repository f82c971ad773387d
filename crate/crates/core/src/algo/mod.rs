//! Graph analytics kernels.
//!
//! Algorithms run on a dense snapshot of the graph: node ids sorted
//! ascending and mapped to `0..n`, adjacency flattened into offset/target
//! arrays. The snapshot is private to each call and dropped on return.
//!
//! Undirected algorithms (triangles, k-core, connected components) use the
//! symmetrized view: `u ~ v` iff an edge exists in either direction.

mod components;
mod kcore;
mod pagerank;
mod sssp;
mod triangles;

use rayon::prelude::*;

use crate::graph::{Graph, NodeRecord};

pub use components::{connected_components, scc};
pub use kcore::k_core;
pub use pagerank::{pagerank, pagerank_with, PageRankConfig, DEFAULT_DAMPING, DEFAULT_ITERATIONS};
pub use sssp::sssp;
pub use triangles::triangle_count;

/// Flattened adjacency over dense node indices.
pub(crate) struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    #[inline]
    pub(crate) fn of(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub(crate) fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    fn from_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        for l in &lists {
            offsets.push(offsets.last().unwrap() + l.len());
        }
        let targets = lists.concat();
        Adjacency { offsets, targets }
    }
}

/// Dense snapshot of a graph.
pub(crate) struct Dense<'g> {
    pub ids: Vec<i64>,
    records: Vec<&'g NodeRecord>,
}

impl<'g> Dense<'g> {
    pub(crate) fn new(g: &'g Graph) -> Self {
        let mut pairs: Vec<(i64, &NodeRecord)> = g.nodes().collect();
        pairs.par_sort_unstable_by_key(|&(id, _)| id);
        let (ids, records) = pairs.into_iter().unzip();
        Dense { ids, records }
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub(crate) fn index(&self, id: i64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    fn map_ids(&self, ids: &[i64]) -> Vec<u32> {
        ids.iter()
            .map(|&x| self.index(x).expect("neighbor is a node") as u32)
            .collect()
    }

    pub(crate) fn out_adjacency(&self) -> Adjacency {
        Adjacency::from_lists(
            self.records
                .par_iter()
                .map(|r| self.map_ids(r.out_neighbors()))
                .collect(),
        )
    }

    pub(crate) fn in_adjacency(&self) -> Adjacency {
        Adjacency::from_lists(
            self.records
                .par_iter()
                .map(|r| self.map_ids(r.in_neighbors()))
                .collect(),
        )
    }

    /// Symmetrized adjacency with self-loops removed, ascending per node.
    pub(crate) fn undirected(&self) -> Adjacency {
        let lists = self
            .records
            .par_iter()
            .enumerate()
            .map(|(v, r)| {
                let id = self.ids[v];
                let (a, b) = (r.out_neighbors(), r.in_neighbors());
                let mut merged = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let x = match (a.get(i), b.get(j)) {
                        (Some(&x), Some(&y)) if x == y => {
                            i += 1;
                            j += 1;
                            x
                        }
                        (Some(&x), Some(&y)) if x < y => {
                            i += 1;
                            x
                        }
                        (Some(_), Some(&y)) => {
                            j += 1;
                            y
                        }
                        (Some(&x), None) => {
                            i += 1;
                            x
                        }
                        (None, Some(&y)) => {
                            j += 1;
                            y
                        }
                        (None, None) => unreachable!(),
                    };
                    if x != id {
                        merged.push(x);
                    }
                }
                self.map_ids(&merged)
            })
            .collect();
        Adjacency::from_lists(lists)
    }
}

/// Mapping from node id to a float score, stored sorted by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankVector {
    ids: Vec<i64>,
    scores: Vec<f64>,
}

impl RankVector {
    /// Builds from `(id, score)` pairs; later duplicates of an id win.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut pairs: Vec<(i64, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(id, _)| id);
        let mut out = RankVector::default();
        for (id, score) in pairs {
            if out.ids.last() == Some(&id) {
                *out.scores.last_mut().unwrap() = score;
            } else {
                out.ids.push(id);
                out.scores.push(score);
            }
        }
        out
    }

    pub(crate) fn from_sorted(ids: Vec<i64>, scores: Vec<f64>) -> Self {
        debug_assert_eq!(ids.len(), scores.len());
        RankVector { ids, scores }
    }

    pub fn get(&self, id: i64) -> Option<f64> {
        self.ids.binary_search(&id).ok().map(|i| self.scores[i])
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.ids.iter().copied().zip(self.scores.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// Highest-scoring node; ties go to the smallest id.
    pub fn argmax(&self) -> Option<(i64, f64)> {
        self.iter().fold(None, |best: Option<(i64, f64)>, (id, s)| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((id, s)),
        })
    }
}

/// Hop distances from a source node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    source: i64,
    ids: Vec<i64>,
    dist: Vec<Option<u64>>,
}

impl DistanceMap {
    pub fn source(&self) -> i64 {
        self.source
    }

    /// Distance to `id`, or `None` if `id` is unreachable or unknown.
    pub fn distance(&self, id: i64) -> Option<u64> {
        self.ids.binary_search(&id).ok().and_then(|i| self.dist[i])
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn distances(&self) -> &[Option<u64>] {
        &self.dist
    }

    pub fn reachable(&self) -> usize {
        self.dist.iter().filter(|d| d.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Option<u64>)> + '_ {
        self.ids.iter().copied().zip(self.dist.iter().copied())
    }
}

/// Dense component labels `0..count` per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    ids: Vec<i64>,
    labels: Vec<usize>,
    count: usize,
}

impl Components {
    pub fn label(&self, id: i64) -> Option<usize> {
        self.ids.binary_search(&id).ok().map(|i| self.labels[i])
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.ids.iter().copied().zip(self.labels.iter().copied())
    }

    /// Members of every component, each sorted by id.
    pub fn groups(&self) -> Vec<Vec<i64>> {
        let mut groups = vec![Vec::new(); self.count];
        for (id, label) in self.iter() {
            groups[label].push(id);
        }
        groups
    }
}
