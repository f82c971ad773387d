//! Fixed-iteration PageRank by power iteration.
//!
//! Scores start uniform at `1/n`. Each iteration computes, for every node
//! `v`,
//!
//! ```text
//! new(v) = (1 - d) / n + d * ( sum_{u -> v} old(u) / outdeg(u) + dangling / n )
//! ```
//!
//! where `dangling` is the total score held by nodes without out-edges. The
//! dangling mass is spread uniformly, so the scores keep summing to one.
//!
//! Nodes are updated in parallel, but each node's in-neighbor sum runs
//! sequentially in ascending neighbor id, so results do not depend on the
//! worker count.

use rayon::prelude::*;

use super::{Dense, RankVector};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    pub iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: DEFAULT_DAMPING,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

pub fn pagerank(g: &Graph, damping: f64, iterations: usize) -> Result<RankVector> {
    pagerank_with(g, PageRankConfig { damping, iterations }, |_, _| {})
}

/// Runs PageRank, calling `observe(iteration, scores)` after every iteration
/// with the scores indexed by ascending node id.
pub fn pagerank_with(g: &Graph, config: PageRankConfig, mut observe: impl FnMut(usize, &[f64])) -> Result<RankVector> {
    let PageRankConfig { damping, iterations } = config;
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let dense = Dense::new(g);
    let n = dense.len();
    let incoming = dense.in_adjacency();
    let out_degree: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|v| g.node(dense.ids[v]).expect("snapshot node").out_degree() as f64)
        .collect();
    let dangling_nodes: Vec<usize> = (0..n).filter(|&v| out_degree[v] == 0.0).collect();

    let nf = n as f64;
    let teleport = (1.0 - damping) / nf;
    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut share = vec![0.0; n];

    for iteration in 0..iterations {
        let dangling: f64 = dangling_nodes.iter().map(|&v| scores[v]).sum();
        let dangling_share = dangling / nf;
        share
            .par_iter_mut()
            .zip(scores.par_iter().zip(&out_degree))
            .for_each(|(s, (&score, &deg))| *s = if deg > 0.0 { score / deg } else { 0.0 });
        next.par_iter_mut().enumerate().for_each(|(v, x)| {
            let inflow: f64 = incoming.of(v).iter().map(|&u| share[u as usize]).sum();
            *x = teleport + damping * (inflow + dangling_share);
        });
        std::mem::swap(&mut scores, &mut next);
        observe(iteration, &scores);
    }
    Ok(RankVector::from_sorted(dense.ids, scores))
}
