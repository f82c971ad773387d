use std::collections::VecDeque;

use super::{Dense, DistanceMap};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Unweighted single-source shortest paths (BFS along out-edges).
pub fn sssp(g: &Graph, source: i64) -> Result<DistanceMap> {
    let dense = Dense::new(g);
    let start = dense.index(source).ok_or(Error::UnknownNode(source))?;
    let out = dense.out_adjacency();
    let mut dist: Vec<Option<u64>> = vec![None; dense.len()];
    let mut queue = VecDeque::new();
    dist[start] = Some(0);
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        let next = dist[u].unwrap() + 1;
        for &v in out.of(u) {
            let v = v as usize;
            if dist[v].is_none() {
                dist[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    Ok(DistanceMap {
        source,
        ids: dense.ids,
        dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_distances() {
        let mut g = Graph::new();
        for u in 0..3 {
            g.add_edge(u, u + 1);
        }
        g.add_node(10);
        let d = sssp(&g, 0).unwrap();
        assert_eq!(d.distances(), [Some(0), Some(1), Some(2), Some(3), None]);
        assert_eq!(d.distance(10), None);
        let back = sssp(&g, 3).unwrap();
        assert_eq!(back.distance(3), Some(0));
        assert_eq!(back.reachable(), 1);
    }

    #[test]
    fn unknown_source() {
        assert!(matches!(sssp(&Graph::new(), 4), Err(Error::UnknownNode(4))));
    }
}
