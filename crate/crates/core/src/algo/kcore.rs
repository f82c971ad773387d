use super::Dense;
use crate::containers::IdHashMap;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeRecord};

/// The k-core: the maximal subgraph whose nodes all have at least `k`
/// distinct neighbors (symmetrized, self-loops excluded).
///
/// Nodes are peeled until no under-degree node remains. The result keeps
/// every original edge between surviving nodes, self-loops included.
pub fn k_core(g: &Graph, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let dense = Dense::new(g);
    let n = dense.len();
    let adj = dense.undirected();
    let mut degree: Vec<usize> = (0..n).map(|v| adj.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| degree[v] < k).collect();
    for &v in &queue {
        removed[v] = true;
    }
    while let Some(u) = queue.pop() {
        for &v in adj.of(u) {
            let v = v as usize;
            if removed[v] {
                continue;
            }
            degree[v] -= 1;
            if degree[v] < k {
                removed[v] = true;
                queue.push(v);
            }
        }
    }

    let keep = |id: &i64| dense.index(*id).is_some_and(|i| !removed[i]);
    let mut nodes: IdHashMap<i64, NodeRecord> = IdHashMap::default();
    let mut edges = 0;
    for (v, &id) in dense.ids.iter().enumerate() {
        if removed[v] {
            continue;
        }
        let record = g.node(id).expect("snapshot node");
        let out_nbrs: Vec<i64> = record.out_neighbors().iter().copied().filter(keep).collect();
        let in_nbrs: Vec<i64> = record.in_neighbors().iter().copied().filter(keep).collect();
        edges += out_nbrs.len();
        nodes.insert(id, NodeRecord { in_nbrs, out_nbrs });
    }
    Ok(Graph::from_records(nodes, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_survives() {
        let mut g = Graph::new();
        for u in 0..4 {
            for v in u + 1..4 {
                g.add_edge(u, v);
            }
        }
        let core = k_core(&g, 3).unwrap();
        assert_eq!(core, g);
        assert!(k_core(&g, 4).unwrap().is_empty());
    }

    #[test]
    fn trees_have_no_two_core() {
        let mut g = Graph::new();
        for (s, d) in [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)] {
            g.add_edge(s, d);
        }
        assert!(k_core(&g, 2).unwrap().is_empty());
        assert_eq!(k_core(&g, 1).unwrap(), g);
    }

    #[test]
    fn self_loops_do_not_count_but_survive() {
        let mut g = Graph::new();
        for (s, d) in [(0, 1), (1, 2), (2, 0), (0, 0), (3, 3), (3, 0)] {
            g.add_edge(s, d);
        }
        let core = k_core(&g, 2).unwrap();
        assert_eq!(core.node_ids(), [0, 1, 2]);
        assert!(core.has_edge(0, 0));
        assert_eq!(core.edge_count(), 4);
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(k_core(&Graph::new(), 0).is_err());
    }
}
