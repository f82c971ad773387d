//! Dynamic directed graph stored as a hash table of nodes.
//!
//! Each node keeps two sorted, duplicate-free adjacency vectors: its
//! in-neighbors and its out-neighbors. Edge insertion and deletion cost
//! O(degree); neighborhood access is a slice borrow.

use crate::containers::IdHashMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRecord {
    pub(crate) in_nbrs: Vec<i64>,
    pub(crate) out_nbrs: Vec<i64>,
}

impl NodeRecord {
    pub fn in_neighbors(&self) -> &[i64] {
        &self.in_nbrs
    }

    pub fn out_neighbors(&self) -> &[i64] {
        &self.out_nbrs
    }

    pub fn in_degree(&self) -> usize {
        self.in_nbrs.len()
    }

    pub fn out_degree(&self) -> usize {
        self.out_nbrs.len()
    }
}

fn insert_sorted(v: &mut Vec<i64>, x: i64) -> bool {
    match v.binary_search(&x) {
        Ok(_) => false,
        Err(at) => {
            v.insert(at, x);
            true
        }
    }
}

fn remove_sorted(v: &mut Vec<i64>, x: i64) -> bool {
    match v.binary_search(&x) {
        Ok(at) => {
            v.remove(at);
            true
        }
        Err(_) => false,
    }
}

/// Simple directed graph (self-loops allowed, parallel edges collapse).
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: IdHashMap<i64, NodeRecord>,
    edges: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        let mut map = IdHashMap::default();
        map.reserve(nodes);
        Graph { nodes: map, edges: 0 }
    }

    /// Assembles a graph from finished node records. The caller guarantees
    /// that the records are sorted, deduplicated and mutually consistent.
    /// Callers guarantee the records are sorted and symmetric; tests check
    /// this with [`Graph::validate`].
    pub(crate) fn from_records(nodes: IdHashMap<i64, NodeRecord>, edges: usize) -> Self {
        Graph { nodes, edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, id: i64) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn has_edge(&self, src: i64, dst: i64) -> bool {
        self.nodes
            .get(&src)
            .is_some_and(|n| n.out_nbrs.binary_search(&dst).is_ok())
    }

    pub fn node(&self, id: i64) -> Option<&NodeRecord> {
        self.nodes.get(&id)
    }

    /// Returns `true` if the node was not present.
    pub fn add_node(&mut self, id: i64) -> bool {
        use std::collections::hash_map::Entry;
        match self.nodes.entry(id) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(NodeRecord::default());
                true
            }
        }
    }

    /// Adds `src -> dst`, creating missing endpoints. Returns `false` if the
    /// edge already existed.
    pub fn add_edge(&mut self, src: i64, dst: i64) -> bool {
        let added = insert_sorted(&mut self.nodes.entry(src).or_default().out_nbrs, dst);
        if !added {
            return false;
        }
        insert_sorted(&mut self.nodes.entry(dst).or_default().in_nbrs, src);
        self.edges += 1;
        true
    }

    pub fn del_edge(&mut self, src: i64, dst: i64) -> bool {
        let Some(node) = self.nodes.get_mut(&src) else {
            return false;
        };
        if !remove_sorted(&mut node.out_nbrs, dst) {
            return false;
        }
        let removed = remove_sorted(&mut self.nodes.get_mut(&dst).expect("edge symmetry").in_nbrs, src);
        debug_assert!(removed);
        self.edges -= 1;
        true
    }

    /// Removes `id` and every incident edge.
    pub fn del_node(&mut self, id: i64) -> bool {
        let Some(node) = self.nodes.remove(&id) else {
            return false;
        };
        for &dst in &node.out_nbrs {
            if dst != id {
                remove_sorted(&mut self.nodes.get_mut(&dst).expect("edge symmetry").in_nbrs, id);
            }
        }
        for &src in &node.in_nbrs {
            if src != id {
                remove_sorted(&mut self.nodes.get_mut(&src).expect("edge symmetry").out_nbrs, id);
            }
        }
        // a self-loop sits in both vectors but is a single edge
        let self_loop = usize::from(node.out_nbrs.binary_search(&id).is_ok());
        self.edges -= node.out_nbrs.len() + node.in_nbrs.len() - self_loop;
        true
    }

    /// Sorted neighbor ids of `id`.
    pub fn neighbors(&self, id: i64, direction: Direction) -> Result<&[i64]> {
        let node = self.nodes.get(&id).ok_or(Error::UnknownNode(id))?;
        Ok(match direction {
            Direction::In => &node.in_nbrs,
            Direction::Out => &node.out_nbrs,
        })
    }

    pub fn out_degree(&self, id: i64) -> Result<usize> {
        Ok(self.neighbors(id, Direction::Out)?.len())
    }

    pub fn in_degree(&self, id: i64) -> Result<usize> {
        Ok(self.neighbors(id, Direction::In)?.len())
    }

    /// All node ids, ascending.
    pub fn node_ids(&self) -> Vec<i64> {
        let mut ids: Vec<i64> = self.nodes.keys().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Nodes in unspecified (hash) order.
    pub fn nodes(&self) -> impl Iterator<Item = (i64, &NodeRecord)> {
        self.nodes.iter().map(|(&id, n)| (id, n))
    }

    /// All edges sorted by `(src, dst)`.
    pub fn edges(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.edges);
        for id in self.node_ids() {
            out.extend(self.nodes[&id].out_nbrs.iter().map(|&d| (id, d)));
        }
        out
    }

    /// Approximate heap footprint: adjacency storage plus the node table.
    pub fn memory_bytes(&self) -> usize {
        let adjacency: usize = self
            .nodes
            .values()
            .map(|n| (n.in_nbrs.capacity() + n.out_nbrs.capacity()) * 8)
            .sum();
        let table = self.nodes.capacity() * (std::mem::size_of::<(i64, NodeRecord)>() + 1);
        adjacency + table
    }

    /// Checks sortedness, symmetry and the edge count.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut out_total = 0;
        for (&id, node) in &self.nodes {
            for v in [&node.in_nbrs, &node.out_nbrs] {
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(format!("adjacency of {id} is not strictly ascending"));
                }
            }
            for &dst in &node.out_nbrs {
                let ok = self
                    .nodes
                    .get(&dst)
                    .is_some_and(|d| d.in_nbrs.binary_search(&id).is_ok());
                if !ok {
                    return Err(format!("edge {id}->{dst} missing from in-neighbors of {dst}"));
                }
            }
            for &src in &node.in_nbrs {
                let ok = self
                    .nodes
                    .get(&src)
                    .is_some_and(|s| s.out_nbrs.binary_search(&id).is_ok());
                if !ok {
                    return Err(format!("in-neighbor {src} of {id} has no matching out-edge"));
                }
            }
            out_total += node.out_nbrs.len();
        }
        if out_total != self.edges {
            return Err(format!("edge count {} but adjacency holds {out_total}", self.edges));
        }
        Ok(())
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.nodes == other.nodes
    }
}

impl Eq for Graph {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_node_is_idempotent() {
        let mut g = Graph::new();
        assert!(g.add_node(5));
        assert!(!g.add_node(5));
        g.add_node(-1);
        g.add_node(7);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let mut g = Graph::new();
        assert!(g.add_edge(1, 2));
        assert!(!g.add_edge(1, 2));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn self_loop_in_both_vectors() {
        let mut g = Graph::new();
        g.add_edge(1, 1);
        assert_eq!(g.neighbors(1, Direction::Out).unwrap(), [1]);
        assert_eq!(g.neighbors(1, Direction::In).unwrap(), [1]);
        assert_eq!(g.edge_count(), 1);
        assert!(g.del_node(1));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn complete_graph_on_three_nodes() {
        let mut g = Graph::new();
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
        assert_eq!(g.edge_count(), 6);
        for u in 0..3 {
            assert_eq!(g.out_degree(u).unwrap(), 2);
        }
        g.validate().unwrap();
    }

    #[test]
    fn delete_edges() {
        let mut g = Graph::new();
        g.add_edge(1, 2);
        assert!(g.del_edge(1, 2));
        assert_eq!(g.edge_count(), 0);
        assert!(!g.del_edge(1, 2));
        assert!(!g.del_edge(9, 9));
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn delete_star_center() {
        let mut g = Graph::new();
        for leaf in 1..=3 {
            g.add_edge(0, leaf);
        }
        assert!(g.del_node(0));
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 3);
        assert!(!g.del_node(0));
        for leaf in 1..=3 {
            assert!(g.neighbors(leaf, Direction::In).unwrap().is_empty());
        }
        g.add_node(10);
        assert!(g.del_node(10));
        g.validate().unwrap();
    }

    #[test]
    fn neighbors_are_sorted() {
        let mut g = Graph::new();
        g.add_edge(1, 3);
        g.add_edge(1, 2);
        assert_eq!(g.neighbors(1, Direction::Out).unwrap(), [2, 3]);
        for leaf in [7, 5, 6] {
            g.add_edge(leaf, 0);
        }
        assert_eq!(g.neighbors(0, Direction::In).unwrap(), [5, 6, 7]);
        assert!(matches!(g.neighbors(99, Direction::Out), Err(Error::UnknownNode(99))));
    }

    #[test]
    fn edges_sorted_by_source_then_destination() {
        let mut g = Graph::new();
        for (s, d) in [(2, 1), (1, 3), (1, 2), (-4, 0)] {
            g.add_edge(s, d);
        }
        assert_eq!(g.edges(), [(-4, 0), (1, 2), (1, 3), (2, 1)]);
    }
}
