use rayon::prelude::*;

use super::Dense;
use crate::graph::Graph;

/// Number of undirected triangles in the symmetrized graph, ignoring
/// self-loops.
///
/// Every edge is oriented from the lower to the higher `(degree, id)`
/// endpoint; a triangle is then counted exactly once, at its lowest vertex,
/// by intersecting sorted forward neighborhoods.
pub fn triangle_count(g: &Graph) -> u64 {
    let dense = Dense::new(g);
    let adj = dense.undirected();
    let n = dense.len();
    let rank = |v: usize| (adj.degree(v), v);
    let forward: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|u| {
            adj.of(u)
                .iter()
                .copied()
                .filter(|&v| rank(v as usize) > rank(u))
                .collect()
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|u| {
            let fu = &forward[u];
            fu.iter()
                .map(|&v| intersection_size(fu, &forward[v as usize]))
                .sum::<u64>()
        })
        .sum()
}

fn intersection_size(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_on_four_nodes() {
        let mut g = Graph::new();
        for u in 0..4 {
            for v in u + 1..4 {
                g.add_edge(u, v);
                g.add_edge(v, u);
            }
        }
        assert_eq!(triangle_count(&g), 4);
    }

    #[test]
    fn path_has_no_triangles() {
        let mut g = Graph::new();
        for u in 0..9 {
            g.add_edge(u, u + 1);
        }
        assert_eq!(triangle_count(&g), 0);
    }

    #[test]
    fn direction_and_loops_do_not_matter() {
        let mut g = Graph::new();
        g.add_edge(1, 2);
        g.add_edge(3, 2);
        g.add_edge(1, 3);
        g.add_edge(1, 1);
        assert_eq!(triangle_count(&g), 1);
        assert_eq!(triangle_count(&Graph::new()), 0);
    }

    #[test]
    fn intersections() {
        assert_eq!(intersection_size(&[1, 3, 5, 7], &[2, 3, 7, 9]), 2);
        assert_eq!(intersection_size(&[], &[1]), 0);
    }
}
