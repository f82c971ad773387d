use std::collections::VecDeque;

use super::{Components, Dense};
use crate::graph::Graph;

const UNSET: usize = usize::MAX;

/// Strongly connected components (iterative Tarjan).
///
/// Roots are tried in ascending id order; labels are numbered in the order
/// components are completed.
pub fn scc(g: &Graph) -> Components {
    let dense = Dense::new(g);
    let n = dense.len();
    let out = dense.out_adjacency();

    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut labels = vec![UNSET; n];
    let mut next_index = 0;
    let mut count = 0;
    // (node, position in its out-list)
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            let succ = out.of(v);
            if *pos < succ.len() {
                let w = succ[*pos] as usize;
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    labels[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    Components {
        ids: dense.ids,
        labels,
        count,
    }
}

/// Weakly connected components. Labels follow the smallest id of each
/// component, ascending.
pub fn connected_components(g: &Graph) -> Components {
    let dense = Dense::new(g);
    let n = dense.len();
    let adj = dense.undirected();
    let mut labels = vec![UNSET; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for root in 0..n {
        if labels[root] != UNSET {
            continue;
        }
        labels[root] = count;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &v in adj.of(u) {
                let v = v as usize;
                if labels[v] == UNSET {
                    labels[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    Components {
        ids: dense.ids,
        labels,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(i64, i64)]) -> Graph {
        let mut g = Graph::new();
        for &(s, d) in edges {
            g.add_edge(s, d);
        }
        g
    }

    #[test]
    fn cycle_is_one_component() {
        let c = scc(&graph(&[(0, 1), (1, 2), (2, 0)]));
        assert_eq!(c.count(), 1);
        assert_eq!(c.labels(), [0, 0, 0]);
    }

    #[test]
    fn chain_is_all_singletons() {
        let c = scc(&graph(&[(0, 1), (1, 2), (2, 3)]));
        assert_eq!(c.count(), 4);
        // sink completes first
        assert_eq!(c.label(3), Some(0));
        assert_eq!(c.label(0), Some(3));
    }

    #[test]
    fn two_cycles_joined_by_a_bridge() {
        let c = scc(&graph(&[(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (4, 4)]));
        assert_eq!(c.count(), 3);
        assert_eq!(c.groups().iter().map(Vec::len).collect::<Vec<_>>(), [2, 2, 1]);
        assert_eq!(c.label(0), c.label(1));
        assert_ne!(c.label(1), c.label(2));
    }

    #[test]
    fn weak_components() {
        let c = connected_components(&graph(&[(0, 1), (3, 2)]));
        assert_eq!(c.count(), 2);
        assert_eq!(c.labels(), [0, 0, 1, 1]);
        assert_eq!(connected_components(&Graph::new()).count(), 0);
    }
}
