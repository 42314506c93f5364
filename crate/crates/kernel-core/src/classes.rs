//! Communicating-class structure of the jump graph `x -> y iff L(x,y) > 0`.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::rate_matrix::RateMatrix;

/// One strongly connected component of the jump graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunicatingClass {
    /// Sorted state indices.
    pub states: Vec<usize>,
    /// No positive rate leaves the class.
    pub closed: bool,
}

/// All communicating classes, ordered by smallest contained state.
pub fn communicating_classes(l: &RateMatrix) -> Vec<CommunicatingClass> {
    let n = l.n();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if l.has_edge(i, j) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|scc| {
            let mut states: Vec<usize> = scc.into_iter().map(|v| v.index()).collect();
            states.sort_unstable();
            states
        })
        .collect();
    classes.sort_by_key(|c| c[0]);
    for (k, c) in classes.iter().enumerate() {
        for &s in c {
            component[s] = k;
        }
    }
    classes
        .into_iter()
        .enumerate()
        .map(|(k, states)| {
            let closed = states
                .iter()
                .all(|&i| (0..n).all(|j| !l.has_edge(i, j) || component[j] == k));
            CommunicatingClass { states, closed }
        })
        .collect()
}

pub fn closed_classes(l: &RateMatrix) -> Vec<Vec<usize>> {
    communicating_classes(l)
        .into_iter()
        .filter(|c| c.closed)
        .map(|c| c.states)
        .collect()
}

/// States reachable from `start` (including `start`), by breadth-first search.
pub fn reachable_from(l: &RateMatrix, start: usize) -> Vec<bool> {
    let n = l.n();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        for y in 0..n {
            if !seen[y] && l.has_edge(x, y) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_of_leaky_block_chain() {
        // 0 <-> 1 closed, 2 -> 0 and 2 -> 3, 3 absorbing
        let l = RateMatrix::from_rows(&[
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![2.0, -2.0, 0.0, 0.0],
            vec![1.0, 0.0, -2.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let classes = communicating_classes(&l);
        assert_eq!(
            classes,
            vec![
                CommunicatingClass { states: vec![0, 1], closed: true },
                CommunicatingClass { states: vec![2], closed: false },
                CommunicatingClass { states: vec![3], closed: true },
            ]
        );
        assert_eq!(closed_classes(&l), vec![vec![0, 1], vec![3]]);
        assert_eq!(reachable_from(&l, 2), vec![true, true, true, true]);
        assert_eq!(reachable_from(&l, 0), vec![true, true, false, false]);
    }
}
