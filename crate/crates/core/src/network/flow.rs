//! Unit-capacity max-flow (augmenting paths) between two nodes.

use std::fmt;

use super::{Network, NetworkError};
use crate::sets::{EdgeId, EdgeSet, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathCount {
    Finite(usize),
    /// Some path uses infinite-bundle edges only.
    Unbounded,
}

impl fmt::Display for PathCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathCount::Finite(m) => write!(f, "{m}"),
            PathCount::Unbounded => write!(f, "unbounded"),
        }
    }
}

struct Flow {
    /// Units on each edge (declaration index).
    units: Vec<usize>,
    value: usize,
}

impl Network {
    fn capacity(&self, e: EdgeId) -> usize {
        if self.edge(e).infinite {
            usize::MAX
        } else {
            1
        }
    }

    fn infinite_path_exists(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from.0] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for &e in self.out_edges(v) {
                let edge = self.edge(e);
                if edge.infinite && !seen[edge.head.0] {
                    seen[edge.head.0] = true;
                    stack.push(edge.head);
                }
            }
        }
        false
    }

    /// One augmenting path search in the residual graph. Returns the edges
    /// used with their direction (true = forward).
    fn augmenting_path(&self, flow: &Flow, from: NodeId, to: NodeId) -> Option<Vec<(EdgeId, bool)>> {
        let n = self.node_count();
        let mut via: Vec<Option<(EdgeId, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from.0] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &e in self.out_edges(v) {
                let head = self.edge(e).head;
                if !seen[head.0] && flow.units[e.0] < self.capacity(e) {
                    seen[head.0] = true;
                    via[head.0] = Some((e, true));
                    queue.push_back(head);
                }
            }
            for &e in self.in_edges(v) {
                let tail = self.edge(e).tail;
                if !seen[tail.0] && flow.units[e.0] > 0 {
                    seen[tail.0] = true;
                    via[tail.0] = Some((e, false));
                    queue.push_back(tail);
                }
            }
        }
        if !seen[to.0] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let (e, forward) = via[v.0].expect("BFS tree");
            path.push((e, forward));
            v = if forward { self.edge(e).tail } else { self.edge(e).head };
        }
        path.reverse();
        Some(path)
    }

    fn max_flow(&self, from: NodeId, to: NodeId) -> Flow {
        let mut flow = Flow {
            units: vec![0; self.edge_count()],
            value: 0,
        };
        while let Some(path) = self.augmenting_path(&flow, from, to) {
            for (e, forward) in path {
                if forward {
                    flow.units[e.0] += 1;
                } else {
                    flow.units[e.0] -= 1;
                }
            }
            flow.value += 1;
        }
        flow
    }

    /// Maximum number of pairwise edge-disjoint paths from `u` to `v`.
    pub fn edge_disjoint_path_count(&self, u: NodeId, v: NodeId) -> PathCount {
        if self.infinite_path_exists(u, v) {
            return PathCount::Unbounded;
        }
        PathCount::Finite(self.max_flow(u, v).value)
    }

    pub fn edge_disjoint_path_count_by_name(
        &self,
        u: &str,
        v: &str,
    ) -> Result<PathCount, NetworkError> {
        Ok(self.edge_disjoint_path_count(self.node_id(u)?, self.node_id(v)?))
    }

    /// A maximum family of edge-disjoint `u`-`v` paths, each as an edge list
    /// from `u` to `v`. `None` when the count is unbounded.
    pub fn edge_disjoint_paths(&self, u: NodeId, v: NodeId) -> Option<Vec<Vec<EdgeId>>> {
        if self.infinite_path_exists(u, v) {
            return None;
        }
        let mut flow = self.max_flow(u, v);
        let mut paths = Vec::with_capacity(flow.value);
        for _ in 0..flow.value {
            let mut path = Vec::new();
            let mut at = u;
            while at != v {
                // follow flow in edge order so the decomposition is deterministic
                let e = *self
                    .out_edges(at)
                    .iter()
                    .find(|e| flow.units[e.0] > 0)
                    .expect("flow conservation");
                flow.units[e.0] -= 1;
                path.push(e);
                at = self.edge(e).head;
            }
            paths.push(path);
        }
        Some(paths)
    }

    /// A minimum finite `u`-`v` edge cut, read off the final residual graph.
    pub fn min_edge_cut(&self, u: NodeId, v: NodeId) -> Option<EdgeSet> {
        if self.infinite_path_exists(u, v) {
            return None;
        }
        let flow = self.max_flow(u, v);
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![u];
        seen[u.0] = true;
        while let Some(x) = stack.pop() {
            for &e in self.out_edges(x) {
                let head = self.edge(e).head;
                if !seen[head.0] && flow.units[e.0] < self.capacity(e) {
                    seen[head.0] = true;
                    stack.push(head);
                }
            }
            for &e in self.in_edges(x) {
                let tail = self.edge(e).tail;
                if !seen[tail.0] && flow.units[e.0] > 0 {
                    seen[tail.0] = true;
                    stack.push(tail);
                }
            }
        }
        Some(
            (0..self.edge_count())
                .map(EdgeId)
                .filter(|&e| seen[self.edge(e).tail.0] && !seen[self.edge(e).head.0])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::PathCount;
    use crate::instances;

    #[test]
    fn n1_source_three_has_two_paths() {
        let net = instances::n1();
        assert_eq!(
            net.edge_disjoint_path_count_by_name("3", "rho").unwrap(),
            PathCount::Finite(2)
        );
    }

    #[test]
    fn single_edge_has_one_path() {
        let net = instances::single_edge(2);
        assert_eq!(
            net.edge_disjoint_path_count_by_name("s", "t").unwrap(),
            PathCount::Finite(1)
        );
    }

    #[test]
    fn infinite_bundle_is_unbounded() {
        let net = instances::n2_prime();
        assert_eq!(
            net.edge_disjoint_path_count_by_name("1", "1'").unwrap(),
            PathCount::Unbounded
        );
        // finite bottleneck downstream of the bundle
        assert_eq!(
            net.edge_disjoint_path_count_by_name("1", "rho").unwrap(),
            PathCount::Finite(1)
        );
    }

    #[test]
    fn paths_are_edge_disjoint_and_cut_matches() {
        let net = instances::n1();
        for s in ["1", "2", "3"] {
            let u = net.node_id(s).unwrap();
            let paths = net.edge_disjoint_paths(u, net.sink()).unwrap();
            let mut used = std::collections::HashSet::new();
            for p in &paths {
                assert_eq!(net.edge(p[0]).tail, u);
                assert_eq!(net.edge(*p.last().unwrap()).head, net.sink());
                for e in p {
                    assert!(used.insert(*e));
                }
            }
            let cut = net.min_edge_cut(u, net.sink()).unwrap();
            assert_eq!(cut.len(), paths.len());
        }
    }
}
