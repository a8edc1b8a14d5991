//! Directed acyclic networks with ordered sources and a single sink.
//!
//! [`NetworkDesc`] is the unchecked description (what a file says);
//! [`Network`] is the validated form carrying topological data. All the
//! topological questions asked by the bound and code modules (orders,
//! reachability, cut classification) are answered here.

mod cuts;
mod flow;
mod text;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::sets::{EdgeId, EdgeSet, NodeId, NodeSet, SourceIdx, SourceSet, MAX_ITEMS};

pub use cuts::CutAnalysis;
pub use flow::PathCount;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: NodeId,
    pub head: NodeId,
    /// One representative of an unbounded parallel bundle.
    pub infinite: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` is an infinite bundle and cannot belong to a finite cut")]
    InfiniteEdgeInCut(String),
    #[error("edge set separates no source from the sink")]
    NotACutSet,
    #[error("node set must contain a source and must not contain the sink")]
    NotANodeCut,
    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),
}

/// Unchecked network description, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkDesc {
    pub name: String,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub sources: Vec<NodeId>,
    pub sink: Option<NodeId>,
    pub edge_alphabet: usize,
}

impl NetworkDesc {
    pub fn new(name: impl Into<String>, edge_alphabet: usize) -> Self {
        Self {
            name: name.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            sources: Vec::new(),
            sink: None,
            edge_alphabet,
        }
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == name).map(NodeId)
    }

    pub fn add_node(&mut self, name: &str) -> Result<NodeId, NetworkError> {
        if self.node_id(name).is_some() {
            return Err(NetworkError::DuplicateNode(name.to_string()));
        }
        self.nodes.push(name.to_string());
        Ok(NodeId(self.nodes.len() - 1))
    }

    fn node_or_insert(&mut self, name: &str) -> NodeId {
        match self.node_id(name) {
            Some(id) => id,
            None => {
                self.nodes.push(name.to_string());
                NodeId(self.nodes.len() - 1)
            }
        }
    }

    /// Marks `name` as the next source, declaring the node if needed.
    pub fn add_source(&mut self, name: &str) -> NodeId {
        let id = self.node_or_insert(name);
        self.sources.push(id);
        id
    }

    pub fn set_sink(&mut self, name: &str) -> NodeId {
        let id = self.node_or_insert(name);
        self.sink = Some(id);
        id
    }

    pub fn add_edge(
        &mut self,
        name: &str,
        tail: &str,
        head: &str,
        infinite: bool,
    ) -> Result<EdgeId, NetworkError> {
        if self.edges.iter().any(|e| e.name == name) {
            return Err(NetworkError::DuplicateEdge(name.to_string()));
        }
        let tail = self
            .node_id(tail)
            .ok_or_else(|| NetworkError::UnknownNode(tail.to_string()))?;
        let head = self
            .node_id(head)
            .ok_or_else(|| NetworkError::UnknownNode(head.to_string()))?;
        self.edges.push(Edge {
            name: name.to_string(),
            tail,
            head,
            infinite,
        });
        Ok(EdgeId(self.edges.len() - 1))
    }

    /// Checks every structural invariant and lists each violation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let node_count = self.nodes.len();

        if self.edge_alphabet < 2 {
            violations.push(Violation::EdgeAlphabetTooSmall(self.edge_alphabet));
        }
        if node_count > MAX_ITEMS || self.edges.len() > MAX_ITEMS || self.sources.len() > MAX_ITEMS
        {
            violations.push(Violation::TooLarge);
        }
        if self.sources.is_empty() {
            violations.push(Violation::NoSources);
        }
        let mut seen = vec![false; node_count];
        for &s in &self.sources {
            if seen[s.0] {
                violations.push(Violation::DuplicateSource(self.nodes[s.0].clone()));
            }
            seen[s.0] = true;
        }
        let sink = match self.sink {
            Some(sink) => sink,
            None => {
                violations.push(Violation::NoSink);
                return ValidationReport { violations };
            }
        };
        if self.sources.contains(&sink) {
            violations.push(Violation::SinkIsSource(self.nodes[sink.0].clone()));
        }
        for e in &self.edges {
            if e.tail == e.head {
                violations.push(Violation::SelfLoop(e.name.clone()));
            }
            if self.sources.contains(&e.head) {
                violations.push(Violation::SourceWithIncomingEdge {
                    source: self.nodes[e.head.0].clone(),
                    edge: e.name.clone(),
                });
            }
            if e.tail == sink {
                violations.push(Violation::SinkWithOutgoingEdge(e.name.clone()));
            }
        }
        if let Some(cycle) = find_cycle(node_count, &self.edges) {
            violations.push(Violation::Cycle(
                cycle.iter().map(|n| self.nodes[n.0].clone()).collect(),
            ));
        }
        // reverse search from the sink
        let mut reaches = vec![false; node_count];
        reaches[sink.0] = true;
        let mut stack = vec![sink];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                if e.head == v && !reaches[e.tail.0] {
                    reaches[e.tail.0] = true;
                    stack.push(e.tail);
                }
            }
        }
        for (i, ok) in reaches.iter().enumerate() {
            if !ok {
                violations.push(Violation::CannotReachSink(self.nodes[i].clone()));
            }
        }
        ValidationReport { violations }
    }

    /// Turns every source with incoming edges into an interior node fed by
    /// a fresh source through an infinite bundle.
    ///
    /// Source `j` keeps its name and index; the old node is renamed `j'` and
    /// the feeder edge is called `j~j'`. Descriptions that already satisfy
    /// the rule are returned unchanged.
    pub fn split_sources(&self) -> NetworkDesc {
        let needs_split: Vec<NodeId> = self
            .sources
            .iter()
            .copied()
            .filter(|&s| self.edges.iter().any(|e| e.head == s))
            .collect();
        if needs_split.is_empty() {
            return self.clone();
        }

        let fresh_name = |base: String, taken: &dyn Fn(&str) -> bool| {
            let mut name = base;
            while taken(&name) {
                name.push('\'');
            }
            name
        };

        // New node list: each split source j becomes [j, j'] in place.
        let mut nodes = Vec::with_capacity(self.nodes.len() + needs_split.len());
        let mut remap = vec![NodeId(0); self.nodes.len()];
        let mut feeder = HashMap::new();
        for (i, name) in self.nodes.iter().enumerate() {
            if needs_split.contains(&NodeId(i)) {
                let interior = fresh_name(format!("{name}'"), &|n| {
                    self.nodes.iter().any(|m| m == n) || nodes.iter().any(|m: &String| m == n)
                });
                nodes.push(name.clone());
                let source_id = NodeId(nodes.len() - 1);
                nodes.push(interior);
                remap[i] = NodeId(nodes.len() - 1);
                feeder.insert(i, source_id);
            } else {
                nodes.push(name.clone());
                remap[i] = NodeId(nodes.len() - 1);
            }
        }

        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                name: e.name.clone(),
                tail: remap[e.tail.0],
                head: remap[e.head.0],
                infinite: e.infinite,
            })
            .collect();
        for &s in &needs_split {
            let source_id = feeder[&s.0];
            let interior = remap[s.0];
            let name = fresh_name(
                format!("{}~{}", nodes[source_id.0], nodes[interior.0]),
                &|n| edges.iter().any(|e| e.name == n),
            );
            edges.push(Edge {
                name,
                tail: source_id,
                head: interior,
                infinite: true,
            });
        }

        let sources = self
            .sources
            .iter()
            .map(|s| feeder.get(&s.0).copied().unwrap_or(remap[s.0]))
            .collect();
        NetworkDesc {
            name: self.name.clone(),
            nodes,
            edges,
            sources,
            sink: self.sink.map(|s| remap[s.0]),
            edge_alphabet: self.edge_alphabet,
        }
    }
}

fn find_cycle(node_count: usize, edges: &[Edge]) -> Option<Vec<NodeId>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; node_count];
    let mut parent = vec![usize::MAX; node_count];
    for start in 0..node_count {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let out = edges.iter().filter(|e| e.tail.0 == v).nth(*next);
            *next += 1;
            match out {
                Some(e) => {
                    let w = e.head.0;
                    if state[w] == 1 {
                        let mut cycle = vec![NodeId(w)];
                        let mut cur = v;
                        while cur != w {
                            cycle.push(NodeId(cur));
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        // rotate so the cycle starts at its entry node
                        let pos = cycle.iter().position(|n| n.0 == w).unwrap_or(0);
                        cycle.rotate_left(pos);
                        return Some(cycle);
                    }
                    if state[w] == 0 {
                        state[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                }
                None => {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSources,
    NoSink,
    DuplicateSource(String),
    SinkIsSource(String),
    SelfLoop(String),
    Cycle(Vec<String>),
    SourceWithIncomingEdge { source: String, edge: String },
    SinkWithOutgoingEdge(String),
    CannotReachSink(String),
    EdgeAlphabetTooSmall(usize),
    TooLarge,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSources => write!(f, "no source declared"),
            Violation::NoSink => write!(f, "no sink declared"),
            Violation::DuplicateSource(s) => write!(f, "source `{s}` listed twice"),
            Violation::SinkIsSource(s) => write!(f, "node `{s}` is both a source and the sink"),
            Violation::SelfLoop(e) => write!(f, "edge `{e}` has equal tail and head"),
            Violation::Cycle(nodes) => write!(f, "cycle through {{{}}}", nodes.join(",")),
            Violation::SourceWithIncomingEdge { source, edge } => {
                write!(f, "source `{source}` has incoming edge `{edge}`")
            }
            Violation::SinkWithOutgoingEdge(e) => write!(f, "sink has outgoing edge `{e}`"),
            Violation::CannotReachSink(n) => write!(f, "node `{n}` cannot reach the sink"),
            Violation::EdgeAlphabetTooSmall(b) => {
                write!(f, "edge alphabet size {b} is below 2")
            }
            Violation::TooLarge => write!(
                f,
                "more than {MAX_ITEMS} nodes, edges or sources"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// A validated network. Immutable; cheap to share across threads.
#[derive(Clone, Debug)]
pub struct Network {
    desc: NetworkDesc,
    sink: NodeId,
    topo: Vec<NodeId>,
    topo_rank: Vec<usize>,
    edge_order: Vec<EdgeId>,
    edge_rank: Vec<usize>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    source_of_node: Vec<Option<SourceIdx>>,
    /// Sources with a (possibly empty) path to each node.
    reached_by: Vec<SourceSet>,
    /// Nodes reachable from each node, itself included.
    descendants: Vec<NodeSet>,
    finite_edges: EdgeSet,
}

impl Network {
    pub fn new(desc: NetworkDesc) -> Result<Self, NetworkError> {
        let report = desc.validate();
        if !report.is_valid() {
            return Err(NetworkError::Invalid(report));
        }
        let sink = desc.sink.expect("validated");
        let n = desc.nodes.len();

        // Kahn's algorithm, smallest declaration index first.
        let mut indegree = vec![0usize; n];
        for e in &desc.edges {
            indegree[e.head.0] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(NodeId(v));
            for e in desc.edges.iter().filter(|e| e.tail.0 == v) {
                indegree[e.head.0] -= 1;
                if indegree[e.head.0] == 0 {
                    ready.insert(e.head.0);
                }
            }
        }
        let mut topo_rank = vec![0; n];
        for (r, v) in topo.iter().enumerate() {
            topo_rank[v.0] = r;
        }

        let mut edge_order: Vec<EdgeId> = (0..desc.edges.len()).map(EdgeId).collect();
        edge_order.sort_by_key(|e| {
            let edge = &desc.edges[e.0];
            (topo_rank[edge.tail.0], topo_rank[edge.head.0], e.0)
        });
        let mut edge_rank = vec![0; desc.edges.len()];
        for (r, e) in edge_order.iter().enumerate() {
            edge_rank[e.0] = r;
        }

        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for &e in &edge_order {
            let edge = &desc.edges[e.0];
            out_edges[edge.tail.0].push(e);
            in_edges[edge.head.0].push(e);
        }

        let mut source_of_node = vec![None; n];
        for (i, s) in desc.sources.iter().enumerate() {
            source_of_node[s.0] = Some(SourceIdx(i));
        }

        let mut reached_by = vec![SourceSet::EMPTY; n];
        for &v in &topo {
            let mut set = match source_of_node[v.0] {
                Some(i) => SourceSet::singleton(i),
                None => SourceSet::EMPTY,
            };
            for &e in &in_edges[v.0] {
                set = set.union(reached_by[desc.edges[e.0].tail.0]);
            }
            reached_by[v.0] = set;
        }

        let mut descendants = vec![NodeSet::EMPTY; n];
        for &v in topo.iter().rev() {
            let mut set = NodeSet::singleton(v);
            for &e in &out_edges[v.0] {
                set = set.union(descendants[desc.edges[e.0].head.0]);
            }
            descendants[v.0] = set;
        }

        let finite_edges = desc
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.infinite)
            .map(|(i, _)| EdgeId(i))
            .collect();

        Ok(Self {
            desc,
            sink,
            topo,
            topo_rank,
            edge_order,
            edge_rank,
            in_edges,
            out_edges,
            source_of_node,
            reached_by,
            descendants,
            finite_edges,
        })
    }

    pub fn desc(&self) -> &NetworkDesc {
        &self.desc
    }

    pub fn name(&self) -> &str {
        &self.desc.name
    }

    pub fn edge_alphabet(&self) -> usize {
        self.desc.edge_alphabet
    }

    pub fn node_count(&self) -> usize {
        self.desc.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.desc.edges.len()
    }

    pub fn source_count(&self) -> usize {
        self.desc.sources.len()
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn source_node(&self, i: SourceIdx) -> NodeId {
        self.desc.sources[i.0]
    }

    pub fn source_index(&self, v: NodeId) -> Option<SourceIdx> {
        self.source_of_node[v.0]
    }

    pub fn all_sources(&self) -> SourceSet {
        SourceSet::full(self.source_count())
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.desc.edges[e.0]
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.desc.nodes[v.0]
    }

    pub fn node_id(&self, name: &str) -> Result<NodeId, NetworkError> {
        self.desc
            .node_id(name)
            .ok_or_else(|| NetworkError::UnknownNode(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, NetworkError> {
        self.desc
            .edges
            .iter()
            .position(|e| e.name == name)
            .map(EdgeId)
            .ok_or_else(|| NetworkError::UnknownEdge(name.to_string()))
    }

    pub fn edge_set(&self, names: &[&str]) -> Result<EdgeSet, NetworkError> {
        names.iter().map(|n| self.edge_id(n)).collect()
    }

    pub fn node_set(&self, names: &[&str]) -> Result<NodeSet, NetworkError> {
        names.iter().map(|n| self.node_id(n)).collect()
    }

    /// Nodes in topological order (ties by declaration order).
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn topo_rank(&self, v: NodeId) -> usize {
        self.topo_rank[v.0]
    }

    /// Edges sorted by (tail rank, head rank, declaration index). Symbol
    /// blocks are always concatenated in this order.
    pub fn edge_order(&self) -> &[EdgeId] {
        &self.edge_order
    }

    pub fn edge_rank(&self, e: EdgeId) -> usize {
        self.edge_rank[e.0]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    pub fn out_edge_set(&self, v: NodeId) -> EdgeSet {
        self.out_edges[v.0].iter().copied().collect()
    }

    pub fn finite_edges(&self) -> EdgeSet {
        self.finite_edges
    }

    pub fn has_infinite_edges(&self) -> bool {
        self.finite_edges.len() != self.edge_count()
    }

    /// Reflexive reachability: `u -> u` always holds.
    pub fn reachable(&self, u: NodeId, v: NodeId) -> bool {
        self.descendants[u.0].contains(v)
    }

    pub fn reachable_by_name(&self, u: &str, v: &str) -> Result<bool, NetworkError> {
        Ok(self.reachable(self.node_id(u)?, self.node_id(v)?))
    }

    /// Sources that reach `v` (reflexively).
    pub fn sources_reaching(&self, v: NodeId) -> SourceSet {
        self.reached_by[v.0]
    }

    /// Members of `set` listed in edge order.
    pub fn ordered_edges(&self, set: EdgeSet) -> Vec<EdgeId> {
        let mut edges: Vec<EdgeId> = set.iter().collect();
        edges.sort_by_key(|e| self.edge_rank[e.0]);
        edges
    }

    pub fn edge_names(&self, set: EdgeSet) -> Vec<String> {
        self.ordered_edges(set)
            .into_iter()
            .map(|e| self.edge(e).name.clone())
            .collect()
    }

    /// `{a,b,c}` with edges in edge order.
    pub fn format_edges(&self, set: EdgeSet) -> String {
        format!("{{{}}}", self.edge_names(set).join(","))
    }

    pub fn format_nodes(&self, set: NodeSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.node_name(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}
