use super::{Network, NetworkError};
use crate::sets::{EdgeSet, NodeSet, SourceSet};

/// Classification of an edge set against the sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CutAnalysis {
    pub cut: EdgeSet,
    /// Sources with no path to the sink once the cut is removed.
    pub separated: SourceSet,
    /// Sources reaching the tail of some cut edge.
    pub reaching: SourceSet,
    /// `reaching \ separated`: sources that can feed the cut and still
    /// reach the sink around it.
    pub side: SourceSet,
}

impl CutAnalysis {
    pub fn is_cut_set(&self) -> bool {
        !self.separated.is_empty()
    }
}

impl Network {
    /// Sources separated from the sink by removing `cut`. Infinite-bundle
    /// edges are never removed, whatever `cut` says.
    pub fn separated_sources(&self, cut: EdgeSet) -> SourceSet {
        let removed = cut.intersection(self.finite_edges);
        let mut alive = NodeSet::singleton(self.sink);
        for &v in self.topo.iter().rev() {
            if self.out_edges[v.0].iter().any(|&e| {
                !removed.contains(e) && alive.contains(self.desc.edges[e.0].head)
            }) {
                alive.insert(v);
            }
        }
        self.desc
            .sources
            .iter()
            .enumerate()
            .filter(|(_, s)| !alive.contains(**s))
            .map(|(i, _)| crate::sets::SourceIdx(i))
            .collect()
    }

    pub(crate) fn reaching_sources(&self, cut: EdgeSet) -> SourceSet {
        cut.iter().fold(SourceSet::EMPTY, |acc, e| {
            acc.union(self.reached_by[self.desc.edges[e.0].tail.0])
        })
    }

    pub(crate) fn analyze_unchecked(&self, cut: EdgeSet) -> CutAnalysis {
        let separated = self.separated_sources(cut);
        let reaching = self.reaching_sources(cut);
        CutAnalysis {
            cut,
            separated,
            reaching,
            side: reaching.difference(separated),
        }
    }

    fn check_edges(&self, cut: EdgeSet) -> Result<(), NetworkError> {
        if cut.0 >> self.edge_count() != 0 && self.edge_count() < 64 {
            return Err(NetworkError::UnknownEdge(format!(
                "#{}",
                63 - cut.0.leading_zeros()
            )));
        }
        if let Some(e) = cut.difference(self.finite_edges).iter().next() {
            return Err(NetworkError::InfiniteEdgeInCut(self.edge(e).name.clone()));
        }
        Ok(())
    }

    /// Computes `I_C`, `K_C` and `J_C` for a finite edge set.
    pub fn cut_analysis(&self, cut: EdgeSet) -> Result<CutAnalysis, NetworkError> {
        self.check_edges(cut)?;
        Ok(self.analyze_unchecked(cut))
    }

    /// True iff the set separates every source.
    pub fn is_global_cut_set(&self, cut: EdgeSet) -> Result<bool, NetworkError> {
        Ok(self.cut_analysis(cut)?.separated == self.all_sources())
    }

    /// `C` plus the out-edges of every source the cut leaves connected.
    pub fn f_extension(&self, cut: EdgeSet) -> Result<EdgeSet, NetworkError> {
        let analysis = self.cut_analysis(cut)?;
        if !analysis.is_cut_set() {
            return Err(NetworkError::NotACutSet);
        }
        let mut extended = cut;
        for (i, &s) in self.desc.sources.iter().enumerate() {
            if !analysis.separated.contains(crate::sets::SourceIdx(i)) {
                extended = extended.union(self.out_edge_set(s));
            }
        }
        Ok(extended)
    }

    /// Edges leaving the node set `U`. May include infinite-bundle edges.
    pub fn node_cut_edges(&self, nodes: NodeSet) -> Result<EdgeSet, NetworkError> {
        let has_source = self.desc.sources.iter().any(|&s| nodes.contains(s));
        if !has_source || nodes.contains(self.sink) {
            return Err(NetworkError::NotANodeCut);
        }
        Ok(self
            .desc
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| nodes.contains(e.tail) && !nodes.contains(e.head))
            .map(|(i, _)| crate::sets::EdgeId(i))
            .collect())
    }
}
