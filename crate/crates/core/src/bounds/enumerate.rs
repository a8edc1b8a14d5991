//! Exhaustive enumeration of cut sets.
//!
//! Edge mode walks every subset of the finite edges; node mode walks every
//! node set `U` holding a source but not the sink and yields `E(U)`.
//! Infinite-bundle edges never appear in a yielded cut.

use std::collections::HashSet;

use super::BoundError;
use crate::network::{CutAnalysis, Network};
use crate::sets::{EdgeId, EdgeSet, NodeId, NodeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutBudget {
    pub max_finite_edges: usize,
    /// Cap on non-sink nodes for node-set enumeration.
    pub max_free_nodes: usize,
}

impl Default for CutBudget {
    fn default() -> Self {
        Self {
            max_finite_edges: 24,
            max_free_nodes: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Skip cuts containing an edge whose removal leaves `I_C` unchanged.
    pub irreducible_only: bool,
    pub max_cut_size: Option<usize>,
    pub node_cuts_only: bool,
    pub budget: CutBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumeratedCut {
    pub analysis: CutAnalysis,
    /// The generating node set in node mode.
    pub nodes: Option<NodeSet>,
}

/// Spreads the low bits of `mask` onto `positions`.
pub(crate) fn scatter(mask: u64, positions: &[EdgeId]) -> EdgeSet {
    let mut set = EdgeSet::EMPTY;
    let mut bits = mask;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        set.insert(positions[i]);
        bits &= bits - 1;
    }
    set
}

/// True if some edge of the cut can be dropped without changing `I_C`.
pub fn is_reducible(net: &Network, analysis: &CutAnalysis) -> bool {
    analysis
        .cut
        .iter()
        .any(|e| net.separated_sources(analysis.cut.without(e)) == analysis.separated)
}

pub(crate) fn finite_positions(net: &Network, opts: &EnumerateOptions) -> Result<Vec<EdgeId>, BoundError> {
    let positions: Vec<EdgeId> = net.finite_edges().iter().collect();
    if positions.len() > opts.budget.max_finite_edges {
        return Err(BoundError::EdgeBudget {
            edges: positions.len(),
            limit: opts.budget.max_finite_edges,
        });
    }
    Ok(positions)
}

/// Edge-mode filter for one subset.
pub(crate) fn edge_mode_item(
    net: &Network,
    positions: &[EdgeId],
    mask: u64,
    opts: &EnumerateOptions,
) -> Option<CutAnalysis> {
    if opts
        .max_cut_size
        .is_some_and(|m| mask.count_ones() as usize > m)
    {
        return None;
    }
    let analysis = net.analyze_unchecked(scatter(mask, positions));
    if !analysis.is_cut_set() {
        return None;
    }
    if opts.irreducible_only && is_reducible(net, &analysis) {
        return None;
    }
    Some(analysis)
}

/// Every distinct finite `E(U)`, paired with the first `U` producing it.
pub(crate) fn node_cuts(
    net: &Network,
    opts: &EnumerateOptions,
) -> Result<Vec<EnumeratedCut>, BoundError> {
    let free: Vec<NodeId> = (0..net.node_count())
        .map(NodeId)
        .filter(|&v| v != net.sink())
        .collect();
    if free.len() > opts.budget.max_free_nodes {
        return Err(BoundError::NodeBudget {
            nodes: free.len(),
            limit: opts.budget.max_free_nodes,
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << free.len()) {
        let mut nodes = NodeSet::EMPTY;
        let mut bits = mask;
        while bits != 0 {
            nodes.insert(free[bits.trailing_zeros() as usize]);
            bits &= bits - 1;
        }
        let Ok(cut) = net.node_cut_edges(nodes) else {
            continue;
        };
        if !cut.is_subset(net.finite_edges()) {
            continue;
        }
        if opts.max_cut_size.is_some_and(|m| cut.len() > m) {
            continue;
        }
        if seen.insert(cut) {
            out.push(EnumeratedCut {
                analysis: net.analyze_unchecked(cut),
                nodes: Some(nodes),
            });
        }
    }
    Ok(out)
}

/// Streams the cut family selected by `opts`.
pub fn enumerate_cuts<'a>(
    net: &'a Network,
    opts: &EnumerateOptions,
) -> Result<Box<dyn Iterator<Item = EnumeratedCut> + 'a>, BoundError> {
    if opts.node_cuts_only {
        return Ok(Box::new(node_cuts(net, opts)?.into_iter()));
    }
    let positions = finite_positions(net, opts)?;
    let opts = *opts;
    let total = 1u64 << positions.len();
    Ok(Box::new((1..total).filter_map(move |mask| {
        edge_mode_item(net, &positions, mask, &opts).map(|analysis| EnumeratedCut {
            analysis,
            nodes: None,
        })
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn irreducible_mode_on_n1() {
        let net = instances::n1();
        let opts = EnumerateOptions {
            irreducible_only: true,
            ..Default::default()
        };
        let cuts: Vec<EdgeSet> = enumerate_cuts(&net, &opts)
            .unwrap()
            .map(|c| c.analysis.cut)
            .collect();
        assert!(cuts.contains(&net.edge_set(&["e6", "e7"]).unwrap()));
        assert!(cuts.contains(&net.edge_set(&["e4", "e6", "e7"]).unwrap()));
        assert!(!cuts.contains(&net.edge_set(&["e1", "e5", "e6", "e7"]).unwrap()));

        // brute-force check of the dominance predicate over all 2^7 subsets
        let all: Vec<EnumeratedCut> = enumerate_cuts(&net, &Default::default()).unwrap().collect();
        assert_eq!(all.len(), (1..128u64).filter(|&m| !net.separated_sources(EdgeSet(m)).is_empty()).count());
        for c in &all {
            let reducible = c
                .analysis
                .cut
                .iter()
                .any(|e| net.separated_sources(c.analysis.cut.without(e)) == c.analysis.separated);
            assert_eq!(cuts.contains(&c.analysis.cut), !reducible);
        }
    }

    #[test]
    fn n2_prime_cuts_avoid_bundles() {
        let net = instances::n2_prime();
        let allowed = net.edge_set(&["e1", "e2", "e3", "e4"]).unwrap();
        let mut count = 0;
        for c in enumerate_cuts(&net, &Default::default()).unwrap() {
            assert!(c.analysis.cut.is_subset(allowed));
            count += 1;
        }
        assert!(count > 0);
        let node_mode = EnumerateOptions {
            node_cuts_only: true,
            ..Default::default()
        };
        for c in enumerate_cuts(&net, &node_mode).unwrap() {
            assert!(c.analysis.cut.is_subset(allowed));
        }
    }

    #[test]
    fn single_edge_has_one_cut() {
        let net = instances::single_edge(2);
        let cuts: Vec<_> = enumerate_cuts(&net, &Default::default()).unwrap().collect();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].analysis.cut, net.finite_edges());
    }

    #[test]
    fn node_mode_yields_node_cuts() {
        let net = instances::n1();
        let opts = EnumerateOptions {
            node_cuts_only: true,
            ..Default::default()
        };
        let cuts: Vec<EnumeratedCut> = enumerate_cuts(&net, &opts).unwrap().collect();
        let c1 = net.edge_set(&["e4", "e6", "e7"]).unwrap();
        let hit = cuts.iter().find(|c| c.analysis.cut == c1).unwrap();
        assert_eq!(hit.nodes, Some(net.node_set(&["1", "3", "v"]).unwrap()));
        for c in &cuts {
            let u = c.nodes.unwrap();
            let sources_in_u: crate::sets::SourceSet =
                u.iter().filter_map(|v| net.source_index(v)).collect();
            assert!(sources_in_u.is_subset(c.analysis.separated));
        }
    }

    #[test]
    fn budget_refusal() {
        let net = instances::n1();
        let opts = EnumerateOptions {
            budget: CutBudget {
                max_finite_edges: 5,
                max_free_nodes: 2,
            },
            ..Default::default()
        };
        assert!(matches!(
            enumerate_cuts(&net, &opts).err(),
            Some(BoundError::EdgeBudget { edges: 7, limit: 5 })
        ));
        let node = EnumerateOptions {
            node_cuts_only: true,
            ..opts
        };
        assert!(matches!(
            enumerate_cuts(&net, &node).err(),
            Some(BoundError::NodeBudget { .. })
        ));
    }

    #[test]
    fn max_cut_size_filters() {
        let net = instances::n1();
        let opts = EnumerateOptions {
            max_cut_size: Some(2),
            ..Default::default()
        };
        assert!(enumerate_cuts(&net, &opts)
            .unwrap()
            .all(|c| c.analysis.cut.len() <= 2));
    }
}
