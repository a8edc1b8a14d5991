//! Optimal codes on multi-edge trees.
//!
//! A multi-edge tree is a network in which every non-sink node sends all
//! its edges to one child, so contracting parallel edges leaves an in-tree
//! rooted at the sink. Node `u` learns the class of `x_{P(u)}` under
//! `R_{P(u)}`, where `P(u)` is the set of sources upstream of `u`, and
//! passes the class index of each of the `k` rows on its bundle. A child
//! rebuilds one representative row per predecessor class, glues them
//! together and classifies the result; the classes it obtains are those of
//! the true input.

use thiserror::Error;

use crate::bounds::{min_cut_bound, BoundError, BoundOptions, BoundReport, RateCertificate};
use crate::code::{verify, CodeEncoders, CodeError, NetworkCode, VerifyOutcome};
use crate::equivalence::{partition, EquivalenceError, EquivalencePartition};
use crate::function::TargetFunction;
use crate::network::Network;
use crate::radix;
use crate::sets::{EdgeId, NodeId, SourceIdx, SourceSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("network is not a multi-edge tree: {0}")]
    NotATree(String),
    #[error("rate condition fails at node `{node}`: {certificate}")]
    Infeasible {
        node: String,
        certificate: RateCertificate,
    },
    #[error("network has {sources} sources but the function has arity {arity}")]
    ArityMismatch { sources: usize, arity: usize },
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

impl TreeError {
    pub fn is_budget(&self) -> bool {
        match self {
            TreeError::Code(e) => e.is_budget(),
            TreeError::Bound(e) => e.is_budget(),
            _ => false,
        }
    }
}

/// The child of `u`, or why there is none.
fn child(net: &Network, u: NodeId) -> Result<NodeId, String> {
    let mut heads = net.out_edges(u).iter().map(|&e| net.edge(e).head);
    let first = heads
        .next()
        .ok_or_else(|| format!("node `{}` has no out-edges", net.node_name(u)))?;
    match heads.find(|&h| h != first) {
        Some(other) => Err(format!(
            "node `{}` has two children, `{}` and `{}`",
            net.node_name(u),
            net.node_name(first),
            net.node_name(other)
        )),
        None => Ok(first),
    }
}

/// Every non-sink node has exactly one child node.
pub fn is_multi_edge_tree(net: &Network) -> bool {
    tree_violation(net).is_none()
}

fn tree_violation(net: &Network) -> Option<String> {
    (0..net.node_count())
        .map(NodeId)
        .filter(|&u| u != net.sink())
        .find_map(|u| child(net, u).err())
}

#[derive(Clone, Debug)]
pub struct NodePlan {
    pub node: NodeId,
    /// `P(u)`: sources upstream of `u`, including `u` itself.
    pub ancestors: SourceSet,
    pub predecessors: Vec<NodeId>,
    /// `gamma_u`: classes of `A^|P(u)|` under `R_{P(u)}`.
    pub partition: EquivalencePartition,
    /// Finite out-edges in edge order.
    pub out_edges: Vec<EdgeId>,
    /// `R^k <= |B|^(n |E_o(u)|)`; `None` for the sink and for sources with
    /// an infinite bundle.
    pub certificate: Option<RateCertificate>,
}

impl NodePlan {
    pub fn class_count(&self) -> usize {
        self.partition.class_count()
    }
}

#[derive(Clone, Debug)]
pub struct TreePlan {
    pub n: usize,
    pub k: usize,
    /// All nodes reaching the sink, in topological order, sink last.
    pub nodes: Vec<NodePlan>,
}

impl TreePlan {
    pub fn node(&self, u: NodeId) -> Option<&NodePlan> {
        self.nodes.iter().find(|p| p.node == u)
    }
}

fn check_arity(net: &Network, f: &TargetFunction) -> Result<(), TreeError> {
    if f.arity() != net.source_count() {
        return Err(TreeError::ArityMismatch {
            sources: net.source_count(),
            arity: f.arity(),
        });
    }
    Ok(())
}

/// `gamma_u` for every node plus the per-node rate certificates, without
/// rejecting infeasible nodes.
pub fn plan_unchecked(net: &Network, f: &TargetFunction, n: usize, k: usize) -> Result<TreePlan, TreeError> {
    if let Some(why) = tree_violation(net) {
        return Err(TreeError::NotATree(why));
    }
    check_arity(net, f)?;
    if n == 0 || k == 0 {
        return Err(CodeError::ZeroBlock.into());
    }
    let mut nodes = Vec::new();
    for &u in net.topological_order() {
        let ancestors = net.sources_reaching(u);
        if ancestors.is_empty() {
            continue;
        }
        let predecessors = {
            let mut p: Vec<NodeId> = net
                .in_edges(u)
                .iter()
                .map(|&e| net.edge(e).tail)
                .filter(|&v| !net.sources_reaching(v).is_empty())
                .collect();
            p.dedup();
            p
        };
        let partition = partition(f, ancestors, SourceSet::EMPTY, &[])?;
        let out_edges: Vec<EdgeId> = net
            .out_edges(u)
            .iter()
            .copied()
            .filter(|&e| !net.edge(e).infinite)
            .collect();
        let bundle_infinite = net.out_edges(u).iter().any(|&e| net.edge(e).infinite);
        let certificate = if u == net.sink() || bundle_infinite {
            None
        } else {
            RateCertificate::new(partition.class_count(), k, n, net.edge_alphabet(), out_edges.len())
        };
        nodes.push(NodePlan {
            node: u,
            ancestors,
            predecessors,
            partition,
            out_edges,
            certificate,
        });
    }
    Ok(TreePlan { n, k, nodes })
}

/// As [`plan_unchecked`], failing at the first node whose rate condition
/// does not hold.
pub fn plan(net: &Network, f: &TargetFunction, n: usize, k: usize) -> Result<TreePlan, TreeError> {
    let p = plan_unchecked(net, f, n, k)?;
    if let Some(bad) = p
        .nodes
        .iter()
        .find(|np| np.certificate.is_some_and(|c| !c.satisfied))
    {
        return Err(TreeError::Infeasible {
            node: net.node_name(bad.node).to_string(),
            certificate: bad.certificate.expect("checked above"),
        });
    }
    Ok(p)
}

/// Positions of `sub`'s sources inside `sup`, both in increasing order.
fn positions(sub: SourceSet, sup: SourceSet) -> Vec<usize> {
    let order: Vec<SourceIdx> = sup.iter().collect();
    sub.iter()
        .map(|i| order.iter().position(|&j| j == i).expect("subset"))
        .collect()
}

struct Builder<'a> {
    net: &'a Network,
    plan: &'a TreePlan,
    q: usize,
}

impl Builder<'_> {
    fn node(&self, u: NodeId) -> &NodePlan {
        self.plan.node(u).expect("planned node")
    }

    /// Class-index word of node `u` as blocks for its finite out-edges.
    fn blocks(&self, u: &NodePlan, classes: &[usize]) -> Vec<usize> {
        let r = u.class_count();
        let b = self.net.edge_alphabet();
        let n = self.plan.n;
        let rank = classes.iter().fold(0, |acc, &c| acc * r + c);
        radix::unrank(rank, b, n * u.out_edges.len())
            .chunks(n)
            .map(|c| radix::rank(c, b))
            .collect()
    }

    /// Per-row classes of predecessor `v` from the symbols it sent, or
    /// `None` for a word no input produces.
    fn classes_from(&self, v: &NodePlan, received: &[(EdgeId, usize)]) -> Option<Vec<usize>> {
        let k = self.plan.k;
        let r = v.class_count();
        if let Some(&(_, raw)) = received.iter().find(|(e, _)| self.net.edge(*e).infinite) {
            let column = radix::unrank(raw, self.q, k);
            return Some(column.iter().map(|&a| v.partition.class_of_rank(a)).collect());
        }
        let b = self.net.edge_alphabet() as u128;
        let mut rank: u128 = 0;
        for &e in &v.out_edges {
            let block = received.iter().find(|(x, _)| *x == e).map(|&(_, s)| s)?;
            for d in radix::unrank(block, b as usize, self.plan.n) {
                rank = rank.checked_mul(b)?.checked_add(d as u128)?;
            }
        }
        let limit = (r as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if rank >= limit {
            return None;
        }
        Some(radix::unrank(rank as usize, r, k))
    }

    /// Representative rows for `u` built from its predecessors' classes;
    /// returns the assignment to `P(u)` of each row.
    fn representative_rows(&self, u: &NodePlan, preds: &[(NodeId, Vec<usize>)]) -> Vec<Vec<usize>> {
        let width = u.ancestors.len();
        (0..self.plan.k)
            .map(|row| {
                let mut x = vec![0; width];
                for (v, classes) in preds {
                    let vp = self.node(*v);
                    let rep = vp.partition.representative(classes[row]);
                    for (slot, value) in positions(vp.ancestors, u.ancestors).into_iter().zip(rep) {
                        x[slot] = value;
                    }
                }
                x
            })
            .collect()
    }

    /// Decodes every predecessor's classes from the in-edge values of `u`.
    fn predecessor_classes(&self, u: NodeId, in_values: &[(EdgeId, usize)]) -> Option<Vec<(NodeId, Vec<usize>)>> {
        self.node(u)
            .predecessors
            .iter()
            .map(|&v| {
                let from_v: Vec<(EdgeId, usize)> = in_values
                    .iter()
                    .copied()
                    .filter(|(e, _)| self.net.edge(*e).tail == v)
                    .collect();
                self.classes_from(self.node(v), &from_v).map(|c| (v, c))
            })
            .collect()
    }
}

/// Builds the class-index code; it computes `f` whenever [`plan`] succeeds.
pub fn construct(net: &Network, f: &TargetFunction, n: usize, k: usize) -> Result<NetworkCode, TreeError> {
    let plan = plan(net, f, n, k)?;
    build(net, f, &plan)
}

fn build(net: &Network, f: &TargetFunction, plan: &TreePlan) -> Result<NetworkCode, TreeError> {
    let (n, k, q) = (plan.n, plan.k, f.input_size());
    let (table_len, decoder_len) = crate::code::table_lengths(net, q, n, k)?;
    let builder = Builder { net, plan, q };
    let edge_space = |e: EdgeId| {
        if net.edge(e).infinite {
            radix::checked_pow(q, k).expect("layout checked")
        } else {
            radix::checked_pow(net.edge_alphabet(), n).expect("layout checked")
        }
    };
    let in_values = |u: NodeId, idx: usize| -> Vec<(EdgeId, usize)> {
        let ins = net.in_edges(u);
        let radices: Vec<usize> = ins.iter().map(|&e| edge_space(e)).collect();
        ins.iter().copied().zip(radix::unrank_mixed(idx, &radices)).collect()
    };

    let mut tables: Vec<Option<Vec<usize>>> = vec![None; net.edge_count()];
    for np in &plan.nodes {
        if np.node == net.sink() || np.out_edges.is_empty() {
            continue;
        }
        let len = table_len[np.out_edges[0].0];
        let mut columns: Vec<Vec<usize>> = vec![Vec::with_capacity(len); np.out_edges.len()];
        for idx in 0..len {
            let classes = if net.source_index(np.node).is_some() {
                let column = radix::unrank(idx, q, k);
                Some(column.iter().map(|&a| np.partition.class_of_rank(a)).collect::<Vec<_>>())
            } else {
                builder
                    .predecessor_classes(np.node, &in_values(np.node, idx))
                    .map(|preds| {
                        builder
                            .representative_rows(np, &preds)
                            .iter()
                            .map(|row| np.partition.class_of(row))
                            .collect()
                    })
            };
            let blocks = classes.map_or_else(|| vec![0; np.out_edges.len()], |c| builder.blocks(np, &c));
            for (col, b) in columns.iter_mut().zip(blocks) {
                col.push(b);
            }
        }
        for (e, col) in np.out_edges.iter().zip(columns) {
            tables[e.0] = Some(col);
        }
    }
    // finite edges of a source with an infinite bundle stay silent
    for e in (0..net.edge_count()).map(EdgeId) {
        if !net.edge(e).infinite && tables[e.0].is_none() {
            tables[e.0] = Some(vec![0; table_len[e.0]]);
        }
    }
    let encoders = CodeEncoders::new(net, q, n, k, tables)?;

    let sink = builder.node(net.sink());
    let decoder = (0..decoder_len)
        .map(|idx| match builder.predecessor_classes(net.sink(), &in_values(net.sink(), idx)) {
            None => 0,
            Some(preds) => builder
                .representative_rows(sink, &preds)
                .iter()
                .fold(0, |acc, row| {
                    let mut full = vec![0; net.source_count()];
                    for (slot, i) in sink.ancestors.iter().enumerate() {
                        full[i.0] = row[slot];
                    }
                    acc * f.output_size() + f.at(radix::rank(&full, q))
                }),
        })
        .collect();
    Ok(NetworkCode::new(net, encoders, f.output_size(), decoder)?)
}

/// Checks, for every node and every single row `x` in `A^s`, that the
/// representative row glued from the predecessors' classes lands in the
/// class of `x_{P(u)}`.
pub fn check_representatives(net: &Network, f: &TargetFunction) -> Result<bool, TreeError> {
    let plan = plan_unchecked(net, f, 1, 1)?;
    let q = f.input_size();
    let builder = Builder { net, plan: &plan, q };
    let total = radix::checked_pow(q, f.arity()).expect("function table exists");
    for rank in 0..total {
        let x = radix::unrank(rank, q, f.arity());
        let restrict = |set: SourceSet| -> Vec<usize> { set.iter().map(|i| x[i.0]).collect() };
        for np in &plan.nodes {
            if net.source_index(np.node).is_some() {
                continue;
            }
            let preds: Vec<(NodeId, Vec<usize>)> = np
                .predecessors
                .iter()
                .map(|&v| {
                    let vp = builder.node(v);
                    (v, vec![vp.partition.class_of(&restrict(vp.ancestors))])
                })
                .collect();
            let rows = builder.representative_rows(np, &preds);
            if np.partition.class_of(&rows[0]) != np.partition.class_of(&restrict(np.ancestors)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Capacity of a multi-edge tree plus, for a requested `(n, k)`, either a
/// verified code or the node where the rate condition fails.
#[derive(Clone, Debug)]
pub struct TreeReport {
    pub bound: BoundReport,
    pub plan: TreePlan,
    pub code: Result<(NetworkCode, VerifyOutcome), TreeError>,
}

pub fn tree_capacity_report(
    net: &Network,
    f: &TargetFunction,
    n: usize,
    k: usize,
    opts: &BoundOptions,
) -> Result<TreeReport, TreeError> {
    if let Some(why) = tree_violation(net) {
        return Err(TreeError::NotATree(why));
    }
    let bound = min_cut_bound(net, f, opts)?;
    let plan = plan_unchecked(net, f, n, k)?;
    let code = construct(net, f, n, k).and_then(|code| {
        let outcome = verify(&code, net, f)?;
        Ok((code, outcome))
    });
    Ok(TreeReport { bound, plan, code })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn recognizes_trees() {
        assert!(is_multi_edge_tree(&instances::xor_tree()));
        assert!(is_multi_edge_tree(&instances::sum_tree()));
        assert!(is_multi_edge_tree(&instances::chain(2, 2)));
        assert!(!is_multi_edge_tree(&instances::n1()));
        assert!(!is_multi_edge_tree(&instances::n2_prime()));
    }

    #[test]
    fn xor_tree_plan_and_code() {
        let (net, f) = (instances::xor_tree(), instances::xor());
        let p = plan(&net, &f, 1, 1).unwrap();
        let v = p.node(net.node_id("v").unwrap()).unwrap();
        assert_eq!(v.class_count(), 2);
        assert!(v.certificate.unwrap().satisfied);
        let code = construct(&net, &f, 1, 1).unwrap();
        assert!(verify(&code, &net, &f).unwrap().passed());
    }

    #[test]
    fn sum_tree_feasibility() {
        let f = instances::arithmetic_sum(2);
        let double = instances::sum_tree();
        let p = plan(&double, &f, 1, 1).unwrap();
        assert_eq!(p.node(double.node_id("v").unwrap()).unwrap().class_count(), 3);
        for (n, k) in [(1, 1), (2, 2)] {
            let code = construct(&double, &f, n, k).unwrap();
            assert!(verify(&code, &double, &f).unwrap().passed());
        }
        assert!(matches!(construct(&double, &f, 1, 2), Err(TreeError::Infeasible { .. })));
        let single = instances::sum_tree_single();
        match plan(&single, &f, 1, 1) {
            Err(TreeError::Infeasible { node, certificate }) => {
                assert_eq!(node, "v");
                assert_eq!(certificate.to_string(), "3^1 > 2^(1*1)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chain_classes_are_fibers() {
        let net = instances::chain(2, 2);
        let f = TargetFunction::from_fn("sq", 1, 4, 3, |x| x[0] * x[0] % 3).unwrap();
        let code = construct(&net, &f, 1, 1).unwrap();
        assert!(verify(&code, &net, &f).unwrap().passed());
        let p = plan(&net, &f, 1, 1).unwrap();
        assert_eq!(p.node(net.node_id("v").unwrap()).unwrap().class_count(), f.image().len());
    }

    #[test]
    fn representatives_hold() {
        assert!(check_representatives(&instances::sum_tree(), &instances::arithmetic_sum(2)).unwrap());
        assert!(check_representatives(&instances::xor_tree(), &instances::xor()).unwrap());
    }

    #[test]
    fn report_refuses_non_trees() {
        assert!(matches!(
            tree_capacity_report(&instances::n1(), &instances::product_plus_mod2(), 1, 1, &BoundOptions::default()),
            Err(TreeError::NotATree(_))
        ));
        let r = tree_capacity_report(&instances::xor_tree(), &instances::xor(), 1, 1, &BoundOptions::default())
            .unwrap();
        assert!(r.bound.value.equals_rational(2, 1, 1));
        assert!(r.code.unwrap().1.passed());
    }
}
