//! Cut-set upper bounds on computing capacity.
//!
//! Every bound is a minimum of `|C| / log_q(count)` over some family of
//! cuts, where the count is `W_{C,f}` (min-cut), `R_{C,f}` (the two prior
//! variants) or `|f[A^s]|` (global cuts). Minima are found exactly via
//! [`CutRatio::cmp_value`]; floats appear only in display.

mod enumerate;
mod ratio;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use enumerate::{enumerate_cuts, is_reducible, CutBudget, EnumerateOptions, EnumeratedCut};
pub use ratio::{BoundValue, CutRatio, RateCertificate};

use crate::equivalence::{count_r, max_class_count, EquivalenceError};
use crate::function::TargetFunction;
use crate::network::{CutAnalysis, Network, NetworkError, PathCount};
use crate::sets::{NodeSet, SourceIdx, SourceSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("{edges} finite edges exceed the cut-enumeration budget of {limit}")]
    EdgeBudget { edges: usize, limit: usize },
    #[error("{nodes} non-sink nodes exceed the node-set budget of {limit}")]
    NodeBudget { nodes: usize, limit: usize },
    #[error("this bound needs a single source, network has {0}")]
    NotSingleSource(usize),
    #[error("rate certificate arguments must be positive")]
    NonPositive,
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl BoundError {
    pub fn is_budget(&self) -> bool {
        matches!(self, BoundError::EdgeBudget { .. } | BoundError::NodeBudget { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    MinCut,
    MinCutA,
    MinCutK,
    Prop2,
    Prop1,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::MinCut,
        BoundKind::MinCutA,
        BoundKind::MinCutK,
        BoundKind::Prop2,
        BoundKind::Prop1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::MinCut => "min-cut",
            BoundKind::MinCutA => "min-cut-A",
            BoundKind::MinCutK => "min-cut-K",
            BoundKind::Prop2 => "prop2",
            BoundKind::Prop1 => "prop1-capacity",
        }
    }

    /// Accepts the display names and the lowercase CLI spellings.
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min-cut" => Some(BoundKind::MinCut),
            "min-cut-a" => Some(BoundKind::MinCutA),
            "min-cut-k" => Some(BoundKind::MinCutK),
            "prop2" => Some(BoundKind::Prop2),
            "prop1" | "prop1-capacity" => Some(BoundKind::Prop1),
            _ => None,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundOptions {
    pub irreducible_only: bool,
    pub max_cut_size: Option<usize>,
    /// Keep one row per enumerated cut in the report.
    pub all_cuts: bool,
    pub budget: CutBudget,
}

/// One cut with its class count and ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutRow {
    pub analysis: CutAnalysis,
    /// Generating node set for node-induced cuts.
    pub nodes: Option<NodeSet>,
    pub count: usize,
    /// Maximizing context `c*` over `J_C` (min-cut only).
    pub context: Option<Vec<usize>>,
    pub value: BoundValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub input_size: usize,
    pub edge_alphabet: usize,
    pub value: BoundValue,
    /// `None` when every cut is unconstraining.
    pub witness: Option<CutRow>,
    pub per_cut: Vec<CutRow>,
    pub cuts_examined: usize,
}

impl BoundReport {
    /// `|C| / log_q(count)` at the witness, as a float.
    pub fn approx(&self) -> f64 {
        self.value.approx(self.input_size)
    }

    /// The pigeonhole certificate of the witness cut at `(n, k)`.
    pub fn certificate(&self, n: usize, k: usize) -> Option<RateCertificate> {
        let w = self.witness.as_ref()?;
        RateCertificate::new(w.count, k, n, self.edge_alphabet, w.analysis.cut.len())
    }
}

/// Which count a kind attaches to a cut.
#[derive(Clone, Copy)]
enum Counting {
    W,
    R,
    Image,
}

/// Witness order among equal values: larger `K_C`, then larger `I_C`, then
/// fewer edges, then the edge ranks compared lexicographically. Row
/// selection slots one more rule between the source sizes and the edges:
/// the count attained at more contexts wins.
fn tie_break(net: &Network, a: &CutAnalysis, b: &CutAnalysis) -> Ordering {
    source_order(a, b).then_with(|| edge_order(net, a, b))
}

fn source_order(a: &CutAnalysis, b: &CutAnalysis) -> Ordering {
    b.reaching
        .len()
        .cmp(&a.reaching.len())
        .then(b.separated.len().cmp(&a.separated.len()))
}

fn edge_order(net: &Network, a: &CutAnalysis, b: &CutAnalysis) -> Ordering {
    a.cut
        .len()
        .cmp(&b.cut.len())
        .then_with(|| rank_key(net, a).cmp(&rank_key(net, b)))
}

fn rank_key(net: &Network, a: &CutAnalysis) -> Vec<usize> {
    let mut ranks: Vec<usize> = a.cut.iter().map(|e| net.edge_rank(e)).collect();
    ranks.sort_unstable();
    ranks
}

type Key = (SourceSet, SourceSet);

/// Best representative per `(I_C, J_C)`; within a key the count is fixed,
/// so the ratio order reduces to the tie-break.
#[derive(Default)]
struct Gathered {
    best: HashMap<Key, (CutAnalysis, Option<NodeSet>)>,
    examined: usize,
}

impl Gathered {
    fn offer(&mut self, net: &Network, analysis: CutAnalysis, nodes: Option<NodeSet>) {
        self.examined += 1;
        self.consider(net, analysis, nodes);
    }

    fn consider(&mut self, net: &Network, analysis: CutAnalysis, nodes: Option<NodeSet>) {
        let key = (analysis.separated, analysis.side);
        match self.best.get(&key) {
            Some((held, _)) if tie_break(net, held, &analysis) != Ordering::Greater => {}
            _ => {
                self.best.insert(key, (analysis, nodes));
            }
        }
    }

    fn merge(mut self, net: &Network, other: Gathered) -> Gathered {
        self.examined += other.examined;
        for (_, (analysis, nodes)) in other.best {
            self.consider(net, analysis, nodes);
        }
        self
    }
}

fn gather(
    net: &Network,
    opts: &EnumerateOptions,
    keep: impl Fn(&CutAnalysis) -> bool + Sync,
) -> Result<Gathered, BoundError> {
    if opts.node_cuts_only {
        let mut g = Gathered::default();
        for c in enumerate::node_cuts(net, opts)? {
            if keep(&c.analysis) {
                g.offer(net, c.analysis, c.nodes);
            }
        }
        return Ok(g);
    }
    let positions = enumerate::finite_positions(net, opts)?;
    let total = 1u64 << positions.len();
    Ok((1..total)
        .into_par_iter()
        .fold(Gathered::default, |mut g, mask| {
            if let Some(a) = enumerate::edge_mode_item(net, &positions, mask, opts) {
                if keep(&a) {
                    g.offer(net, a, None);
                }
            }
            g
        })
        .reduce(Gathered::default, |a, b| a.merge(net, b)))
}

fn check_arity(net: &Network, f: &TargetFunction) -> Result<(), BoundError> {
    if f.arity() != net.source_count() {
        return Err(EquivalenceError::ArityMismatch {
            sources: net.source_count(),
            arity: f.arity(),
        }
        .into());
    }
    Ok(())
}

fn cut_bound(
    net: &Network,
    f: &TargetFunction,
    kind: BoundKind,
    counting: Counting,
    node_cuts_only: bool,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    check_arity(net, f)?;
    let eopts = EnumerateOptions {
        irreducible_only: opts.irreducible_only,
        max_cut_size: opts.max_cut_size,
        node_cuts_only,
        budget: opts.budget,
    };
    let all = net.all_sources();
    let global_only = matches!(counting, Counting::Image);
    let keep = move |a: &CutAnalysis| !global_only || a.separated == all;
    let gathered = gather(net, &eopts, keep)?;

    let image = f.image().len();
    let mut r_cache: HashMap<SourceSet, usize> = HashMap::new();
    let mut counts: HashMap<Key, (usize, Option<Vec<usize>>)> = HashMap::new();
    let mut attaining: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = gathered.best.keys().copied().collect();
    keys.sort_by_key(|(i, j)| (i.0, j.0));
    for key in keys {
        let entry = match counting {
            Counting::W => {
                let cc = max_class_count(f, key.0, key.1)?;
                attaining.insert(key, cc.attaining);
                (cc.count, Some(cc.context))
            }
            Counting::R => {
                let r = match r_cache.get(&key.0) {
                    Some(&r) => r,
                    None => {
                        let r = count_r(f, key.0)?;
                        r_cache.insert(key.0, r);
                        r
                    }
                };
                (r, None)
            }
            Counting::Image => (image, None),
        };
        counts.insert(key, entry);
    }
    let make_row = |analysis: CutAnalysis, nodes: Option<NodeSet>| {
        let (count, context) = counts[&(analysis.separated, analysis.side)].clone();
        CutRow {
            analysis,
            nodes,
            count,
            context,
            value: BoundValue::from_count(analysis.cut.len(), count),
        }
    };
    let witness = gathered
        .best
        .values()
        .map(|&(a, n)| make_row(a, n))
        .filter(|r| r.value.is_finite())
        .min_by(|a, b| {
            let spread = |r: &CutRow| attaining.get(&(r.analysis.separated, r.analysis.side)).copied().unwrap_or(1);
            a.value
                .cmp_value(&b.value)
                .then_with(|| source_order(&a.analysis, &b.analysis))
                .then(spread(b).cmp(&spread(a)))
                .then_with(|| edge_order(net, &a.analysis, &b.analysis))
        });

    let per_cut = if opts.all_cuts {
        enumerate_cuts(net, &eopts)?
            .filter(|c| keep(&c.analysis))
            .map(|c| make_row(c.analysis, c.nodes))
            .collect()
    } else {
        Vec::new()
    };

    Ok(BoundReport {
        kind,
        input_size: f.input_size(),
        edge_alphabet: net.edge_alphabet(),
        value: witness.as_ref().map_or(BoundValue::Infinite, |w| w.value),
        witness,
        per_cut,
        cuts_examined: gathered.examined,
    })
}

/// `min_C |C| / log_q W_{C,f}` over all cut sets.
pub fn min_cut_bound(
    net: &Network,
    f: &TargetFunction,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    cut_bound(net, f, BoundKind::MinCut, Counting::W, false, opts)
}

/// `min_C |C| / log_q R_{C,f}` over all cut sets.
pub fn min_cut_a(
    net: &Network,
    f: &TargetFunction,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    cut_bound(net, f, BoundKind::MinCutA, Counting::R, false, opts)
}

/// As [`min_cut_a`], restricted to cuts `E(U)` induced by node sets.
pub fn min_cut_k(
    net: &Network,
    f: &TargetFunction,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    cut_bound(net, f, BoundKind::MinCutK, Counting::R, true, opts)
}

/// Global cuts only, against the image size.
pub fn prop2_bound(
    net: &Network,
    f: &TargetFunction,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    cut_bound(net, f, BoundKind::Prop2, Counting::Image, false, opts)
}

/// Exact capacity of a single-source network: `M / log_q |f[A]|` with `M`
/// the source-to-sink edge connectivity.
pub fn prop1_capacity(net: &Network, f: &TargetFunction) -> Result<BoundReport, BoundError> {
    if net.source_count() != 1 {
        return Err(BoundError::NotSingleSource(net.source_count()));
    }
    check_arity(net, f)?;
    let source = net.source_node(SourceIdx(0));
    let image = f.image().len();
    let base = BoundReport {
        kind: BoundKind::Prop1,
        input_size: f.input_size(),
        edge_alphabet: net.edge_alphabet(),
        value: BoundValue::Infinite,
        witness: None,
        per_cut: Vec::new(),
        cuts_examined: 0,
    };
    let PathCount::Finite(m) = net.edge_disjoint_path_count(source, net.sink()) else {
        return Ok(base);
    };
    let cut = net
        .min_edge_cut(source, net.sink())
        .expect("finite connectivity has a finite minimum cut");
    let row = CutRow {
        analysis: net.cut_analysis(cut)?,
        nodes: None,
        count: image,
        context: None,
        value: BoundValue::from_count(m, image),
    };
    Ok(BoundReport {
        value: row.value,
        witness: Some(row),
        cuts_examined: 1,
        ..base
    })
}

/// Dispatches on `kind`.
pub fn compute(
    kind: BoundKind,
    net: &Network,
    f: &TargetFunction,
    opts: &BoundOptions,
) -> Result<BoundReport, BoundError> {
    match kind {
        BoundKind::MinCut => min_cut_bound(net, f, opts),
        BoundKind::MinCutA => min_cut_a(net, f, opts),
        BoundKind::MinCutK => min_cut_k(net, f, opts),
        BoundKind::Prop2 => prop2_bound(net, f, opts),
        BoundKind::Prop1 => prop1_capacity(net, f),
    }
}

/// `W^k <= |B|^(n |C|)`, refusing non-positive arguments.
pub fn rate_certificate(
    count: usize,
    k: usize,
    n: usize,
    edge_alphabet: usize,
    cut_size: usize,
) -> Result<RateCertificate, BoundError> {
    RateCertificate::new(count, k, n, edge_alphabet, cut_size).ok_or(BoundError::NonPositive)
}
