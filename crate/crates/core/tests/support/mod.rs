//! Random instances and property checks shared by the property suites and
//! the acceptance target.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use netcomp::bounds::{
    enumerate_cuts, min_cut_a, min_cut_bound, min_cut_k, rate_certificate, BoundOptions, EnumerateOptions,
};
use netcomp::code::{
    cut_determinism_check, exhaustive_search, table_lengths, verify, CodeEncoders, SearchConfig, SearchOutcome,
};
use netcomp::equivalence::{block_equivalent, count_r, max_class_count, partition};
use netcomp::function::{InputMatrix, TargetFunction};
use netcomp::network::{CutAnalysis, Network, NetworkDesc};
use netcomp::radix;
use netcomp::sets::{EdgeId, EdgeSet, SourceIdx, SourceSet};
use netcomp::NetworkCode;

pub const CASES: u32 = 256;

/// Search budget for random instances; larger spaces are rejected rather
/// than searched.
pub const SEARCH_BUDGET: u64 = 1 << 20;

/// Raw choices that [`build_network`] turns into a valid network.
#[derive(Clone, Debug)]
pub struct Shape {
    pub sources: usize,
    pub interior: usize,
    /// One forward link per non-sink node, which makes every node reach the sink.
    pub links: Vec<usize>,
    pub extra: Vec<(usize, usize)>,
    pub edge_alphabet: usize,
}

impl Shape {
    fn node_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.sources).map(|i| format!("s{i}")).collect();
        names.extend((1..=self.interior).map(|i| format!("v{i}")));
        names.push("rho".into());
        names
    }

    fn heads(&self, tail: usize, into_sources: bool) -> std::ops::Range<usize> {
        let total = self.sources + self.interior + 1;
        let lo = if into_sources { tail + 1 } else { (tail + 1).max(self.sources) };
        lo..total
    }

    /// Edge list as (tail, head) node indices.
    fn edges(&self, into_sources: bool) -> Vec<(usize, usize)> {
        let non_sink = self.sources + self.interior;
        let mut edges = Vec::new();
        for (tail, &choice) in self.links.iter().enumerate().take(non_sink) {
            let r = self.heads(tail, into_sources);
            edges.push((tail, r.start + choice % r.len()));
        }
        for &(t, h) in &self.extra {
            let tail = t % non_sink;
            let r = self.heads(tail, into_sources);
            edges.push((tail, r.start + h % r.len()));
        }
        edges
    }

    pub fn desc(&self, into_sources: bool) -> NetworkDesc {
        let names = self.node_names();
        let mut d = NetworkDesc::new("random", self.edge_alphabet);
        for name in &names {
            d.add_node(name).unwrap();
        }
        for name in names.iter().take(self.sources) {
            d.add_source(name);
        }
        d.set_sink("rho");
        for (i, (t, h)) in self.edges(into_sources).into_iter().enumerate() {
            d.add_edge(&format!("e{}", i + 1), &names[t], &names[h], false).unwrap();
        }
        d
    }
}

pub fn build_network(shape: &Shape) -> Network {
    Network::new(shape.desc(false)).expect("generated networks are valid")
}

pub fn shape(
    sources: std::ops::RangeInclusive<usize>,
    interior: std::ops::RangeInclusive<usize>,
    extra: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Shape> {
    (sources, interior, extra, 2usize..=3).prop_flat_map(|(s, m, x, b)| {
        (vec(0usize..64, s + m), vec((0usize..64, 0usize..64), x)).prop_map(move |(links, extra)| Shape {
            sources: s,
            interior: m,
            links,
            extra,
            edge_alphabet: b,
        })
    })
}

/// A multi-edge tree: each non-sink node gets `mult` parallel edges to a
/// single later node.
pub fn tree_shape(
    sources: std::ops::RangeInclusive<usize>,
    interior: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Network> {
    (sources, interior).prop_flat_map(|(s, m)| {
        (vec(0usize..64, s + m), vec(1usize..=2, s + m)).prop_map(move |(links, mult)| {
            let shape = Shape {
                sources: s,
                interior: m,
                links,
                extra: Vec::new(),
                edge_alphabet: 2,
            };
            let names = shape.node_names();
            let mut d = NetworkDesc::new("tree", 2);
            for name in &names {
                d.add_node(name).unwrap();
            }
            for name in names.iter().take(s) {
                d.add_source(name);
            }
            d.set_sink("rho");
            let mut count = 0;
            for ((t, h), &k) in shape.edges(false).into_iter().zip(&mult) {
                for _ in 0..k {
                    count += 1;
                    d.add_edge(&format!("e{count}"), &names[t], &names[h], false).unwrap();
                }
            }
            Network::new(d).unwrap()
        })
    })
}

/// A random table of the given arity.
pub fn function(
    arity: usize,
    q: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = TargetFunction> {
    (q, m).prop_flat_map(move |(q, m)| {
        vec(0..m, q.pow(arity as u32))
            .prop_map(move |table| TargetFunction::from_table("random", arity, q, m, table).unwrap())
    })
}

/// A random network with a random function of matching arity.
pub fn instance(
    shape: impl Strategy<Value = Shape>,
    q: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Network, TargetFunction)> {
    shape.prop_flat_map(move |sh| {
        let net = build_network(&sh);
        function(sh.sources, q.clone(), m.clone()).prop_map(move |f| (net.clone(), f))
    })
}

pub fn sources(net: &Network) -> Vec<SourceIdx> {
    (0..net.source_count()).map(SourceIdx).collect()
}

/// Every edge set of finite edges that separates at least one source.
pub fn all_cut_sets(net: &Network) -> Vec<CutAnalysis> {
    let finite: Vec<EdgeId> = net.finite_edges().iter().collect();
    (1u64..1 << finite.len())
        .filter_map(|mask| {
            let cut: EdgeSet = finite
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let a = net.cut_analysis(cut).unwrap();
            a.is_cut_set().then_some(a)
        })
        .collect()
}

/// Every subset of `0..s` as a source set.
pub fn subsets(within: SourceSet) -> Vec<SourceSet> {
    let members: Vec<SourceIdx> = within.iter().collect();
    (0u64..1 << members.len())
        .map(|mask| {
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect()
        })
        .collect()
}

fn full(s: usize) -> SourceSet {
    (0..s).map(SourceIdx).collect()
}

fn w_count(f: &TargetFunction, a: &CutAnalysis, cache: &mut HashMap<(u64, u64), usize>) -> usize {
    *cache
        .entry((a.separated.0, a.side.0))
        .or_insert_with(|| max_class_count(f, a.separated, a.side).unwrap().count)
}

pub fn check_r_at_least_w(net: &Network, f: &TargetFunction) -> Result<(), TestCaseError> {
    let mut cache = HashMap::new();
    for a in all_cut_sets(net) {
        let w = w_count(f, &a, &mut cache);
        let r = count_r(f, a.separated).unwrap();
        prop_assert!(r >= w, "R={r} < W={w} on {}", net.format_edges(a.cut));
    }
    Ok(())
}

pub fn check_w_monotone(net: &Network, f: &TargetFunction) -> Result<(), TestCaseError> {
    let mut cache = HashMap::new();
    for a in all_cut_sets(net) {
        let w = w_count(f, &a, &mut cache);
        for e in a.cut.iter() {
            let smaller = net.cut_analysis(a.cut.without(e)).unwrap();
            if smaller.separated != a.separated {
                continue;
            }
            prop_assert!(smaller.side.is_subset(a.side));
            let w2 = w_count(f, &smaller, &mut cache);
            prop_assert!(w2 >= w, "dropping {} lowers W from {w} to {w2}", net.edge(e).name);
        }
    }
    Ok(())
}

/// Finer pinning never merges classes that coarser pinning keeps apart.
pub fn check_coarsening(f: &TargetFunction, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = f.arity();
    let q = f.input_size();
    for index in subsets(full(s)) {
        if index.is_empty() {
            continue;
        }
        for context in subsets(full(s).difference(index)) {
            let c: Vec<usize> = (0..context.len()).map(|_| rng.gen_range(0..q)).collect();
            let fine = partition(f, index, context, &c).unwrap();
            let members: Vec<SourceIdx> = context.iter().collect();
            for sub in subsets(context) {
                let c2: Vec<usize> = members
                    .iter()
                    .zip(&c)
                    .filter(|(j, _)| sub.contains(**j))
                    .map(|(_, &v)| v)
                    .collect();
                let coarse = partition(f, index, sub, &c2).unwrap();
                // each class under the smaller context lies inside one class
                let mut image: HashMap<usize, usize> = HashMap::new();
                for a in 0..q.pow(index.len() as u32) {
                    let target = fine.class_of_rank(a);
                    let held = *image.entry(coarse.class_of_rank(a)).or_insert(target);
                    prop_assert_eq!(held, target);
                }
            }
        }
    }
    Ok(())
}

/// Equivalent vectors stay equivalent after appending a common block.
pub fn check_embedding(f: &TargetFunction, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = f.arity();
    let q = f.input_size();
    for index in subsets(full(s)) {
        if index.is_empty() {
            continue;
        }
        let small = partition(f, index, SourceSet::EMPTY, &[]).unwrap();
        for extra in subsets(full(s).difference(index)) {
            if extra.is_empty() {
                continue;
            }
            let big_set = index.union(extra);
            let big = partition(f, big_set, SourceSet::EMPTY, &[]).unwrap();
            let c: Vec<usize> = (0..extra.len()).map(|_| rng.gen_range(0..q)).collect();
            let extend = |a: &[usize]| -> Vec<usize> {
                let (mut ai, mut ci) = (0, 0);
                big_set
                    .iter()
                    .map(|j| {
                        if index.contains(j) {
                            ai += 1;
                            a[ai - 1]
                        } else {
                            ci += 1;
                            c[ci - 1]
                        }
                    })
                    .collect()
            };
            for a in 0..q.pow(index.len() as u32) {
                let rep = small.representative(small.class_of_rank(a));
                let a_vec = radix::unrank(a, q, index.len());
                prop_assert_eq!(big.class_of(&extend(&a_vec)), big.class_of(&extend(&rep)));
            }
        }
    }
    Ok(())
}

pub fn check_extension_global(net: &Network) -> Result<(), TestCaseError> {
    for a in all_cut_sets(net) {
        let ext = net.f_extension(a.cut).unwrap();
        prop_assert!(a.cut.is_subset(ext));
        prop_assert!(net.is_global_cut_set(ext).unwrap(), "F({}) is not global", net.format_edges(a.cut));
    }
    Ok(())
}

/// Random encoder tables and decoder for `net` at `(n, k)`.
pub fn random_code(net: &Network, q: usize, m: usize, n: usize, k: usize, seed: u64) -> NetworkCode {
    let mut rng = StdRng::seed_from_u64(seed);
    let (lens, decoder_len) = table_lengths(net, q, n, k).unwrap();
    let block = net.edge_alphabet().pow(n as u32);
    let tables = (0..net.edge_count())
        .map(|i| {
            (!net.edge(EdgeId(i)).infinite).then(|| (0..lens[i]).map(|_| rng.gen_range(0..block)).collect())
        })
        .collect();
    let enc = CodeEncoders::new(net, q, n, k, tables).unwrap();
    let out = m.pow(k as u32);
    let decoder = (0..decoder_len).map(|_| rng.gen_range(0..out)).collect();
    NetworkCode::new(net, enc, m, decoder).unwrap()
}

/// The output is a function of the symbols on any global cut.
pub fn check_cut_determinism(net: &Network, n: usize, k: usize, seed: u64) -> Result<(), TestCaseError> {
    let code = random_code(net, 2, 2, n, k, seed);
    let mut globals = 0;
    for a in all_cut_sets(net) {
        if a.separated == net.all_sources() {
            globals += 1;
            prop_assert!(
                cut_determinism_check(&code, net, a.cut).unwrap(),
                "output not determined by {}",
                net.format_edges(a.cut)
            );
        }
    }
    prop_assert!(globals > 0);
    Ok(())
}

/// The number of block classes over `k` rows is the `k`-th power of the
/// row class count, counted with pairwise block comparisons.
pub fn check_block_classes(f: &TargetFunction, k: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = f.arity();
    let q = f.input_size();
    let index_choices: Vec<SourceSet> = subsets(full(s)).into_iter().filter(|i| !i.is_empty()).collect();
    let index = index_choices[rng.gen_range(0..index_choices.len())];
    let context_choices = subsets(full(s).difference(index));
    let context = context_choices[rng.gen_range(0..context_choices.len())];
    let c: Vec<usize> = (0..context.len()).map(|_| rng.gen_range(0..q)).collect();
    let w = partition(f, index, context, &c).unwrap().class_count();
    let width = index.len();
    let mut reps: Vec<InputMatrix> = Vec::new();
    for rank in 0..q.pow((k * width) as u32) {
        let block = InputMatrix::from_rank(rank, k, width, q);
        let mut known = false;
        for r in &reps {
            if block_equivalent(f, index, context, &c, r, &block).unwrap() {
                known = true;
                break;
            }
        }
        if !known {
            reps.push(block);
        }
    }
    prop_assert_eq!(reps.len(), w.pow(k as u32));
    Ok(())
}

pub fn check_bound_chain(net: &Network, f: &TargetFunction) -> Result<(), TestCaseError> {
    let opts = BoundOptions::default();
    let full_bound = min_cut_bound(net, f, &opts).unwrap();
    let k = min_cut_k(net, f, &opts).unwrap();
    let a = min_cut_a(net, f, &opts).unwrap();
    prop_assert_ne!(full_bound.value.cmp_value(&k.value), Ordering::Less, "min-cut below min-cut-K");
    prop_assert_ne!(k.value.cmp_value(&a.value), Ordering::Less, "min-cut-K below min-cut-A");
    Ok(())
}

/// A code found by the search never beats the cut bound. Returns whether a
/// code was found.
pub fn check_search_sound(net: &Network, f: &TargetFunction, n: usize, k: usize) -> Result<bool, TestCaseError> {
    let config = SearchConfig {
        budget: SEARCH_BUDGET,
        ..SearchConfig::default()
    };
    let outcome = match exhaustive_search(net, f, n, k, config) {
        Ok(o) => o,
        Err(e) if e.is_budget() => return Err(TestCaseError::reject("search budget")),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    let SearchOutcome::Found { code, .. } = outcome else {
        return Ok(false);
    };
    prop_assert!(verify(&code, net, f).unwrap().passed());
    let bound = min_cut_bound(net, f, &BoundOptions::default()).unwrap();
    if let Some(w) = &bound.witness {
        let cert = rate_certificate(w.count, k, n, net.edge_alphabet(), w.analysis.cut.len()).unwrap();
        prop_assert!(cert.satisfied, "rate exceeds the bound: {cert}");
        let rate = k as f64 / n as f64 * (f.input_size() as f64).ln() / (net.edge_alphabet() as f64).ln();
        prop_assert!(rate <= bound.approx() + 1e-9);
    }
    Ok(true)
}

pub fn check_tree_w_equals_r(net: &Network, f: &TargetFunction) -> Result<(), TestCaseError> {
    let opts = EnumerateOptions {
        node_cuts_only: true,
        ..EnumerateOptions::default()
    };
    for c in enumerate_cuts(net, &opts).unwrap() {
        let w = max_class_count(f, c.analysis.separated, c.analysis.side).unwrap().count;
        let r = count_r(f, c.analysis.separated).unwrap();
        prop_assert_eq!(w, r, "W != R on {}", net.format_edges(c.analysis.cut));
    }
    Ok(())
}

/// Two assignments to `I` are equivalent when every completion that pins
/// `J` to `c` and agrees elsewhere gives equal values. Checked pair by pair.
pub fn naive_equivalent(
    f: &TargetFunction,
    index: SourceSet,
    context: SourceSet,
    c: &[usize],
    a: &[usize],
    b: &[usize],
) -> bool {
    let s = f.arity();
    let q = f.input_size();
    let free: Vec<SourceIdx> = full(s).difference(index).difference(context).iter().collect();
    let index: Vec<SourceIdx> = index.iter().collect();
    let context: Vec<SourceIdx> = context.iter().collect();
    let mut x = vec![0; s];
    let mut y = vec![0; s];
    for (j, &v) in context.iter().zip(c) {
        x[j.0] = v;
        y[j.0] = v;
    }
    for (i, (&u, &v)) in index.iter().zip(a.iter().zip(b)) {
        x[i.0] = u;
        y[i.0] = v;
    }
    for rank in 0..q.pow(free.len() as u32) {
        for (j, v) in free.iter().zip(radix::unrank(rank, q, free.len())) {
            x[j.0] = v;
            y[j.0] = v;
        }
        if f.evaluate(&x).unwrap() != f.evaluate(&y).unwrap() {
            return false;
        }
    }
    true
}

/// The partition for `(I, J, c)` against the pairwise oracle, plus its
/// labelling conventions.
pub fn check_against_oracle(
    f: &TargetFunction,
    index: SourceSet,
    context: SourceSet,
    c: &[usize],
) -> Result<(), TestCaseError> {
    let q = f.input_size();
    let p = partition(f, index, context, c).unwrap();
    let width = index.len();
    let size = q.pow(width as u32);
    let vectors: Vec<Vec<usize>> = (0..size).map(|r| radix::unrank(r, q, width)).collect();
    let mut next_fresh = 0;
    for (ra, a) in vectors.iter().enumerate() {
        let id = p.class_of_rank(ra);
        prop_assert_eq!(p.class_of(a), id);
        // ids appear in scan order
        prop_assert!(id <= next_fresh);
        if id == next_fresh {
            next_fresh += 1;
            prop_assert_eq!(&p.representative(id), a);
        }
        for (rb, b) in vectors.iter().enumerate().skip(ra + 1) {
            let same = id == p.class_of_rank(rb);
            prop_assert_eq!(
                same,
                naive_equivalent(f, index, context, c, a, b),
                "{:?} vs {:?} under I={:?} J={:?} c={:?}",
                a,
                b,
                index.one_based(),
                context.one_based(),
                c
            );
        }
    }
    prop_assert_eq!(p.class_count(), next_fresh);
    Ok(())
}

/// Every nonempty `I`, every disjoint `J` and every context `c`.
pub fn check_all_contexts(f: &TargetFunction) -> Result<usize, TestCaseError> {
    let s = f.arity();
    let q = f.input_size();
    let mut checked = 0;
    for index in subsets(full(s)) {
        if index.is_empty() {
            continue;
        }
        for context in subsets(full(s).difference(index)) {
            for rank in 0..q.pow(context.len() as u32) {
                let c = radix::unrank(rank, q, context.len());
                check_against_oracle(f, index, context, &c)?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Bundled and builtin functions with at most 256 table rows, and every
/// binary function of two and three binary arguments.
pub fn suite_functions() -> Vec<TargetFunction> {
    use netcomp::function::BuiltinParams;
    use netcomp::instances;

    let mut out = vec![
        instances::product_plus_mod2(),
        instances::arithmetic_sum(2),
        instances::arithmetic_sum(3),
        instances::xor(),
        instances::parity_of_quaternary(),
    ];
    for name in netcomp::function::BUILTIN_NAMES {
        for arity in 1..=4 {
            for q in 2..=4usize {
                if q.pow(arity as u32) > 256 {
                    continue;
                }
                let params = BuiltinParams {
                    arity: Some(arity),
                    input_size: Some(q),
                };
                if let Ok(f) = TargetFunction::builtin(name, params) {
                    out.push(f);
                }
            }
        }
    }
    for arity in 2..=3usize {
        let rows = 1usize << arity;
        for bits in 0..1usize << rows {
            let table = (0..rows).map(|r| bits >> r & 1).collect();
            out.push(TargetFunction::from_table(format!("bits{bits}"), arity, 2, 2, table).unwrap());
        }
    }
    out
}

/// Random `(I, J, c)` for a function of arity `s`.
pub fn pick(s: usize, q: usize, seed: u64) -> (SourceSet, SourceSet, Vec<usize>) {
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        let mut index = SourceSet::EMPTY;
        let mut context = SourceSet::EMPTY;
        for i in 0..s {
            match rng.gen_range(0..3) {
                0 => index.insert(SourceIdx(i)),
                1 => context.insert(SourceIdx(i)),
                _ => {}
            }
        }
        if !index.is_empty() {
            let c = (0..context.len()).map(|_| rng.gen_range(0..q)).collect();
            return (index, context, c);
        }
    }
}

pub fn arity_and_alphabet() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (1usize..=8).prop_map(|s| (s, 2)),
        (1usize..=5).prop_map(|s| (s, 3)),
        (1usize..=4).prop_map(|s| (s, 4)),
    ]
}
