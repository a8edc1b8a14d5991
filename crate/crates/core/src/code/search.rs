//! Exhaustive search for an `(n, k)` code on tiny instances.
//!
//! Three reductions keep the search exact while shrinking it:
//!
//! * a source's table only needs to depend on the class of its column
//!   under `R_{{i}}` (two columns in one class give the same `f^(k)`
//!   whatever the other sources do), so the search runs on class vectors;
//! * an edge's table matters only up to a relabelling of `B^n` (downstream
//!   tables can absorb any bijection) and only on the input tuples that
//!   actually occur, so tables are enumerated as restricted growth strings
//!   over the occurring tuples;
//! * once the edges assigned so far form a global cut, the sink output must
//!   already be a function of their symbols, so a prefix whose symbols do
//!   not determine `f^(k)` is abandoned.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::{CodeEncoders, CodeError, Layout, NetworkCode, VERIFY_BUDGET};
use crate::equivalence::partition;
use crate::function::TargetFunction;
use crate::network::Network;
use crate::radix;
use crate::sets::{EdgeId, EdgeSet, SourceIdx, SourceSet};

pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Refuse when the reduced encoder space exceeds this many candidates.
    pub budget: u64,
    /// Enumerate tables up to relabelling of `B^n`.
    pub symmetry: bool,
    pub cut_pruning: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            symmetry: true,
            cut_pruning: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Upper bound on the reduced space, saturating.
    pub space: u128,
    /// Complete assignments whose sink was checked.
    pub leaves: u64,
    /// Prefixes abandoned at a global cut.
    pub pruned: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { code: NetworkCode, stats: SearchStats },
    /// Every candidate was ruled out: no `(n, k)` code exists.
    Exhausted { stats: SearchStats },
}

impl SearchOutcome {
    pub fn code(&self) -> Option<&NetworkCode> {
        match self {
            SearchOutcome::Found { code, .. } => Some(code),
            SearchOutcome::Exhausted { .. } => None,
        }
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::Exhausted { stats } => *stats,
        }
    }
}

/// Number of tables `0..d -> 0..v`, all of them or up to relabelling.
fn table_count(d: usize, v: usize, symmetry: bool) -> u128 {
    if d as f64 * (v.max(2) as f64).log2() > 100.0 {
        return u128::MAX;
    }
    if !symmetry {
        return (v as u128).saturating_pow(d as u32);
    }
    // Stirling numbers of the second kind, summed over at most v blocks
    let mut row = vec![0u128; v + 1];
    row[0] = 1;
    for _ in 0..d {
        for j in (1..=v).rev() {
            row[j] = row[j]
                .saturating_mul(j as u128)
                .saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Next restricted growth string with values below `v`.
fn next_rgs(a: &mut [usize], v: usize) -> bool {
    for i in (1..a.len()).rev() {
        let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
        if a[i] + 1 < v && a[i] <= prefix_max {
            a[i] += 1;
            a[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

fn next_table(a: &mut [usize], v: usize, symmetry: bool) -> bool {
    if symmetry {
        next_rgs(a, v)
    } else {
        radix::increment(a, v)
    }
}

enum KeySource {
    Source(usize),
    Inputs(Vec<EdgeId>),
}

struct Problem {
    v: usize,
    inputs: usize,
    finite: Vec<EdgeId>,
    keys: Vec<KeySource>,
    /// Prefix of finite edges through position `d` is a global cut.
    global_prefix: Vec<bool>,
    sink_inputs: Vec<EdgeId>,
    /// Class vector of each source per reduced input.
    classes: Vec<Vec<usize>>,
    f_rank: Vec<usize>,
    config: SearchConfig,
    leaves: AtomicU64,
    pruned: AtomicU64,
}

/// Chosen table of one finite edge over the tuples that occur.
#[derive(Clone)]
struct Choice {
    ids: HashMap<Vec<usize>, usize>,
    table: Vec<usize>,
}

type Values = Vec<Vec<usize>>;

/// Sink symbols to the `f^(k)` rank they decode to.
type DecoderMap = HashMap<Vec<usize>, usize>;

impl Problem {
    fn key_ids(&self, d: usize, vals: &Values) -> (HashMap<Vec<usize>, usize>, Vec<usize>) {
        let mut map = HashMap::new();
        let ids = (0..self.inputs)
            .map(|t| {
                let key = match &self.keys[d] {
                    KeySource::Source(i) => vec![self.classes[*i][t]],
                    KeySource::Inputs(es) => es.iter().map(|e| vals[e.0][t]).collect(),
                };
                let next = map.len();
                *map.entry(key).or_insert(next)
            })
            .collect();
        (map, ids)
    }

    /// Map from the symbols on `edges` to the `f^(k)` rank, or `None` when
    /// two inputs collide.
    fn determines(&self, edges: &[EdgeId], vals: &Values) -> Option<HashMap<Vec<usize>, usize>> {
        let mut seen = HashMap::new();
        for (t, &rank) in self.f_rank.iter().enumerate().take(self.inputs) {
            let key: Vec<usize> = edges.iter().map(|e| vals[e.0][t]).collect();
            if *seen.entry(key).or_insert(rank) != rank {
                return None;
            }
        }
        Some(seen)
    }

    fn apply(
        &self,
        d: usize,
        table: &[usize],
        ids: &[usize],
        vals: &mut Values,
    ) -> Option<Option<HashMap<Vec<usize>, usize>>> {
        let e = self.finite[d];
        for t in 0..self.inputs {
            vals[e.0][t] = table[ids[t]];
        }
        if d + 1 == self.finite.len() {
            self.leaves.fetch_add(1, Ordering::Relaxed);
            return Some(self.determines(&self.sink_inputs, vals));
        }
        if self.config.cut_pruning && self.global_prefix[d] && self.determines(&self.finite[..=d], vals).is_none() {
            self.pruned.fetch_add(1, Ordering::Relaxed);
            return Some(None);
        }
        None
    }

    /// Tries `table` at position `d` and everything below it.
    fn explore(
        &self,
        d: usize,
        choice: Choice,
        id_list: &[usize],
        vals: &mut Values,
        chosen: &mut Vec<Choice>,
    ) -> Option<HashMap<Vec<usize>, usize>> {
        match self.apply(d, &choice.table, id_list, vals) {
            Some(Some(decoder)) => {
                chosen.push(choice);
                Some(decoder)
            }
            Some(None) => None,
            None => {
                chosen.push(choice);
                let hit = self.dfs(d + 1, vals, chosen);
                if hit.is_none() {
                    chosen.pop();
                }
                hit
            }
        }
    }

    fn dfs(&self, d: usize, vals: &mut Values, chosen: &mut Vec<Choice>) -> Option<HashMap<Vec<usize>, usize>> {
        let (map, ids) = self.key_ids(d, vals);
        let mut table = vec![0; map.len()];
        loop {
            let choice = Choice {
                ids: map.clone(),
                table: table.clone(),
            };
            if let Some(hit) = self.explore(d, choice, &ids, vals, chosen) {
                return Some(hit);
            }
            if !next_table(&mut table, self.v, self.config.symmetry) {
                return None;
            }
        }
    }

    /// Position 0 split into chunks searched in parallel; the first chunk
    /// with a hit wins, and within it the lowest table.
    fn search_root(&self, vals: &Values) -> Option<(Vec<Choice>, DecoderMap)> {
        const CHUNK: usize = 256;
        let (map, ids) = self.key_ids(0, vals);
        let mut table = vec![0; map.len()];
        let mut more = true;
        while more {
            let mut batch = Vec::with_capacity(CHUNK);
            while more && batch.len() < CHUNK {
                batch.push(table.clone());
                more = next_table(&mut table, self.v, self.config.symmetry);
            }
            let hit = batch.into_par_iter().find_map_first(|t| {
                let mut vals = vals.clone();
                let mut chosen = Vec::new();
                let choice = Choice { ids: map.clone(), table: t };
                self.explore(0, choice, &ids, &mut vals, &mut chosen)
                    .map(|dec| (chosen, dec))
            });
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

pub fn exhaustive_search(
    net: &Network,
    f: &TargetFunction,
    n: usize,
    k: usize,
    config: SearchConfig,
) -> Result<SearchOutcome, CodeError> {
    let s = net.source_count();
    if f.arity() != s {
        return Err(CodeError::ArityMismatch {
            sources: s,
            arity: f.arity(),
        });
    }
    let q = f.input_size();
    let layout = Layout::new(net, q, n, k)?;
    let v = layout.block_space;

    // per-source symbol classes and column classes
    let mut symbol_class = Vec::with_capacity(s);
    let mut reps = Vec::with_capacity(s);
    let mut domain = Vec::with_capacity(s);
    for i in 0..s {
        let p = partition(f, SourceSet::singleton(SourceIdx(i)), SourceSet::EMPTY, &[])?;
        let r = p.class_count();
        symbol_class.push((0..q).map(|a| p.class_of_rank(a)).collect::<Vec<_>>());
        reps.push((0..r).map(|c| p.representative_rank(c)).collect::<Vec<_>>());
        domain.push(radix::checked_pow(r, k).ok_or(CodeError::VerifyBudget { q, k, s })?);
    }
    let inputs = domain
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= VERIFY_BUDGET)
        .ok_or(CodeError::VerifyBudget { q, k, s })?;
    let column_class = |i: usize, col: usize| -> usize {
        radix::unrank(col, q, k)
            .iter()
            .fold(0, |acc, &a| acc * reps[i].len() + symbol_class[i][a])
    };

    let mut classes = vec![vec![0; inputs]; s];
    let mut f_rank = vec![0; inputs];
    for t in 0..inputs {
        let cs = radix::unrank_mixed(t, &domain);
        let digits: Vec<Vec<usize>> = (0..s).map(|i| radix::unrank(cs[i], reps[i].len(), k)).collect();
        for i in 0..s {
            classes[i][t] = cs[i];
        }
        f_rank[t] = (0..k).fold(0, |acc, row| {
            let x: Vec<usize> = (0..s).map(|i| reps[i][digits[i][row]]).collect();
            acc * f.output_size() + f.at(radix::rank(&x, q))
        });
    }

    let finite: Vec<EdgeId> = net
        .edge_order()
        .iter()
        .copied()
        .filter(|&e| !net.edge(e).infinite)
        .collect();
    let mut vals: Values = vec![vec![0; inputs]; net.edge_count()];
    let mut reduced_space = vec![0usize; net.edge_count()];
    for e in (0..net.edge_count()).map(EdgeId) {
        let edge = net.edge(e);
        if let Some(i) = net.source_index(edge.tail) {
            reduced_space[e.0] = if edge.infinite { domain[i.0] } else { v };
            if edge.infinite {
                vals[e.0] = classes[i.0].clone();
            }
        } else {
            reduced_space[e.0] = v;
        }
    }

    let mut space: u128 = 1;
    let mut keys = Vec::with_capacity(finite.len());
    let mut global_prefix = Vec::with_capacity(finite.len());
    let mut prefix = EdgeSet::EMPTY;
    for &e in &finite {
        let tail = net.edge(e).tail;
        let d = match net.source_index(tail) {
            Some(i) => {
                keys.push(KeySource::Source(i.0));
                domain[i.0]
            }
            None => {
                let ins = net.in_edges(tail).to_vec();
                let by_inputs = ins
                    .iter()
                    .try_fold(1usize, |acc, x| acc.checked_mul(reduced_space[x.0]))
                    .unwrap_or(usize::MAX);
                let by_sources = net
                    .sources_reaching(tail)
                    .iter()
                    .try_fold(1usize, |acc, i| acc.checked_mul(domain[i.0]))
                    .unwrap_or(usize::MAX);
                keys.push(KeySource::Inputs(ins));
                by_inputs.min(by_sources).min(inputs)
            }
        };
        space = space.saturating_mul(table_count(d, v, config.symmetry));
        prefix.insert(e);
        global_prefix.push(net.separated_sources(prefix) == net.all_sources());
    }
    if space > config.budget as u128 {
        let space = if space == u128::MAX {
            "more than 2^128".to_string()
        } else {
            space.to_string()
        };
        return Err(CodeError::SearchBudget {
            space,
            limit: config.budget,
        });
    }

    let problem = Problem {
        v,
        inputs,
        finite,
        keys,
        global_prefix,
        sink_inputs: net.in_edges(net.sink()).to_vec(),
        classes,
        f_rank,
        config,
        leaves: AtomicU64::new(0),
        pruned: AtomicU64::new(0),
    };
    let hit = if problem.finite.is_empty() {
        problem.leaves.fetch_add(1, Ordering::Relaxed);
        problem
            .determines(&problem.sink_inputs, &vals)
            .map(|dec| (Vec::new(), dec))
    } else {
        problem.search_root(&vals)
    };
    let stats = SearchStats {
        space,
        leaves: problem.leaves.load(Ordering::Relaxed),
        pruned: problem.pruned.load(Ordering::Relaxed),
    };
    let Some((chosen, decoder_map)) = hit else {
        return Ok(SearchOutcome::Exhausted { stats });
    };

    // lift the reduced tables back to full domains
    let lift = |inputs: &[EdgeId], idx: usize| -> Vec<usize> {
        let radices: Vec<usize> = inputs.iter().map(|x| layout.edge_space[x.0]).collect();
        let mut digits = radix::unrank_mixed(idx, &radices);
        for (slot, x) in inputs.iter().enumerate() {
            if let (true, Some(i)) = (net.edge(*x).infinite, net.source_index(net.edge(*x).tail)) {
                digits[slot] = column_class(i.0, digits[slot]);
            }
        }
        digits
    };
    let mut tables: Vec<Option<Vec<usize>>> = vec![None; net.edge_count()];
    for (d, choice) in chosen.iter().enumerate() {
        let e = problem.finite[d];
        let len = layout.table_len[e.0];
        let table = match &problem.keys[d] {
            KeySource::Source(i) => (0..len)
                .map(|col| {
                    choice
                        .ids
                        .get(&vec![column_class(*i, col)])
                        .map_or(0, |&id| choice.table[id])
                })
                .collect(),
            KeySource::Inputs(ins) => (0..len)
                .map(|idx| choice.ids.get(&lift(ins, idx)).map_or(0, |&id| choice.table[id]))
                .collect(),
        };
        tables[e.0] = Some(table);
    }
    let decoder = (0..layout.decoder_len)
        .map(|idx| decoder_map.get(&lift(&problem.sink_inputs, idx)).copied().unwrap_or(0))
        .collect();
    let encoders = CodeEncoders::new(net, q, n, k, tables)?;
    let code = NetworkCode::new(net, encoders, f.output_size(), decoder)?;
    Ok(SearchOutcome::Found { code, stats })
}
