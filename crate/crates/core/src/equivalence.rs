//! Equivalence of partial inputs under a target function.
//!
//! Two assignments `a`, `b` to the sources in `I` are `(I, J, c)`-equivalent
//! when, with the sources in `J` pinned to `c` and every other source free
//! but shared, `f` never tells them apart. Classes are found by comparing
//! full signature vectors (the value of `f` over every completion), which
//! is the definition evaluated in one pass.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::function::{InputMatrix, TargetFunction};
use crate::network::{Network, NetworkError};
use crate::radix;
use crate::sets::{EdgeSet, SourceIdx, SourceSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("index set I must be non-empty")]
    EmptyIndexSet,
    #[error("index sets I and J overlap")]
    Overlap,
    #[error("source index {index} is outside the function's arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("context has {got} symbols but J has {expected} sources")]
    ContextLength { expected: usize, got: usize },
    #[error("symbol {symbol} outside the input alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("block shapes differ or do not match |I|")]
    ShapeMismatch,
    #[error("network has {sources} sources but the function has arity {arity}")]
    ArityMismatch { sources: usize, arity: usize },
    #[error("edge set is not a cut set")]
    NotACutSet,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Partition of `A^|I|` into `(I, J, c)`-equivalence classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalencePartition {
    index_set: Vec<SourceIdx>,
    context_set: Vec<SourceIdx>,
    context: Vec<usize>,
    input_size: usize,
    /// Class id of each `a` in `A^|I|`, by mixed-radix rank.
    class_of: Vec<usize>,
    /// Rank of the lexicographically smallest member of each class.
    representatives: Vec<usize>,
}

impl EquivalencePartition {
    pub fn index_set(&self) -> &[SourceIdx] {
        &self.index_set
    }

    pub fn context_set(&self) -> &[SourceIdx] {
        &self.context_set
    }

    pub fn context(&self) -> &[usize] {
        &self.context
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    /// Class ids indexed by the mixed-radix rank of `a`.
    pub fn class_map(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_of_rank(&self, rank: usize) -> usize {
        self.class_of[rank]
    }

    pub fn class_of(&self, a: &[usize]) -> usize {
        self.class_of[radix::rank(a, self.input_size)]
    }

    pub fn representative_rank(&self, class: usize) -> usize {
        self.representatives[class]
    }

    pub fn representative(&self, class: usize) -> Vec<usize> {
        radix::unrank(self.representatives[class], self.input_size, self.index_set.len())
    }

    /// Members of `class` in lexicographic order.
    pub fn members(&self, class: usize) -> Vec<Vec<usize>> {
        self.class_of
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(r, _)| radix::unrank(r, self.input_size, self.index_set.len()))
            .collect()
    }
}

/// Precomputed strides for one `(I, J)` pair.
struct Layout {
    index_strides: Vec<usize>,
    context_strides: Vec<usize>,
    /// Table offsets of every completion of the free sources, in order.
    free_offsets: Vec<usize>,
    q: usize,
}

impl Layout {
    fn new(f: &TargetFunction, index: SourceSet, context: SourceSet) -> Result<Self, EquivalenceError> {
        let (s, q) = (f.arity(), f.input_size());
        if index.is_empty() {
            return Err(EquivalenceError::EmptyIndexSet);
        }
        if !index.intersection(context).is_empty() {
            return Err(EquivalenceError::Overlap);
        }
        if let Some(bad) = index.union(context).iter().find(|i| i.0 >= s) {
            return Err(EquivalenceError::IndexOutOfRange {
                index: bad.0 + 1,
                arity: s,
            });
        }
        let stride = |i: SourceIdx| radix::checked_pow(q, s - 1 - i.0).expect("table fits");
        let free = SourceSet::full(s).difference(index.union(context));
        let free_strides: Vec<usize> = free.iter().map(stride).collect();
        let mut free_offsets = Vec::with_capacity(q.pow(free_strides.len() as u32));
        let mut digits = vec![0; free_strides.len()];
        loop {
            free_offsets.push(digits.iter().zip(&free_strides).map(|(d, st)| d * st).sum());
            if !radix::increment(&mut digits, q) {
                break;
            }
        }
        Ok(Self {
            index_strides: index.iter().map(stride).collect(),
            context_strides: context.iter().map(stride).collect(),
            free_offsets,
            q,
        })
    }

    fn context_offset(&self, c: &[usize]) -> usize {
        c.iter().zip(&self.context_strides).map(|(d, st)| d * st).sum()
    }

    fn context_count(&self) -> usize {
        self.q.pow(self.context_strides.len() as u32)
    }

    /// Class ids (first-appearance order) and representative ranks.
    fn classify(&self, f: &TargetFunction, context_offset: usize) -> (Vec<usize>, Vec<usize>) {
        let width = self.index_strides.len();
        let total = self.q.pow(width as u32);
        let mut digits = vec![0; width];
        let mut class_of = Vec::with_capacity(total);
        let mut representatives = Vec::new();
        let mut classes: HashMap<Vec<usize>, usize> = HashMap::new();
        for rank in 0..total {
            let base = context_offset
                + digits
                    .iter()
                    .zip(&self.index_strides)
                    .map(|(d, st)| d * st)
                    .sum::<usize>();
            let signature: Vec<usize> = self.free_offsets.iter().map(|o| f.at(base + o)).collect();
            let next = classes.len();
            let id = *classes.entry(signature).or_insert(next);
            if id == next {
                representatives.push(rank);
            }
            class_of.push(id);
            radix::increment(&mut digits, self.q);
        }
        (class_of, representatives)
    }
}

fn check_context(f: &TargetFunction, context_set: SourceSet, c: &[usize]) -> Result<(), EquivalenceError> {
    if c.len() != context_set.len() {
        return Err(EquivalenceError::ContextLength {
            expected: context_set.len(),
            got: c.len(),
        });
    }
    if let Some(&symbol) = c.iter().find(|&&x| x >= f.input_size()) {
        return Err(EquivalenceError::SymbolOutOfRange {
            symbol,
            alphabet: f.input_size(),
        });
    }
    Ok(())
}

/// The `(I, J, c)` partition of `A^|I|`. `c` lists the pinned symbols of
/// the sources in `J` in increasing source order.
pub fn partition(
    f: &TargetFunction,
    index_set: SourceSet,
    context_set: SourceSet,
    context: &[usize],
) -> Result<EquivalencePartition, EquivalenceError> {
    let layout = Layout::new(f, index_set, context_set)?;
    check_context(f, context_set, context)?;
    let (class_of, representatives) = layout.classify(f, layout.context_offset(context));
    Ok(EquivalencePartition {
        index_set: index_set.iter().collect(),
        context_set: context_set.iter().collect(),
        context: context.to_vec(),
        input_size: f.input_size(),
        class_of,
        representatives,
    })
}

/// Largest class count over all contexts, with the smallest maximizing
/// context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextCount {
    pub count: usize,
    pub context: Vec<usize>,
    /// Number of contexts at which the maximum is attained.
    pub attaining: usize,
}

/// `max_c W^(c)_{I,J,f}`; ties go to the lexicographically smallest `c`.
pub fn max_class_count(
    f: &TargetFunction,
    index_set: SourceSet,
    context_set: SourceSet,
) -> Result<ContextCount, EquivalenceError> {
    let layout = Layout::new(f, index_set, context_set)?;
    let width = context_set.len();
    let (count, rank, attaining) = (0..layout.context_count())
        .into_par_iter()
        .map(|rank| {
            let c = radix::unrank(rank, layout.q, width);
            (layout.classify(f, layout.context_offset(&c)).1.len(), rank, 1)
        })
        .reduce(
            || (0, usize::MAX, 0),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => (a.0, a.1.min(b.1), a.2 + b.2),
            },
        );
    Ok(ContextCount {
        count,
        context: radix::unrank(rank, layout.q, width),
        attaining,
    })
}

fn check_arity(f: &TargetFunction, net: &Network) -> Result<(), EquivalenceError> {
    if f.arity() != net.source_count() {
        return Err(EquivalenceError::ArityMismatch {
            sources: net.source_count(),
            arity: f.arity(),
        });
    }
    Ok(())
}

/// `W_{C,f}` together with the maximizing context for `J_C`.
pub fn count_w_for_cut(
    f: &TargetFunction,
    net: &Network,
    cut: EdgeSet,
) -> Result<ContextCount, EquivalenceError> {
    check_arity(f, net)?;
    let analysis = net.cut_analysis(cut)?;
    if !analysis.is_cut_set() {
        return Err(EquivalenceError::NotACutSet);
    }
    max_class_count(f, analysis.separated, analysis.side)
}

/// `R_{I,f}`: class count with no pinned context.
pub fn count_r(f: &TargetFunction, index_set: SourceSet) -> Result<usize, EquivalenceError> {
    Ok(partition(f, index_set, SourceSet::EMPTY, &[])?.class_count())
}

/// Row-wise `(I, J, c)`-equivalence of two `k x |I|` blocks, with `c`
/// repeated on every row.
pub fn block_equivalent(
    f: &TargetFunction,
    index_set: SourceSet,
    context_set: SourceSet,
    context: &[usize],
    a: &InputMatrix,
    b: &InputMatrix,
) -> Result<bool, EquivalenceError> {
    if a.rows() != b.rows() || a.cols() != b.cols() || a.cols() != index_set.len() {
        return Err(EquivalenceError::ShapeMismatch);
    }
    for m in [a, b] {
        m.check_alphabet(f.input_size())
            .map_err(|_| EquivalenceError::SymbolOutOfRange {
                symbol: *m.entries().iter().max().unwrap_or(&0),
                alphabet: f.input_size(),
            })?;
    }
    let p = partition(f, index_set, context_set, context)?;
    Ok(a
        .rows_iter()
        .zip(b.rows_iter())
        .all(|(ra, rb)| p.class_of(ra) == p.class_of(rb)))
}
