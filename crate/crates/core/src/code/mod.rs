//! `(n, k)` network codes: dense encoder and decoder tables, execution and
//! exhaustive verification.
//!
//! Every edge value is stored as a rank. A finite edge carries a block in
//! `B^n` (first symbol most significant); an infinite-bundle edge, which
//! must leave a source, carries that source's raw column `x_i` in `A^k`.
//! A node's input is the mixed-radix rank of its in-edge values taken in
//! edge order, first in-edge most significant.

mod paper;
mod search;
mod single;
mod text;

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

pub use paper::paper_code_n1;
pub use search::{exhaustive_search, SearchConfig, SearchOutcome, SearchStats, DEFAULT_SEARCH_BUDGET};
pub use single::single_source_code;
pub use text::table_lengths;

use crate::bounds::RateCertificate;
use crate::equivalence::EquivalenceError;
use crate::function::{FunctionError, InputMatrix, TargetFunction, MAX_TABLE_LEN};
use crate::network::{Network, NetworkError};
use crate::radix;
use crate::sets::{EdgeId, EdgeSet, NodeId};

/// Largest `|A|^(k s)` that [`verify`] and friends will walk.
pub const VERIFY_BUDGET: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("n and k must be positive")]
    ZeroBlock,
    #[error("code does not fit the network: {0}")]
    Shape(String),
    #[error("infinite edge `{0}` must leave a source")]
    InfiniteEdgeFromInterior(String),
    #[error("{what} needs {size} entries, beyond the table budget")]
    TooLarge { what: String, size: String },
    #[error("{q}^({k}*{s}) inputs exceed the verification budget of 2^20")]
    VerifyBudget { q: usize, k: usize, s: usize },
    #[error("encoder space of {space} candidates exceeds the search budget of {limit}")]
    SearchBudget { space: String, limit: u64 },
    #[error("no decoder exists: inputs {x} and {y} reach the sink identically but differ in f")]
    NoDecoder { x: InputMatrix, y: InputMatrix },
    #[error("rate condition fails: {0}")]
    RateViolated(RateCertificate),
    #[error("construction needs a single source, network has {0}")]
    NotSingleSource(usize),
    #[error("the source reaches the sink over infinite edges only")]
    UnboundedConnectivity,
    #[error("edge set is not a global cut set")]
    NotGlobalCut,
    #[error("network has {sources} sources but the function has arity {arity}")]
    ArityMismatch { sources: usize, arity: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
}

impl CodeError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            CodeError::TooLarge { .. } | CodeError::VerifyBudget { .. } | CodeError::SearchBudget { .. }
        )
    }
}

fn too_large(what: impl Into<String>, size: impl ToString) -> CodeError {
    CodeError::TooLarge {
        what: what.into(),
        size: size.to_string(),
    }
}

/// Table sizes implied by a network and `(q, |B|, n, k)`.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub block_space: usize,
    pub column_space: usize,
    /// Value space per edge, by edge id.
    pub edge_space: Vec<usize>,
    /// Table length per edge; 0 for infinite edges.
    pub table_len: Vec<usize>,
    pub decoder_len: usize,
}

impl Layout {
    pub fn new(net: &Network, q: usize, n: usize, k: usize) -> Result<Self, CodeError> {
        if n == 0 || k == 0 {
            return Err(CodeError::ZeroBlock);
        }
        let b = net.edge_alphabet();
        let block_space = radix::checked_pow(b, n)
            .filter(|&v| v <= MAX_TABLE_LEN)
            .ok_or_else(|| too_large("an edge block", format!("{b}^{n}")))?;
        let column_space = radix::checked_pow(q, k)
            .filter(|&v| v <= MAX_TABLE_LEN)
            .ok_or_else(|| too_large("a source column", format!("{q}^{k}")))?;
        let mut edge_space = vec![0; net.edge_count()];
        for e in (0..net.edge_count()).map(EdgeId) {
            let edge = net.edge(e);
            edge_space[e.0] = if edge.infinite {
                if net.source_index(edge.tail).is_none() {
                    return Err(CodeError::InfiniteEdgeFromInterior(edge.name.clone()));
                }
                column_space
            } else {
                block_space
            };
        }
        let domain = |v: NodeId, what: &str| -> Result<usize, CodeError> {
            net.in_edges(v).iter().try_fold(1usize, |acc, e| {
                acc.checked_mul(edge_space[e.0])
                    .filter(|&d| d <= MAX_TABLE_LEN)
                    .ok_or_else(|| too_large(what.to_string(), "more than 2^24"))
            })
        };
        let mut table_len = vec![0; net.edge_count()];
        for e in (0..net.edge_count()).map(EdgeId) {
            let edge = net.edge(e);
            if edge.infinite {
                continue;
            }
            table_len[e.0] = if net.source_index(edge.tail).is_some() {
                column_space
            } else {
                domain(edge.tail, &format!("encoder of `{}`", edge.name))?
            };
        }
        let decoder_len = domain(net.sink(), "the decoder")?;
        Ok(Self {
            block_space,
            column_space,
            edge_space,
            table_len,
            decoder_len,
        })
    }
}

/// Encoder tables of an `(n, k)` code, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeEncoders {
    n: usize,
    k: usize,
    input_size: usize,
    edge_alphabet: usize,
    tables: Vec<Option<Vec<usize>>>,
}

impl CodeEncoders {
    /// `tables[e]` is `None` exactly for infinite edges.
    pub fn new(
        net: &Network,
        input_size: usize,
        n: usize,
        k: usize,
        tables: Vec<Option<Vec<usize>>>,
    ) -> Result<Self, CodeError> {
        let layout = Layout::new(net, input_size, n, k)?;
        if tables.len() != net.edge_count() {
            return Err(CodeError::Shape(format!(
                "{} encoder tables for {} edges",
                tables.len(),
                net.edge_count()
            )));
        }
        for (i, table) in tables.iter().enumerate() {
            let edge = net.edge(EdgeId(i));
            match (edge.infinite, table) {
                (true, None) => {}
                (true, Some(_)) => {
                    return Err(CodeError::Shape(format!("infinite edge `{}` takes no table", edge.name)))
                }
                (false, None) => return Err(CodeError::Shape(format!("edge `{}` has no table", edge.name))),
                (false, Some(t)) => {
                    if t.len() != layout.table_len[i] {
                        return Err(CodeError::Shape(format!(
                            "table of `{}` has {} entries, expected {}",
                            edge.name,
                            t.len(),
                            layout.table_len[i]
                        )));
                    }
                    if let Some(&v) = t.iter().find(|&&v| v >= layout.block_space) {
                        return Err(CodeError::Shape(format!(
                            "table of `{}` holds block {v}, outside B^{n}",
                            edge.name
                        )));
                    }
                }
            }
        }
        Ok(Self {
            n,
            k,
            input_size,
            edge_alphabet: net.edge_alphabet(),
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn edge_alphabet(&self) -> usize {
        self.edge_alphabet
    }

    pub fn table(&self, e: EdgeId) -> Option<&[usize]> {
        self.tables[e.0].as_deref()
    }

    pub fn set_table(&mut self, e: EdgeId, table: Vec<usize>) {
        self.tables[e.0] = Some(table);
    }

    /// `(k / n) log_|B| |A|`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64 * (self.input_size as f64).ln() / (self.edge_alphabet as f64).ln()
    }

    fn check(&self, net: &Network) -> Result<(), CodeError> {
        Self::new(net, self.input_size, self.n, self.k, self.tables.clone()).map(|_| ())
    }
}

/// A full code: encoders plus the sink decoder into `O^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkCode {
    encoders: CodeEncoders,
    output_size: usize,
    decoder: Vec<usize>,
}

impl NetworkCode {
    pub fn new(
        net: &Network,
        encoders: CodeEncoders,
        output_size: usize,
        decoder: Vec<usize>,
    ) -> Result<Self, CodeError> {
        encoders.check(net)?;
        let layout = Layout::new(net, encoders.input_size, encoders.n, encoders.k)?;
        if decoder.len() != layout.decoder_len {
            return Err(CodeError::Shape(format!(
                "decoder has {} entries, expected {}",
                decoder.len(),
                layout.decoder_len
            )));
        }
        let out_space = radix::checked_pow(output_size, encoders.k)
            .ok_or_else(|| too_large("a decoder output", format!("{output_size}^{}", encoders.k)))?;
        if let Some(&v) = decoder.iter().find(|&&v| v >= out_space) {
            return Err(CodeError::Shape(format!("decoder entry {v} outside O^k")));
        }
        Ok(Self {
            encoders,
            output_size,
            decoder,
        })
    }

    pub fn encoders(&self) -> &CodeEncoders {
        &self.encoders
    }

    pub fn n(&self) -> usize {
        self.encoders.n
    }

    pub fn k(&self) -> usize {
        self.encoders.k
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn decoder(&self) -> &[usize] {
        &self.decoder
    }

    pub fn rate(&self) -> f64 {
        self.encoders.rate()
    }

    pub fn table(&self, e: EdgeId) -> Option<&[usize]> {
        self.encoders.table(e)
    }

    pub fn set_table(&mut self, e: EdgeId, table: Vec<usize>) {
        self.encoders.set_table(e, table);
    }

    pub fn set_decoder(&mut self, decoder: Vec<usize>) {
        self.decoder = decoder;
    }
}

enum Step<'a> {
    Source { source: usize, table: &'a [usize] },
    Raw { source: usize },
    Interior { inputs: Vec<(usize, usize)>, table: &'a [usize] },
}

/// Precomputed evaluation order over edge ranks.
struct Evaluator<'a> {
    steps: Vec<(EdgeId, Step<'a>)>,
    sink_inputs: Vec<(usize, usize)>,
}

impl<'a> Evaluator<'a> {
    fn new(net: &Network, enc: &'a CodeEncoders) -> Result<Self, CodeError> {
        let layout = Layout::new(net, enc.input_size, enc.n, enc.k)?;
        let inputs = |v: NodeId| -> Vec<(usize, usize)> {
            net.in_edges(v)
                .iter()
                .map(|&e| (e.0, layout.edge_space[e.0]))
                .collect()
        };
        let steps = net
            .edge_order()
            .iter()
            .map(|&e| {
                let edge = net.edge(e);
                let step = match (net.source_index(edge.tail), edge.infinite) {
                    (Some(i), true) => Step::Raw { source: i.0 },
                    (Some(i), false) => Step::Source {
                        source: i.0,
                        table: enc.tables[e.0].as_deref().unwrap_or(&[]),
                    },
                    (None, _) => Step::Interior {
                        inputs: inputs(edge.tail),
                        table: enc.tables[e.0].as_deref().unwrap_or(&[]),
                    },
                };
                (e, step)
            })
            .collect();
        Ok(Self {
            steps,
            sink_inputs: inputs(net.sink()),
        })
    }

    fn index(values: &[usize], inputs: &[(usize, usize)]) -> usize {
        inputs.iter().fold(0, |acc, &(e, radix)| acc * radix + values[e])
    }

    /// Fills `values` (by edge id) from source column ranks; returns the
    /// sink's input index.
    fn run(&self, columns: &[usize], values: &mut [usize]) -> usize {
        for (e, step) in &self.steps {
            values[e.0] = match step {
                Step::Raw { source } => columns[*source],
                Step::Source { source, table } => table[columns[*source]],
                Step::Interior { inputs, table } => table[Self::index(values, inputs)],
            };
        }
        Self::index(values, &self.sink_inputs)
    }
}

/// Edge blocks in edge order and the sink output `psi(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    /// Symbols on each edge; `n` symbols of `B`, or `k` of `A` on an
    /// infinite edge.
    pub edges: Vec<(EdgeId, Vec<usize>)>,
    pub output: Vec<usize>,
}

impl ExecutionTrace {
    pub fn block(&self, e: EdgeId) -> Option<&[usize]> {
        self.edges.iter().find(|(id, _)| *id == e).map(|(_, b)| b.as_slice())
    }
}

fn column_ranks(x: &InputMatrix, q: usize) -> Vec<usize> {
    (0..x.cols())
        .map(|j| (0..x.rows()).fold(0, |acc, i| acc * q + x.get(i, j)))
        .collect()
}

fn check_input(net: &Network, enc: &CodeEncoders, x: &InputMatrix) -> Result<(), CodeError> {
    if x.rows() != enc.k || x.cols() != net.source_count() {
        return Err(CodeError::Shape(format!(
            "input is {}x{}, code expects {}x{}",
            x.rows(),
            x.cols(),
            enc.k,
            net.source_count()
        )));
    }
    x.check_alphabet(enc.input_size)?;
    Ok(())
}

/// Runs the code on one input block.
pub fn execute(code: &NetworkCode, net: &Network, x: &InputMatrix) -> Result<ExecutionTrace, CodeError> {
    let enc = &code.encoders;
    enc.check(net)?;
    check_input(net, enc, x)?;
    let eval = Evaluator::new(net, enc)?;
    let mut values = vec![0; net.edge_count()];
    let sink = eval.run(&column_ranks(x, enc.input_size), &mut values);
    let edges = net
        .edge_order()
        .iter()
        .map(|&e| {
            let block = if net.edge(e).infinite {
                radix::unrank(values[e.0], enc.input_size, enc.k)
            } else {
                radix::unrank(values[e.0], enc.edge_alphabet, enc.n)
            };
            (e, block)
        })
        .collect();
    Ok(ExecutionTrace {
        edges,
        output: radix::unrank(code.decoder[sink], code.output_size, enc.k),
    })
}

/// All inputs `x` in `A^(k x s)`, enumerated by row-major rank.
struct InputSpace {
    q: usize,
    k: usize,
    s: usize,
    total: usize,
}

impl InputSpace {
    fn new(net: &Network, f: &TargetFunction, enc: &CodeEncoders) -> Result<Self, CodeError> {
        let s = net.source_count();
        if f.arity() != s {
            return Err(CodeError::ArityMismatch {
                sources: s,
                arity: f.arity(),
            });
        }
        if f.input_size() != enc.input_size {
            return Err(CodeError::Shape(format!(
                "code is over an input alphabet of {}, function over {}",
                enc.input_size,
                f.input_size()
            )));
        }
        let (q, k) = (enc.input_size, enc.k);
        let total = radix::checked_pow(q, k * s)
            .filter(|&t| t <= VERIFY_BUDGET)
            .ok_or(CodeError::VerifyBudget { q, k, s })?;
        Ok(Self { q, k, s, total })
    }

    fn matrix(&self, rank: usize) -> InputMatrix {
        InputMatrix::from_rank(rank, self.k, self.s, self.q)
    }

    /// Column ranks and the rank of `f^(k)(x)` in `O^k`.
    fn decode(&self, rank: usize, f: &TargetFunction, columns: &mut [usize]) -> usize {
        let entries = radix::unrank(rank, self.q, self.k * self.s);
        columns.iter_mut().for_each(|c| *c = 0);
        let mut out = 0;
        for row in entries.chunks(self.s) {
            for (c, &x) in columns.iter_mut().zip(row) {
                *c = *c * self.q + x;
            }
            out = out * f.output_size() + f.at(radix::rank(row, self.q));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Pass { checked: usize },
    /// The lexicographically first failing input.
    Fail {
        input: InputMatrix,
        expected: Vec<usize>,
        got: Vec<usize>,
        checked: usize,
    },
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyOutcome::Pass { .. })
    }
}

/// Exhaustive zero-error check over every `x` in `A^(k x s)`.
pub fn verify(code: &NetworkCode, net: &Network, f: &TargetFunction) -> Result<VerifyOutcome, CodeError> {
    let enc = &code.encoders;
    enc.check(net)?;
    if code.output_size != f.output_size() {
        return Err(CodeError::Shape(format!(
            "decoder outputs over {} symbols, function over {}",
            code.output_size,
            f.output_size()
        )));
    }
    let space = InputSpace::new(net, f, enc)?;
    let eval = Evaluator::new(net, enc)?;
    let failure = (0..space.total).into_par_iter().find_first(|&rank| {
        let mut columns = vec![0; space.s];
        let mut values = vec![0; net.edge_count()];
        let expected = space.decode(rank, f, &mut columns);
        code.decoder[eval.run(&columns, &mut values)] != expected
    });
    Ok(match failure {
        None => VerifyOutcome::Pass { checked: space.total },
        Some(rank) => {
            let mut columns = vec![0; space.s];
            let mut values = vec![0; net.edge_count()];
            let expected = space.decode(rank, f, &mut columns);
            let got = code.decoder[eval.run(&columns, &mut values)];
            VerifyOutcome::Fail {
                input: space.matrix(rank),
                expected: radix::unrank(expected, f.output_size(), enc.k),
                got: radix::unrank(got, f.output_size(), enc.k),
                checked: space.total,
            }
        }
    })
}

/// Whether the sink's received block determines `f^(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecoderCheck {
    Exists,
    /// Two inputs with equal sink blocks and different function values;
    /// `y` is the first input (in order) that collides with an earlier `x`.
    Conflict { x: InputMatrix, y: InputMatrix },
}

/// Reachable sink index to the `f^(k)` rank, or the first two inputs that
/// collide.
type SinkMap = Result<HashMap<usize, usize>, (usize, usize)>;

/// Sink-block map: for each reachable sink index, the `f^(k)` rank it must
/// decode to and the first input reaching it.
fn sink_map(
    enc: &CodeEncoders,
    net: &Network,
    f: &TargetFunction,
) -> Result<SinkMap, CodeError> {
    let space = InputSpace::new(net, f, enc)?;
    let eval = Evaluator::new(net, enc)?;
    let mut seen: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut columns = vec![0; space.s];
    let mut values = vec![0; net.edge_count()];
    for rank in 0..space.total {
        let expected = space.decode(rank, f, &mut columns);
        let sink = eval.run(&columns, &mut values);
        match seen.get(&sink) {
            Some(&(out, first)) if out != expected => return Ok(Err((first, rank))),
            Some(_) => {}
            None => {
                seen.insert(sink, (expected, rank));
            }
        }
    }
    Ok(Ok(seen.into_iter().map(|(k, (v, _))| (k, v)).collect()))
}

pub fn decoder_exists(enc: &CodeEncoders, net: &Network, f: &TargetFunction) -> Result<DecoderCheck, CodeError> {
    enc.check(net)?;
    Ok(match sink_map(enc, net, f)? {
        Ok(_) => DecoderCheck::Exists,
        Err((x, y)) => DecoderCheck::Conflict {
            x: InputMatrix::from_rank(x, enc.k, net.source_count(), enc.input_size),
            y: InputMatrix::from_rank(y, enc.k, net.source_count(), enc.input_size),
        },
    })
}

/// Completes the encoders with the decoder forced by the sink blocks;
/// unreachable blocks decode to `0^k`.
pub fn synthesize_decoder(enc: &CodeEncoders, net: &Network, f: &TargetFunction) -> Result<NetworkCode, CodeError> {
    enc.check(net)?;
    match sink_map(enc, net, f)? {
        Err((x, y)) => Err(CodeError::NoDecoder {
            x: InputMatrix::from_rank(x, enc.k, net.source_count(), enc.input_size),
            y: InputMatrix::from_rank(y, enc.k, net.source_count(), enc.input_size),
        }),
        Ok(map) => {
            let layout = Layout::new(net, enc.input_size, enc.n, enc.k)?;
            let mut decoder = vec![0; layout.decoder_len];
            for (sink, out) in map {
                decoder[sink] = out;
            }
            NetworkCode::new(net, enc.clone(), f.output_size(), decoder)
        }
    }
}

/// True iff `psi(x)` is a function of the symbols on the global cut `C`.
pub fn cut_determinism_check(code: &NetworkCode, net: &Network, cut: EdgeSet) -> Result<bool, CodeError> {
    let enc = &code.encoders;
    enc.check(net)?;
    if net.cut_analysis(cut)?.separated != net.all_sources() {
        return Err(CodeError::NotGlobalCut);
    }
    let s = net.source_count();
    let total = radix::checked_pow(enc.input_size, enc.k * s)
        .filter(|&t| t <= VERIFY_BUDGET)
        .ok_or(CodeError::VerifyBudget {
            q: enc.input_size,
            k: enc.k,
            s,
        })?;
    let eval = Evaluator::new(net, enc)?;
    let cut_edges = net.ordered_edges(cut);
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut values = vec![0; net.edge_count()];
    for rank in 0..total {
        let x = InputMatrix::from_rank(rank, enc.k, s, enc.input_size);
        let sink = eval.run(&column_ranks(&x, enc.input_size), &mut values);
        let out = code.decoder[sink];
        let key: Vec<usize> = cut_edges.iter().map(|e| values[e.0]).collect();
        if *seen.entry(key).or_insert(out) != out {
            return Ok(false);
        }
    }
    Ok(true)
}
