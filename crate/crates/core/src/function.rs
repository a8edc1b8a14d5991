//! Target functions `f: A^s -> O` as dense truth tables.
//!
//! Alphabets are `0..q` and `0..m`. Row `(x_1, ..., x_s)` lives at index
//! `sum_j x_j q^(s-j)`, so printed tables read in argument order.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::radix;
use crate::syntax::{lines, ParseError};

/// Largest truth table the crate will build.
pub const MAX_TABLE_LEN: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctionError {
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("input alphabet must have at least 2 symbols, got {0}")]
    InputAlphabetTooSmall(usize),
    #[error("output alphabet must be non-empty")]
    EmptyOutputAlphabet,
    #[error("truth table of {input_size}^{arity} rows exceeds the table budget")]
    TooLarge { arity: usize, input_size: usize },
    #[error("table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("table entry {index} is {value}, outside the output alphabet of size {output_size}")]
    EntryOutOfRange {
        index: usize,
        value: usize,
        output_size: usize,
    },
    #[error("expected {expected} input symbols, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input symbol {symbol} outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetFunction {
    name: String,
    arity: usize,
    input_size: usize,
    output_size: usize,
    table: Vec<usize>,
}

/// Parameters of the builtin families; `None` picks the family default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub arity: Option<usize>,
    pub input_size: Option<usize>,
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "identity",
    "mod-sum",
    "arithmetic-sum",
    "product-plus-mod2",
    "max",
];

impl TargetFunction {
    pub fn from_table(
        name: impl Into<String>,
        arity: usize,
        input_size: usize,
        output_size: usize,
        table: Vec<usize>,
    ) -> Result<Self, FunctionError> {
        let expected = Self::table_len(arity, input_size)?;
        if output_size == 0 {
            return Err(FunctionError::EmptyOutputAlphabet);
        }
        if table.len() != expected {
            return Err(FunctionError::TableLength {
                expected,
                got: table.len(),
            });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= output_size) {
            return Err(FunctionError::EntryOutOfRange {
                index,
                value,
                output_size,
            });
        }
        Ok(Self {
            name: name.into(),
            arity,
            input_size,
            output_size,
            table,
        })
    }

    /// Tabulates `rule` over all rows in mixed-radix order.
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        input_size: usize,
        output_size: usize,
        rule: impl Fn(&[usize]) -> usize,
    ) -> Result<Self, FunctionError> {
        let len = Self::table_len(arity, input_size)?;
        let mut row = vec![0; arity];
        let mut table = Vec::with_capacity(len);
        for index in 0..len {
            radix::unrank_into(index, input_size, &mut row);
            table.push(rule(&row));
        }
        Self::from_table(name, arity, input_size, output_size, table)
    }

    fn table_len(arity: usize, input_size: usize) -> Result<usize, FunctionError> {
        if arity == 0 {
            return Err(FunctionError::ZeroArity);
        }
        if input_size < 2 {
            return Err(FunctionError::InputAlphabetTooSmall(input_size));
        }
        radix::checked_pow(input_size, arity)
            .filter(|&len| len <= MAX_TABLE_LEN)
            .ok_or(FunctionError::TooLarge { arity, input_size })
    }

    pub fn builtin(name: &str, params: BuiltinParams) -> Result<Self, FunctionError> {
        let invalid = |reason: &str| FunctionError::InvalidParams {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        match name {
            "identity" => {
                if params.arity.is_some_and(|s| s != 1) {
                    return Err(invalid("identity has arity 1"));
                }
                let q = params.input_size.unwrap_or(2);
                Self::from_fn(name, 1, q, q, |x| x[0])
            }
            "mod-sum" => {
                let (s, q) = (params.arity.unwrap_or(2), params.input_size.unwrap_or(2));
                Self::from_fn(name, s, q, q, |x| x.iter().sum::<usize>() % q)
            }
            "arithmetic-sum" => {
                let (s, q) = (params.arity.unwrap_or(3), params.input_size.unwrap_or(2));
                Self::from_fn(name, s, q, s * (q - 1) + 1, |x| x.iter().sum())
            }
            "product-plus-mod2" => {
                if params.arity.is_some_and(|s| s != 3) || params.input_size.is_some_and(|q| q != 2) {
                    return Err(invalid("product-plus-mod2 is fixed to arity 3 over {0,1}"));
                }
                Self::from_fn(name, 3, 2, 2, |x| (x[0] * x[1] + x[2]) % 2)
            }
            "max" => {
                let (s, q) = (params.arity.unwrap_or(2), params.input_size.unwrap_or(2));
                Self::from_fn(name, s, q, q, |x| x.iter().copied().max().unwrap_or(0))
            }
            other => Err(FunctionError::UnknownBuiltin(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Value at a mixed-radix row index.
    pub fn at(&self, index: usize) -> usize {
        self.table[index]
    }

    fn check_row(&self, row: &[usize]) -> Result<(), FunctionError> {
        if row.len() != self.arity {
            return Err(FunctionError::DimensionMismatch {
                expected: self.arity,
                got: row.len(),
            });
        }
        if let Some(&symbol) = row.iter().find(|&&x| x >= self.input_size) {
            return Err(FunctionError::SymbolOutOfRange {
                symbol,
                alphabet: self.input_size,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, row: &[usize]) -> Result<usize, FunctionError> {
        self.check_row(row)?;
        Ok(self.table[radix::rank(row, self.input_size)])
    }

    /// Row-wise application `f^(k)`.
    pub fn evaluate_block(&self, x: &InputMatrix) -> Result<Vec<usize>, FunctionError> {
        if x.cols() != self.arity {
            return Err(FunctionError::DimensionMismatch {
                expected: self.arity,
                got: x.cols(),
            });
        }
        x.rows_iter().map(|row| self.evaluate(row)).collect()
    }

    /// `f[A^s]`, ascending.
    pub fn image(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.table.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut name = String::new();
        let mut arity = None;
        let mut input_size = None;
        let mut output_size = None;
        let mut table: Option<(usize, Vec<usize>)> = None;
        let mut builtin: Option<(usize, String)> = None;
        for line in lines(text) {
            match line.keyword() {
                "function" => {
                    line.expect_len(2..=2)?;
                    name = line.arg(1)?.to_string();
                }
                "arity" => {
                    line.expect_len(2..=2)?;
                    arity = Some(line.number(1)?);
                }
                "input-alphabet" => {
                    line.expect_len(2..=2)?;
                    input_size = Some(line.number(1)?);
                }
                "output-alphabet" => {
                    line.expect_len(2..=2)?;
                    output_size = Some(line.number(1)?);
                }
                "table" => {
                    let entries = (1..line.tokens.len())
                        .map(|i| line.number(i))
                        .collect::<Result<Vec<_>, _>>()?;
                    table = Some((line.number, entries));
                }
                "builtin" => {
                    line.expect_len(2..=4)?;
                    let family = line.arg(1)?;
                    for token in &line.tokens[2..] {
                        let (key, value) = token
                            .split_once('=')
                            .ok_or_else(|| line.error(token, "expected key=value"))?;
                        let value: usize = value
                            .parse()
                            .map_err(|_| line.error(token, "expected a non-negative integer"))?;
                        match key {
                            "arity" => arity = Some(value),
                            "input-alphabet" => input_size = Some(value),
                            _ => return Err(line.error(token, "unknown parameter")),
                        }
                    }
                    builtin = Some((line.number, family.to_string()));
                }
                other => return Err(line.error(other, "unknown keyword")),
            }
        }
        match (builtin, table) {
            (Some((at, _)), Some(_)) => Err(ParseError::new(at, "builtin", "both `builtin` and `table` given")),
            (Some((at, family)), None) => {
                let mut f = Self::builtin(
                    &family,
                    BuiltinParams {
                        arity,
                        input_size,
                    },
                )
                .map_err(|e| ParseError::new(at, family.clone(), e.to_string()))?;
                if !name.is_empty() {
                    f.name = name;
                }
                if let Some(m) = output_size {
                    if m < f.output_size {
                        return Err(ParseError::new(at, m.to_string(), "output alphabet smaller than the builtin's"));
                    }
                    f.output_size = m;
                }
                Ok(f)
            }
            (None, Some((at, entries))) => {
                let missing = |what: &str| ParseError::new(at, "table", format!("`{what}` must precede the table"));
                let arity = arity.ok_or_else(|| missing("arity"))?;
                let q = input_size.ok_or_else(|| missing("input-alphabet"))?;
                let m = output_size.ok_or_else(|| missing("output-alphabet"))?;
                Self::from_table(name, arity, q, m, entries)
                    .map_err(|e| ParseError::new(at, "table", e.to_string()))
            }
            (None, None) => Err(ParseError::new(0, "table", "missing `table` or `builtin` line")),
        }
    }

    /// Canonical table form; parses back to an identical function.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "function {}", self.name);
        let _ = writeln!(out, "arity {}", self.arity);
        let _ = writeln!(out, "input-alphabet {}", self.input_size);
        let _ = writeln!(out, "output-alphabet {}", self.output_size);
        out.push_str("table");
        for v in &self.table {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        out
    }
}

/// A `k x s` block of source symbols; column `j` is what source `j` sees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<usize>,
}

impl InputMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<usize>) -> Result<Self, FunctionError> {
        if rows == 0 || entries.len() != rows * cols {
            return Err(FunctionError::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, FunctionError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(FunctionError::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Parses `"1 1 0; 0 1 1"` (rows separated by `;`).
    pub fn parse(text: &str) -> Result<Self, String> {
        let rows = text
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| format!("bad symbol `{t}`")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(&rows).map_err(|e| e.to_string())
    }

    /// Decodes the row-major rank of a `rows x cols` matrix over `0..q`.
    pub fn from_rank(rank: usize, rows: usize, cols: usize, q: usize) -> Self {
        Self {
            rows,
            cols,
            entries: radix::unrank(rank, q, rows * cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.chunks(self.cols.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn check_alphabet(&self, q: usize) -> Result<(), FunctionError> {
        match self.entries.iter().find(|&&x| x >= q) {
            Some(&symbol) => Err(FunctionError::SymbolOutOfRange {
                symbol,
                alphabet: q,
            }),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for InputMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, row) in self.rows_iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            f.write_str(&cells.join(" "))?;
        }
        Ok(())
    }
}
