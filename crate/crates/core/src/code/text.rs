//! Code file format.
//!
//! ```text
//! code n 1 k 2
//! enc e1 0 0 1 1
//! dec 0:0 0:1 ...
//! ```
//!
//! One `enc` line per finite edge (written in edge order), entries in
//! mixed-radix order of the table's domain. A block of several symbols is
//! written `a:b:c`. Infinite edges take no line.

use std::fmt::Write;

use super::{CodeEncoders, Layout, NetworkCode};
use crate::function::TargetFunction;
use crate::network::Network;
use crate::radix;
use crate::syntax::{lines, Line, ParseError};

fn parse_block(line: &Line, token: &str, len: usize, base: usize) -> Result<usize, ParseError> {
    let parts: Vec<&str> = token.split(':').collect();
    if parts.len() != len {
        return Err(line.error(token, format!("expected {len} symbol(s) joined by `:`")));
    }
    let mut digits = Vec::with_capacity(len);
    for p in parts {
        let d: usize = p
            .parse()
            .map_err(|_| line.error(token, "expected non-negative integers"))?;
        if d >= base {
            return Err(line.error(token, format!("symbol {d} outside an alphabet of size {base}")));
        }
        digits.push(d);
    }
    Ok(radix::rank(&digits, base))
}

fn write_block(out: &mut String, rank: usize, len: usize, base: usize) {
    let digits: Vec<String> = radix::unrank(rank, base, len).iter().map(usize::to_string).collect();
    out.push(' ');
    out.push_str(&digits.join(":"));
}

impl NetworkCode {
    /// Reads a code for `net` computing a function shaped like `f`.
    pub fn parse(text: &str, net: &Network, f: &TargetFunction) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut tables: Vec<Option<Vec<usize>>> = vec![None; net.edge_count()];
        let mut decoder: Option<(usize, Vec<usize>)> = None;
        let b = net.edge_alphabet();
        for line in lines(text) {
            match line.keyword() {
                "code" => {
                    line.expect_len(5..=5)?;
                    for (i, key) in [(1, "n"), (3, "k")] {
                        if line.arg(i)? != key {
                            return Err(line.error(line.arg(i)?, format!("expected `{key}`")));
                        }
                    }
                    let (n, k) = (line.number(2)?, line.number(4)?);
                    if n == 0 {
                        return Err(line.error(line.arg(2)?, "n must be positive"));
                    }
                    if k == 0 {
                        return Err(line.error(line.arg(4)?, "k must be positive"));
                    }
                    header = Some((line.number, n, k));
                }
                "enc" => {
                    let (_, n, _) = header.ok_or_else(|| line.error("enc", "`code` header must come first"))?;
                    line.expect_len(2..=usize::MAX)?;
                    let name = line.arg(1)?;
                    let e = net.edge_id(name).map_err(|e| line.error(name, e.to_string()))?;
                    if net.edge(e).infinite {
                        return Err(line.error(name, "infinite edges carry the raw source column and take no table"));
                    }
                    if tables[e.0].is_some() {
                        return Err(line.error(name, "edge encoded twice"));
                    }
                    let entries = line.tokens[2..]
                        .iter()
                        .map(|t| parse_block(&line, t, n, b))
                        .collect::<Result<Vec<_>, _>>()?;
                    tables[e.0] = Some(entries);
                }
                "dec" => {
                    let (_, _, k) = header.ok_or_else(|| line.error("dec", "`code` header must come first"))?;
                    if decoder.is_some() {
                        return Err(line.error("dec", "decoder given twice"));
                    }
                    let entries = line.tokens[1..]
                        .iter()
                        .map(|t| parse_block(&line, t, k, f.output_size()))
                        .collect::<Result<Vec<_>, _>>()?;
                    decoder = Some((line.number, entries));
                }
                other => return Err(line.error(other, "unknown keyword")),
            }
        }
        let (at, n, k) = header.ok_or_else(|| ParseError::new(0, "code", "missing `code n N k K` header"))?;
        if let Some(e) = (0..net.edge_count()).find(|&i| !net.edge(crate::sets::EdgeId(i)).infinite && tables[i].is_none()) {
            let name = &net.edge(crate::sets::EdgeId(e)).name;
            return Err(ParseError::new(at, name.clone(), format!("no `enc` line for edge `{name}`")));
        }
        let (dec_at, decoder) = decoder.ok_or_else(|| ParseError::new(at, "dec", "missing `dec` line"))?;
        let encoders = CodeEncoders::new(net, f.input_size(), n, k, tables)
            .map_err(|e| ParseError::new(at, "enc", e.to_string()))?;
        NetworkCode::new(net, encoders, f.output_size(), decoder).map_err(|e| ParseError::new(dec_at, "dec", e.to_string()))
    }

    pub fn to_text(&self, net: &Network) -> String {
        let (n, k) = (self.n(), self.k());
        let b = net.edge_alphabet();
        let mut out = String::new();
        let _ = writeln!(out, "code n {n} k {k}");
        for &e in net.edge_order() {
            let Some(table) = self.table(e) else { continue };
            let _ = write!(out, "enc {}", net.edge(e).name);
            for &v in table {
                write_block(&mut out, v, n, b);
            }
            out.push('\n');
        }
        out.push_str("dec");
        for &v in self.decoder() {
            write_block(&mut out, v, k, self.output_size());
        }
        out.push('\n');
        out
    }
}

/// Table lengths for a code skeleton, used by the CLI to describe shapes.
pub fn table_lengths(net: &Network, q: usize, n: usize, k: usize) -> Result<(Vec<usize>, usize), super::CodeError> {
    let layout = Layout::new(net, q, n, k)?;
    Ok((layout.table_len, layout.decoder_len))
}
