//! Line-based network format.
//!
//! ```text
//! network n1
//! edge-alphabet 2
//! node v
//! source 1
//! sink rho
//! edge e1 1 v
//! edge f 1 1' inf
//! ```
//!
//! `source` and `sink` declare their node if it is new; edge endpoints must
//! already be declared. Sources are numbered in order of appearance.

use std::fmt::Write;

use super::{NetworkDesc, NetworkError};
use crate::syntax::{lines, ParseError};

impl NetworkDesc {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut desc = NetworkDesc::new("", 0);
        let mut saw_alphabet = false;
        for line in lines(text) {
            match line.keyword() {
                "network" => {
                    line.expect_len(2..=2)?;
                    desc.name = line.arg(1)?.to_string();
                }
                "edge-alphabet" => {
                    line.expect_len(2..=2)?;
                    desc.edge_alphabet = line.number(1)?;
                    if desc.edge_alphabet < 2 {
                        return Err(line.error(line.arg(1)?, "edge alphabet must have at least 2 symbols"));
                    }
                    saw_alphabet = true;
                }
                "node" => {
                    line.expect_len(2..=2)?;
                    let name = line.arg(1)?;
                    desc.add_node(name)
                        .map_err(|e| line.error(name, e.to_string()))?;
                }
                "source" => {
                    line.expect_len(2..=2)?;
                    let name = line.arg(1)?;
                    if desc.node_id(name).is_some_and(|id| desc.sources.contains(&id)) {
                        return Err(line.error(name, "source listed twice"));
                    }
                    desc.add_source(name);
                }
                "sink" => {
                    line.expect_len(2..=2)?;
                    if desc.sink.is_some() {
                        return Err(line.error(line.arg(1)?, "sink declared twice"));
                    }
                    desc.set_sink(line.arg(1)?);
                }
                "edge" => {
                    line.expect_len(4..=5)?;
                    let infinite = match line.tokens.get(4) {
                        None => false,
                        Some(&"inf") => true,
                        Some(other) => return Err(line.error(other, "expected `inf`")),
                    };
                    let (name, tail, head) = (line.arg(1)?, line.arg(2)?, line.arg(3)?);
                    desc.add_edge(name, tail, head, infinite).map_err(|e| {
                        let token = match &e {
                            NetworkError::UnknownNode(n) => n.clone(),
                            _ => name.to_string(),
                        };
                        line.error(&token, e.to_string())
                    })?;
                }
                other => return Err(line.error(other, "unknown keyword")),
            }
        }
        if !saw_alphabet {
            return Err(ParseError::new(0, "edge-alphabet", "missing `edge-alphabet` line"));
        }
        Ok(desc)
    }

    /// Canonical text form; [`NetworkDesc::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "network {}", self.name);
        let _ = writeln!(out, "edge-alphabet {}", self.edge_alphabet);
        for name in &self.nodes {
            let _ = writeln!(out, "node {name}");
        }
        for s in &self.sources {
            let _ = writeln!(out, "source {}", self.nodes[s.0]);
        }
        if let Some(t) = self.sink {
            let _ = writeln!(out, "sink {}", self.nodes[t.0]);
        }
        for e in &self.edges {
            let _ = write!(
                out,
                "edge {} {} {}",
                e.name, self.nodes[e.tail.0], self.nodes[e.head.0]
            );
            if e.infinite {
                out.push_str(" inf");
            }
            out.push('\n');
        }
        out
    }
}
