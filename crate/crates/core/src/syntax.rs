//! Shared plumbing for the line-based text formats.

use std::fmt;

use thiserror::Error;

/// A malformed line in one of the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} (at `{}`)", self.line, self.message, self.token)
    }
}

impl ParseError {
    pub fn new(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

/// A non-empty, comment-stripped line split on whitespace.
pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<&'a str>,
}

impl<'a> Line<'a> {
    pub fn keyword(&self) -> &'a str {
        self.tokens[0]
    }

    pub fn error(&self, token: &str, message: impl Into<String>) -> ParseError {
        ParseError::new(self.number, token, message)
    }

    /// Token `i`, or an error naming the keyword.
    pub fn arg(&self, i: usize) -> Result<&'a str, ParseError> {
        self.tokens
            .get(i)
            .copied()
            .ok_or_else(|| self.error(self.keyword(), format!("missing argument {i}")))
    }

    pub fn expect_len(&self, len: std::ops::RangeInclusive<usize>) -> Result<(), ParseError> {
        if !len.contains(&self.tokens.len()) {
            let token = self.tokens.last().copied().unwrap_or_default();
            return Err(self.error(
                token,
                format!("`{}` takes {} argument(s)", self.keyword(), format_range(&len)),
            ));
        }
        Ok(())
    }

    pub fn number(&self, i: usize) -> Result<usize, ParseError> {
        let token = self.arg(i)?;
        token
            .parse()
            .map_err(|_| self.error(token, "expected a non-negative integer"))
    }
}

fn format_range(len: &std::ops::RangeInclusive<usize>) -> String {
    let (lo, hi) = (len.start() - 1, len.end() - 1);
    if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}-{hi}")
    }
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
        })
    })
}
