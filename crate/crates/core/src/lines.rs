//! Line cursor shared by the text model formats.

use crate::error::{Error, Result};

pub(crate) struct Lines<'a> {
    lines: Vec<&'a str>,
    pub(crate) pos: usize,
    origin: &'a str,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str, origin: &'a str) -> Self {
        Lines {
            lines: text.lines().collect(),
            pos: 0,
            origin,
        }
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.origin, self.pos.max(1), msg)
    }

    pub(crate) fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    pub(crate) fn next(&mut self) -> Result<&'a str> {
        let line = self.peek().ok_or_else(|| self.err("unexpected end of model file"))?;
        self.pos += 1;
        Ok(line)
    }

    pub(crate) fn expect(&mut self, want: &str) -> Result<()> {
        let got = self.next()?;
        if got != want {
            return Err(self.err(format!("expected {want:?}, found {got:?}")));
        }
        Ok(())
    }

    pub(crate) fn key_value(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| self.err(format!("expected `{key}=...`, found {line:?}")))
    }

    pub(crate) fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.key_value(key)?;
        v.parse()
            .map_err(|_| self.err(format!("bad value for {key}: {v:?}")))
    }
}

pub(crate) fn split_labels(v: &str) -> Vec<String> {
    if v.is_empty() {
        Vec::new()
    } else {
        v.split('\t').map(str::to_string).collect()
    }
}
