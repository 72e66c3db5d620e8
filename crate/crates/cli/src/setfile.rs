//! Set files: one header line `# sidon-set key=value ...`, then one
//! decimal integer per line in ascending order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use sidon_core::BigUint;

pub const HEADER_TAG: &str = "# sidon-set";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetFile {
    /// Header fields; `count` is filled in on write.
    pub header: BTreeMap<String, String>,
    pub elements: Vec<BigUint>,
}

impl SetFile {
    pub fn new(elements: Vec<BigUint>) -> Self {
        SetFile { header: BTreeMap::new(), elements }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.header.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn is_ascending(&self) -> bool {
        self.elements.windows(2).all(|w| w[0] < w[1])
    }

    pub fn header_line(&self) -> String {
        let mut line = String::from(HEADER_TAG);
        let count = self.elements.len().to_string();
        for (k, v) in self.header.iter().filter(|(k, _)| *k != "count") {
            let _ = write!(line, " {k}={v}");
        }
        let _ = write!(line, " count={count}");
        line
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.header_line())?;
        for e in &self.elements {
            writeln!(w, "{e}")?;
        }
        w.flush()
    }

    /// Reads a set file. The header is optional so hand-written lists can be
    /// verified; element order is not enforced here.
    pub fn read_from(r: impl BufRead) -> Result<Self, FormatError> {
        let mut out = SetFile::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let n = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                if n != 1 {
                    return Err(FormatError::Malformed { line: n, msg: "header must be the first line".into() });
                }
                let rest = rest.trim_start();
                let fields = rest
                    .strip_prefix("sidon-set")
                    .ok_or_else(|| FormatError::Malformed { line: n, msg: "expected `# sidon-set`".into() })?;
                for kv in fields.split_whitespace() {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| FormatError::Malformed { line: n, msg: format!("bad header field `{kv}`") })?;
                    out.header.insert(k.to_owned(), v.to_owned());
                }
                continue;
            }
            let v = t
                .parse::<BigUint>()
                .map_err(|_| FormatError::Malformed { line: n, msg: format!("not a non-negative integer: `{t}`") })?;
            out.elements.push(v);
        }
        if let Some(c) = out.header.get("count") {
            if c.parse::<usize>().ok() != Some(out.elements.len()) {
                return Err(FormatError::Malformed {
                    line: 1,
                    msg: format!("header count {c} but {} elements", out.elements.len()),
                });
            }
        }
        Ok(out)
    }

    pub fn read_path(path: &std::path::Path) -> Result<Self, FormatError> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }

    pub fn write_path(&self, path: &std::path::Path) -> std::io::Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }
}
