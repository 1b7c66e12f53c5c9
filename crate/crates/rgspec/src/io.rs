//! Text graph files.
//!
//! Line 1 is `n m`; then `m` lines `u v` with `1 <= u < v <= n` in ascending
//! lexicographic order. Lines end with `\n`. The reader is strict: carriage
//! returns, blank lines, extra fields, duplicates and out-of-order edges are
//! all rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rgspec_core::Graph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn bad(line: usize, msg: impl Into<String>) -> GraphFileError {
    GraphFileError::Format {
        line,
        msg: msg.into(),
    }
}

/// Serializes `g` in the graph file format.
pub fn to_text(g: &Graph) -> String {
    let mut s = String::with_capacity(16 + 12 * g.edge_count() as usize);
    writeln!(s, "{} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(s, "{} {}", u + 1, v + 1).unwrap();
    }
    s
}

fn parse_pair(text: &str, line: usize) -> Result<(u64, u64), GraphFileError> {
    let mut it = text.split(' ');
    let a = it.next().unwrap_or("");
    let b = it.next().ok_or_else(|| bad(line, "expected two fields"))?;
    if it.next().is_some() {
        return Err(bad(line, "expected two fields"));
    }
    let num = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| bad(line, format!("not a non-negative integer: {s:?}")))
    };
    Ok((num(a)?, num(b)?))
}

/// Parses the graph file format.
pub fn from_text(text: &str) -> Result<Graph, GraphFileError> {
    if text.contains('\r') {
        return Err(bad(0, "carriage return found; only LF line endings are accepted"));
    }
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| bad(0, "file must end with a newline"))?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let (n, m) = parse_pair(header, 1)?;
    if n == 0 {
        return Err(bad(1, "n must be positive"));
    }
    let n = usize::try_from(n).map_err(|_| bad(1, "n too large"))?;
    let mut edges = Vec::new();
    let mut prev: Option<(u64, u64)> = None;
    for (i, l) in lines.enumerate() {
        let line = i + 2;
        let (u, v) = parse_pair(l, line)?;
        if u == 0 || v as usize > n {
            return Err(bad(line, format!("vertex out of range 1..={n}")));
        }
        if u >= v {
            return Err(bad(line, "edge must be written as u v with u < v"));
        }
        if let Some(p) = prev {
            if (u, v) == p {
                return Err(bad(line, "duplicate edge"));
            }
            if (u, v) < p {
                return Err(bad(line, "edges out of lexicographic order"));
            }
        }
        prev = Some((u, v));
        edges.push((u as usize - 1, v as usize - 1));
    }
    if edges.len() as u64 != m {
        return Err(bad(
            1,
            format!("header declares {m} edges, file has {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges).map_err(|e| bad(0, e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<Graph, GraphFileError> {
    let text = fs::read_to_string(path).map_err(|source| GraphFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_text(&text)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<(), GraphFileError> {
    fs::write(path, to_text(g)).map_err(|source| GraphFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let g = Graph::gnp(40, 0.3, 9).unwrap();
        let text = to_text(&g);
        let back = from_text(&text).unwrap();
        assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert_eq!(to_text(&back), text);
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            "3 1\n1 2",
            "3 1\r\n1 2\r\n",
            "3 2\n1 2\n1 2\n",
            "3 2\n2 3\n1 2\n",
            "3 1\n2 2\n",
            "3 1\n2 1\n",
            "3 1\n1 4\n",
            "3 2\n1 2\n",
            "3 1\n1 2 3\n",
            "0 0\n",
            "3 1\n\n",
            "3 1\n1  2\n",
        ];
        for c in cases {
            assert!(from_text(c).is_err(), "accepted {c:?}");
        }
        assert_eq!(from_text("1 0\n").unwrap().n(), 1);
    }
}
