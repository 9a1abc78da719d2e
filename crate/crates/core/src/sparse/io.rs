//! Text formats for graphs and signals.
//!
//! Edge list: one `i j [w]` per line, 0-based, whitespace separated, `#`
//! starts a comment. A comment token of the form `n=<count>` fixes the node
//! count; otherwise it is `1 + max index`.
//!
//! Matrix Market: `coordinate` with `real`, `integer` or `pattern` field and
//! `symmetric` symmetry, 1-based. Off-diagonal entries are adjacency weights;
//! diagonal entries are ignored.
//!
//! Signals: one value per line, or a spec string `dirac:<node>`,
//! `normal:<seed>`, `const:<value>`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::{Edge, GraphSignal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
}

impl GraphFormat {
    /// `.mtx` files are Matrix Market, everything else an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn load_graph(path: &Path, format: GraphFormat) -> Result<(Vec<Edge>, usize)> {
    let text = std::fs::read_to_string(path)?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text, path),
        GraphFormat::MatrixMarket => parse_matrix_market(&text, path),
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses edge-list text; `origin` is only used in error messages.
pub fn parse_edge_list(text: &str, origin: &Path) -> Result<(Vec<Edge>, usize)> {
    let mut edges = Vec::new();
    let mut declared_n = None;
    let mut max_idx: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (data, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(comment) = comment {
            for tok in comment.split_whitespace() {
                if let Some(v) = tok.strip_prefix("n=") {
                    let n = v
                        .parse::<usize>()
                        .map_err(|_| parse_err(origin, lineno, format!("bad node count `{v}`")))?;
                    declared_n = Some(n);
                }
            }
        }
        let fields: Vec<&str> = data.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                origin,
                lineno,
                format!("expected `i j [w]`, got {} fields", fields.len()),
            ));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(origin, lineno, format!("bad node index `{s}`")))
        };
        let i = idx(fields[0])?;
        let j = idx(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| parse_err(origin, lineno, format!("bad weight `{s}`")))?,
            None => 1.0,
        };
        max_idx = Some(max_idx.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j, w));
    }
    let inferred = max_idx.map_or(0, |m| m + 1);
    let n = match declared_n {
        Some(n) if n < inferred => {
            return Err(Error::IndexOutOfRange {
                index: inferred - 1,
                n,
            })
        }
        Some(n) => n,
        None => inferred,
    };
    Ok((edges, n))
}

fn parse_matrix_market(text: &str, origin: &Path) -> Result<(Vec<Edge>, usize)> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "empty file"))?;
    let banner_fields: Vec<String> = banner
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if banner_fields.len() != 5
        || banner_fields[0] != "%%matrixmarket"
        || banner_fields[1] != "matrix"
    {
        return Err(parse_err(origin, 1, "missing %%MatrixMarket matrix banner"));
    }
    if banner_fields[2] != "coordinate" {
        return Err(parse_err(origin, 1, "only coordinate format is supported"));
    }
    let pattern = match banner_fields[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(parse_err(origin, 1, format!("unsupported field `{other}`"))),
    };
    if banner_fields[4] != "symmetric" {
        return Err(parse_err(
            origin,
            1,
            "only symmetric matrices are supported",
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = 0usize;
    for (lineno, raw) in lines {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((n, nnz)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(origin, lineno, "expected `rows cols entries`"));
            }
            let parsed: Vec<usize> = fields
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(origin, lineno, "bad size line"))?;
            if parsed[0] != parsed[1] {
                return Err(parse_err(origin, lineno, "matrix is not square"));
            }
            size = Some((parsed[0], parsed[2]));
            continue;
        };
        let want = if pattern { 2 } else { 3 };
        if fields.len() != want {
            return Err(parse_err(
                origin,
                lineno,
                format!("expected {want} fields, got {}", fields.len()),
            ));
        }
        let idx = |s: &str| -> Result<usize> {
            let v = s
                .parse::<usize>()
                .map_err(|_| parse_err(origin, lineno, format!("bad index `{s}`")))?;
            if v == 0 || v > n {
                return Err(parse_err(
                    origin,
                    lineno,
                    format!("index {v} outside 1..={n}"),
                ));
            }
            Ok(v - 1)
        };
        let i = idx(fields[0])?;
        let j = idx(fields[1])?;
        let w = if pattern {
            1.0
        } else {
            fields[2]
                .parse::<f64>()
                .map_err(|_| parse_err(origin, lineno, format!("bad value `{}`", fields[2])))?
        };
        seen += 1;
        if seen > nnz {
            return Err(parse_err(origin, lineno, "more entries than declared"));
        }
        if i != j {
            edges.push((i, j, w));
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(origin, 1, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            origin,
            text.lines().count(),
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    Ok((edges, n))
}

/// Writes an edge list, preceded by `#` comment lines. A `n=<count>` token is
/// always emitted so isolated trailing nodes survive a round trip.
pub fn write_edge_list<W: Write>(
    mut out: W,
    edges: &[Edge],
    n: usize,
    comments: &[String],
) -> Result<()> {
    let mut buf = String::new();
    for c in comments {
        writeln!(buf, "# {c}").unwrap();
    }
    writeln!(buf, "# n={n}").unwrap();
    for &(i, j, w) in edges {
        if w == 1.0 {
            writeln!(buf, "{i} {j}").unwrap();
        } else {
            writeln!(buf, "{i} {j} {w}").unwrap();
        }
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Resolves a signal from a spec string or a one-value-per-line file.
pub fn load_signal(spec: &str, n: usize) -> Result<GraphSignal> {
    let arg_err = |msg: String| Error::InvalidArgument(msg);
    if let Some(rest) = spec.strip_prefix("dirac:") {
        let node = rest
            .parse::<usize>()
            .map_err(|_| arg_err(format!("bad dirac node `{rest}`")))?;
        return GraphSignal::dirac(n, node);
    }
    if let Some(rest) = spec.strip_prefix("normal:") {
        let seed = rest
            .parse::<u64>()
            .map_err(|_| arg_err(format!("bad normal seed `{rest}`")))?;
        return Ok(GraphSignal::standard_normal(n, seed));
    }
    if let Some(rest) = spec.strip_prefix("const:") {
        let v = rest
            .parse::<f64>()
            .map_err(|_| arg_err(format!("bad constant `{rest}`")))?;
        return Ok(GraphSignal::constant(n, v));
    }

    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(n);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .parse::<f64>()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad value `{line}`")))?;
        values.push(v);
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: values.len(),
        });
    }
    Ok(GraphSignal::new(values))
}
