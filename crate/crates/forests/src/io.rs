//! Reading and writing graphs.
//!
//! Two formats: the compact graph6 line format (printable bytes 63..126,
//! header encoding n, then the upper triangle column by column, six bits to
//! a byte, most significant bit first) and a plain edge list with a
//! mandatory "n m" header. Detection is trivial: an edge list starts with a
//! digit, a graph6 line never can (digits are below byte 63).

use crate::graph::Graph;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed graph6: {0}")]
    MalformedGraph6(String),
    #[error("malformed edge list: {0}")]
    MalformedEdgeList(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Graph6,
    EdgeList,
}

#[derive(Debug, Clone)]
pub struct GraphDocument {
    pub graph: Graph,
    pub source_format: SourceFormat,
    pub label: String,
}

impl GraphDocument {
    /// Parses either format, deciding by the first significant byte.
    pub fn from_text(text: &str, label: &str) -> Result<GraphDocument, FormatError> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'));
        let looks_like_edgelist = matches!(first, Some(l) if l.starts_with(|c: char| c.is_ascii_digit()));
        let (graph, source_format) = if looks_like_edgelist {
            (parse_edgelist(text)?, SourceFormat::EdgeList)
        } else {
            (parse_graph6(text)?, SourceFormat::Graph6)
        };
        Ok(GraphDocument {
            graph,
            source_format,
            label: label.to_string(),
        })
    }
}

const G6_MIN: u8 = 63;
const G6_MAX: u8 = 126;
const G6_LONG_MAX: usize = 258_047;

/// Upper-triangle pair order shared by parser and writer:
/// (0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...
fn triangle_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(move |v| (0..v).map(move |u| (u, v)))
}

pub fn parse_graph6(input: &str) -> Result<Graph, FormatError> {
    let line = input.trim_end_matches(['\n', '\r']);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(FormatError::MalformedGraph6("empty input".into()));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(G6_MIN..=G6_MAX).contains(&b)) {
        return Err(FormatError::MalformedGraph6(format!(
            "byte {b} outside printable range 63..126"
        )));
    }
    let (n, body) = if bytes[0] == b'~' {
        if bytes.len() >= 2 && bytes[1] == b'~' {
            return Err(FormatError::Unsupported(
                "8-byte size header (n > 258047)".into(),
            ));
        }
        if bytes.len() < 4 {
            return Err(FormatError::MalformedGraph6(
                "truncated long size header".into(),
            ));
        }
        let n = ((bytes[1] - G6_MIN) as usize) << 12
            | ((bytes[2] - G6_MIN) as usize) << 6
            | (bytes[3] - G6_MIN) as usize;
        (n, &bytes[4..])
    } else {
        ((bytes[0] - G6_MIN) as usize, &bytes[1..])
    };
    let bit_count = n.saturating_sub(1) * n / 2;
    let expected = bit_count.div_ceil(6);
    if body.len() != expected {
        return Err(FormatError::MalformedGraph6(format!(
            "body has {} bytes, expected {expected} for n={n}",
            body.len()
        )));
    }
    let bit = |k: usize| -> bool {
        let byte = (body[k / 6] - G6_MIN) as usize;
        byte >> (5 - k % 6) & 1 == 1
    };
    // Padding bits past the triangle must be zero in a canonical encoding.
    for k in bit_count..expected * 6 {
        if bit(k) {
            return Err(FormatError::MalformedGraph6(
                "nonzero padding bits".into(),
            ));
        }
    }
    let mut edges = Vec::new();
    for (k, (u, v)) in triangle_pairs(n).enumerate() {
        if bit(k) {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges)
        .map_err(|e| FormatError::MalformedGraph6(format!("invalid edge set: {e}")))
}

pub fn serialize_graph6(g: &Graph) -> Result<String, FormatError> {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(G6_MIN + n as u8);
    } else if n <= G6_LONG_MAX {
        out.push(b'~');
        out.push(G6_MIN + (n >> 12) as u8);
        out.push(G6_MIN + (n >> 6 & 63) as u8);
        out.push(G6_MIN + (n & 63) as u8);
    } else {
        return Err(FormatError::Unsupported(format!(
            "n={n} exceeds the 3-byte size header"
        )));
    }
    let mut acc: u8 = 0;
    let mut filled = 0;
    for (u, v) in triangle_pairs(n) {
        acc = acc << 1 | u8::from(g.has_edge(u, v));
        filled += 1;
        if filled == 6 {
            out.push(G6_MIN + acc);
            acc = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push(G6_MIN + (acc << (6 - filled)));
    }
    Ok(String::from_utf8(out).unwrap())
}

pub fn parse_edgelist(input: &str) -> Result<Graph, FormatError> {
    let bad = |msg: String| FormatError::MalformedEdgeList(msg);
    let mut rows = input.lines().filter_map(|line| {
        let data = line.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            None
        } else {
            Some(data)
        }
    });
    let header = rows.next().ok_or_else(|| bad("missing n m header".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(format!("bad header line {header:?}")))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(format!("bad header line {header:?}")))?;
    if it.next().is_some() {
        return Err(bad(format!("trailing tokens in header {header:?}")));
    }
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for row in rows {
        let mut it = row.split_whitespace();
        let (u, v): (usize, usize) = match (
            it.next().and_then(|t| t.parse().ok()),
            it.next().and_then(|t| t.parse().ok()),
            it.next(),
        ) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(bad(format!("bad edge line {row:?}"))),
        };
        if u == v {
            return Err(bad(format!("self-loop at vertex {u}")));
        }
        if u >= n || v >= n {
            return Err(bad(format!("edge ({u},{v}) out of range for n={n}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(bad(format!("duplicate edge ({u},{v})")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(bad(format!(
            "header claims {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges).map_err(|e| bad(e.to_string()))
}

pub fn serialize_edgelist(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
