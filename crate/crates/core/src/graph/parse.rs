use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use super::{Graph, GraphError, Labels, VertexId};

/// Supported edge-list encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// `#` comments then whitespace separated `u v` pairs (SNAP collection).
    Snap,
    /// Matrix Market `coordinate` file; values, if any, are ignored.
    Mtx,
    /// DIMACS `p edge n m` header with `e u v` lines.
    Dimacs,
}

impl FromStr for Format {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "snap" | "tsv" | "txt" => Ok(Format::Snap),
            "mtx" | "mm" => Ok(Format::Mtx),
            "dimacs" | "col" | "clq" => Ok(Format::Dimacs),
            other => Err(GraphError::UnknownFormat(other.to_string())),
        }
    }
}

impl Format {
    /// Guess from the file extension, defaulting to SNAP.
    pub fn from_path(path: &Path) -> Format {
        path.extension()
            .and_then(|e| e.to_str())
            .and_then(|e| e.parse().ok())
            .unwrap_or(Format::Snap)
    }
}

/// What ingestion normalized away.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseSummary {
    pub self_loops: usize,
    /// Duplicate or reverse-direction copies of an edge already seen.
    pub redundant_edges: usize,
    /// Lines whose weight or value columns were ignored.
    pub weights_ignored: usize,
}

#[derive(Debug)]
pub struct Parsed {
    pub graph: Graph,
    pub summary: ParseSummary,
}

/// Reads a simple undirected graph from `reader`.
///
/// Directed inputs are symmetrized; self-loops and duplicate edges are
/// dropped and counted in the returned summary.
pub fn parse_edge_list<R: BufRead>(reader: R, format: Format) -> Result<Parsed, GraphError> {
    let parsed = match format {
        Format::Snap => parse_snap(reader)?,
        Format::Mtx => parse_mtx(reader)?,
        Format::Dimacs => parse_dimacs(reader)?,
    };
    let s = &parsed.summary;
    if s.weights_ignored > 0 {
        log::warn!(
            "ignored weights on {} lines: only unweighted cliques are supported",
            s.weights_ignored
        );
    }
    if s.self_loops + s.redundant_edges > 0 {
        log::info!(
            "dropped {} self-loops and {} redundant edges",
            s.self_loops,
            s.redundant_edges
        );
    }
    Ok(parsed)
}

/// Writes `graph` as a SNAP edge list using original labels.
///
/// Isolated vertices have no edge line and do not survive a round trip.
pub fn write_snap<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# Undirected graph")?;
    writeln!(out, "# Nodes: {} Edges: {}", graph.n(), graph.m())?;
    for (u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}

fn parse_error(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

/// Assigns dense ids in first-appearance order. Starts out numeric and
/// falls back to text labels on the first token that is not a canonical
/// unsigned integer.
enum Interner {
    Numeric { ids: HashMap<u64, VertexId>, labels: Vec<u64> },
    Text { ids: HashMap<String, VertexId>, labels: Vec<String> },
}

impl Interner {
    fn new() -> Self {
        Interner::Numeric { ids: HashMap::new(), labels: Vec::new() }
    }

    fn len(&self) -> usize {
        match self {
            Interner::Numeric { labels, .. } => labels.len(),
            Interner::Text { labels, .. } => labels.len(),
        }
    }

    fn intern(&mut self, token: &str) -> Result<VertexId, GraphError> {
        let next = self.len();
        if next > VertexId::MAX as usize {
            return Err(GraphError::TooManyVertices(next as u64 + 1));
        }
        let next = next as VertexId;
        if let Interner::Numeric { ids, labels } = self {
            match canonical_u64(token) {
                Some(value) => {
                    return Ok(*ids.entry(value).or_insert_with(|| {
                        labels.push(value);
                        next
                    }));
                }
                None => {
                    let labels: Vec<String> = labels.iter().map(u64::to_string).collect();
                    let ids = labels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| (l.clone(), i as VertexId))
                        .collect();
                    *self = Interner::Text { ids, labels };
                }
            }
        }
        match self {
            Interner::Text { ids, labels } => {
                if let Some(&id) = ids.get(token) {
                    return Ok(id);
                }
                ids.insert(token.to_string(), next);
                labels.push(token.to_string());
                Ok(next)
            }
            Interner::Numeric { .. } => unreachable!(),
        }
    }

    fn into_labels(self) -> Labels {
        match self {
            Interner::Numeric { labels, .. } => Labels::Numeric(labels),
            Interner::Text { labels, .. } => Labels::Text(labels),
        }
    }
}

/// Parses tokens such as `17` but not `017` or `+17`, so that numeric
/// labels print back exactly as they were read.
fn canonical_u64(token: &str) -> Option<u64> {
    let bytes = token.as_bytes();
    if bytes.is_empty() || !bytes.iter().all(u8::is_ascii_digit) {
        return None;
    }
    if bytes.len() > 1 && bytes[0] == b'0' {
        return None;
    }
    token.parse().ok()
}

/// Iterates non-empty lines with 1-based line numbers, reusing one buffer.
fn for_each_line<R: BufRead>(
    mut reader: R,
    mut f: impl FnMut(usize, &str) -> Result<(), GraphError>,
) -> Result<(), GraphError> {
    let mut buf = String::new();
    let mut lineno = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            return Ok(());
        }
        lineno += 1;
        let line = buf.trim();
        if !line.is_empty() {
            f(lineno, line)?;
        }
    }
}

fn finish(n: usize, edges: Vec<(VertexId, VertexId)>, labels: Labels, weights: usize) -> Parsed {
    let (graph, self_loops, redundant_edges) = Graph::build(n, edges);
    Parsed {
        graph: graph.with_labels(labels),
        summary: ParseSummary { self_loops, redundant_edges, weights_ignored: weights },
    }
}

fn parse_snap<R: BufRead>(reader: R) -> Result<Parsed, GraphError> {
    let mut interner = Interner::new();
    let mut edges = Vec::new();
    let mut weights = 0;
    for_each_line(reader, |lineno, line| {
        if line.starts_with('#') || line.starts_with('%') {
            return Ok(());
        }
        let mut tokens = line.split_ascii_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(parse_error(lineno, "expected `u v`"));
        };
        if tokens.next().is_some() {
            weights += 1;
        }
        let u = interner.intern(a)?;
        let v = interner.intern(b)?;
        edges.push((u, v));
        Ok(())
    })?;
    if interner.len() == 0 {
        return Err(GraphError::EmptyInput);
    }
    Ok(finish(interner.len(), edges, interner.into_labels(), weights))
}

fn parse_index(token: Option<&str>, lineno: usize, what: &str) -> Result<u64, GraphError> {
    let token = token.ok_or_else(|| parse_error(lineno, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_error(lineno, format!("invalid {what} `{token}`")))
}

fn vertex_count(n: u64) -> Result<usize, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyInput);
    }
    if n > VertexId::MAX as u64 {
        return Err(GraphError::TooManyVertices(n));
    }
    Ok(n as usize)
}

/// Converts a 1-based file index into an internal index.
fn one_based(index: u64, n: usize, lineno: usize) -> Result<VertexId, GraphError> {
    if index == 0 || index > n as u64 {
        return Err(parse_error(lineno, format!("vertex {index} outside 1..={n}")));
    }
    Ok((index - 1) as VertexId)
}

fn parse_mtx<R: BufRead>(reader: R) -> Result<Parsed, GraphError> {
    let mut n: Option<usize> = None;
    let mut pattern = true;
    let mut seen_banner = false;
    let mut edges = Vec::new();
    let mut weights = 0;
    for_each_line(reader, |lineno, line| {
        if !seen_banner {
            let banner = line.to_ascii_lowercase();
            let fields: Vec<&str> = banner.split_ascii_whitespace().collect();
            if fields.first() != Some(&"%%matrixmarket") || fields.len() < 4 {
                return Err(parse_error(lineno, "missing %%MatrixMarket banner"));
            }
            if fields[1] != "matrix" || fields[2] != "coordinate" {
                return Err(parse_error(lineno, "only `matrix coordinate` files are supported"));
            }
            pattern = fields[3] == "pattern";
            seen_banner = true;
            return Ok(());
        }
        if line.starts_with('%') {
            return Ok(());
        }
        let mut tokens = line.split_ascii_whitespace();
        match n {
            None => {
                let rows = parse_index(tokens.next(), lineno, "row count")?;
                let cols = parse_index(tokens.next(), lineno, "column count")?;
                parse_index(tokens.next(), lineno, "entry count")?;
                if rows != cols {
                    return Err(parse_error(lineno, "adjacency matrix must be square"));
                }
                n = Some(vertex_count(rows)?);
            }
            Some(n) => {
                let i = one_based(parse_index(tokens.next(), lineno, "row")?, n, lineno)?;
                let j = one_based(parse_index(tokens.next(), lineno, "column")?, n, lineno)?;
                if !pattern || tokens.next().is_some() {
                    weights += 1;
                }
                edges.push((i, j));
            }
        }
        Ok(())
    })?;
    let n = n.ok_or(GraphError::EmptyInput)?;
    Ok(finish(n, edges, Labels::Numeric((1..=n as u64).collect()), weights))
}

fn parse_dimacs<R: BufRead>(reader: R) -> Result<Parsed, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut weights = 0;
    for_each_line(reader, |lineno, line| {
        let mut tokens = line.split_ascii_whitespace();
        match tokens.next() {
            Some("c") => {}
            Some("p") => {
                if n.is_some() {
                    return Err(parse_error(lineno, "duplicate problem line"));
                }
                match tokens.next() {
                    Some("edge" | "col" | "clq") => {}
                    _ => return Err(parse_error(lineno, "expected `p edge <n> <m>`")),
                }
                let count = parse_index(tokens.next(), lineno, "vertex count")?;
                parse_index(tokens.next(), lineno, "edge count")?;
                n = Some(vertex_count(count)?);
            }
            Some(kind @ ("e" | "n")) => {
                let Some(n) = n else {
                    return Err(parse_error(lineno, "data line before problem line"));
                };
                let u = one_based(parse_index(tokens.next(), lineno, "vertex")?, n, lineno)?;
                if kind == "n" {
                    weights += 1;
                    return Ok(());
                }
                let v = one_based(parse_index(tokens.next(), lineno, "vertex")?, n, lineno)?;
                edges.push((u, v));
            }
            Some(other) if other.starts_with('c') => {}
            _ => return Err(parse_error(lineno, format!("unrecognized line `{line}`"))),
        }
        Ok(())
    })?;
    let n = n.ok_or(GraphError::EmptyInput)?;
    Ok(finish(n, edges, Labels::Numeric((1..=n as u64).collect()), weights))
}
