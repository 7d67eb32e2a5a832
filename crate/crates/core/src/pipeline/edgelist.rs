//! Whitespace-separated edge list files.
//!
//! Reading: `%` / `#` lines and blank lines are skipped, tokens past the
//! second are ignored, self-loops and repeated edges are dropped. Labels are
//! remapped to `0..n` in first-seen order unless the file carries a
//! `# n=<n>` header and every label is below `n`, in which case labels are
//! kept; this makes files written here round-trip exactly.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

pub fn parse_edge_list(text: &str, path: &Path) -> Result<(Graph, ReadStats)> {
    let mut header_n: Option<usize> = None;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            if let Some(v) = t.strip_prefix('#').and_then(|r| r.trim().strip_prefix("n=")) {
                header_n = v.trim().parse().ok();
            }
            continue;
        }
        let bad = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let mut tokens = t.split_whitespace();
        let mut label = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| bad("expected two vertex labels".into()))?;
            tok.parse().map_err(|_| bad(format!("malformed vertex label {tok:?}")))
        };
        let u = label()?;
        let v = label()?;
        raw.push((u, v));
    }

    let keep_labels = header_n.is_some_and(|n| raw.iter().all(|&(u, v)| u.max(v) < n as u64));
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut id = |x: u64| -> usize {
        if keep_labels {
            x as usize
        } else {
            let next = index.len();
            *index.entry(x).or_insert(next)
        }
    };
    let mut stats = ReadStats::default();
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        let (u, v) = (id(a), id(b));
        if u == v {
            stats.self_loops += 1;
        } else if !seen.insert((u.min(v), u.max(v))) {
            stats.duplicates += 1;
        } else {
            edges.push((u, v));
        }
    }
    let n = if keep_labels { header_n.unwrap_or(0) } else { index.len() };
    if n == 0 {
        return Err(Error::InsufficientData(format!("{}: empty graph", path.display())));
    }
    if stats.self_loops + stats.duplicates > 0 {
        warn!(
            "{}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            stats.self_loops,
            stats.duplicates
        );
    }
    Ok((Graph::from_edges(n, edges)?, stats))
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_edge_list(&text, path)?.0)
}

/// `# n=<n>` header, then one `u v` line per edge, `u < v`, sorted.
pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = format!("# n={}\n", graph.n());
    let mut edges: Vec<(usize, usize)> = graph.edges().map(|(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_edge_list(graph: &Graph, path: &Path) -> Result<()> {
    super::write_atomic(path, format_edge_list(graph).as_bytes())
}
