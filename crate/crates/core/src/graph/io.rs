//! Plain-text graph formats.
//!
//! Edge list: `p <n> <m> [weighted|capacitated]` followed by `e <u> <v> [w]`
//! lines, 0-indexed. Lines starting with `c` and blank lines are ignored.
//!
//! DIMACS max-flow: `p max <n> <m>`, `n <id> s`, `n <id> t`, `a <u> <v> <cap>`,
//! 1-indexed. Arcs become undirected capacitated edges.

use std::fmt::Write as _;

use super::{Graph, VertexId};
use crate::error::{Error, Result};

/// Largest weight magnitude accepted from text input.
pub const MAX_ABS_WEIGHT: i64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListKind {
    Plain,
    Weighted,
    Capacitated,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(t) if t.starts_with('c') || t.starts_with('#') => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

pub fn parse_edge_list(text: &str) -> Result<(Graph, EdgeListKind)> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    if head[0] != "p" {
        return Err(perr(ln, "expected `p <n> <m>` header"));
    }
    let n: usize = num(head.get(1).copied(), ln, "vertex count")?;
    let m: usize = num(head.get(2).copied(), ln, "edge count")?;
    let kind = match head.get(3).copied() {
        None => EdgeListKind::Plain,
        Some("weighted") => EdgeListKind::Weighted,
        Some("capacitated") => EdgeListKind::Capacitated,
        Some(other) => return Err(perr(ln, format!("unknown graph kind `{other}`"))),
    };
    let mut g = Graph::new(n);
    let mut values = Vec::with_capacity(m);
    for (ln, toks) in lines {
        if toks[0] != "e" {
            return Err(perr(ln, format!("unexpected record `{}`", toks[0])));
        }
        let u: VertexId = num(toks.get(1).copied(), ln, "endpoint")?;
        let v: VertexId = num(toks.get(2).copied(), ln, "endpoint")?;
        let val: i64 = match kind {
            EdgeListKind::Plain => 0,
            _ => num(toks.get(3).copied(), ln, "edge value")?,
        };
        match kind {
            EdgeListKind::Weighted if val.abs() > MAX_ABS_WEIGHT => {
                return Err(perr(ln, format!("weight {val} exceeds 1e9 in magnitude")))
            }
            EdgeListKind::Capacitated if val < 0 => {
                return Err(perr(ln, format!("negative capacity {val}")))
            }
            _ => {}
        }
        g.add_edge(u, v).map_err(|e| perr(ln, e.to_string()))?;
        values.push(val);
    }
    if g.edge_count() != m {
        return Err(perr(0, format!("header declares {m} edges, found {}", g.edge_count())));
    }
    match kind {
        EdgeListKind::Plain => {}
        EdgeListKind::Weighted => g.set_weights(values)?,
        EdgeListKind::Capacitated => g.set_capacities(values)?,
    }
    Ok((g, kind))
}

/// Serializes `g` in edge-list form, sorted by edge id. Weights win over
/// capacities when both are present.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let (tag, vals) = if let Some(w) = g.weights() {
        (" weighted", Some(w))
    } else if let Some(c) = g.capacities() {
        (" capacitated", Some(c))
    } else {
        ("", None)
    };
    let _ = writeln!(out, "p {} {}{}", g.vertex_count(), g.edge_count(), tag);
    for (e, u, v) in g.edges() {
        match vals {
            Some(vals) => {
                let _ = writeln!(out, "e {u} {v} {}", vals[e]);
            }
            None => {
                let _ = writeln!(out, "e {u} {v}");
            }
        }
    }
    out
}

/// Reads a DIMACS max-flow instance, returning the graph with `s` and `t`.
pub fn parse_dimacs_max_flow(text: &str) -> Result<(Graph, VertexId, VertexId)> {
    let mut g: Option<Graph> = None;
    let (mut s, mut t) = (None, None);
    for (ln, toks) in content_lines(text) {
        match toks[0] {
            "p" => {
                if toks.get(1) != Some(&"max") {
                    return Err(perr(ln, "expected `p max <n> <m>`"));
                }
                let n: usize = num(toks.get(2).copied(), ln, "vertex count")?;
                let mut fresh = Graph::new(n);
                fresh.set_capacities(Vec::new())?;
                g = Some(fresh);
            }
            "n" => {
                let id: usize = num(toks.get(1).copied(), ln, "node id")?;
                let id = id.checked_sub(1).ok_or_else(|| perr(ln, "node ids are 1-based"))?;
                match toks.get(2).copied() {
                    Some("s") => s = Some(id),
                    Some("t") => t = Some(id),
                    _ => return Err(perr(ln, "node designator must be s or t")),
                }
            }
            "a" => {
                let g = g.as_mut().ok_or_else(|| perr(ln, "arc before problem line"))?;
                let u: usize = num(toks.get(1).copied(), ln, "arc tail")?;
                let v: usize = num(toks.get(2).copied(), ln, "arc head")?;
                let c: i64 = num(toks.get(3).copied(), ln, "capacity")?;
                if u == 0 || v == 0 {
                    return Err(perr(ln, "node ids are 1-based"));
                }
                g.add_capacitated_edge(u - 1, v - 1, c).map_err(|e| perr(ln, e.to_string()))?;
            }
            other => return Err(perr(ln, format!("unexpected record `{other}`"))),
        }
    }
    let g = g.ok_or_else(|| perr(0, "missing problem line"))?;
    let s = s.ok_or_else(|| perr(0, "missing source"))?;
    let t = t.ok_or_else(|| perr(0, "missing sink"))?;
    if s >= g.vertex_count() || t >= g.vertex_count() {
        return Err(perr(0, "terminal out of range"));
    }
    Ok((g, s, t))
}
