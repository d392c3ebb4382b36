//! Flow-mimicking networks: collapse vertices that fall on the same side of
//! one minimum cut per terminal bipartition.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{is_outerplanar, EdgeId, Graph, TerminalSet, VertexId};
use crate::oracle::bipartitions;
use crate::solve::flow::min_cut;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowMimick {
    /// Capacitated graph; terminal `i` is vertex `i`.
    pub graph: Graph,
    /// Caller's id for each terminal.
    pub labels: Vec<VertexId>,
    /// Min-cut value per bipartition, keyed by the side holding terminal 0.
    pub external_cuts: BTreeMap<u32, i64>,
}

impl FlowMimick {
    pub fn terminal_count(&self) -> usize {
        self.labels.len()
    }

    pub fn terminals(&self) -> TerminalSet {
        TerminalSet::new(&self.graph, (0..self.labels.len()).collect()).expect("terminals in range")
    }
}

/// Min-cut value of every nontrivial bipartition of `t`.
pub fn external_cuts(g: &Graph, t: &TerminalSet) -> Result<BTreeMap<u32, i64>> {
    Ok(cuts_with_sides(g, t)?.into_iter().map(|(m, (v, _))| (m, v)).collect())
}

fn cuts_with_sides(g: &Graph, t: &TerminalSet) -> Result<BTreeMap<u32, (i64, Vec<bool>)>> {
    if !g.has_capacities() {
        return Err(Error::MissingCapacities);
    }
    let ts = t.as_slice();
    let mut out = BTreeMap::new();
    for side in bipartitions(ts.len()) {
        let (a, b): (Vec<VertexId>, Vec<VertexId>) = {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (i, &v) in ts.iter().enumerate() {
                if side >> i & 1 == 1 {
                    a.push(v);
                } else {
                    b.push(v);
                }
            }
            (a, b)
        };
        out.insert(side, min_cut(g, &a, &b)?);
    }
    Ok(out)
}

/// Collapses `g` onto classes of vertices sharing a side in every chosen
/// minimum cut (the inclusion-minimal source side per bipartition). Returns
/// the mimick and the class of every vertex of `g`.
pub fn collapse(g: &Graph, t: &TerminalSet) -> Result<(FlowMimick, Vec<usize>)> {
    let k = t.len();
    if k > TerminalSet::MAX {
        return Err(Error::TooManyTerminals(k));
    }
    let cuts = cuts_with_sides(g, t)?;
    let n = g.vertex_count();
    let mut signature = vec![0u64; n];
    for (bit, (_, side)) in cuts.values().enumerate() {
        for v in 0..n {
            if side[v] {
                signature[v] |= 1 << bit;
            }
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut by_sig: HashMap<u64, usize> = HashMap::new();
    for (i, &v) in t.as_slice().iter().enumerate() {
        class_of[v] = i;
        by_sig.insert(signature[v], i);
    }
    let mut classes = k;
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        // with fewer than two terminals no cut is taken and every vertex
        // stays apart from the terminals
        let c = if k < 2 {
            None
        } else {
            by_sig.get(&signature[v]).copied()
        };
        class_of[v] = match c {
            Some(c) => c,
            None => {
                let c = classes;
                classes += 1;
                if k >= 2 {
                    by_sig.insert(signature[v], c);
                }
                c
            }
        };
    }
    let mut caps: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (e, u, v) in g.edges() {
        let (a, b) = (class_of[u], class_of[v]);
        if a != b {
            *caps.entry((a.min(b), a.max(b))).or_default() += g.capacity(e).unwrap_or(0);
        }
    }
    let edges: Vec<(usize, usize, i64)> = caps.into_iter().map(|((a, b), c)| (a, b, c)).collect();
    let mut graph = Graph::from_capacitated_edges(classes, &edges)?;
    if edges.is_empty() {
        graph.set_capacities(Vec::new())?;
    }
    let external_cuts = cuts.into_iter().map(|(m, (v, _))| (m, v)).collect();
    Ok((FlowMimick { graph, labels: t.as_slice().to_vec(), external_cuts }, class_of))
}

pub fn flow_mimick(g: &Graph, t: &TerminalSet) -> Result<FlowMimick> {
    Ok(collapse(g, t)?.0)
}

/// Like [`flow_mimick`], but with at most three terminals the result is
/// outerplanar: a non-outerplanar collapse is replaced by a star whose
/// spokes carry the three single-terminal cut values.
pub fn planar_flow_mimick(g: &Graph, t: &TerminalSet) -> Result<FlowMimick> {
    let m = flow_mimick(g, t)?;
    if t.len() > 3 || is_outerplanar(&m.graph) {
        return Ok(m);
    }
    Ok(star(&m.labels, &m.external_cuts))
}

/// Star on three terminals: the cut around terminal `i` alone is spoke `i`.
fn star(labels: &[VertexId], cuts: &BTreeMap<u32, i64>) -> FlowMimick {
    let single = |i: usize| -> i64 {
        let key = if i == 0 { 1 } else { 0b111 & !(1 << i) };
        cuts[&key]
    };
    let edges: Vec<(usize, usize, i64)> = (0..3).map(|i| (i, 3, single(i))).collect();
    FlowMimick {
        graph: Graph::from_capacitated_edges(4, &edges).expect("valid star"),
        labels: labels.to_vec(),
        external_cuts: cuts.clone(),
    }
}

/// Disjoint union of several mimicks with equal labels identified.
#[derive(Clone, Debug)]
pub struct Union {
    pub graph: Graph,
    /// Label of each identified vertex (vertices `0..labels.len()`).
    pub labels: Vec<VertexId>,
    /// Per part: union vertex of each part vertex, union edge of each part edge.
    pub parts: Vec<(Vec<VertexId>, Vec<EdgeId>)>,
}

pub fn glue_mimicks(parts: &[&FlowMimick]) -> Union {
    let mut labels: Vec<VertexId> = Vec::new();
    for m in parts {
        for &l in &m.labels {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    let mut graph = Graph::new(labels.len());
    graph.set_capacities(Vec::new()).expect("empty");
    let mut maps = Vec::with_capacity(parts.len());
    for m in parts {
        let mut vmap = Vec::with_capacity(m.graph.vertex_count());
        for v in 0..m.graph.vertex_count() {
            if v < m.labels.len() {
                vmap.push(labels.iter().position(|&l| l == m.labels[v]).unwrap());
            } else {
                vmap.push(graph.add_vertex());
            }
        }
        let emap = m
            .graph
            .edges()
            .map(|(e, u, v)| graph.add_capacitated_edge(vmap[u], vmap[v], m.graph.capacity(e).unwrap_or(0)).unwrap())
            .collect();
        maps.push((vmap, emap));
    }
    Union { graph, labels, parts: maps }
}

/// Glues two mimicks on their shared labels and mimicks the union on
/// `terminals` (labels of either input).
pub fn combine(m1: &FlowMimick, m2: &FlowMimick, terminals: &[VertexId]) -> Result<FlowMimick> {
    if terminals.len() > TerminalSet::MAX {
        return Err(Error::TooManyTerminals(terminals.len()));
    }
    let u = glue_mimicks(&[m1, m2]);
    let local: Vec<VertexId> = terminals
        .iter()
        .map(|l| u.labels.iter().position(|x| x == l).ok_or_else(|| Error::Invalid(format!("unknown label {l}"))))
        .collect::<Result<_>>()?;
    let mut m = flow_mimick(&u.graph, &TerminalSet::new(&u.graph, local)?)?;
    m.labels = terminals.to_vec();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_external_flow;

    fn ts(g: &Graph, v: &[usize]) -> TerminalSet {
        TerminalSet::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn single_edge_and_path() {
        let e = Graph::from_capacitated_edges(2, &[(0, 1, 5)]).unwrap();
        let m = flow_mimick(&e, &ts(&e, &[0, 1])).unwrap();
        assert_eq!(m.graph.edge_count(), 1);
        assert_eq!(m.external_cuts[&1], 5);
        let p = Graph::from_capacitated_edges(3, &[(0, 1, 3), (1, 2, 7)]).unwrap();
        let (m, class) = collapse(&p, &ts(&p, &[0, 2])).unwrap();
        assert_eq!(class, vec![0, 1, 1]);
        assert_eq!(m.graph.vertex_count(), 2);
        assert_eq!(m.graph.capacity(0), Some(3));
    }

    #[test]
    fn series_and_parallel() {
        let a = flow_mimick(&Graph::from_capacitated_edges(2, &[(0, 1, 4)]).unwrap(), &{
            let g = Graph::new(2);
            TerminalSet::new(&g, vec![0, 1]).unwrap()
        })
        .unwrap();
        let mut a1 = a.clone();
        a1.labels = vec![10, 11];
        let mut b1 = a.clone();
        b1.labels = vec![11, 12];
        b1.graph.set_capacities(vec![9]).unwrap();
        let series = combine(&a1, &b1, &[10, 12]).unwrap();
        assert_eq!(series.external_cuts[&1], 4);
        let mut c1 = b1.clone();
        c1.labels = vec![10, 11];
        let parallel = combine(&a1, &c1, &[10, 11]).unwrap();
        assert_eq!(parallel.external_cuts[&1], 13);
    }

    #[test]
    fn matches_oracle_on_k6() {
        let mut g = crate::graph::named::complete(7);
        g.set_capacities((0..21).map(|i| 1 + i % 4).collect()).unwrap();
        let t = ts(&g, &[0, 1, 2, 3, 4, 5]);
        let m = flow_mimick(&g, &t).unwrap();
        assert_eq!(m.external_cuts, oracle_external_flow(&g, &t).unwrap());
        assert_eq!(oracle_external_flow(&m.graph, &m.terminals()).unwrap(), m.external_cuts);
    }
}
