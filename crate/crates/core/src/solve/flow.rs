//! Dinic's maximum flow on undirected capacitated graphs, plus the cut and
//! transshipment helpers built on it.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
}

/// Residual network. Arcs come in pairs `2k`, `2k + 1`.
#[derive(Clone, Debug)]
pub struct Dinic {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    level: Vec<usize>,
    iter: Vec<usize>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Dinic { adj: vec![Vec::new(); n], arcs: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    /// Adds `u -> v` with capacity `cap` and `v -> u` with capacity `back`;
    /// returns the index of the forward arc.
    pub fn add(&mut self, u: usize, v: usize, cap: i64, back: i64) -> usize {
        let k = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap: back });
        self.adj[u].push(k);
        self.adj[v].push(k + 1);
        k
    }

    pub fn residual(&self, arc: usize) -> i64 {
        self.arcs[arc].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = usize::MAX);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &a in &self.adj[v] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] == usize::MAX {
                    self.level[to] = self.level[v] + 1;
                    q.push_back(to);
                }
            }
        }
        self.level[t] != usize::MAX
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: i64) -> i64 {
        if v == t {
            return pushed;
        }
        while self.iter[v] < self.adj[v].len() {
            let a = self.adj[v][self.iter[v]];
            let Arc { to, cap } = self.arcs[a];
            if cap > 0 && self.level[to] == self.level[v] + 1 {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.arcs[a].cap -= d;
                    self.arcs[a ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, INF);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Vertices reachable from `s` in the residual network.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}

fn capacities(g: &Graph) -> Result<&[i64]> {
    g.capacities().ok_or(Error::MissingCapacities)
}

fn network(g: &Graph, caps: &[i64], extra: usize) -> (Dinic, Vec<usize>) {
    let mut d = Dinic::new(g.vertex_count() + extra);
    let arcs = g.edges().map(|(e, u, v)| d.add(u, v, caps[e], caps[e])).collect();
    (d, arcs)
}

fn edge_flows(g: &Graph, caps: &[i64], d: &Dinic, arcs: &[usize]) -> Vec<i64> {
    (0..g.edge_count()).map(|e| caps[e] - d.residual(arcs[e])).collect()
}

/// Maximum `s`-`t` flow. Edge flows are signed along each edge's stored
/// orientation `(u, v)`.
pub fn max_flow(g: &Graph, s: VertexId, t: VertexId) -> Result<(i64, Vec<i64>)> {
    let caps = capacities(g)?;
    if s == t || s >= g.vertex_count() || t >= g.vertex_count() {
        return Err(Error::Invalid(format!("bad terminals s={s}, t={t}")));
    }
    let (mut d, arcs) = network(g, caps, 0);
    let value = d.max_flow(s, t);
    Ok((value, edge_flows(g, caps, &d, &arcs)))
}

/// Minimum cut separating `sources` from `sinks`; returns its value and the
/// inclusion-minimal source side.
pub fn min_cut(g: &Graph, sources: &[VertexId], sinks: &[VertexId]) -> Result<(i64, Vec<bool>)> {
    let caps = capacities(g)?;
    let n = g.vertex_count();
    let (mut d, _) = network(g, caps, 2);
    let (ss, tt) = (n, n + 1);
    for &s in sources {
        d.add(ss, s, INF, 0);
    }
    for &t in sinks {
        d.add(t, tt, INF, 0);
    }
    let value = d.max_flow(ss, tt);
    let mut side = d.reachable(ss);
    side.truncate(n);
    Ok((value, side))
}

/// Finds edge flows meeting `supply` (positive = net outflow) at every
/// vertex, or `None` if the demands cannot be routed.
pub fn route_supplies(g: &Graph, supply: &[i64]) -> Result<Option<Vec<i64>>> {
    let caps = capacities(g)?;
    let n = g.vertex_count();
    if supply.len() != n || supply.iter().sum::<i64>() != 0 {
        return Ok(None);
    }
    let (mut d, arcs) = network(g, caps, 2);
    let (ss, tt) = (n, n + 1);
    let mut need = 0;
    for (v, &b) in supply.iter().enumerate() {
        if b > 0 {
            d.add(ss, v, b, 0);
            need += b;
        } else if b < 0 {
            d.add(v, tt, -b, 0);
        }
    }
    if d.max_flow(ss, tt) != need {
        return Ok(None);
    }
    Ok(Some(edge_flows(g, caps, &d, &arcs)))
}

/// Net outflow at every vertex under signed edge flows.
pub fn net_outflow(g: &Graph, flows: &[i64]) -> Vec<i64> {
    let mut out = vec![0; g.vertex_count()];
    for (e, u, v) in g.edges() {
        out[u] += flows[e];
        out[v] -= flows[e];
    }
    out
}
