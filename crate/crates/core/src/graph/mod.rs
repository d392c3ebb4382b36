//! Undirected multigraphs with optional integer weights and capacities.
//!
//! Vertices are dense ids `0..n`; every edge gets a stable id in insertion
//! order. Parallel edges are kept as distinct ids, self-loops are rejected.

mod io;
mod planarity;

pub use io::{parse_dimacs_max_flow, parse_edge_list, write_edge_list, EdgeListKind};
pub use planarity::{
    faces, is_outerplanar, is_planar, is_planar_embedding, outerplanar_embedding,
    planar_embedding, Dart, Embedding,
};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    ends: Vec<(VertexId, VertexId)>,
    weights: Option<Vec<i64>>,
    capacities: Option<Vec<i64>>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            ends: Vec::new(),
            weights: None,
            capacities: None,
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds an unweighted graph from an edge list.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn from_weighted_edges(n: usize, edges: &[(VertexId, VertexId, i64)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            g.add_weighted_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn from_capacitated_edges(n: usize, edges: &[(VertexId, VertexId, i64)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v, c) in edges {
            g.add_capacitated_edge(u, v, c)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let id = self.ends.len();
        self.ends.push((u, v));
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        if let Some(w) = self.weights.as_mut() {
            w.push(0);
        }
        if let Some(c) = self.capacities.as_mut() {
            c.push(0);
        }
        Ok(id)
    }

    pub fn add_weighted_edge(&mut self, u: VertexId, v: VertexId, weight: i64) -> Result<EdgeId> {
        let id = self.add_edge(u, v)?;
        self.weights.get_or_insert_with(|| vec![0; id + 1])[id] = weight;
        Ok(id)
    }

    pub fn add_capacitated_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        capacity: i64,
    ) -> Result<EdgeId> {
        if capacity < 0 {
            return Err(Error::Invalid(format!("negative capacity {capacity}")));
        }
        let id = self.add_edge(u, v)?;
        self.capacities.get_or_insert_with(|| vec![0; id + 1])[id] = capacity;
        Ok(id)
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// `(neighbor, edge)` pairs incident to `v`, in insertion order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.ends.iter().enumerate().map(|(e, &(u, v))| (e, u, v))
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].iter().any(|&(w, _)| w == v)
    }

    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.adj[u].iter().filter(|&&(w, _)| w == v).map(|&(_, e)| e).collect()
    }

    pub fn is_clique(&self, vs: &[VertexId]) -> bool {
        vs.iter().enumerate().all(|(i, &a)| {
            a < self.n && vs[i + 1..].iter().all(|&b| a != b && self.has_edge(a, b))
        })
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    pub fn has_capacities(&self) -> bool {
        self.capacities.is_some()
    }

    /// Weight of `e`, or 0 for unweighted graphs.
    pub fn weight(&self, e: EdgeId) -> i64 {
        self.weights.as_ref().map_or(0, |w| w[e])
    }

    pub fn capacity(&self, e: EdgeId) -> Option<i64> {
        self.capacities.as_ref().map(|c| c[e])
    }

    pub fn weights(&self) -> Option<&[i64]> {
        self.weights.as_deref()
    }

    pub fn capacities(&self) -> Option<&[i64]> {
        self.capacities.as_deref()
    }

    pub fn set_weights(&mut self, weights: Vec<i64>) -> Result<()> {
        if weights.len() != self.edge_count() {
            return Err(Error::Invalid("weight vector length mismatch".into()));
        }
        self.weights = Some(weights);
        Ok(())
    }

    pub fn set_capacities(&mut self, capacities: Vec<i64>) -> Result<()> {
        if capacities.len() != self.edge_count() {
            return Err(Error::Invalid("capacity vector length mismatch".into()));
        }
        if capacities.iter().any(|&c| c < 0) {
            return Err(Error::Invalid("negative capacity".into()));
        }
        self.capacities = Some(capacities);
        Ok(())
    }

    pub fn clear_weights(&mut self) {
        self.weights = None;
    }

    /// Subgraph induced by `vs`; vertex `i` of the result is `vs[i]`.
    /// Returns the subgraph and, per new edge, the id of the original edge.
    pub fn induced(&self, vs: &[VertexId]) -> (Graph, Vec<EdgeId>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vs.iter().enumerate() {
            local[v] = i;
        }
        let mut sub = Graph::new(vs.len());
        let mut origin = Vec::new();
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                sub.ends.push((local[u], local[v]));
                let id = sub.ends.len() - 1;
                sub.adj[local[u]].push((local[v], id));
                sub.adj[local[v]].push((local[u], id));
                origin.push(e);
            }
        }
        if let Some(w) = &self.weights {
            sub.weights = Some(origin.iter().map(|&e| w[e]).collect());
        }
        if let Some(c) = &self.capacities {
            sub.capacities = Some(origin.iter().map(|&e| c[e]).collect());
        }
        (sub, origin)
    }
}

/// An ordered list of at most six distinct terminals of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TerminalSet(Vec<VertexId>);

impl TerminalSet {
    pub const MAX: usize = 6;

    pub fn new(g: &Graph, terminals: Vec<VertexId>) -> Result<Self> {
        if terminals.len() > Self::MAX {
            return Err(Error::TooManyTerminals(terminals.len()));
        }
        for (i, &t) in terminals.iter().enumerate() {
            g.check_vertex(t)?;
            if terminals[..i].contains(&t) {
                return Err(Error::Invalid(format!("terminal {t} repeated")));
            }
        }
        Ok(TerminalSet(terminals))
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.0.iter().position(|&t| t == v)
    }

    /// Bitmask over terminal indices of the terminals contained in `covered`.
    pub fn mask_of(&self, covered: impl Fn(VertexId) -> bool) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &t)| covered(t))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// A set of pairwise disjoint edges, stored sorted by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Matching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn covered(&self, g: &Graph) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = g.endpoints(e);
                [u, v]
            })
            .collect();
        set.into_iter().collect()
    }

    /// No two edges share an endpoint and every id is an edge of `g`.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut seen = vec![false; g.vertex_count()];
        for &e in &self.edges {
            if e >= g.edge_count() {
                return false;
            }
            let (u, v) = g.endpoints(e);
            if seen[u] || seen[v] {
                return false;
            }
            seen[u] = true;
            seen[v] = true;
        }
        true
    }

    pub fn is_perfect(&self, g: &Graph) -> bool {
        self.is_valid(g) && 2 * self.edges.len() == g.vertex_count()
    }

    pub fn weight(&self, g: &Graph) -> i64 {
        self.edges.iter().map(|&e| g.weight(e)).sum()
    }
}

/// Glues `g2` onto `g1` along a clique of at most three vertices.
///
/// `identify` pairs vertices of `g1` with vertices of `g2`. Edges of `g2`
/// inside the identified clique merge with their `g1` copies; `drop_edges`
/// (pairs of `g1` ids) are removed from the result. Vertex ids of `g1` are
/// preserved and the remaining vertices of `g2` follow in increasing order.
pub fn clique_sum(
    g1: &Graph,
    g2: &Graph,
    identify: &[(VertexId, VertexId)],
    drop_edges: &[(VertexId, VertexId)],
) -> Result<Graph> {
    if identify.len() > 3 {
        return Err(Error::BadIdentification(format!(
            "clique of size {} exceeds 3",
            identify.len()
        )));
    }
    let side1: Vec<VertexId> = identify.iter().map(|p| p.0).collect();
    let side2: Vec<VertexId> = identify.iter().map(|p| p.1).collect();
    for (&a, &b) in side1.iter().zip(&side2) {
        if a >= g1.vertex_count() || b >= g2.vertex_count() {
            return Err(Error::BadIdentification(format!("pair ({a}, {b}) out of range")));
        }
    }
    let distinct = |s: &[VertexId]| s.iter().collect::<BTreeSet<_>>().len() == s.len();
    if !distinct(&side1) || !distinct(&side2) {
        return Err(Error::BadIdentification("repeated vertex in identification".into()));
    }
    if !g1.is_clique(&side1) {
        return Err(Error::NotAClique(side1));
    }
    if !g2.is_clique(&side2) {
        return Err(Error::NotAClique(side2));
    }
    let pair = |a: VertexId, b: VertexId| (a.min(b), a.max(b));
    let mut dropped = BTreeSet::new();
    for &(a, b) in drop_edges {
        if !side1.contains(&a) || !side1.contains(&b) || a == b {
            return Err(Error::BadIdentification(format!(
                "dropped pair ({a}, {b}) is not inside the identified clique"
            )));
        }
        dropped.insert(pair(a, b));
    }

    let mut map2 = vec![usize::MAX; g2.vertex_count()];
    for &(a, b) in identify {
        map2[b] = a;
    }
    let mut next = g1.vertex_count();
    for slot in map2.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }

    let weighted = g1.has_weights() || g2.has_weights();
    let capacitated = g1.has_capacities() || g2.has_capacities();
    let mut out = Graph::new(next);
    let push = |out: &mut Graph, u, v, w, c: Option<i64>| -> Result<()> {
        let e = out.add_edge(u, v)?;
        if weighted {
            out.weights.get_or_insert_with(|| vec![0; e + 1])[e] = w;
        }
        if capacitated {
            out.capacities.get_or_insert_with(|| vec![0; e + 1])[e] = c.unwrap_or(0);
        }
        Ok(())
    };
    for (e, u, v) in g1.edges() {
        if dropped.contains(&pair(u, v)) {
            continue;
        }
        push(&mut out, u, v, g1.weight(e), g1.capacity(e))?;
    }
    for (e, u, v) in g2.edges() {
        if side2.contains(&u) && side2.contains(&v) {
            continue;
        }
        push(&mut out, map2[u], map2[v], g2.weight(e), g2.capacity(e))?;
    }
    Ok(out)
}

/// Connected components of `g` after deleting `removed`, each sorted, in
/// order of their smallest vertex.
pub fn connected_components(g: &Graph, removed: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut gone = vec![false; g.vertex_count()];
    for &v in removed {
        gone[v] = true;
    }
    let mut comp = vec![usize::MAX; g.vertex_count()];
    let mut out: Vec<Vec<VertexId>> = Vec::new();
    let mut stack = Vec::new();
    for s in 0..g.vertex_count() {
        if gone[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        stack.push(s);
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &(w, _) in g.neighbors(v) {
                if !gone[w] && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Two triangles sharing an edge, K_n, cycles and friends used all over the
/// tests and generators.
pub mod named {
    use super::{Graph, VertexId};

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("valid");
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n).expect("valid");
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 1..n {
            g.add_edge(u - 1, u).expect("valid");
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v).expect("valid");
            }
        }
        g
    }

    /// Hub 0 joined to a rim cycle `1..=k`.
    pub fn wheel(k: usize) -> Graph {
        let mut g = Graph::new(k + 1);
        for i in 1..=k {
            g.add_edge(0, i).expect("valid");
            g.add_edge(i, i % k + 1).expect("valid");
        }
        g
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let id = |r: usize, c: usize| -> VertexId { r * cols + c };
        let mut g = Graph::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    g.add_edge(id(r, c), id(r, c + 1)).expect("valid");
                }
                if r + 1 < rows {
                    g.add_edge(id(r, c), id(r + 1, c)).expect("valid");
                }
            }
        }
        g
    }

    pub fn cube() -> Graph {
        let mut g = Graph::new(8);
        for v in 0..8usize {
            for bit in [1, 2, 4] {
                if v & bit == 0 {
                    g.add_edge(v, v | bit).expect("valid");
                }
            }
        }
        g
    }

    /// The eight-vertex Möbius ladder: an 8-cycle plus its four diameters.
    pub fn wagner() -> Graph {
        let mut g = cycle(8);
        for i in 0..4 {
            g.add_edge(i, i + 4).expect("valid");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn rejects_self_loops_and_bad_ids() {
        let mut g = Graph::new(2);
        assert_eq!(g.add_edge(1, 1), Err(Error::SelfLoop(1)));
        assert!(matches!(g.add_edge(0, 2), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn diamond_from_two_triangles() {
        let t = complete(3);
        let d = clique_sum(&t, &t, &[(0, 0), (1, 1)], &[]).unwrap();
        assert_eq!(d.vertex_count(), 4);
        assert_eq!(d.edge_count(), 5);
        assert!(d.has_edge(0, 1));
        assert_eq!(d.edges_between(0, 1).len(), 1);
    }

    #[test]
    fn one_sum_of_two_k5() {
        let k5 = complete(5);
        let g = clique_sum(&k5, &k5, &[(4, 0)], &[]).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.degree(4), 8);
    }

    #[test]
    fn triangle_sum_dropping_all_clique_edges() {
        let a = complete(4);
        let b = wheel(5);
        // hub 0 with rim 1,2 is a triangle of the wheel
        let g = clique_sum(&a, &b, &[(0, 0), (1, 1), (2, 2)], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.vertex_count(), 4 + 6 - 3);
        assert_eq!(g.edge_count(), a.edge_count() + b.edge_count() - 6);
    }

    #[test]
    fn clique_sum_errors() {
        let p = path(3);
        let t = complete(3);
        assert!(matches!(
            clique_sum(&p, &t, &[(0, 0), (2, 1)], &[]),
            Err(Error::NotAClique(_))
        ));
        assert!(matches!(
            clique_sum(&t, &t, &[(0, 0), (0, 1)], &[]),
            Err(Error::BadIdentification(_))
        ));
        assert!(matches!(
            clique_sum(&t, &t, &[(0, 7)], &[]),
            Err(Error::BadIdentification(_))
        ));
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&path(3), &[1]), vec![vec![0], vec![2]]);
        assert_eq!(connected_components(&complete(4), &[]).len(), 1);
        let two = clique_sum(&complete(3), &complete(3), &[], &[]).unwrap();
        assert_eq!(connected_components(&two, &[]), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn matching_predicates() {
        let g = cycle(4);
        assert!(Matching::new(vec![0, 2]).is_perfect(&g));
        assert!(!Matching::new(vec![0, 1]).is_valid(&g));
        assert_eq!(Matching::new(vec![2, 0]).covered(&g), vec![0, 1, 2, 3]);
    }

    #[test]
    fn terminal_set_validation() {
        let g = complete(7);
        assert!(TerminalSet::new(&g, vec![0, 1, 2, 3, 4, 5, 6]).is_err());
        assert!(TerminalSet::new(&g, vec![0, 0]).is_err());
        let t = TerminalSet::new(&g, vec![4, 2]).unwrap();
        assert_eq!(t.mask_of(|v| v == 2), 0b10);
    }
}
