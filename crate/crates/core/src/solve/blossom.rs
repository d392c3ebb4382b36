//! Maximum-cardinality matching in general graphs (Edmonds' blossom
//! algorithm with base contraction, O(n³)).

use std::collections::{HashMap, VecDeque};

use crate::graph::{EdgeId, Graph, Matching, VertexId};

const NIL: usize = usize::MAX;

struct Local {
    adj: Vec<Vec<usize>>,
    edge_of: HashMap<(usize, usize), EdgeId>,
}

fn localize(g: &Graph, vertices: &[VertexId]) -> Local {
    let mut index = HashMap::with_capacity(vertices.len());
    for (i, &v) in vertices.iter().enumerate() {
        index.insert(v, i);
    }
    let mut adj = vec![Vec::new(); vertices.len()];
    let mut edge_of: HashMap<(usize, usize), EdgeId> = HashMap::new();
    for (a, &v) in vertices.iter().enumerate() {
        for &(w, e) in g.neighbors(v) {
            let Some(&b) = index.get(&w) else { continue };
            let key = (a.min(b), a.max(b));
            match edge_of.get_mut(&key) {
                Some(cur) => *cur = (*cur).min(e),
                None => {
                    edge_of.insert(key, e);
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    Local { adj, edge_of }
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Search<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NIL {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Grows an alternating tree from `root`; returns the exposed endpoint
    /// of an augmenting path, if any.
    fn find_path(&mut self, root: usize) -> usize {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NIL);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NIL && self.parent[self.mate[to]] != NIL) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NIL {
                    self.parent[to] = v;
                    if self.mate[to] == NIL {
                        return to;
                    }
                    self.used[self.mate[to]] = true;
                    queue.push_back(self.mate[to]);
                }
            }
        }
        NIL
    }

    fn augment(&mut self, mut v: usize) {
        while v != NIL {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Runs the blossom search. With `stop_on_exposed`, gives up as soon as a
/// vertex is certainly left exposed by every maximum matching.
fn run(adj: &[Vec<usize>], stop_on_exposed: bool) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut s = Search {
        adj,
        mate: vec![NIL; n],
        parent: vec![NIL; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
    };
    for v in 0..n {
        if s.mate[v] == NIL {
            if let Some(&w) = adj[v].iter().find(|&&w| s.mate[w] == NIL) {
                s.mate[v] = w;
                s.mate[w] = v;
            }
        }
    }
    for root in 0..n {
        if s.mate[root] != NIL {
            continue;
        }
        let end = s.find_path(root);
        if end == NIL {
            if stop_on_exposed {
                return None;
            }
        } else {
            s.augment(end);
        }
    }
    Some(s.mate)
}

fn to_matching(local: &Local, mate: &[usize]) -> Matching {
    let edges = (0..mate.len())
        .filter(|&a| mate[a] != NIL && a < mate[a])
        .map(|a| local.edge_of[&(a, mate[a])])
        .collect();
    Matching::new(edges)
}

/// A maximum matching of the subgraph induced by `vertices`.
pub fn maximum_matching_on(g: &Graph, vertices: &[VertexId]) -> Matching {
    let local = localize(g, vertices);
    let mate = run(&local.adj, false).expect("never stops early");
    to_matching(&local, &mate)
}

pub fn maximum_matching(g: &Graph) -> Matching {
    let all: Vec<VertexId> = (0..g.vertex_count()).collect();
    maximum_matching_on(g, &all)
}

/// A perfect matching of the subgraph induced by `vertices`, if one exists.
/// Parallel edges resolve to the smallest edge id.
pub fn perfect_matching_on(g: &Graph, vertices: &[VertexId]) -> Option<Matching> {
    if vertices.len() % 2 == 1 {
        return None;
    }
    let local = localize(g, vertices);
    let mate = run(&local.adj, true)?;
    Some(to_matching(&local, &mate))
}

pub fn perfect_matching(g: &Graph) -> Option<Matching> {
    let all: Vec<VertexId> = (0..g.vertex_count()).collect();
    perfect_matching_on(g, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn small_cases() {
        assert_eq!(perfect_matching(&complete(4)).unwrap().len(), 2);
        assert!(perfect_matching(&cycle(5)).is_none());
        assert_eq!(maximum_matching(&cycle(5)).len(), 2);
        assert_eq!(perfect_matching(&wagner()).unwrap().len(), 4);
        assert!(perfect_matching(&complete_bipartite(2, 4)).is_none());
        assert!(perfect_matching(&Graph::new(0)).unwrap().is_empty());
    }

    #[test]
    fn needs_blossom() {
        // triangle 0-1-2 with pendants 3 at 0 and 4-5 path at 2
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (0, 3), (2, 4), (4, 5)]).unwrap();
        let m = perfect_matching(&g).unwrap();
        assert!(m.is_perfect(&g));
        let petersen = Graph::from_edges(
            10,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)],
        )
        .unwrap();
        assert!(perfect_matching(&petersen).unwrap().is_perfect(&petersen));
    }

    #[test]
    fn induced_subsets() {
        let g = path(4);
        assert!(perfect_matching_on(&g, &[1, 2]).is_some());
        assert!(perfect_matching_on(&g, &[0, 2]).is_none());
    }
}
