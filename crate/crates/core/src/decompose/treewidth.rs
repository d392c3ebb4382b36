//! Tree decompositions from elimination orders: min-fill first, exact
//! subset DP for small graphs when the heuristic overshoots.

use std::collections::BTreeSet;

use crate::graph::{Graph, VertexId};

/// Largest graph handed to the exact elimination-order search.
pub const EXACT_LIMIT: usize = 16;

/// Default width bound for pieces that are not planar.
pub const DEFAULT_WIDTH_BOUND: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<VertexId>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Bag containing every vertex of `set`, if any.
    pub fn bag_containing(&self, set: &[VertexId]) -> Option<usize> {
        self.bags.iter().position(|b| set.iter().all(|v| b.contains(v)))
    }

    /// Adds `bag` as a new leaf hanging off `parent`.
    pub fn attach(&mut self, parent: usize, mut bag: Vec<VertexId>) -> usize {
        bag.sort_unstable();
        bag.dedup();
        let id = self.bags.len();
        self.bags.push(bag);
        if id > 0 {
            self.edges.push((parent, id));
        }
        id
    }

    /// Child lists when rooted at bag 0.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let n = self.bags.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut children = vec![Vec::new(); n];
        if n == 0 {
            return children;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(b) = stack.pop() {
            for &c in &adj[b] {
                if !seen[c] {
                    seen[c] = true;
                    children[b].push(c);
                    stack.push(c);
                }
            }
        }
        for cs in &mut children {
            cs.sort_unstable();
        }
        children
    }

    /// Edge coverage, vertex coverage, connectivity of each vertex's bags,
    /// and the bag graph being a tree.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let n = g.vertex_count();
        let nb = self.bags.len();
        if nb == 0 {
            return n == 0;
        }
        if self.edges.len() != nb - 1 {
            return false;
        }
        let children = self.children();
        let reached: usize = 1 + children.iter().map(|c| c.len()).sum::<usize>();
        if reached != nb {
            return false;
        }
        for v in 0..n {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return false;
            }
        }
        for (_, u, v) in g.edges() {
            if self.bag_containing(&[u, v]).is_none() {
                return false;
            }
        }
        // per vertex, the bags holding it must form a connected subtree:
        // exactly one of them has a parent bag not holding it
        let mut parent = vec![usize::MAX; nb];
        for (b, cs) in children.iter().enumerate() {
            for &c in cs {
                parent[c] = b;
            }
        }
        for v in 0..n {
            let tops = (0..nb)
                .filter(|&b| self.bags[b].contains(&v))
                .filter(|&b| parent[b] == usize::MAX || !self.bags[parent[b]].contains(&v))
                .count();
            if tops != 1 {
                return false;
            }
        }
        true
    }
}

fn simple_adjacency(g: &Graph) -> Vec<BTreeSet<VertexId>> {
    let mut adj = vec![BTreeSet::new(); g.vertex_count()];
    for (_, u, v) in g.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    adj
}

/// Decomposition induced by eliminating vertices in `order`.
pub fn from_elimination_order(g: &Graph, order: &[VertexId]) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::default();
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj = simple_adjacency(g);
    let mut bags = Vec::with_capacity(n);
    let mut later: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    for &v in order {
        let nb: Vec<VertexId> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        later.push(nb);
    }
    // bag i hangs off the bag of its earliest-eliminated later neighbour;
    // roots of the resulting forest are chained to the last bag
    let mut edges = Vec::with_capacity(n - 1);
    for i in 0..n {
        match later[i].iter().map(|&w| pos[w]).min() {
            Some(j) => edges.push((j, i)),
            None if i + 1 < n => edges.push((n - 1, i)),
            None => {}
        }
    }
    // reverse so that the last-eliminated bag becomes bag 0
    let remap = |i: usize| n - 1 - i;
    TreeDecomposition {
        bags: bags.into_iter().rev().collect(),
        edges: edges.into_iter().map(|(a, b)| (remap(a), remap(b))).collect(),
    }
}

/// Greedy min-fill elimination order (ties to the smallest degree, then id).
pub fn min_fill_order(g: &Graph) -> Vec<VertexId> {
    let n = g.vertex_count();
    let mut adj = simple_adjacency(g);
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, VertexId)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<VertexId> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nb.len(), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.expect("vertex left");
        let nb: Vec<VertexId> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Exact treewidth and an optimal elimination order by DP over vertex
/// subsets. Only for graphs with at most [`EXACT_LIMIT`] vertices.
pub fn exact_elimination_order(g: &Graph) -> (usize, Vec<VertexId>) {
    let n = g.vertex_count();
    assert!(n <= EXACT_LIMIT, "exact treewidth limited to {EXACT_LIMIT} vertices");
    if n == 0 {
        return (0, Vec::new());
    }
    let adj: Vec<u32> = simple_adjacency(g)
        .iter()
        .map(|s| s.iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    // q(s, v): vertices outside s ∪ {v} reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut inside = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[u];
            out |= nb & !s & !(1 << v);
            let grow = nb & s & !inside;
            inside |= grow;
            frontier |= grow;
        }
        out
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![u8::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let here = (q(prev, v).count_ones() as u8).max(tw[prev as usize]);
            if here < tw[s as usize] {
                tw[s as usize] = here;
                choice[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    (tw[full as usize] as usize, order)
}

/// A decomposition of width at most `k`, or `None` when none was found.
/// Beyond [`EXACT_LIMIT`] vertices only the min-fill heuristic is tried.
pub fn treewidth_at_most(g: &Graph, k: usize) -> Option<TreeDecomposition> {
    let td = from_elimination_order(g, &min_fill_order(g));
    if td.width() <= k {
        return Some(td);
    }
    if g.vertex_count() <= EXACT_LIMIT {
        let (w, order) = exact_elimination_order(g);
        if w <= k {
            return Some(from_elimination_order(g, &order));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    #[test]
    fn examples() {
        let tree = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        let td = treewidth_at_most(&tree, 1).unwrap();
        assert!(td.is_valid(&tree));
        assert_eq!(td.width(), 1);
        let k5 = named::complete(5);
        assert_eq!(treewidth_at_most(&k5, 8).unwrap().width(), 4);
        assert!(treewidth_at_most(&k5, 3).is_none());
        let w = named::wagner();
        assert_eq!(exact_elimination_order(&w).0, 4);
        let td = treewidth_at_most(&w, 8).unwrap();
        assert!(td.is_valid(&w));
    }

    #[test]
    fn grid_and_disconnected() {
        let g = named::grid(4, 4);
        assert_eq!(exact_elimination_order(&g).0, 4);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let td = treewidth_at_most(&two, 1).unwrap();
        assert!(td.is_valid(&two));
        assert!(TreeDecomposition::default().is_valid(&Graph::new(0)));
    }
}
