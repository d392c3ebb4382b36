//! Small separators and laminarity tests.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::graph::{Graph, VertexId};

/// A vertex set of size 1 to 3, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Separator(Vec<VertexId>);

impl Separator {
    pub fn new(mut vs: Vec<VertexId>) -> Self {
        vs.sort_unstable();
        vs.dedup();
        assert!((1..=3).contains(&vs.len()), "separators have 1 to 3 vertices");
        Separator(vs)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }
}

/// Simple adjacency lists of `g`.
pub(crate) fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().map(|&(w, _)| w).collect())
        .collect();
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Articulation points of the graph on `adj` minus `removed`, in
/// increasing order.
pub(crate) fn articulation_points(adj: &[Vec<usize>], removed: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    for root in 0..n {
        if removed[root] || disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, idx) = *top;
            if idx < adj[v].len() {
                top.2 += 1;
                let w = adj[v][idx];
                if removed[w] || w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

/// Component label per vertex of `adj` minus `removed` (`usize::MAX` for
/// removed vertices); labels follow the smallest vertex of each component.
pub(crate) fn component_labels(adj: &[Vec<usize>], removed: &[bool]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if removed[s] || label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !removed[w] && label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

fn removed_mask(n: usize, s: &[VertexId]) -> Vec<bool> {
    let mut r = vec![false; n];
    for &v in s {
        r[v] = true;
    }
    r
}

/// Number of components of `g - s` adjacent to every vertex of `s`.
pub(crate) fn full_component_count(adj: &[Vec<usize>], s: &[VertexId]) -> usize {
    let removed = removed_mask(adj.len(), s);
    let (label, count) = component_labels(adj, &removed);
    let mut touch = vec![0u8; count];
    for (i, &v) in s.iter().enumerate() {
        for &w in &adj[v] {
            if label[w] != usize::MAX {
                touch[label[w]] |= 1 << i;
            }
        }
    }
    let all = (1u8 << s.len()) - 1;
    touch.iter().filter(|&&t| t == all).count()
}

/// At least two components of `g - s` see all of `s`.
pub fn is_minimal_separator(g: &Graph, s: &Separator) -> bool {
    full_component_count(&adjacency(g), s.vertices()) >= 2
}

/// Every minimal separator with at most three vertices. A minimal triple
/// `{x, y, z}` always shows `z` as a cut vertex of `g - x - y`, so cut
/// vertices of the graphs with up to two vertices removed give all
/// candidates.
pub fn minimal_separators_up_to_3(g: &Graph) -> Vec<Separator> {
    let n = g.vertex_count();
    let adj = adjacency(g);
    let found: BTreeSet<Separator> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut out = Vec::new();
            let mut removed = vec![false; n];
            removed[x] = true;
            if x == 0 {
                let none = vec![false; n];
                for a in articulation_points(&adj, &none) {
                    out.push(vec![a]);
                }
            }
            for y in articulation_points(&adj, &removed) {
                if y > x {
                    out.push(vec![x, y]);
                }
            }
            for y in x + 1..n {
                removed[y] = true;
                for z in articulation_points(&adj, &removed) {
                    out.push(vec![x, y, z]);
                }
                removed[y] = false;
            }
            out.into_iter()
                .map(Separator::new)
                .filter(|s| full_component_count(&adj, s.vertices()) >= 2)
                .collect::<Vec<_>>()
        })
        .collect();
    found.into_iter().collect()
}

/// Component labels of `g - s`, cached for repeated laminarity tests.
pub(crate) struct SideLabels {
    pub(crate) labels: Vec<usize>,
}

impl SideLabels {
    pub(crate) fn new(adj: &[Vec<usize>], s: &Separator) -> Self {
        let removed = removed_mask(adj.len(), s.vertices());
        SideLabels { labels: component_labels(adj, &removed).0 }
    }

    /// Whether `other` has two vertices in different components.
    pub(crate) fn splits(&self, other: &Separator) -> bool {
        let mut seen = usize::MAX;
        for &v in other.vertices() {
            let l = self.labels[v];
            if l == usize::MAX {
                continue;
            }
            if seen == usize::MAX {
                seen = l;
            } else if seen != l {
                return true;
            }
        }
        false
    }
}

/// Neither separator splits the vertices of the other.
pub fn are_laminar(g: &Graph, a: &Separator, b: &Separator) -> bool {
    let adj = adjacency(g);
    !SideLabels::new(&adj, a).splits(b) && !SideLabels::new(&adj, b).splits(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn seps(g: &Graph) -> Vec<Vec<usize>> {
        minimal_separators_up_to_3(g).into_iter().map(|s| s.vertices().to_vec()).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(seps(&named::path(3)), vec![vec![1]]);
        assert!(seps(&named::complete(4)).is_empty());
        let k33 = named::complete_bipartite(3, 3);
        let s = seps(&k33);
        assert!(s.contains(&vec![0, 1, 2]));
        assert!(s.contains(&vec![3, 4, 5]));
        assert!(!are_laminar(&k33, &Separator::new(vec![0, 1, 2]), &Separator::new(vec![3, 4, 5])));
    }

    #[test]
    fn cut_vertices() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        let none = vec![false; 5];
        assert_eq!(articulation_points(&adjacency(&g), &none), vec![2]);
        assert_eq!(seps(&g)[0], vec![2]);
    }
}
