//! Heavy path decomposition of a rooted tree, with ranks.

/// A rooted tree given by child lists; node ids are `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    pub root: usize,
    pub children: Vec<Vec<usize>>,
}

impl RootedTree {
    /// Orients an undirected tree away from `root`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_unstable();
            for &w in &next {
                seen[w] = true;
                stack.push(w);
            }
            children[v] = next;
        }
        RootedTree { root, children }
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.len()];
        for (v, cs) in self.children.iter().enumerate() {
            for &c in cs {
                p[c] = Some(v);
            }
        }
        p
    }

    /// Nodes in preorder, children by increasing id.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            let mut cs = self.children[v].clone();
            cs.sort_unstable();
            stack.extend(cs.into_iter().rev());
        }
        out
    }
}

/// Subtree sizes, each node counted as its own descendant.
pub fn descendant_counts(tree: &RootedTree) -> Vec<usize> {
    let mut counts = vec![1; tree.len()];
    for &v in tree.preorder().iter().rev() {
        for &c in &tree.children[v] {
            counts[v] += counts[c];
        }
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavyPathDecomposition {
    /// Each path listed top-down.
    pub paths: Vec<Vec<usize>>,
    pub rank: Vec<u32>,
    pub parent_path: Vec<Option<usize>>,
    pub descend_count: Vec<usize>,
    /// Path containing each tree node.
    pub path_of: Vec<usize>,
}

impl HeavyPathDecomposition {
    /// Distinct ranks in increasing order.
    pub fn rank_levels(&self) -> Vec<u32> {
        let mut r = self.rank.clone();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn paths_of_rank(&self, r: u32) -> Vec<usize> {
        (0..self.paths.len()).filter(|&p| self.rank[p] == r).collect()
    }
}

pub fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.leading_zeros()
}

/// Follows the heaviest child at every node (ties to the smallest id).
/// Paths are numbered in preorder of their top nodes.
pub fn heavy_path_decomposition(tree: &RootedTree) -> HeavyPathDecomposition {
    let counts = descendant_counts(tree);
    let heavy: Vec<Option<usize>> = tree
        .children
        .iter()
        .map(|cs| cs.iter().copied().min_by_key(|&c| (std::cmp::Reverse(counts[c]), c)))
        .collect();
    let parents = tree.parents();
    let mut paths = Vec::new();
    let mut path_of = vec![usize::MAX; tree.len()];
    for v in tree.preorder() {
        let is_top = parents[v].is_none_or(|p| heavy[p] != Some(v));
        if !is_top {
            continue;
        }
        let id = paths.len();
        let mut path = vec![v];
        let mut cur = v;
        path_of[v] = id;
        while let Some(h) = heavy[cur] {
            path.push(h);
            path_of[h] = id;
            cur = h;
        }
        paths.push(path);
    }
    let rank = paths.iter().map(|p| floor_log2(counts[p[0]])).collect();
    let parent_path = paths.iter().map(|p| parents[p[0]].map(|q| path_of[q])).collect();
    HeavyPathDecomposition { paths, rank, parent_path, descend_count: counts, path_of }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_examples() {
        assert_eq!(descendant_counts(&RootedTree::from_edges(1, &[], 0)), vec![1]);
        let path = RootedTree::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], 0);
        assert_eq!(descendant_counts(&path), vec![5, 4, 3, 2, 1]);
        let bin = RootedTree::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)], 0);
        assert_eq!(descendant_counts(&bin), vec![7, 3, 3, 1, 1, 1, 1]);
    }

    #[test]
    fn path_and_star() {
        let path = RootedTree::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)], 0);
        let h = heavy_path_decomposition(&path);
        assert_eq!(h.paths, vec![vec![0, 1, 2, 3, 4, 5]]);
        assert_eq!(h.rank, vec![2]);
        let star = RootedTree::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], 0);
        let h = heavy_path_decomposition(&star);
        assert_eq!(h.paths[0], vec![0, 1]);
        assert_eq!(h.paths.len(), 4);
        assert!(h.paths[1..].iter().all(|p| p.len() == 1));
        assert!(h.rank[1..].iter().all(|&r| r == 0));
    }
}
