//! Brute-force reference answers for small instances.
//!
//! Matchings are enumerated by branching on the lowest undecided vertex,
//! memoized on the set of decided vertices. Flows use Edmonds-Karp, kept
//! separate from the Dinic solver used by the engine.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Matching, TerminalSet, VertexId};
use crate::mimic::MatchingPattern;
use crate::solve::blossom;

/// Largest graph the exhaustive routines accept.
pub const MAX_EXHAUSTIVE: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub pattern: MatchingPattern,
    pub best_weight: Option<BTreeMap<u32, i64>>,
    pub max_flow_value: Option<i64>,
}

fn check_size(g: &Graph) -> Result<()> {
    if g.vertex_count() > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge { n: g.vertex_count(), limit: MAX_EXHAUSTIVE });
    }
    Ok(())
}

/// Memoized search over "which vertices are already decided".
struct Enumerator<'a> {
    g: &'a Graph,
    /// terminal index per vertex, or `usize::MAX`
    term: Vec<usize>,
    k: usize,
    memo: HashMap<u32, Vec<Option<i64>>>,
}

impl Enumerator<'_> {
    /// Minimum weight to finish from `decided`, per covered-terminal subset of
    /// the still-undecided terminals.
    fn solve(&mut self, decided: u32) -> Vec<Option<i64>> {
        let n = self.g.vertex_count();
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if decided == full {
            let mut base = vec![None; 1 << self.k];
            base[0] = Some(0);
            return base;
        }
        if let Some(hit) = self.memo.get(&decided) {
            return hit.clone();
        }
        let v = (!decided).trailing_zeros() as usize;
        let mut out: Vec<Option<i64>> = vec![None; 1 << self.k];
        let mut merge = |sub: &[Option<i64>], add_bits: usize, add_w: i64| {
            for (x, w) in sub.iter().enumerate() {
                if let Some(w) = w {
                    let y = x | add_bits;
                    let c = w + add_w;
                    if out[y].is_none_or(|o| c < o) {
                        out[y] = Some(c);
                    }
                }
            }
        };
        let tbit = |u: usize, term: &[usize]| if term[u] == usize::MAX { 0 } else { 1 << term[u] };
        if self.term[v] != usize::MAX {
            let sub = self.solve(decided | 1 << v);
            merge(&sub, 0, 0);
        }
        for &(w, e) in self.g.neighbors(v) {
            if decided >> w & 1 == 1 {
                continue;
            }
            let sub = self.solve(decided | 1 << v | 1 << w);
            let bits = tbit(v, &self.term) | tbit(w, &self.term);
            merge(&sub, bits, self.g.weight(e));
        }
        self.memo.insert(decided, out.clone());
        out
    }

    /// Recovers a minimum-weight matching realizing subset `x` from `decided`.
    fn witness(&mut self, decided: u32, x: usize, edges: &mut Vec<EdgeId>) {
        let n = self.g.vertex_count();
        if decided.count_ones() as usize == n {
            return;
        }
        let target = self.solve(decided)[x].expect("realizable");
        let v = (!decided).trailing_zeros() as usize;
        let tbit = |u: usize, term: &[usize]| if term[u] == usize::MAX { 0 } else { 1usize << term[u] };
        if self.term[v] != usize::MAX && tbit(v, &self.term) & x == 0
            && self.solve(decided | 1 << v)[x] == Some(target) {
                return self.witness(decided | 1 << v, x, edges);
            }
        let mut nbrs: Vec<(VertexId, EdgeId)> = self.g.neighbors(v).to_vec();
        nbrs.sort_by_key(|&(_, e)| e);
        for (w, e) in nbrs {
            if decided >> w & 1 == 1 {
                continue;
            }
            let bits = tbit(v, &self.term) | tbit(w, &self.term);
            if bits & !x != 0 {
                continue;
            }
            let rest = x & !bits;
            let next = decided | 1 << v | 1 << w;
            if self.solve(next)[rest].map(|c| c + self.g.weight(e)) == Some(target) {
                edges.push(e);
                return self.witness(next, rest, edges);
            }
        }
        unreachable!("memo table promised a witness");
    }
}

fn enumerator<'a>(g: &'a Graph, t: &TerminalSet) -> Enumerator<'a> {
    let mut term = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in t.as_slice().iter().enumerate() {
        term[v] = i;
    }
    Enumerator { g, term, k: t.len(), memo: HashMap::new() }
}

/// Exact matching pattern by exhaustive enumeration.
pub fn oracle_matching_pattern(g: &Graph, t: &TerminalSet) -> Result<MatchingPattern> {
    check_size(g)?;
    let table = enumerator(g, t).solve(0);
    Ok(MatchingPattern::new(
        t.len(),
        (0..table.len() as u32).filter(|&x| table[x as usize].is_some()),
    ))
}

/// Minimum weight per member subset of the pattern.
pub fn oracle_pattern_weights(g: &Graph, t: &TerminalSet) -> Result<OracleResult> {
    check_size(g)?;
    let table = enumerator(g, t).solve(0);
    let best: BTreeMap<u32, i64> = table
        .iter()
        .enumerate()
        .filter_map(|(x, w)| w.map(|w| (x as u32, w)))
        .collect();
    Ok(OracleResult {
        pattern: MatchingPattern::new(t.len(), best.keys().copied()),
        best_weight: Some(best),
        max_flow_value: None,
    })
}

/// A perfect matching, found exhaustively.
pub fn oracle_perfect_matching(g: &Graph) -> Result<Option<Matching>> {
    Ok(oracle_min_weight_pm_any(g)?.map(|(_, m)| m))
}

/// Exhaustive up to [`MAX_EXHAUSTIVE`] vertices, blossom beyond.
pub fn oracle_perfect_matching_or_blossom(g: &Graph) -> Option<Matching> {
    if g.vertex_count() <= MAX_EXHAUSTIVE {
        oracle_perfect_matching(g).expect("within bound")
    } else {
        blossom::perfect_matching(g)
    }
}

fn oracle_min_weight_pm_any(g: &Graph) -> Result<Option<(i64, Matching)>> {
    check_size(g)?;
    let empty = TerminalSet::new(g, Vec::new())?;
    let mut en = enumerator(g, &empty);
    let Some(w) = en.solve(0)[0] else {
        return Ok(None);
    };
    let mut edges = Vec::new();
    en.witness(0, 0, &mut edges);
    Ok(Some((w, Matching::new(edges))))
}

/// Minimum total weight over all perfect matchings, with one witness.
pub fn oracle_min_weight_pm(g: &Graph) -> Result<Option<(i64, Matching)>> {
    if !g.has_weights() {
        return Err(Error::MissingWeights);
    }
    oracle_min_weight_pm_any(g)
}

/// Edmonds-Karp on a residual matrix keyed by edge.
struct Ek {
    n: usize,
    /// (to, edge, forward?) per vertex
    adj: Vec<Vec<(usize, usize, bool)>>,
    /// residual capacity along and against each edge's orientation
    res: Vec<[i64; 2]>,
}

impl Ek {
    fn new(n: usize) -> Self {
        Ek { n, adj: vec![Vec::new(); n], res: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, fwd: i64, back: i64) -> usize {
        let e = self.res.len();
        self.res.push([fwd, back]);
        self.adj[u].push((v, e, true));
        self.adj[v].push((u, e, false));
        e
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &(w, e, fwd) in &self.adj[v] {
                    let r = self.res[e][usize::from(!fwd)];
                    if r > 0 && !seen[w] {
                        seen[w] = true;
                        prev[w] = Some((v, e, fwd));
                        q.push_back(w);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while let Some((u, e, fwd)) = prev[v] {
                push = push.min(self.res[e][usize::from(!fwd)]);
                v = u;
            }
            let mut v = t;
            while let Some((u, e, fwd)) = prev[v] {
                self.res[e][usize::from(!fwd)] -= push;
                self.res[e][usize::from(fwd)] += push;
                v = u;
            }
            total += push;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, e, fwd) in &self.adj[v] {
                if self.res[e][usize::from(!fwd)] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

const BIG: i64 = i64::MAX / 8;

/// Maximum flow by augmenting paths; the value is cross-checked against the
/// capacity of the saturated cut found afterwards.
pub fn oracle_max_flow(g: &Graph, s: VertexId, t: VertexId) -> Result<(i64, Vec<i64>)> {
    let caps = g.capacities().ok_or(Error::MissingCapacities)?;
    if s == t || s >= g.vertex_count() || t >= g.vertex_count() {
        return Err(Error::Invalid(format!("bad terminals s={s}, t={t}")));
    }
    let mut ek = Ek::new(g.vertex_count());
    for (e, u, v) in g.edges() {
        ek.add(u, v, caps[e], caps[e]);
    }
    let value = ek.run(s, t);
    let side = ek.reachable(s);
    let cut: i64 = g.edges().filter(|&(_, u, v)| side[u] != side[v]).map(|(e, _, _)| caps[e]).sum();
    assert_eq!(cut, value, "augmenting-path value disagrees with its cut");
    let flows = (0..g.edge_count()).map(|e| caps[e] - ek.res[e][0]).collect();
    Ok((value, flows))
}

/// Min-cut value of every nontrivial terminal bipartition, keyed by the
/// mask of the side containing terminal 0.
pub fn oracle_external_flow(g: &Graph, t: &TerminalSet) -> Result<BTreeMap<u32, i64>> {
    let caps = g.capacities().ok_or(Error::MissingCapacities)?;
    let k = t.len();
    let n = g.vertex_count();
    let mut out = BTreeMap::new();
    for side in bipartitions(k) {
        let mut ek = Ek::new(n + 2);
        for (e, u, v) in g.edges() {
            ek.add(u, v, caps[e], caps[e]);
        }
        for (i, &v) in t.as_slice().iter().enumerate() {
            if side >> i & 1 == 1 {
                ek.add(n, v, BIG, 0);
            } else {
                ek.add(v, n + 1, BIG, 0);
            }
        }
        out.insert(side, ek.run(n, n + 1));
    }
    Ok(out)
}

/// Masks of the side containing terminal 0, for all `2^(k-1) - 1`
/// nontrivial bipartitions.
pub fn bipartitions(k: usize) -> Vec<u32> {
    if k < 2 {
        return Vec::new();
    }
    (0..1u32 << k).filter(|&m| m & 1 == 1 && m != (1 << k) - 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn ts(g: &Graph, v: &[usize]) -> TerminalSet {
        TerminalSet::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn pattern_examples() {
        let e = named::path(2);
        assert_eq!(oracle_matching_pattern(&e, &ts(&e, &[0, 1])).unwrap(), MatchingPattern::new(2, [0, 3]));
        let p = named::path(3);
        assert_eq!(oracle_matching_pattern(&p, &ts(&p, &[0, 2])).unwrap(), MatchingPattern::new(2, [1, 2]));
        let t = named::complete(3);
        assert_eq!(
            oracle_matching_pattern(&t, &ts(&t, &[0, 1, 2])).unwrap(),
            MatchingPattern::new(3, [0, 3, 5, 6])
        );
    }

    #[test]
    fn perfect_matching_examples() {
        assert_eq!(oracle_perfect_matching(&named::complete(4)).unwrap().unwrap().len(), 2);
        assert!(oracle_perfect_matching(&named::cycle(5)).unwrap().is_none());
        let w = named::wagner();
        let m = oracle_perfect_matching(&w).unwrap().unwrap();
        assert!(m.is_perfect(&w));
        assert!(matches!(oracle_perfect_matching(&named::path(23)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn min_weight_examples() {
        let c4 = Graph::from_weighted_edges(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)]).unwrap();
        let (w, m) = oracle_min_weight_pm(&c4).unwrap().unwrap();
        assert_eq!((w, m.edges().to_vec()), (4, vec![0, 2]));
        let one = Graph::from_weighted_edges(2, &[(0, 1, -5)]).unwrap();
        assert_eq!(oracle_min_weight_pm(&one).unwrap().unwrap().0, -5);
        assert!(oracle_min_weight_pm(&named::path(2)).is_err());
    }

    #[test]
    fn flow_examples() {
        let e = Graph::from_capacitated_edges(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(oracle_max_flow(&e, 0, 1).unwrap().0, 5);
        let two = Graph::from_capacitated_edges(4, &[(0, 1, 3), (1, 3, 9), (0, 2, 8), (2, 3, 4)]).unwrap();
        assert_eq!(oracle_max_flow(&two, 0, 3).unwrap().0, 7);
        assert!(matches!(oracle_max_flow(&named::path(2), 0, 1), Err(Error::MissingCapacities)));
    }

    #[test]
    fn external_flow_examples() {
        let star = Graph::from_capacitated_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let cuts = oracle_external_flow(&star, &ts(&star, &[1, 2, 3])).unwrap();
        assert_eq!(cuts.len(), 3);
        assert!(cuts.values().all(|&c| c == 1));
        let k6 = {
            let mut g = named::complete(6);
            g.set_capacities(vec![1; 15]).unwrap();
            g
        };
        assert_eq!(oracle_external_flow(&k6, &ts(&k6, &[0, 1, 2, 3, 4, 5])).unwrap().len(), 31);
    }
}
