//! Small networks realizing each matching pattern on at most three
//! terminals, found by exhaustive search and frozen in a golden file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::pattern::{matching_pattern, MatchingPattern};
use crate::error::{Error, Result};
use crate::graph::{is_outerplanar, is_planar, is_planar_embedding, outerplanar_embedding, Embedding, Graph, TerminalSet};

/// Largest vertex count tried by the search.
pub const SEARCH_MAX_VERTICES: usize = 7;
/// Largest edge count tried by the search.
pub const SEARCH_MAX_EDGES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MimickingNetwork {
    /// Terminal `i` is vertex `i`; the rest are nonterminals.
    pub graph: Graph,
    pub pattern: MatchingPattern,
    /// Rotation system with every vertex on one face.
    pub embedding: Embedding,
    /// Each member subset is covered by exactly one matching.
    pub unique: bool,
    /// Member subsets with a nonempty matching, ordered so that each
    /// matching has an edge unused by all later ones.
    pub peel_order: Option<Vec<u32>>,
}

impl MimickingNetwork {
    pub fn terminal_count(&self) -> usize {
        self.pattern.terminal_count()
    }

    pub fn terminals(&self) -> TerminalSet {
        TerminalSet::new(&self.graph, (0..self.terminal_count()).collect()).expect("terminals in range")
    }

    /// The network with no vertices, realizing `{∅}` on zero terminals.
    pub fn empty() -> Self {
        MimickingNetwork {
            graph: Graph::new(0),
            pattern: MatchingPattern::new(0, [0]),
            embedding: Embedding::default(),
            unique: true,
            peel_order: Some(Vec::new()),
        }
    }

    /// The unique matching (edge ids) covering nonterminals plus `subset`.
    pub fn matching_for(&self, subset: u32) -> Option<Vec<usize>> {
        let small = Small::new(&self.graph);
        small.unique_matching(self.cover_mask(subset))
    }

    fn cover_mask(&self, subset: u32) -> u32 {
        let n = self.graph.vertex_count();
        let k = self.terminal_count();
        let nonterm = ((1u32 << n) - 1) & !((1u32 << k) - 1);
        nonterm | subset
    }
}

/// Bitmask view of a graph with at most 16 vertices.
pub(crate) struct Small {
    n: usize,
    adj: Vec<u32>,
    ends: Vec<(usize, usize)>,
}

impl Small {
    pub(crate) fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        assert!(n <= 16);
        let mut adj = vec![0u32; n];
        let ends: Vec<(usize, usize)> = g.edges().map(|(_, u, v)| (u, v)).collect();
        for &(u, v) in &ends {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Small { n, adj, ends }
    }

    fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut adj = vec![0u32; n];
        for &(u, v) in pairs {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Small { n, adj, ends: pairs.to_vec() }
    }

    /// Number of perfect matchings of every induced subgraph, capped at 2.
    fn pm_counts(&self) -> Vec<u8> {
        let size = 1usize << self.n;
        let mut c = vec![0u8; size];
        c[0] = 1;
        for mask in 1..size {
            if (mask as u32).count_ones() % 2 == 1 {
                continue;
            }
            let v = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << v);
            let mut nb = self.adj[v] & rest as u32;
            let mut total = 0u8;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                total = total.saturating_add(c[rest & !(1 << w)]).min(2);
            }
            c[mask] = total;
        }
        c
    }

    fn pattern(&self, k: usize, counts: &[u8]) -> MatchingPattern {
        let nonterm = ((1u32 << self.n) - 1) & !((1u32 << k) - 1);
        MatchingPattern::new(k, (0..1u32 << k).filter(|&x| counts[(nonterm | x) as usize] > 0))
    }

    /// Edge indices of the only perfect matching of the subgraph on `mask`.
    pub(crate) fn unique_matching(&self, mask: u32) -> Option<Vec<usize>> {
        let counts = self.pm_counts();
        if counts[mask as usize] != 1 {
            return None;
        }
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            let rest = m & !(1 << v);
            let e = self
                .ends
                .iter()
                .position(|&(a, b)| {
                    let w = if a == v { b } else if b == v { a } else { return false };
                    rest >> w & 1 == 1 && counts[(rest & !(1 << w)) as usize] == 1
                })
                .expect("count promised a matching");
            let (a, b) = self.ends[e];
            out.push(e);
            m &= !(1 << a) & !(1 << b);
        }
        out.sort_unstable();
        Some(out)
    }
}

/// Orders member subsets so each matching keeps a private edge with
/// respect to all later ones. The empty matching is left out: its weight
/// is always zero.
pub(crate) fn peel_order(matchings: &BTreeMap<u32, Vec<usize>>) -> Option<Vec<u32>> {
    let mut left: Vec<u32> = matchings.iter().filter(|(_, m)| !m.is_empty()).map(|(&x, _)| x).collect();
    let mut order = Vec::new();
    while !left.is_empty() {
        let pick = left.iter().position(|&x| {
            matchings[&x].iter().any(|e| left.iter().all(|&y| y == x || !matchings[&y].contains(e)))
        })?;
        order.push(left.remove(pick));
    }
    Some(order)
}

/// Terminals can all sit on the outer face: adding an apex joined to them
/// keeps the graph planar.
fn terminals_outer(g: &Graph, k: usize) -> bool {
    let mut h = g.clone();
    let apex = h.add_vertex();
    for t in 0..k {
        h.add_edge(apex, t).expect("in range");
    }
    is_planar(&h)
}

struct Candidate {
    graph: Graph,
    strict: bool,
}

fn evaluate(n: usize, k: usize, pairs: &[(usize, usize)], target: &MatchingPattern) -> Option<Candidate> {
    let small = Small::from_pairs(n, pairs);
    let counts = small.pm_counts();
    if small.pattern(k, &counts) != *target {
        return None;
    }
    let g = Graph::from_edges(n, pairs).expect("valid pairs");
    if !is_outerplanar(&g) || !terminals_outer(&g, k) {
        return Some(Candidate { graph: g, strict: false });
    }
    let nonterm = ((1u32 << n) - 1) & !((1u32 << k) - 1);
    let mut matchings = BTreeMap::new();
    for x in target.subsets() {
        match small.unique_matching(nonterm | x) {
            Some(m) => {
                matchings.insert(x, m);
            }
            None => return Some(Candidate { graph: g, strict: false }),
        }
    }
    let strict = peel_order(&matchings).is_some();
    Some(Candidate { graph: g, strict })
}

/// Next combination of `m` indices out of `total`, in lexicographic order.
fn next_combination(c: &mut [usize], total: usize) -> bool {
    let m = c.len();
    let Some(i) = (0..m).rev().find(|&i| c[i] < total - m + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..m {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// A smallest network realizing `p` exactly (terminal `i` = vertex `i`),
/// ordered by vertex count, edge count, then edge list. Networks that are
/// outerplanar with terminals outside, uniquely matched and peelable are
/// preferred; failing that, the first network realizing `p` is returned.
pub fn search_mimicking_network(p: &MatchingPattern, max_size: usize) -> Result<MimickingNetwork> {
    let k = p.terminal_count();
    if p.is_empty() {
        return Err(Error::NotFound { pattern: p.to_string(), max_size });
    }
    if k == 0 {
        return Ok(MimickingNetwork::empty());
    }
    let mut fallback: Option<Graph> = None;
    for n in k.max(1)..=max_size {
        // parity: nonterminals plus any member have even size
        let sample = p.subsets()[0];
        if (n - k + sample.count_ones() as usize) % 2 == 1 {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for m in 0..=pairs.len().min(SEARCH_MAX_EDGES) {
            let mut found: Option<Candidate> = None;
            let mut c: Vec<usize> = (0..m).collect();
            loop {
                let chosen: Vec<(usize, usize)> = c.iter().map(|&i| pairs[i]).collect();
                if let Some(cand) = evaluate(n, k, &chosen, p) {
                    if cand.strict {
                        found = Some(cand);
                        break;
                    }
                    if fallback.is_none() {
                        fallback = Some(cand.graph);
                    }
                }
                if !next_combination(&mut c, pairs.len()) {
                    break;
                }
            }
            if let Some(cand) = found {
                return finish(cand.graph, *p);
            }
        }
    }
    match fallback {
        Some(g) => finish(g, *p),
        None => Err(Error::NotFound { pattern: p.to_string(), max_size }),
    }
}

fn finish(graph: Graph, pattern: MatchingPattern) -> Result<MimickingNetwork> {
    let embedding = outerplanar_embedding(&graph).unwrap_or_default();
    let (unique, peel) = properties(&graph, &pattern);
    Ok(MimickingNetwork { graph, pattern, embedding, unique, peel_order: peel })
}

fn properties(graph: &Graph, pattern: &MatchingPattern) -> (bool, Option<Vec<u32>>) {
    let small = Small::new(graph);
    let n = graph.vertex_count();
    let k = pattern.terminal_count();
    let nonterm = ((1u32 << n) - 1) & !((1u32 << k) - 1);
    let mut matchings = BTreeMap::new();
    for x in pattern.subsets() {
        match small.unique_matching(nonterm | x) {
            Some(m) => {
                matchings.insert(x, m);
            }
            None => return (false, None),
        }
    }
    (true, peel_order(&matchings))
}

/// Canonical patterns realized by some graph on at most `max_vertices`
/// vertices with `k` terminals.
pub fn enumerate_realizable_patterns_upto(k: usize, max_vertices: usize) -> Vec<MatchingPattern> {
    let mut found = std::collections::BTreeSet::new();
    for n in k.max(1)..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let total = 1u64 << pairs.len();
        let chunk: Vec<MatchingPattern> = (0..total)
            .into_par_iter()
            .fold(std::collections::BTreeSet::new, |mut acc, bits| {
                let chosen: Vec<(usize, usize)> =
                    pairs.iter().enumerate().filter(|&(i, _)| bits >> i & 1 == 1).map(|(_, &p)| p).collect();
                let small = Small::from_pairs(n, &chosen);
                let p = small.pattern(k, &small.pm_counts());
                if !p.is_empty() {
                    acc.insert(p.canonical().0);
                }
                acc
            })
            .reduce(std::collections::BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
            .into_iter()
            .collect();
        found.extend(chunk);
    }
    found.into_iter().collect()
}

/// Default exhaustion bound: `k + 3` vertices (at most seven).
pub fn enumerate_realizable_patterns(k: usize) -> Vec<MatchingPattern> {
    enumerate_realizable_patterns_upto(k, (k + 3).min(SEARCH_MAX_VERTICES))
}

/// One network per realizable canonical pattern on 1 to 3 terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<MatchingPattern, MimickingNetwork>,
}

const GOLDEN: &str = include_str!("../../data/catalog.txt");

impl Catalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MimickingNetwork> {
        self.entries.values()
    }

    pub fn of_size(&self, k: usize) -> Vec<&MimickingNetwork> {
        self.entries.values().filter(|n| n.terminal_count() == k).collect()
    }

    /// Network for a canonical pattern.
    pub fn get(&self, canonical: &MatchingPattern) -> Option<&MimickingNetwork> {
        self.entries.get(canonical)
    }

    /// Searches every realizable class afresh.
    pub fn rebuild() -> Result<Catalog> {
        let mut entries = BTreeMap::new();
        for k in 1..=3 {
            for p in enumerate_realizable_patterns(k) {
                let net = search_mimicking_network(&p, SEARCH_MAX_VERTICES)?;
                entries.insert(p, net);
            }
        }
        Ok(Catalog { entries })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# k n pattern edges rotation; one network per canonical matching pattern").unwrap();
        for net in self.entries.values() {
            s.push_str(&network_line(net));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let net = parse_network_line(line).map_err(|msg| Error::Parse { line: i + 1, msg })?;
            entries.insert(net.pattern, net);
        }
        Ok(Catalog { entries })
    }
}

/// `k=3 n=5 pattern=0,3 edges=0-3,1-4 rotation=0:0|1:1|...`
pub fn network_line(net: &MimickingNetwork) -> String {
    let pattern: Vec<String> = net.pattern.subsets().iter().map(|x| x.to_string()).collect();
    let edges: Vec<String> = net.graph.edges().map(|(_, u, v)| format!("{u}-{v}")).collect();
    let rotation: Vec<String> = net
        .embedding
        .rotation
        .iter()
        .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!(
        "k={} n={} pattern={} edges={} rotation={}",
        net.terminal_count(),
        net.graph.vertex_count(),
        pattern.join(","),
        edges.join(","),
        rotation.join("|")
    )
}

pub fn parse_network_line(line: &str) -> std::result::Result<MimickingNetwork, String> {
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got {tok}"))?;
        fields.insert(key, val);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing field {k}"));
    let num = |s: &str| s.parse::<usize>().map_err(|e| format!("{s}: {e}"));
    let list = |s: &str| -> std::result::Result<Vec<usize>, String> {
        if s.is_empty() {
            Ok(Vec::new())
        } else {
            s.split(',').map(num).collect()
        }
    };
    let k = num(get("k")?)?;
    let n = num(get("n")?)?;
    if k > 3 || n > 16 || k > n {
        return Err(format!("unsupported sizes k={k} n={n}"));
    }
    let pattern = MatchingPattern::new(k, list(get("pattern")?)?.into_iter().map(|x| x as u32));
    let mut pairs = Vec::new();
    let edges = get("edges")?;
    if !edges.is_empty() {
        for e in edges.split(',') {
            let (a, b) = e.split_once('-').ok_or_else(|| format!("bad edge {e}"))?;
            pairs.push((num(a)?, num(b)?));
        }
    }
    let graph = Graph::from_edges(n, &pairs).map_err(|e| e.to_string())?;
    let rotation: Vec<Vec<usize>> = match get("rotation")? {
        "" if n <= 1 => vec![Vec::new(); n],
        r => r.split('|').map(list).collect::<std::result::Result<_, _>>()?,
    };
    let embedding = Embedding { rotation };
    if embedding.rotation.len() != n || !is_planar_embedding(&graph, &embedding) {
        return Err("rotation is not a planar embedding".into());
    }
    let (unique, peel_order) = properties(&graph, &pattern);
    Ok(MimickingNetwork { graph, pattern, embedding, unique, peel_order })
}

/// The golden catalog shipped with the crate.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| Catalog::parse(GOLDEN).expect("golden catalog parses"))
}

/// `g` on `t` has the same matching pattern as `net`, up to relabeling
/// the terminals.
pub fn verify_equivalence(g: &Graph, t: &TerminalSet, net: &MimickingNetwork) -> bool {
    t.len() == net.terminal_count() && matching_pattern(g, t).canonical().0 == net.pattern.canonical().0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_examples() {
        let edge = search_mimicking_network(&MatchingPattern::new(2, [0, 3]), 7).unwrap();
        assert_eq!(edge.graph.vertex_count(), 2);
        assert_eq!(edge.graph.edge_count(), 1);
        let pendant = search_mimicking_network(&MatchingPattern::new(1, [1]), 7).unwrap();
        assert_eq!((pendant.graph.vertex_count(), pendant.graph.edge_count()), (2, 1));
        let bare = search_mimicking_network(&MatchingPattern::new(3, [0]), 7).unwrap();
        assert_eq!((bare.graph.vertex_count(), bare.graph.edge_count()), (3, 0));
    }

    #[test]
    fn realizable_counts_small() {
        assert_eq!(enumerate_realizable_patterns(1).len(), 2);
        assert_eq!(enumerate_realizable_patterns(2).len(), 5);
    }

    #[test]
    fn line_round_trip() {
        let net = search_mimicking_network(&MatchingPattern::new(3, [3, 5, 6]), 7).unwrap();
        let back = parse_network_line(&network_line(&net)).unwrap();
        assert_eq!(back, net);
    }
}
