//! Random instances built as clique-sums of planar pieces and the family's
//! sporadic pieces, optionally with a planted perfect matching.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{faces, named, planar_embedding, Embedding, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    K33Free,
    K5Free,
    Planar,
    BoundedTreewidth,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::K33Free, Family::K5Free, Family::Planar, Family::BoundedTreewidth];

    pub fn name(self) -> &'static str {
        match self {
            Family::K33Free => "k33-free",
            Family::K5Free => "k5-free",
            Family::Planar => "planar",
            Family::BoundedTreewidth => "bounded-tw",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    /// Target vertex count; planted instances round odd targets up.
    pub n: usize,
    pub family: Family,
    pub seed: u64,
    pub plant_pm: bool,
    /// Inclusive range for edge weights.
    pub weights: Option<(i64, i64)>,
    /// Inclusive range for edge capacities.
    pub capacities: Option<(i64, i64)>,
}

impl GenSpec {
    pub fn new(n: usize, family: Family, seed: u64) -> Self {
        GenSpec { n, family, seed, plant_pm: false, weights: None, capacities: None }
    }

    pub fn planted(mut self) -> Self {
        self.plant_pm = true;
        self
    }

    pub fn with_weights(mut self, lo: i64, hi: i64) -> Self {
        self.weights = Some((lo, hi));
        self
    }

    pub fn with_capacities(mut self, lo: i64, hi: i64) -> Self {
        self.capacities = Some((lo, hi));
        self
    }
}

/// The eight-vertex Möbius ladder: an 8-cycle plus its four long diagonals.
pub fn wagner_graph() -> Graph {
    named::wagner()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Stacked triangulation on `n` vertices, randomized by edge flips.
fn triangulation(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n < 3 {
        return (1..n).map(|v| (v - 1, v)).collect();
    }
    let mut tris: Vec<[usize; 3]> = vec![[0, 1, 2]];
    for v in 3..n {
        let t = rng.gen_range(0..tris.len());
        let [a, b, c] = tris[t];
        tris[t] = [a, b, v];
        tris.push([b, c, v]);
        tris.push([a, c, v]);
    }
    // the outer face of the first triangle stays fixed
    let mut on_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (x, y) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            on_edge.entry(key(x, y)).or_default().push(i);
        }
    }
    let mut edges: Vec<(usize, usize)> = on_edge.keys().copied().collect();
    edges.sort_unstable();
    for _ in 0..2 * n {
        let ei = rng.gen_range(0..edges.len());
        let (a, b) = edges[ei];
        let ts = &on_edge[&(a, b)];
        if ts.len() != 2 {
            continue;
        }
        let (t1, t2) = (ts[0], ts[1]);
        let other = |t: [usize; 3]| t.into_iter().find(|&x| x != a && x != b).unwrap();
        let (c, d) = (other(tris[t1]), other(tris[t2]));
        if on_edge.contains_key(&key(c, d)) {
            continue;
        }
        let degree = |v: usize| on_edge.keys().filter(|&&(x, y)| x == v || y == v).count();
        if n <= 64 && (degree(a) <= 3 || degree(b) <= 3) {
            continue;
        }
        for (x, y) in [(a, c), (b, c), (a, d), (b, d)] {
            let list = on_edge.get_mut(&key(x, y)).unwrap();
            list.retain(|&t| t != t1 && t != t2);
        }
        on_edge.remove(&(a, b));
        tris[t1] = [a, c, d];
        tris[t2] = [b, c, d];
        for (t, x) in [(t1, a), (t2, b)] {
            for y in [c, d] {
                on_edge.get_mut(&key(x, y)).unwrap().push(t);
            }
        }
        on_edge.insert(key(c, d), vec![t1, t2]);
        edges[ei] = key(c, d);
    }
    edges.sort_unstable();
    edges
}

/// Keeps a random spanning tree and each other edge with probability
/// `1 - drop`.
fn thin(n: usize, edges: Vec<(usize, usize)>, drop: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n == 0 {
        return edges;
    }
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut keep = vec![false; edges.len()];
    let mut seen = vec![false; n];
    let start = rng.gen_range(0..n);
    seen[start] = true;
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(i);
        let mut nb = adj[v].clone();
        nb.shuffle(rng);
        for (w, e) in nb {
            if !seen[w] {
                seen[w] = true;
                keep[e] = true;
                frontier.push(w);
            }
        }
    }
    edges.into_iter().enumerate().filter(|&(i, _)| keep[i] || !rng.gen_bool(drop)).map(|(_, e)| e).collect()
}

/// Connected planar graph on `n` vertices with an embedding.
pub fn random_planar(n: usize, seed: u64) -> (Graph, Embedding) {
    let mut rng = stream(seed, 0);
    let edges = thin(n, triangulation(n, &mut rng), 0.25, &mut rng);
    let g = Graph::from_edges(n, &edges).expect("valid edges");
    let emb = planar_embedding(&g).expect("planar by construction");
    (g, emb)
}

/// A piece ready for gluing.
#[derive(Clone, Debug)]
struct PieceGraph {
    g: Graph,
    /// Planted pairs; vertices outside them are free.
    matching: Vec<(usize, usize)>,
    /// Facial triangles, for planar pieces.
    triangles: Vec<[usize; 3]>,
}

impl PieceGraph {
    fn new(g: Graph, matching: Vec<(usize, usize)>) -> Self {
        let triangles = facial_triangles(&g);
        PieceGraph { g, matching, triangles }
    }
}

fn facial_triangles(g: &Graph) -> Vec<[usize; 3]> {
    let Some(emb) = planar_embedding(g) else { return Vec::new() };
    let mut out: Vec<[usize; 3]> = faces(g, &emb)
        .unwrap_or_default()
        .into_iter()
        .filter(|f| f.len() == 3)
        .map(|f| {
            let mut t = [f[0].from, f[1].from, f[2].from];
            t.sort_unstable();
            t
        })
        .filter(|t| t[0] != t[1] && t[1] != t[2])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Planar graph on `s` vertices (even) whose vertex pairs `(v, v + s/2)`
/// form a perfect matching: a planar graph on `s/2` vertices with every
/// vertex split in two along a contiguous arc of its rotation.
fn planar_with_pm(s: usize, rng: &mut ChaCha8Rng) -> PieceGraph {
    let m = s / 2;
    let base_edges = thin(m, triangulation(m, rng), 0.05, rng);
    let base = Graph::from_edges(m, &base_edges).expect("valid");
    let emb = planar_embedding(&base).expect("planar");
    let mut side = vec![[0usize; 2]; base.edge_count()];
    for v in 0..m {
        let rot = &emb.rotation[v];
        let d = rot.len();
        let (start, len) = if d == 0 { (0, 0) } else { (rng.gen_range(0..d), rng.gen_range(0..=d)) };
        for i in 0..len {
            let e = rot[(start + i) % d];
            let (a, _) = base.endpoints(e);
            side[e][usize::from(a != v)] = m;
        }
    }
    let mut edges: Vec<(usize, usize)> = base
        .edges()
        .map(|(e, u, v)| (u + side[e][0], v + side[e][1]))
        .collect();
    edges.extend((0..m).map(|v| (v, v + m)));
    let g = Graph::from_edges(s, &edges).expect("valid");
    PieceGraph::new(g, (0..m).map(|v| (v, v + m)).collect())
}

fn planar_piece(s: usize, plant: bool, rng: &mut ChaCha8Rng) -> PieceGraph {
    if plant {
        planar_with_pm(s, rng)
    } else {
        let edges = thin(s, triangulation(s, rng), 0.08, rng);
        PieceGraph::new(Graph::from_edges(s, &edges).expect("valid"), Vec::new())
    }
}

/// Adds a free vertex `z` adjacent to both ends of an edge `xy` on some
/// face, matched in the piece when `plant` is set, so `xyz` is a facial
/// triangle. Returns `[x, y, z]`.
fn add_free_vertex(p: &mut PieceGraph, plant: bool, rng: &mut ChaCha8Rng) -> Option<[usize; 3]> {
    let candidates: Vec<(usize, usize)> = if plant {
        p.matching.iter().copied().filter(|&(a, b)| p.g.has_edge(a, b)).collect()
    } else {
        p.g.edges().map(|(_, u, v)| (u, v)).collect()
    };
    let &(x, y) = candidates.choose(rng)?;
    let z = p.g.add_vertex();
    p.g.add_edge(x, z).expect("valid");
    p.g.add_edge(y, z).expect("valid");
    p.triangles = facial_triangles(&p.g);
    Some([x, y, z])
}

fn sporadic(kind: usize) -> PieceGraph {
    match kind {
        0 => PieceGraph::new(named::complete(5), vec![(1, 2), (3, 4)]),
        1 => PieceGraph::new(wagner_graph(), (0..4).map(|i| (2 * i, 2 * i + 1)).collect()),
        2 => PieceGraph::new(named::complete_bipartite(3, 3), vec![(0, 3), (1, 4), (2, 5)]),
        _ => PieceGraph::new(named::complete(6), vec![(0, 1), (2, 3), (4, 5)]),
    }
}

struct Assembly {
    n: usize,
    edges: Vec<(usize, usize)>,
    present: HashMap<(usize, usize), ()>,
    mate: Vec<Option<usize>>,
    triangles: Vec<[usize; 3]>,
    plant: bool,
}

impl Assembly {
    /// Adds `p` with piece vertex `glue[i].0` identified with host vertex
    /// `glue[i].1`.
    fn add(&mut self, p: &PieceGraph, glue: &[(usize, usize)]) {
        let mut map = vec![usize::MAX; p.g.vertex_count()];
        for &(x, a) in glue {
            map[x] = a;
        }
        for v in map.iter_mut() {
            if *v == usize::MAX {
                *v = self.n;
                self.n += 1;
                self.mate.push(None);
            }
        }
        for (_, u, v) in p.g.edges() {
            let k = key(map[u], map[v]);
            if self.present.insert(k, ()).is_none() {
                self.edges.push(k);
            }
        }
        if self.plant {
            for &(a, b) in &p.matching {
                let (x, y) = (map[a], map[b]);
                match (self.mate[x], self.mate[y]) {
                    (None, None) => {
                        self.mate[x] = Some(y);
                        self.mate[y] = Some(x);
                    }
                    (mx, _) => debug_assert_eq!(mx, Some(y), "glued pair must already be matched together"),
                }
            }
        }
        self.triangles.extend(p.triangles.iter().map(|t| {
            let mut u = [map[t[0]], map[t[1]], map[t[2]]];
            u.sort_unstable();
            u
        }));
    }

    fn matched_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(u, v)| !self.plant || self.mate[u] == Some(v)).collect()
    }
}

/// A random graph of the family on about `spec.n` vertices.
pub fn random_in_family(spec: &GenSpec) -> Graph {
    let plant = spec.plant_pm;
    let target = if plant { spec.n + spec.n % 2 } else { spec.n };
    let mut rng = stream(spec.seed, 0);
    let mut asm = Assembly {
        n: 0,
        edges: Vec::new(),
        present: HashMap::new(),
        mate: Vec::new(),
        triangles: Vec::new(),
        plant,
    };
    let max_piece = 14;
    let mut piece_id = 1u64;
    while asm.n < target || asm.n == 0 {
        let mut prng = stream(spec.seed, piece_id);
        piece_id += 1;
        let r = target - asm.n.min(target);
        if asm.n == 0 {
            let s = r.clamp(1, max_piece);
            let s = if plant { s.max(2) & !1 } else { s };
            let p = first_piece(spec.family, s, plant, &mut prng);
            asm.add(&p, &[]);
            continue;
        }
        glue_next(&mut asm, spec.family, r, max_piece, &mut prng, &mut rng);
    }
    finish(asm, spec, &mut rng)
}

fn first_piece(family: Family, s: usize, plant: bool, rng: &mut ChaCha8Rng) -> PieceGraph {
    let kind = match family {
        Family::BoundedTreewidth if s >= 6 => Some(3),
        Family::K5Free if s >= 8 && rng.gen_bool(0.5) => Some(1),
        _ => None,
    };
    match kind {
        Some(k) => sporadic(k),
        None => planar_piece(s, plant, rng),
    }
}

/// Glues one new piece bringing at most `r` new vertices.
fn glue_next(asm: &mut Assembly, family: Family, r: usize, max_piece: usize, prng: &mut ChaCha8Rng, rng: &mut ChaCha8Rng) {
    let plant = asm.plant;
    let sites = asm.matched_edges();
    let roll: f64 = prng.gen();
    // sporadic pieces first, when they fit
    let sporadic_kind = match family {
        Family::K33Free if roll < 0.3 => Some(0),
        Family::K5Free if roll < 0.25 => Some(1),
        Family::BoundedTreewidth => Some([0, 1, 2, 3][prng.gen_range(0..4)]),
        _ => None,
    };
    if let Some(kind) = sporadic_kind {
        let p = sporadic(kind);
        let size = p.g.vertex_count();
        if kind == 0 && plant {
            // K5 is odd: hang it by one vertex left free in the piece
            if size - 1 <= r {
                let a = rng.gen_range(0..asm.n);
                asm.add(&p, &[(0, a)]);
                return;
            }
        } else if size - 2 <= r && !sites.is_empty() {
            let &(a, b) = sites.choose(rng).unwrap();
            let (x, y) = p.matching.first().copied().unwrap_or((0, 1));
            asm.add(&p, &[(x, a), (y, b)]);
            return;
        }
    }
    let three_sum = matches!(family, Family::K5Free | Family::Planar) && prng.gen_bool(0.5);
    if three_sum {
        let usable: Vec<[usize; 3]> = asm
            .triangles
            .iter()
            .copied()
            .filter(|t| !plant || [(0, 1), (1, 2), (0, 2)].iter().any(|&(i, j)| asm.mate[t[i]] == Some(t[j])))
            .collect();
        // a 3-sum piece of s + 1 vertices brings s - 2 new ones
        let s = (r + 2).min(max_piece);
        let s = if plant { s & !1 } else { s };
        if let (Some(&t), true) = (usable.choose(rng), s >= 4) {
            let mut p = planar_piece(s, plant, prng);
            if let Some([x, y, z]) = add_free_vertex(&mut p, plant, prng) {
                let (a, b, c) = orient(t, &asm.mate, plant);
                asm.triangles.retain(|u| *u != t);
                p.triangles.retain(|u| {
                    let mut w = [x, y, z];
                    w.sort_unstable();
                    *u != w
                });
                asm.add(&p, &[(x, a), (y, b), (z, c)]);
                return;
            }
        }
    }
    let one_sum = prng.gen_bool(0.1) || sites.is_empty();
    if one_sum {
        // a free vertex of the piece is identified with any host vertex
        let s = r.min(max_piece);
        let s = if plant { s & !1 } else { s };
        if s >= 2 || (!plant && s >= 1) {
            let mut p = planar_piece(s, plant, prng);
            let z = p.g.add_vertex();
            let w = prng.gen_range(0..s);
            p.g.add_edge(w, z).expect("valid");
            p.triangles = facial_triangles(&p.g);
            let a = rng.gen_range(0..asm.n);
            asm.add(&p, &[(z, a)]);
            return;
        }
    }
    // 2-sum along a (matched) host edge
    let s = (r + 2).min(max_piece);
    let s = if plant { s & !1 } else { s };
    let s = s.max(3 - usize::from(plant));
    let p = planar_piece(s, plant, prng);
    let &(a, b) = sites.choose(rng).expect("host has an edge");
    let (x, y) = if plant {
        p.matching[prng.gen_range(0..p.matching.len())]
    } else {
        let es: Vec<(usize, usize)> = p.g.edges().map(|(_, u, v)| (u, v)).collect();
        es[prng.gen_range(0..es.len())]
    };
    asm.add(&p, &[(x, a), (y, b)]);
}

/// Orders a host triangle as `(a, b, c)` with `ab` matched when planting.
fn orient(t: [usize; 3], mate: &[Option<usize>], plant: bool) -> (usize, usize, usize) {
    if plant {
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
            if mate[t[i]] == Some(t[j]) {
                return (t[i], t[j], t[k]);
            }
        }
    }
    (t[0], t[1], t[2])
}

fn finish(asm: Assembly, spec: &GenSpec, rng: &mut ChaCha8Rng) -> Graph {
    let n = asm.n;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = asm.edges.iter().map(|&(u, v)| key(perm[u], perm[v])).collect();
    edges.sort_unstable();
    let mut g = Graph::from_edges(n, &edges).expect("valid edges");
    if let Some((lo, hi)) = spec.weights {
        g.set_weights(edges.iter().map(|_| rng.gen_range(lo..=hi)).collect()).expect("one per edge");
    }
    if let Some((lo, hi)) = spec.capacities {
        g.set_capacities(edges.iter().map(|_| rng.gen_range(lo..=hi)).collect()).expect("one per edge");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose, DecomposeConfig};
    use crate::decompose::treewidth_at_most;
    use crate::graph::is_planar;
    use crate::solve::blossom::perfect_matching;

    #[test]
    fn wagner_facts() {
        let w = wagner_graph();
        assert_eq!((w.vertex_count(), w.edge_count()), (8, 12));
        assert!((0..8).all(|v| w.degree(v) == 3));
        assert!(!is_planar(&w));
        assert!(treewidth_at_most(&w, 4).is_some());
    }

    #[test]
    fn planar_sizes() {
        for n in [3, 4, 50] {
            let (g, _) = random_planar(n, 11);
            assert_eq!(g.vertex_count(), n);
            assert!(is_planar(&g));
        }
        assert_eq!(random_planar(3, 1).0.edge_count(), 3);
    }

    #[test]
    fn seeds_repeat() {
        let spec = GenSpec::new(60, Family::K5Free, 9).planted().with_weights(-5, 5);
        let a = random_in_family(&spec);
        let b = random_in_family(&spec);
        assert_eq!(a, b);
    }

    #[test]
    fn families_decompose_and_plant() {
        for family in Family::ALL {
            for seed in 0..6 {
                for n in [7, 12, 40, 100] {
                    let g = random_in_family(&GenSpec::new(n, family, seed).planted());
                    assert_eq!(g.vertex_count(), n + n % 2, "{family} {seed} {n}");
                    assert!(perfect_matching(&g).is_some(), "{family} {seed} {n}");
                    decompose(&g, &DecomposeConfig::default()).unwrap();
                    if family == Family::Planar {
                        assert!(is_planar(&g));
                    }
                    let h = random_in_family(&GenSpec::new(n, family, seed));
                    assert!(h.vertex_count() >= n);
                    decompose(&h, &DecomposeConfig::default()).unwrap();
                }
            }
        }
    }
}
