//! The two-colored clique-sum tree: pieces alternate with cliques of at most
//! three vertices along which neighbouring pieces are glued.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use super::separators::{adjacency, articulation_points, component_labels, Separator};
use super::treewidth::{treewidth_at_most, TreeDecomposition, DEFAULT_WIDTH_BOUND};
use crate::error::{Error, Result};
use crate::graph::{faces, planar_embedding, EdgeId, Embedding, Graph, VertexId};
use crate::heavy_path::RootedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceLabel {
    Planar,
    BoundedTreewidth,
}

impl PieceLabel {
    pub fn name(self) -> &'static str {
        match self {
            PieceLabel::Planar => "planar",
            PieceLabel::BoundedTreewidth => "bounded-treewidth",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Piece {
    /// Sorted original vertex ids; local id `i` is `vertices[i]`.
    pub vertices: Vec<VertexId>,
    /// Real edges owned by this piece.
    pub edges: Vec<EdgeId>,
    pub label: PieceLabel,
    /// Simple graph on local ids: real adjacencies plus every pair inside an
    /// adjacent clique.
    pub torso: Graph,
    pub embedding: Option<Embedding>,
    pub td: Option<TreeDecomposition>,
}

impl Piece {
    pub fn local(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

#[derive(Clone, Debug)]
pub struct Clique {
    pub vertices: Vec<VertexId>,
    /// Real edges between clique vertices, owned here.
    pub kept: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub enum Node {
    Piece(Piece),
    Clique(Clique),
}

impl Node {
    pub fn vertices(&self) -> &[VertexId] {
        match self {
            Node::Piece(p) => &p.vertices,
            Node::Clique(c) => &c.vertices,
        }
    }

    pub fn is_piece(&self) -> bool {
        matches!(self, Node::Piece(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposeConfig {
    pub width_bound: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { width_bound: DEFAULT_WIDTH_BOUND }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionTree {
    pub nodes: Vec<Node>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
    /// Separators used for splitting, in order.
    pub family: Vec<Separator>,
}

impl DecompositionTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn piece(&self, id: usize) -> Option<&Piece> {
        match &self.nodes[id] {
            Node::Piece(p) => Some(p),
            Node::Clique(_) => None,
        }
    }

    pub fn piece_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.nodes[i].is_piece()).collect()
    }

    pub fn clique_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.nodes[i].is_piece()).collect()
    }

    /// Vertices shared with the parent: the parent clique for a piece, the
    /// clique itself for a clique, nothing at the root.
    pub fn attachment(&self, id: usize) -> &[VertexId] {
        match (&self.nodes[id], self.parent[id]) {
            (_, None) => &[],
            (Node::Clique(c), Some(_)) => &c.vertices,
            (Node::Piece(_), Some(p)) => self.nodes[p].vertices(),
        }
    }

    pub fn rooted(&self) -> RootedTree {
        RootedTree { root: self.root, children: self.children.clone() }
    }

    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|v| self.parent[v].map(|p| (p, v))).collect()
    }

    /// The same tree hung from another node.
    pub fn rerooted(&self, root: usize) -> DecompositionTree {
        let r = RootedTree::from_edges(self.len(), &self.tree_edges(), root);
        let mut parent = vec![None; self.len()];
        for (v, cs) in r.children.iter().enumerate() {
            for &c in cs {
                parent[c] = Some(v);
            }
        }
        DecompositionTree {
            nodes: self.nodes.clone(),
            parent,
            children: r.children,
            root,
            family: self.family.clone(),
        }
    }

    /// Smallest-id piece containing `v`.
    pub fn piece_of(&self, v: VertexId) -> Option<usize> {
        (0..self.len()).find(|&i| self.piece(i).is_some_and(|p| p.local(v).is_some()))
    }

    /// Union of all owned edges over the original vertex set.
    pub fn reassemble(&self, g: &Graph) -> Graph {
        let mut owned: Vec<EdgeId> = Vec::new();
        for node in &self.nodes {
            match node {
                Node::Piece(p) => owned.extend(&p.edges),
                Node::Clique(c) => owned.extend(&c.kept),
            }
        }
        owned.sort_unstable();
        let mut out = Graph::new(g.vertex_count());
        for e in owned {
            let (u, v) = g.endpoints(e);
            out.add_edge(u, v).expect("edge of g");
        }
        if let Some(w) = g.weights() {
            out.set_weights(w.to_vec()).expect("same edge count");
        }
        if let Some(c) = g.capacities() {
            out.set_capacities(c.to_vec()).expect("same edge count");
        }
        out
    }

    /// Checks the clique-sum conditions and edge bookkeeping.
    pub fn check_structure(&self, g: &Graph) -> std::result::Result<(), String> {
        let n = g.vertex_count();
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                if self.nodes[v].is_piece() == self.nodes[p].is_piece() {
                    return Err(format!("tree edge {p}-{v} joins two nodes of one color"));
                }
                let (clique, piece) = if self.nodes[v].is_piece() { (p, v) } else { (v, p) };
                let pv = self.nodes[piece].vertices();
                if !self.nodes[clique].vertices().iter().all(|x| pv.contains(x)) {
                    return Err(format!("clique {clique} not inside neighbouring piece {piece}"));
                }
            }
        }
        // nodes holding a vertex form a subtree: exactly one of them has a
        // parent not holding it
        let mut tops = vec![0usize; n];
        for (id, node) in self.nodes.iter().enumerate() {
            for &v in node.vertices() {
                let above = self.parent[id].is_some_and(|p| self.nodes[p].vertices().contains(&v));
                if !above {
                    tops[v] += 1;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| tops[v] != 1) {
            return Err(format!("vertex {v} has {} top nodes", tops[v]));
        }
        let mut owner = vec![usize::MAX; g.edge_count()];
        for (id, node) in self.nodes.iter().enumerate() {
            let list = match node {
                Node::Piece(p) => &p.edges,
                Node::Clique(c) => &c.kept,
            };
            for &e in list {
                if owner[e] != usize::MAX {
                    return Err(format!("edge {e} owned twice"));
                }
                owner[e] = id;
                let (u, v) = g.endpoints(e);
                if !(node.vertices().contains(&u) && node.vertices().contains(&v)) {
                    return Err(format!("edge {e} owned by node {id} missing an endpoint"));
                }
            }
        }
        if let Some(e) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(format!("edge {e} has no owner"));
        }
        for id in self.piece_ids() {
            let p = self.piece(id).unwrap();
            if p.label == PieceLabel::Planar {
                let emb = p.embedding.as_ref().ok_or("planar piece without embedding")?;
                let tri = facial_triangles(&p.torso, emb);
                for c in self.neighbours(id) {
                    let k = self.nodes[c].vertices();
                    if k.len() == 3 {
                        let mut loc: Vec<usize> = k.iter().map(|&v| p.local(v).unwrap()).collect();
                        loc.sort_unstable();
                        if p.vertices.len() > 3 && !tri.contains(&[loc[0], loc[1], loc[2]]) {
                            return Err(format!("clique {c} is not a face of piece {id}"));
                        }
                    }
                }
            } else if !p.td.as_ref().is_some_and(|td| td.is_valid(&p.torso)) {
                return Err(format!("piece {id} lacks a valid tree decomposition"));
            }
        }
        Ok(())
    }

    pub fn neighbours(&self, id: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.children[id].clone();
        out.extend(self.parent[id]);
        out.sort_unstable();
        out
    }

    /// Deterministic text dump of nodes, labels and edge lists.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(s, "tree nodes={} root={} separators={}", self.len(), self.root, self.family.len()).unwrap();
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = self.parent[id].map_or("-".to_string(), |p| p.to_string());
            match node {
                Node::Piece(p) => writeln!(
                    s,
                    "node {id} piece {} parent={parent} vertices=[{}] edges=[{}]",
                    p.label.name(),
                    join(&p.vertices),
                    join(&p.edges)
                ),
                Node::Clique(c) => writeln!(
                    s,
                    "node {id} clique parent={parent} vertices=[{}] kept=[{}]",
                    join(&c.vertices),
                    join(&c.kept)
                ),
            }
            .unwrap();
        }
        s
    }
}

/// Sorted local triples bounding a face of length three.
pub fn facial_triangles(torso: &Graph, emb: &Embedding) -> HashSet<[usize; 3]> {
    let mut out = HashSet::new();
    if let Ok(fs) = faces(torso, emb) {
        for f in fs {
            if f.len() == 3 {
                let mut t = [f[0].from, f[1].from, f[2].from];
                t.sort_unstable();
                out.insert(t);
            }
        }
    }
    out
}

/// Mutable decomposition under construction.
struct Builder<'a> {
    g: &'a Graph,
    adj: Vec<Vec<usize>>,
    sets: Vec<Vec<VertexId>>,
    is_clique: Vec<bool>,
    tree: Vec<BTreeSet<usize>>,
    family: Vec<Separator>,
    scratch: Vec<usize>,
    roots: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl<'a> Builder<'a> {
    fn new(g: &'a Graph) -> Self {
        let mut b = Builder {
            g,
            adj: adjacency(g),
            sets: Vec::new(),
            is_clique: Vec::new(),
            tree: Vec::new(),
            family: Vec::new(),
            scratch: vec![NONE; g.vertex_count()],
            roots: Vec::new(),
        };
        let none = vec![false; g.vertex_count()];
        let (label, count) = component_labels(&b.adj, &none);
        let mut comps = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            comps[l].push(v);
        }
        if comps.is_empty() {
            comps.push(Vec::new());
        }
        for c in comps {
            let id = b.add_node(c, false);
            b.roots.push(id);
        }
        b
    }

    fn add_node(&mut self, set: Vec<VertexId>, clique: bool) -> usize {
        self.sets.push(set);
        self.is_clique.push(clique);
        self.tree.push(BTreeSet::new());
        self.sets.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        self.tree[a].insert(b);
        self.tree[b].insert(a);
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.tree[a].remove(&b);
        self.tree[b].remove(&a);
    }

    /// Local torso adjacency of piece `p`.
    fn torso_adj(&mut self, p: usize) -> Vec<Vec<usize>> {
        let set = &self.sets[p];
        for (i, &v) in set.iter().enumerate() {
            self.scratch[v] = i;
        }
        let mut adj: Vec<Vec<usize>> = set
            .iter()
            .map(|&v| self.adj[v].iter().map(|&w| self.scratch[w]).filter(|&j| j != NONE).collect())
            .collect();
        for &c in &self.tree[p] {
            let k = &self.sets[c];
            for (i, &a) in k.iter().enumerate() {
                for &b in &k[i + 1..] {
                    let (x, y) = (self.scratch[a], self.scratch[b]);
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
        }
        for &v in set {
            self.scratch[v] = NONE;
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Splits piece `p` along `s` if `s` separates its torso. Returns the
    /// resulting pieces, `p` first.
    fn split(&mut self, p: usize, s: &[VertexId]) -> Option<Vec<usize>> {
        let set = self.sets[p].clone();
        let local_s: Vec<usize> = s.iter().map(|v| set.binary_search(v).ok()).collect::<Option<_>>()?;
        let adj = self.torso_adj(p);
        let mut removed = vec![false; set.len()];
        for &i in &local_s {
            removed[i] = true;
        }
        let (label, count) = component_labels(&adj, &removed);
        if count < 2 {
            return None;
        }
        // which separator vertices each component sees
        let mut sees = vec![0u8; count];
        for (bit, &i) in local_s.iter().enumerate() {
            for &w in &adj[i] {
                if label[w] != NONE {
                    sees[label[w]] |= 1 << bit;
                }
            }
        }
        let all = (1u8 << s.len()) - 1;
        let full: Vec<usize> = (0..count).filter(|&c| sees[c] == all).collect();
        let Some(&first) = full.first() else {
            return None;
        };
        // parts: full components first, then the others grouped by what they see
        let mut order: Vec<usize> = full.clone();
        order.extend((0..count).filter(|&c| sees[c] != all));
        let mut slot = vec![0; count];
        for (k, &c) in order.iter().enumerate() {
            slot[c] = k;
        }
        let mut parts: Vec<Vec<VertexId>> = order
            .iter()
            .map(|&c| (0..s.len()).filter(|&b| sees[c] >> b & 1 == 1).map(|b| s[b]).collect())
            .collect();
        for (i, &l) in label.iter().enumerate() {
            if l != NONE {
                parts[slot[l]].push(set[i]);
            }
        }
        for part in &mut parts {
            part.sort_unstable();
        }
        let neighbours: Vec<usize> = self.tree[p].iter().copied().collect();
        let mut ids = vec![p];
        self.sets[p] = parts[0].clone();
        for part in parts.into_iter().skip(1) {
            ids.push(self.add_node(part, false));
        }
        for &k in &neighbours {
            let side = self.sets[k]
                .iter()
                .map(|v| label[set.binary_search(v).unwrap()])
                .find(|&l| l != NONE)
                .map_or(0, |l| slot[l]);
            if side != 0 {
                self.unlink(p, k);
                self.link(ids[side], k);
            }
        }
        debug_assert_eq!(slot[first], 0);
        if full.len() >= 2 {
            let existing = neighbours.iter().copied().find(|&c| self.sets[c] == s);
            let c = existing.unwrap_or_else(|| self.add_node(s.to_vec(), true));
            for &id in &ids[..full.len()] {
                self.link(id, c);
            }
            self.family.push(Separator::new(s.to_vec()));
        }
        // components missing part of the separator hang off the first piece
        // by the smaller clique they do see
        let mut groups: Vec<(u8, usize)> = Vec::new();
        for (k, &c) in order.iter().enumerate().skip(full.len()) {
            let clique = match groups.iter().find(|(m, _)| *m == sees[c]) {
                Some(&(_, node)) => node,
                None => {
                    let vs: Vec<VertexId> = (0..s.len()).filter(|&b| sees[c] >> b & 1 == 1).map(|b| s[b]).collect();
                    self.family.push(Separator::new(vs.clone()));
                    let node = self.add_node(vs, true);
                    self.link(p, node);
                    groups.push((sees[c], node));
                    node
                }
            };
            self.link(ids[k], clique);
        }
        Some(ids)
    }

    /// Next separator of `p` following the stage/cursor order: cut vertices,
    /// then pairs `{x, y}` with `x >= cursor`, then triples from pairs at or
    /// after the cursor.
    fn next_separator(&mut self, p: usize, mut st: Stage) -> Option<(Vec<VertexId>, Stage)> {
        let set = self.sets[p].clone();
        let k = set.len();
        let adj = self.torso_adj(p);
        let mut removed = vec![false; k];
        if let Stage::Cut = st {
            if let Some(&a) = articulation_points(&adj, &removed).first() {
                return Some((vec![set[a]], st));
            }
            st = Stage::Pair(0);
        }
        if let Stage::Pair(from) = st {
            if k >= 4 {
                for x in (0..k).filter(|&x| set[x] >= from) {
                    removed[x] = true;
                    let cut = articulation_points(&adj, &removed);
                    removed[x] = false;
                    if let Some(&y) = cut.first() {
                        return Some((vec![set[x], set[y]], Stage::Pair(set[x])));
                    }
                }
            }
            st = Stage::Triple(0, 0);
        }
        if let Stage::Triple(fx, fy) = st {
            if k >= 5 {
                for x in 0..k {
                    if set[x] < fx {
                        continue;
                    }
                    removed[x] = true;
                    for y in x + 1..k {
                        if (set[x], set[y]) < (fx, fy) {
                            continue;
                        }
                        removed[y] = true;
                        let cut = articulation_points(&adj, &removed);
                        removed[y] = false;
                        if let Some(&z) = cut.first() {
                            return Some((vec![set[x], set[y], set[z]], Stage::Triple(set[x], set[y])));
                        }
                    }
                    removed[x] = false;
                }
            }
        }
        None
    }

    fn run_incremental(&mut self) {
        let mut work: VecDeque<(usize, Stage)> = self.roots.iter().map(|&r| (r, Stage::Cut)).collect();
        while let Some((p, st)) = work.pop_front() {
            if let Some((s, st)) = self.next_separator(p, st) {
                let ids = self.split(p, &s).expect("separator splits its piece");
                for id in ids {
                    work.push_back((id, st));
                }
            }
        }
    }

    fn apply_family(&mut self, family: &[Separator]) {
        for s in family {
            let candidates: Vec<usize> = (0..self.sets.len())
                .filter(|&i| !self.is_clique[i] && s.vertices().iter().all(|v| self.sets[i].binary_search(v).is_ok()))
                .collect();
            for p in candidates {
                if self.split(p, s.vertices()).is_some() {
                    break;
                }
            }
        }
    }

    fn torso_graph(&mut self, p: usize) -> Graph {
        let adj = self.torso_adj(p);
        let mut g = Graph::new(adj.len());
        for (a, list) in adj.iter().enumerate() {
            for &b in list {
                if a < b {
                    g.add_edge(a, b).expect("local ids");
                }
            }
        }
        g
    }

    /// Splits planar pieces along attached triangles that are not faces.
    fn split_nonfacial(&mut self) {
        let mut queue: VecDeque<usize> = (0..self.sets.len()).filter(|&i| !self.is_clique[i]).collect();
        while let Some(p) = queue.pop_front() {
            if self.sets[p].len() <= 3 {
                continue;
            }
            let torso = self.torso_graph(p);
            let Some(emb) = planar_embedding(&torso) else { continue };
            let tri = facial_triangles(&torso, &emb);
            let set = self.sets[p].clone();
            let bad = self.tree[p].iter().copied().find(|&c| {
                let k = &self.sets[c];
                if k.len() != 3 {
                    return false;
                }
                let mut loc: Vec<usize> = k.iter().map(|v| set.binary_search(v).unwrap()).collect();
                loc.sort_unstable();
                !tri.contains(&[loc[0], loc[1], loc[2]])
            });
            if let Some(c) = bad {
                let s = self.sets[c].clone();
                if let Some(ids) = self.split(p, &s) {
                    queue.extend(ids);
                }
            }
        }
    }

    fn finish(mut self, cfg: &DecomposeConfig) -> Result<DecompositionTree> {
        self.split_nonfacial();
        if self.roots.len() > 1 {
            let empty = self.add_node(Vec::new(), true);
            let roots = self.roots.clone();
            for r in roots {
                self.link(r, empty);
            }
        }
        // renumber in breadth-first order from the first component's piece
        let count = self.sets.len();
        let mut order = Vec::with_capacity(count);
        let mut new_id = vec![NONE; count];
        let mut old_parent = vec![NONE; count];
        new_id[self.roots[0]] = 0;
        order.push(self.roots[0]);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in &self.tree[v] {
                if new_id[w] == NONE {
                    new_id[w] = order.len();
                    old_parent[w] = v;
                    order.push(w);
                }
            }
        }
        debug_assert_eq!(order.len(), count);
        let mut parent = vec![None; count];
        let mut children = vec![Vec::new(); count];
        for &old in &order {
            if old_parent[old] != NONE {
                let (c, p) = (new_id[old], new_id[old_parent[old]]);
                parent[c] = Some(p);
                children[p].push(c);
            }
        }
        for cs in &mut children {
            cs.sort_unstable();
        }

        let mut owned_by: Vec<Vec<EdgeId>> = vec![Vec::new(); count];
        {
            let n = self.g.vertex_count();
            let mut cliques_of: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut pieces_of: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (new, &old) in order.iter().enumerate() {
                for &v in &self.sets[old] {
                    if self.is_clique[old] {
                        cliques_of[v].push(new);
                    } else {
                        pieces_of[v].push(new);
                    }
                }
            }
            for (e, u, v) in self.g.edges() {
                let owner = cliques_of[u]
                    .iter()
                    .copied()
                    .find(|c| cliques_of[v].contains(c))
                    .or_else(|| pieces_of[u].iter().copied().find(|p| pieces_of[v].contains(p)))
                    .expect("some node holds both ends");
                owned_by[owner].push(e);
            }
        }

        let mut nodes = Vec::with_capacity(count);
        for (new, &old) in order.iter().enumerate() {
            let vertices = self.sets[old].clone();
            if self.is_clique[old] {
                nodes.push(Node::Clique(Clique { vertices, kept: std::mem::take(&mut owned_by[new]) }));
                continue;
            }
            let torso = self.torso_graph(old);
            let (label, embedding, td) = match planar_embedding(&torso) {
                Some(emb) => (PieceLabel::Planar, Some(emb), None),
                None => match treewidth_at_most(&torso, cfg.width_bound) {
                    Some(td) => (PieceLabel::BoundedTreewidth, None, Some(td)),
                    None => {
                        return Err(Error::NotInFamily(format!(
                            "piece on {} vertices is neither planar nor of treewidth at most {}",
                            vertices.len(),
                            cfg.width_bound
                        )))
                    }
                },
            };
            nodes.push(Node::Piece(Piece {
                vertices,
                edges: std::mem::take(&mut owned_by[new]),
                label,
                torso,
                embedding,
                td,
            }));
        }
        Ok(DecompositionTree { nodes, parent, children, root: 0, family: self.family })
    }
}

#[derive(Clone, Copy, Debug)]
enum Stage {
    Cut,
    Pair(VertexId),
    Triple(VertexId, VertexId),
}

/// Splits along separators of size one, two and three, in that order, until
/// no piece torso has any. The separators used form a laminar family.
pub fn decompose(g: &Graph, cfg: &DecomposeConfig) -> Result<DecompositionTree> {
    let mut b = Builder::new(g);
    b.run_incremental();
    b.finish(cfg)
}

/// Splits along the members of `family` in order, then along attached
/// triangles that are not faces of their planar piece.
pub fn build_decomposition_tree(g: &Graph, family: &[Separator]) -> Result<DecompositionTree> {
    build_decomposition_tree_with(g, family, &DecomposeConfig::default())
}

pub fn build_decomposition_tree_with(
    g: &Graph,
    family: &[Separator],
    cfg: &DecomposeConfig,
) -> Result<DecompositionTree> {
    let mut b = Builder::new(g);
    b.apply_family(family);
    b.finish(cfg)
}
