//! Left-right planarity test producing a combinatorial embedding.
//!
//! The test runs on the underlying simple graph; parallel edges are threaded
//! back into the rotation next to their representative so that each pair of
//! parallels bounds a digon face.

use std::collections::HashMap;

use super::{EdgeId, Graph, VertexId};
use crate::error::{Error, Result};

/// Cyclic order of incident edge ids around every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Embedding {
    pub rotation: Vec<Vec<EdgeId>>,
}

/// An edge traversed away from `from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: EdgeId,
    pub from: VertexId,
}

impl Dart {
    pub fn to(&self, g: &Graph) -> VertexId {
        g.opposite(self.edge, self.from)
    }
}

pub fn is_planar(g: &Graph) -> bool {
    planar_embedding(g).is_some()
}

/// A planar rotation system for `g`, or `None` if `g` is not planar.
pub fn planar_embedding(g: &Graph) -> Option<Embedding> {
    let n = g.vertex_count();
    let mut simple_of: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut rep: Vec<EdgeId> = Vec::new();
    let mut parallels: Vec<Vec<EdgeId>> = Vec::new();
    let mut adj: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
    for (e, u, v) in g.edges() {
        let key = (u.min(v), u.max(v));
        match simple_of.get(&key) {
            Some(&s) => parallels[s].push(e),
            None => {
                let s = rep.len();
                simple_of.insert(key, s);
                rep.push(e);
                parallels.push(Vec::new());
                adj[u].push((v, s));
                adj[v].push((u, s));
            }
        }
    }
    if n > 2 && rep.len() > 3 * n - 6 {
        return None;
    }
    let mut lr = Lr::new(n, adj);
    let order = lr.run()?;

    // Translate neighbor cycles into edge-id rotations, then thread parallels.
    let mut rotation: Vec<Vec<EdgeId>> = Vec::with_capacity(n);
    for (v, nbrs) in order.into_iter().enumerate() {
        let mut rot = Vec::with_capacity(g.degree(v));
        for w in nbrs {
            let s = simple_of[&(v.min(w), v.max(w))];
            let e = rep[s];
            let ps = &parallels[s];
            if v == g.endpoints(e).0.min(g.endpoints(e).1) {
                // parallels go immediately before the representative here...
                rot.extend(ps.iter().rev());
                rot.push(e);
            } else {
                // ...and immediately after it at the other endpoint.
                rot.push(e);
                rot.extend(ps.iter());
            }
        }
        rotation.push(rot);
    }
    Some(Embedding { rotation })
}

/// Whether `g` has an embedding with every vertex on a single face.
pub fn is_outerplanar(g: &Graph) -> bool {
    outerplanar_embedding(g).is_some()
}

/// Embeds `g` with all vertices on a common face.
pub fn outerplanar_embedding(g: &Graph) -> Option<Embedding> {
    let mut h = g.clone();
    h.clear_weights();
    let apex = h.add_vertex();
    for v in 0..g.vertex_count() {
        h.add_edge(apex, v).expect("valid");
    }
    let emb = planar_embedding(&h)?;
    let m = g.edge_count();
    let rotation = emb.rotation[..g.vertex_count()]
        .iter()
        .map(|r| r.iter().copied().filter(|&e| e < m).collect())
        .collect();
    Some(Embedding { rotation })
}

fn positions(g: &Graph, emb: &Embedding) -> Result<Vec<[usize; 2]>> {
    if emb.rotation.len() != g.vertex_count() {
        return Err(Error::InvalidEmbedding("rotation count differs from vertex count".into()));
    }
    let mut pos = vec![[usize::MAX; 2]; g.edge_count()];
    for (v, rot) in emb.rotation.iter().enumerate() {
        if rot.len() != g.degree(v) {
            return Err(Error::InvalidEmbedding(format!("rotation at {v} has wrong length")));
        }
        for (i, &e) in rot.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(Error::InvalidEmbedding(format!("unknown edge {e}")));
            }
            let (a, b) = g.endpoints(e);
            let slot = if a == v {
                0
            } else if b == v {
                1
            } else {
                return Err(Error::InvalidEmbedding(format!("edge {e} not incident to {v}")));
            };
            if pos[e][slot] != usize::MAX {
                return Err(Error::InvalidEmbedding(format!("edge {e} repeated at {v}")));
            }
            pos[e][slot] = i;
        }
    }
    Ok(pos)
}

/// Facial walks of a rotation system. Leaving `v` along `e` is followed by
/// leaving the far endpoint along the successor of `e` in its rotation.
pub fn faces(g: &Graph, emb: &Embedding) -> Result<Vec<Vec<Dart>>> {
    let pos = positions(g, emb)?;
    let dart_index = |d: Dart| 2 * d.edge + usize::from(g.endpoints(d.edge).0 != d.from);
    let mut seen = vec![false; 2 * g.edge_count()];
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        for from in [g.endpoints(e).0, g.endpoints(e).1] {
            let start = Dart { edge: e, from };
            if seen[dart_index(start)] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                let idx = dart_index(d);
                if seen[idx] {
                    if d != start {
                        return Err(Error::InvalidEmbedding("facial walk does not close".into()));
                    }
                    break;
                }
                seen[idx] = true;
                walk.push(d);
                let v = d.to(g);
                let (a, _) = g.endpoints(d.edge);
                let at = pos[d.edge][usize::from(a != v)];
                let rot = &emb.rotation[v];
                let next = rot[(at + 1) % rot.len()];
                d = Dart { edge: next, from: v };
            }
            out.push(walk);
        }
    }
    Ok(out)
}

/// Euler's formula holds for every connected component.
pub fn is_planar_embedding(g: &Graph, emb: &Embedding) -> bool {
    let Ok(fs) = faces(g, emb) else {
        return false;
    };
    let comps = super::connected_components(g, &[]);
    let mut comp_of = vec![0; g.vertex_count()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut chi = vec![0i64; comps.len()];
    for (i, c) in comps.iter().enumerate() {
        chi[i] += c.len() as i64;
        if c.len() == 1 {
            chi[i] += 1;
        }
    }
    for (_, u, _) in g.edges() {
        chi[comp_of[u]] -= 1;
    }
    for f in &fs {
        chi[comp_of[f[0].from]] += 1;
    }
    chi.iter().all(|&x| x == 2)
}

#[derive(Clone, Copy, Default, Debug)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default, Debug)]
struct Pair {
    left: Interval,
    right: Interval,
}

impl Pair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

const NONE: usize = usize::MAX;

struct Lr {
    n: usize,
    adj: Vec<Vec<(VertexId, usize)>>,
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    oriented: Vec<bool>,
    head: Vec<VertexId>,
    tail: Vec<VertexId>,
    out: Vec<Vec<usize>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    reference: Vec<usize>,
    side: Vec<i64>,
    lowpt_edge: Vec<usize>,
    stack_bottom: Vec<usize>,
    stack: Vec<Pair>,
}

impl Lr {
    fn new(n: usize, adj: Vec<Vec<(VertexId, usize)>>) -> Self {
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Lr {
            n,
            adj,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            oriented: vec![false; m],
            head: vec![0; m],
            tail: vec![0; m],
            out: vec![Vec::new(); n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting: vec![0; m],
            reference: vec![NONE; m],
            side: vec![1; m],
            lowpt_edge: vec![NONE; m],
            stack_bottom: vec![0; m],
            stack: Vec::new(),
        }
    }

    /// Returns the clockwise neighbor order of every vertex.
    fn run(&mut self) -> Option<Vec<Vec<VertexId>>> {
        let mut roots = Vec::new();
        for v in 0..self.n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                roots.push(v);
                self.orient(v);
            }
        }
        for v in 0..self.n {
            let nesting = &self.nesting;
            self.out[v].sort_by_key(|&e| nesting[e]);
        }
        for &r in &roots {
            if !self.test(r) {
                return None;
            }
        }
        for e in 0..self.oriented.len() {
            let s = self.sign(e);
            self.nesting[e] *= s;
        }
        for v in 0..self.n {
            let nesting = &self.nesting;
            self.out[v].sort_by_key(|&e| nesting[e]);
        }
        let mut emb = HalfEdges::new(self.n);
        for v in 0..self.n {
            let mut prev = None;
            for &e in &self.out[v] {
                let w = self.head[e];
                emb.add_cw(v, w, prev);
                prev = Some(w);
            }
        }
        let mut left_ref = vec![NONE; self.n];
        let mut right_ref = vec![NONE; self.n];
        let mut idx = vec![0usize; self.n];
        for &r in &roots {
            let mut stack = vec![r];
            while let Some(&v) = stack.last() {
                let mut descended = false;
                while idx[v] < self.out[v].len() {
                    let e = self.out[v][idx[v]];
                    idx[v] += 1;
                    let w = self.head[e];
                    if self.parent_edge[w] == e {
                        emb.add_first(w, v);
                        left_ref[v] = w;
                        right_ref[v] = w;
                        stack.push(w);
                        descended = true;
                        break;
                    } else if self.side[e] == 1 {
                        emb.add_cw(w, v, Some(right_ref[w]));
                    } else {
                        emb.add_ccw(w, v, Some(left_ref[w]));
                        left_ref[w] = v;
                    }
                }
                if !descended {
                    stack.pop();
                }
            }
        }
        Some((0..self.n).map(|v| emb.order(v)).collect())
    }

    fn orient(&mut self, root: VertexId) {
        let mut stack = vec![root];
        let mut ind = vec![0usize; self.n];
        let mut resumed = vec![false; self.n];
        while let Some(&v) = stack.last() {
            let pe = self.parent_edge[v];
            let mut descended = false;
            while ind[v] < self.adj[v].len() {
                let (w, e) = self.adj[v][ind[v]];
                if !resumed[v] {
                    if self.oriented[e] {
                        ind[v] += 1;
                        continue;
                    }
                    self.oriented[e] = true;
                    self.tail[e] = v;
                    self.head[e] = w;
                    self.out[v].push(e);
                    self.lowpt[e] = self.height[v];
                    self.lowpt2[e] = self.height[v];
                    if self.height[w] == NONE {
                        self.parent_edge[w] = e;
                        self.height[w] = self.height[v] + 1;
                        stack.push(w);
                        resumed[v] = true;
                        descended = true;
                        break;
                    }
                    self.lowpt[e] = self.height[w];
                }
                self.nesting[e] = 2 * self.lowpt[e] as i64;
                if self.lowpt2[e] < self.height[v] {
                    self.nesting[e] += 1;
                }
                if pe != NONE {
                    if self.lowpt[e] < self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[e]);
                        self.lowpt[pe] = self.lowpt[e];
                    } else if self.lowpt[e] > self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[e]);
                    } else {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[e]);
                    }
                }
                ind[v] += 1;
                resumed[v] = false;
            }
            if !descended {
                stack.pop();
            }
        }
    }

    fn test(&mut self, root: VertexId) -> bool {
        let mut stack = vec![root];
        let mut ind = vec![0usize; self.n];
        let mut started = vec![false; self.oriented.len()];
        while let Some(&v) = stack.last() {
            let pe = self.parent_edge[v];
            let mut descended = false;
            while ind[v] < self.out[v].len() {
                let e = self.out[v][ind[v]];
                let w = self.head[e];
                if !started[e] {
                    started[e] = true;
                    self.stack_bottom[e] = self.stack.len();
                    if self.parent_edge[w] == e {
                        stack.push(w);
                        descended = true;
                        break;
                    }
                    self.lowpt_edge[e] = e;
                    self.stack.push(Pair {
                        left: Interval::default(),
                        right: Interval { low: Some(e), high: Some(e) },
                    });
                }
                if self.lowpt[e] < self.height[v] {
                    if e == self.out[v][0] {
                        self.lowpt_edge[pe] = self.lowpt_edge[e];
                    } else if !self.add_constraints(e, pe) {
                        return false;
                    }
                }
                ind[v] += 1;
            }
            if !descended {
                if pe != NONE {
                    self.remove_back_edges(pe);
                }
                stack.pop();
            }
        }
        true
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.is_empty() && self.lowpt[i.high.expect("nonempty")] > self.lowpt[b]
    }

    fn lowest(&self, p: &Pair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low.expect("nonempty")];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low.expect("nonempty")];
        }
        self.lowpt[p.left.low.expect("nonempty")].min(self.lowpt[p.right.low.expect("nonempty")])
    }

    fn set_ref(&mut self, at: Option<usize>, to: Option<usize>) {
        if let Some(at) = at {
            self.reference[at] = to.unwrap_or(NONE);
        }
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = Pair::default();
        loop {
            let mut q = self.stack.pop().expect("return edges were pushed");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qrl = q.right.low.expect("nonempty");
            if self.lowpt[qrl] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.set_ref(p.right.low, q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                self.reference[qrl] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            self.set_ref(p.right.low, q.right.high);
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.set_ref(p.left.low, q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.tail[e];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().expect("checked");
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.head[h] != u {
                    break;
                }
                p.left.high = Some(self.reference[h]).filter(|&r| r != NONE);
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.set_ref(Some(l), p.right.low);
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if self.head[h] != u {
                    break;
                }
                p.right.high = Some(self.reference[h]).filter(|&r| r != NONE);
            }
            if p.right.high.is_none() {
                if let Some(r) = p.right.low {
                    self.set_ref(Some(r), p.left.low);
                    self.side[r] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("e has a return edge");
            let (hl, hr) = (top.left.high, top.right.high);
            let pick = match (hl, hr) {
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                (Some(l), None) => Some(l),
                _ => hr,
            };
            self.set_ref(Some(e), pick);
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        let mut chain = vec![e];
        while self.reference[*chain.last().expect("nonempty")] != NONE {
            let r = self.reference[*chain.last().expect("nonempty")];
            chain.push(r);
        }
        for i in (0..chain.len() - 1).rev() {
            let (a, b) = (chain[i], chain[i + 1]);
            self.side[a] *= self.side[b];
            self.reference[a] = NONE;
        }
        self.side[e]
    }
}

/// Doubly linked cyclic neighbor lists.
struct HalfEdges {
    cw: HashMap<(VertexId, VertexId), VertexId>,
    ccw: HashMap<(VertexId, VertexId), VertexId>,
    first: Vec<Option<VertexId>>,
}

impl HalfEdges {
    fn new(n: usize) -> Self {
        HalfEdges { cw: HashMap::new(), ccw: HashMap::new(), first: vec![None; n] }
    }

    fn add_cw(&mut self, v: VertexId, w: VertexId, reference: Option<VertexId>) {
        match reference {
            None => {
                self.cw.insert((v, w), w);
                self.ccw.insert((v, w), w);
                self.first[v] = Some(w);
            }
            Some(r) => {
                let cw_ref = self.cw[&(v, r)];
                self.cw.insert((v, r), w);
                self.cw.insert((v, w), cw_ref);
                self.ccw.insert((v, cw_ref), w);
                self.ccw.insert((v, w), r);
            }
        }
    }

    fn add_ccw(&mut self, v: VertexId, w: VertexId, reference: Option<VertexId>) {
        match reference {
            None => self.add_cw(v, w, None),
            Some(r) => {
                let ccw_ref = self.ccw[&(v, r)];
                self.add_cw(v, w, Some(ccw_ref));
                if self.first[v] == Some(r) {
                    self.first[v] = Some(w);
                }
            }
        }
    }

    fn add_first(&mut self, v: VertexId, w: VertexId) {
        let r = self.first[v];
        self.add_ccw(v, w, r);
    }

    fn order(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        if let Some(f) = self.first[v] {
            let mut cur = f;
            loop {
                out.push(cur);
                cur = self.cw[&(v, cur)];
                if cur == f {
                    break;
                }
            }
        }
        out
    }
}
