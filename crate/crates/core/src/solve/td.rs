//! Minimum-weight perfect matching over a tree decomposition.
//!
//! The state at a bag is the set of its vertices already matched. Each edge
//! is handled at one bag containing both ends; a vertex must be matched by
//! the time it is forgotten.

use crate::decompose::treewidth::TreeDecomposition;
use crate::graph::{EdgeId, Graph, Matching, VertexId};

type Table = Vec<Option<i64>>;

struct ChildStep {
    child: usize,
    before: Table,
    /// projected child states, with the child mask realizing each
    proj: Vec<Option<(i64, u32)>>,
}

struct EdgeStep {
    edge: EdgeId,
    bits: u32,
    weight: i64,
    before: Table,
}

struct BagDp {
    verts: Vec<VertexId>,
    children: Vec<ChildStep>,
    edges: Vec<EdgeStep>,
    table: Table,
}

fn improve(slot: &mut Option<i64>, c: i64) {
    if slot.is_none_or(|o| c < o) {
        *slot = Some(c);
    }
}

/// A minimum-weight perfect matching of `g[vertices]`, using `td` (a tree
/// decomposition of `g`). Unweighted graphs are treated as all-zero.
pub fn td_min_weight_pm_on(g: &Graph, td: &TreeDecomposition, vertices: &[VertexId]) -> Option<Matching> {
    if vertices.len() % 2 == 1 {
        return None;
    }
    if vertices.is_empty() {
        return Some(Matching::new(Vec::new()));
    }
    let mut keep = vec![false; g.vertex_count()];
    for &v in vertices {
        keep[v] = true;
    }
    let nb = td.bags.len();
    let children = td.children();
    let bags: Vec<Vec<VertexId>> =
        td.bags.iter().map(|b| b.iter().copied().filter(|&v| keep[v]).collect()).collect();

    // each usable edge goes to the first bag (by id) holding both ends
    let mut edges_at: Vec<Vec<EdgeId>> = vec![Vec::new(); nb];
    for (e, u, v) in g.edges() {
        if keep[u] && keep[v] {
            let b = bags.iter().position(|b| b.contains(&u) && b.contains(&v)).expect("edge covered by a bag");
            edges_at[b].push(e);
        }
    }

    let mut post = Vec::with_capacity(nb);
    let mut stack = vec![(0usize, false)];
    while let Some((b, done)) = stack.pop() {
        if done {
            post.push(b);
        } else {
            stack.push((b, true));
            for &c in children[b].iter().rev() {
                stack.push((c, false));
            }
        }
    }

    let mut dp: Vec<Option<BagDp>> = (0..nb).map(|_| None).collect();
    for &b in &post {
        let verts = bags[b].clone();
        let local = |v: VertexId| verts.iter().position(|&x| x == v);
        let size = 1usize << verts.len();
        let mut table: Table = vec![None; size];
        table[0] = Some(0);
        let mut steps = Vec::new();
        for &c in &children[b] {
            let cdp = dp[c].as_ref().expect("child done");
            let cverts = &cdp.verts;
            let mut forget = 0u32;
            let mut map = Vec::with_capacity(cverts.len());
            for (i, &v) in cverts.iter().enumerate() {
                match local(v) {
                    Some(j) => map.push(Some(j)),
                    None => {
                        forget |= 1 << i;
                        map.push(None);
                    }
                }
            }
            let mut proj: Vec<Option<(i64, u32)>> = vec![None; size];
            for (cm, val) in cdp.table.iter().enumerate() {
                let Some(val) = *val else { continue };
                let cm = cm as u32;
                if cm & forget != forget {
                    continue;
                }
                let m = map
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| cm >> i & 1 == 1)
                    .filter_map(|(_, j)| *j)
                    .fold(0u32, |m, j| m | 1 << j);
                if proj[m as usize].is_none_or(|(o, _)| val < o) {
                    proj[m as usize] = Some((val, cm));
                }
            }
            let mut next: Table = vec![None; size];
            for (m1, a) in table.iter().enumerate() {
                let Some(a) = *a else { continue };
                let free = (size - 1) & !m1;
                let mut m2 = free;
                loop {
                    if let Some((bv, _)) = proj[m2] {
                        improve(&mut next[m1 | m2], a + bv);
                    }
                    if m2 == 0 {
                        break;
                    }
                    m2 = (m2 - 1) & free;
                }
            }
            steps.push(ChildStep { child: c, before: std::mem::replace(&mut table, next), proj });
        }
        let mut esteps = Vec::new();
        for &e in &edges_at[b] {
            let (u, v) = g.endpoints(e);
            let bits = (1u32 << local(u).unwrap()) | (1u32 << local(v).unwrap());
            let w = g.weight(e);
            let mut next = table.clone();
            for (m, a) in table.iter().enumerate() {
                if let Some(a) = *a {
                    if m as u32 & bits == 0 {
                        improve(&mut next[m | bits as usize], a + w);
                    }
                }
            }
            esteps.push(EdgeStep { edge: e, bits, weight: w, before: std::mem::replace(&mut table, next) });
        }
        dp[b] = Some(BagDp { verts, children: steps, edges: esteps, table });
    }

    let root = dp[0].as_ref().unwrap();
    let full = (1usize << root.verts.len()) - 1;
    root.table[full]?;
    let mut out = Vec::new();
    let mut work = vec![(0usize, full as u32)];
    while let Some((b, mut m)) = work.pop() {
        let bag = dp[b].as_ref().unwrap();
        let mut val = bag.table[m as usize].expect("reachable state");
        for step in bag.edges.iter().rev() {
            if step.before[m as usize] == Some(val) {
                continue;
            }
            let prev = m & !step.bits;
            debug_assert!(m & step.bits == step.bits);
            debug_assert_eq!(step.before[prev as usize].map(|x| x + step.weight), Some(val));
            out.push(step.edge);
            m = prev;
            val -= step.weight;
        }
        for step in bag.children.iter().rev() {
            let mut sub = m;
            let found = loop {
                if let (Some((cv, cm)), Some(rest)) = (step.proj[sub as usize], step.before[(m & !sub) as usize]) {
                    if cv + rest == val {
                        break Some((sub, cv, cm));
                    }
                }
                if sub == 0 {
                    break None;
                }
                sub = (sub - 1) & m;
            };
            let (sub, cv, cm) = found.expect("table promised a split");
            work.push((step.child, cm));
            m &= !sub;
            val -= cv;
        }
        debug_assert_eq!((m, val), (0, 0));
    }
    Some(Matching::new(out))
}
