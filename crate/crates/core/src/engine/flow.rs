//! Maximum st-flow: the tree path from the piece of `s` to the piece of `t`
//! is the last path processed; every other heavy path is collapsed into a
//! flow-mimicking network on its attachment. Path nodes are combined
//! pairwise on a balanced tree instead of through matrices.

use rayon::prelude::*;

use super::{in_pool, EngineConfig};
use crate::decompose::{decompose, DecompositionTree, Node};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, TerminalSet, VertexId};
use crate::heavy_path::{descendant_counts, floor_log2};
use crate::mimic::flow::{flow_mimick, glue_mimicks, planar_flow_mimick, FlowMimick};
use crate::solve::flow::{net_outflow, route_supplies};

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub tree: DecompositionTree,
    pub value: i64,
    /// Signed flow per input edge along its stored orientation.
    pub flows: Vec<i64>,
    /// Paths handled at each rank stage; the s-t path comes last.
    pub stages: Vec<(u32, Vec<usize>)>,
    /// Final mimick of every path, as text.
    pub mimicks: Vec<String>,
}

/// Where a union graph's parts come from.
#[derive(Clone, Copy, Debug)]
enum Source {
    /// Another node of the same path's combine tree.
    Local(usize),
    /// The final mimick of another path.
    Path(usize),
}

/// A union graph and the mimick built from it.
#[derive(Clone, Debug)]
struct FlowNode {
    union: Graph,
    /// Input vertex per union vertex, where it is one.
    labels: Vec<Option<VertexId>>,
    /// Union vertex of each mimick terminal.
    terminals: Vec<usize>,
    /// Union edge to input edge.
    real: Vec<(EdgeId, EdgeId)>,
    /// Per part: source, union vertex of each part vertex, union edge of
    /// each part edge.
    parts: Vec<(Source, Vec<usize>, Vec<EdgeId>)>,
    mimick: FlowMimick,
}

#[derive(Clone, Debug)]
struct PathFlow {
    nodes: Vec<FlowNode>,
    root: usize,
}

fn union_vertex(labels: &[Option<VertexId>], v: VertexId) -> usize {
    labels.iter().position(|&l| l == Some(v)).expect("label present")
}

fn mimick_of(union: &Graph, labels: &[Option<VertexId>], terminals: &[VertexId], planar: bool) -> Result<(Vec<usize>, FlowMimick)> {
    let local: Vec<usize> = terminals.iter().map(|&v| union_vertex(labels, v)).collect();
    let ts = TerminalSet::new(union, local.clone())?;
    let mut m = if ts.len() < 2 {
        trivial_mimick(ts.len())
    } else if planar {
        planar_flow_mimick(union, &ts)?
    } else {
        flow_mimick(union, &ts)?
    };
    m.labels = terminals.to_vec();
    Ok((local, m))
}

fn trivial_mimick(k: usize) -> FlowMimick {
    let mut graph = Graph::new(k);
    graph.set_capacities(Vec::new()).expect("no edges");
    FlowMimick { graph, labels: (0..k).collect(), external_cuts: Default::default() }
}

fn sorted_union(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let mut v: Vec<VertexId> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

struct Ctx<'a> {
    g: &'a Graph,
    tree: &'a DecompositionTree,
    paths: Vec<Vec<usize>>,
    /// Per path node: (side toward the leaf or t, side toward the root or s).
    sides: Vec<Vec<(Vec<VertexId>, Vec<VertexId>)>>,
    attached: Vec<Vec<usize>>,
}

fn node_flow(ctx: &Ctx, node: usize, done: &[Option<PathFlow>], terminals: &[VertexId]) -> Result<FlowNode> {
    let tree = ctx.tree;
    let vertices = tree.nodes[node].vertices();
    let edges = match &tree.nodes[node] {
        Node::Piece(p) => &p.edges,
        Node::Clique(c) => &c.kept,
    };
    let mut union = Graph::new(vertices.len());
    union.set_capacities(Vec::new()).expect("no edges");
    let mut labels: Vec<Option<VertexId>> = vertices.iter().map(|&v| Some(v)).collect();
    let local = |v: VertexId| vertices.binary_search(&v).expect("vertex of the node");
    let mut real = Vec::with_capacity(edges.len());
    for &e in edges {
        let (u, v) = ctx.g.endpoints(e);
        let id = union.add_capacitated_edge(local(u), local(v), ctx.g.capacity(e).unwrap_or(0))?;
        real.push((id, e));
    }
    let mut parts = Vec::new();
    for &p in &ctx.attached[node] {
        let pf = done[p].as_ref().expect("attached path processed");
        let m = &pf.nodes[pf.root].mimick;
        let mut vmap = Vec::with_capacity(m.graph.vertex_count());
        for x in 0..m.graph.vertex_count() {
            if x < m.labels.len() {
                vmap.push(local(m.labels[x]));
            } else {
                vmap.push(union.add_vertex());
                labels.push(None);
            }
        }
        let emap = m
            .graph
            .edges()
            .map(|(e, u, v)| union.add_capacitated_edge(vmap[u], vmap[v], m.graph.capacity(e).unwrap_or(0)))
            .collect::<Result<Vec<_>>>()?;
        parts.push((Source::Path(p), vmap, emap));
    }
    let (terms, mimick) = mimick_of(&union, &labels, terminals, false)?;
    Ok(FlowNode { union, labels, terminals: terms, real, parts, mimick })
}

/// Combines node mimicks `lo..hi` of a path (top-first indices) on a
/// balanced tree; returns the index of the subtree root in `arena`.
fn combine_range(
    sides: &[(Vec<VertexId>, Vec<VertexId>)],
    lo: usize,
    hi: usize,
    arena: &mut Vec<FlowNode>,
    leaves: &[usize],
    final_planar: bool,
) -> Result<usize> {
    if hi - lo == 1 {
        return Ok(leaves[lo]);
    }
    let mid = (lo + hi) / 2;
    let a = combine_range(sides, lo, mid, arena, leaves, false)?;
    let b = combine_range(sides, mid, hi, arena, leaves, false)?;
    // the range's outer sides: rootward side of its first node, leafward
    // side of its last
    let terminals = sorted_union(&sides[lo].1, &sides[hi - 1].0);
    let u = glue_mimicks(&[&arena[a].mimick, &arena[b].mimick]);
    let mut labels: Vec<Option<VertexId>> = u.labels.iter().map(|&l| Some(l)).collect();
    labels.resize(u.graph.vertex_count(), None);
    let (terms, mimick) = mimick_of(&u.graph, &labels, &terminals, final_planar)?;
    let parts = vec![
        (Source::Local(a), u.parts[0].0.clone(), u.parts[0].1.clone()),
        (Source::Local(b), u.parts[1].0.clone(), u.parts[1].1.clone()),
    ];
    arena.push(FlowNode { union: u.graph, labels, terminals: terms, real: Vec::new(), parts, mimick });
    Ok(arena.len() - 1)
}

fn process_path(ctx: &Ctx, p: usize, done: &[Option<PathFlow>], is_root: bool) -> Result<PathFlow> {
    let nodes = &ctx.paths[p];
    let sides = &ctx.sides[p];
    let leaves: Vec<FlowNode> = nodes
        .iter()
        .zip(sides)
        .map(|(&n, (lo, hi))| node_flow(ctx, n, done, &sorted_union(lo, hi)))
        .collect::<Result<_>>()?;
    let count = leaves.len();
    let mut arena = leaves;
    let ids: Vec<usize> = (0..count).collect();
    let root = combine_range(sides, 0, count, &mut arena, &ids, !is_root)?;
    if count == 1 && !is_root && arena[0].mimick.labels.len() == 3 {
        // a lone node gets the same planarity treatment as a combined path
        let n = &arena[0];
        let (_, m) = mimick_of(&n.union, &n.labels, &n.mimick.labels.clone(), true)?;
        arena[0].mimick = m;
    }
    Ok(PathFlow { nodes: arena, root })
}

/// Heavy paths of every subtree hanging off the tree path `spine`, with
/// their ranks; paths are listed in preorder of their tops.
fn hanging_paths(tree: &DecompositionTree, spine: &[usize]) -> (Vec<Vec<usize>>, Vec<u32>) {
    let rooted = tree.rooted();
    let counts = descendant_counts(&rooted);
    let mut on_spine = vec![false; tree.len()];
    for &v in spine {
        on_spine[v] = true;
    }
    let heavy: Vec<Option<usize>> = rooted
        .children
        .iter()
        .map(|cs| cs.iter().copied().min_by_key(|&c| (std::cmp::Reverse(counts[c]), c)))
        .collect();
    let mut paths = Vec::new();
    let mut ranks = Vec::new();
    for v in rooted.preorder() {
        if on_spine[v] {
            continue;
        }
        let parent = tree.parent[v].expect("spine holds the root");
        if !on_spine[parent] && heavy[parent] == Some(v) {
            continue;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(h) = heavy[cur] {
            path.push(h);
            cur = h;
        }
        ranks.push(floor_log2(counts[v]));
        paths.push(path);
    }
    (paths, ranks)
}

fn reverse(ctx: &Ctx, done: &[Option<PathFlow>], root_path: usize, supply: Vec<i64>) -> Result<Vec<i64>> {
    let mut flows = vec![0i64; ctx.g.edge_count()];
    let root = done[root_path].as_ref().expect("root path processed").root;
    let mut stack = vec![(root_path, root, supply)];
    while let Some((p, id, supply)) = stack.pop() {
        let pf = done[p].as_ref().ok_or_else(|| Error::CorruptLog(format!("path {p} missing")))?;
        let node = &pf.nodes[id];
        let mut b = vec![0i64; node.union.vertex_count()];
        for (i, &t) in node.terminals.iter().enumerate() {
            b[t] += supply[i];
        }
        let f = route_supplies(&node.union, &b)?
            .ok_or_else(|| Error::CorruptLog(format!("supplies not routable in path {p}")))?;
        for &(ue, e) in &node.real {
            let (u, _) = node.union.endpoints(ue);
            let (gu, _) = ctx.g.endpoints(e);
            flows[e] += if node.labels[u] == Some(gu) { f[ue] } else { -f[ue] };
        }
        for (src, _, emap) in &node.parts {
            let (sp, sid) = match *src {
                Source::Local(i) => (p, i),
                Source::Path(q) => (q, done[q].as_ref().expect("processed").root),
            };
            let m = &done[sp].as_ref().expect("processed").nodes[sid].mimick;
            let part_flows: Vec<i64> = emap.iter().map(|&e| f[e]).collect();
            let out = net_outflow(&m.graph, &part_flows);
            stack.push((sp, sid, out[..m.labels.len()].to_vec()));
        }
    }
    Ok(flows)
}

fn check_flow(g: &Graph, s: VertexId, t: VertexId, value: i64, flows: &[i64]) -> Result<()> {
    for (e, _, _) in g.edges() {
        if flows[e].abs() > g.capacity(e).unwrap_or(0) {
            return Err(Error::CorruptLog(format!("edge {e} over capacity")));
        }
    }
    let out = net_outflow(g, flows);
    for (v, &x) in out.iter().enumerate() {
        let want = if v == s { value } else if v == t { -value } else { 0 };
        if x != want {
            return Err(Error::CorruptLog(format!("conservation fails at {v}")));
        }
    }
    Ok(())
}

pub fn find_max_flow_with(g: &Graph, s: VertexId, t: VertexId, cfg: &EngineConfig) -> Result<FlowRun> {
    let Some(caps) = g.capacities() else {
        return Err(Error::MissingCapacities);
    };
    if s == t || s >= g.vertex_count() || t >= g.vertex_count() {
        return Err(Error::Invalid(format!("bad terminals s={s}, t={t}")));
    }
    if let Some(&c) = caps.iter().find(|&&c| c < 0) {
        return Err(Error::Invalid(format!("negative capacity {c}")));
    }
    let base = decompose(g, &cfg.decompose)?;
    let sp = base.piece_of(s).expect("every vertex lies in a piece");
    let tp = base.piece_of(t).expect("every vertex lies in a piece");
    let tree = base.rerooted(sp);
    let mut spine = vec![tp];
    while let Some(p) = tree.parent[*spine.last().unwrap()] {
        spine.push(p);
    }
    spine.reverse();

    let (mut paths, ranks) = hanging_paths(&tree, &spine);
    let mut sides: Vec<Vec<(Vec<VertexId>, Vec<VertexId>)>> = paths
        .iter()
        .map(|nodes| {
            (0..nodes.len())
                .map(|i| {
                    let hi = tree.attachment(nodes[i]).to_vec();
                    let lo = nodes.get(i + 1).map_or(Vec::new(), |&n| tree.attachment(n).to_vec());
                    (lo, hi)
                })
                .collect()
        })
        .collect();
    let mut attached = vec![Vec::new(); tree.len()];
    for (p, nodes) in paths.iter().enumerate() {
        attached[tree.parent[nodes[0]].expect("hanging")].push(p);
    }
    // the s-t path: the s end plays the root side, the t end the leaf side
    let root_path = paths.len();
    sides.push(
        (0..spine.len())
            .map(|i| {
                let toward_s = if i == 0 { vec![s] } else { between(&tree, spine[i - 1], spine[i]) };
                let toward_t = if i + 1 == spine.len() { vec![t] } else { between(&tree, spine[i], spine[i + 1]) };
                (toward_t, toward_s)
            })
            .collect(),
    );
    paths.push(spine);
    let top_rank = ranks.iter().max().map_or(0, |r| r + 1);

    let ctx = Ctx { g, tree: &tree, paths, sides, attached };
    in_pool(cfg.threads, || -> Result<FlowRun> {
        let mut levels: Vec<u32> = ranks.clone();
        levels.sort_unstable();
        levels.dedup();
        let mut done: Vec<Option<PathFlow>> = vec![None; root_path + 1];
        let mut stages = Vec::new();
        for r in levels {
            let ps: Vec<usize> = (0..root_path).filter(|&p| ranks[p] == r).collect();
            let results: Vec<Result<PathFlow>> = ps.par_iter().map(|&p| process_path(&ctx, p, &done, false)).collect();
            for (&p, res) in ps.iter().zip(results) {
                done[p] = Some(res?);
            }
            stages.push((r, ps));
        }
        done[root_path] = Some(process_path(&ctx, root_path, &done, true)?);
        stages.push((top_rank, vec![root_path]));
        let root = done[root_path].as_ref().unwrap();
        let final_m = &root.nodes[root.root].mimick;
        let value = final_m.external_cuts.get(&1).copied().unwrap_or(0);
        let supply: Vec<i64> = final_m.labels.iter().map(|&v| if v == s { value } else { -value }).collect();
        let flows = reverse(&ctx, &done, root_path, supply)?;
        check_flow(g, s, t, value, &flows)?;
        let mimicks = done
            .iter()
            .enumerate()
            .filter_map(|(p, pf)| pf.as_ref().map(|pf| (p, &pf.nodes[pf.root].mimick)))
            .map(|(p, m)| mimick_text(p, m))
            .collect();
        Ok(FlowRun { tree: tree.clone(), value, flows, stages, mimicks })
    })?
}

fn between(tree: &DecompositionTree, a: usize, b: usize) -> Vec<VertexId> {
    match (&tree.nodes[a], &tree.nodes[b]) {
        (Node::Clique(c), _) | (_, Node::Clique(c)) => c.vertices.clone(),
        _ => unreachable!("pieces alternate with cliques"),
    }
}

fn mimick_text(p: usize, m: &FlowMimick) -> String {
    let labels: Vec<String> = m.labels.iter().map(|v| v.to_string()).collect();
    let edges: Vec<String> =
        m.graph.edges().map(|(e, u, v)| format!("{u}-{v}:{}", m.graph.capacity(e).unwrap_or(0))).collect();
    let cuts: Vec<String> = m.external_cuts.iter().map(|(k, v)| format!("{k:b}={v}")).collect();
    format!(
        "path {p} terminals={} n={} edges={} cuts={}",
        labels.join(","),
        m.graph.vertex_count(),
        edges.join(","),
        cuts.join(",")
    )
}

/// Maximum flow value from `s` to `t` and a flow attaining it.
pub fn find_max_flow(g: &Graph, s: VertexId, t: VertexId) -> Result<(i64, Vec<i64>)> {
    let run = find_max_flow_with(g, s, t, &EngineConfig::default())?;
    Ok((run.value, run.flows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::oracle::oracle_max_flow;

    #[test]
    fn single_edge() {
        let g = Graph::from_capacitated_edges(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(find_max_flow(&g, 0, 1).unwrap(), (5, vec![5]));
        assert_eq!(find_max_flow(&g, 1, 0).unwrap(), (5, vec![-5]));
    }

    #[test]
    fn grid_corners() {
        let mut g = named::grid(4, 4);
        g.set_capacities(vec![1; g.edge_count()]).unwrap();
        assert_eq!(find_max_flow(&g, 0, 15).unwrap().0, oracle_max_flow(&g, 0, 15).unwrap().0);
    }

    #[test]
    fn chains_and_wheels() {
        for (mut g, s, t) in [(named::path(6), 0, 5), (named::wheel(6), 1, 4), (named::cube(), 0, 7), (named::wagner(), 0, 4)] {
            let m = g.edge_count();
            g.set_capacities((0..m as i64).map(|i| 1 + (i * 5) % 7).collect()).unwrap();
            assert_eq!(find_max_flow(&g, s, t).unwrap().0, oracle_max_flow(&g, s, t).unwrap().0);
        }
    }

    #[test]
    fn disconnected_terminals() {
        let g = Graph::from_capacitated_edges(4, &[(0, 1, 3), (2, 3, 4)]).unwrap();
        assert_eq!(find_max_flow(&g, 0, 3).unwrap().0, 0);
    }
}
