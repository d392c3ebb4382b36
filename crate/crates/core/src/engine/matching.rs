//! Perfect and minimum-weight perfect matching by rank-staged replacement of
//! heavy paths with matching-mimicking networks.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::log::{MergeRecord, PathRecord, WitnessLog};
use super::matrix::{semiring_product, Semiring, TransferMatrix};
use super::{in_pool, EngineConfig};
use crate::decompose::{decompose, DecompositionTree, Node, PieceLabel, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Embedding, Graph, Matching, VertexId};
use crate::heavy_path::{floor_log2, heavy_path_decomposition, HeavyPathDecomposition};
use crate::mimic::{catalog, glue_into_face, weighted_network, MatchingPattern, MimickingNetwork};
use crate::solve::{blossom, td, weighted};

/// Largest absolute edge weight accepted in weighted mode.
pub const MAX_WEIGHT: i64 = 1_000_000_000;

#[derive(Clone, Debug)]
pub struct MatchingRun {
    pub tree: DecompositionTree,
    pub log: WitnessLog,
    /// `None` when the graph has no perfect matching.
    pub matching: Option<Matching>,
    /// Total weight in the input graph (tropical mode only).
    pub weight: Option<i64>,
}

impl MatchingRun {
    pub fn stage_count(&self) -> usize {
        self.log.stages.len()
    }
}

/// Leafward and rootward sides of the node at `idx` on `path` (top first).
pub fn node_sides(tree: &DecompositionTree, path: &[usize], idx: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    let hi = tree.attachment(path[idx]).to_vec();
    let lo = path.get(idx + 1).map_or(Vec::new(), |&n| tree.attachment(n).to_vec());
    (lo, hi)
}

/// How a node subgraph is solved.
#[derive(Clone, Debug)]
pub enum PieceSolver {
    /// General (blossom) solver, used for planar pieces.
    General,
    /// Dynamic programming over a tree decomposition of the subgraph.
    Decomposition(TreeDecomposition),
}

/// A matching of `g` covering exactly `cover` (min-weight in tropical mode).
pub fn piece_solver(g: &Graph, solver: &PieceSolver, cover: &[VertexId], semiring: Semiring) -> Option<Matching> {
    match (solver, semiring) {
        (PieceSolver::Decomposition(td), _) => td::td_min_weight_pm_on(g, td, cover),
        (PieceSolver::General, Semiring::Boolean) => blossom::perfect_matching_on(g, cover),
        (PieceSolver::General, Semiring::Tropical) => weighted::min_weight_perfect_matching_on(g, cover),
    }
}

/// The subgraph handled at one tree node: its own real edges plus every
/// network hung from it.
#[derive(Clone, Debug)]
pub struct NodeGraph {
    pub graph: Graph,
    /// Input vertex of local vertex `i`, for `i < vertices.len()`.
    pub vertices: Vec<VertexId>,
    /// Input edge of local edge `e`, for `e < real.len()`.
    pub real: Vec<EdgeId>,
    /// Per attached network: source path, local id of every network vertex,
    /// first local edge.
    pub nets: Vec<(usize, Vec<VertexId>, EdgeId)>,
    pub solver: PieceSolver,
}

impl NodeGraph {
    fn local(&self, v: VertexId) -> usize {
        self.vertices.binary_search(&v).expect("vertex of the node")
    }
}

fn build_node_graph(
    g: &Graph,
    tree: &DecompositionTree,
    node: usize,
    attached: &[usize],
    log: &WitnessLog,
    semiring: Semiring,
) -> NodeGraph {
    let vertices = tree.nodes[node].vertices().to_vec();
    let (edges, mut td) = match &tree.nodes[node] {
        Node::Piece(p) => (
            &p.edges,
            match p.label {
                PieceLabel::Planar => None,
                PieceLabel::BoundedTreewidth => p.td.clone(),
            },
        ),
        Node::Clique(c) => (
            &c.kept,
            Some(TreeDecomposition { bags: vec![(0..c.vertices.len()).collect()], edges: Vec::new() }),
        ),
    };
    let weighted = semiring == Semiring::Tropical;
    let mut graph = Graph::new(vertices.len());
    if weighted {
        graph.set_weights(Vec::new()).expect("no edges yet");
    }
    let mut ng = NodeGraph { graph: Graph::new(0), vertices, real: edges.clone(), nets: Vec::new(), solver: PieceSolver::General };
    for &e in edges {
        let (u, v) = g.endpoints(e);
        let (a, b) = (ng.local(u), ng.local(v));
        if weighted {
            graph.add_weighted_edge(a, b, g.weight(e)).expect("local ids");
        } else {
            graph.add_edge(a, b).expect("local ids");
        }
    }
    for &p in attached {
        let rec = log.record(p).expect("attached path processed");
        let net = &rec.network;
        let k = rec.terminals.len();
        let mut vmap: Vec<VertexId> = rec.terminals.iter().map(|&t| ng.local(t)).collect();
        for _ in k..net.vertex_count() {
            vmap.push(graph.add_vertex());
        }
        let first = graph.edge_count();
        for (e, u, v) in net.edges() {
            if weighted {
                graph.add_weighted_edge(vmap[u], vmap[v], net.weight(e)).expect("local ids");
            } else {
                graph.add_edge(vmap[u], vmap[v]).expect("local ids");
            }
        }
        if let Some(td) = td.as_mut() {
            let parent = td.bag_containing(&vmap[..k]).expect("attachment lies in one bag");
            td.attach(parent, vmap.clone());
        }
        ng.nets.push((p, vmap, first));
    }
    ng.graph = graph;
    ng.solver = td.map_or(PieceSolver::General, PieceSolver::Decomposition);
    ng
}

fn mask_of(side: &[VertexId], v: VertexId) -> u32 {
    side.iter().position(|&x| x == v).map_or(0, |i| 1 << i)
}

fn subsets_with_parity(k: usize, parity: usize) -> Vec<u32> {
    (0..1u32 << k).filter(|x| x.count_ones() as usize % 2 == parity % 2).collect()
}

/// Local vertices that must be covered inside the node for the cell
/// `(i, j)`: everything off the sides, leafward vertices not covered below,
/// and rootward vertices in `j` not already covered below.
fn required_cover(ng: &NodeGraph, lo: &[VertexId], hi: &[VertexId], i: u32, j: u32) -> Vec<VertexId> {
    (0..ng.graph.vertex_count())
        .filter(|&v| {
            let Some(&gv) = ng.vertices.get(v) else { return true };
            let (li, hj) = (mask_of(lo, gv), mask_of(hi, gv));
            let below = li != 0 && i & li != 0;
            match (li != 0, hj != 0) {
                (false, false) => true,
                (true, false) => !below,
                (_, true) => j & hj != 0 && !below,
            }
        })
        .collect()
}

/// Transfer matrix of one node: rows are subsets of `lo` covered from
/// below, columns are subsets of `hi` covered by the node and everything
/// below it. Rows and columns are limited to the given parities.
pub fn transfer_matrix(
    ng: &NodeGraph,
    lo: &[VertexId],
    hi: &[VertexId],
    semiring: Semiring,
    row_parity: usize,
    col_parity: usize,
) -> TransferMatrix {
    let rows = subsets_with_parity(lo.len(), row_parity);
    let cols = subsets_with_parity(hi.len(), col_parity);
    // a leafward vertex covered from below that is also rootward must count
    // as covered in the column
    let carried = |i: u32| -> u32 {
        lo.iter().enumerate().filter(|&(b, _)| i >> b & 1 == 1).fold(0, |m, (_, &v)| m | mask_of(hi, v))
    };
    let entries = rows
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| {
                    if carried(i) & !j != 0 {
                        return None;
                    }
                    let cover = required_cover(ng, lo, hi, i, j);
                    piece_solver(&ng.graph, &ng.solver, &cover, semiring).map(|m| match semiring {
                        Semiring::Boolean => 0,
                        Semiring::Tropical => m.weight(&ng.graph),
                    })
                })
                .collect()
        })
        .collect();
    TransferMatrix::new(lo.to_vec(), rows, hi.to_vec(), cols, entries)
}

struct Ctx<'a> {
    g: &'a Graph,
    tree: &'a DecompositionTree,
    hpd: HeavyPathDecomposition,
    semiring: Semiring,
}

/// Builds the node matrices of `path`, multiplies them, and turns the row
/// vector into a catalog network. `Ok(None)` means an empty pattern.
fn replace_path(ctx: &Ctx, path: usize, attached: &[Vec<usize>], log: &WitnessLog) -> Result<Option<PathRecord>> {
    let nodes = ctx.hpd.paths[path].clone();
    let sides: Vec<_> = (0..nodes.len()).map(|i| node_sides(ctx.tree, &nodes, i)).collect();
    let mut matrices = Vec::with_capacity(nodes.len());
    let mut sub_below = 0usize;
    for idx in (0..nodes.len()).rev() {
        let ng = build_node_graph(ctx.g, ctx.tree, nodes[idx], &attached[nodes[idx]], log, ctx.semiring);
        let (lo, hi) = &sides[idx];
        let sub_here = ng.graph.vertex_count() - hi.len() + sub_below;
        matrices.push(transfer_matrix(&ng, lo, hi, ctx.semiring, sub_below, sub_here));
        sub_below = sub_here;
    }
    let product = semiring_product(&matrices)?;
    let top = sides[0].1.clone();
    let k = top.len();
    let row = &product.matrix;
    let mut values = vec![None; 1 << k];
    for (c, &col) in row.cols.iter().enumerate() {
        values[col as usize] = row.get(0, c);
    }
    let pattern = MatchingPattern::new(k, (0..1u32 << k).filter(|&x| values[x as usize].is_some()));
    if pattern.is_empty() {
        return Ok(None);
    }
    let (canonical, perm) = pattern.canonical();
    let entry = network_for(&canonical)?;
    let network = match ctx.semiring {
        Semiring::Boolean => entry.graph.clone(),
        Semiring::Tropical => {
            // the cheapest member is the anchor with difference zero
            let min = values.iter().flatten().copied().min().expect("nonempty pattern");
            let permute = |x: u32| -> u32 { (0..k).filter(|&i| x >> i & 1 == 1).fold(0, |m, i| m | 1 << perm[i]) };
            let diffs: BTreeMap<u32, i64> =
                pattern.subsets().into_iter().map(|x| (permute(x), values[x as usize].unwrap() - min)).collect();
            weighted_network(&entry, &diffs)?
        }
    };
    let mut terminals = vec![0; k];
    for i in 0..k {
        terminals[perm[i]] = top[i];
    }
    Ok(Some(PathRecord {
        path,
        rank: ctx.hpd.rank[path],
        nodes: nodes.clone(),
        sides,
        matrices,
        product,
        top,
        values,
        pattern,
        canonical,
        perm,
        network,
        terminals,
        fresh: Vec::new(),
        attached_to: ctx.tree.parent[nodes[0]],
    }))
}

fn network_for(canonical: &MatchingPattern) -> Result<MimickingNetwork> {
    if canonical.terminal_count() == 0 {
        return Ok(MimickingNetwork::empty());
    }
    catalog()
        .get(canonical)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("no catalog entry for {canonical}")))
}

/// Hangs each new network whose path starts at a clique into the parent
/// piece: drawn inside a face of a planar piece's embedding, or as an extra
/// tree-decomposition bag otherwise. Pieces are handled independently.
fn merge_shallow_cliques(
    tree: &DecompositionTree,
    fresh_paths: &[usize],
    log: &WitnessLog,
    embedded: &mut [Option<(Graph, Embedding)>],
) -> Result<Vec<MergeRecord>> {
    let mut by_piece: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &p in fresh_paths {
        let rec = log.record(p).expect("processed");
        if let (Node::Clique(_), Some(piece)) = (&tree.nodes[rec.nodes[0]], rec.attached_to) {
            by_piece.entry(piece).or_default().push(p);
        }
    }
    let mut work: Vec<(usize, Vec<usize>, Option<(Graph, Embedding)>)> =
        by_piece.into_iter().map(|(q, ps)| (q, ps, embedded[q].take())).collect();
    let results: Vec<Result<Vec<MergeRecord>>> = work
        .par_iter_mut()
        .map(|(q, ps, state)| {
            let piece = tree.piece(*q).expect("parent of a clique is a piece");
            let mut out = Vec::new();
            for &p in ps.iter() {
                let rec = log.record(p).expect("processed");
                let planar = state.is_some();
                if let (Some((host, emb)), false) = (state.as_mut(), rec.terminals.is_empty()) {
                    let entry = network_for(&rec.canonical)?;
                    let face: Vec<VertexId> =
                        rec.terminals.iter().map(|&t| piece.local(t).expect("attachment in piece")).collect();
                    let glued = glue_into_face(host, emb, &face, &entry)?;
                    *host = glued.graph;
                    *emb = glued.embedding;
                }
                out.push(MergeRecord { path: p, piece: *q, face: rec.top.clone(), planar });
            }
            Ok(out)
        })
        .collect();
    for (q, _, state) in work {
        embedded[q] = state;
    }
    let mut merges = Vec::new();
    for r in results {
        merges.extend(r?);
    }
    Ok(merges)
}

/// Replacement phase. Returns the log and per-node attachments, or `None`
/// in the log's place if some path has an empty pattern.
fn replace_all(ctx: &Ctx) -> Result<(WitnessLog, Vec<Vec<usize>>, bool)> {
    let tree = ctx.tree;
    let mut log = WitnessLog::new(ctx.semiring, ctx.hpd.paths.len());
    let mut attached: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    let mut embedded: Vec<Option<(Graph, Embedding)>> = tree
        .nodes
        .iter()
        .map(|n| match n {
            Node::Piece(p) => p.embedding.clone().map(|e| (p.torso.clone(), e)),
            Node::Clique(_) => None,
        })
        .collect();
    let levels = ctx.hpd.rank_levels();
    assert!(
        levels.len() as u32 <= floor_log2(tree.len()) + 1,
        "{} rank stages for {} tree nodes",
        levels.len(),
        tree.len()
    );
    let mut next_fresh = ctx.g.vertex_count();
    for r in levels {
        let paths = ctx.hpd.paths_of_rank(r);
        let results: Vec<Result<Option<PathRecord>>> =
            paths.par_iter().map(|&p| replace_path(ctx, p, &attached, &log)).collect();
        log.stages.push((r, paths.clone()));
        let mut aborted = false;
        for (&p, res) in paths.iter().zip(results) {
            match res? {
                Some(mut rec) => {
                    let extra = rec.network.vertex_count() - rec.terminals.len();
                    rec.fresh = (next_fresh..next_fresh + extra).collect();
                    next_fresh += extra;
                    if let Some(a) = rec.attached_to {
                        attached[a].push(p);
                    }
                    log.records[p] = Some(rec);
                }
                None => aborted = true,
            }
        }
        if aborted {
            return Ok((log, attached, false));
        }
        let merges = merge_shallow_cliques(tree, &paths, &log, &mut embedded)?;
        log.merges.extend(merges);
    }
    Ok((log, attached, true))
}

/// Walks the log from the root path down, solving each node for the cell
/// its witness chain selects and recursing into attached networks with the
/// terminals they cover.
pub fn reverse(
    g: &Graph,
    tree: &DecompositionTree,
    log: &WitnessLog,
    attached: &[Vec<usize>],
    root_path: usize,
) -> Result<Matching> {
    let mut out: Vec<EdgeId> = Vec::new();
    let mut stack = vec![(root_path, 0u32)];
    while let Some((p, mask)) = stack.pop() {
        let rec = log.record(p).ok_or_else(|| Error::CorruptLog(format!("path {p} missing")))?;
        let row = &rec.product.matrix;
        let c = row
            .cols
            .iter()
            .position(|&x| x == mask)
            .ok_or_else(|| Error::CorruptLog(format!("path {p} has no column {mask:#b}")))?;
        let cells = rec.product.trace(0, c)?;
        let len = rec.nodes.len();
        for (q, &(r, cc)) in cells.iter().enumerate() {
            let idx = len - 1 - q;
            let node = rec.nodes[idx];
            let m = &rec.matrices[q];
            let (lo, hi) = &rec.sides[idx];
            let ng = build_node_graph(g, tree, node, &attached[node], log, log.semiring);
            let cover = required_cover(&ng, lo, hi, m.rows[r], m.cols[cc]);
            let found = piece_solver(&ng.graph, &ng.solver, &cover, log.semiring)
                .ok_or_else(|| Error::CorruptLog(format!("node {node} has no matching for its cell")))?;
            let mut per_net = vec![0u32; ng.nets.len()];
            for &e in found.edges() {
                if e < ng.real.len() {
                    out.push(ng.real[e]);
                    continue;
                }
                let n = ng.nets.iter().rposition(|&(_, _, first)| first <= e).expect("network edge");
                let (src, ref vmap, _) = ng.nets[n];
                let src_rec = log.record(src).expect("attached path processed");
                let (a, b) = ng.graph.endpoints(e);
                for x in [a, b] {
                    if let Some(t) = vmap[..src_rec.terminals.len()].iter().position(|&l| l == x) {
                        per_net[n] |= mask_of(&src_rec.top, src_rec.terminals[t]);
                    }
                }
            }
            for (n, &(src, _, _)) in ng.nets.iter().enumerate() {
                stack.push((src, per_net[n]));
            }
        }
    }
    let m = Matching::new(out);
    if !m.is_perfect(g) {
        return Err(Error::CorruptLog("expanded edges are not a perfect matching".into()));
    }
    Ok(m)
}

fn run(g: &Graph, cfg: &EngineConfig, semiring: Semiring) -> Result<MatchingRun> {
    let tree = decompose(g, &cfg.decompose)?;
    in_pool(cfg.threads, || {
        let hpd = heavy_path_decomposition(&tree.rooted());
        let root_path = hpd.path_of[tree.root];
        let ctx = Ctx { g, tree: &tree, hpd, semiring };
        let (log, attached, complete) = replace_all(&ctx)?;
        let accepted = complete
            && log.record(root_path).is_some_and(|r| r.pattern.contains(0))
            && g.vertex_count().is_multiple_of(2);
        let matching = if accepted { Some(reverse(g, &tree, &log, &attached, root_path)?) } else { None };
        let weight = match (semiring, &matching) {
            (Semiring::Tropical, Some(m)) => Some(m.weight(g)),
            _ => None,
        };
        Ok(MatchingRun { tree: tree.clone(), log, matching, weight })
    })?
}

pub fn find_perfect_matching_with(g: &Graph, cfg: &EngineConfig) -> Result<MatchingRun> {
    if g.vertex_count() == 0 {
        return Ok(trivial_run(g, Semiring::Boolean));
    }
    let mut plain = g.clone();
    plain.clear_weights();
    run(&plain, cfg, Semiring::Boolean)
}

pub fn find_min_weight_pm_with(g: &Graph, cfg: &EngineConfig) -> Result<MatchingRun> {
    let Some(w) = g.weights() else {
        return Err(Error::MissingWeights);
    };
    if let Some(&bad) = w.iter().find(|x| x.abs() > MAX_WEIGHT) {
        return Err(Error::Invalid(format!("weight {bad} exceeds {MAX_WEIGHT} in absolute value")));
    }
    if g.vertex_count() == 0 {
        return Ok(trivial_run(g, Semiring::Tropical));
    }
    run(g, cfg, Semiring::Tropical)
}

fn trivial_run(g: &Graph, semiring: Semiring) -> MatchingRun {
    let tree = DecompositionTree {
        nodes: Vec::new(),
        parent: Vec::new(),
        children: Vec::new(),
        root: 0,
        family: Vec::new(),
    };
    let _ = g;
    MatchingRun {
        tree,
        log: WitnessLog::new(semiring, 0),
        matching: Some(Matching::new(Vec::new())),
        weight: (semiring == Semiring::Tropical).then_some(0),
    }
}

/// A perfect matching of `g`, or `None` if it has none.
pub fn find_perfect_matching(g: &Graph) -> Result<Option<Matching>> {
    Ok(find_perfect_matching_with(g, &EngineConfig::default())?.matching)
}

/// A minimum-weight perfect matching and its weight.
pub fn find_min_weight_pm(g: &Graph) -> Result<Option<(i64, Matching)>> {
    let run = find_min_weight_pm_with(g, &EngineConfig::default())?;
    Ok(run.matching.map(|m| (run.weight.expect("tropical run"), m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::oracle::{oracle_min_weight_pm, oracle_perfect_matching};

    #[test]
    fn k4_and_odd() {
        let m = find_perfect_matching(&named::complete(4)).unwrap().unwrap();
        assert_eq!(m.len(), 2);
        assert!(find_perfect_matching(&named::cycle(5)).unwrap().is_none());
    }

    #[test]
    fn weighted_c4() {
        let g = Graph::from_weighted_edges(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)]).unwrap();
        assert_eq!(find_min_weight_pm(&g).unwrap().unwrap().0, 4);
    }

    #[test]
    fn single_edge_matrix() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let ng = NodeGraph {
            graph: g.clone(),
            vertices: vec![0, 1],
            real: vec![0],
            nets: Vec::new(),
            solver: PieceSolver::General,
        };
        let m = transfer_matrix(&ng, &[0], &[1], Semiring::Boolean, 0, 0);
        // rows say what is covered from below: either the edge is used or
        // both ends are left to the rest of the graph
        let full = TransferMatrix::new(
            vec![0],
            vec![0, 1],
            vec![1],
            vec![0, 1],
            vec![vec![None, Some(0)], vec![Some(0), None]],
        );
        let all = {
            let rows = vec![0, 1];
            let cols = vec![0, 1];
            let entries = rows
                .iter()
                .map(|&i| {
                    cols.iter()
                        .map(|&j| {
                            if i == 1 && j == 1 {
                                // a vertex covered below cannot be covered again
                                return None;
                            }
                            let cover = required_cover(&ng, &[0], &[1], i, j);
                            piece_solver(&g, &ng.solver, &cover, Semiring::Boolean).map(|_| 0)
                        })
                        .collect()
                })
                .collect();
            TransferMatrix::new(vec![0], rows, vec![1], cols, entries)
        };
        assert_eq!(all, full);
        assert_eq!(m.dims(), (1, 1));
    }

    #[test]
    fn wheels_grids_and_sums() {
        let mut gs = vec![named::wheel(5), named::wheel(7), named::grid(3, 4), named::cube(), named::wagner()];
        gs.push(named::complete_bipartite(3, 3));
        for g in gs {
            let ours = find_perfect_matching(&g);
            let oracle = oracle_perfect_matching(&g).unwrap();
            match ours {
                Ok(m) => assert_eq!(m.is_some(), oracle.is_some()),
                Err(Error::NotInFamily(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn weighted_grid() {
        let mut g = named::grid(3, 4);
        g.set_weights((0..g.edge_count() as i64).map(|i| (i * 7) % 11 - 5).collect()).unwrap();
        let ours = find_min_weight_pm(&g).unwrap().unwrap();
        assert_eq!(ours.0, oracle_min_weight_pm(&g).unwrap().unwrap().0);
    }
}
