//! Drawing a catalog network inside a face of a planar host.

use super::catalog::MimickingNetwork;
use crate::error::{Error, Result};
use crate::graph::{faces, is_planar_embedding, planar_embedding, Dart, EdgeId, Embedding, Graph, VertexId};

#[derive(Clone, Debug)]
pub struct Glued {
    pub graph: Graph,
    pub embedding: Embedding,
    /// Host ids of the network's nonterminals, in network order.
    pub fresh: Vec<VertexId>,
    /// Host edge id of every network edge.
    pub edge_map: Vec<EdgeId>,
}

/// Shortest face whose boundary visits every vertex of `vs`.
pub fn face_containing(g: &Graph, emb: &Embedding, vs: &[VertexId]) -> Result<Option<Vec<Dart>>> {
    let fs = faces(g, emb)?;
    Ok(fs
        .into_iter()
        .filter(|f| vs.iter().all(|&v| f.iter().any(|d| d.from == v)))
        .min_by_key(|f| f.len()))
}

/// Adds `net` to `host`, identifying network terminal `i` with
/// `face_terminals[i]` and drawing the rest inside a face through all of
/// them. Terminals without host edges may sit in any face.
pub fn glue_into_face(
    host: &Graph,
    emb: &Embedding,
    face_terminals: &[VertexId],
    net: &MimickingNetwork,
) -> Result<Glued> {
    let k = net.terminal_count();
    if face_terminals.len() != k {
        return Err(Error::Invalid(format!("{} face vertices for {k} terminals", face_terminals.len())));
    }
    let anchored: Vec<VertexId> = face_terminals.iter().copied().filter(|&t| host.degree(t) > 0).collect();
    let face = if anchored.is_empty() {
        Vec::new()
    } else {
        face_containing(host, emb, &anchored)?.ok_or_else(|| Error::NotAFace(face_terminals.to_vec()))?
    };

    let mut graph = host.clone();
    let mut vmap: Vec<VertexId> = face_terminals.to_vec();
    let mut fresh = Vec::new();
    for _ in k..net.graph.vertex_count() {
        let v = graph.add_vertex();
        vmap.push(v);
        fresh.push(v);
    }
    let mut edge_map = Vec::with_capacity(net.graph.edge_count());
    for (e, u, v) in net.graph.edges() {
        let id = if graph.has_weights() {
            graph.add_weighted_edge(vmap[u], vmap[v], net.graph.weight(e))?
        } else if graph.has_capacities() {
            graph.add_capacitated_edge(vmap[u], vmap[v], net.graph.capacity(e).unwrap_or(0))?
        } else {
            graph.add_edge(vmap[u], vmap[v])?
        };
        edge_map.push(id);
    }

    // the network with an apex over its terminals shows the order in which
    // network edges leave each terminal into the face
    let mut aux = net.graph.clone();
    aux.clear_weights();
    let apex = aux.add_vertex();
    let apex_edges: Vec<EdgeId> = (0..k).map(|t| aux.add_edge(apex, t).expect("in range")).collect();
    let aux_emb = planar_embedding(&aux).ok_or_else(|| Error::NotAFace(face_terminals.to_vec()))?;

    for mirrored in [false, true] {
        let rot_of = |v: usize| -> Vec<EdgeId> {
            let mut r = aux_emb.rotation[v].clone();
            if mirrored {
                r.reverse();
            }
            r
        };
        let mut rotation = emb.rotation.clone();
        rotation.resize(graph.vertex_count(), Vec::new());
        for t in 0..k {
            let r = rot_of(t);
            let at = r.iter().position(|&e| e == apex_edges[t]).expect("apex edge");
            let inserted: Vec<EdgeId> = (1..r.len()).map(|i| edge_map[r[(at + i) % r.len()]]).collect();
            let host_t = face_terminals[t];
            let slot = &mut rotation[host_t];
            if slot.is_empty() {
                *slot = inserted;
                continue;
            }
            let n = face.len();
            let i = (0..n).find(|&i| face[(i + 1) % n].from == host_t).expect("terminal on face");
            let pos = slot.iter().position(|&e| e == face[i].edge).expect("face edge at terminal");
            slot.splice(pos + 1..pos + 1, inserted);
        }
        for (i, &v) in fresh.iter().enumerate() {
            rotation[v] = rot_of(k + i).into_iter().map(|e| edge_map[e]).collect();
        }
        let candidate = Embedding { rotation };
        if is_planar_embedding(&graph, &candidate) {
            return Ok(Glued { graph, embedding: candidate, fresh, edge_map });
        }
    }
    Err(Error::NotAFace(face_terminals.to_vec()))
}
