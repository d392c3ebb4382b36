//! What the replacement phase stores so that the reversal phase can expand
//! every mimicking network back into edges of the input.

use std::fmt::Write as _;

use super::matrix::{Product, Semiring, TransferMatrix};
use crate::graph::{Graph, VertexId};
use crate::mimic::MatchingPattern;

/// One heavy path replaced by a matching-mimicking network.
#[derive(Clone, Debug)]
pub struct PathRecord {
    pub path: usize,
    pub rank: u32,
    /// Tree nodes, top first.
    pub nodes: Vec<usize>,
    /// `(lo, hi)` sides per node, top first.
    pub sides: Vec<(Vec<VertexId>, Vec<VertexId>)>,
    /// Node matrices from the bottom of the path up.
    pub matrices: Vec<TransferMatrix>,
    pub product: Product,
    /// Attachment of the top node; pattern subsets index into it.
    pub top: Vec<VertexId>,
    /// Row-vector value per subset of `top` (`None` outside the pattern).
    pub values: Vec<Option<i64>>,
    pub pattern: MatchingPattern,
    pub canonical: MatchingPattern,
    pub perm: Vec<usize>,
    /// The catalog network, weighted in tropical mode.
    pub network: Graph,
    /// Input vertex of each network terminal.
    pub terminals: Vec<VertexId>,
    /// Fresh ids given to the network's nonterminals.
    pub fresh: Vec<VertexId>,
    /// Tree node the network hangs from; `None` for the root path.
    pub attached_to: Option<usize>,
}

/// A network whose path starts at a clique, merged into the parent piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeRecord {
    pub path: usize,
    pub piece: usize,
    pub face: Vec<VertexId>,
    /// Glued into the planar embedding; otherwise the piece's tree
    /// decomposition gains a bag.
    pub planar: bool,
}

#[derive(Clone, Debug)]
pub struct WitnessLog {
    pub semiring: Semiring,
    /// Paths handled at each rank stage, in order.
    pub stages: Vec<(u32, Vec<usize>)>,
    /// Indexed by path id; `None` until (or unless) processed.
    pub records: Vec<Option<PathRecord>>,
    pub merges: Vec<MergeRecord>,
}

impl WitnessLog {
    pub fn new(semiring: Semiring, paths: usize) -> Self {
        WitnessLog { semiring, stages: Vec::new(), records: vec![None; paths], merges: Vec::new() }
    }

    pub fn record(&self, path: usize) -> Option<&PathRecord> {
        self.records.get(path).and_then(|r| r.as_ref())
    }

    /// Largest row and column count over all node matrices.
    pub fn max_matrix_dims(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for r in self.records.iter().flatten() {
            for m in &r.matrices {
                let (a, b) = m.dims();
                best = (best.0.max(a), best.1.max(b));
            }
        }
        best
    }

    /// Number of records, i.e. processed paths.
    pub fn len(&self) -> usize {
        self.records.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mode = match self.semiring {
            Semiring::Boolean => "boolean",
            Semiring::Tropical => "tropical",
        };
        writeln!(s, "semiring {mode}").unwrap();
        for (rank, paths) in &self.stages {
            writeln!(s, "stage rank={rank} paths={}", join(paths)).unwrap();
            for &p in paths {
                let Some(r) = self.record(p) else { continue };
                writeln!(
                    s,
                    "path {} nodes={} top={} pattern={} canonical={} perm={}",
                    r.path,
                    join(&r.nodes),
                    join(&r.top),
                    r.pattern,
                    r.canonical,
                    join(&r.perm)
                )
                .unwrap();
                let vals: Vec<String> =
                    r.values.iter().map(|v| v.map_or("-".to_string(), |x| x.to_string())).collect();
                writeln!(s, "  values {}", vals.join(" ")).unwrap();
                for (i, m) in r.matrices.iter().enumerate() {
                    let node = r.nodes[r.nodes.len() - 1 - i];
                    writeln!(s, "  node {node} {m}").unwrap();
                }
                let edges: Vec<String> = r
                    .network
                    .edges()
                    .map(|(e, u, v)| {
                        let w = if r.network.has_weights() { format!(":{}", r.network.weight(e)) } else { String::new() };
                        format!("{u}-{v}{w}")
                    })
                    .collect();
                writeln!(
                    s,
                    "  network terminals={} fresh={} edges={} at={}",
                    join(&r.terminals),
                    join(&r.fresh),
                    edges.join(","),
                    r.attached_to.map_or("root".to_string(), |a| a.to_string())
                )
                .unwrap();
            }
            for m in self.merges.iter().filter(|m| paths.contains(&m.path)) {
                writeln!(
                    s,
                    "merge path={} piece={} face={} {}",
                    m.path,
                    m.piece,
                    join(&m.face),
                    if m.planar { "embedded" } else { "bag" }
                )
                .unwrap();
            }
        }
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
