use std::collections::BTreeMap;

use onecross::generators::random_planar;
use onecross::graph::{faces, is_outerplanar, is_planar, is_planar_embedding, Graph, TerminalSet};
use onecross::mimic::flow::{combine, flow_mimick, FlowMimick};
use onecross::mimic::{
    catalog, enumerate_realizable_patterns, glue_into_face, verify_equivalence, weighted_network, Catalog,
    MatchingPattern,
};
use onecross::oracle::{oracle_external_flow, oracle_matching_pattern, oracle_max_flow, oracle_pattern_weights};
use proptest::prelude::*;

#[test]
fn realizable_counts() {
    let counts: Vec<usize> = (1..=3).map(|k| enumerate_realizable_patterns(k).len()).collect();
    assert_eq!(counts, vec![2, 5, 14]);
}

#[test]
fn rebuild_matches_golden_file() {
    assert_eq!(Catalog::rebuild().unwrap().to_text(), catalog().to_text());
}

#[test]
fn entries_are_sound() {
    let cat = catalog();
    assert_eq!(cat.len(), 21);
    for net in cat.entries() {
        let t = net.terminals();
        assert_eq!(oracle_matching_pattern(&net.graph, &t).unwrap(), net.pattern);
        assert!(is_outerplanar(&net.graph), "{}", net.pattern);
        assert!(net.pattern.is_canonical());
    }
    for net in cat.of_size(3) {
        assert!(net.unique, "{}", net.pattern);
    }
}

fn triangle_faces(g: &Graph, emb: &onecross::graph::Embedding) -> Vec<Vec<usize>> {
    faces(g, emb)
        .unwrap()
        .into_iter()
        .filter(|f| f.len() == 3)
        .map(|f| f.iter().map(|d| d.from).collect())
        .collect()
}

#[test]
fn gluing_into_random_hosts_keeps_planarity() {
    for seed in 0..50 {
        let (host, emb) = random_planar(12 + seed as usize % 20, seed);
        let Some(face) = triangle_faces(&host, &emb).into_iter().next() else { continue };
        for net in catalog().of_size(3) {
            let glued = glue_into_face(&host, &emb, &face, net).unwrap();
            assert!(is_planar(&glued.graph));
            assert!(is_planar_embedding(&glued.graph, &glued.embedding));
            // the copy inside the host realizes the same pattern
            let mut sub = Graph::new(glued.graph.vertex_count());
            for &e in &glued.edge_map {
                let (u, v) = glued.graph.endpoints(e);
                sub.add_edge(u, v).unwrap();
            }
            let keep: Vec<usize> = face.iter().copied().chain(glued.fresh.iter().copied()).collect();
            let (local, _) = sub.induced(&keep);
            let t = TerminalSet::new(&local, vec![0, 1, 2]).unwrap();
            assert!(verify_equivalence(&local, &t, net));
        }
    }
}

fn arb_graph(max_n: usize, p: f64) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (proptest::collection::vec(proptest::bool::weighted(p), m), proptest::collection::vec(0i64..10, m)).prop_map(
            move |(keep, caps)| {
                let edges: Vec<(usize, usize, i64)> = pairs
                    .iter()
                    .zip(&keep)
                    .zip(&caps)
                    .filter(|((_, &k), _)| k)
                    .map(|((&(a, b), _), &c)| (a, b, c))
                    .collect();
                let mut g = Graph::from_capacitated_edges(n, &edges).unwrap();
                if edges.is_empty() {
                    g.set_capacities(Vec::new()).unwrap();
                }
                g
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn catalog_entry_mimics_any_small_graph(g in arb_graph(9, 0.4)) {
        let t = TerminalSet::new(&g, vec![0, 1, 2]).unwrap();
        let pattern = oracle_matching_pattern(&g, &t).unwrap();
        if !pattern.is_empty() {
            let (canonical, _) = pattern.canonical();
            let net = catalog().get(&canonical).expect("every nonempty pattern is catalogued");
            prop_assert!(verify_equivalence(&g, &t, net));
        }
    }

    #[test]
    fn assigned_weights_reproduce_differences(idx in 0usize..14, raw in proptest::collection::vec(-40i64..40, 8)) {
        let net = catalog().of_size(3)[idx];
        let diffs: BTreeMap<u32, i64> = net.pattern.subsets().into_iter().map(|x| (x, raw[x as usize])).collect();
        let g = weighted_network(net, &diffs).unwrap();
        let best = oracle_pattern_weights(&g, &net.terminals()).unwrap().best_weight.unwrap();
        let anchor = *diffs.keys().next().unwrap();
        for (&x, &d) in &diffs {
            prop_assert_eq!(best[&x] - best[&anchor], d - diffs[&anchor]);
        }
    }

    #[test]
    fn flow_mimick_preserves_cuts(g in arb_graph(12, 0.35), k in 2usize..=6) {
        let t = TerminalSet::new(&g, (0..k.min(g.vertex_count())).collect()).unwrap();
        let m = flow_mimick(&g, &t).unwrap();
        let want = oracle_external_flow(&g, &t).unwrap();
        prop_assert_eq!(&m.external_cuts, &want);
        prop_assert_eq!(&oracle_external_flow(&m.graph, &m.terminals()).unwrap(), &want);
        // idempotent on cut values
        let again = flow_mimick(&m.graph, &m.terminals()).unwrap();
        prop_assert_eq!(&again.external_cuts, &want);
    }

    #[test]
    fn chained_combination_keeps_the_st_flow(pieces in proptest::collection::vec(arb_graph(5, 0.6), 5)) {
        // piece i joins vertex 2i to 2i + 2 through its vertices 0 and 1
        let mut whole = Graph::new(0);
        whole.set_capacities(Vec::new()).unwrap();
        let mut mimicks: Vec<FlowMimick> = Vec::new();
        let mut next = 11;
        for (i, p) in pieces.iter().enumerate() {
            let (s, t) = (2 * i, 2 * i + 2);
            let mut label = vec![0; p.vertex_count()];
            label[0] = s;
            label[1] = t;
            for l in label.iter_mut().skip(2) {
                *l = next;
                next += 1;
            }
            while whole.vertex_count() < next.max(11) {
                whole.add_vertex();
            }
            for (e, u, v) in p.edges() {
                whole.add_capacitated_edge(label[u], label[v], p.capacity(e).unwrap()).unwrap();
            }
            let mut m = flow_mimick(p, &TerminalSet::new(p, vec![0, 1]).unwrap()).unwrap();
            m.labels = vec![s, t];
            mimicks.push(m);
        }
        let mut left = mimicks[0].clone();
        for (i, m) in mimicks.iter().enumerate().skip(1) {
            left = combine(&left, m, &[0, 2 * i + 2]).unwrap();
        }
        let value = left.external_cuts[&1];
        prop_assert_eq!(value, oracle_max_flow(&whole, 0, 10).unwrap().0);
        // a balanced order gives the same cut values
        let a = combine(&mimicks[0], &mimicks[1], &[0, 4]).unwrap();
        let b = combine(&mimicks[2], &mimicks[3], &[4, 8]).unwrap();
        let c = combine(&combine(&a, &b, &[0, 8]).unwrap(), &mimicks[4], &[0, 10]).unwrap();
        prop_assert_eq!(c.external_cuts, left.external_cuts);
    }
}

#[test]
fn pattern_display() {
    assert_eq!(MatchingPattern::new(2, [0, 3]).to_string(), "{∅, {0,1}}");
}
