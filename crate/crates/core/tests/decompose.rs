use onecross::decompose::{
    build_decomposition_tree, decompose, is_laminar_family, is_maximal_in, laminar_family, minimal_separators_up_to_3,
    DecomposeConfig, Node,
};
use onecross::graph::Graph;
use onecross::heavy_path::{descendant_counts, floor_log2, heavy_path_decomposition, RootedTree};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        proptest::collection::vec(proptest::bool::weighted(0.35), m).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incremental_family_is_laminar_and_maximal(g in arb_graph(10)) {
        let t = decompose(&g, &DecomposeConfig::default()).unwrap();
        t.check_structure(&g).map_err(TestCaseError::fail)?;
        let all = minimal_separators_up_to_3(&g);
        for s in &t.family {
            prop_assert!(all.contains(s), "{:?} is not a minimal separator", s);
        }
        prop_assert!(is_laminar_family(&g, &t.family));
        prop_assert!(is_maximal_in(&g, &all, &t.family));
        let back = t.reassemble(&g);
        let ends = |h: &Graph| h.edges().map(|(_, u, v)| (u, v)).collect::<Vec<_>>();
        prop_assert_eq!(ends(&back), ends(&g));
    }

    #[test]
    fn greedy_family_builds_a_valid_tree(g in arb_graph(9)) {
        let all = minimal_separators_up_to_3(&g);
        let fam = laminar_family(&g, &all);
        prop_assert!(is_laminar_family(&g, &fam));
        prop_assert!(is_maximal_in(&g, &all, &fam));
        let t = build_decomposition_tree(&g, &fam).unwrap();
        t.check_structure(&g).map_err(TestCaseError::fail)?;
        // no piece keeps a family separator strictly inside it
        for id in t.piece_ids() {
            let p = t.piece(id).unwrap();
            for s in &fam {
                if s.vertices().iter().all(|v| p.local(*v).is_some()) {
                    let torso_seps = minimal_separators_up_to_3(&p.torso);
                    let local: Vec<usize> = s.vertices().iter().map(|v| p.local(*v).unwrap()).collect();
                    prop_assert!(!torso_seps.iter().any(|x| x.vertices() == local.as_slice()));
                }
            }
        }
    }

    #[test]
    fn heavy_paths_on_random_trees(parents in proptest::collection::vec(0usize..1000, 1..40)) {
        let n = parents.len() + 1;
        let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
        let tree = RootedTree::from_edges(n, &edges, 0);
        let h = heavy_path_decomposition(&tree);
        let counts = descendant_counts(&tree);
        let mut seen = vec![0; n];
        for p in &h.paths {
            for &v in p {
                seen[v] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        for (i, p) in h.paths.iter().enumerate() {
            prop_assert_eq!(h.rank[i], floor_log2(counts[p[0]]));
            if let Some(q) = h.parent_path[i] {
                prop_assert!(h.rank[i] < h.rank[q]);
            }
            // each step follows a heaviest child with the smallest id
            for w in p.windows(2) {
                let best = tree.children[w[0]].iter().copied().min_by_key(|&c| (std::cmp::Reverse(counts[c]), c));
                prop_assert_eq!(best, Some(w[1]));
            }
        }
        prop_assert!(h.rank.iter().all(|&r| r <= floor_log2(n)));
    }
}

#[test]
fn wheel_splits_into_small_pieces() {
    let g = onecross::graph::named::wheel(6);
    let t = decompose(&g, &DecomposeConfig::default()).unwrap();
    t.check_structure(&g).unwrap();
    assert!(t.nodes.iter().all(|n| match n {
        Node::Piece(p) => p.vertices.len() <= 4,
        Node::Clique(c) => c.vertices.len() <= 3,
    }));
}
