use onecross::engine::{find_max_flow, find_min_weight_pm, find_perfect_matching};
use onecross::generators::{random_in_family, Family, GenSpec};
use onecross::graph::Matching;
use onecross::oracle::{oracle_max_flow, oracle_min_weight_pm, oracle_perfect_matching};
use onecross::solve::flow::net_outflow;
use onecross::Error;

#[test]
fn matching_agrees_with_oracle_on_small_instances() {
    for family in Family::ALL {
        for seed in 0..40 {
            for plant in [false, true] {
                let n = 4 + (seed as usize % 11);
                let mut spec = GenSpec::new(n, family, seed);
                spec.plant_pm = plant;
                let g = random_in_family(&spec);
                let ours = find_perfect_matching(&g).unwrap_or_else(|e| panic!("{family} {seed} {plant}: {e}"));
                let oracle = oracle_perfect_matching(&g).unwrap();
                assert_eq!(ours.is_some(), oracle.is_some(), "{family} seed {seed} plant {plant}");
                if let Some(m) = ours {
                    assert!(m.is_perfect(&g));
                }
            }
        }
    }
}

#[test]
fn weighted_agrees_with_oracle() {
    for family in Family::ALL {
        for seed in 0..30 {
            let n = 6 + (seed as usize % 9);
            let g = random_in_family(&GenSpec::new(n, family, seed).planted().with_weights(-50, 50));
            let ours = find_min_weight_pm(&g).unwrap_or_else(|e| panic!("{family} {seed}: {e}"));
            let oracle = oracle_min_weight_pm(&g).unwrap();
            assert_eq!(ours.as_ref().map(|x| x.0), oracle.as_ref().map(|x| x.0), "{family} seed {seed}");
            if let Some((w, m)) = ours {
                assert!(m.is_perfect(&g));
                assert_eq!(w, m.weight(&g));
            }
        }
    }
}

#[test]
fn flow_agrees_with_oracle() {
    for family in Family::ALL {
        for seed in 0..15 {
            let n = 10 + (seed as usize * 7) % 90;
            let g = random_in_family(&GenSpec::new(n, family, seed).with_capacities(0, 20));
            let (s, t) = (0, g.vertex_count() - 1);
            let (value, flows) = find_max_flow(&g, s, t).unwrap_or_else(|e| panic!("{family} {seed}: {e}"));
            assert_eq!(value, oracle_max_flow(&g, s, t).unwrap().0, "{family} seed {seed}");
            let out = net_outflow(&g, &flows);
            assert_eq!(out[s], value);
            assert!(g.edges().all(|(e, _, _)| flows[e].abs() <= g.capacity(e).unwrap()));
        }
    }
}

#[test]
fn odd_and_empty() {
    let g = onecross::graph::named::cycle(7);
    assert!(find_perfect_matching(&g).unwrap().is_none());
    let e = onecross::Graph::new(0);
    assert_eq!(find_perfect_matching(&e).unwrap(), Some(Matching::new(Vec::new())));
    let k6 = onecross::graph::named::complete(6);
    assert!(matches!(find_perfect_matching(&k6), Ok(_) | Err(Error::NotInFamily(_))));
}
