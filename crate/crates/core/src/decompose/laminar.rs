//! Maximal laminar subfamilies via maximal independent sets of the
//! conflict graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::separators::{adjacency, SideLabels, Separator};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MisMode {
    /// Scan separators in input order, keep each one compatible so far.
    #[default]
    Greedy,
    /// Luby rounds with random priorities drawn from the seed.
    Randomized(u64),
}

/// Conflict lists: `i` and `j` conflict when they are not laminar.
pub fn conflict_graph(g: &Graph, seps: &[Separator]) -> Vec<Vec<usize>> {
    let adj = adjacency(g);
    let sides: Vec<SideLabels> = seps.par_iter().map(|s| SideLabels::new(&adj, s)).collect();
    (0..seps.len())
        .into_par_iter()
        .map(|i| {
            (0..seps.len())
                .filter(|&j| j != i && (sides[i].splits(&seps[j]) || sides[j].splits(&seps[i])))
                .collect()
        })
        .collect()
}

/// A pairwise-laminar subfamily of `seps` to which no further member of
/// `seps` can be added.
pub fn laminar_family(g: &Graph, seps: &[Separator]) -> Vec<Separator> {
    laminar_family_with(g, seps, MisMode::Greedy)
}

pub fn laminar_family_with(g: &Graph, seps: &[Separator], mode: MisMode) -> Vec<Separator> {
    let conflicts = conflict_graph(g, seps);
    let chosen = match mode {
        MisMode::Greedy => greedy_mis(&conflicts),
        MisMode::Randomized(seed) => luby_mis(&conflicts, seed),
    };
    chosen.into_iter().map(|i| seps[i].clone()).collect()
}

fn greedy_mis(conflicts: &[Vec<usize>]) -> Vec<usize> {
    let mut blocked = vec![false; conflicts.len()];
    let mut out = Vec::new();
    for i in 0..conflicts.len() {
        if !blocked[i] {
            out.push(i);
            for &j in &conflicts[i] {
                blocked[j] = true;
            }
        }
    }
    out
}

fn luby_mis(conflicts: &[Vec<usize>], seed: u64) -> Vec<usize> {
    let n = conflicts.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = vec![true; n];
    let mut chosen = vec![false; n];
    while alive.iter().any(|&a| a) {
        let prio: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let key = |i: usize| (prio[i], i);
        let winners: Vec<usize> = (0..n)
            .into_par_iter()
            .filter(|&i| alive[i] && conflicts[i].iter().all(|&j| !alive[j] || key(i) < key(j)))
            .collect();
        for &i in &winners {
            chosen[i] = true;
            alive[i] = false;
            for &j in &conflicts[i] {
                alive[j] = false;
            }
        }
    }
    (0..n).filter(|&i| chosen[i]).collect()
}

/// Every pair of the family is laminar.
pub fn is_laminar_family(g: &Graph, family: &[Separator]) -> bool {
    conflict_graph(g, family).iter().all(|c| c.is_empty())
}

/// Every separator outside the family conflicts with some member.
pub fn is_maximal_in(g: &Graph, seps: &[Separator], family: &[Separator]) -> bool {
    let adj = adjacency(g);
    let sides: Vec<SideLabels> = family.iter().map(|s| SideLabels::new(&adj, s)).collect();
    seps.par_iter().filter(|s| !family.contains(s)).all(|s| {
        let own = SideLabels::new(&adj, s);
        family.iter().zip(&sides).any(|(f, fs)| fs.splits(s) || own.splits(f))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::separators::minimal_separators_up_to_3;
    use crate::graph::named;

    #[test]
    fn k33_keeps_one_side() {
        let g = named::complete_bipartite(3, 3);
        let seps = vec![Separator::new(vec![0, 1, 2]), Separator::new(vec![3, 4, 5])];
        assert_eq!(laminar_family(&g, &seps).len(), 1);
    }

    #[test]
    fn no_conflicts_keeps_all() {
        let g = named::path(5);
        let seps = minimal_separators_up_to_3(&g);
        assert_eq!(laminar_family(&g, &seps).len(), seps.len());
    }

    #[test]
    fn wheel_family_is_laminar_and_maximal() {
        let g = named::wheel(6);
        let seps = minimal_separators_up_to_3(&g);
        for mode in [MisMode::Greedy, MisMode::Randomized(3)] {
            let fam = laminar_family_with(&g, &seps, mode);
            assert!(is_laminar_family(&g, &fam));
            assert!(is_maximal_in(&g, &seps, &fam));
        }
    }
}
