//! Matching patterns: which terminal subsets can be covered together with
//! every nonterminal.

use std::fmt;

use crate::graph::{Graph, TerminalSet, VertexId};
use crate::solve::{blossom, weighted};

/// A family of subsets of `k ≤ 6` terminal indices, stored as a bitset over
/// subset masks: bit `x` is set when subset `x` belongs to the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingPattern {
    k: u8,
    family: u64,
}

impl MatchingPattern {
    pub fn new(k: usize, subsets: impl IntoIterator<Item = u32>) -> Self {
        assert!(k <= 6, "at most six terminals");
        let mut family = 0u64;
        for x in subsets {
            assert!(x < 1 << k, "subset {x:#b} outside {k} terminals");
            family |= 1 << x;
        }
        MatchingPattern { k: k as u8, family }
    }

    pub fn from_family(k: usize, family: u64) -> Self {
        assert!(k <= 6);
        let limit = if k == 6 { u64::MAX } else { (1u64 << (1 << k)) - 1 };
        assert!(family & !limit == 0, "family mentions subsets outside {k} terminals");
        MatchingPattern { k: k as u8, family }
    }

    pub fn terminal_count(&self) -> usize {
        self.k as usize
    }

    pub fn family(&self) -> u64 {
        self.family
    }

    pub fn contains(&self, subset: u32) -> bool {
        subset < 1 << self.k && self.family >> subset & 1 == 1
    }

    pub fn subsets(&self) -> Vec<u32> {
        (0..1u32 << self.k).filter(|&x| self.contains(x)).collect()
    }

    pub fn len(&self) -> usize {
        self.family.count_ones() as usize
    }

    /// An empty pattern means no matching covers all nonterminals.
    pub fn is_empty(&self) -> bool {
        self.family == 0
    }

    /// Common parity of member sizes, if the family is nonempty and uniform.
    pub fn parity(&self) -> Option<u32> {
        let mut sizes = self.subsets().into_iter().map(|x| x.count_ones() % 2);
        let first = sizes.next()?;
        sizes.all(|p| p == first).then_some(first)
    }

    /// Relabels terminal `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.terminal_count());
        let map = |x: u32| -> u32 {
            (0..perm.len()).filter(|&i| x >> i & 1 == 1).fold(0, |m, i| m | 1 << perm[i])
        };
        MatchingPattern::new(self.terminal_count(), self.subsets().into_iter().map(map))
    }

    /// The representative with the least family bitmask over all terminal
    /// permutations, and the first permutation (in lexicographic order)
    /// mapping `self` onto it.
    pub fn canonical(&self) -> (Self, Vec<usize>) {
        let mut best: Option<(Self, Vec<usize>)> = None;
        for perm in permutations(self.terminal_count()) {
            let p = self.permute(&perm);
            if best.as_ref().is_none_or(|(b, _)| p.family < b.family) {
                best = Some((p, perm));
            }
        }
        best.expect("at least the identity")
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical().0 == *self
    }
}

impl fmt::Display for MatchingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, x) in self.subsets().into_iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            if x == 0 {
                write!(f, "∅")?;
            } else {
                let items: Vec<String> =
                    (0..self.k).filter(|&i| x >> i & 1 == 1).map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))?;
            }
        }
        write!(f, "}}")
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn cover_set(g: &Graph, t: &TerminalSet, x: u32) -> Vec<VertexId> {
    let mut is_terminal = vec![false; g.vertex_count()];
    for &v in t.as_slice() {
        is_terminal[v] = true;
    }
    let mut vs: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| !is_terminal[v]).collect();
    vs.extend(t.as_slice().iter().enumerate().filter(|&(i, _)| x >> i & 1 == 1).map(|(_, &v)| v));
    vs
}

/// Exact matching pattern by one perfect-matching test per terminal subset.
pub fn matching_pattern(g: &Graph, t: &TerminalSet) -> MatchingPattern {
    let k = t.len();
    MatchingPattern::new(
        k,
        (0..1u32 << k).filter(|&x| blossom::perfect_matching_on(g, &cover_set(g, t, x)).is_some()),
    )
}

/// Minimum matching weight per terminal subset (`None` outside the pattern).
pub fn pattern_weights(g: &Graph, t: &TerminalSet) -> Vec<Option<i64>> {
    (0..1u32 << t.len())
        .map(|x| {
            weighted::min_weight_perfect_matching_on(g, &cover_set(g, t, x)).map(|m| m.weight(g))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    #[test]
    fn permutations_in_order() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn canonical_forms() {
        let a = MatchingPattern::new(3, [0b001]);
        let b = MatchingPattern::new(3, [0b100]);
        assert_eq!(a.canonical().0, b.canonical().0);
        let e = MatchingPattern::new(3, [0]);
        assert_eq!(e.canonical(), (e, vec![0, 1, 2]));
        let (c, perm) = b.canonical();
        assert_eq!(b.permute(&perm), c);
    }

    #[test]
    fn display() {
        assert_eq!(MatchingPattern::new(2, [0, 3]).to_string(), "{∅, {0,1}}");
    }

    #[test]
    fn small_patterns() {
        let e = named::path(2);
        assert_eq!(
            matching_pattern(&e, &TerminalSet::new(&e, vec![0, 1]).unwrap()),
            MatchingPattern::new(2, [0, 3])
        );
        let p = named::path(3);
        assert_eq!(
            matching_pattern(&p, &TerminalSet::new(&p, vec![0, 2]).unwrap()),
            MatchingPattern::new(2, [1, 2])
        );
        let k5 = named::complete(5);
        let pat = matching_pattern(&k5, &TerminalSet::new(&k5, vec![0, 1, 2]).unwrap());
        assert_eq!(pat, MatchingPattern::new(3, [0, 3, 5, 6]));
        assert_eq!(pat.parity(), Some(0));
    }
}
