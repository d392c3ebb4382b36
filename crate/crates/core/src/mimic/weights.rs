//! Edge weights on a catalog network reproducing prescribed differences
//! between the minimum weights of its member subsets.

use std::collections::BTreeMap;

use super::catalog::MimickingNetwork;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Weights such that the matching covering subset `X` weighs
/// `diffs[X] + c` for one constant `c`. Each member subset has a single
/// matching, so this is also the minimum. Matchings are fixed from the last
/// in peel order backwards; each sets its private edge to close the gap.
pub fn assign_weights(net: &MimickingNetwork, diffs: &BTreeMap<u32, i64>) -> Result<Vec<i64>> {
    if diffs.is_empty() {
        return Err(Error::UnanchoredDiffs);
    }
    if diffs.keys().copied().ne(net.pattern.subsets()) {
        return Err(Error::Invalid(format!(
            "differences given for {:?}, pattern is {}",
            diffs.keys().collect::<Vec<_>>(),
            net.pattern
        )));
    }
    let order = match (&net.peel_order, net.unique) {
        (Some(o), true) => o,
        _ => return Err(Error::UnrealizableDiffs),
    };
    let matchings: BTreeMap<u32, Vec<usize>> = diffs
        .keys()
        .map(|&x| (x, net.matching_for(x).expect("unique matching")))
        .collect();
    // the empty matching always weighs zero, which pins the constant
    let shift = match matchings.get(&0) {
        Some(m) if m.is_empty() => -diffs[&0],
        _ => 0,
    };
    let mut w = vec![0i64; net.graph.edge_count()];
    for (t, &x) in order.iter().enumerate().rev() {
        let m = &matchings[&x];
        let later = &order[t + 1..];
        let private = *m
            .iter()
            .find(|e| later.iter().all(|y| !matchings[y].contains(e)))
            .ok_or(Error::UnrealizableDiffs)?;
        let rest: i64 = m.iter().filter(|&&e| e != private).map(|&e| w[e]).sum();
        w[private] = diffs[&x] + shift - rest;
    }
    Ok(w)
}

/// The network graph carrying the weights from [`assign_weights`].
pub fn weighted_network(net: &MimickingNetwork, diffs: &BTreeMap<u32, i64>) -> Result<Graph> {
    let w = assign_weights(net, diffs)?;
    let mut g = net.graph.clone();
    g.set_weights(w)?;
    Ok(g)
}
