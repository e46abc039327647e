//! Referee computations written directly from the definitions. They read
//! the market data but none of the library's derived structures.

use num_traits::{One, Signed, Zero};
use robust_ftap::market::{Market, PriorSet, Strategy};
use robust_ftap::num::Rational;

/// Leaves charged by some prior: the union of flat supports, or the
/// leaves every step of whose path some kernel charges.
pub fn qs_support(m: &Market) -> Vec<bool> {
    let tree = &m.tree;
    match &m.priors {
        PriorSet::Flat(list) => (0..m.num_leaves()).map(|i| list.iter().any(|p| p.weights()[i].is_positive())).collect(),
        PriorSet::Kernel(k) => tree
            .leaves()
            .iter()
            .map(|&l| {
                let path = tree.path(l);
                path.windows(2).all(|w| {
                    let slot = tree.node(w[0]).children.iter().position(|&c| c == w[1]).unwrap();
                    k.kernels(w[0]).iter().any(|q| q[slot].is_positive())
                })
            })
            .collect(),
    }
}

/// Terminal gain of a semi-static strategy, leaf by leaf.
pub fn gains(m: &Market, s: &Strategy) -> Vec<Rational> {
    let tree = &m.tree;
    tree.leaves()
        .iter()
        .enumerate()
        .map(|(pos, &l)| {
            let path = tree.path(l);
            let mut v = Rational::zero();
            for w in path.windows(2) {
                for j in 0..tree.assets() {
                    v += &s.dynamic[w[0]][j] * (&tree.node(w[1]).prices[j] - &tree.node(w[0]).prices[j]);
                }
            }
            for (h, o) in s.statics.iter().zip(&m.options) {
                v += h * &o.payoff[pos];
            }
            v
        })
        .collect()
}

/// A probability vector on the leaves, null off `support`, under which
/// prices are martingales and every option has zero expectation.
pub fn calibrated_martingale(m: &Market, q: &[Rational], support: &[bool]) -> Result<(), String> {
    let tree = &m.tree;
    if q.len() != m.num_leaves() {
        return Err("wrong length".into());
    }
    if q.iter().any(Signed::is_negative) {
        return Err("negative mass".into());
    }
    if !q.iter().sum::<Rational>().is_one() {
        return Err("mass is not one".into());
    }
    if q.iter().zip(support).any(|(x, &s)| !s && !x.is_zero()) {
        return Err("charges a polar leaf".into());
    }
    for (i, o) in m.options.iter().enumerate() {
        let e: Rational = o.payoff.iter().zip(q).map(|(a, b)| a * b).sum();
        if !e.is_zero() {
            return Err(format!("option {i} has expectation {e}"));
        }
    }
    for n in 0..tree.nodes().len() {
        if tree.node(n).children.is_empty() {
            continue;
        }
        let t = tree.node(n).time;
        for j in 0..tree.assets() {
            let mut e = Rational::zero();
            for (pos, &l) in tree.leaves().iter().enumerate() {
                let path = tree.path(l);
                if path[t] == n {
                    e += &q[pos] * (&tree.node(path[t + 1]).prices[j] - &tree.node(n).prices[j]);
                }
            }
            if !e.is_zero() {
                return Err(format!("asset {j} drifts at node {}", tree.node(n).id));
            }
        }
    }
    Ok(())
}

pub fn expectation(q: &[Rational], x: &[Rational]) -> Rational {
    q.iter().zip(x).map(|(a, b)| a * b).sum()
}
