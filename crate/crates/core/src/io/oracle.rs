//! Brute-force referees for the arbitrage checks. They share nothing with
//! the simplex path except the tree: supports, generators and polytopes are
//! rebuilt here and decided by vertex enumeration and by a positive-span
//! search, which must agree.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{positive_span_ray, vertex_enumerate, Constraint, LpError, Relation, VERTEX_DIM_LIMIT};
use crate::market::{Market, PriorSet, ScenarioTree};
use crate::num::Rational;

pub const ORACLE_LEAF_LIMIT: usize = 64;
pub const ORACLE_ASSET_LIMIT: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleNa {
    pub na: bool,
    /// Quasi-sure leaves that no calibrated martingale measure charges.
    pub blocked: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSna {
    pub sna: bool,
    /// For each quasi-sure leaf, the first prior under whose support some
    /// calibrated martingale measure charges it.
    pub charged_by: Vec<(usize, Option<String>)>,
}

fn check_scale(market: &Market) -> Result<()> {
    if market.num_leaves() > ORACLE_LEAF_LIMIT {
        return Err(Error::Scale(format!("{} leaves > {ORACLE_LEAF_LIMIT}", market.num_leaves())));
    }
    if market.tree.assets() > ORACLE_ASSET_LIMIT {
        return Err(Error::Scale(format!("{} assets > {ORACLE_ASSET_LIMIT}", market.tree.assets())));
    }
    Ok(())
}

fn lp_err(e: LpError) -> Error {
    match e {
        LpError::TooLarge(m) => Error::Scale(m),
        e => Error::Lp(e),
    }
}

fn slot(tree: &ScenarioTree, parent: usize, child: usize) -> usize {
    tree.node(parent).children.iter().position(|&c| c == child).expect("child")
}

/// Named leaf masks: one per flat prior, or the union support of the
/// kernels for kernel priors.
fn prior_masks(market: &Market) -> Vec<(String, Vec<bool>)> {
    let tree = &market.tree;
    match &market.priors {
        PriorSet::Flat(list) => list
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("P{}", i + 1), p.weights().iter().map(Signed::is_positive).collect()))
            .collect(),
        PriorSet::Kernel(k) => {
            let mask = tree
                .leaves()
                .iter()
                .map(|&l| {
                    tree.path(l).windows(2).all(|w| k.kernels(w[0]).iter().any(|q| q[slot(tree, w[0], w[1])].is_positive()))
                })
                .collect();
            vec![("mix".to_string(), mask)]
        }
    }
}

fn union(masks: &[(String, Vec<bool>)], n: usize) -> Vec<bool> {
    (0..n).map(|i| masks.iter().any(|(_, m)| m[i])).collect()
}

fn live(tree: &ScenarioTree, mask: &[bool]) -> Vec<bool> {
    let mut live = vec![false; tree.nodes().len()];
    for (pos, &l) in tree.leaves().iter().enumerate() {
        if mask[pos] {
            for n in tree.path(l) {
                live[n] = true;
            }
        }
    }
    live
}

fn delta(tree: &ScenarioTree, child: usize, j: usize) -> Rational {
    let parent = tree.node(child).parent.expect("non-root");
    &tree.node(child).prices[j] - &tree.node(parent).prices[j]
}

fn simplex_constraints(n: usize) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = (0..n)
        .map(|i| {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            Constraint::new(e, Relation::Ge, Rational::zero())
        })
        .collect();
    out.push(Constraint::new(vec![Rational::one(); n], Relation::Eq, Rational::one()));
    out
}

/// Union of vertex supports of `{q >= 0, Σq = 1, rows·q = 0}`, or `None`
/// when the polytope is empty.
fn charged_coordinates(rows: Vec<Vec<Rational>>, n: usize) -> Result<Option<Vec<bool>>> {
    let mut cons = simplex_constraints(n);
    cons.extend(rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).map(|r| Constraint::new(r, Relation::Eq, Rational::zero())));
    let verts = vertex_enumerate(&cons, n).map_err(lp_err)?;
    if verts.is_empty() {
        return Ok(None);
    }
    Ok(Some((0..n).map(|i| verts.iter().any(|v| v[i].is_positive())).collect()))
}

/// Viability recursion: a node is viable when the one-step polytope over
/// its viable children is nonempty; a leaf is chargeable when its path runs
/// through viable nodes along children charged by some local vertex.
fn local_chargeable(tree: &ScenarioTree, mask: &[bool]) -> Result<Vec<bool>> {
    let n_nodes = tree.nodes().len();
    let mut viable = vec![false; n_nodes];
    let mut charged = vec![false; n_nodes];
    for n in tree.backward_order() {
        if let Some(pos) = tree.leaf_position(n) {
            viable[n] = mask[pos];
            continue;
        }
        let kids: Vec<usize> = tree.node(n).children.iter().copied().filter(|&c| viable[c]).collect();
        if kids.is_empty() {
            continue;
        }
        let rows = (0..tree.assets()).map(|j| kids.iter().map(|&c| delta(tree, c, j)).collect()).collect();
        if let Some(hit) = charged_coordinates(rows, kids.len())? {
            viable[n] = true;
            for (i, &c) in kids.iter().enumerate() {
                charged[c] = hit[i];
            }
        }
    }
    Ok(tree
        .leaves()
        .iter()
        .map(|&l| viable[tree.root()] && tree.path(l).iter().skip(1).all(|&n| charged[n]))
        .collect())
}

/// Local arbitrage: some live node whose live-child increments span a
/// nonzero nonnegative vector.
fn local_ray(tree: &ScenarioTree, mask: &[bool]) -> Result<bool> {
    let live = live(tree, mask);
    for n in tree.inner_nodes() {
        if !live[n] {
            continue;
        }
        let kids: Vec<usize> = tree.node(n).children.iter().copied().filter(|&c| live[c]).collect();
        let gens: Vec<Vec<Rational>> = (0..tree.assets()).map(|j| kids.iter().map(|&c| delta(tree, c, j)).collect()).collect();
        if positive_span_ray(&gens).map_err(lp_err)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Payoffs of every unit position restricted to the leaves in `support`.
fn global_generators(market: &Market, support: &[usize]) -> Vec<Vec<Rational>> {
    let tree = &market.tree;
    let mask: Vec<bool> = (0..market.num_leaves()).map(|i| support.contains(&i)).collect();
    let live = live(tree, &mask);
    let mut out = Vec::new();
    for n in tree.inner_nodes() {
        if !live[n] {
            continue;
        }
        let t = tree.node(n).time;
        for j in 0..tree.assets() {
            out.push(
                support
                    .iter()
                    .map(|&s| {
                        let path = tree.path(tree.leaves()[s]);
                        if path[t] == n {
                            delta(tree, path[t + 1], j)
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            );
        }
    }
    for o in &market.options {
        out.push(support.iter().map(|&s| o.payoff[s].clone()).collect());
    }
    out
}

fn global_chargeable(market: &Market, mask: &[bool]) -> Result<Vec<bool>> {
    let support: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    if support.len() > VERTEX_DIM_LIMIT {
        return Err(Error::Scale(format!("{} support leaves with options > {VERTEX_DIM_LIMIT}", support.len())));
    }
    let mut out = vec![false; mask.len()];
    if support.is_empty() {
        return Ok(out);
    }
    if let Some(hit) = charged_coordinates(global_generators(market, &support), support.len())? {
        for (i, &s) in support.iter().enumerate() {
            out[s] = hit[i];
        }
    }
    Ok(out)
}

fn chargeable(market: &Market, mask: &[bool]) -> Result<Vec<bool>> {
    if market.options.is_empty() {
        local_chargeable(&market.tree, mask)
    } else {
        global_chargeable(market, mask)
    }
}

/// Classical quasi-sure no-arbitrage, decided twice.
pub fn oracle_na(market: &Market) -> Result<OracleNa> {
    check_scale(market)?;
    let masks = prior_masks(market);
    let mask = union(&masks, market.num_leaves());
    if !mask.iter().any(|&b| b) {
        return Err(Error::model("every leaf is polar"));
    }
    let hit = chargeable(market, &mask)?;
    let blocked: Vec<usize> = (0..mask.len()).filter(|&i| mask[i] && !hit[i]).collect();
    let ray = if market.options.is_empty() {
        local_ray(&market.tree, &mask)?
    } else {
        let support: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        positive_span_ray(&global_generators(market, &support)).map_err(lp_err)?.is_some()
    };
    let na = blocked.is_empty();
    if na == ray {
        return Err(Error::OracleDisagreement(format!(
            "vertex enumeration says {}, positive span says {}",
            if na { "NA" } else { "arbitrage" },
            if ray { "arbitrage" } else { "NA" }
        )));
    }
    Ok(OracleNa { na, blocked })
}

/// Sensitive no-arbitrage: every quasi-sure leaf must be chargeable under
/// the support of some prior that charges it.
pub fn oracle_sna(market: &Market) -> Result<OracleSna> {
    check_scale(market)?;
    let masks = prior_masks(market);
    let n = market.num_leaves();
    let mut charged_by: Vec<(usize, Option<String>)> =
        (0..n).filter(|&i| masks.iter().any(|(_, m)| m[i])).map(|i| (i, None)).collect();
    for (name, mask) in &masks {
        if charged_by.iter().all(|(a, who)| who.is_some() || !mask[*a]) {
            continue;
        }
        let hit = chargeable(market, mask)?;
        for (a, who) in charged_by.iter_mut() {
            if who.is_none() && mask[*a] && hit[*a] {
                *who = Some(name.clone());
            }
        }
    }
    let sna = charged_by.iter().all(|(_, who)| who.is_some());
    Ok(OracleSna { sna, charged_by })
}
