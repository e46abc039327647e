//! Scenario-tree market model: filtration, prices, static options, prior
//! sets, polar sets and the quasi-sure order.

mod priors;
mod tree;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::num::Rational;

pub use priors::{KernelPriors, Measure, NamedPrior, PriorSet, EXPANSION_LIMIT};
pub use tree::{Node, NodeSpec, ScenarioTree};

/// A payoff on the leaves, indexed by leaf position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Claim {
    pub values: Vec<Rational>,
}

impl Claim {
    pub fn new(values: Vec<Rational>) -> Self {
        Claim { values }
    }

    pub fn constant(len: usize, c: Rational) -> Self {
        Claim { values: vec![c; len] }
    }

    pub fn indicator(len: usize, pos: usize) -> Self {
        let mut values = vec![Rational::zero(); len];
        values[pos] = Rational::one();
        Claim { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, k: &Rational) -> Claim {
        Claim { values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn shift(&self, c: &Rational) -> Claim {
        Claim { values: self.values.iter().map(|v| v + c).collect() }
    }

    pub fn add(&self, other: &Claim) -> Claim {
        Claim { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Claim) -> Claim {
        Claim { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    /// `max |X| / W` over non-polar leaves.
    pub fn weighted_norm(&self, weight: &Claim, polar: &PolarStructure) -> Rational {
        polar
            .support()
            .iter()
            .map(|&i| self.values[i].abs() / &weight.values[i])
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// A statically traded option with initial price normalized to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticOption {
    pub label: String,
    pub payoff: Vec<Rational>,
}

/// Leaves that every prior ignores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarStructure {
    polar: Vec<bool>,
}

impl PolarStructure {
    pub fn from_flags(polar: Vec<bool>) -> Self {
        PolarStructure { polar }
    }

    pub fn is_polar(&self, leaf: usize) -> bool {
        self.polar[leaf]
    }

    pub fn polar_leaves(&self) -> Vec<usize> {
        (0..self.polar.len()).filter(|&i| self.polar[i]).collect()
    }

    /// Quasi-sure support: the non-polar leaves.
    pub fn support(&self) -> Vec<usize> {
        (0..self.polar.len()).filter(|&i| !self.polar[i]).collect()
    }

    pub fn flags(&self) -> &[bool] {
        &self.polar
    }

    /// `true` for nodes with at least one non-polar leaf below them.
    pub fn live_nodes(&self, tree: &ScenarioTree) -> Vec<bool> {
        live_nodes(tree, &self.support())
    }
}

/// `true` for nodes with at least one of `support` (leaf positions) below.
pub fn live_nodes(tree: &ScenarioTree, support: &[usize]) -> Vec<bool> {
    let mut live = vec![false; tree.nodes().len()];
    for &pos in support {
        let mut cur = Some(tree.leaves()[pos]);
        while let Some(n) = cur {
            if live[n] {
                break;
            }
            live[n] = true;
            cur = tree.node(n).parent;
        }
    }
    live
}

/// A semi-static strategy: dynamic holdings `H_t` keyed by the time-`t-1`
/// node they are chosen at, and static option weights `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    /// One holding vector per node (length = assets); leaf rows are unused.
    pub dynamic: Vec<Vec<Rational>>,
    pub statics: Vec<Rational>,
}

impl Strategy {
    pub fn zero(tree: &ScenarioTree, options: usize) -> Self {
        Strategy {
            dynamic: vec![vec![Rational::zero(); tree.assets()]; tree.nodes().len()],
            statics: vec![Rational::zero(); options],
        }
    }

    pub fn scale(&self, k: &Rational) -> Strategy {
        Strategy {
            dynamic: self.dynamic.iter().map(|h| h.iter().map(|x| x * k).collect()).collect(),
            statics: self.statics.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Strategy) -> Strategy {
        Strategy {
            dynamic: self
                .dynamic
                .iter()
                .zip(&other.dynamic)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
            statics: self.statics.iter().zip(&other.statics).map(|(x, y)| x + y).collect(),
        }
    }
}

/// Outcome of [`qs_compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsOrder {
    Le,
    Ge,
    Eq,
    Incomparable,
}

/// A market: tree, priors and static options.
#[derive(Clone, Debug, PartialEq)]
pub struct Market {
    pub tree: ScenarioTree,
    pub priors: PriorSet,
    pub options: Vec<StaticOption>,
}

impl Market {
    pub fn new(tree: ScenarioTree, priors: PriorSet, options: Vec<StaticOption>) -> Result<Self> {
        priors.validate(&tree)?;
        for (i, o) in options.iter().enumerate() {
            if o.payoff.len() != tree.num_leaves() {
                return Err(Error::schema(format!("/options/{i}/payoff"), "payoff must cover every leaf"));
            }
        }
        Ok(Market { tree, priors, options })
    }

    pub fn polar(&self) -> PolarStructure {
        polar_set(&self.tree, &self.priors)
    }

    pub fn weight(&self) -> Claim {
        weight_w(&self.tree, &self.options)
    }

    pub fn num_leaves(&self) -> usize {
        self.tree.num_leaves()
    }

    /// Same market with every asset price multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Market {
        Market { tree: self.tree.scaled(factor), priors: self.priors.clone(), options: self.options.clone() }
    }

    /// Payoff generators of the semi-static strategy space: one per
    /// (live inner node, asset) pair and one per static option.
    pub fn generators(&self, live: &[bool]) -> Vec<Generator> {
        generators(&self.tree, &self.options, live)
    }

    pub fn claim_from_fn(&self, f: impl Fn(usize) -> Rational) -> Claim {
        Claim::new((0..self.num_leaves()).map(f).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// One unit of asset `asset` held over the step out of `node`.
    Trade { node: usize, asset: usize },
    /// One unit of static option `index`.
    Option { index: usize },
}

/// Leafwise payoff of a unit position.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub payoff: Vec<Rational>,
}

pub fn generators(tree: &ScenarioTree, options: &[StaticOption], live: &[bool]) -> Vec<Generator> {
    let mut out = Vec::new();
    for node in tree.inner_nodes() {
        if !live[node] {
            continue;
        }
        let depth = tree.node(node).time;
        for asset in 0..tree.assets() {
            let mut payoff = vec![Rational::zero(); tree.num_leaves()];
            for pos in tree.leaves_under(node) {
                let path = tree.path(tree.leaves()[pos]);
                payoff[pos] = tree.increment(path[depth + 1], asset);
            }
            out.push(Generator { kind: GeneratorKind::Trade { node, asset }, payoff });
        }
    }
    for (index, o) in options.iter().enumerate() {
        out.push(Generator { kind: GeneratorKind::Option { index }, payoff: o.payoff.clone() });
    }
    out
}

/// Assembles a strategy from generator coefficients.
pub fn strategy_from_coefficients(
    tree: &ScenarioTree,
    options: usize,
    gens: &[Generator],
    coeffs: &[Rational],
) -> Strategy {
    let mut s = Strategy::zero(tree, options);
    for (g, c) in gens.iter().zip(coeffs) {
        match g.kind {
            GeneratorKind::Trade { node, asset } => s.dynamic[node][asset] += c,
            GeneratorKind::Option { index } => s.statics[index] += c,
        }
    }
    s
}

/// Leaves null under every prior. For kernel priors a leaf is non-polar
/// iff every transition on its path is charged by some one-step measure.
pub fn polar_set(tree: &ScenarioTree, priors: &PriorSet) -> PolarStructure {
    let n = tree.num_leaves();
    let polar = match priors {
        PriorSet::Flat(list) => (0..n).map(|i| list.iter().all(|p| p.weights()[i].is_zero())).collect(),
        PriorSet::Kernel(k) => (0..n)
            .map(|i| {
                let path = tree.path(tree.leaves()[i]);
                !path.windows(2).all(|w| {
                    let (parent, child) = (w[0], w[1]);
                    let slot = tree.node(parent).children.iter().position(|&c| c == child).expect("child");
                    k.kernels(parent).iter().any(|q| q[slot].is_positive())
                })
            })
            .collect(),
    };
    PolarStructure { polar }
}

/// `W = 1 + Σ_{t≥1} Σ_j |S^j_t| + Σ_i |φ_i|`, leafwise.
pub fn weight_w(tree: &ScenarioTree, options: &[StaticOption]) -> Claim {
    let values = (0..tree.num_leaves())
        .map(|pos| {
            let path = tree.path(tree.leaves()[pos]);
            let mut w = Rational::one();
            for &node in &path[1..] {
                for p in &tree.node(node).prices {
                    w += p.abs();
                }
            }
            for o in options {
                w += o.payoff[pos].abs();
            }
            w
        })
        .collect();
    Claim { values }
}

/// Compares two claims off the polar set.
pub fn qs_compare(x: &Claim, y: &Claim, polar: &PolarStructure) -> QsOrder {
    let (mut less, mut greater) = (false, false);
    for i in polar.support() {
        match x.values[i].cmp(&y.values[i]) {
            std::cmp::Ordering::Less => less = true,
            std::cmp::Ordering::Greater => greater = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    match (less, greater) {
        (false, false) => QsOrder::Eq,
        (true, false) => QsOrder::Le,
        (false, true) => QsOrder::Ge,
        (true, true) => QsOrder::Incomparable,
    }
}

/// Terminal value `(H∘S)_T + h·Φ` of a semi-static strategy.
pub fn portfolio_value(tree: &ScenarioTree, strategy: &Strategy, options: &[StaticOption]) -> Result<Claim> {
    if strategy.dynamic.len() != tree.nodes().len()
        || strategy.dynamic.iter().any(|h| h.len() != tree.assets())
    {
        return Err(Error::model("strategy does not match the tree dimensions"));
    }
    if strategy.statics.len() != options.len() {
        return Err(Error::model(format!(
            "strategy has {} static weights for {} options",
            strategy.statics.len(),
            options.len()
        )));
    }
    let values = (0..tree.num_leaves())
        .map(|pos| {
            let path = tree.path(tree.leaves()[pos]);
            let mut v = Rational::zero();
            for w in path.windows(2) {
                let (prev, next) = (w[0], w[1]);
                for (j, h) in strategy.dynamic[prev].iter().enumerate() {
                    if !h.is_zero() {
                        v += h * tree.increment(next, j);
                    }
                }
            }
            for (h, o) in strategy.statics.iter().zip(options) {
                v += h * &o.payoff[pos];
            }
            v
        })
        .collect();
    Ok(Claim { values })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::num::{int, rat};

    /// S_0 = 1, S_1 ∈ {up, down}.
    pub fn one_period(up: Rational, down: Rational, priors: PriorSet) -> Market {
        let tree = ScenarioTree::new(
            1,
            1,
            vec![
                NodeSpec::new("r", 0, None, vec![int(1)]),
                NodeSpec::new("u", 1, Some("r"), vec![up]),
                NodeSpec::new("d", 1, Some("r"), vec![down]),
            ],
        )
        .unwrap();
        Market::new(tree, priors, vec![]).unwrap()
    }

    pub fn binomial() -> Market {
        one_period(int(2), rat(1, 2), PriorSet::Flat(vec![Measure::new(vec![rat(1, 2), rat(1, 2)]).unwrap()]))
    }

    /// Ω = {a, b, c}, S_1 = (2, 1/2, 2), P1 on {a, b}, P2 = δ_c.
    pub fn three_state() -> Market {
        let tree = ScenarioTree::new(
            1,
            1,
            vec![
                NodeSpec::new("r", 0, None, vec![int(1)]),
                NodeSpec::new("a", 1, Some("r"), vec![int(2)]),
                NodeSpec::new("b", 1, Some("r"), vec![rat(1, 2)]),
                NodeSpec::new("c", 1, Some("r"), vec![int(2)]),
            ],
        )
        .unwrap();
        let p1 = Measure::new(vec![rat(1, 2), rat(1, 2), int(0)]).unwrap();
        let p2 = Measure::new(vec![int(0), int(0), int(1)]).unwrap();
        Market::new(tree, PriorSet::Flat(vec![p1, p2]), vec![]).unwrap()
    }

    /// Two periods, root → {u, d}, each with two children.
    pub fn two_period(priors: impl FnOnce(&ScenarioTree) -> PriorSet) -> Market {
        let tree = ScenarioTree::new(
            2,
            1,
            vec![
                NodeSpec::new("r", 0, None, vec![int(1)]),
                NodeSpec::new("u", 1, Some("r"), vec![int(2)]),
                NodeSpec::new("d", 1, Some("r"), vec![rat(1, 2)]),
                NodeSpec::new("uu", 2, Some("u"), vec![int(4)]),
                NodeSpec::new("ud", 2, Some("u"), vec![int(1)]),
                NodeSpec::new("du", 2, Some("d"), vec![int(1)]),
                NodeSpec::new("dd", 2, Some("d"), vec![rat(1, 4)]),
            ],
        )
        .unwrap();
        let p = priors(&tree);
        Market::new(tree, p, vec![]).unwrap()
    }
}
