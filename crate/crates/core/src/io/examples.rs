//! Small named markets used by the documentation, the guide and the CLI
//! test suite.

use crate::market::{KernelPriors, Market, Measure, NodeSpec, PriorSet, ScenarioTree, StaticOption};
use crate::mot::{AssetQuotes, CallQuoteSheet};
use crate::num::{int, rat, Rational};

fn one_period(children: &[(&str, Rational)], priors: Vec<Vec<Rational>>, options: Vec<StaticOption>) -> Market {
    let mut specs = vec![NodeSpec::new("r", 0, None, vec![int(1)])];
    specs.extend(children.iter().map(|(id, s)| NodeSpec::new(id, 1, Some("r"), vec![s.clone()])));
    let tree = ScenarioTree::new(1, 1, specs).expect("valid tree");
    let priors = priors.into_iter().map(|w| Measure::new(w).expect("probability")).collect();
    Market::new(tree, PriorSet::Flat(priors), options).expect("valid market")
}

/// `S_0 = 1`, `S_1 ∈ {2, 1/2}`, one prior charging both states.
pub fn binomial() -> Market {
    one_period(&[("u", int(2)), ("d", rat(1, 2))], vec![vec![rat(1, 2), rat(1, 2)]], vec![])
}

/// The price never falls: buying the asset is an arbitrage.
pub fn rising() -> Market {
    one_period(&[("u", int(2)), ("m", rat(3, 2))], vec![vec![rat(1, 2), rat(1, 2)]], vec![])
}

/// `S_1 = (2, 1/2, 2)` on `{a, b, c}`; `P1` charges `a, b` and `P2 = δ_c`.
/// Classical no-arbitrage holds but `1_c` is free under `P2`.
pub fn three_state() -> Market {
    one_period(
        &[("a", int(2)), ("b", rat(1, 2)), ("c", int(2))],
        vec![vec![rat(1, 2), rat(1, 2), int(0)], vec![int(0), int(0), int(1)]],
        vec![],
    )
}

/// `S_1 ∈ {2, 1, 1/2}` under the uniform prior.
pub fn trinomial() -> Market {
    let third = rat(1, 3);
    one_period(&[("u", int(2)), ("m", int(1)), ("d", rat(1, 2))], vec![vec![third.clone(), third.clone(), third]], vec![])
}

/// [`trinomial`] with a call struck at 1 trading at `1/6`.
pub fn calibrated() -> Market {
    let base = trinomial();
    let strike = int(1);
    let price = rat(1, 6);
    let payoff = base
        .tree
        .leaves()
        .iter()
        .map(|&l| {
            let s = &base.tree.node(l).prices[0];
            let intrinsic = if *s > strike { s - &strike } else { int(0) };
            intrinsic - &price
        })
        .collect();
    let option = StaticOption { label: "call0@1".into(), payoff };
    Market::new(base.tree, base.priors, vec![option]).expect("valid market")
}

pub fn two_period_tree() -> ScenarioTree {
    ScenarioTree::new(
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
    .expect("valid tree")
}

/// Two-period binary tree with two kernels at `u` that each see only one
/// branch.
pub fn kernel_two_period() -> Market {
    let tree = two_period_tree();
    let mut k = KernelPriors::empty(&tree);
    let node = |id: &str| tree.node_index(id).expect("node");
    k.push(node("r"), vec![rat(1, 2), rat(1, 2)]);
    k.push(node("u"), vec![int(1), int(0)]);
    k.push(node("u"), vec![int(0), int(1)]);
    k.push(node("d"), vec![rat(1, 3), rat(2, 3)]);
    Market::new(tree, PriorSet::Kernel(k), vec![]).expect("valid market")
}

/// One asset with spot 1 and calls `C(1/2) = 1/2`, `C(2) = 0`; the implied
/// marginal puts `2/3` on `1/2` and `1/3` on `2`.
pub fn quotes() -> CallQuoteSheet {
    CallQuoteSheet { assets: vec![AssetQuotes::new(int(1), vec![(rat(1, 2), rat(1, 2)), (int(2), int(0))]).expect("quotes")] }
}

/// Every named example market.
pub fn all() -> Vec<(&'static str, Market)> {
    vec![
        ("binomial", binomial()),
        ("rising", rising()),
        ("three_state", three_state()),
        ("trinomial", trinomial()),
        ("calibrated", calibrated()),
        ("kernel_two_period", kernel_two_period()),
    ]
}
