//! JSON reports. Field order is fixed by the struct definitions and maps
//! are sorted, so equal inputs give byte-identical output.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::schema::{Q, SCHEMA};
use crate::arbitrage::{
    ApproximateClass, ArbitrageVerdict, ArbitrageWitness, SensitiveWitness, SnaVerdict, Verdict,
};
use crate::market::{Claim, Market, Measure, ScenarioTree, Strategy};
use crate::mot::{ConvexOrder, DiscreteMarginal, QuoteDiagnostics, StaticPortfolio, SupportFunction, SupportReport};
use crate::num::{Price, Rational};
use crate::superhedge::{DualityReport, SensitivityReport, SuperhedgeResult};

pub type LeafMap = BTreeMap<String, Q>;

fn q(r: &Rational) -> Q {
    Q(r.clone())
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::NoArbitrage => "no-arbitrage",
        Verdict::Arbitrage => "arbitrage",
    }
}

pub fn claim_map(tree: &ScenarioTree, c: &Claim) -> LeafMap {
    c.values.iter().enumerate().map(|(p, v)| (tree.leaf_id(p).to_string(), q(v))).collect()
}

/// Nonzero masses only.
pub fn measure_map(tree: &ScenarioTree, m: &Measure) -> LeafMap {
    m.weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(p, w)| (tree.leaf_id(p).to_string(), q(w)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyJson {
    /// Holdings chosen at each node, nonzero rows only.
    pub dynamic: BTreeMap<String, Vec<Q>>,
    /// Static option weights by label, nonzero only.
    pub statics: BTreeMap<String, Q>,
}

impl StrategyJson {
    pub fn new(market: &Market, s: &Strategy) -> Self {
        let tree = &market.tree;
        let dynamic = tree
            .inner_nodes()
            .filter(|&n| s.dynamic[n].iter().any(|h| !h.is_zero()))
            .map(|n| (tree.node(n).id.clone(), s.dynamic[n].iter().map(q).collect()))
            .collect();
        let statics = market
            .options
            .iter()
            .zip(&s.statics)
            .filter(|(_, h)| !h.is_zero())
            .map(|(o, h)| (o.label.clone(), q(h)))
            .collect();
        StrategyJson { dynamic, statics }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArbitrageJson {
    pub leaf: String,
    pub strategy: StrategyJson,
    pub payoff: LeafMap,
}

impl ArbitrageJson {
    pub fn new(market: &Market, w: &ArbitrageWitness) -> Self {
        ArbitrageJson {
            leaf: market.tree.leaf_id(w.leaf).to_string(),
            strategy: StrategyJson::new(market, &w.strategy),
            payoff: claim_map(&market.tree, &w.payoff),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeafMeasureJson {
    pub leaf: String,
    pub delta: Q,
    pub measure: LeafMap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub verdict: &'static str,
    pub polar: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ArbitrageJson>,
    pub measures: Vec<LeafMeasureJson>,
}

impl NaReport {
    pub fn new(market: &Market, v: &ArbitrageVerdict) -> Self {
        let tree = &market.tree;
        NaReport {
            schema: SCHEMA,
            command: "check-na",
            verdict: verdict_name(v.verdict),
            polar: market.polar().polar_leaves().iter().map(|&p| tree.leaf_id(p).to_string()).collect(),
            witness: v.witness.as_ref().map(|w| ArbitrageJson::new(market, w)),
            measures: v
                .measures
                .iter()
                .map(|w| LeafMeasureJson {
                    leaf: tree.leaf_id(w.leaf).to_string(),
                    delta: q(&w.delta),
                    measure: measure_map(tree, &w.measure),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriorHedgeJson {
    pub prior: String,
    pub strategy: StrategyJson,
    pub payoff: LeafMap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitiveJson {
    pub leaf: String,
    pub claim: LeafMap,
    pub hedges: Vec<PriorHedgeJson>,
}

impl SensitiveJson {
    pub fn new(market: &Market, w: &SensitiveWitness) -> Self {
        SensitiveJson {
            leaf: market.tree.leaf_id(w.leaf).to_string(),
            claim: claim_map(&market.tree, &w.claim),
            hedges: w
                .hedges
                .iter()
                .map(|h| PriorHedgeJson {
                    prior: h.prior.clone(),
                    strategy: StrategyJson::new(market, &h.strategy),
                    payoff: claim_map(&market.tree, &h.payoff),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnaReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub verdict: &'static str,
    pub classical: &'static str,
    pub charged_by: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SensitiveJson>,
}

impl SnaReport {
    pub fn new(market: &Market, v: &SnaVerdict) -> Self {
        SnaReport {
            schema: SCHEMA,
            command: "check-sna",
            verdict: verdict_name(v.verdict),
            classical: verdict_name(v.na.verdict),
            charged_by: v.charged_by.iter().map(|(l, p)| (market.tree.leaf_id(*l).to_string(), p.clone())).collect(),
            witness: v.witness.as_ref().map(|w| SensitiveJson::new(market, w)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiceJson {
    pub node: String,
    /// 1-based kernel index, or `"barycenter"`.
    pub kernel: String,
    pub local_price: Price,
    pub node_price: Price,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionJson {
    pub choices: Vec<ChoiceJson>,
    pub measure: LeafMap,
    pub price: Price,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityJson {
    pub quasi_sure_price: Price,
    pub per_prior_prices: Vec<(String, Price)>,
    pub gap: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionJson>,
}

impl SensitivityJson {
    pub fn new(market: &Market, r: &SensitivityReport) -> Self {
        let tree = &market.tree;
        SensitivityJson {
            quasi_sure_price: r.quasi_sure_price.clone(),
            per_prior_prices: r.per_prior_prices.clone(),
            gap: r.gap.to_string(),
            selection: r.selection.as_ref().map(|s| SelectionJson {
                choices: s
                    .choices
                    .iter()
                    .map(|c| ChoiceJson {
                        node: tree.node(c.node).id.clone(),
                        kernel: c.kernel.map_or_else(|| "barycenter".to_string(), |k| (k + 1).to_string()),
                        local_price: c.local_price.clone(),
                        node_price: c.node_price.clone(),
                    })
                    .collect(),
                measure: measure_map(tree, &s.measure),
                price: s.price.clone(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityJson {
    pub recursion: Price,
    pub global: Price,
    pub dual: Option<Q>,
    pub measure: Option<LeafMap>,
    pub gap: Option<Q>,
}

impl DualityJson {
    pub fn new(market: &Market, d: &DualityReport) -> Self {
        DualityJson {
            recursion: d.recursion.clone(),
            global: d.global.clone(),
            dual: d.dual.as_ref().map(q),
            measure: d.measure.as_ref().map(|m| measure_map(&market.tree, m)),
            gap: d.gap.as_ref().map(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperhedgeReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub prior: Option<String>,
    pub continuation: &'static str,
    pub cap: Option<Q>,
    pub price: Price,
    pub node_prices: BTreeMap<String, Price>,
    pub strategy: Option<StrategyJson>,
    pub binding_measure: Option<LeafMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualityJson>,
}

impl SuperhedgeReport {
    pub fn new(market: &Market, r: &SuperhedgeResult) -> Self {
        let tree = &market.tree;
        SuperhedgeReport {
            schema: SCHEMA,
            command: "superhedge",
            prior: None,
            continuation: "quasi-sure",
            cap: None,
            price: r.price.clone(),
            node_prices: r
                .node_prices
                .iter()
                .enumerate()
                .filter_map(|(n, p)| p.clone().map(|p| (tree.node(n).id.clone(), p)))
                .collect(),
            strategy: r.strategy.as_ref().map(|s| StrategyJson::new(market, s)),
            binding_measure: r.binding_measure.as_ref().map(|m| measure_map(tree, m)),
            sensitivity: None,
            duality: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemberJson {
    pub n: usize,
    pub max_error: Q,
    pub check: String,
    pub measure: LeafMap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasuresReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub leaf: String,
    pub variant: &'static str,
    pub dominating: String,
    pub delta: Q,
    pub members: Vec<MemberJson>,
}

impl MeasuresReport {
    /// `checks[i]` is the membership verdict for `c.members[i]`.
    pub fn new(market: &Market, c: &ApproximateClass, variant: &'static str, errors: &[Rational], checks: &[Result<(), String>]) -> Self {
        let tree = &market.tree;
        MeasuresReport {
            schema: SCHEMA,
            command: "measures",
            leaf: tree.leaf_id(c.leaf).to_string(),
            variant,
            dominating: c.dominating.clone(),
            delta: q(&c.delta),
            members: c
                .members
                .iter()
                .zip(errors)
                .zip(checks)
                .map(|(((n, m), e), ok)| MemberJson {
                    n: *n,
                    max_error: q(e),
                    check: match ok {
                        Ok(()) => "ok".into(),
                        Err(msg) => msg.clone(),
                    },
                    measure: measure_map(tree, m),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortfolioJson {
    pub cash: Q,
    pub underlying: Q,
    pub calls: Vec<(Q, Q)>,
}

impl PortfolioJson {
    pub fn new(p: &StaticPortfolio) -> Self {
        PortfolioJson { cash: q(&p.cash), underlying: q(&p.underlying), calls: p.calls.iter().map(|(k, u)| (q(k), q(u))).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationJson {
    pub kind: String,
    pub asset: usize,
    pub strikes: Vec<Q>,
    pub portfolio: PortfolioJson,
    pub cost: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssetJson {
    pub asset: usize,
    pub support_function: Vec<(Q, Q)>,
    pub marginal: Option<Vec<(Q, Q)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeViolationJson {
    pub node: String,
    pub hedge: Vec<Q>,
    pub payoff: LeafMap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportJson {
    pub clean: bool,
    pub terminal_violations: Vec<String>,
    pub node_violations: Vec<NodeViolationJson>,
}

impl SupportJson {
    pub fn new(market: &Market, r: &SupportReport) -> Self {
        let tree = &market.tree;
        SupportJson {
            clean: r.is_clean(),
            terminal_violations: r.terminal_violations.iter().map(|&l| tree.leaf_id(l).to_string()).collect(),
            node_violations: r
                .node_violations
                .iter()
                .map(|v| NodeViolationJson {
                    node: tree.node(v.node).id.clone(),
                    hedge: v.hedge.iter().map(q).collect(),
                    payoff: claim_map(tree, &v.payoff),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrateReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub consistent: bool,
    pub assets: Vec<AssetJson>,
    pub violations: Vec<ViolationJson>,
    pub non_binding: Vec<(usize, Q)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportJson>,
}

impl CalibrateReport {
    pub fn new(functions: &[SupportFunction], marginals: &[Option<DiscreteMarginal>], d: &QuoteDiagnostics) -> Self {
        CalibrateReport {
            schema: SCHEMA,
            command: "calibrate",
            consistent: d.consistent,
            assets: functions
                .iter()
                .zip(marginals)
                .enumerate()
                .map(|(asset, (f, m))| AssetJson {
                    asset,
                    support_function: f.vertices.iter().map(|(x, y)| (q(x), q(y))).collect(),
                    marginal: m.as_ref().map(|m| m.atoms().iter().map(|(x, w)| (q(x), q(w))).collect()),
                })
                .collect(),
            violations: d
                .violations
                .iter()
                .map(|v| ViolationJson {
                    kind: v.kind.to_string(),
                    asset: v.asset,
                    strikes: v.strikes.iter().map(q).collect(),
                    portfolio: PortfolioJson::new(&v.portfolio),
                    cost: q(&v.cost),
                })
                .collect(),
            non_binding: d.non_binding.iter().map(|(a, k)| (*a, q(k))).collect(),
            support: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexOrderReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub ordered: bool,
    pub reason: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strike: Option<Q>,
    pub coupling: Option<Vec<Vec<Q>>>,
}

impl ConvexOrderReport {
    pub fn new(c: &ConvexOrder, coupling: Option<&Vec<Vec<Rational>>>) -> Self {
        let (reason, strike) = match c {
            ConvexOrder::Ordered => ("ordered", None),
            ConvexOrder::MeanMismatch => ("mean-mismatch", None),
            ConvexOrder::CallViolation(k) => ("call-violation", Some(q(k))),
        };
        ConvexOrderReport {
            schema: SCHEMA,
            command: "convex-order",
            ordered: c.is_ordered(),
            reason,
            strike,
            coupling: coupling.map(|m| m.iter().map(|row| row.iter().map(q).collect()).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub na: bool,
    pub blocked: Vec<String>,
    pub sna: bool,
    pub charged_by: BTreeMap<String, Option<String>>,
}
