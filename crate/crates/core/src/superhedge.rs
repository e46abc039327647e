//! Quasi-sure and per-prior superhedging: backward recursion, the global
//! linear program, the dual over martingale measures, and the sensitivity
//! report comparing them.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arbitrage::{check_na, Verdict};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense, SolverConfig};
use crate::market::{
    live_nodes, portfolio_value, strategy_from_coefficients, Claim, Market, Measure, NamedPrior, PriorSet,
    Strategy,
};
use crate::martingale::MartingaleSystem;
use crate::num::{Price, Rational};

/// Which continuation values a per-prior price is computed against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Continuation {
    /// One-step hedging under the prior against the quasi-sure prices of
    /// the next period.
    #[default]
    QuasiSure,
    /// Hedge only on the prior's support at every period.
    PerPrior,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HedgeOptions {
    /// Admissibility cap `λ`: require `(H∘S)_T + h·Φ >= -λW` quasi-surely.
    pub cap: Option<Rational>,
    pub continuation: Continuation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperhedgeResult {
    pub price: Price,
    /// Conditional prices by node; `None` off the hedged support. Only the
    /// root is filled when a cap is in force.
    pub node_prices: Vec<Option<Price>>,
    /// A strategy attaining `price`; absent when the price is `-inf`.
    pub strategy: Option<Strategy>,
    /// A martingale measure attaining the dual value.
    pub binding_measure: Option<Measure>,
}

struct Step {
    price: Price,
    hedge: Vec<Rational>,
    /// `(child, weight)` of the one-step martingale measure.
    kernel: Vec<(usize, Rational)>,
}

/// `min x s.t. x + H·ΔS(c) >= value(c)` over the given children.
fn one_step(market: &Market, children: &[(usize, Price)], cfg: &SolverConfig) -> Result<Step> {
    let d = market.tree.assets();
    let rows: Vec<(usize, &Rational)> = children.iter().filter_map(|(c, p)| p.finite().map(|v| (*c, v))).collect();
    if rows.is_empty() {
        return Ok(Step { price: Price::NegInfinity, hedge: vec![Rational::zero(); d], kernel: Vec::new() });
    }
    let mut objective = vec![Rational::zero(); d + 1];
    objective[0] = Rational::one();
    let mut program = LinearProgram::new(Sense::Minimize, objective);
    for v in 0..=d {
        program.set_free(v);
    }
    for (c, v) in &rows {
        let mut row = Vec::with_capacity(d + 1);
        row.push(Rational::one());
        row.extend((0..d).map(|j| market.tree.increment(*c, j)));
        program.add_constraint(row, Relation::Ge, (*v).clone());
    }
    let out = lp::solve(&program, cfg)?;
    match out.status {
        LpStatus::Optimal => Ok(Step {
            price: Price::Finite(out.value.clone().expect("optimal value")),
            hedge: out.primal[1..].to_vec(),
            kernel: rows.iter().zip(&out.dual).map(|((c, _), y)| (*c, y.clone())).collect(),
        }),
        LpStatus::Unbounded => Ok(Step { price: Price::NegInfinity, hedge: vec![Rational::zero(); d], kernel: Vec::new() }),
        LpStatus::Infeasible => Err(Error::model("one-step hedging program is infeasible")),
    }
}

struct Recursion {
    node_prices: Vec<Option<Price>>,
    strategy: Strategy,
    kernels: Vec<Vec<(usize, Rational)>>,
}

impl Recursion {
    fn root_price(&self, market: &Market) -> Price {
        self.node_prices[market.tree.root()].clone().expect("live root")
    }

    /// Product of the one-step kernels, when every step is finite.
    fn measure(&self, market: &Market) -> Option<Measure> {
        let tree = &market.tree;
        if !self.root_price(market).is_finite() {
            return None;
        }
        let mut mass = vec![Rational::zero(); tree.nodes().len()];
        mass[tree.root()] = Rational::one();
        let mut order = tree.backward_order();
        order.reverse();
        for n in order {
            if mass[n].is_zero() {
                continue;
            }
            for (c, w) in &self.kernels[n] {
                mass[*c] = &mass[n] * w;
            }
        }
        Some(Measure::from_weights(tree.leaves().iter().map(|&l| mass[l].clone()).collect()))
    }
}

/// Backward recursion of `y` over the nodes above `support`.
fn recurse(market: &Market, y: &[Rational], support: &[usize], cfg: &SolverConfig) -> Result<Recursion> {
    let tree = &market.tree;
    let live = live_nodes(tree, support);
    let mut node_prices: Vec<Option<Price>> = vec![None; tree.nodes().len()];
    let mut strategy = Strategy::zero(tree, market.options.len());
    let mut kernels = vec![Vec::new(); tree.nodes().len()];
    for &pos in support {
        node_prices[tree.leaves()[pos]] = Some(Price::Finite(y[pos].clone()));
    }
    for t in (0..tree.horizon()).rev() {
        let layer: Vec<usize> = (0..tree.nodes().len()).filter(|&n| live[n] && tree.node(n).time == t).collect();
        let steps: Vec<Result<Step>> = layer
            .par_iter()
            .map(|&n| {
                let children: Vec<(usize, Price)> = tree
                    .node(n)
                    .children
                    .iter()
                    .filter_map(|&c| node_prices[c].clone().map(|p| (c, p)))
                    .collect();
                one_step(market, &children, cfg)
            })
            .collect();
        for (n, step) in layer.into_iter().zip(steps) {
            let step = step?;
            node_prices[n] = Some(step.price);
            strategy.dynamic[n] = step.hedge;
            kernels[n] = step.kernel;
        }
    }
    Ok(Recursion { node_prices, strategy, kernels })
}

fn net_claim(market: &Market, x: &Claim, h: &[Rational]) -> Vec<Rational> {
    let mut y = x.values.clone();
    for (hi, o) in h.iter().zip(&market.options) {
        if hi.is_zero() {
            continue;
        }
        for (v, p) in y.iter_mut().zip(&o.payoff) {
            *v -= hi * p;
        }
    }
    y
}

const KELLEY_ITERATIONS: usize = 10_000;
const BOX_DOUBLINGS: usize = 64;

/// Minimizes the recursion price of `X - h·Φ` over static weights `h` by
/// cutting planes; subgradients come from the binding measures.
fn optimize_statics(
    market: &Market,
    x: &Claim,
    support: &[usize],
    cfg: &SolverConfig,
) -> Result<(Vec<Rational>, Recursion)> {
    let m = market.options.len();
    let zero_h = vec![Rational::zero(); m];
    if m == 0 {
        return Ok((zero_h, recurse(market, &x.values, support, cfg)?));
    }
    let sys = MartingaleSystem::new(market, support);
    let feasible = lp::solve(&sys.lp(Sense::Maximize, vec![Rational::zero(); sys.len()]), cfg)?;
    if feasible.status == LpStatus::Infeasible {
        let mut rec = recurse(market, &x.values, support, cfg)?;
        rec.node_prices[market.tree.root()] = Some(Price::NegInfinity);
        return Ok((zero_h, rec));
    }

    let eval = |h: &[Rational]| -> Result<(Rational, Vec<Rational>, Recursion)> {
        let rec = recurse(market, &net_claim(market, x, h), support, cfg)?;
        let (Price::Finite(v), Some(q)) = (rec.root_price(market), rec.measure(market)) else {
            return Err(Error::model("recursion price is -inf although a calibrated martingale measure exists"));
        };
        let g: Vec<Rational> = market.options.iter().map(|o| -q.expectation(&o.payoff)).collect();
        Ok((v, g, rec))
    };

    let (v0, g0, rec0) = eval(&zero_h)?;
    let mut cuts: Vec<(Rational, Vec<Rational>)> = vec![(v0.clone(), g0)];
    let mut best = (v0, zero_h, rec0);
    let mut bound = Rational::one();
    let mut previous: Option<Rational> = None;
    let mut iterations = 0;
    for _ in 0..BOX_DOUBLINGS {
        loop {
            iterations += 1;
            if iterations > KELLEY_ITERATIONS {
                return Err(Error::Scale("static weight optimization did not converge".into()));
            }
            // min t s.t. t >= a + g·h for every cut, |h_i| <= bound; cuts are
            // stored with a = f(h_k) - g·h_k
            let mut objective = vec![Rational::zero(); m + 1];
            objective[0] = Rational::one();
            let mut master = LinearProgram::new(Sense::Minimize, objective);
            master.set_free(0);
            for i in 1..=m {
                master.set_bounds(i, Some(-bound.clone()), Some(bound.clone()));
            }
            for (a, g) in &cuts {
                let mut row = vec![Rational::one()];
                row.extend(g.iter().map(|gi| -gi));
                master.add_constraint(row, Relation::Ge, a.clone());
            }
            let out = lp::solve(&master, cfg)?;
            if !out.is_optimal() {
                return Err(Error::model("cutting-plane master program failed"));
            }
            let lower = out.value.clone().expect("optimal value");
            let h = out.primal[1..].to_vec();
            if !cfg.is_positive(&(&best.0 - &lower)) {
                break;
            }
            let (v, g, rec) = eval(&h)?;
            let a = &v - g.iter().zip(&h).map(|(gi, hi)| gi * hi).sum::<Rational>();
            cuts.push((a, g));
            if v < best.0 {
                best = (v, h, rec);
            }
        }
        if previous.as_ref().is_some_and(|p| !cfg.is_positive(&(p - &best.0))) {
            return Ok((best.1, best.2));
        }
        previous = Some(best.0.clone());
        bound *= Rational::from_integer(2.into());
    }
    Err(Error::Scale("static weights grow without bound".into()))
}

fn validate_hedge(
    market: &Market,
    x: &Claim,
    support: &[usize],
    price: &Rational,
    strategy: &Strategy,
    cfg: &SolverConfig,
) -> Result<()> {
    let v = portfolio_value(&market.tree, strategy, &market.options)?;
    for &s in support {
        if !cfg.is_nonnegative(&(price + &v.values[s] - &x.values[s])) {
            return Err(Error::model(format!("superhedge fails at leaf {}", market.tree.leaf_id(s))));
        }
    }
    Ok(())
}

/// Sets holdings below nodes priced `-inf`, which the recursion leaves at
/// zero. Whatever capital reaches such a node, some holding lifts it above
/// the finite prices of the children.
fn complete_strategy(
    market: &Market,
    node_prices: &[Option<Price>],
    start: &Rational,
    strategy: &mut Strategy,
    cfg: &SolverConfig,
) -> Result<()> {
    let tree = &market.tree;
    let d = tree.assets();
    let mut capital: Vec<Option<Rational>> = vec![None; tree.nodes().len()];
    capital[tree.root()] = Some(start.clone());
    let mut order = tree.backward_order();
    order.reverse();
    for n in order {
        let (Some(w), Some(price)) = (capital[n].clone(), node_prices[n].as_ref()) else { continue };
        if tree.is_leaf(n) {
            continue;
        }
        let children: Vec<usize> = tree.node(n).children.iter().copied().filter(|&c| node_prices[c].is_some()).collect();
        if *price == Price::NegInfinity {
            let mut program = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); d]);
            for v in 0..d {
                program.set_free(v);
            }
            for &c in &children {
                if let Some(Price::Finite(v)) = &node_prices[c] {
                    let row = (0..d).map(|j| tree.increment(c, j)).collect();
                    program.add_constraint(row, Relation::Ge, v - &w);
                }
            }
            strategy.dynamic[n] = if program.constraints.is_empty() {
                vec![Rational::zero(); d]
            } else {
                let out = lp::solve(&program, cfg)?;
                if !out.is_optimal() {
                    return Err(Error::model(format!("no hedge below node {}", tree.node(n).id)));
                }
                out.primal
            };
        }
        for &c in &children {
            let gain: Rational = (0..d).map(|j| &strategy.dynamic[n][j] * tree.increment(c, j)).sum();
            capital[c] = Some(&w + gain);
        }
    }
    Ok(())
}

/// Superhedging price on `support` by backward recursion, with static
/// weights optimized at the root.
fn superhedge_on(market: &Market, x: &Claim, support: &[usize], cfg: &SolverConfig) -> Result<SuperhedgeResult> {
    if support.is_empty() {
        return Err(Error::model("every leaf is polar"));
    }
    let (h, rec) = optimize_statics(market, x, support, cfg)?;
    let price = rec.root_price(market);
    let binding_measure = rec.measure(market);
    let strategy = match &price {
        Price::Finite(p) => {
            let mut s = rec.strategy.clone();
            s.statics = h;
            complete_strategy(market, &rec.node_prices, p, &mut s, cfg)?;
            validate_hedge(market, x, support, p, &s, cfg)?;
            Some(s)
        }
        Price::NegInfinity => None,
    };
    Ok(SuperhedgeResult { price, node_prices: rec.node_prices, strategy, binding_measure })
}

/// One-shot program `min x s.t. x + (H∘S)_T + h·Φ >= X` on `hedge`, with
/// optional cap rows `(H∘S)_T + h·Φ >= -λW` on the quasi-sure support.
fn global_program(
    market: &Market,
    x: &Claim,
    hedge: &[usize],
    cap: Option<&Rational>,
    cfg: &SolverConfig,
) -> Result<SuperhedgeResult> {
    if hedge.is_empty() {
        return Err(Error::model("every leaf is polar"));
    }
    let qs = market.polar().support();
    let live = live_nodes(&market.tree, &qs);
    let gens = market.generators(&live);
    let k = gens.len();
    let mut objective = vec![Rational::zero(); k + 1];
    objective[0] = Rational::one();
    let mut program = LinearProgram::new(Sense::Minimize, objective);
    for v in 0..=k {
        program.set_free(v);
    }
    for &s in hedge {
        let mut row = vec![Rational::one()];
        row.extend(gens.iter().map(|g| g.payoff[s].clone()));
        program.add_constraint(row, Relation::Ge, x.values[s].clone());
    }
    if let Some(lambda) = cap {
        let w = market.weight();
        for &s in &qs {
            let mut row = vec![Rational::zero()];
            row.extend(gens.iter().map(|g| g.payoff[s].clone()));
            program.add_constraint(row, Relation::Ge, -(lambda * &w.values[s]));
        }
    }
    let out = lp::solve(&program, cfg)?;
    let mut node_prices = vec![None; market.tree.nodes().len()];
    match out.status {
        LpStatus::Optimal => {
            let price = out.value.clone().expect("optimal value");
            let strategy = strategy_from_coefficients(&market.tree, market.options.len(), &gens, &out.primal[1..]);
            validate_hedge(market, x, hedge, &price, &strategy, cfg)?;
            node_prices[market.tree.root()] = Some(Price::Finite(price.clone()));
            let mut q = vec![Rational::zero(); market.num_leaves()];
            for (&s, y) in hedge.iter().zip(&out.dual) {
                q[s] = y.clone();
            }
            // with a cap the hedge-row duals need not form a probability
            let binding_measure = cap.is_none().then(|| Measure::from_weights(q));
            Ok(SuperhedgeResult {
                price: Price::Finite(price),
                node_prices,
                strategy: Some(strategy),
                binding_measure,
            })
        }
        LpStatus::Unbounded => {
            node_prices[market.tree.root()] = Some(Price::NegInfinity);
            Ok(SuperhedgeResult { price: Price::NegInfinity, node_prices, strategy: None, binding_measure: None })
        }
        LpStatus::Infeasible => Err(Error::model("superhedging program is infeasible")),
    }
}

/// Quasi-sure superhedging price `Π_0(X)`.
///
/// ```
/// use robust_ftap::io::examples::binomial;
/// use robust_ftap::market::Claim;
/// use robust_ftap::num::{rat, Price};
/// use robust_ftap::superhedge::superhedge_qs;
///
/// let m = binomial();
/// let call = Claim::new(vec![rat(1, 1), rat(0, 1)]);
/// let r = superhedge_qs(&m, &call, &Default::default(), &Default::default()).unwrap();
/// assert_eq!(r.price, Price::Finite(rat(1, 3)));
/// ```
pub fn superhedge_qs(market: &Market, x: &Claim, opts: &HedgeOptions, cfg: &SolverConfig) -> Result<SuperhedgeResult> {
    let support = market.polar().support();
    match &opts.cap {
        Some(lambda) => global_program(market, x, &support, Some(lambda), cfg),
        None => superhedge_on(market, x, &support, cfg),
    }
}

/// Quasi-sure price from the single global program, without recursion.
pub fn superhedge_global(market: &Market, x: &Claim, cfg: &SolverConfig) -> Result<SuperhedgeResult> {
    global_program(market, x, &market.polar().support(), None, cfg)
}

/// Leaves hedged for a prior under the chosen continuation convention.
pub fn prior_support(market: &Market, prior: &Measure, continuation: Continuation) -> Vec<usize> {
    let supp = prior.support();
    match continuation {
        Continuation::PerPrior => supp,
        Continuation::QuasiSure => {
            let tree = &market.tree;
            let first_step = |pos: usize| tree.path(tree.leaves()[pos])[1];
            let charged: Vec<usize> = supp.iter().map(|&s| first_step(s)).collect();
            market.polar().support().into_iter().filter(|&s| charged.contains(&first_step(s))).collect()
        }
    }
}

/// Superhedging price `π_0(P)` under a single prior.
pub fn superhedge_per_prior(
    market: &Market,
    x: &Claim,
    prior: &NamedPrior,
    opts: &HedgeOptions,
    cfg: &SolverConfig,
) -> Result<SuperhedgeResult> {
    let support = prior_support(market, &prior.measure, opts.continuation);
    match &opts.cap {
        Some(lambda) => global_program(market, x, &support, Some(lambda), cfg),
        None => superhedge_on(market, x, &support, cfg),
    }
}

/// `Π_0(X) - max_P π_0(P)`; infinite when every per-prior price is `-inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gap {
    Finite(Rational),
    Infinite,
}

impl Gap {
    pub fn is_zero(&self) -> bool {
        matches!(self, Gap::Finite(g) if g.is_zero())
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Finite(g) => write!(f, "{g}"),
            Gap::Infinite => f.write_str("inf"),
        }
    }
}

/// Kernel chosen at one node by the greedy selection.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeChoice {
    pub node: usize,
    /// 0-based index into the listed kernels, or `None` for the barycenter.
    pub kernel: Option<usize>,
    pub local_price: Price,
    pub node_price: Price,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSelection {
    pub choices: Vec<NodeChoice>,
    pub measure: Measure,
    /// Per-prior price of the selected product measure, hedged on its
    /// support at every period.
    pub price: Price,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityReport {
    pub quasi_sure_price: Price,
    pub per_prior_prices: Vec<(String, Price)>,
    pub gap: Gap,
    pub selection: Option<KernelSelection>,
}

fn gap(total: &Price, best: &Price) -> Gap {
    match (total, best) {
        (Price::Finite(a), Price::Finite(b)) => Gap::Finite(a - b),
        (Price::Finite(_), Price::NegInfinity) => Gap::Infinite,
        (Price::NegInfinity, _) => Gap::Finite(Rational::zero()),
    }
}

/// Compares the quasi-sure price with the per-prior prices. For kernel
/// priors it also builds a kernel selection whose price attains `Π_0`.
pub fn sensitivity_report(
    market: &Market,
    x: &Claim,
    continuation: Continuation,
    cfg: &SolverConfig,
) -> Result<SensitivityReport> {
    if check_na(market, cfg)?.verdict == Verdict::Arbitrage {
        return Err(Error::Precondition("the market admits arbitrage".into()));
    }
    let qs = superhedge_on(market, x, &market.polar().support(), cfg)?;
    let opts = HedgeOptions { cap: None, continuation };
    let candidates = market.priors.candidates(&market.tree);
    let per_prior_prices = candidates
        .iter()
        .map(|p| Ok((p.name.clone(), superhedge_per_prior(market, x, p, &opts, cfg)?.price)))
        .collect::<Result<Vec<_>>>()?;
    let best = per_prior_prices.iter().map(|(_, p)| p.clone()).max().unwrap_or(Price::NegInfinity);
    let selection = match &market.priors {
        PriorSet::Kernel(_) => Some(greedy_selection(market, x, &qs, cfg)?),
        PriorSet::Flat(_) => None,
    };
    Ok(SensitivityReport { gap: gap(&qs.price, &best), quasi_sure_price: qs.price, per_prior_prices, selection })
}

fn greedy_selection(market: &Market, x: &Claim, qs: &SuperhedgeResult, cfg: &SolverConfig) -> Result<KernelSelection> {
    let PriorSet::Kernel(k) = &market.priors else { unreachable!("kernel priors") };
    let tree = &market.tree;
    let h = qs.strategy.as_ref().map(|s| s.statics.clone()).unwrap_or_default();
    let y = Claim::new(net_claim(market, x, &h));
    let cont = if market.options.is_empty() {
        qs.node_prices.clone()
    } else {
        recurse(market, &y.values, &market.polar().support(), cfg)?.node_prices
    };
    let mut choices = Vec::new();
    let mut chosen: Vec<Option<Vec<Rational>>> = vec![None; tree.nodes().len()];
    for n in tree.inner_nodes() {
        let Some(node_price) = cont[n].clone() else {
            chosen[n] = Some(k.barycenter(n));
            continue;
        };
        let mut options: Vec<(Option<usize>, Vec<Rational>)> =
            k.kernels(n).iter().cloned().enumerate().map(|(i, q)| (Some(i), q)).collect();
        options.push((None, k.barycenter(n)));
        let mut best: Option<(Option<usize>, Vec<Rational>, Price)> = None;
        for (label, q) in options {
            let children: Vec<(usize, Price)> = tree
                .node(n)
                .children
                .iter()
                .zip(&q)
                .filter(|(_, w)| w.is_positive())
                .filter_map(|(&c, _)| cont[c].clone().map(|p| (c, p)))
                .collect();
            let local = one_step(market, &children, cfg)?.price;
            if best.as_ref().is_none_or(|b| local > b.2) {
                best = Some((label, q, local));
            }
        }
        let (label, q, local_price) = best.expect("at least the barycenter");
        chosen[n] = Some(q);
        choices.push(NodeChoice { node: n, kernel: label, local_price, node_price });
    }
    let measure = k.product(tree, |n| chosen[n].clone().expect("inner node"));
    let price = superhedge_on(market, x, &measure.support(), cfg)?.price;
    Ok(KernelSelection { choices, measure, price })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub recursion: Price,
    pub global: Price,
    /// `max E_Q[X]` over calibrated martingale measures on the quasi-sure
    /// support; `None` when there are none.
    pub dual: Option<Rational>,
    pub measure: Option<Measure>,
    pub gap: Option<Rational>,
}

/// `max E_Q[X]` over calibrated martingale measures on the quasi-sure support.
pub fn dual_price(market: &Market, x: &Claim, cfg: &SolverConfig) -> Result<Option<(Rational, Measure)>> {
    let support = market.polar().support();
    let sys = MartingaleSystem::new(market, &support);
    let objective = support.iter().map(|&s| x.values[s].clone()).collect();
    let out = lp::solve(&sys.lp(Sense::Maximize, objective), cfg)?;
    match out.status {
        LpStatus::Optimal => Ok(Some((
            out.value.clone().expect("optimal value"),
            Measure::from_weights(sys.spread(&out.primal, market.num_leaves())),
        ))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::model("martingale polytope is unbounded")),
    }
}

pub fn duality_check(market: &Market, x: &Claim, cfg: &SolverConfig) -> Result<DualityReport> {
    let recursion = superhedge_qs(market, x, &HedgeOptions::default(), cfg)?.price;
    let global = superhedge_global(market, x, cfg)?.price;
    let dual = dual_price(market, x, cfg)?;
    let gap = match (&recursion, &dual) {
        (Price::Finite(p), Some((d, _))) => Some(p - d),
        _ => None,
    };
    let (dual, measure) = match dual {
        Some((d, q)) => (Some(d), Some(q)),
        None => (None, None),
    };
    Ok(DualityReport { recursion, global, dual, measure, gap })
}
