//! Call-quote calibration: support functions, implied terminal marginals,
//! static quote arbitrage, convex order and support enforcement.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense, SolverConfig};
use crate::market::{portfolio_value, Claim, Market, PriorSet, ScenarioTree, StaticOption, Strategy};
use crate::num::Rational;

/// Spot and `(strike, price)` call quotes for one asset.
#[derive(Clone, Debug, PartialEq)]
pub struct AssetQuotes {
    pub spot: Rational,
    pub quotes: Vec<(Rational, Rational)>,
}

impl AssetQuotes {
    pub fn new(spot: Rational, quotes: Vec<(Rational, Rational)>) -> Result<Self> {
        if !spot.is_positive() {
            return Err(Error::schema("/spot", "spot must be positive"));
        }
        if quotes.is_empty() {
            return Err(Error::schema("/quotes", "at least one quote is required"));
        }
        for (i, (k, _)) in quotes.iter().enumerate() {
            if !k.is_positive() {
                return Err(Error::schema(format!("/quotes/{i}/0"), "strikes must be positive"));
            }
            if i > 0 && *k <= quotes[i - 1].0 {
                return Err(Error::schema(format!("/quotes/{i}/0"), "strikes must increase strictly"));
            }
        }
        Ok(AssetQuotes { spot, quotes })
    }

    /// The largest strike is quoted at price 0.
    pub fn is_terminated(&self) -> bool {
        self.quotes.last().is_some_and(|(_, c)| c.is_zero())
    }

    pub fn last_strike(&self) -> &Rational {
        &self.quotes.last().expect("nonempty quotes").0
    }

    /// Price of a call with strike `k`, the strike-0 call being the asset.
    fn price_at(&self, k: &Rational) -> Option<&Rational> {
        if k.is_zero() {
            return Some(&self.spot);
        }
        self.quotes.iter().find(|(s, _)| s == k).map(|(_, c)| c)
    }

    /// Quotes with the strike-0 anchor `(0, spot)` in front.
    fn anchored(&self) -> Vec<(Rational, Rational)> {
        let mut v = vec![(Rational::zero(), self.spot.clone())];
        v.extend(self.quotes.iter().cloned());
        v
    }
}

/// Call quotes for every asset.
#[derive(Clone, Debug, PartialEq)]
pub struct CallQuoteSheet {
    pub assets: Vec<AssetQuotes>,
}

/// Piecewise-linear convex non-increasing function, linear between
/// `vertices` and constant after the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFunction {
    pub vertices: Vec<(Rational, Rational)>,
}

impl SupportFunction {
    pub fn eval(&self, x: &Rational) -> Rational {
        let v = &self.vertices;
        if *x <= v[0].0 {
            return v[0].1.clone();
        }
        for w in v.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        v.last().expect("vertices").1.clone()
    }

    /// Slopes of the linear pieces, ending with the flat tail.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> =
            self.vertices.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect();
        s.push(Rational::zero());
        s
    }
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Largest convex non-increasing function with slopes in `[-1, 0]`,
/// value at most `spot` at 0 and at most `c_i` at each strike `k_i`.
///
/// ```
/// use robust_ftap::mot::{support_function, AssetQuotes};
/// use robust_ftap::num::rat;
///
/// let q = AssetQuotes::new(rat(1, 1), vec![(rat(1, 1), rat(1, 4)), (rat(2, 1), rat(0, 1))]).unwrap();
/// let r = support_function(&q);
/// assert_eq!(r.slopes(), vec![rat(-3, 4), rat(-1, 4), rat(0, 1)]);
/// ```
pub fn support_function(quotes: &AssetQuotes) -> SupportFunction {
    let min_c = quotes.quotes.iter().map(|(_, c)| c).min().expect("nonempty quotes").clone();
    let mut pts: Vec<(Rational, Rational)> = vec![(Rational::zero(), quotes.spot.clone())];
    for (k, c) in &quotes.quotes {
        pts.push((Rational::zero(), c + k));
        pts.push((k.clone(), c.clone()));
    }
    pts.push((quotes.last_strike().clone(), min_c));
    pts.sort();
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    SupportFunction { vertices: hull }
}

/// Finite probability measure on `[0, ∞)` with strictly increasing atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMarginal {
    atoms: Vec<(Rational, Rational)>,
}

impl DiscreteMarginal {
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        for (i, (x, m)) in atoms.iter().enumerate() {
            if x.is_negative() {
                return Err(Error::schema(format!("/atoms/{i}/0"), "locations must be nonnegative"));
            }
            if !m.is_positive() {
                return Err(Error::schema(format!("/atoms/{i}/1"), "masses must be positive"));
            }
            if i > 0 && *x <= atoms[i - 1].0 {
                return Err(Error::schema(format!("/atoms/{i}/0"), "locations must increase strictly"));
            }
        }
        let total: Rational = atoms.iter().map(|(_, m)| m).sum();
        if !total.is_one() {
            return Err(Error::schema("/atoms", format!("masses sum to {total}, not 1")));
        }
        Ok(DiscreteMarginal { atoms })
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn mean(&self) -> Rational {
        self.atoms.iter().map(|(x, m)| x * m).sum()
    }

    /// `E[(x - k)_+]`.
    pub fn call(&self, k: &Rational) -> Rational {
        self.atoms.iter().filter(|(x, _)| x > k).map(|(x, m)| (x - k) * m).sum()
    }

    pub fn support(&self) -> Vec<Rational> {
        self.atoms.iter().map(|(x, _)| x.clone()).collect()
    }
}

/// Second derivative of `R` as a measure: slope jumps, plus an atom at 0
/// of mass `1 + R'(0+)`.
pub fn implied_marginal(r: &SupportFunction, spot: &Rational) -> Result<DiscreteMarginal> {
    let v = &r.vertices;
    if v[0].0 != Rational::zero() || v[0].1 != *spot {
        return Err(Error::Precondition(format!("support function starts at {} instead of the spot {spot}", v[0].1)));
    }
    if !v.last().expect("vertices").1.is_zero() {
        return Err(Error::Precondition("support function does not reach 0; the last quote must be 0".into()));
    }
    let slopes = r.slopes();
    let mut atoms = Vec::new();
    let first = &slopes[0] + Rational::one();
    if first.is_positive() {
        atoms.push((Rational::zero(), first));
    }
    for (i, w) in slopes.windows(2).enumerate() {
        let jump = &w[1] - &w[0];
        if jump.is_positive() {
            atoms.push((v[i + 1].0.clone(), jump));
        }
    }
    let mu = DiscreteMarginal::new(atoms).map_err(|e| Error::model(format!("implied marginal: {e}")))?;
    if mu.mean() != *spot {
        return Err(Error::model(format!("implied mean {} differs from spot {spot}", mu.mean())));
    }
    Ok(mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    NegativePrice,
    CallSpread,
    Butterfly,
    SlopeBound,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NegativePrice => "negative-price",
            ViolationKind::CallSpread => "call-spread",
            ViolationKind::Butterfly => "butterfly",
            ViolationKind::SlopeBound => "slope-bound",
        })
    }
}

/// Static position in cash, the underlying and calls.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StaticPortfolio {
    pub cash: Rational,
    pub underlying: Rational,
    /// `(strike, units)`.
    pub calls: Vec<(Rational, Rational)>,
}

impl StaticPortfolio {
    fn add_call(&mut self, k: &Rational, units: Rational) {
        if k.is_zero() {
            self.underlying += units;
        } else {
            self.calls.push((k.clone(), units));
        }
    }

    pub fn payoff(&self, s: &Rational) -> Rational {
        let calls: Rational = self.calls.iter().filter(|(k, _)| s > k).map(|(k, u)| (s - k) * u).sum();
        &self.cash + &self.underlying * s + calls
    }

    /// Exact check that the payoff is nonnegative on `[0, ∞)`: it is
    /// piecewise linear, so the kinks, 0 and the final slope decide.
    pub fn is_nonnegative(&self) -> bool {
        let tail: Rational = &self.underlying + self.calls.iter().map(|(_, u)| u).sum::<Rational>();
        !tail.is_negative()
            && !self.payoff(&Rational::zero()).is_negative()
            && self.calls.iter().all(|(k, _)| !self.payoff(k).is_negative())
    }

    pub fn cost(&self, quotes: &AssetQuotes) -> Rational {
        let calls: Rational =
            self.calls.iter().map(|(k, u)| u * quotes.price_at(k).expect("quoted strike")).sum();
        &self.cash + &self.underlying * &quotes.spot + calls
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub asset: usize,
    pub strikes: Vec<Rational>,
    pub portfolio: StaticPortfolio,
    pub cost: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuoteDiagnostics {
    pub consistent: bool,
    pub violations: Vec<Violation>,
    /// `(asset, strike)` of quotes strictly above the support function.
    pub non_binding: Vec<(usize, Rational)>,
}

fn violation(kind: ViolationKind, asset: usize, q: &AssetQuotes, strikes: Vec<Rational>, p: StaticPortfolio) -> Violation {
    let cost = p.cost(q);
    Violation { kind, asset, strikes, portfolio: p, cost }
}

/// Static arbitrage among the quotes of one asset, each violation with a
/// portfolio of nonnegative payoff and negative cost.
pub fn asset_violations(asset: usize, q: &AssetQuotes) -> Vec<Violation> {
    let mut out = Vec::new();
    for (k, c) in &q.quotes {
        if c.is_negative() {
            let mut p = StaticPortfolio::default();
            p.add_call(k, Rational::one());
            out.push(violation(ViolationKind::NegativePrice, asset, q, vec![k.clone()], p));
        }
    }
    let pts = q.anchored();
    for w in pts.windows(2) {
        let ((k0, c0), (k1, c1)) = (&w[0], &w[1]);
        if c0 < c1 {
            let mut p = StaticPortfolio::default();
            p.add_call(k0, Rational::one());
            p.add_call(k1, -Rational::one());
            out.push(violation(ViolationKind::CallSpread, asset, q, vec![k0.clone(), k1.clone()], p));
        }
        let dk = k1 - k0;
        if c0 - c1 > dk {
            let mut p = StaticPortfolio { cash: dk, ..Default::default() };
            p.add_call(k0, -Rational::one());
            p.add_call(k1, Rational::one());
            out.push(violation(ViolationKind::SlopeBound, asset, q, vec![k0.clone(), k1.clone()], p));
        }
    }
    for w in pts.windows(3) {
        let ((k0, c0), (k1, c1), (k2, c2)) = (&w[0], &w[1], &w[2]);
        let lambda = (k2 - k1) / (k2 - k0);
        let mu = Rational::one() - &lambda;
        if *c1 > &lambda * c0 + &mu * c2 {
            let mut p = StaticPortfolio::default();
            p.add_call(k0, lambda);
            p.add_call(k1, -Rational::one());
            p.add_call(k2, mu);
            out.push(violation(ViolationKind::Butterfly, asset, q, vec![k0.clone(), k1.clone(), k2.clone()], p));
        }
    }
    out
}

pub fn quote_diagnostics(sheet: &CallQuoteSheet) -> QuoteDiagnostics {
    let mut violations = Vec::new();
    let mut non_binding = Vec::new();
    for (j, q) in sheet.assets.iter().enumerate() {
        violations.extend(asset_violations(j, q));
        let r = support_function(q);
        for (k, c) in &q.quotes {
            if r.eval(k) < *c {
                non_binding.push((j, k.clone()));
            }
        }
    }
    QuoteDiagnostics { consistent: violations.is_empty(), violations, non_binding }
}

/// Implied marginal of every asset; refuses inconsistent or unterminated sheets.
pub fn calibrate(sheet: &CallQuoteSheet) -> Result<Vec<DiscreteMarginal>> {
    let diag = quote_diagnostics(sheet);
    if let Some(v) = diag.violations.first() {
        return Err(Error::Precondition(format!("quotes of asset {} admit {} arbitrage", v.asset, v.kind)));
    }
    sheet
        .assets
        .iter()
        .enumerate()
        .map(|(j, q)| {
            if !q.is_terminated() {
                return Err(Error::Precondition(format!("asset {j}: the largest strike must be quoted at 0")));
            }
            implied_marginal(&support_function(q), &q.spot)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvexOrder {
    Ordered,
    /// Means differ.
    MeanMismatch,
    /// `E_mu[(x-k)_+] > E_nu[(x-k)_+]` at this `k`.
    CallViolation(Rational),
}

impl ConvexOrder {
    pub fn is_ordered(&self) -> bool {
        *self == ConvexOrder::Ordered
    }
}

/// `mu <= nu` in convex order, decided on call functions.
pub fn convex_order_check(mu: &DiscreteMarginal, nu: &DiscreteMarginal) -> ConvexOrder {
    if mu.mean() != nu.mean() {
        return ConvexOrder::MeanMismatch;
    }
    let grid: BTreeSet<Rational> = mu.support().into_iter().chain(nu.support()).collect();
    for k in grid {
        if mu.call(&k) > nu.call(&k) {
            return ConvexOrder::CallViolation(k);
        }
    }
    ConvexOrder::Ordered
}

/// A martingale coupling of `mu` and `nu` as a row-major matrix of masses,
/// if one exists.
pub fn martingale_coupling(
    mu: &DiscreteMarginal,
    nu: &DiscreteMarginal,
    cfg: &SolverConfig,
) -> Result<Option<Vec<Vec<Rational>>>> {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (n, m) = (a.len(), b.len());
    let var = |i: usize, j: usize| i * m + j;
    let mut program = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); n * m]);
    for (i, (x, mass)) in a.iter().enumerate() {
        let mut row = vec![Rational::zero(); n * m];
        let mut mart = vec![Rational::zero(); n * m];
        for (j, (y, _)) in b.iter().enumerate() {
            row[var(i, j)] = Rational::one();
            mart[var(i, j)] = y - x;
        }
        program.add_constraint(row, Relation::Eq, mass.clone());
        program.add_constraint(mart, Relation::Eq, Rational::zero());
    }
    for (j, (_, mass)) in b.iter().enumerate() {
        let mut row = vec![Rational::zero(); n * m];
        for i in 0..n {
            row[var(i, j)] = Rational::one();
        }
        program.add_constraint(row, Relation::Eq, mass.clone());
    }
    let out = lp::solve(&program, cfg)?;
    Ok(match out.status {
        LpStatus::Optimal => Some(out.primal.chunks(m).map(<[Rational]>::to_vec).collect()),
        _ => None,
    })
}

/// A node outside the convex hull of the terminal support, with a strategy
/// that profits from it.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeViolation {
    pub node: usize,
    pub hedge: Vec<Rational>,
    pub strategy: Strategy,
    pub payoff: Claim,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    /// Non-polar leaves whose terminal prices lie outside the support grid.
    pub terminal_violations: Vec<usize>,
    pub node_violations: Vec<NodeViolation>,
}

impl SupportReport {
    pub fn is_clean(&self) -> bool {
        self.terminal_violations.is_empty() && self.node_violations.is_empty()
    }
}

/// Checks terminal prices against `K = Π supp(μ^j)` and intermediate
/// prices against the box `conv(K)`. Points strictly between atoms of a
/// non-convex `K` cannot be separated and are accepted.
pub fn support_enforcement(market: &Market, marginals: &[DiscreteMarginal]) -> Result<SupportReport> {
    let tree = &market.tree;
    if marginals.len() != tree.assets() {
        return Err(Error::model(format!("{} marginals for {} assets", marginals.len(), tree.assets())));
    }
    let polar = market.polar();
    let live = polar.live_nodes(tree);
    let supports: Vec<Vec<Rational>> = marginals.iter().map(DiscreteMarginal::support).collect();
    let terminal_violations = polar
        .support()
        .into_iter()
        .filter(|&pos| {
            let prices = &tree.node(tree.leaves()[pos]).prices;
            prices.iter().zip(&supports).any(|(p, k)| !k.contains(p))
        })
        .collect();
    let mut node_violations = Vec::new();
    for n in 0..tree.nodes().len() {
        let t = tree.node(n).time;
        if !live[n] || t == 0 || t == tree.horizon() {
            continue;
        }
        let prices = &tree.node(n).prices;
        let mut hedge = vec![Rational::zero(); tree.assets()];
        let mut outside = false;
        for (j, (p, k)) in prices.iter().zip(&supports).enumerate() {
            let (lo, hi) = (k.first().expect("atoms"), k.last().expect("atoms"));
            if p > hi {
                hedge[j] = -Rational::one() / (p - hi);
                outside = true;
                break;
            }
            if p < lo {
                hedge[j] = Rational::one() / (lo - p);
                outside = true;
                break;
            }
        }
        if !outside {
            continue;
        }
        let mut strategy = Strategy::zero(tree, market.options.len());
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if !tree.is_leaf(m) {
                strategy.dynamic[m] = hedge.clone();
                stack.extend(tree.node(m).children.iter().copied());
            }
        }
        let payoff = portfolio_value(tree, &strategy, &market.options)?;
        node_violations.push(NodeViolation { node: n, hedge, strategy, payoff });
    }
    Ok(SupportReport { terminal_violations, node_violations })
}

fn grid_contains(supports: &[Vec<Rational>], point: &[Rational]) -> bool {
    point.iter().zip(supports).all(|(p, k)| k.contains(p))
}

/// Attaches the quoted calls as zero-price static options and checks that
/// every prior's terminal law has the support of the product marginal.
pub fn assemble_market(sheet: &CallQuoteSheet, tree: ScenarioTree, priors: PriorSet) -> Result<Market> {
    if sheet.assets.len() != tree.assets() {
        return Err(Error::model(format!("quotes for {} assets, tree has {}", sheet.assets.len(), tree.assets())));
    }
    let marginals = calibrate(sheet)?;
    if !tree.has_nonnegative_prices() {
        return Err(Error::model("calibrated markets need nonnegative prices"));
    }
    let mut options = Vec::new();
    for (j, q) in sheet.assets.iter().enumerate() {
        for (k, c) in &q.quotes {
            let payoff = tree
                .leaves()
                .iter()
                .map(|&l| {
                    let s = &tree.node(l).prices[j];
                    let intrinsic = if s > k { s - k } else { Rational::zero() };
                    intrinsic - c
                })
                .collect();
            options.push(StaticOption { label: format!("call{j}@{k}"), payoff });
        }
    }
    let market = Market::new(tree, priors, options)?;
    let supports: Vec<Vec<Rational>> = marginals.iter().map(DiscreteMarginal::support).collect();
    let grid_size: usize = supports.iter().map(Vec::len).product();
    let tree = &market.tree;
    for p in market.priors.candidates(tree) {
        let charged = p.measure.support();
        let outside: Vec<String> = charged
            .iter()
            .filter(|&&s| !grid_contains(&supports, &tree.node(tree.leaves()[s]).prices))
            .map(|&s| tree.leaf_id(s).to_string())
            .collect();
        if !outside.is_empty() {
            return Err(Error::Precondition(format!(
                "prior {} charges leaves outside the marginal support: {}",
                p.name,
                outside.join(", ")
            )));
        }
        let reached: BTreeSet<&Vec<Rational>> = charged.iter().map(|&s| &tree.node(tree.leaves()[s]).prices).collect();
        if reached.len() != grid_size {
            return Err(Error::Precondition(format!(
                "prior {} misses {} of the {grid_size} support points",
                p.name,
                grid_size - reached.len()
            )));
        }
    }
    Ok(market)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Measure, NodeSpec};
    use crate::num::{int, rat};

    fn quotes(spot: Rational, q: &[(Rational, Rational)]) -> AssetQuotes {
        AssetQuotes::new(spot, q.to_vec()).unwrap()
    }

    #[test]
    fn worked_sheet() {
        let q = quotes(int(1), &[(int(1), rat(1, 4)), (int(2), int(0))]);
        let r = support_function(&q);
        assert_eq!(r.vertices, vec![(int(0), int(1)), (int(1), rat(1, 4)), (int(2), int(0))]);
        let mu = implied_marginal(&r, &q.spot).unwrap();
        assert_eq!(mu.atoms(), &[(int(0), rat(1, 4)), (int(1), rat(1, 2)), (int(2), rat(1, 4))]);
    }

    #[test]
    fn single_quote() {
        let q = quotes(int(1), &[(int(2), int(0))]);
        let r = support_function(&q);
        assert_eq!(r.slopes(), vec![rat(-1, 2), int(0)]);
        let mu = implied_marginal(&r, &q.spot).unwrap();
        assert_eq!(mu.atoms(), &[(int(0), rat(1, 2)), (int(2), rat(1, 2))]);
    }

    #[test]
    fn point_mass_at_spot() {
        let q = quotes(int(1), &[(int(1), int(0))]);
        let mu = implied_marginal(&support_function(&q), &q.spot).unwrap();
        assert_eq!(mu.atoms(), &[(int(1), int(1))]);
    }

    #[test]
    fn increasing_quotes() {
        let q = quotes(int(1), &[(int(1), rat(3, 5)), (int(2), rat(7, 10))]);
        let r = support_function(&q);
        assert_eq!(r.eval(&int(2)), rat(3, 5));
        let sheet = CallQuoteSheet { assets: vec![q.clone()] };
        let d = quote_diagnostics(&sheet);
        assert!(!d.consistent);
        let spread = d.violations.iter().find(|v| v.kind == ViolationKind::CallSpread).unwrap();
        assert_eq!(spread.cost, rat(-1, 10));
        assert_eq!(spread.portfolio.calls, vec![(int(1), int(1)), (int(2), int(-1))]);
        assert!(d.non_binding.contains(&(0, int(2))));
        assert!(implied_marginal(&r, &q.spot).is_err());
    }

    #[test]
    fn every_violation_kind() {
        let cases = [
            (vec![(int(1), rat(-1, 10)), (int(2), int(0))], ViolationKind::NegativePrice),
            (vec![(int(1), rat(1, 10)), (int(2), rat(1, 5)), (int(3), int(0))], ViolationKind::CallSpread),
            (vec![(int(1), rat(1, 2)), (int(2), rat(2, 5)), (int(3), int(0))], ViolationKind::Butterfly),
            (vec![(rat(1, 2), rat(1, 10)), (int(2), int(0))], ViolationKind::SlopeBound),
        ];
        for (q, kind) in cases {
            let sheet = CallQuoteSheet { assets: vec![quotes(int(1), &q)] };
            let d = quote_diagnostics(&sheet);
            assert!(d.violations.iter().any(|v| v.kind == kind), "{kind}");
            for v in &d.violations {
                assert!(v.portfolio.is_nonnegative(), "{kind}: {v:?}");
                assert!(v.cost.is_negative());
            }
        }
        let ok = CallQuoteSheet { assets: vec![quotes(int(1), &[(int(1), rat(1, 4)), (int(2), int(0))])] };
        assert!(quote_diagnostics(&ok).consistent);
    }

    #[test]
    fn convex_order_examples() {
        let cfg = SolverConfig::default();
        let mu = DiscreteMarginal::new(vec![(int(1), int(1))]).unwrap();
        let nu = DiscreteMarginal::new(vec![(int(0), rat(1, 2)), (int(2), rat(1, 2))]).unwrap();
        assert!(convex_order_check(&mu, &nu).is_ordered());
        let pi = martingale_coupling(&mu, &nu, &cfg).unwrap().unwrap();
        assert_eq!(pi, vec![vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(convex_order_check(&nu, &mu), ConvexOrder::CallViolation(int(1)));
        assert!(martingale_coupling(&nu, &mu, &cfg).unwrap().is_none());
        assert!(convex_order_check(&mu, &mu).is_ordered());
    }

    fn binomial(down: Rational, up: Rational, mid: Option<Rational>) -> ScenarioTree {
        let mut specs = vec![NodeSpec::new("r", 0, None, vec![int(1)])];
        if let Some(m) = mid {
            specs.push(NodeSpec::new("m", 1, Some("r"), vec![m]));
            specs.push(NodeSpec::new("u", 2, Some("m"), vec![up]));
            specs.push(NodeSpec::new("d", 2, Some("m"), vec![down]));
            return ScenarioTree::new(2, 1, specs).unwrap();
        }
        specs.push(NodeSpec::new("u", 1, Some("r"), vec![up]));
        specs.push(NodeSpec::new("d", 1, Some("r"), vec![down]));
        ScenarioTree::new(1, 1, specs).unwrap()
    }

    #[test]
    fn support_enforcement_examples() {
        let mu = DiscreteMarginal::new(vec![(rat(1, 2), rat(2, 3)), (int(2), rat(1, 3))]).unwrap();
        let tree = binomial(rat(1, 2), int(2), Some(int(3)));
        let m = Market::new(tree, PriorSet::Flat(vec![Measure::uniform(2)]), vec![]).unwrap();
        let rep = support_enforcement(&m, &[mu.clone()]).unwrap();
        assert_eq!(rep.node_violations.len(), 1);
        let v = &rep.node_violations[0];
        assert_eq!(v.hedge, vec![int(-1)]);
        assert!(v.payoff.values.iter().all(|x| *x >= int(1)));

        let tree = binomial(rat(1, 2), int(2), Some(int(1)));
        let m = Market::new(tree, PriorSet::Flat(vec![Measure::uniform(2)]), vec![]).unwrap();
        assert!(support_enforcement(&m, &[mu]).unwrap().is_clean());
    }

    #[test]
    fn assemble_checks_terminal_support() {
        let sheet = CallQuoteSheet { assets: vec![quotes(int(1), &[(rat(1, 2), rat(1, 2)), (int(2), int(0))])] };
        let mu = calibrate(&sheet).unwrap();
        assert_eq!(mu[0].atoms(), &[(rat(1, 2), rat(2, 3)), (int(2), rat(1, 3))]);
        let m = assemble_market(&sheet, binomial(rat(1, 2), int(2), None), PriorSet::Flat(vec![Measure::uniform(2)]))
            .unwrap();
        assert_eq!(m.options.len(), 2);
        assert_eq!(m.options[0].payoff, vec![int(1), int(-1) / int(2)]);
        let bad = assemble_market(&sheet, binomial(rat(1, 2), int(3), None), PriorSet::Flat(vec![Measure::uniform(2)]));
        assert!(matches!(bad, Err(Error::Precondition(ref s)) if s.contains("u")));
    }
}
