//! Classical and sensitive no-arbitrage with certificates on both sides:
//! a strategy when arbitrage exists, martingale measures when it does not.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{self, LpStatus, Relation, Sense, SolverConfig};
use crate::market::{portfolio_value, Claim, GeneratorKind, Market, Measure, Strategy};
use crate::martingale::MartingaleSystem;
use crate::num::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoArbitrage,
    Arbitrage,
}

/// A martingale measure charging `leaf` with mass `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafWitness {
    pub leaf: usize,
    pub measure: Measure,
    pub delta: Rational,
}

/// A strategy whose payoff is `>= 0` q.s. and `> 0` at `leaf`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageWitness {
    pub leaf: usize,
    pub strategy: Strategy,
    pub payoff: Claim,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageVerdict {
    pub verdict: Verdict,
    pub witness: Option<ArbitrageWitness>,
    /// One entry per non-polar leaf when there is no arbitrage.
    pub measures: Vec<LeafWitness>,
}

#[derive(Clone, Debug)]
enum Charge {
    Charged(LeafWitness),
    /// `payoff >= 1_leaf` on the support.
    Hedged { leaf: usize, strategy: Strategy, payoff: Claim },
}

#[derive(Clone, Debug)]
enum Analysis {
    /// No calibrated martingale measure; `payoff > 0` on the whole support.
    Empty { strategy: Strategy, payoff: Claim },
    Leaves(Vec<Charge>),
}

fn check_payoff(
    market: &Market,
    support: &[usize],
    strategy: &Strategy,
    floor: impl Fn(usize) -> Rational,
    cfg: &SolverConfig,
) -> Result<Claim> {
    let payoff = portfolio_value(&market.tree, strategy, &market.options)?;
    for &s in support {
        if !cfg.is_nonnegative(&(&payoff.values[s] - floor(s))) {
            return Err(Error::model(format!(
                "certificate check failed at leaf {}",
                market.tree.leaf_id(s)
            )));
        }
    }
    Ok(payoff)
}

/// Which leaves of `support` some calibrated martingale measure on
/// `support` charges, with a measure or a hedge for each.
fn analyse(market: &Market, support: &[usize], cfg: &SolverConfig) -> Result<Analysis> {
    let sys = MartingaleSystem::new(market, support);
    let n = sys.len();
    let leaves = market.num_leaves();

    // max ε s.t. Q ≥ ε on the support
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut interior = sys.lp(Sense::Maximize, objective);
    for k in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[k] = Rational::one();
        row[n] = -Rational::one();
        interior.add_constraint(row, Relation::Ge, Rational::zero());
    }
    let out = lp::solve(&interior, cfg)?;
    if out.status != LpStatus::Optimal {
        let base = sys.lp(Sense::Maximize, vec![Rational::zero(); n]);
        let out = lp::solve(&base, cfg)?;
        if out.status != LpStatus::Infeasible {
            return Err(Error::model("martingale system changed feasibility between solves"));
        }
        let strategy = sys.strategy(market, &out.dual, &-Rational::one());
        let margin = out.dual[0].clone();
        let payoff = check_payoff(market, support, &strategy, |_| margin.clone(), cfg)?;
        return Ok(Analysis::Empty { strategy, payoff });
    }
    let q = sys.spread(&out.primal[..n], leaves);
    let eps = out.value.clone().unwrap_or_default();
    let interior_q = Measure::from_weights(q.clone());

    let results: Vec<Result<Charge>> = support
        .par_iter()
        .map(|&a| {
            if cfg.is_positive(&eps) || cfg.is_positive(&q[a]) {
                return Ok(Charge::Charged(LeafWitness {
                    leaf: a,
                    measure: interior_q.clone(),
                    delta: q[a].clone(),
                }));
            }
            let k = support.iter().position(|&s| s == a).expect("support leaf");
            let mut obj = vec![Rational::zero(); n];
            obj[k] = Rational::one();
            let out = lp::solve(&sys.lp(Sense::Maximize, obj), cfg)?;
            let value = out.value.clone().unwrap_or_default();
            if out.status == LpStatus::Optimal && cfg.is_positive(&value) {
                return Ok(Charge::Charged(LeafWitness {
                    leaf: a,
                    measure: Measure::from_weights(sys.spread(&out.primal, leaves)),
                    delta: value,
                }));
            }
            let strategy = sys.strategy(market, &out.dual, &Rational::one());
            let payoff = check_payoff(
                market,
                support,
                &strategy,
                |s| if s == a { Rational::one() } else { Rational::zero() },
                cfg,
            )?;
            Ok(Charge::Hedged { leaf: a, strategy, payoff })
        })
        .collect();
    Ok(Analysis::Leaves(results.into_iter().collect::<Result<_>>()?))
}

/// Scales a witness so that its largest payoff on the support is 1.
fn normalized(support: &[usize], leaf: usize, strategy: Strategy, payoff: Claim) -> ArbitrageWitness {
    let top = support.iter().map(|&s| &payoff.values[s]).max().expect("nonempty support");
    if !top.is_positive() {
        return ArbitrageWitness { leaf, strategy, payoff };
    }
    let k = Rational::one() / top;
    ArbitrageWitness { leaf, strategy: strategy.scale(&k), payoff: payoff.scale(&k) }
}

/// Decides quasi-sure no-arbitrage.
///
/// ```
/// use robust_ftap::arbitrage::{check_na, Verdict};
/// use robust_ftap::io::examples::binomial;
///
/// let v = check_na(&binomial(), &Default::default()).unwrap();
/// assert_eq!(v.verdict, Verdict::NoArbitrage);
/// ```
pub fn check_na(market: &Market, cfg: &SolverConfig) -> Result<ArbitrageVerdict> {
    let support = market.polar().support();
    if support.is_empty() {
        return Err(Error::model("every leaf is polar"));
    }
    match analyse(market, &support, cfg)? {
        Analysis::Empty { strategy, payoff } => {
            let top = support.iter().copied().max_by(|&a, &b| payoff.values[a].cmp(&payoff.values[b]).then(b.cmp(&a)));
            Ok(ArbitrageVerdict {
                verdict: Verdict::Arbitrage,
                witness: Some(normalized(&support, top.expect("nonempty support"), strategy, payoff)),
                measures: Vec::new(),
            })
        }
        Analysis::Leaves(charges) => {
            let mut measures = Vec::new();
            for c in charges {
                match c {
                    Charge::Charged(w) => measures.push(w),
                    Charge::Hedged { leaf, strategy, payoff } => {
                        return Ok(ArbitrageVerdict {
                            verdict: Verdict::Arbitrage,
                            witness: Some(normalized(&support, leaf, strategy, payoff)),
                            measures: Vec::new(),
                        })
                    }
                }
            }
            Ok(ArbitrageVerdict { verdict: Verdict::NoArbitrage, witness: None, measures })
        }
    }
}

/// Zero-cost hedge of an indicator under one prior.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorHedge {
    pub prior: String,
    pub strategy: Strategy,
    pub payoff: Claim,
}

/// `1_leaf` has per-prior superhedging price `<= 0` under every prior.
#[derive(Clone, Debug, PartialEq)]
pub struct SensitiveWitness {
    pub leaf: usize,
    pub claim: Claim,
    pub hedges: Vec<PriorHedge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnaVerdict {
    pub na: ArbitrageVerdict,
    pub verdict: Verdict,
    pub witness: Option<SensitiveWitness>,
    /// For each non-polar leaf, a prior under which `1_leaf` has positive price.
    pub charged_by: Vec<(usize, String)>,
}

/// Decides sensitive no-arbitrage by sweeping indicator claims of
/// non-polar leaves against the candidate priors.
pub fn check_sna(market: &Market, cfg: &SolverConfig) -> Result<SnaVerdict> {
    let na = check_na(market, cfg)?;
    let support = market.polar().support();
    let candidates = market.priors.candidates(&market.tree);
    let mut unresolved: Vec<usize> = support.clone();
    let mut charged_by = Vec::new();
    let mut hedges: Vec<Vec<PriorHedge>> = vec![Vec::new(); market.num_leaves()];
    for prior in &candidates {
        let supp = prior.measure.support();
        let targets: Vec<usize> = unresolved.iter().copied().filter(|a| supp.contains(a)).collect();
        if targets.is_empty() {
            continue;
        }
        match analyse(market, &supp, cfg)? {
            Analysis::Empty { strategy, payoff } => {
                let m = supp.iter().map(|&s| payoff.values[s].clone()).min().expect("nonempty support");
                let k = Rational::one() / m;
                for &a in &targets {
                    hedges[a].push(PriorHedge {
                        prior: prior.name.clone(),
                        strategy: strategy.scale(&k),
                        payoff: payoff.scale(&k),
                    });
                }
            }
            Analysis::Leaves(charges) => {
                for c in charges {
                    match c {
                        Charge::Charged(w) if targets.contains(&w.leaf) => {
                            charged_by.push((w.leaf, prior.name.clone()));
                            unresolved.retain(|&a| a != w.leaf);
                        }
                        Charge::Hedged { leaf, strategy, payoff } if targets.contains(&leaf) => {
                            hedges[leaf].push(PriorHedge { prior: prior.name.clone(), strategy, payoff });
                        }
                        _ => {}
                    }
                }
            }
        }
        if unresolved.is_empty() {
            break;
        }
    }
    charged_by.sort();
    let witness = unresolved.first().map(|&a| {
        let zero = Strategy::zero(&market.tree, market.options.len());
        let zero_payoff = Claim::constant(market.num_leaves(), Rational::zero());
        let mut found = std::mem::take(&mut hedges[a]);
        let all = candidates
            .iter()
            .map(|p| match found.iter().position(|h| h.prior == p.name) {
                Some(i) => found.swap_remove(i),
                None => PriorHedge { prior: p.name.clone(), strategy: zero.clone(), payoff: zero_payoff.clone() },
            })
            .collect();
        SensitiveWitness { leaf: a, claim: Claim::indicator(market.num_leaves(), a), hedges: all }
    });
    let verdict = if witness.is_some() { Verdict::Arbitrage } else { Verdict::NoArbitrage };
    Ok(SnaVerdict { na, verdict, witness, charged_by })
}

/// Calibrated martingale measure on the quasi-sure support maximizing the
/// mass of `leaf`, with that mass.
pub fn find_witness_measure(market: &Market, leaf: usize, cfg: &SolverConfig) -> Result<LeafWitness> {
    let polar = market.polar();
    if leaf >= market.num_leaves() {
        return Err(Error::Precondition(format!("no leaf at position {leaf}")));
    }
    if polar.is_polar(leaf) {
        return Err(Error::Precondition(format!("leaf {} is polar", market.tree.leaf_id(leaf))));
    }
    let support = polar.support();
    let sys = MartingaleSystem::new(market, &support);
    let mut obj = vec![Rational::zero(); sys.len()];
    obj[support.iter().position(|&s| s == leaf).expect("support leaf")] = Rational::one();
    let out = lp::solve(&sys.lp(Sense::Maximize, obj), cfg)?;
    if out.status != LpStatus::Optimal {
        return Err(Error::Precondition("no calibrated martingale measure exists; NA fails".into()));
    }
    let delta = out.value.clone().unwrap_or_default();
    if !cfg.is_positive(&delta) {
        return Err(Error::Precondition(format!(
            "NA fails at leaf {}: every calibrated martingale measure ignores it",
            market.tree.leaf_id(leaf)
        )));
    }
    Ok(LeafWitness { leaf, measure: Measure::from_weights(sys.spread(&out.primal, market.num_leaves())), delta })
}

/// How the members of an [`ApproximateClass`] are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassVariant {
    /// Every member is the exact witness measure.
    Exact,
    /// Member `n` mixes the witness with the dominating prior so that its
    /// moment errors are positive but at most `1/(2n)`.
    Mixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximateClass {
    pub leaf: usize,
    pub dominating: String,
    pub dominating_measure: Measure,
    pub delta: Rational,
    pub members: Vec<(usize, Measure)>,
}

/// Moment errors of a measure: `|E[φ_i]|` per option and, per time step
/// and asset, `sup_A |E[1_A ΔS^j_k]|` over events `A` known one step before.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentErrors {
    pub options: Vec<Rational>,
    /// `(k, j, error)`.
    pub steps: Vec<(usize, usize, Rational)>,
}

impl MomentErrors {
    pub fn max(&self) -> Rational {
        self.options.iter().chain(self.steps.iter().map(|s| &s.2)).max().cloned().unwrap_or_default()
    }
}

pub fn moment_errors(market: &Market, q: &Measure) -> MomentErrors {
    let tree = &market.tree;
    let all = vec![true; tree.nodes().len()];
    let mut pos = vec![vec![Rational::zero(); tree.assets()]; tree.horizon() + 1];
    let mut neg = pos.clone();
    let mut options = Vec::new();
    for g in market.generators(&all) {
        let e = q.expectation(&g.payoff);
        match g.kind {
            GeneratorKind::Trade { node, asset } => {
                let k = tree.node(node).time + 1;
                if e.is_positive() {
                    pos[k][asset] += e;
                } else {
                    neg[k][asset] -= e;
                }
            }
            GeneratorKind::Option { .. } => options.push(e.abs()),
        }
    }
    let mut steps = Vec::new();
    for k in 1..=tree.horizon() {
        for j in 0..tree.assets() {
            steps.push((k, j, pos[k][j].clone().max(neg[k][j].clone())));
        }
    }
    MomentErrors { options, steps }
}

/// Checks that `q` belongs to the `n`-th level of an approximate class
/// charging `leaf` with at least `delta`. Returns the first violation.
pub fn check_member(
    market: &Market,
    q: &Measure,
    n: usize,
    dominating: &Measure,
    leaf: usize,
    delta: &Rational,
) -> std::result::Result<(), String> {
    if q.weights().len() != market.num_leaves() {
        return Err("measure does not cover the leaves".into());
    }
    if q.weights().iter().any(|w| w.is_negative()) || !q.weights().iter().sum::<Rational>().is_one() {
        return Err("not a probability measure".into());
    }
    if !dominating.dominates(q) {
        return Err("not absolutely continuous with respect to the dominating prior".into());
    }
    if q.mass(leaf) < delta {
        return Err(format!("mass {} at leaf {} is below {delta}", q.mass(leaf), market.tree.leaf_id(leaf)));
    }
    let bound = Rational::new(1.into(), (n as i64).into());
    let errs = moment_errors(market, q);
    for (i, e) in errs.options.iter().enumerate() {
        if *e > bound {
            return Err(format!("option {i} error {e} exceeds 1/{n}"));
        }
    }
    for (k, j, e) in &errs.steps {
        if *e > bound {
            return Err(format!("asset {j} step {k} error {e} exceeds 1/{n}"));
        }
    }
    Ok(())
}

/// A sequence `Q_1..Q_{n_max}` of approximate martingale measures, all
/// absolutely continuous with respect to one dominating prior and
/// charging `leaf` uniformly.
pub fn approximate_class(
    market: &Market,
    leaf: usize,
    n_max: usize,
    variant: ClassVariant,
    cfg: &SolverConfig,
) -> Result<ApproximateClass> {
    let dom = market.priors.dominating(&market.tree).ok_or_else(|| {
        Error::Precondition("no prior dominates the others; approximate classes need a dominating prior".into())
    })?;
    let w = find_witness_measure(market, leaf, cfg)?;
    let (delta, members) = match variant {
        ClassVariant::Exact => (w.delta.clone(), (1..=n_max).map(|n| (n, w.measure.clone())).collect()),
        ClassVariant::Mixed => {
            let scale = moment_errors(market, &dom.measure).max().max(Rational::one());
            let members = (1..=n_max)
                .map(|n| {
                    let t = Rational::one() / (Rational::from_integer((2 * n as i64).into()) * &scale);
                    let s = Rational::one() - &t;
                    let weights = w
                        .measure
                        .weights()
                        .iter()
                        .zip(dom.measure.weights())
                        .map(|(a, b)| &s * a + &t * b)
                        .collect();
                    (n, Measure::from_weights(weights))
                })
                .collect();
            (&w.delta / Rational::from_integer(2.into()), members)
        }
    };
    Ok(ApproximateClass { leaf, dominating: dom.name, dominating_measure: dom.measure, delta, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::fixtures::*;
    use crate::market::{KernelPriors, PriorSet, StaticOption};
    use crate::num::{int, rat};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn binomial_has_unique_martingale_measure() {
        let m = binomial();
        let v = check_na(&m, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::NoArbitrage);
        assert_eq!(v.measures.len(), 2);
        for w in &v.measures {
            assert_eq!(w.measure.weights(), &[rat(1, 3), rat(2, 3)]);
        }
        let w = find_witness_measure(&m, 0, &cfg()).unwrap();
        assert_eq!(w.delta, rat(1, 3));
    }

    #[test]
    fn rising_market_has_arbitrage() {
        let m = one_period(int(2), rat(3, 2), PriorSet::Flat(vec![Measure::uniform(2)]));
        let v = check_na(&m, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Arbitrage);
        let w = v.witness.unwrap();
        assert_eq!(w.strategy.dynamic[m.tree.root()][0], int(1));
        assert_eq!(w.payoff.values, vec![int(1), rat(1, 2)]);
        assert_eq!(w.leaf, 0);
    }

    #[test]
    fn three_state_market_is_na_but_not_sna() {
        let m = three_state();
        let na = check_na(&m, &cfg()).unwrap();
        assert_eq!(na.verdict, Verdict::NoArbitrage);
        let s = check_sna(&m, &cfg()).unwrap();
        assert_eq!(s.verdict, Verdict::Arbitrage);
        let w = s.witness.unwrap();
        assert_eq!(m.tree.leaf_id(w.leaf), "c");
        assert_eq!(w.hedges.len(), 2);
        for h in &w.hedges {
            let supp = if h.prior == "P1" { vec![0, 1] } else { vec![2] };
            for s in supp {
                let floor = if s == 2 { int(1) } else { int(0) };
                assert!(h.payoff.values[s] >= floor, "{} at {s}", h.prior);
            }
        }
    }

    #[test]
    fn single_prior_sna_matches_na() {
        let m = binomial();
        let s = check_sna(&m, &cfg()).unwrap();
        assert_eq!(s.verdict, Verdict::NoArbitrage);
        assert_eq!(s.na.verdict, Verdict::NoArbitrage);
    }

    #[test]
    fn trinomial_middle_leaf_mass_is_one() {
        let m = {
            use crate::market::{Market, NodeSpec, ScenarioTree};
            let t = ScenarioTree::new(
                1,
                1,
                vec![
                    NodeSpec::new("r", 0, None, vec![int(1)]),
                    NodeSpec::new("hi", 1, Some("r"), vec![int(2)]),
                    NodeSpec::new("mid", 1, Some("r"), vec![int(1)]),
                    NodeSpec::new("lo", 1, Some("r"), vec![rat(1, 2)]),
                ],
            )
            .unwrap();
            Market::new(t, PriorSet::Flat(vec![Measure::uniform(3)]), vec![]).unwrap()
        };
        // vertices of the martingale polytope: (0,1,0) and (1/3,0,2/3)
        let w = find_witness_measure(&m, 1, &cfg()).unwrap();
        assert_eq!(w.delta, int(1));
        assert_eq!(w.measure.weights(), &[int(0), int(1), int(0)]);
    }

    #[test]
    fn polar_leaf_is_refused() {
        let m = one_period(
            int(2),
            rat(1, 2),
            PriorSet::Flat(vec![Measure::new(vec![int(1), int(0)]).unwrap()]),
        );
        assert!(matches!(find_witness_measure(&m, 1, &cfg()), Err(Error::Precondition(_))));
    }

    #[test]
    fn calibrated_option_restricts_measures() {
        // the call (S_1 - 1)_+ priced at 1/3 is consistent; at 1/2 it is not
        let base = binomial();
        let fair = StaticOption { label: "call".into(), payoff: vec![int(1) - rat(1, 3), -rat(1, 3)] };
        let m = Market::new(base.tree.clone(), base.priors.clone(), vec![fair]).unwrap();
        assert_eq!(check_na(&m, &cfg()).unwrap().verdict, Verdict::NoArbitrage);
        let rich = StaticOption { label: "call".into(), payoff: vec![rat(1, 2), -rat(1, 2)] };
        let m = Market::new(base.tree.clone(), base.priors.clone(), vec![rich]).unwrap();
        let v = check_na(&m, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Arbitrage);
        assert!(v.witness.unwrap().payoff.values.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn approximate_class_thresholds() {
        let m = binomial();
        let c = approximate_class(&m, 0, 5, ClassVariant::Exact, &cfg()).unwrap();
        for (n, q) in &c.members {
            check_member(&m, q, *n, &c.dominating_measure, 0, &c.delta).unwrap();
        }
        let mixed = approximate_class(&m, 0, 100, ClassVariant::Mixed, &cfg()).unwrap();
        for (n, q) in &mixed.members {
            check_member(&m, q, *n, &mixed.dominating_measure, 0, &mixed.delta).unwrap();
            assert!(moment_errors(&m, q).max().is_positive());
        }
        // (2/5, 3/5) has error 2/5 - 3/10 = 1/10
        let q = Measure::new(vec![rat(2, 5), rat(3, 5)]).unwrap();
        assert_eq!(moment_errors(&m, &q).max(), rat(1, 10));
        let dom = Measure::uniform(2);
        assert!(check_member(&m, &q, 10, &dom, 0, &rat(1, 3)).is_ok());
        assert!(check_member(&m, &q, 11, &dom, 0, &rat(1, 3)).is_err());
        let off = Measure::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        assert!(check_member(&m, &off, 1, &Measure::new(vec![int(1), int(0)]).unwrap(), 0, &rat(1, 3)).is_err());
    }

    #[test]
    fn non_dominated_priors_have_no_approximate_class() {
        assert!(matches!(
            approximate_class(&three_state(), 0, 3, ClassVariant::Exact, &cfg()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn kernel_priors_sna_equals_na() {
        let m = two_period(|t| {
            let mut k = KernelPriors::empty(t);
            k.push(t.node_index("r").unwrap(), vec![int(1), int(0)]);
            k.push(t.node_index("r").unwrap(), vec![int(0), int(1)]);
            k.push(t.node_index("u").unwrap(), vec![rat(1, 2), rat(1, 2)]);
            k.push(t.node_index("d").unwrap(), vec![rat(1, 2), rat(1, 2)]);
            PriorSet::Kernel(k)
        });
        let s = check_sna(&m, &cfg()).unwrap();
        assert_eq!(s.verdict, s.na.verdict);
        assert_eq!(s.verdict, Verdict::NoArbitrage);
    }
}
