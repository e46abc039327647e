//! Seeded random markets for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::SolverConfig;
use crate::market::{Claim, KernelPriors, Market, Measure, NodeSpec, PriorSet, ScenarioTree, StaticOption};
use crate::num::{int, rat, Price, Rational};
use crate::superhedge::{superhedge_qs, HedgeOptions};

pub const MAX_HORIZON: usize = 3;
pub const MAX_BRANCHING: usize = 4;
pub const MAX_ASSETS: usize = 2;
pub const MAX_PRIORS: usize = 3;

/// Chance that a node's first child moves every asset up and its second
/// moves every asset down.
const STRADDLE: f64 = 0.95;

const KEEP: f64 = 0.9;

/// Chance that a call is priced inside its no-arbitrage interval.
const FAIR: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub horizon: usize,
    pub branching: usize,
    pub assets: usize,
    pub priors: usize,
    /// Per-node kernels instead of flat priors.
    pub kernel: bool,
    /// Number of at-the-money calls.
    pub options: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { seed: 0, horizon: 2, branching: 2, assets: 1, priors: 2, kernel: false, options: 0 }
    }
}

fn factors() -> [Rational; 5] {
    [rat(1, 2), rat(2, 3), int(1), rat(3, 2), int(2)]
}

fn call_prices() -> [Rational; 5] {
    [int(0), rat(1, 8), rat(1, 4), rat(1, 3), rat(1, 2)]
}

/// Random weights in `1..=4` on a random subset (each slot kept with
/// probability `KEEP`, at least one kept), normalized.
fn random_probability(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(KEEP) { rng.gen_range(1..=4) } else { 0 }).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.gen_range(0..n)] = rng.gen_range(1..=4);
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| rat(x, total)).collect()
}

/// Builds a market whose every node has `branching` children, prices move
/// by factors in `{1/2, 2/3, 1, 3/2, 2}` (usually one child up and one
/// down) and the priors charge random subsets. The same configuration always yields the same market.
pub fn generate(cfg: &GeneratorConfig) -> Result<Market> {
    let check = |name: &str, v: usize, max: usize| {
        if v == 0 || v > max {
            Err(Error::Scale(format!("{name} = {v} outside 1..={max}")))
        } else {
            Ok(())
        }
    };
    check("horizon", cfg.horizon, MAX_HORIZON)?;
    check("branching", cfg.branching, MAX_BRANCHING)?;
    check("assets", cfg.assets, MAX_ASSETS)?;
    check("priors", cfg.priors, MAX_PRIORS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = factors();
    let mut specs = vec![NodeSpec::new("r", 0, None, vec![int(1); cfg.assets])];
    let mut frontier = vec![("r".to_string(), vec![int(1); cfg.assets])];
    for t in 1..=cfg.horizon {
        let mut next = Vec::new();
        for (id, prices) in &frontier {
            let straddle = cfg.branching >= 2 && rng.gen_bool(STRADDLE);
            for c in 0..cfg.branching {
                let child = if id == "r" { format!("n{c}") } else { format!("{id}{c}") };
                let grid: &[Rational] = match (straddle, c) {
                    (true, 0) => &f[3..],
                    (true, 1) => &f[..2],
                    _ => &f,
                };
                let p: Vec<Rational> = prices.iter().map(|s| s * grid.choose(&mut rng).expect("factors")).collect();
                specs.push(NodeSpec::new(&child, t, Some(id), p.clone()));
                next.push((child, p));
            }
        }
        frontier = next;
    }
    let tree = ScenarioTree::new(cfg.horizon, cfg.assets, specs)?;
    let priors = if cfg.kernel {
        let mut k = KernelPriors::empty(&tree);
        for n in tree.inner_nodes().collect::<Vec<_>>() {
            for _ in 0..cfg.priors {
                k.push(n, random_probability(&mut rng, cfg.branching));
            }
        }
        PriorSet::Kernel(k)
    } else {
        PriorSet::Flat(
            (0..cfg.priors)
                .map(|_| Measure::new(random_probability(&mut rng, tree.num_leaves())))
                .collect::<Result<_>>()?,
        )
    };
    let base = Market::new(tree, priors, Vec::new())?;
    let grid = call_prices();
    let mut options = Vec::new();
    for i in 0..cfg.options {
        let j = i % cfg.assets;
        let intrinsic: Vec<Rational> = base
            .tree
            .leaves()
            .iter()
            .map(|&l| {
                let s = &base.tree.node(l).prices[j];
                if *s > int(1) { s - int(1) } else { int(0) }
            })
            .collect();
        let fair = if rng.gen_bool(FAIR) { midpoint(&base, &intrinsic)? } else { None };
        let c = fair.unwrap_or_else(|| grid.choose(&mut rng).expect("prices").clone());
        let payoff = intrinsic.iter().map(|v| v - &c).collect();
        options.push(StaticOption { label: format!("call{j}@1#{i}"), payoff });
    }
    Market::new(base.tree, base.priors, options)
}

/// Middle of the no-arbitrage price interval of `x` in the option-free
/// market, when both ends are finite.
fn midpoint(market: &Market, x: &[Rational]) -> Result<Option<Rational>> {
    let cfg = SolverConfig::default();
    let opts = HedgeOptions::default();
    let hi = superhedge_qs(market, &Claim::new(x.to_vec()), &opts, &cfg)?.price;
    let neg = Claim::new(x.iter().map(|v| -v).collect());
    let lo = superhedge_qs(market, &neg, &opts, &cfg)?.price;
    Ok(match (hi, lo) {
        (Price::Finite(h), Price::Finite(l)) => Some((h - l) / int(2)),
        _ => None,
    })
}

/// Configuration of instance `index` of the standard random suite. It
/// cycles through horizons 1..=3, branching 2..=4, one or two assets and
/// one to three priors; every fourth instance uses kernel priors and small
/// flat instances carry a call.
pub fn suite(index: u64) -> GeneratorConfig {
    let i = index as usize;
    let horizon = 1 + i % 3;
    let branching = 2 + (i / 3) % 3;
    let kernel = i % 4 == 3;
    let options = usize::from(!kernel && i.is_multiple_of(2) && branching.pow(horizon as u32) <= 12);
    GeneratorConfig {
        seed: index,
        horizon,
        branching,
        assets: 1 + (i / 9) % 2,
        priors: 1 + (i / 18) % 3,
        kernel,
        options,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let cfg = GeneratorConfig { seed: 7, horizon: 2, branching: 3, assets: 2, priors: 3, kernel: false, options: 1 };
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        assert_eq!(a.num_leaves(), 9);
        assert_ne!(a, generate(&GeneratorConfig { seed: 8, ..cfg }).unwrap());
        assert!(generate(&GeneratorConfig { kernel: true, ..cfg }).is_ok());
        for bad in [
            GeneratorConfig { horizon: 4, ..cfg },
            GeneratorConfig { branching: 5, ..cfg },
            GeneratorConfig { assets: 3, ..cfg },
            GeneratorConfig { priors: 4, ..cfg },
        ] {
            assert!(matches!(generate(&bad), Err(Error::Scale(_))));
        }
    }
}
