//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::check::{calibrated_martingale, expectation, gains, qs_support};
use robust_ftap::arbitrage::{approximate_class, check_na, check_sna, ClassVariant, Verdict};
use robust_ftap::io::examples;
use robust_ftap::io::generate::{generate, suite, GeneratorConfig};
use robust_ftap::io::oracle::{oracle_na, oracle_sna};
use robust_ftap::lp::SolverConfig;
use robust_ftap::market::{Claim, Market};
use robust_ftap::mot::{
    calibrate, convex_order_check, martingale_coupling, quote_diagnostics, support_function, AssetQuotes,
    CallQuoteSheet, DiscreteMarginal, ViolationKind,
};
use robust_ftap::num::{int, rat, to_f64, Price, Rational};
use robust_ftap::superhedge::{duality_check, sensitivity_report, Continuation, Gap};

const SUITE_SIZE: u64 = 200;
const NA_BUDGET: Duration = Duration::from_secs(60);
const CLAIMS_PER_INSTANCE: u64 = 5;
const FLOAT_TOL: f64 = 1e-9;
const KERNEL_INSTANCES: usize = 100;
const KERNEL_CLAIMS: u64 = 3;
const CLASS_INSTANCES: usize = 20;
const CLASS_N_MAX: usize = 100;
const SHEETS: usize = 50;
const MAX_STRIKES: usize = 8;
const PAIRS: usize = 100;
const MAX_ATOMS: usize = 8;
const CORRUPTIONS: u64 = 20;

type Outcome = Result<String, String>;

fn exact() -> SolverConfig {
    SolverConfig::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_claim(rng: &mut ChaCha8Rng, n: usize) -> Claim {
    Claim::new((0..n).map(|_| rat(rng.gen_range(-4..=4), rng.gen_range(1..=4))).collect())
}

fn suite_markets() -> Result<Vec<(u64, Market)>, String> {
    (0..SUITE_SIZE).map(|i| generate(&suite(i)).map(|m| (i, m)).map_err(|e| format!("instance {i}: {e}"))).collect()
}

fn na_instances() -> Result<Vec<(u64, Market)>, String> {
    let mut out = Vec::new();
    for (i, m) in suite_markets()? {
        if check_na(&m, &exact()).map_err(|e| e.to_string())?.verdict == Verdict::NoArbitrage {
            out.push((i, m));
        }
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let markets = suite_markets()?;
    let start = Instant::now();
    let (mut na, mut arb) = (0, 0);
    for (i, m) in &markets {
        let fail = |msg: String| format!("instance {i}: {msg}");
        let v = check_na(m, &exact()).map_err(|e| fail(e.to_string()))?;
        let o = oracle_na(m).map_err(|e| fail(e.to_string()))?;
        let support = qs_support(m);
        ensure((v.verdict == Verdict::NoArbitrage) == o.na, || fail(format!("check_na {:?}, oracle {}", v.verdict, o.na)))?;
        match v.verdict {
            Verdict::Arbitrage => {
                arb += 1;
                let w = v.witness.as_ref().ok_or_else(|| fail("arbitrage without witness".into()))?;
                let g = gains(m, &w.strategy);
                ensure(g.iter().zip(&support).all(|(x, &s)| !s || !x.is_negative()), || fail("witness loses money".into()))?;
                ensure(g.iter().zip(&support).any(|(x, &s)| s && x.is_positive()), || fail("witness never profits".into()))?;
            }
            Verdict::NoArbitrage => {
                na += 1;
                for (pos, &s) in support.iter().enumerate() {
                    if !s {
                        continue;
                    }
                    let w = v
                        .measures
                        .iter()
                        .find(|w| w.leaf == pos)
                        .ok_or_else(|| fail(format!("no measure for leaf {pos}")))?;
                    ensure(w.delta.is_positive() && w.measure.mass(pos) >= &w.delta, || fail(format!("leaf {pos} uncharged")))?;
                    calibrated_martingale(m, w.measure.weights(), &support).map_err(|e| fail(format!("leaf {pos}: {e}")))?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < NA_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{}/{} agree ({na} NA, {arb} arbitrage) in {:.1}s", markets.len(), markets.len(), elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let markets = na_instances()?;
    let mut claims = 0;
    for (i, m) in &markets {
        let support = qs_support(m);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        for c in 0..CLAIMS_PER_INSTANCE {
            let fail = |msg: String| format!("instance {i} claim {c}: {msg}");
            let x = random_claim(&mut rng, m.num_leaves());
            let r = duality_check(m, &x, &exact()).map_err(|e| fail(e.to_string()))?;
            let Price::Finite(p) = &r.recursion else { return Err(fail("infinite price".into())) };
            ensure(r.global == r.recursion, || fail(format!("global {:?} vs recursion {p}", r.global)))?;
            ensure(r.dual.as_ref() == Some(p), || fail(format!("dual {:?} vs {p}", r.dual)))?;
            ensure(r.gap.as_ref().is_some_and(Zero::is_zero), || fail("nonzero gap".into()))?;
            let q = r.measure.as_ref().ok_or_else(|| fail("no dual measure".into()))?;
            calibrated_martingale(m, q.weights(), &support).map_err(fail)?;
            ensure(expectation(q.weights(), &x.values) == *p, || fail("dual measure does not attain the price".into()))?;
            let f = duality_check(m, &x, &SolverConfig::float(FLOAT_TOL)).map_err(|e| fail(format!("float: {e}")))?;
            let close = |v: &Price| v.finite().is_some_and(|v| (to_f64(v) - to_f64(p)).abs() <= FLOAT_TOL);
            ensure(close(&f.recursion) && close(&f.global), || fail(format!("float {:?} / {:?} vs {p}", f.recursion, f.global)))?;
            ensure(f.dual.as_ref().is_some_and(|d| (to_f64(d) - to_f64(p)).abs() <= FLOAT_TOL), || fail("float dual".into()))?;
            claims += 1;
        }
    }
    Ok(format!("{claims} claims on {} NA instances: gap 0 exact, float within {FLOAT_TOL:e}", markets.len()))
}

fn criterion_3() -> Outcome {
    let mut found = 0;
    let mut seed = 0u64;
    while found < KERNEL_INSTANCES {
        ensure(seed < 2000, || format!("only {found} NA kernel instances"))?;
        let base = suite(seed);
        let cfg = GeneratorConfig { seed: 50_000 + seed, kernel: true, options: 0, ..base };
        seed += 1;
        let m = generate(&cfg).map_err(|e| e.to_string())?;
        if check_na(&m, &exact()).map_err(|e| e.to_string())?.verdict != Verdict::NoArbitrage {
            continue;
        }
        found += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for c in 0..KERNEL_CLAIMS {
            let fail = |msg: String| format!("kernel seed {} claim {c}: {msg}", cfg.seed);
            let x = random_claim(&mut rng, m.num_leaves());
            let r = sensitivity_report(&m, &x, Continuation::QuasiSure, &exact()).map_err(|e| fail(e.to_string()))?;
            ensure(r.gap.is_zero(), || fail(format!("gap {}", r.gap)))?;
            let sel = r.selection.as_ref().ok_or_else(|| fail("no selection".into()))?;
            ensure(sel.price == r.quasi_sure_price, || fail("selection misses the price".into()))?;
        }
    }
    let three = examples::three_state();
    let na = check_na(&three, &exact()).map_err(|e| e.to_string())?.verdict == Verdict::NoArbitrage;
    let sna = check_sna(&three, &exact()).map_err(|e| e.to_string())?.verdict == Verdict::NoArbitrage;
    let oracle = oracle_sna(&three).map_err(|e| e.to_string())?.sna;
    let c = three.tree.leaf_position_by_id("c").expect("leaf c");
    let r = sensitivity_report(&three, &Claim::indicator(3, c), Continuation::QuasiSure, &exact()).map_err(|e| e.to_string())?;
    ensure(na && !sna && !oracle, || format!("three-state: NA {na}, sNA {sna}, oracle sNA {oracle}"))?;
    ensure(r.gap == Gap::Finite(rat(1, 3)), || format!("three-state gap {}", r.gap))?;
    Ok(format!("{found} kernel instances x {KERNEL_CLAIMS} claims gap 0; three-state NA, not sNA, gap 1/3"))
}

/// `sup_B |E[1_B ΔS^j_k]|` over every union `B` of time-`(k-1)` nodes.
fn step_error(m: &Market, q: &[Rational], k: usize, j: usize) -> Rational {
    let tree = &m.tree;
    let nodes: Vec<usize> = (0..tree.nodes().len()).filter(|&n| tree.node(n).time == k - 1).collect();
    let mut by_node = vec![Rational::zero(); nodes.len()];
    for (pos, &l) in tree.leaves().iter().enumerate() {
        let path = tree.path(l);
        let i = nodes.iter().position(|&n| n == path[k - 1]).expect("time k-1 node");
        by_node[i] += &q[pos] * (&tree.node(path[k]).prices[j] - &tree.node(path[k - 1]).prices[j]);
    }
    let mut best = Rational::zero();
    for mask in 0u32..(1 << nodes.len()) {
        let e: Rational = (0..nodes.len()).filter(|i| mask & (1 << i) != 0).map(|i| by_node[i].clone()).sum();
        best = best.max(e.abs());
    }
    best
}

fn criterion_4() -> Outcome {
    let mut done = 0;
    let mut members = 0;
    let mut seed = 0u64;
    while done < CLASS_INSTANCES {
        ensure(seed < 2000, || format!("only {done} instances"))?;
        let cfg = GeneratorConfig {
            seed: 70_000 + seed,
            horizon: 1 + (seed as usize) % 2,
            branching: 2 + (seed as usize / 2) % 2,
            assets: 1 + (seed as usize / 4) % 2,
            priors: 1 + (seed as usize / 8) % 3,
            kernel: seed % 5 == 4,
            options: usize::from(seed.is_multiple_of(3) && seed % 5 != 4),
        };
        seed += 1;
        let m = generate(&cfg).map_err(|e| e.to_string())?;
        if m.priors.dominating(&m.tree).is_none() || check_na(&m, &exact()).map_err(|e| e.to_string())?.verdict != Verdict::NoArbitrage {
            continue;
        }
        done += 1;
        let support = qs_support(&m);
        for leaf in (0..m.num_leaves()).filter(|&l| support[l]) {
            for variant in [ClassVariant::Mixed, ClassVariant::Exact] {
                let fail = |msg: String| format!("seed {} leaf {leaf} {variant:?}: {msg}", cfg.seed);
                let class = approximate_class(&m, leaf, CLASS_N_MAX, variant, &exact()).map_err(|e| fail(e.to_string()))?;
                let dom = class.dominating_measure.weights();
                ensure((0..m.num_leaves()).all(|l| !support[l] || dom[l].is_positive()), || fail("dominating prior misses a leaf".into()))?;
                ensure(class.delta.is_positive(), || fail("delta is zero".into()))?;
                for (n, q) in &class.members {
                    let q = q.weights();
                    let bound = rat(1, *n as i64);
                    ensure(q.iter().all(|x| !x.is_negative()) && q.iter().sum::<Rational>().is_one(), || fail(format!("Q_{n} not a probability")))?;
                    ensure(q.iter().zip(dom).all(|(a, b)| a.is_zero() || b.is_positive()), || fail(format!("Q_{n} not dominated")))?;
                    ensure(q[leaf] >= class.delta, || fail(format!("Q_{n} mass {} below delta", q[leaf])))?;
                    for o in &m.options {
                        ensure(expectation(q, &o.payoff).abs() <= bound, || fail(format!("Q_{n} option error")))?;
                    }
                    for k in 1..=m.tree.horizon() {
                        for j in 0..m.tree.assets() {
                            let e = step_error(&m, q, k, j);
                            ensure(e <= bound, || fail(format!("Q_{n} step {k} asset {j} error {e}")))?;
                        }
                    }
                    members += 1;
                }
            }
        }
    }
    Ok(format!("{members} members on {done} instances within 1/n for n <= {CLASS_N_MAX}"))
}

fn random_marginal(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteMarginal {
    loop {
        let n = rng.gen_range(1..=max_atoms);
        let mut atoms: BTreeMap<Rational, i64> = BTreeMap::new();
        for _ in 0..n {
            *atoms.entry(rat(rng.gen_range(0..=24), 4)).or_default() += rng.gen_range(1..=5);
        }
        let total: i64 = atoms.values().sum();
        let mu = DiscreteMarginal::new(atoms.into_iter().map(|(x, w)| (x, rat(w, total))).collect()).expect("marginal");
        if mu.mean().is_positive() {
            return mu;
        }
    }
}

fn sheet_for(mu: &DiscreteMarginal, strikes: &[Rational]) -> AssetQuotes {
    AssetQuotes::new(mu.mean(), strikes.iter().map(|k| (k.clone(), mu.call(k))).collect()).expect("quotes")
}

/// Up to `MAX_STRIKES` positive strikes ending at the largest atom; all
/// positive atoms when `cover` is set and they fit.
fn random_strikes(rng: &mut ChaCha8Rng, mu: &DiscreteMarginal, cover: bool) -> Vec<Rational> {
    let top = mu.support().last().cloned().expect("atoms");
    let atoms: Vec<Rational> = mu.support().into_iter().filter(|x| x.is_positive()).collect();
    let mut pool: Vec<Rational> = if cover && atoms.len() <= MAX_STRIKES {
        atoms
    } else {
        let mut grid: Vec<Rational> = (1..=24).map(|i| rat(i, 4)).filter(|k| *k < top).collect();
        grid.shuffle(rng);
        grid.truncate(rng.gen_range(0..MAX_STRIKES));
        grid
    };
    if !pool.contains(&top) {
        pool.push(top);
    }
    pool.sort();
    pool
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact_recoveries = 0;
    for s in 0..SHEETS {
        let fail = |msg: String| format!("sheet {s}: {msg}");
        let mu = random_marginal(&mut rng, MAX_ATOMS);
        let cover = s % 2 == 0;
        let strikes = random_strikes(&mut rng, &mu, cover);
        let q = sheet_for(&mu, &strikes);
        let sheet = CallQuoteSheet { assets: vec![q.clone()] };
        let hat = calibrate(&sheet).map_err(|e| fail(e.to_string()))?.remove(0);
        let mass: Rational = hat.atoms().iter().map(|(_, m)| m).sum();
        ensure(mass.is_one(), || fail(format!("mass {mass}")))?;
        ensure(hat.mean() == q.spot, || fail(format!("mean {} vs spot {}", hat.mean(), q.spot)))?;
        let r = support_function(&q);
        for (k, c) in &q.quotes {
            ensure(r.eval(k) == *c, || fail(format!("R({k}) = {} vs quote {c}", r.eval(k))))?;
            ensure(hat.call(k) == *c, || fail(format!("implied call at {k} is {}", hat.call(k))))?;
        }
        let atoms_quoted = mu.support().iter().filter(|x| x.is_positive()).all(|x| strikes.contains(x));
        if atoms_quoted {
            ensure(hat == mu, || fail("marginal not recovered".into()))?;
            exact_recoveries += 1;
        }
    }
    let worked = CallQuoteSheet { assets: vec![AssetQuotes::new(int(1), vec![(int(1), rat(1, 4)), (int(2), int(0))]).unwrap()] };
    let hat = calibrate(&worked).map_err(|e| e.to_string())?.remove(0);
    let expected = DiscreteMarginal::new(vec![(int(0), rat(1, 4)), (int(1), rat(1, 2)), (int(2), rat(1, 4))]).unwrap();
    ensure(hat == expected, || format!("worked sheet gives {:?}", hat.atoms()))?;
    Ok(format!("{SHEETS} sheets round trip ({exact_recoveries} recover the marginal); worked sheet exact"))
}

fn spread(rng: &mut ChaCha8Rng, mu: &DiscreteMarginal, splits: usize) -> DiscreteMarginal {
    let mut atoms: BTreeMap<Rational, Rational> = mu.atoms().iter().cloned().collect();
    for _ in 0..splits {
        let keys: Vec<Rational> = atoms.keys().cloned().collect();
        let x = keys.choose(rng).expect("atoms").clone();
        let m = atoms.remove(&x).expect("atom");
        let a = rat(rng.gen_range(0..=8), 4).min(x.clone());
        let b = rat(rng.gen_range(1..=8), 4);
        let total = &a + &b;
        if a.is_zero() {
            *atoms.entry(x).or_insert_with(Rational::zero) += m;
            continue;
        }
        *atoms.entry(&x - &a).or_insert_with(Rational::zero) += &m * &b / &total;
        *atoms.entry(&x + &b).or_insert_with(Rational::zero) += &m * &a / &total;
    }
    DiscreteMarginal::new(atoms.into_iter().collect()).expect("spread")
}

fn with_mean(nu: &DiscreteMarginal, mean: &Rational) -> DiscreteMarginal {
    let f = mean / nu.mean();
    DiscreteMarginal::new(nu.atoms().iter().map(|(x, m)| (x * &f, m.clone())).collect()).expect("scaled")
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut ordered, mut not) = (0, 0);
    for p in 0..PAIRS {
        let fail = |msg: String| format!("pair {p}: {msg}");
        let mu = random_marginal(&mut rng, MAX_ATOMS - 2);
        let nu = match p % 5 {
            0 | 1 => spread(&mut rng, &mu, 2),
            2 => spread(&mut rng, &mu, 1),
            3 => with_mean(&random_marginal(&mut rng, MAX_ATOMS), &mu.mean()),
            _ => random_marginal(&mut rng, MAX_ATOMS),
        };
        let (mu, nu) = if p % 10 == 1 { (nu, mu) } else { (mu, nu) };
        let order = convex_order_check(&mu, &nu).is_ordered();
        let coupling = martingale_coupling(&mu, &nu, &exact()).map_err(|e| fail(e.to_string()))?;
        ensure(order == coupling.is_some(), || fail(format!("convex order {order}, coupling {}", coupling.is_some())))?;
        if let Some(pi) = coupling {
            for (i, (x, m)) in mu.atoms().iter().enumerate() {
                let row: Rational = pi[i].iter().sum();
                let drift: Rational = pi[i].iter().zip(nu.atoms()).map(|(w, (y, _))| w * (y - x)).sum();
                ensure(row == *m && drift.is_zero() && pi[i].iter().all(|w| !w.is_negative()), || fail("bad coupling row".into()))?;
            }
            for (j, (_, m)) in nu.atoms().iter().enumerate() {
                let col: Rational = pi.iter().map(|r| &r[j]).sum();
                ensure(col == *m, || fail("bad coupling column".into()))?;
            }
            ordered += 1;
        } else {
            not += 1;
        }
    }
    Ok(format!("{PAIRS}/{PAIRS} agree ({ordered} ordered, {not} not)"))
}

fn corrupt(rng: &mut ChaCha8Rng, q: &AssetQuotes, kind: ViolationKind) -> Option<AssetQuotes> {
    let mut anchored = vec![(Rational::zero(), q.spot.clone())];
    anchored.extend(q.quotes.iter().cloned());
    let n = anchored.len();
    let eps = rat(1, rng.gen_range(2..=16));
    match kind {
        ViolationKind::NegativePrice => {
            let i = rng.gen_range(1..n);
            anchored[i].1 = -eps;
        }
        ViolationKind::CallSpread => {
            let i = rng.gen_range(1..n);
            anchored[i].1 = &anchored[i - 1].1 + eps;
        }
        ViolationKind::SlopeBound => {
            let i = rng.gen_range(1..n);
            anchored[i].1 = &anchored[i - 1].1 - (&anchored[i].0 - &anchored[i - 1].0) - eps;
        }
        ViolationKind::Butterfly => {
            let i = (1..n - 1).find(|&i| anchored[i - 1].1 > anchored[i + 1].1)?;
            let (k0, c0) = anchored[i - 1].clone();
            let (k2, c2) = anchored[i + 1].clone();
            let k1 = &anchored[i].0;
            let lambda = (&k2 - k1) / (&k2 - &k0);
            let chord = &lambda * &c0 + (Rational::one() - &lambda) * &c2;
            anchored[i].1 = (&chord + &c0) / int(2);
        }
    }
    Some(AssetQuotes::new(anchored[0].1.clone(), anchored[1..].to_vec()).expect("strikes unchanged"))
}

fn criterion_7() -> Outcome {
    let kinds = [ViolationKind::NegativePrice, ViolationKind::CallSpread, ViolationKind::Butterfly, ViolationKind::SlopeBound];
    let mut checked = 0;
    for kind in kinds {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + kind as u64);
        let mut made = 0;
        let mut tries = 0;
        while made < CORRUPTIONS {
            tries += 1;
            ensure(tries < 1000, || format!("{kind}: could not build sheets"))?;
            let mu = random_marginal(&mut rng, MAX_ATOMS);
            let strikes = random_strikes(&mut rng, &mu, false);
            if strikes.len() < 2 {
                continue;
            }
            let Some(bad) = corrupt(&mut rng, &sheet_for(&mu, &strikes), kind) else { continue };
            made += 1;
            let fail = |msg: String| format!("{kind} sheet {made}: {msg}");
            let sheet = CallQuoteSheet { assets: vec![bad.clone()] };
            let d = quote_diagnostics(&sheet);
            ensure(!d.consistent && d.violations.iter().any(|v| v.kind == kind), || fail("not detected".into()))?;
            ensure(calibrate(&sheet).is_err(), || fail("calibrated anyway".into()))?;
            for v in &d.violations {
                ensure(portfolio_nonnegative(&v.portfolio), || fail(format!("{} portfolio can lose", v.kind)))?;
                let cost = portfolio_cost(&v.portfolio, &bad);
                ensure(cost.is_negative() && cost == v.cost, || fail(format!("{} portfolio costs {cost}", v.kind)))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{} corrupted sheets per kind detected; {checked} portfolios verified", CORRUPTIONS))
}

/// Piecewise linear in `s` with kinks at the strikes, so nonnegative on
/// `[0, ∞)` iff nonnegative at 0 and at every kink with a nonnegative
/// final slope.
fn portfolio_nonnegative(p: &robust_ftap::mot::StaticPortfolio) -> bool {
    let value = |s: &Rational| -> Rational {
        &p.cash + &p.underlying * s + p.calls.iter().map(|(k, u)| if s > k { (s - k) * u } else { Rational::zero() }).sum::<Rational>()
    };
    let slope: Rational = &p.underlying + p.calls.iter().map(|(_, u)| u.clone()).sum::<Rational>();
    !slope.is_negative() && !value(&Rational::zero()).is_negative() && p.calls.iter().all(|(k, _)| !value(k).is_negative())
}

fn portfolio_cost(p: &robust_ftap::mot::StaticPortfolio, q: &AssetQuotes) -> Rational {
    let price = |k: &Rational| q.quotes.iter().find(|(s, _)| s == k).map(|(_, c)| c.clone()).expect("quoted strike");
    &p.cash + &p.underlying * &q.spot + p.calls.iter().map(|(k, u)| u * price(k)).sum::<Rational>()
}

fn criterion_8() -> Outcome {
    let bad = common::golden_mismatches(&[1, 4]);
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{} reports byte-identical across two runs and 1 or 4 threads", common::GOLDEN.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("arbitrage checks agree with the oracle", criterion_1),
        ("superhedging duality", criterion_2),
        ("kernel sensitivity gap", criterion_3),
        ("approximate martingale bounds", criterion_4),
        ("implied marginal round trip", criterion_5),
        ("convex order and couplings", criterion_6),
        ("quote diagnostics", criterion_7),
        ("deterministic reports", criterion_8),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg}) [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
