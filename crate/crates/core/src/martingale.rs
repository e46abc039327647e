//! The calibrated martingale polytope on a set of leaves, as LP rows.

use num_traits::{One, Zero};

use crate::lp::{LinearProgram, Relation, Sense};
use crate::market::{live_nodes, strategy_from_coefficients, Generator, Market, Strategy};
use crate::num::Rational;

/// `{Q ≥ 0 on support : ΣQ = 1, E_Q[g] = 0 for every generator g}`.
/// Variables are the masses of `support` in order.
#[derive(Clone, Debug)]
pub(crate) struct MartingaleSystem {
    pub support: Vec<usize>,
    pub gens: Vec<Generator>,
    /// `rows[g][k]` = payoff of generator `g` at `support[k]`.
    pub rows: Vec<Vec<Rational>>,
}

impl MartingaleSystem {
    pub fn new(market: &Market, support: &[usize]) -> Self {
        let live = live_nodes(&market.tree, support);
        let mut gens = Vec::new();
        let mut rows = Vec::new();
        for g in market.generators(&live) {
            let row: Vec<Rational> = support.iter().map(|&s| g.payoff[s].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
                gens.push(g);
            }
        }
        MartingaleSystem { support: support.to_vec(), gens, rows }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    /// LP over `len() + extra` variables with the polytope rows in front:
    /// row 0 is the mass row, rows `1..=gens.len()` the martingale rows.
    pub fn lp(&self, sense: Sense, objective: Vec<Rational>) -> LinearProgram {
        let n = objective.len();
        let pad = |mut v: Vec<Rational>| {
            v.resize(n, Rational::zero());
            v
        };
        let mut lp = LinearProgram::new(sense, objective);
        lp.add_constraint(pad(vec![Rational::one(); self.len()]), Relation::Eq, Rational::one());
        for row in &self.rows {
            lp.add_constraint(pad(row.clone()), Relation::Eq, Rational::zero());
        }
        lp
    }

    /// Strategy whose generator coefficients are `dual[1..=gens.len()]`,
    /// scaled by `sign`.
    pub fn strategy(&self, market: &Market, dual: &[Rational], sign: &Rational) -> Strategy {
        let coeffs: Vec<Rational> = dual[1..=self.gens.len()].iter().map(|y| y * sign).collect();
        strategy_from_coefficients(&market.tree, market.options.len(), &self.gens, &coeffs)
    }

    /// Leaf-indexed weights from LP masses on the support.
    pub fn spread(&self, masses: &[Rational], leaves: usize) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); leaves];
        for (&s, m) in self.support.iter().zip(masses) {
            w[s] = m.clone();
        }
        w
    }
}
