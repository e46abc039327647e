//! Two-phase dense tableau simplex with Bland's rule.

use std::cmp::Ordering;

use num_traits::Zero;

use super::scalar::Scalar;
use super::{dot, LinearProgram, LpError, LpOutcome, LpStatus, Relation, Sense};
use crate::num::Rational;

const PIVOT_LIMIT: usize = 500_000;

/// How an original variable is expressed through nonnegative columns.
#[derive(Clone, Debug)]
enum VarMap {
    /// `x = lo + z`
    Shift { col: usize, lo: Rational },
    /// `x = hi - z`
    Reflect { col: usize, hi: Rational },
    /// `x = z⁺ - z⁻`
    Split { pos: usize, neg: usize },
}

struct StdRow {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
    /// Index of the original constraint, `None` for box rows.
    origin: Option<usize>,
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    obj: Vec<F>,
    basis: Vec<usize>,
    width: usize,
    art_start: usize,
    tol: f64,
    max_bits: u64,
    pivots: usize,
}

impl<F: Scalar> Tableau<F> {
    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, e: usize) -> Result<(), LpError> {
        let tol = self.tol;
        let piv = self.rows[r][e].clone();
        let nz: Vec<usize> = (0..self.width).filter(|&k| !self.rows[r][k].is_zero_tol(tol)).collect();
        for &k in &nz {
            self.rows[r][k] = self.rows[r][k].div(&piv);
        }
        self.rows[r][e] = F::one();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<F>| {
            let f = row[e].clone();
            if f.is_zero_tol(tol) {
                return;
            }
            for &k in &nz {
                row[k] = row[k].sub(&f.mul(&pivot_row[k]));
            }
            row[e] = F::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = e;
        self.pivots += 1;
        if self.pivots > PIVOT_LIMIT {
            return Err(LpError::PivotLimit(PIVOT_LIMIT));
        }
        if self.max_bits < u64::MAX {
            let rhs = self.rhs();
            let bits = self
                .rows
                .iter()
                .map(|row| row[rhs].bits())
                .chain(self.obj.iter().map(|x| x.bits()))
                .chain(pivot_row.iter().map(|x| x.bits()))
                .max()
                .unwrap_or(0);
            if bits > self.max_bits {
                return Err(LpError::BitGuard { bits, limit: self.max_bits });
            }
        }
        Ok(())
    }

    /// Runs Bland's rule until optimal (`Ok(None)`) or unbounded
    /// (`Ok(Some(entering column))`).
    fn run(&mut self) -> Result<Option<usize>, LpError> {
        let tol = self.tol;
        let rhs = self.rhs();
        loop {
            let Some(e) = (0..self.art_start).find(|&j| self.obj[j].sign(tol) == Ordering::Less) else {
                return Ok(None);
            };
            let mut best: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if a.sign(tol) != Ordering::Greater {
                    continue;
                }
                let ratio = self.rows[i][rhs].div(a);
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match ratio.cmp_tol(&br, tol) {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            match best {
                None => return Ok(Some(e)),
                Some((r, _)) => self.pivot(r, e)?,
            }
        }
    }

    fn basic_values(&self, ncols: usize) -> Vec<F> {
        let mut z = vec![F::zero(); ncols];
        let rhs = self.rhs();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                z[b] = self.rows[i][rhs].clone();
            }
        }
        z
    }
}

pub(crate) fn solve<F: Scalar>(lp: &LinearProgram, tol: f64, max_bits: u64) -> Result<LpOutcome, LpError> {
    let n = lp.num_vars();

    // Variables -> nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut nz = 0usize;
    let mut box_rows = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(lo), hi) => {
                maps.push(VarMap::Shift { col: nz, lo: lo.clone() });
                if let Some(hi) = hi {
                    box_rows.push(StdRow {
                        coeffs: vec![(nz, Rational::from_integer(1.into()))],
                        relation: Relation::Le,
                        rhs: hi - lo,
                        origin: None,
                    });
                }
                nz += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Reflect { col: nz, hi: hi.clone() });
                nz += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: nz, neg: nz + 1 });
                nz += 2;
            }
        }
    }

    let mut std_rows = Vec::with_capacity(lp.constraints.len() + box_rows.len());
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut coeffs = Vec::new();
        let mut rhs = c.rhs.clone();
        for (a, map) in c.coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, lo } => {
                    coeffs.push((*col, a.clone()));
                    rhs -= a * lo;
                }
                VarMap::Reflect { col, hi } => {
                    coeffs.push((*col, -a));
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((*pos, a.clone()));
                    coeffs.push((*neg, -a));
                }
            }
        }
        std_rows.push(StdRow { coeffs, relation: c.relation, rhs, origin: Some(i) });
    }
    std_rows.extend(box_rows);

    // Minimization objective over columns.
    let mut cost = vec![<Rational as Zero>::zero(); nz];
    let sign = if lp.sense == Sense::Maximize { -1 } else { 1 };
    for (c, map) in lp.objective.iter().zip(&maps) {
        let c = c * Rational::from_integer(sign.into());
        match map {
            VarMap::Shift { col, .. } => cost[*col] += &c,
            VarMap::Reflect { col, .. } => cost[*col] -= &c,
            VarMap::Split { pos, neg } => {
                cost[*pos] += &c;
                cost[*neg] -= &c;
            }
        }
    }

    let m = std_rows.len();
    let ns = std_rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let mut flips = Vec::with_capacity(m);
    let mut slack_of = Vec::with_capacity(m);
    let mut next_slack = nz;
    for r in &std_rows {
        let flip = r.rhs < <Rational as Zero>::zero();
        flips.push(flip);
        let slack = match r.relation {
            Relation::Eq => None,
            Relation::Le => Some((next_slack, if flip { -1 } else { 1 })),
            Relation::Ge => Some((next_slack, if flip { 1 } else { -1 })),
        };
        if slack.is_some() {
            next_slack += 1;
        }
        slack_of.push(slack);
    }
    let art_start = nz + ns;
    let needs_art: Vec<bool> = slack_of.iter().map(|s| !matches!(s, Some((_, 1)))).collect();
    let na = needs_art.iter().filter(|&&b| b).count();
    let width = art_start + na + 1;

    let mut rows = vec![vec![F::zero(); width]; m];
    let mut basis = vec![0usize; m];
    let mut init_col = vec![0usize; m];
    let mut next_art = art_start;
    for (i, r) in std_rows.iter().enumerate() {
        let s = if flips[i] { -1 } else { 1 };
        let sr = Rational::from_integer(s.into());
        for (col, a) in &r.coeffs {
            rows[i][*col] = F::from_rational(&(a * &sr));
        }
        rows[i][width - 1] = F::from_rational(&(&r.rhs * &sr));
        if let Some((col, coef)) = slack_of[i] {
            rows[i][col] = if coef == 1 { F::one() } else { F::one().neg() };
        }
        if needs_art[i] {
            rows[i][next_art] = F::one();
            basis[i] = next_art;
            init_col[i] = next_art;
            next_art += 1;
        } else {
            let (col, _) = slack_of[i].expect("slack basis");
            basis[i] = col;
            init_col[i] = col;
        }
    }

    let mut t = Tableau { rows, obj: vec![F::zero(); width], basis, width, art_start, tol, max_bits, pivots: 0 };

    let to_original = |z: &[F]| -> Vec<Rational> {
        maps.iter()
            .map(|map| match map {
                VarMap::Shift { col, lo } => lo + z[*col].to_rational(),
                VarMap::Reflect { col, hi } => hi - z[*col].to_rational(),
                VarMap::Split { pos, neg } => z[*pos].to_rational() - z[*neg].to_rational(),
            })
            .collect()
    };
    let row_duals = |t: &Tableau<F>, phase_one: bool| -> Vec<Rational> {
        let mut y = vec![<Rational as Zero>::zero(); lp.constraints.len()];
        for i in 0..m {
            let Some(orig) = std_rows[i].origin else { continue };
            let c_init = if phase_one && needs_art[i] { F::one() } else { F::zero() };
            let yi = c_init.sub(&t.obj[init_col[i]]).to_rational();
            y[orig] = if flips[i] { -yi } else { yi };
        }
        y
    };

    // Phase one.
    if na > 0 {
        for (i, row) in t.rows.iter().enumerate() {
            if !needs_art[i] {
                continue;
            }
            for j in 0..width {
                if j >= art_start && j < width - 1 {
                    continue;
                }
                t.obj[j] = t.obj[j].sub(&row[j]);
            }
        }
        if t.run()?.is_some() {
            unreachable!("phase one objective is bounded below");
        }
        let infeas = t.obj[width - 1].neg();
        if infeas.sign(tol) == Ordering::Greater {
            let dual = row_duals(&t, true);
            return Ok(LpOutcome { status: LpStatus::Infeasible, value: None, primal: Vec::new(), dual, ray: Vec::new() });
        }
        // Drive zero-level artificials out where possible.
        for r in 0..m {
            if t.basis[r] < art_start {
                continue;
            }
            if let Some(j) = (0..art_start).find(|&j| !t.rows[r][j].is_zero_tol(tol)) {
                t.pivot(r, j)?;
            }
        }
    }

    // Phase two.
    let mut full_cost = vec![F::zero(); width - 1];
    for (j, c) in cost.iter().enumerate() {
        full_cost[j] = F::from_rational(c);
    }
    let mut obj = vec![F::zero(); width];
    obj[..(width - 1)].clone_from_slice(&full_cost[..(width - 1)]);
    for (i, row) in t.rows.iter().enumerate() {
        let cb = &full_cost[t.basis[i]];
        if cb.is_zero_tol(0.0) {
            continue;
        }
        for j in 0..width {
            if !row[j].is_zero_tol(0.0) {
                obj[j] = obj[j].sub(&cb.mul(&row[j]));
            }
        }
    }
    t.obj = obj;

    match t.run()? {
        Some(e) => {
            let z = t.basic_values(art_start);
            let primal = to_original(&z);
            let mut dz = vec![F::zero(); art_start];
            dz[e] = F::one();
            for (i, &b) in t.basis.iter().enumerate() {
                if b < art_start {
                    dz[b] = t.rows[i][e].neg();
                }
            }
            let ray = maps
                .iter()
                .map(|map| match map {
                    VarMap::Shift { col, .. } => dz[*col].to_rational(),
                    VarMap::Reflect { col, .. } => -dz[*col].to_rational(),
                    VarMap::Split { pos, neg } => dz[*pos].to_rational() - dz[*neg].to_rational(),
                })
                .collect();
            Ok(LpOutcome { status: LpStatus::Unbounded, value: None, primal, dual: Vec::new(), ray })
        }
        None => {
            let z = t.basic_values(art_start);
            let primal = to_original(&z);
            let value = dot(&lp.objective, &primal);
            let mut dual = row_duals(&t, false);
            if lp.sense == Sense::Maximize {
                for y in &mut dual {
                    *y = -y.clone();
                }
            }
            Ok(LpOutcome { status: LpStatus::Optimal, value: Some(value), primal, dual, ray: Vec::new() })
        }
    }
}
