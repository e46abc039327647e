//! Brute-force polyhedral enumeration. Deliberately independent of the
//! simplex so it can referee it.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use super::linalg::{nullspace, rank, solve_square};
use super::{Constraint, LpError, Relation};
use crate::num::Rational;

/// Largest dimension [`vertex_enumerate`] accepts.
pub const VERTEX_DIM_LIMIT: usize = 12;

const SUBSET_LIMIT: u128 = 2_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn check_subsets(n: usize, k: usize) -> Result<(), LpError> {
    let count = binomial(n, k);
    if count > SUBSET_LIMIT {
        return Err(LpError::TooLarge(format!("{count} active sets to examine")));
    }
    Ok(())
}

fn satisfies(c: &Constraint, x: &[Rational]) -> bool {
    let a: Rational = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
    match c.relation {
        Relation::Le => a <= c.rhs,
        Relation::Eq => a == c.rhs,
        Relation::Ge => a >= c.rhs,
    }
}

/// All vertices of the bounded polyhedron `{x ∈ ℝⁿ : constraints}`,
/// exact and deduplicated, in lexicographic order.
///
/// Returns an empty list for an empty polyhedron and
/// [`LpError::Unbounded`] for a nonempty unbounded one.
pub fn vertex_enumerate(constraints: &[Constraint], n: usize) -> Result<Vec<Vec<Rational>>, LpError> {
    if n == 0 {
        return Err(LpError::Empty);
    }
    if n > VERTEX_DIM_LIMIT {
        return Err(LpError::TooLarge(format!("dimension {n} > {VERTEX_DIM_LIMIT}")));
    }
    for (row, c) in constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::Arity { row, got: c.coeffs.len(), expected: n });
        }
    }
    let all_rows: Vec<Vec<Rational>> = constraints.iter().map(|c| c.coeffs.clone()).collect();
    let r = rank(&all_rows);
    if r < n {
        // The polyhedron contains a line if it is nonempty. Decide
        // emptiness in the row space, where the system is pointed.
        let nonempty = if r == 0 {
            constraints.iter().all(|c| satisfies(c, &vec![Rational::zero(); n]))
        } else {
            let basis = row_space_basis(&all_rows);
            let projected: Vec<Constraint> = constraints
                .iter()
                .map(|c| {
                    let coeffs = basis
                        .iter()
                        .map(|b| c.coeffs.iter().zip(b).map(|(x, y)| x * y).sum())
                        .collect();
                    Constraint::new(coeffs, c.relation, c.rhs.clone())
                })
                .collect();
            !pointed_vertices(&projected, r)?.is_empty()
        };
        return if nonempty { Err(LpError::Unbounded) } else { Ok(Vec::new()) };
    }
    let vertices = pointed_vertices(constraints, n)?;
    if !vertices.is_empty() && recession_cone_is_nontrivial(constraints, n)? {
        return Err(LpError::Unbounded);
    }
    Ok(vertices)
}

fn row_space_basis(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for row in rows {
        let mut trial = basis.clone();
        trial.push(row.clone());
        if rank(&trial) > basis.len() {
            basis = trial;
        }
    }
    basis
}

fn split(constraints: &[Constraint]) -> (Vec<&Constraint>, Vec<&Constraint>) {
    constraints.iter().partition(|c| c.relation == Relation::Eq)
}

/// Vertices of a polyhedron whose constraint matrix has full column rank.
fn pointed_vertices(constraints: &[Constraint], n: usize) -> Result<Vec<Vec<Rational>>, LpError> {
    let (eqs, ineqs) = split(constraints);
    let eq_rows: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
    let eq_rank = if eq_rows.is_empty() { 0 } else { rank(&eq_rows) };
    let k = n - eq_rank.min(n);
    check_subsets(ineqs.len(), k)?;
    let mut found = BTreeSet::new();
    for subset in (0..ineqs.len()).combinations(k) {
        let mut a = eq_rows.clone();
        let mut b: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
        for &i in &subset {
            a.push(ineqs[i].coeffs.clone());
            b.push(ineqs[i].rhs.clone());
        }
        if a.is_empty() {
            continue;
        }
        let Some(x) = solve_square(&a, &b) else { continue };
        if constraints.iter().all(|c| satisfies(c, &x)) {
            found.insert(x);
        }
    }
    Ok(found.into_iter().collect())
}

fn recession_cone_is_nontrivial(constraints: &[Constraint], n: usize) -> Result<bool, LpError> {
    let (eqs, ineqs) = split(constraints);
    let eq_rows: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
    let eq_rank = if eq_rows.is_empty() { 0 } else { rank(&eq_rows) };
    let k = n - eq_rank.min(n);
    if k == 0 {
        return Ok(false);
    }
    check_subsets(ineqs.len(), k - 1)?;
    let in_cone = |d: &[Rational]| {
        constraints.iter().all(|c| {
            let a: Rational = c.coeffs.iter().zip(d).map(|(x, y)| x * y).sum();
            match c.relation {
                Relation::Le => !a.is_positive(),
                Relation::Eq => a.is_zero(),
                Relation::Ge => !a.is_negative(),
            }
        })
    };
    for subset in (0..ineqs.len()).combinations(k - 1) {
        let mut a = eq_rows.clone();
        a.extend(subset.iter().map(|&i| ineqs[i].coeffs.clone()));
        let ns = nullspace(&a, n);
        if ns.len() != 1 {
            continue;
        }
        let d = &ns[0];
        let neg: Vec<Rational> = d.iter().map(|x| -x).collect();
        if in_cone(d) || in_cone(&neg) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides whether the linear span of `generators` (vectors of a common
/// length) contains a nonzero vector with every coordinate `>= 0`.
///
/// On success returns that vector together with coefficients expressing
/// it over the generators. Works by enumerating the extreme rays of the
/// pointed cone `{w : B w >= 0}` for a column basis `B` of the generators.
pub fn positive_span_ray(generators: &[Vec<Rational>]) -> Result<Option<(Vec<Rational>, Vec<Rational>)>, LpError> {
    let Some(len) = generators.first().map(Vec::len) else { return Ok(None) };
    let mut chosen: Vec<usize> = Vec::new();
    for (k, g) in generators.iter().enumerate() {
        let mut cols: Vec<Vec<Rational>> = chosen.iter().map(|&c| generators[c].clone()).collect();
        cols.push(g.clone());
        if rank(&cols) > chosen.len() {
            chosen.push(k);
        }
    }
    let r = chosen.len();
    if r == 0 {
        return Ok(None);
    }
    // rows of B: one per coordinate
    let b_rows: Vec<Vec<Rational>> = (0..len)
        .map(|i| chosen.iter().map(|&c| generators[c][i].clone()).collect())
        .collect();
    check_subsets(len, r - 1)?;
    for subset in (0..len).combinations(r - 1) {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&i| b_rows[i].clone()).collect();
        let ns = nullspace(&a, r);
        if ns.len() != 1 {
            continue;
        }
        for flip in [false, true] {
            let w: Vec<Rational> = ns[0].iter().map(|x| if flip { -x } else { x.clone() }).collect();
            let p: Vec<Rational> = b_rows.iter().map(|row| row.iter().zip(&w).map(|(x, y)| x * y).sum()).collect();
            if p.iter().all(|v| !v.is_negative()) && p.iter().any(|v| v.is_positive()) {
                let mut coeffs = vec![Rational::zero(); generators.len()];
                for (&c, wc) in chosen.iter().zip(w) {
                    coeffs[c] = wc;
                }
                return Ok(Some((p, coeffs)));
            }
        }
    }
    Ok(None)
}
