//! Exact linear programming.
//!
//! [`solve`] runs a two-phase dense-tableau simplex with Bland's rule over
//! exact rationals (or over `f64` with a comparison tolerance, see
//! [`Mode`]). Every outcome carries a certificate that [`verify`] checks by
//! substitution:
//!
//! * `Optimal`: a primal point and dual prices with equal objective values.
//! * `Infeasible`: a Farkas ray over the constraint rows.
//! * `Unbounded`: a feasible point and an improving recession direction.
//!
//! Dual prices follow the sensitivity convention: `dual[i]` is the rate at
//! which the optimal value moves with `rhs[i]`. Farkas rays are stated in
//! minimization form regardless of the objective sense: `y[i] >= 0` on `>=`
//! rows, `y[i] <= 0` on `<=` rows, and the maximum of `(Aᵀy)·x` over the
//! variable box is strictly below `y·b`.

mod linalg;
mod scalar;
mod simplex;
mod vertex;

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::num::{to_f64, Rational};

pub use linalg::{nullspace, rank, solve_square};
pub use vertex::{positive_span_ray, vertex_enumerate, VERTEX_DIM_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program has no variables")]
    Empty,
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Arity { row: usize, got: usize, expected: usize },
    #[error("rational growth exceeded the {limit}-bit guard ({bits} bits)")]
    BitGuard { bits: u64, limit: u64 },
    #[error("pivot limit of {0} reached")]
    PivotLimit(usize),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("too large for brute-force enumeration: {0}")]
    TooLarge(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    fn activity(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

/// `None` means unbounded in that direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn nonnegative() -> Self {
        Bound { lower: Some(Rational::zero()), upper: None }
    }

    pub fn free() -> Self {
        Bound { lower: None, upper: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// A program over `objective.len()` variables, all nonnegative.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let bounds = vec![Bound::nonnegative(); objective.len()];
        LinearProgram { sense, objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = Bound::free();
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.bounds[var] = Bound { lower, upper };
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Empty);
        }
        if self.bounds.len() != n {
            return Err(LpError::Arity { row: usize::MAX, got: self.bounds.len(), expected: n });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Arity { row, got: c.coeffs.len(), expected: n });
            }
        }
        Ok(())
    }

    fn box_is_empty(&self) -> bool {
        self.bounds.iter().any(|b| matches!((&b.lower, &b.upper), (Some(l), Some(u)) if l > u))
    }
}

impl fmt::Display for LinearProgram {
    /// Plain-text dump, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        writeln!(f, "{sense} {}", join(&self.objective))?;
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, "  {} {rel} {}", join(&c.coeffs), c.rhs)?;
        }
        for (j, b) in self.bounds.iter().enumerate() {
            let lo = b.lower.as_ref().map_or("-inf".to_string(), |r| r.to_string());
            let hi = b.upper.as_ref().map_or("+inf".to_string(), |r| r.to_string());
            writeln!(f, "  x{j} in [{lo}, {hi}]")?;
        }
        Ok(())
    }
}

fn join(v: &[Rational]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal objective value (only when `Optimal`).
    pub value: Option<Rational>,
    /// Optimal point, or a feasible point when `Unbounded`; empty otherwise.
    pub primal: Vec<Rational>,
    /// Dual prices when `Optimal`, Farkas ray when `Infeasible`.
    pub dual: Vec<Rational>,
    /// Improving direction when `Unbounded`.
    pub ray: Vec<Rational>,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Arithmetic used by [`solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    /// `f64` pivoting; magnitudes below `tol` count as zero.
    Float { tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Abort when any numerator or denominator in the tableau exceeds this
    /// many bits.
    pub max_bits: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { mode: Mode::Exact, max_bits: 1 << 16 }
    }
}

impl SolverConfig {
    pub fn float(tol: f64) -> Self {
        SolverConfig { mode: Mode::Float { tol }, ..Default::default() }
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    pub fn tol(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Float { tol } => tol,
        }
    }

    /// Sign of `x` under this mode's tolerance.
    pub fn sign(&self, x: &Rational) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.mode {
            Mode::Exact => {
                if x.is_zero() {
                    Equal
                } else if x.is_positive() {
                    Greater
                } else {
                    Less
                }
            }
            Mode::Float { tol } => {
                let v = to_f64(x);
                if v.abs() <= tol {
                    Equal
                } else if v > 0.0 {
                    Greater
                } else {
                    Less
                }
            }
        }
    }

    pub fn is_zero(&self, x: &Rational) -> bool {
        self.sign(x) == std::cmp::Ordering::Equal
    }

    pub fn is_positive(&self, x: &Rational) -> bool {
        self.sign(x) == std::cmp::Ordering::Greater
    }

    pub fn is_nonnegative(&self, x: &Rational) -> bool {
        self.sign(x) != std::cmp::Ordering::Less
    }
}

/// Solves `lp` with the arithmetic selected by `cfg`.
pub fn solve(lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    if lp.box_is_empty() {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            value: None,
            primal: Vec::new(),
            dual: vec![Rational::zero(); lp.constraints.len()],
            ray: Vec::new(),
        });
    }
    match cfg.mode {
        Mode::Exact => simplex::solve::<Rational>(lp, 0.0, cfg.max_bits),
        Mode::Float { tol } => simplex::solve::<f64>(lp, tol, u64::MAX),
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Extremum of `g·x` over the variable box; `None` when infinite.
fn box_extremum(lp: &LinearProgram, g: &[Rational], maximize: bool) -> Option<Rational> {
    let mut total = Rational::zero();
    for (gj, b) in g.iter().zip(&lp.bounds) {
        if gj.is_zero() {
            continue;
        }
        let use_upper = gj.is_positive() == maximize;
        let end = if use_upper { &b.upper } else { &b.lower };
        total += gj * end.as_ref()?;
    }
    Some(total)
}

fn sign_ok(rel: Relation, y: &Rational, flip: bool) -> bool {
    // Minimization convention; `flip` for maximization.
    let y = if flip { -y } else { y.clone() };
    match rel {
        Relation::Eq => true,
        Relation::Ge => !y.is_negative(),
        Relation::Le => !y.is_positive(),
    }
}

/// Checks an outcome's certificate exactly. Intended for exact-mode
/// outcomes; float outcomes generally fail it by rounding.
pub fn verify(lp: &LinearProgram, out: &LpOutcome) -> Result<(), String> {
    let n = lp.num_vars();
    let check_primal = |x: &[Rational]| -> Result<(), String> {
        if x.len() != n {
            return Err("primal has wrong length".into());
        }
        for (j, (xj, b)) in x.iter().zip(&lp.bounds).enumerate() {
            if b.lower.as_ref().is_some_and(|l| xj < l) || b.upper.as_ref().is_some_and(|u| xj > u) {
                return Err(format!("x{j} violates its bounds"));
            }
        }
        for (i, c) in lp.constraints.iter().enumerate() {
            let a = c.activity(x);
            let ok = match c.relation {
                Relation::Le => a <= c.rhs,
                Relation::Eq => a == c.rhs,
                Relation::Ge => a >= c.rhs,
            };
            if !ok {
                return Err(format!("row {i} violated"));
            }
        }
        Ok(())
    };
    let aty = |y: &[Rational]| -> Vec<Rational> {
        let mut g = vec![Rational::zero(); n];
        for (c, yi) in lp.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (gj, a) in g.iter_mut().zip(&c.coeffs) {
                *gj += yi * a;
            }
        }
        g
    };
    let m = lp.constraints.len();
    match out.status {
        LpStatus::Optimal => {
            check_primal(&out.primal)?;
            let value = dot(&lp.objective, &out.primal);
            if out.value.as_ref() != Some(&value) {
                return Err("reported value differs from c·x".into());
            }
            if out.dual.len() != m {
                return Err("dual has wrong length".into());
            }
            let maximize = lp.sense == Sense::Maximize;
            for (c, y) in lp.constraints.iter().zip(&out.dual) {
                if !sign_ok(c.relation, y, maximize) {
                    return Err("dual sign violated".into());
                }
            }
            let g = aty(&out.dual);
            let reduced: Vec<Rational> = lp.objective.iter().zip(&g).map(|(c, a)| c - a).collect();
            // min: c·x >= y·b + min_box d·x ; max: c·x <= y·b + max_box d·x
            let ext = box_extremum(lp, &reduced, maximize)
                .ok_or_else(|| "dual objective is infinite".to_string())?;
            let dual_value = dot(&out.dual, &lp.constraints.iter().map(|c| c.rhs.clone()).collect::<Vec<_>>()) + ext;
            if dual_value != value {
                return Err(format!("duality gap: primal {value}, dual {dual_value}"));
            }
            Ok(())
        }
        LpStatus::Infeasible => {
            if out.dual.len() != m {
                return Err("Farkas ray has wrong length".into());
            }
            if lp.box_is_empty() {
                return Ok(());
            }
            for (c, y) in lp.constraints.iter().zip(&out.dual) {
                if !sign_ok(c.relation, y, false) {
                    return Err("Farkas sign violated".into());
                }
            }
            let g = aty(&out.dual);
            let yb = dot(&out.dual, &lp.constraints.iter().map(|c| c.rhs.clone()).collect::<Vec<_>>());
            match box_extremum(lp, &g, true) {
                Some(max) if max < yb => Ok(()),
                _ => Err("Farkas ray does not separate".into()),
            }
        }
        LpStatus::Unbounded => {
            check_primal(&out.primal)?;
            let d = &out.ray;
            if d.len() != n {
                return Err("ray has wrong length".into());
            }
            for (j, (dj, b)) in d.iter().zip(&lp.bounds).enumerate() {
                if (b.lower.is_some() && dj.is_negative()) || (b.upper.is_some() && dj.is_positive()) {
                    return Err(format!("ray leaves the box at x{j}"));
                }
            }
            for (i, c) in lp.constraints.iter().enumerate() {
                let a = c.activity(d);
                let ok = match c.relation {
                    Relation::Le => !a.is_positive(),
                    Relation::Eq => a.is_zero(),
                    Relation::Ge => !a.is_negative(),
                };
                if !ok {
                    return Err(format!("ray violates row {i}"));
                }
            }
            let slope = dot(&lp.objective, d);
            let improving = match lp.sense {
                Sense::Minimize => slope.is_negative(),
                Sense::Maximize => slope.is_positive(),
            };
            if improving {
                Ok(())
            } else {
                Err("ray does not improve the objective".into())
            }
        }
    }
}
