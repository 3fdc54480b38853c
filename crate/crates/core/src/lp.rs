//! Dense two-phase tableau simplex over `f64` or exact rationals.
//!
//! Problems are stated as `maximize c.x` subject to sparse rows with `<=`,
//! `=` or `>=` relations and `x >= 0`. The solver reads dual values off the
//! final tableau and reports the duality gap and the worst dual
//! infeasibility, so every returned optimum carries its own certificate.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic the simplex needs. `f64` compares with small tolerances;
/// rationals compare exactly.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    /// Greater than the pivot tolerance.
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn is_exact_zero(&self) -> bool;
    fn abs_value(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Flushes round-off to zero; identity for exact types.
    fn cleaned(self) -> Self {
        self
    }
}

const F64_PIVOT_TOL: f64 = 1e-10;
const F64_FLUSH: f64 = 1e-14;

impl LpScalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_pos(&self) -> bool {
        *self > F64_PIVOT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -F64_PIVOT_TOL
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cleaned(self) -> Self {
        if self.abs() < F64_FLUSH {
            0.0
        } else {
            self
        }
    }
}

impl LpScalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub n_vars: usize,
    /// Maximized.
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            objective: vec![T::zero(); n_vars],
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// One dual value per constraint, in input order.
    pub duals: Vec<T>,
    pub iterations: usize,
    /// `|c.x - b.y|`.
    pub duality_gap: f64,
    /// Largest violation of dual feasibility (0 at a certified optimum).
    pub dual_infeasibility: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Upper bound on rows * columns of the dense tableau.
    pub max_tableau_entries: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200_000,
            max_tableau_entries: 200_000_000,
        }
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Initial identity column of each original constraint.
    identity_col: Vec<usize>,
    n_cols: usize,
    first_artificial: usize,
    iterations: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = (v.clone() / p.clone()).cleaned();
        }
        self.rhs[r] = (self.rhs[r].clone() / p).cleaned();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..self.n_cols)
            .filter(|&j| !pivot_row[j].is_exact_zero())
            .collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_exact_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = (row[j].clone() - f.clone() * pivot_row[j].clone()).cleaned();
            }
            row[c] = T::zero();
            self.rhs[i] = (self.rhs[i].clone() - f * pivot_rhs.clone()).cleaned();
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut rc = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_exact_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_exact_zero() {
                    rc[j] = rc[j].clone() - cb.clone() * v.clone();
                }
            }
        }
        rc
    }

    /// Maximizes `cost` over columns `< allowed_cols`.
    fn optimize(&mut self, cost: &[T], allowed_cols: usize, max_iter: usize) -> Result<()> {
        let mut degenerate_streak = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(Error::InvariantViolation(format!(
                    "simplex iteration limit {max_iter} reached"
                )));
            }
            let rc = self.reduced_costs(cost);
            let bland = T::EXACT || degenerate_streak > 50;
            let entering = if bland {
                (0..allowed_cols).find(|&j| rc[j].is_pos())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed_cols {
                    if rc[j].is_pos() && best.is_none_or(|b| rc[j] > rc[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else { return Ok(()) };

            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let better = if T::EXACT {
                            ratio < br || (ratio == br && self.basis[i] < self.basis[bi])
                        } else {
                            let (rf, bf) = (ratio.to_f64(), br.to_f64());
                            rf < bf - 1e-12
                                || ((rf - bf).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio.is_negligible() {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `lp` with the two-phase simplex method. Deterministic for a given
/// input.
pub fn solve<T: LpScalar>(lp: &LinearProgram<T>, options: SolverOptions) -> Result<LpSolution<T>> {
    let n = lp.n_vars;
    let m = lp.constraints.len();
    if lp.objective.len() != n {
        return Err(Error::InvalidParameter("objective length != n_vars".into()));
    }
    let n_slack = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    // Rows needing an artificial start variable (after making rhs >= 0).
    let flipped: Vec<bool> = lp.constraints.iter().map(|c| c.rhs.is_neg()).collect();
    let effective: Vec<Relation> = lp
        .constraints
        .iter()
        .zip(&flipped)
        .map(|(c, &f)| match (c.relation, f) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        })
        .collect();
    let n_art = effective.iter().filter(|&&r| r != Relation::Le).count();
    let n_cols = n + n_slack + n_art;
    if (m as u128) * (n_cols as u128) > options.max_tableau_entries as u128 {
        return Err(Error::capacity(
            "LP tableau entries",
            (m as u128) * (n_cols as u128),
            options.max_tableau_entries as u128,
        ));
    }

    let mut rows = vec![vec![T::zero(); n_cols]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = Vec::with_capacity(m);
    let mut slack_col = vec![None; m];
    let mut next_slack = n;
    let mut next_art = n + n_slack;
    for (i, c) in lp.constraints.iter().enumerate() {
        let sign = if flipped[i] { -T::one() } else { T::one() };
        for (j, v) in &c.coeffs {
            if *j >= n {
                return Err(Error::InvalidParameter(format!(
                    "variable {j} out of range"
                )));
            }
            rows[i][*j] = rows[i][*j].clone() + sign.clone() * v.clone();
        }
        rhs.push(sign * c.rhs.clone());
        if c.relation != Relation::Eq {
            slack_col[i] = Some(next_slack);
            rows[i][next_slack] = if effective[i] == Relation::Le {
                T::one()
            } else {
                -T::one()
            };
            next_slack += 1;
        }
        if effective[i] == Relation::Le {
            basis.push(slack_col[i].unwrap());
            identity_col.push(slack_col[i].unwrap());
        } else {
            rows[i][next_art] = T::one();
            basis.push(next_art);
            identity_col.push(next_art);
            next_art += 1;
        }
    }
    let first_artificial = n + n_slack;
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        identity_col,
        n_cols,
        first_artificial,
        iterations: 0,
    };

    // Phase 1: drive the artificials to zero.
    if n_art > 0 {
        let mut cost1 = vec![T::zero(); n_cols];
        for c in cost1.iter_mut().skip(first_artificial) {
            *c = -T::one();
        }
        t.optimize(&cost1, n_cols, options.max_iterations)?;
        let infeas: f64 = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(&b, _)| b >= first_artificial)
            .map(|(_, v)| v.to_f64())
            .sum();
        let any_positive = t
            .basis
            .iter()
            .zip(&t.rhs)
            .any(|(&b, v)| b >= first_artificial && v.is_pos());
        if any_positive || infeas > 1e-8 {
            return Err(Error::Infeasible);
        }
        remove_basic_artificials(&mut t);
    }

    // Phase 2.
    let mut cost2 = vec![T::zero(); n_cols];
    cost2[..n].clone_from_slice(&lp.objective);
    t.optimize(&cost2, first_artificial, options.max_iterations)?;

    let mut x = vec![T::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = if t.rhs[i].is_neg() && !T::EXACT {
                T::zero()
            } else {
                t.rhs[i].clone()
            };
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());

    // y_k = c_B . (B^-1 e_k), read from the k-th initial identity column.
    let duals: Vec<T> = (0..m)
        .map(|k| {
            let col = t.identity_col[k];
            let y = t.basis.iter().enumerate().fold(T::zero(), |acc, (i, &b)| {
                acc + cost2[b].clone() * t.rows[i][col].clone()
            });
            if flipped[k] {
                -y
            } else {
                y
            }
        })
        .collect();
    let (duality_gap, dual_infeasibility) = certificate(lp, &duals, &objective);
    Ok(LpSolution {
        x,
        objective,
        duals,
        iterations: t.iterations,
        duality_gap,
        dual_infeasibility,
    })
}

/// Pivots zero-level artificials out of the basis; rows where that is
/// impossible are linearly dependent and are dropped.
fn remove_basic_artificials<T: LpScalar>(t: &mut Tableau<T>) {
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < t.first_artificial {
            r += 1;
            continue;
        }
        let col = if T::EXACT {
            (0..t.first_artificial).find(|&j| !t.rows[r][j].is_negligible())
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..t.first_artificial {
                let a = t.rows[r][j].to_f64().abs();
                if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            best.map(|(j, _)| j)
        };
        match col {
            Some(c) => {
                t.pivot(r, c);
                t.iterations -= 1;
                r += 1;
            }
            None => {
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
            }
        }
    }
}

fn certificate<T: LpScalar>(lp: &LinearProgram<T>, duals: &[T], primal: &T) -> (f64, f64) {
    let mut reduced: Vec<f64> = lp.objective.iter().map(T::to_f64).collect();
    let mut dual_obj = 0.0;
    let mut worst: f64 = 0.0;
    for (c, y) in lp.constraints.iter().zip(duals) {
        let yf = y.to_f64();
        dual_obj += yf * c.rhs.to_f64();
        for (j, a) in &c.coeffs {
            reduced[*j] -= yf * a.to_f64();
        }
        let sign_violation = match c.relation {
            Relation::Le => (-yf).max(0.0),
            Relation::Ge => yf.max(0.0),
            Relation::Eq => 0.0,
        };
        worst = worst.max(sign_violation);
    }
    for r in reduced {
        worst = worst.max(r);
    }
    if T::EXACT {
        // Recompute exactly so an exact optimum reports a zero gap.
        let mut exact_dual = T::zero();
        for (c, y) in lp.constraints.iter().zip(duals) {
            exact_dual = exact_dual + y.clone() * c.rhs.clone();
        }
        let gap = (primal.clone() - exact_dual).abs_value().to_f64();
        return (gap, worst);
    }
    ((primal.to_f64() - dual_obj).abs(), worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![3.0, 5.0];
        lp.add(vec![(0, 1.0)], Relation::Le, 4.0);
        lp.add(vec![(1, 2.0)], Relation::Le, 12.0);
        lp.add(vec![(0, 3.0), (1, 2.0)], Relation::Le, 18.0);
        let s = solve(&lp, SolverOptions::default()).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        assert!(s.duality_gap < 1e-9);
        assert!(s.dual_infeasibility < 1e-9);
    }

    #[test]
    fn exact_equality_and_ge_rows() {
        // max x + y, x + 2y = 3, x >= 1/3, y <= 1 -> x = 3, y = 0 -> 3
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.objective = vec![q(1, 1), q(1, 1)];
        lp.add(vec![(0, q(1, 1)), (1, q(2, 1))], Relation::Eq, q(3, 1));
        lp.add(vec![(0, q(1, 1))], Relation::Ge, q(1, 3));
        lp.add(vec![(1, q(1, 1))], Relation::Le, q(1, 1));
        let s = solve(&lp, SolverOptions::default()).unwrap();
        assert_eq!(s.objective, q(3, 1));
        assert_eq!(s.duality_gap, 0.0);
        assert!(s.dual_infeasibility <= 0.0);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // max -x, -x <= -2  -> x >= 2 -> -2
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![-1.0];
        lp.add(vec![(0, -1.0)], Relation::Le, -2.0);
        let s = solve(&lp, SolverOptions::default()).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-12);
        assert!(s.duality_gap < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.objective = vec![q(1, 1), q(0, 1)];
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(1, 1));
        lp.add(vec![(0, q(2, 1)), (1, q(2, 1))], Relation::Eq, q(2, 1));
        let s = solve(&lp, SolverOptions::default()).unwrap();
        assert_eq!(s.objective, q(1, 1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.add(vec![(0, 1.0)], Relation::Eq, 1.0);
        lp.add(vec![(0, 1.0)], Relation::Eq, 2.0);
        assert!(matches!(
            solve(&lp, SolverOptions::default()),
            Err(Error::Infeasible)
        ));

        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![1.0];
        lp.add(vec![(0, 1.0)], Relation::Ge, 1.0);
        assert!(matches!(
            solve(&lp, SolverOptions::default()),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (max form).
        let mut lp = LinearProgram::<BigRational>::new(4);
        lp.objective = vec![q(3, 4), q(-150, 1), q(1, 50), q(-6, 1)];
        lp.add(
            vec![(0, q(1, 4)), (1, q(-60, 1)), (2, q(-1, 25)), (3, q(9, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add(
            vec![(0, q(1, 2)), (1, q(-90, 1)), (2, q(-1, 50)), (3, q(3, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add(vec![(2, q(1, 1))], Relation::Le, q(1, 1));
        let s = solve(&lp, SolverOptions::default()).unwrap();
        assert_eq!(s.objective, q(1, 20));

        let mut lpf = LinearProgram::<f64>::new(4);
        lpf.objective = vec![0.75, -150.0, 0.02, -6.0];
        lpf.add(
            vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)],
            Relation::Le,
            0.0,
        );
        lpf.add(
            vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)],
            Relation::Le,
            0.0,
        );
        lpf.add(vec![(2, 1.0)], Relation::Le, 1.0);
        let s = solve(&lpf, SolverOptions::default()).unwrap();
        assert!((s.objective - 0.05).abs() < 1e-12);
    }

    #[test]
    fn tableau_cap_is_enforced() {
        let mut lp = LinearProgram::<f64>::new(100);
        lp.add((0..100).map(|j| (j, 1.0)).collect(), Relation::Le, 1.0);
        let opts = SolverOptions {
            max_tableau_entries: 10,
            ..SolverOptions::default()
        };
        assert!(matches!(solve(&lp, opts), Err(Error::Capacity { .. })));
    }
}
