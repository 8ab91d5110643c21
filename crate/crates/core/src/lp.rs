//! Exact rational linear feasibility via phase-1 simplex with Bland's rule.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
}

/// `coeffs · x (=|≥) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs = self.coeffs.iter().zip(x).fold(zero(), |acc, (a, v)| acc + a * v);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint has {found} coefficients for {expected} variables")]
    Arity { expected: usize, found: usize },
}

/// A finite system over named nonnegative variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    names: Vec<String>,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(names: Vec<String>) -> Self {
        LinearSystem { names, constraints: Vec::new() }
    }

    pub fn with_variables(count: usize) -> Self {
        LinearSystem::new((0..count).map(|i| format!("x{i}")).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Panics on an arity mismatch; use [`LinearSystem::try_push`] for untrusted input.
    pub fn push(&mut self, constraint: Constraint) {
        self.try_push(constraint).expect("constraint arity matches variable count");
    }

    pub fn try_push(&mut self, constraint: Constraint) -> Result<(), LpError> {
        if constraint.coeffs.len() != self.names.len() {
            return Err(LpError::Arity { expected: self.names.len(), found: constraint.coeffs.len() });
        }
        self.constraints.push(constraint);
        Ok(())
    }

    /// Every variable nonnegative and every constraint satisfied, exactly.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.names.len()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds_at(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs of the phase-1 objective
    cost: Vec<Rational>,
    /// minus the current sum of artificials
    cost_rhs: Rational,
    first_artificial: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        if !p.is_one() {
            for v in self.rows[row].iter_mut().filter(|v| !v.is_zero()) {
                *v /= &p;
            }
            self.rhs[row] /= &p;
        }
        let nz: Vec<usize> = (0..self.rows[row].len()).filter(|&j| !self.rows[row][j].is_zero()).collect();
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        let eliminate = |target: &mut Vec<Rational>, target_rhs: &mut Rational| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &factor * &pivot_row[j];
                target[j] -= delta;
            }
            *target_rhs -= &factor * &pivot_rhs;
        };
        for r in 0..self.rows.len() {
            if r != row {
                let (target, target_rhs) = (&mut self.rows[r], &mut self.rhs[r]);
                eliminate(target, target_rhs);
            }
        }
        eliminate(&mut self.cost, &mut self.cost_rhs);
        self.basis[row] = col;
    }

    fn run(&mut self) {
        loop {
            // Bland: lowest-index improving column, artificials never re-enter
            let entering = (0..self.first_artificial).find(|&j| self.cost[j].is_negative());
            let Some(col) = entering else { return };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if a.is_positive() {
                    let ratio = &self.rhs[r] / a;
                    let better = match &leaving {
                        None => true,
                        Some((best, best_ratio)) => {
                            ratio < *best_ratio || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                // phase-1 objective is bounded below by 0, so an unbounded ray cannot improve it
                None => return,
            }
        }
    }
}

/// Decides whether the system has a nonnegative solution, returning one if so.
pub fn lp_feasible(system: &LinearSystem) -> Feasibility {
    let n = system.num_vars();
    let m = system.constraints().len();

    // Flip rows to get a nonnegative right-hand side; a flipped `≥` becomes `≤`.
    let mut prepared = Vec::with_capacity(m);
    for c in system.constraints() {
        let flip = c.rhs.is_negative();
        let coeffs: Vec<Rational> = if flip { c.coeffs.iter().map(|a| -a).collect() } else { c.coeffs.clone() };
        let rhs = if flip { -&c.rhs } else { c.rhs.clone() };
        // kind: 0 = equality, 1 = ≥, 2 = ≤
        let kind = match (c.relation, flip) {
            (Relation::Eq, _) => 0,
            (Relation::Ge, false) => 1,
            (Relation::Ge, true) => 2,
        };
        prepared.push((coeffs, kind, rhs));
    }

    let slack_count = prepared.iter().filter(|(_, k, _)| *k != 0).count();
    let art_count = prepared.iter().filter(|(_, k, _)| *k != 2).count();
    let first_artificial = n + slack_count;
    let width = first_artificial + art_count;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut cost = vec![zero(); width];
    let mut cost_rhs = zero();
    let (mut next_slack, mut next_art) = (n, first_artificial);
    for (coeffs, kind, b) in prepared {
        let mut row = vec![zero(); width];
        row[..n].clone_from_slice(&coeffs);
        match kind {
            1 => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
            }
            2 => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            _ => {}
        }
        if kind != 2 {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
            for j in 0..first_artificial {
                if !row[j].is_zero() {
                    cost[j] -= &row[j];
                }
            }
            cost_rhs -= &b;
        }
        rows.push(row);
        rhs.push(b);
    }

    let mut tableau = Tableau { rows, rhs, basis, cost, cost_rhs, first_artificial };
    tableau.run();

    if !tableau.cost_rhs.is_zero() {
        return Feasibility::Infeasible;
    }
    let mut x = vec![zero(); n];
    for (r, &var) in tableau.basis.iter().enumerate() {
        if var < n {
            x[var] = tableau.rhs[r].clone();
        }
    }
    debug_assert!(system.is_satisfied_by(&x));
    Feasibility::Feasible(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn system(n: usize, rows: &[(&[Rational], Relation, Rational)]) -> LinearSystem {
        let mut s = LinearSystem::with_variables(n);
        for (c, rel, b) in rows {
            s.push(Constraint::new(c.to_vec(), *rel, b.clone()));
        }
        s
    }

    #[test]
    fn single_equality() {
        let s = system(1, &[(&[int(1)], Relation::Ge, int(0)), (&[int(1)], Relation::Eq, int(1))]);
        assert_eq!(lp_feasible(&s), Feasibility::Feasible(vec![int(1)]));
    }

    #[test]
    fn over_committed_simplex_is_infeasible() {
        let s = system(
            2,
            &[
                (&[int(1), int(1)], Relation::Eq, int(1)),
                (&[int(1), int(0)], Relation::Ge, ratio(3, 4)),
                (&[int(0), int(1)], Relation::Ge, ratio(3, 4)),
            ],
        );
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn negative_rhs_rows() {
        // -x ≥ -2, x ≥ 3/2  →  x ∈ [3/2, 2]
        let s = system(1, &[(&[int(-1)], Relation::Ge, int(-2)), (&[int(1)], Relation::Ge, ratio(3, 2))]);
        let x = lp_feasible(&s);
        assert!(s.is_satisfied_by(x.witness().unwrap()));
        // -x ≥ -1, x ≥ 2 → empty
        let s = system(1, &[(&[int(-1)], Relation::Ge, int(-1)), (&[int(1)], Relation::Ge, int(2))]);
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn variable_free_rows() {
        let ok = system(0, &[(&[], Relation::Ge, int(-1)), (&[], Relation::Eq, int(0))]);
        assert!(lp_feasible(&ok).is_feasible());
        let bad = system(0, &[(&[], Relation::Ge, ratio(1, 3))]);
        assert_eq!(lp_feasible(&bad), Feasibility::Infeasible);
        assert!(lp_feasible(&LinearSystem::with_variables(3)).is_feasible());
    }

    #[test]
    fn degenerate_cycling_candidate() {
        // Beale-style degenerate system; Bland's rule must terminate.
        let s = system(
            4,
            &[
                (&[ratio(-1, 4), int(8), int(1), int(-9)], Relation::Ge, int(0)),
                (&[ratio(-1, 2), int(12), ratio(1, 2), int(-3)], Relation::Ge, int(0)),
                (&[int(0), int(0), int(-1), int(0)], Relation::Ge, int(-1)),
                (&[int(1), int(1), int(1), int(1)], Relation::Eq, int(1)),
            ],
        );
        let f = lp_feasible(&s);
        assert!(s.is_satisfied_by(f.witness().unwrap()));
    }

    #[test]
    fn arity_checked() {
        let mut s = LinearSystem::with_variables(2);
        assert_eq!(
            s.try_push(Constraint::new(vec![int(1)], Relation::Eq, int(0))).unwrap_err(),
            LpError::Arity { expected: 2, found: 1 }
        );
    }
}
