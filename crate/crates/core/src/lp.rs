//! Exact rational linear programming: a dense two-phase simplex with
//! Bland's rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// Optimize `objective · x` over `x ≥ 0` subject to the constraints.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub maximize: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the objective value.
    z: Vec<Rational>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.z.len() - 1
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.z[e].is_zero() {
            let f = self.z[e].clone();
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Maximize with Bland's rule over the allowed columns. Returns false
    /// when unbounded.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> bool {
        let w = self.width();
        loop {
            let Some(e) = (0..w).find(|&j| allowed(j) && self.z[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[e].is_positive() {
                    let ratio = &row[w] / &row[e];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let w = self.width();
        let mut z = vec![Rational::zero(); w + 1];
        z[..c.len()].clone_from_slice(c);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < c.len() && !c[b].is_zero() {
                for (zj, v) in z.iter_mut().zip(row) {
                    *zj -= &c[b] * v;
                }
            }
        }
        self.z = z;
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.objective.len();
    let m = lp.constraints.len();
    let mut cons: Vec<Constraint> = lp.constraints.clone();
    for c in cons.iter_mut() {
        if c.rhs.is_negative() {
            for v in c.coeffs.iter_mut() {
                *v = -v.clone();
            }
            c.rhs = -c.rhs.clone();
            c.rel = match c.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let slacks = cons.iter().filter(|c| c.rel != Relation::Eq).count();
    let arts = cons.iter().filter(|c| c.rel != Relation::Le).count();
    let width = n + slacks + arts;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, n + slacks);
    for c in &cons {
        let mut row = vec![Rational::zero(); width + 1];
        for (j, v) in c.coeffs.iter().enumerate().take(n) {
            row[j] = v.clone();
        }
        row[width] = c.rhs.clone();
        match c.rel {
            Relation::Le => {
                row[s] = Rational::from_integer(1.into());
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = Rational::from_integer((-1).into());
                row[a] = Rational::from_integer(1.into());
                basis.push(a);
                s += 1;
                a += 1;
            }
            Relation::Eq => {
                row[a] = Rational::from_integer(1.into());
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, z: vec![Rational::zero(); width + 1] };
    let is_art = |j: usize| j >= n + slacks;
    if arts > 0 {
        let mut c1 = vec![Rational::zero(); width];
        for v in c1.iter_mut().skip(n + slacks) {
            *v = Rational::from_integer((-1).into());
        }
        t.set_objective(&c1);
        t.run(|_| true);
        // the phase-one optimum is -Σa, zero exactly when feasible
        if !t.z[width].is_zero() {
            return LpOutcome::Infeasible;
        }
        let mut r = 0;
        while r < t.rows.len() {
            if is_art(t.basis[r]) {
                match (0..n + slacks).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
    let sign = if lp.maximize { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
    let c: Vec<Rational> = lp.objective.iter().map(|v| v * &sign).collect();
    t.set_objective(&c);
    if !t.run(|j| !is_art(j)) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            x[b] = row[width].clone();
        }
    }
    let value = -t.z[width].clone() * sign;
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn c(coeffs: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint { coeffs: coeffs.iter().map(|&v| int(v)).collect(), rel, rhs: int(rhs) }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let lp = LinearProgram {
            objective: vec![int(3), int(5)],
            constraints: vec![c(&[1, 0], Relation::Le, 4), c(&[0, 2], Relation::Le, 12), c(&[3, 2], Relation::Le, 18)],
            maximize: true,
        };
        assert_eq!(solve(&lp), LpOutcome::Optimal { value: int(36), x: vec![int(2), int(6)] });
    }

    #[test]
    fn equality_and_min() {
        // min x + 2y, x + y = 1, x ≤ 1/2 (as 2x ≤ 1) → 3/2 at (1/2, 1/2)
        let lp = LinearProgram {
            objective: vec![int(1), int(2)],
            constraints: vec![c(&[1, 1], Relation::Eq, 1), c(&[2, 0], Relation::Le, 1)],
            maximize: false,
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(3, 2)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = LinearProgram {
            objective: vec![int(1)],
            constraints: vec![c(&[1], Relation::Ge, 2), c(&[1], Relation::Le, 1)],
            maximize: true,
        };
        assert_eq!(solve(&inf), LpOutcome::Infeasible);
        let unb = LinearProgram { objective: vec![int(1)], constraints: vec![c(&[1], Relation::Ge, 2)], maximize: true };
        assert_eq!(solve(&unb), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x ≤ -1 (x ≥ 1), x + y = 2, 2x + 2y = 4, min y → 0 at x = 2
        let lp = LinearProgram {
            objective: vec![int(0), int(1)],
            constraints: vec![c(&[-1, 0], Relation::Le, -1), c(&[1, 1], Relation::Eq, 2), c(&[2, 2], Relation::Eq, 4)],
            maximize: false,
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, int(0));
                assert_eq!(x[0], int(2));
            }
            o => panic!("{o:?}"),
        }
    }
}
