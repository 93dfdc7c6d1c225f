//! Dense tableau simplex over exact rationals.
//!
//! Minimisation with `x >= 0`. Phase 1 drives artificials out with Bland's
//! rule, phase 2 optimises with Bland's rule, and rows appended afterwards
//! are absorbed by the dual simplex. Every row owns an auxiliary identity
//! column (slack or artificial) whose reduced cost yields its dual value.

use num_traits::{One, Signed, Zero};

use crate::error::{breach, Result};
use crate::rational::Rational;

const PIVOT_CAP: usize = 500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) -> Self {
        Self { coeffs, sense, rhs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Col {
    Structural,
    Slack,
    Artificial,
}

pub enum Outcome {
    Optimal(Box<Simplex>),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    nvars: usize,
    cost: Vec<Rational>,
    cols: Vec<Col>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    red: Vec<Rational>,
    orig: Vec<Constraint>,
    aux: Vec<usize>,
    negated: Vec<bool>,
    pivots: usize,
}

impl Simplex {
    /// Minimises `cost · x` subject to `rows` and `x >= 0`.
    pub fn solve(cost: Vec<Rational>, rows: Vec<Constraint>) -> Result<Outcome> {
        let nvars = cost.len();
        let mut cols = vec![Col::Structural; nvars];
        let mut sparse: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(rows.len());
        let mut rhs = Vec::with_capacity(rows.len());
        let mut aux = Vec::with_capacity(rows.len());
        let mut negated = Vec::with_capacity(rows.len());
        for row in &rows {
            let mut entries = merge(&row.coeffs);
            if entries.iter().any(|&(j, _)| j >= nvars) {
                return breach("constraint refers to an unknown variable");
            }
            let slack = match row.sense {
                Sense::Le => Some(Rational::one()),
                Sense::Ge => Some(-Rational::one()),
                Sense::Eq => None,
            };
            let mut b = row.rhs.clone();
            let flip = b.is_negative();
            let slack = slack.map(|s| if flip { -s } else { s });
            if flip {
                b = -b;
                for e in &mut entries {
                    e.1 = -e.1.clone();
                }
            }
            let mut aux_col = None;
            if let Some(s) = slack {
                let j = cols.len();
                cols.push(Col::Slack);
                if s.is_one() {
                    aux_col = Some(j);
                }
                entries.push((j, s));
            }
            let aux_col = match aux_col {
                Some(j) => j,
                None => {
                    let j = cols.len();
                    cols.push(Col::Artificial);
                    entries.push((j, Rational::one()));
                    j
                }
            };
            sparse.push(entries);
            rhs.push(b);
            aux.push(aux_col);
            negated.push(flip);
        }
        let ncols = cols.len();
        let dense = sparse
            .into_iter()
            .map(|entries| {
                let mut r = vec![Rational::zero(); ncols];
                for (j, q) in entries {
                    r[j] = q;
                }
                r
            })
            .collect();
        let mut full_cost = cost;
        full_cost.resize(ncols, Rational::zero());
        let mut spx = Simplex {
            nvars,
            cost: full_cost,
            cols,
            rows: dense,
            rhs,
            basis: aux.clone(),
            red: Vec::new(),
            orig: rows,
            aux,
            negated,
            pivots: 0,
        };

        if spx.basis.iter().any(|&j| spx.cols[j] == Col::Artificial) {
            let phase1: Vec<Rational> = spx
                .cols
                .iter()
                .map(|c| if *c == Col::Artificial { Rational::one() } else { Rational::zero() })
                .collect();
            spx.red = spx.reduced_costs(&phase1);
            if !spx.primal()? {
                return breach("phase 1 reported unbounded");
            }
            let infeasibility: Rational = spx
                .basis
                .iter()
                .zip(&spx.rhs)
                .filter(|(&j, _)| spx.cols[j] == Col::Artificial)
                .map(|(_, b)| b.clone())
                .sum();
            if infeasibility.is_positive() {
                return Ok(Outcome::Infeasible);
            }
            spx.drive_out_artificials();
        }
        spx.red = spx.reduced_costs(&spx.cost.clone());
        if !spx.primal()? {
            return Ok(Outcome::Unbounded);
        }
        Ok(Outcome::Optimal(Box::new(spx)))
    }

    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        let mut red = c.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    red[j] -= cb * a;
                }
            }
        }
        red
    }

    fn enterable(&self, j: usize) -> bool {
        self.cols[j] != Col::Artificial
    }

    /// Primal simplex with Bland's rule. Returns false when unbounded.
    fn primal(&mut self) -> Result<bool> {
        loop {
            let Some(c) = (0..self.cols.len()).find(|&j| self.enterable(j) && self.red[j].is_negative())
            else {
                return Ok(true);
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, c)?;
        }
    }

    /// Dual simplex from a dual-feasible basis. Returns false when the
    /// primal is infeasible.
    fn dual(&mut self) -> Result<bool> {
        loop {
            let leaving = (0..self.rows.len())
                .filter(|&i| self.rhs[i].is_negative())
                .min_by_key(|&i| self.basis[i]);
            let Some(r) = leaving else {
                return Ok(true);
            };
            let mut best: Option<(usize, Rational)> = None;
            for j in 0..self.cols.len() {
                let a = &self.rows[r][j];
                if !a.is_negative() || !self.enterable(j) {
                    continue;
                }
                let ratio = &self.red[j] / -a;
                if best.as_ref().is_none_or(|(_, br)| ratio < *br) {
                    best = Some((j, ratio));
                }
            }
            let Some((c, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, c)?;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > PIVOT_CAP {
            return breach("simplex pivot cap exceeded");
        }
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.red[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.red[j] -= &f * &prow[j];
            }
        }
        self.rows[r] = prow;
        self.basis[r] = c;
        Ok(())
    }

    /// After phase 1 every basic artificial sits at zero; swap it for any
    /// non-artificial column with a nonzero entry. Rows without one are
    /// linearly redundant and stay inert.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.cols[self.basis[i]] != Col::Artificial {
                continue;
            }
            if let Some(j) = (0..self.cols.len()).find(|&j| self.enterable(j) && !self.rows[i][j].is_zero()) {
                // Degenerate pivot: the row's right-hand side is zero.
                let _ = self.pivot(i, j);
            }
        }
    }

    /// Appends `row` (`Le` or `Ge`) and re-optimises with the dual simplex.
    /// Returns false if the enlarged LP is infeasible.
    pub fn add_constraint(&mut self, row: Constraint) -> Result<bool> {
        let (sign, negated) = match row.sense {
            Sense::Le => (Rational::one(), false),
            Sense::Ge => (-Rational::one(), true),
            Sense::Eq => return breach("equality rows cannot be appended"),
        };
        let s = self.cols.len();
        self.cols.push(Col::Slack);
        self.cost.push(Rational::zero());
        self.red.push(Rational::zero());
        for r in &mut self.rows {
            r.push(Rational::zero());
        }
        let mut new = vec![Rational::zero(); s + 1];
        for (j, q) in merge(&row.coeffs) {
            if j >= self.nvars {
                return breach("constraint refers to an unknown variable");
            }
            new[j] = &sign * q;
        }
        new[s] = Rational::one();
        let mut b = &sign * &row.rhs;
        for i in 0..self.rows.len() {
            let f = new[self.basis[i]].clone();
            if f.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    new[j] -= &f * a;
                }
            }
            b -= &f * &self.rhs[i];
        }
        self.rows.push(new);
        self.rhs.push(b);
        self.basis.push(s);
        self.aux.push(s);
        self.negated.push(negated);
        self.orig.push(row);
        self.dual()
    }

    pub fn values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.nvars];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.nvars {
                x[j] = self.rhs[i].clone();
            }
        }
        x
    }

    pub fn objective(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&j, b)| &self.cost[j] * b)
            .sum()
    }

    /// Dual values for the constraints in insertion order, in the sign
    /// convention of the original rows (`Ge` duals are non-negative, `Le`
    /// duals non-positive).
    pub fn duals(&self) -> Vec<Rational> {
        self.aux
            .iter()
            .zip(&self.negated)
            .map(|(&a, &neg)| {
                let y = -self.red[a].clone();
                if neg {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.orig
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Re-checks primal feasibility, dual feasibility and a zero duality gap
    /// against the stored original rows, independently of the tableau.
    pub fn certificate_holds(&self) -> bool {
        let x = self.values();
        let y = self.duals();
        if x.iter().any(|v| v.is_negative()) {
            return false;
        }
        let mut reduced: Vec<Rational> = self.cost[..self.nvars].to_vec();
        let mut dual_obj = Rational::zero();
        for (row, yi) in self.orig.iter().zip(&y) {
            let lhs: Rational = row.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            let primal_ok = match row.sense {
                Sense::Le => lhs <= row.rhs,
                Sense::Ge => lhs >= row.rhs,
                Sense::Eq => lhs == row.rhs,
            };
            let sign_ok = match row.sense {
                Sense::Le => !yi.is_positive(),
                Sense::Ge => !yi.is_negative(),
                Sense::Eq => true,
            };
            if !primal_ok || !sign_ok {
                return false;
            }
            for (j, a) in &row.coeffs {
                reduced[*j] -= yi * a;
            }
            dual_obj += yi * &row.rhs;
        }
        reduced.iter().all(|d| !d.is_negative()) && dual_obj == self.objective()
    }
}

fn merge(coeffs: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut map = std::collections::BTreeMap::<usize, Rational>::new();
    for (j, q) in coeffs {
        *map.entry(*j).or_insert_with(Rational::zero) += q;
    }
    map.into_iter().filter(|(_, q)| !q.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn row(c: &[(usize, i64)], sense: Sense, rhs: i64) -> Constraint {
        Constraint::new(c.iter().map(|&(j, a)| (j, int(a))).collect(), sense, int(rhs))
    }

    fn optimal(o: Outcome) -> Simplex {
        match o {
            Outcome::Optimal(s) => *s,
            Outcome::Infeasible => panic!("infeasible"),
            Outcome::Unbounded => panic!("unbounded"),
        }
    }

    #[test]
    fn small_lp_with_certificate() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let s = optimal(
            Simplex::solve(
                vec![int(-1), int(-1)],
                vec![row(&[(0, 1), (1, 2)], Sense::Le, 4), row(&[(0, 3), (1, 1)], Sense::Le, 6)],
            )
            .unwrap(),
        );
        assert_eq!(s.values(), vec![frac(8, 5), frac(6, 5)]);
        assert_eq!(s.objective(), frac(-14, 5));
        assert!(s.certificate_holds());
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y  s.t. x + y = 3, x - y >= -1, x <= 1
        let s = optimal(
            Simplex::solve(
                vec![int(1), int(2)],
                vec![
                    row(&[(0, 1), (1, 1)], Sense::Eq, 3),
                    row(&[(0, 1), (1, -1)], Sense::Ge, -1),
                    row(&[(0, 1)], Sense::Le, 1),
                ],
            )
            .unwrap(),
        );
        assert_eq!(s.values(), vec![int(1), int(2)]);
        assert!(s.certificate_holds());
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let o = Simplex::solve(vec![int(1)], vec![row(&[(0, 1)], Sense::Ge, 2), row(&[(0, 1)], Sense::Le, 1)]);
        assert!(matches!(o.unwrap(), Outcome::Infeasible));
        let o = Simplex::solve(vec![int(-1)], vec![row(&[(0, 1)], Sense::Ge, 2)]);
        assert!(matches!(o.unwrap(), Outcome::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let s = optimal(
            Simplex::solve(
                vec![int(1), int(1)],
                vec![row(&[(0, 1), (1, 1)], Sense::Eq, 2), row(&[(0, 2), (1, 2)], Sense::Eq, 4)],
            )
            .unwrap(),
        );
        assert_eq!(s.objective(), int(2));
        assert!(s.certificate_holds());
    }

    #[test]
    fn appended_cut_reoptimises() {
        // min x + y  s.t. x + y >= 1; then cut x >= 2/3, then y >= 1/2
        let mut s = optimal(Simplex::solve(vec![int(1), int(1)], vec![row(&[(0, 1), (1, 1)], Sense::Ge, 1)]).unwrap());
        assert_eq!(s.objective(), int(1));
        assert!(s.add_constraint(Constraint::new(vec![(0, int(1))], Sense::Ge, frac(2, 3))).unwrap());
        assert_eq!(s.objective(), int(1));
        assert!(s.add_constraint(Constraint::new(vec![(1, int(1))], Sense::Ge, frac(1, 2))).unwrap());
        assert_eq!(s.objective(), frac(7, 6));
        assert!(s.certificate_holds());
        assert!(!s.add_constraint(row(&[(0, 1)], Sense::Le, 0)).unwrap());
    }
}
