use num_traits::Zero;

use crate::error::invalid;
use crate::lp::simplex::{Constraint, Outcome, Sense, Simplex};
use crate::lp::LpSolution;
use crate::matching::TwoMatching;
use crate::rational::Rational;
use crate::{Kind, Result};

/// A feasible point `y[C][e]` of the assignment LP, indexed by component
/// and by the support edge list `edges`.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub edges: Vec<(usize, usize)>,
    pub y: Vec<Vec<Rational>>,
}

impl Assignment {
    /// Mass given to component `c`.
    pub fn received(&self, c: usize) -> Rational {
        self.y[c].iter().sum()
    }
}

/// Decides feasibility of: every component of `m` receives at least
/// `alpha` from the support edges, and no edge hands out more than `x_e`.
pub fn assignment_feasible(x: &LpSolution, m: &TwoMatching, alpha: &Rational) -> Result<Option<Assignment>> {
    if m.n() != x.n {
        return invalid("matching and solution differ in size");
    }
    if *alpha < Rational::zero() {
        return invalid("alpha must be non-negative");
    }
    let edges: Vec<(usize, usize)> = x.support().edges().collect();
    let comps = m.components().len();
    let ne = edges.len();
    let var = |c: usize, e: usize| c * ne + e;
    let mut rows = Vec::with_capacity(comps + ne);
    for c in 0..comps {
        let coeffs = (0..ne).map(|e| (var(c, e), Rational::from_integer(1.into()))).collect();
        rows.push(Constraint::new(coeffs, Sense::Ge, alpha.clone()));
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        let coeffs = (0..comps).map(|c| (var(c, e), Rational::from_integer(1.into()))).collect();
        rows.push(Constraint::new(coeffs, Sense::Le, x.value(u, v)));
    }
    let cost = vec![Rational::zero(); comps * ne];
    match Simplex::solve(cost, rows)? {
        Outcome::Optimal(spx) => {
            let vals = spx.values();
            let y = (0..comps).map(|c| vals[c * ne..(c + 1) * ne].to_vec()).collect();
            Ok(Some(Assignment { edges, y }))
        }
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => crate::error::breach("feasibility LP reported unbounded"),
    }
}

/// The inequality `x(δ(S)) + x(E(S)) >= |S| + 1` for a proper non-empty `S`.
pub fn wolsey_check(x: &LpSolution, set: &[usize]) -> Result<bool> {
    if x.kind != Kind::Symmetric {
        return invalid("the inequality is stated for symmetric solutions");
    }
    let mut inside = vec![false; x.n];
    for &v in set {
        if v >= x.n {
            return invalid(format!("vertex {v} out of range"));
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == x.n {
        return invalid("set must be non-empty and proper");
    }
    let touched: Rational = x
        .values
        .iter()
        .filter(|(&(u, v), _)| inside[u] || inside[v])
        .map(|(_, q)| q.clone())
        .sum();
    Ok(touched >= Rational::from_integer((size as i64 + 1).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::lp::solve_ser;
    use crate::matching::unit_matching;
    use crate::rational::int;

    #[test]
    fn alpha_zero_is_feasible() {
        let x = solve_ser(&gen::fig1a()).unwrap();
        let m = TwoMatching::new(9);
        let y = assignment_feasible(&x, &m, &int(0)).unwrap();
        assert!(y.is_some());
    }

    #[test]
    fn too_many_components_is_infeasible() {
        let x = solve_ser(&gen::fig1a()).unwrap();
        // Three components, total mass 9: alpha 4 needs 12.
        let m = unit_matching(&x).unwrap();
        assert_eq!(m.components().len(), 3);
        assert!(assignment_feasible(&x, &m, &int(4)).unwrap().is_none());
        let y = assignment_feasible(&x, &m, &int(3)).unwrap().unwrap();
        for c in 0..3 {
            assert!(y.received(c) >= int(3));
        }
    }

    #[test]
    fn wolsey_on_singletons_is_tight() {
        let x = solve_ser(&gen::fig1a()).unwrap();
        for v in 0..9 {
            assert!(wolsey_check(&x, &[v]).unwrap());
        }
        assert!(wolsey_check(&x, &[]).is_err());
        assert!(wolsey_check(&x, &(0..9).collect::<Vec<_>>()).is_err());
    }
}
