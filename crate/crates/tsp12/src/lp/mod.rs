//! The subtour elimination relaxation (SER) and its rounded variant SER⁺.

pub mod separation;
pub mod simplex;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{breach, invalid, Result};
use crate::instance::{pairs, Instance, Kind, LpFile};
use crate::rational::{self, Rational};
use separation::Values;
use simplex::{Constraint, Outcome, Sense, Simplex};

const ROUND_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub half_integral: bool,
    pub subcubic_support: bool,
    pub unit_support_cost: bool,
}

/// An LP solution over canonical pairs, storing only nonzero values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub kind: Kind,
    pub n: usize,
    pub values: Values,
    pub objective: Rational,
    pub cuts: Vec<Vec<usize>>,
    pub is_vertex: bool,
    pub flags: Flags,
}

impl LpSolution {
    /// Builds a solution from raw values, recomputing objective and flags.
    pub fn from_values(inst: &Instance, values: Values, cuts: Vec<Vec<usize>>, is_vertex: bool) -> Result<Self> {
        let kind = inst.kind();
        let mut clean = Values::new();
        for ((u, v), q) in values {
            if u >= inst.n() || v >= inst.n() || u == v {
                return invalid(format!("bad pair {u} {v}"));
            }
            if q < Rational::zero() || q > Rational::one() {
                return invalid(format!("value of {u} {v} outside [0, 1]"));
            }
            if !q.is_zero() {
                clean.insert(kind.key(u, v), q);
            }
        }
        let objective = clean
            .iter()
            .map(|(&(u, v), q)| q * rational::int(inst.cost(u, v) as i64))
            .sum();
        let mut sol = Self {
            kind,
            n: inst.n(),
            values: clean,
            objective,
            cuts,
            is_vertex,
            flags: Flags::default(),
        };
        sol.flags = classify(&sol, inst);
        Ok(sol)
    }

    pub fn value(&self, u: usize, v: usize) -> Rational {
        self.values.get(&self.kind.key(u, v)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_one(&self, u: usize, v: usize) -> bool {
        self.values.get(&self.kind.key(u, v)).is_some_and(|q| q.is_one())
    }

    pub fn one_edges(&self) -> Vec<(usize, usize)> {
        self.values.iter().filter(|(_, q)| q.is_one()).map(|(&e, _)| e).collect()
    }

    pub fn support(&self) -> SupportGraph {
        SupportGraph::new(self)
    }

    /// Checks degree equalities, bounds and every subtour constraint.
    pub fn is_feasible(&self) -> Result<bool> {
        if self.values.values().any(|q| *q < Rational::zero() || *q > Rational::one()) {
            return Ok(false);
        }
        let sc = separation::scale(self.kind, self.n, &self.values)?;
        if separation::check_degrees(self.kind, self.n, &sc).is_err() {
            return Ok(false);
        }
        Ok(separation::separate(self.kind, self.n, &self.values)?.is_none())
    }

    pub fn to_file(&self) -> LpFile {
        LpFile {
            n: self.n,
            values: self.values.iter().map(|(&e, q)| (e, q.clone())).collect(),
            cuts: self.cuts.clone(),
        }
    }

    pub fn from_file(inst: &Instance, file: &LpFile) -> Result<Self> {
        if file.n != inst.n() {
            return invalid(format!("LP file has {} vertices, instance has {}", file.n, inst.n()));
        }
        let mut values = Values::new();
        for ((u, v), q) in &file.values {
            if values.insert(inst.kind().key(*u, *v), q.clone()).is_some() {
                return invalid(format!("pair {u} {v} listed twice"));
            }
        }
        Self::from_values(inst, values, file.cuts.clone(), false)
    }
}

/// The graph of pairs with positive LP value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph {
    pub kind: Kind,
    pub n: usize,
    /// Sorted distinct neighbours ignoring orientation.
    pub nbrs: Vec<Vec<usize>>,
    /// Sorted out-neighbours (equal to `nbrs` for symmetric support).
    pub out: Vec<Vec<usize>>,
    /// Sorted in-neighbours (equal to `nbrs` for symmetric support).
    pub inn: Vec<Vec<usize>>,
    values: Values,
}

impl SupportGraph {
    pub fn new(x: &LpSolution) -> Self {
        let n = x.n;
        let mut nbrs = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in x.values.keys() {
            out[u].push(v);
            inn[v].push(u);
            nbrs[u].push(v);
            nbrs[v].push(u);
            if x.kind == Kind::Symmetric {
                out[v].push(u);
                inn[u].push(v);
            }
        }
        for list in nbrs.iter_mut().chain(out.iter_mut()).chain(inn.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Self {
            kind: x.kind,
            n,
            nbrs,
            out,
            inn,
            values: x.values.clone(),
        }
    }

    /// Support membership; orientation matters for asymmetric support.
    pub fn has(&self, u: usize, v: usize) -> bool {
        u != v && self.values.contains_key(&self.kind.key(u, v))
    }

    pub fn value(&self, u: usize, v: usize) -> Rational {
        self.values.get(&self.kind.key(u, v)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_one(&self, u: usize, v: usize) -> bool {
        self.values.get(&self.kind.key(u, v)).is_some_and(|q| q.is_one())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.values.keys().copied()
    }
}

pub fn classify(x: &LpSolution, inst: &Instance) -> Flags {
    let support = SupportGraph::new(x);
    Flags {
        half_integral: x.values.values().all(rational::is_half_multiple),
        subcubic_support: (0..x.n).all(|v| support.degree(v) <= 3),
        unit_support_cost: x.objective == rational::int(inst.n() as i64),
    }
}

struct Model {
    vars: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
}

impl Model {
    fn new(inst: &Instance) -> Self {
        let vars = pairs(inst.kind(), inst.n());
        let index = vars.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Self { vars, index }
    }

    fn cost(&self, inst: &Instance) -> Vec<Rational> {
        self.vars.iter().map(|&(u, v)| rational::int(inst.cost(u, v) as i64)).collect()
    }

    fn degree_rows(&self, inst: &Instance) -> Vec<Constraint> {
        let n = inst.n();
        let one = Rational::one();
        match inst.kind() {
            Kind::Symmetric => (0..n)
                .map(|v| {
                    let coeffs = (0..n)
                        .filter(|&u| u != v)
                        .map(|u| (self.index[&Kind::Symmetric.key(u, v)], one.clone()))
                        .collect();
                    Constraint::new(coeffs, Sense::Eq, rational::int(2))
                })
                .collect(),
            Kind::Asymmetric => {
                let mut rows = Vec::new();
                for v in 0..n {
                    let coeffs = (0..n).filter(|&u| u != v).map(|u| (self.index[&(v, u)], one.clone())).collect();
                    rows.push(Constraint::new(coeffs, Sense::Eq, one.clone()));
                }
                // The last in-degree row is implied by the others.
                for v in 0..n - 1 {
                    let coeffs = (0..n).filter(|&u| u != v).map(|u| (self.index[&(u, v)], one.clone())).collect();
                    rows.push(Constraint::new(coeffs, Sense::Eq, one.clone()));
                }
                rows
            }
        }
    }

    fn cut_row(&self, kind: Kind, n: usize, set: &[usize]) -> Constraint {
        let mut inside = vec![false; n];
        for &v in set {
            inside[v] = true;
        }
        let coeffs = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| match kind {
                Kind::Symmetric => inside[u] != inside[v],
                Kind::Asymmetric => !inside[u] && inside[v],
            })
            .map(|(i, _)| (i, Rational::one()))
            .collect();
        let rhs = match kind {
            Kind::Symmetric => rational::int(2),
            Kind::Asymmetric => Rational::one(),
        };
        Constraint::new(coeffs, Sense::Ge, rhs)
    }

    fn values(&self, spx: &Simplex) -> Values {
        self.vars
            .iter()
            .zip(spx.values())
            .filter(|(_, q)| !q.is_zero())
            .map(|(&e, q)| (e, q))
            .collect()
    }
}

/// Cutting-plane loop: solve, separate, append the violated cut, repeat.
fn solve_with(inst: &Instance, extra: Vec<Constraint>, mut cuts: Vec<Vec<usize>>) -> Result<(LpSolution, Simplex)> {
    let model = Model::new(inst);
    let (kind, n) = (inst.kind(), inst.n());
    let mut rows = model.degree_rows(inst);
    rows.extend(extra);
    rows.extend(cuts.iter().map(|s| model.cut_row(kind, n, s)));
    let mut spx = match Simplex::solve(model.cost(inst), rows)? {
        Outcome::Optimal(s) => *s,
        Outcome::Infeasible => return breach("relaxation reported infeasible"),
        Outcome::Unbounded => return breach("relaxation reported unbounded"),
    };
    for round in 0.. {
        if round > ROUND_CAP {
            return breach("separation round cap exceeded");
        }
        let x = model.values(&spx);
        let Some(set) = separation::separate(kind, n, &x)? else {
            let sol = LpSolution::from_values(inst, x, cuts, true)?;
            if sol.objective != spx.objective() {
                return breach("objective mismatch between tableau and solution");
            }
            return Ok((sol, spx));
        };
        log::trace!("round {round}: cut {set:?}");
        if cuts.contains(&set) {
            return breach(format!("recorded cut {set:?} is violated"));
        }
        if !spx.add_constraint(model.cut_row(kind, n, &set))? {
            return breach("relaxation became infeasible after a valid cut");
        }
        cuts.push(set);
    }
    unreachable!()
}

pub fn solve_ser(inst: &Instance) -> Result<LpSolution> {
    Ok(solve_ser_detailed(inst)?.0)
}

/// Like [`solve_ser`] but also returns the final tableau, whose dual values
/// certify optimality.
pub fn solve_ser_detailed(inst: &Instance) -> Result<(LpSolution, Simplex)> {
    solve_with(inst, Vec::new(), Vec::new())
}

/// SER plus the cut `cost · x >= ⌈Opt_SER⌉`. An integral base objective is
/// already optimal for the rounded problem and is returned as is.
pub fn solve_ser_plus(inst: &Instance, base: &LpSolution) -> Result<LpSolution> {
    Ok(solve_ser_plus_detailed(inst, base)?.0)
}

pub fn solve_ser_plus_detailed(inst: &Instance, base: &LpSolution) -> Result<(LpSolution, Option<Simplex>)> {
    if base.kind != inst.kind() || base.n != inst.n() {
        return invalid("base solution does not match the instance");
    }
    if base.objective.is_integer() {
        return Ok((base.clone(), None));
    }
    let model = Model::new(inst);
    let target = Rational::from_integer(rational::ceil(&base.objective));
    let row = Constraint::new(model.cost(inst).into_iter().enumerate().collect(), Sense::Ge, target);
    let (sol, spx) = solve_with(inst, vec![row], base.cuts.clone())?;
    Ok((sol, Some(spx)))
}

/// Result of the unit-cost normalisation.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub instance: Instance,
    pub solution: LpSolution,
    /// Number of auxiliary vertices appended after the original ones.
    pub aux: usize,
}

/// Reroutes the LP mass on cost-2 pairs through `k` new vertices, each
/// joined by unit pairs to every vertex touching a cost-2 support pair.
/// The result has objective `n + k`, equal to its vertex count.
pub fn normalize_unit_cost(inst: &Instance, x: &LpSolution) -> Result<Normalized> {
    let kind = inst.kind();
    let n = inst.n();
    let heavy: Vec<((usize, usize), Rational)> = x
        .values
        .iter()
        .filter(|(&(u, v), _)| inst.cost(u, v) == 2)
        .map(|(&e, q)| (e, q.clone()))
        .collect();
    let mass: Rational = heavy.iter().map(|(_, q)| q.clone()).sum();
    if !mass.is_integer() {
        return invalid(format!(
            "mass {mass} on cost-2 pairs is not integral; the solution is not SER+ optimal"
        ));
    }
    let k = rational::to_i64(&mass).unwrap_or(0) as usize;
    if k == 0 {
        return Ok(Normalized {
            instance: inst.clone(),
            solution: x.clone(),
            aux: 0,
        });
    }
    let mut touched = vec![false; n];
    for ((u, v), _) in &heavy {
        touched[*u] = true;
        touched[*v] = true;
    }
    let n2 = n + k;
    let mut edges = inst.unit_edges();
    for a in n..n2 {
        for v in (0..n).filter(|&v| touched[v]) {
            edges.push(kind.key(v, a));
            if kind == Kind::Asymmetric {
                edges.push((a, v));
            }
        }
    }
    let inst2 = Instance::new(kind, n2, edges)?;

    let mut values: Values = x.values.clone();
    let add = |values: &mut Values, u: usize, v: usize, q: &Rational| {
        *values.entry(kind.key(u, v)).or_insert_with(Rational::zero) += q;
    };
    let mut aux = n;
    let mut room = Rational::one();
    for ((u, v), q) in heavy {
        let mut left = q;
        while !left.is_zero() {
            let piece = if left <= room { left.clone() } else { room.clone() };
            add(&mut values, u, aux, &piece);
            add(&mut values, aux, v, &piece);
            *values.get_mut(&(u, v)).expect("heavy pair present") -= &piece;
            left -= &piece;
            room -= &piece;
            if room.is_zero() {
                aux += 1;
                room = Rational::one();
            }
        }
    }
    values.retain(|_, q| !q.is_zero());
    let sol = LpSolution::from_values(&inst2, values, Vec::new(), false)?;
    if sol.objective != rational::int(n2 as i64) {
        return breach("normalised objective differs from the vertex count");
    }
    if !sol.is_feasible()? {
        return breach("normalised solution violates a subtour constraint");
    }
    Ok(Normalized {
        instance: inst2,
        solution: sol,
        aux: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, half, int};

    pub(crate) fn fig1b() -> Instance {
        Instance::new(
            Kind::Asymmetric,
            5,
            [(0, 1), (1, 3), (3, 2), (2, 0), (0, 3), (3, 0), (1, 4), (4, 1), (2, 4), (4, 2)],
        )
        .unwrap()
    }

    #[test]
    fn complete_unit_k4() {
        let inst = Instance::from_fn(Kind::Symmetric, 4, |_, _| true).unwrap();
        let (sol, spx) = solve_ser_detailed(&inst).unwrap();
        assert_eq!(sol.objective, int(4));
        assert!(spx.certificate_holds());
        assert!(sol.flags.unit_support_cost);
    }

    #[test]
    fn fig1b_value_and_plus() {
        let inst = fig1b();
        let (sol, spx) = solve_ser_detailed(&inst).unwrap();
        assert_eq!(sol.objective, int(5));
        assert!(spx.certificate_holds());
        let plus = solve_ser_plus(&inst, &sol).unwrap();
        assert_eq!(plus, sol);
        let norm = normalize_unit_cost(&inst, &sol).unwrap();
        assert_eq!(norm.aux, 0);
    }

    #[test]
    fn classify_flags() {
        let inst = Instance::from_fn(Kind::Symmetric, 4, |_, _| true).unwrap();
        let third: Values = pairs(Kind::Symmetric, 4).into_iter().map(|e| (e, frac(2, 3))).collect();
        let x = LpSolution::from_values(&inst, third, vec![], false).unwrap();
        assert!(!x.flags.half_integral);
        assert!(x.flags.subcubic_support);
        let inst5 = Instance::from_fn(Kind::Symmetric, 5, |_, _| true).unwrap();
        let half_all: Values = pairs(Kind::Symmetric, 5).into_iter().map(|e| (e, half())).collect();
        let y = LpSolution::from_values(&inst5, half_all, vec![], false).unwrap();
        assert!(y.flags.half_integral);
        assert!(!y.flags.subcubic_support);
        assert!(y.flags.unit_support_cost);
    }

    #[test]
    fn ser_plus_rounds_fractional_objective() {
        // Two unit triangles joined by nothing: SER is 6 with cost-2 mass
        // forced across the cut; fractional optima are rounded up.
        let inst = Instance::new(Kind::Symmetric, 5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let base = solve_ser(&inst).unwrap();
        let plus = solve_ser_plus(&inst, &base).unwrap();
        assert!(plus.objective >= Rational::from_integer(rational::ceil(&base.objective)));
        assert!(plus.objective.is_integer());
    }
}
