//! Gap-preserving constructions.

use num_traits::{One, Zero};

use crate::error::{breach, invalid, Error};
use crate::lp::separation::Values;
use crate::lp::LpSolution;
use crate::rational::{int, Rational};
use crate::verify::exact_opt;
use crate::{Instance, Kind, Result};

/// Largest order for which the path-pair condition is checked exhaustively.
pub const PATH_PAIR_LIMIT: usize = 12;

/// An instance with a feasible solution of the relaxation.
#[derive(Clone, Debug)]
pub struct Amplified {
    pub instance: Instance,
    pub solution: LpSolution,
}

fn check(inst: &Instance, x: &LpSolution) -> Result<()> {
    if x.n != inst.n() || x.kind != inst.kind() {
        return invalid("solution does not match the instance");
    }
    Ok(())
}

/// Same instance with every pair outside the support made cost 2.
fn support_only(inst: &Instance, x: &LpSolution) -> Instance {
    Instance::from_fn(inst.kind(), inst.n(), |u, v| {
        inst.is_unit(u, v) && x.values.contains_key(&inst.kind().key(u, v))
    })
    .expect("same order")
}

fn finish(instance: Instance, values: Values, is_vertex: bool) -> Result<Amplified> {
    let mut values = values;
    values.retain(|_, q| !q.is_zero());
    let solution = LpSolution::from_values(&instance, values, Vec::new(), is_vertex)?;
    if !solution.is_feasible()? {
        return breach("constructed solution violates the relaxation");
    }
    Ok(Amplified { instance, solution })
}

/// Replaces the first unit-cost 1-edge `{u, w}` by a path `u, v, w` through
/// a new vertex `v`. The new solution moves the unit value onto the path.
pub fn subdivide(inst: &Instance, x: &LpSolution) -> Result<Amplified> {
    check(inst, x)?;
    if inst.kind() != Kind::Symmetric {
        return invalid("subdivision is defined for symmetric instances");
    }
    let base = support_only(inst, x);
    let Some((u, w)) = x.one_edges().into_iter().find(|&(a, b)| base.is_unit(a, b)) else {
        return invalid("the solution has no unit-cost 1-edge; it is not a vertex solution");
    };
    let n = inst.n();
    let v = n;
    let mut edges: Vec<(usize, usize)> = base.unit_edges().into_iter().filter(|&e| e != (u, w)).collect();
    edges.push((u, v));
    edges.push((w, v));
    let inst2 = Instance::new(Kind::Symmetric, n + 1, edges)?;
    let mut values = x.values.clone();
    values.remove(&(u, w));
    values.insert((u, v), Rational::one());
    values.insert((w, v), Rational::one());
    finish(inst2, values, x.is_vertex)
}

/// The two support neighbours of `v`, smaller first.
fn two_neighbours(x: &LpSolution, v: usize) -> Result<(usize, usize)> {
    if v >= x.n {
        return invalid(format!("vertex {v} out of range"));
    }
    let sup = x.support();
    match sup.nbrs[v][..] {
        [s, t] => Ok((s, t)),
        _ => invalid(format!("vertex {v} has {} support neighbours, need 2", sup.nbrs[v].len())),
    }
}

/// Joins two copies of the instance at `v` by crossing the pairs at its
/// neighbour `s`. Copy one keeps ids `0..n`, copy two uses `n..2n`.
pub fn double_sym(inst: &Instance, x: &LpSolution, v: usize) -> Result<Amplified> {
    check(inst, x)?;
    if inst.kind() != Kind::Symmetric {
        return invalid("symmetric doubling needs a symmetric instance");
    }
    let (s, t) = two_neighbours(x, v)?;
    let n = inst.n();
    let base = support_only(inst, x);
    let unit = |a: usize, b: usize| base.is_unit(a, b) || (a == v && (b == s || b == t)) || (b == v && (a == s || a == t));
    let mut edges = Vec::new();
    for (a, b) in crate::instance::pairs(Kind::Symmetric, n) {
        if unit(a, b) && (a, b) != (s.min(v), s.max(v)) {
            edges.push((a, b));
            edges.push((a + n, b + n));
        }
    }
    edges.push((v.min(s + n), v.max(s + n)));
    edges.push((s.min(v + n), s.max(v + n)));
    let inst2 = Instance::new(Kind::Symmetric, 2 * n, edges)?;
    let mut values = Values::new();
    for (&(a, b), q) in &x.values {
        if (a, b) == (s.min(v), s.max(v)) {
            continue;
        }
        values.insert((a, b), q.clone());
        values.insert((a + n, b + n), q.clone());
    }
    values.insert((v.min(s + n), v.max(s + n)), Rational::one());
    values.insert((s.min(v + n), s.max(v + n)), Rational::one());
    finish(inst2, values, false)
}

/// Minimum cost of a path starting (or ending, with `reverse`) at `v`
/// that covers exactly `mask`, for every mask containing `v`.
fn rooted_path_costs(inst: &Instance, v: usize, reverse: bool) -> Vec<u32> {
    let n = inst.n();
    let cost = |a: usize, b: usize| if reverse { inst.cost(b, a) } else { inst.cost(a, b) };
    let full = 1usize << n;
    let mut dp = vec![u32::MAX; full * n];
    dp[(1 << v) * n + v] = 0;
    for mask in 0..full {
        if mask >> v & 1 == 0 {
            continue;
        }
        for e in 0..n {
            let here = dp[mask * n + e];
            if here == u32::MAX {
                continue;
            }
            for w in (0..n).filter(|w| mask >> w & 1 == 0) {
                let slot = &mut dp[(mask | 1 << w) * n + w];
                *slot = (*slot).min(here + cost(e, w));
            }
        }
    }
    (0..full)
        .map(|mask| (0..n).map(|e| dp[mask * n + e]).min().unwrap_or(u32::MAX))
        .collect()
}

/// Smallest `cost(P1) + cost(P2)` over two paths meeting only at `v`,
/// covering every vertex, and both starting (or both ending) at `v`.
pub fn min_path_pair(inst: &Instance, v: usize) -> Result<u32> {
    let n = inst.n();
    if n > PATH_PAIR_LIMIT {
        return Err(Error::Resource(format!("path-pair search limited to {PATH_PAIR_LIMIT} vertices")));
    }
    let full = (1usize << n) - 1;
    let mut best = u32::MAX;
    for reverse in [false, true] {
        let costs = rooted_path_costs(inst, v, reverse);
        for mask in (0..=full).filter(|m| m >> v & 1 == 1) {
            let other = (full & !mask) | 1 << v;
            if mask > other {
                continue;
            }
            let (a, b) = (costs[mask], costs[other]);
            if a != u32::MAX && b != u32::MAX {
                best = best.min(a + b);
            }
        }
    }
    Ok(best)
}

/// Directed doubling at `v`. `trust` skips the path-pair condition, which
/// is otherwise checked exhaustively and needs a small instance.
pub fn double_asym(inst: &Instance, x: &LpSolution, v: usize, trust: bool) -> Result<Amplified> {
    check(inst, x)?;
    if inst.kind() != Kind::Asymmetric {
        return invalid("directed doubling needs an asymmetric instance");
    }
    let (s, _t) = two_neighbours(x, v)?;
    let n = inst.n();
    let base = support_only(inst, x);
    if !trust {
        if n > PATH_PAIR_LIMIT {
            return invalid(format!("path-pair condition unchecked above {PATH_PAIR_LIMIT} vertices; pass trust"));
        }
        let opt = exact_opt(&base)?;
        let pair = min_path_pair(&base, v)? as u64;
        if pair + 2 < opt {
            return invalid(format!("path pair of cost {pair} at vertex {v} is below Opt - 2 = {}", opt - 2));
        }
    }
    let touched = |a: usize, b: usize| (a, b) == (v, s) || (a, b) == (s, v);
    let mut edges = Vec::new();
    for (a, b) in base.unit_edges() {
        if !touched(a, b) {
            edges.push((a, b));
            edges.push((a + n, b + n));
        }
    }
    let (s1, v1, s2, v2) = (s, v, s + n, v + n);
    let rewired = [
        ((s1, v2), base.is_unit(s, v)),
        ((v2, s1), base.is_unit(v, s)),
        ((s2, v1), base.is_unit(s, v)),
        ((v1, s2), base.is_unit(v, s)),
    ];
    edges.extend(rewired.iter().filter(|(_, u)| *u).map(|(e, _)| *e));
    let inst2 = Instance::new(Kind::Asymmetric, 2 * n, edges)?;
    let mut values = Values::new();
    for (&(a, b), q) in &x.values {
        if !touched(a, b) {
            values.insert((a, b), q.clone());
            values.insert((a + n, b + n), q.clone());
        }
    }
    let a = x.value(v, s);
    let back = x.value(s, v);
    values.insert((v1, s2), a.clone());
    values.insert((v2, s1), a);
    values.insert((s1, v2), back.clone());
    values.insert((s2, v1), back);
    finish(inst2, values, false)
}

/// `alpha' + (alpha' - 1) / (c + gamma)`.
pub fn convergence_bound(alpha: &Rational, c: u64, gamma: &Rational) -> Result<Rational> {
    if *alpha < Rational::one() {
        return invalid("alpha' must be at least 1");
    }
    if c < 1 {
        return invalid("c must be at least 1");
    }
    if *gamma < Rational::zero() {
        return invalid("gamma must be non-negative");
    }
    Ok(alpha.clone() + (alpha.clone() - Rational::one()) / (int(c as i64) + gamma.clone()))
}

/// Subdivides, then doubles at the new vertex, `k` times.
pub fn iterate(inst: &Instance, x: &LpSolution, k: usize) -> Result<Amplified> {
    let mut cur = Amplified {
        instance: inst.clone(),
        solution: x.clone(),
    };
    for _ in 0..k {
        let sub = subdivide(&cur.instance, &cur.solution)?;
        let v = sub.instance.n() - 1;
        cur = double_sym(&sub.instance, &sub.solution, v)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::lp::solve_ser;
    use crate::rational::{frac, to_f64};

    #[test]
    fn beta_values() {
        assert_eq!(convergence_bound(&frac(7, 6), 13, &frac(1, 2)).unwrap(), frac(191, 162));
        let b = convergence_bound(&frac(26, 21), 13, &int(0)).unwrap();
        assert_eq!(b, frac(343, 273));
        assert!((to_f64(&b) - 1.2564).abs() < 5e-4);
        assert_eq!(convergence_bound(&frac(5, 4), 13, &int(0)).unwrap(), frac(33, 26));
        assert_eq!(convergence_bound(&int(1), 4, &int(3)).unwrap(), int(1));
        assert!(convergence_bound(&frac(1, 2), 4, &int(0)).is_err());
    }

    #[test]
    fn subdivide_fig1a() {
        let inst = gen::fig1a();
        let x = solve_ser(&inst).unwrap();
        let out = subdivide(&inst, &x).unwrap();
        assert_eq!(out.instance.n(), 10);
        assert_eq!(out.solution.objective, int(10));
        assert!(!out.instance.is_unit(0, 3));
        assert_eq!(solve_ser(&out.instance).unwrap().objective, int(10));
    }

    #[test]
    fn subdivide_needs_a_one_edge() {
        let inst = gen::fig1b();
        let x = solve_ser(&inst).unwrap();
        assert!(subdivide(&inst, &x).is_err());
        let sym = Instance::from_fn(Kind::Symmetric, 4, |_, _| true).unwrap();
        let mut vals = Values::new();
        for (u, v) in sym.pairs() {
            vals.insert((u, v), frac(2, 3));
        }
        let x = LpSolution::from_values(&sym, vals, Vec::new(), false).unwrap();
        assert!(subdivide(&sym, &x).is_err());
    }

    #[test]
    fn double_sym_rejects_degree_three() {
        let inst = gen::fig1a();
        let x = solve_ser(&inst).unwrap();
        assert!(double_sym(&inst, &x, 0).is_err());
    }

    #[test]
    fn double_asym_fig1b() {
        let inst = gen::fig1b();
        let x = solve_ser(&inst).unwrap();
        let out = double_asym(&inst, &x, 4, false).unwrap();
        assert_eq!(out.instance.n(), 10);
        assert_eq!(out.solution.objective, int(10));
        assert_eq!(solve_ser(&out.instance).unwrap().objective, int(10));
        assert_eq!(exact_opt(&out.instance).unwrap(), 12);
    }
}
