//! Subtour-cut separation with exact integer arithmetic.
//!
//! LP values are scaled by their common denominator `D`, so a symmetric cut
//! is violated when its integer weight is below `2D` and an asymmetric one
//! when it is below `D`.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{ToPrimitive, Zero};

use crate::error::{breach, invalid, Result};
use crate::instance::Kind;
use crate::rational::{self, Rational};

/// Largest `n` for which the symmetric case enumerates all cuts.
pub const EXHAUSTIVE_LIMIT: usize = 18;

pub type Values = BTreeMap<(usize, usize), Rational>;

/// Integer weight matrix `w[u][v] = D * x_uv` plus the scale `D`.
pub struct Scaled {
    pub den: i128,
    pub w: Vec<Vec<i128>>,
}

pub fn scale(kind: Kind, n: usize, x: &Values) -> Result<Scaled> {
    let d = rational::common_denominator(x.values());
    let Some(den) = d.to_i128() else {
        return breach("common denominator exceeds 128 bits");
    };
    let mut w = vec![vec![0i128; n]; n];
    for (&(u, v), q) in x {
        if u >= n || v >= n || u == v {
            return invalid(format!("bad pair {u} {v}"));
        }
        let Some(s) = rational::scale_to_int(q, &d).to_i128() else {
            return breach("scaled weight exceeds 128 bits");
        };
        w[u][v] += s;
        if kind == Kind::Symmetric {
            w[v][u] += s;
        }
    }
    Ok(Scaled { den, w })
}

pub fn check_degrees(kind: Kind, n: usize, sc: &Scaled) -> Result<()> {
    for v in 0..n {
        let out: i128 = sc.w[v].iter().sum();
        let inn: i128 = (0..n).map(|u| sc.w[u][v]).sum();
        let ok = match kind {
            Kind::Symmetric => out == 2 * sc.den,
            Kind::Asymmetric => out == sc.den && inn == sc.den,
        };
        if !ok {
            return invalid(format!("degree equality fails at vertex {v}"));
        }
    }
    Ok(())
}

/// Returns a vertex set whose subtour constraint `x` violates, or `None`.
///
/// Symmetric: `x(δ(S)) < 2` for the returned `S`. Asymmetric:
/// `x(δ⁻(S)) < 1`. Among violated sets the most violated one found is
/// returned.
pub fn separate(kind: Kind, n: usize, x: &Values) -> Result<Option<Vec<usize>>> {
    let sc = scale(kind, n, x)?;
    check_degrees(kind, n, &sc)?;
    Ok(match kind {
        Kind::Symmetric => {
            let (value, set) = if n <= EXHAUSTIVE_LIMIT {
                gray_min_cut(n, &sc.w)
            } else {
                stoer_wagner(n, &sc.w)
            };
            (value < 2 * sc.den).then_some(set)
        }
        Kind::Asymmetric => directed_min_cut(n, &sc.w).and_then(|(value, set)| (value < sc.den).then_some(set)),
    })
}

/// Global minimum cut by Gray-code enumeration of all sets avoiding vertex 0.
pub fn gray_min_cut(n: usize, w: &[Vec<i128>]) -> (i128, Vec<usize>) {
    let m = n - 1;
    let deg: Vec<i128> = (0..n).map(|v| w[v].iter().sum()).collect();
    // to_set[v] = weight from v into the current set
    let mut to_set = vec![0i128; n];
    let mut in_set = vec![false; n];
    let mut cut = 0i128;
    let mut best = (i128::MAX, 0u64);
    let mut mask = 0u64;
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        let v = bit + 1;
        if in_set[v] {
            in_set[v] = false;
            cut -= deg[v] - 2 * to_set[v];
        } else {
            cut += deg[v] - 2 * to_set[v];
            in_set[v] = true;
        }
        let sign = if in_set[v] { 1 } else { -1 };
        for u in 0..n {
            to_set[u] += sign * w[u][v];
        }
        mask ^= 1 << bit;
        if cut < best.0 {
            best = (cut, mask);
        }
    }
    let set = (0..m).filter(|b| best.1 >> b & 1 == 1).map(|b| b + 1).collect();
    (best.0, set)
}

/// Stoer–Wagner global minimum cut on a symmetric integer weight matrix.
pub fn stoer_wagner(n: usize, w: &[Vec<i128>]) -> (i128, Vec<usize>) {
    let mut w: Vec<Vec<i128>> = w.to_vec();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = (i128::MAX, Vec::new());
    while active.len() > 1 {
        let mut added = vec![false; n];
        let mut conn = vec![0i128; n];
        let mut order = Vec::with_capacity(active.len());
        for _ in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&v| !added[v])
                .max_by(|&&a, &&b| conn[a].cmp(&conn[b]).then(b.cmp(&a)))
                .expect("unadded vertex");
            added[next] = true;
            order.push(next);
            for &v in &active {
                conn[v] += w[next][v];
            }
        }
        let last = order[order.len() - 1];
        let prev = order[order.len() - 2];
        if conn[last] < best.0 {
            let mut set = groups[last].clone();
            set.sort_unstable();
            best = (conn[last], set);
        }
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        active.retain(|&v| v != last);
    }
    best
}

/// Minimum over `t` of the `0 → t` and `t → 0` minimum cuts. Returns the
/// value and a set `S` with `x(δ⁻(S))` equal to it.
pub fn directed_min_cut(n: usize, w: &[Vec<i128>]) -> Option<(i128, Vec<usize>)> {
    let mut best: Option<(i128, Vec<usize>)> = None;
    for t in 1..n {
        for (s, sink) in [(0, t), (t, 0)] {
            let (value, source_side) = max_flow(n, w, s, sink);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                let set = (0..n).filter(|&v| !source_side[v]).collect();
                best = Some((value, set));
            }
        }
    }
    best
}

/// Edmonds–Karp; returns the flow value and the source side of a min cut.
pub fn max_flow(n: usize, cap: &[Vec<i128>], s: usize, t: usize) -> (i128, Vec<bool>) {
    let mut res: Vec<Vec<i128>> = cap.to_vec();
    let mut flow = 0i128;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if parent[v] == usize::MAX && res[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            let side = parent.iter().map(|&p| p != usize::MAX).collect();
            return (flow, side);
        }
        let mut bottleneck = i128::MAX;
        let mut v = t;
        while v != s {
            let u = parent[v];
            bottleneck = bottleneck.min(res[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            res[u][v] -= bottleneck;
            res[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}

/// Value of the subtour constraint's left-hand side at `set`:
/// `x(δ(S))` (symmetric) or `x(δ⁻(S))` (asymmetric).
pub fn cut_value(kind: Kind, x: &Values, set: &[usize], n: usize) -> Rational {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    x.iter()
        .filter(|(&(u, v), _)| match kind {
            Kind::Symmetric => inside[u] != inside[v],
            Kind::Asymmetric => !inside[u] && inside[v],
        })
        .map(|(_, q)| q.clone())
        .sum()
}

/// Brute-force oracle: the minimum constraint left-hand side over all
/// nonempty proper subsets. Intended for small `n` in tests.
pub fn exhaustive_min(kind: Kind, n: usize, x: &Values) -> (Rational, Vec<usize>) {
    assert!(n <= 20, "exhaustive enumeration is capped at 20 vertices");
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for mask in 1u32..((1u32 << n) - 1) {
        let set: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        let value = cut_value(kind, x, &set, n);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, set));
        }
    }
    best.unwrap_or_else(|| (Rational::zero(), Vec::new()))
}
