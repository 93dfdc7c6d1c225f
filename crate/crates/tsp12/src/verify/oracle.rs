use crate::error::Error;
use crate::{Instance, Result};

/// Largest order accepted by [`exact_opt`].
pub const OPT_LIMIT: usize = 20;
/// Largest order accepted by [`min_components`].
pub const MIN_COMPONENTS_LIMIT: usize = 16;

const INF: u8 = u8::MAX;

/// Minimum tour cost by dynamic programming over (visited set, last vertex)
/// with the tour anchored at vertex 0.
pub fn exact_opt(inst: &Instance) -> Result<u64> {
    let n = inst.n();
    if n > OPT_LIMIT {
        return Err(Error::Resource(format!("exact optimum limited to {OPT_LIMIT} vertices, got {n}")));
    }
    // Vertices 1..n are bit i-1.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let cost: Vec<Vec<u8>> = (0..n)
        .map(|u| (0..n).map(|v| if u == v { 0 } else { inst.cost(u, v) as u8 }).collect())
        .collect();
    let mut dp = vec![INF; (full + 1) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = cost[0][j + 1];
    }
    for mask in 1..=full {
        for j in 0..m {
            let here = dp[mask * m + j];
            if here == INF || mask >> j & 1 == 0 {
                continue;
            }
            let row = &cost[j + 1];
            let mut rest = full & !mask;
            while rest != 0 {
                let l = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let slot = &mut dp[(mask | 1 << l) * m + l];
                let cand = here + row[l + 1];
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
    }
    let best = (0..m)
        .map(|j| dp[full * m + j] as u64 + cost[j + 1][0] as u64)
        .min()
        .expect("n >= 3");
    Ok(best)
}

/// `ends[mask]` has bit `v` set when a unit-cost path visits exactly `mask`
/// and ends at `v`.
fn unit_path_ends(inst: &Instance) -> Vec<u32> {
    let n = inst.n();
    let mut ends = vec![0u32; 1 << n];
    for v in 0..n {
        ends[1 << v] |= 1 << v;
    }
    for mask in 1usize..1 << n {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        for v in (0..n).filter(|v| e >> v & 1 == 1) {
            for w in (0..n).filter(|w| mask >> w & 1 == 0) {
                if inst.is_unit(v, w) {
                    ends[mask | 1 << w] |= 1 << w;
                }
            }
        }
    }
    ends
}

fn check_small(inst: &Instance) -> Result<()> {
    if inst.n() > MIN_COMPONENTS_LIMIT {
        return Err(Error::Resource(format!(
            "component oracle limited to {MIN_COMPONENTS_LIMIT} vertices, got {}",
            inst.n()
        )));
    }
    Ok(())
}

/// Fewest components of a spanning 2-matching of the unit-cost graph.
/// A cycle can always be opened into a path, so this is the minimum
/// path cover of the unit graph.
pub fn min_components(inst: &Instance) -> Result<usize> {
    check_small(inst)?;
    let n = inst.n();
    let ends = unit_path_ends(inst);
    let full = (1usize << n) - 1;
    let mut best = vec![u8::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Every subset of `mask` containing its lowest vertex.
        let mut sub = rest;
        loop {
            let part = sub | low;
            if ends[part] != 0 && best[mask ^ part] != u8::MAX {
                let cand = best[mask ^ part] + 1;
                if cand < best[mask] {
                    best[mask] = cand;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(best[full] as usize)
}

/// Whether the unit-cost graph has a Hamiltonian cycle.
pub fn unit_hamiltonian_cycle(inst: &Instance) -> Result<bool> {
    check_small(inst)?;
    let n = inst.n();
    // Paths from vertex 0 only.
    let mut ends = vec![0u32; 1 << n];
    ends[1] = 1;
    for mask in (1usize..1 << n).filter(|m| m & 1 == 1) {
        let e = ends[mask];
        for v in (0..n).filter(|v| e >> v & 1 == 1) {
            for w in (0..n).filter(|w| mask >> w & 1 == 0) {
                if inst.is_unit(v, w) {
                    ends[mask | 1 << w] |= 1 << w;
                }
            }
        }
    }
    let e = ends[(1 << n) - 1];
    Ok((1..n).any(|v| e >> v & 1 == 1 && inst.is_unit(v, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{gen, Kind, Tour};
    use crate::instance::tour_cost;

    /// Brute force over all permutations fixing vertex 0.
    fn brute_opt(inst: &Instance) -> u64 {
        fn rec(inst: &Instance, order: &mut Vec<usize>, used: &mut [bool], best: &mut u64) {
            let n = inst.n();
            if order.len() == n {
                let c = tour_cost(inst, &Tour::new(order.clone()).unwrap()).unwrap();
                *best = (*best).min(c);
                return;
            }
            for v in 1..n {
                if !used[v] {
                    used[v] = true;
                    order.push(v);
                    rec(inst, order, used, best);
                    order.pop();
                    used[v] = false;
                }
            }
        }
        let mut best = u64::MAX;
        let mut used = vec![false; inst.n()];
        used[0] = true;
        rec(inst, &mut vec![0], &mut used, &mut best);
        best
    }

    #[test]
    fn fixed_values() {
        assert_eq!(exact_opt(&gen::fig1b()).unwrap(), 6);
        assert_eq!(exact_opt(&gen::fig1a()).unwrap(), 10);
        assert_eq!(exact_opt(&Instance::empty(Kind::Symmetric, 4).unwrap()).unwrap(), 8);
        let big = Instance::empty(Kind::Symmetric, 21).unwrap();
        assert!(matches!(exact_opt(&big), Err(Error::Resource(_))));
    }

    #[test]
    fn matches_brute_force() {
        let mut r = gen::rng(3);
        for i in 0..30 {
            let kind = if i % 2 == 0 { Kind::Symmetric } else { Kind::Asymmetric };
            let inst = gen::random_instance(kind, 3 + i % 6, 0.4, &mut r);
            assert_eq!(exact_opt(&inst).unwrap(), brute_opt(&inst));
        }
    }

    #[test]
    fn components_of_simple_graphs() {
        let cyc = Instance::new(Kind::Symmetric, 5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(min_components(&cyc).unwrap(), 1);
        assert!(unit_hamiltonian_cycle(&cyc).unwrap());
        let none = Instance::empty(Kind::Asymmetric, 6).unwrap();
        assert_eq!(min_components(&none).unwrap(), 6);
        assert!(!unit_hamiltonian_cycle(&none).unwrap());
        // A unit Hamiltonian path but no unit Hamiltonian cycle.
        assert_eq!(min_components(&gen::fig1a()).unwrap(), 1);
        assert!(!unit_hamiltonian_cycle(&gen::fig1a()).unwrap());
    }
}
