//! Singleton removal by growing a tree of start-alternating paths.
//!
//! The directed procedure is the core. Undirected matchings are oriented,
//! run through the core on the bidirected support, and converted back.

use std::collections::BTreeSet;

use super::directed::{basic_improvements, DirStructure, DirectedTwoMatching};
use super::undirected::{Structure, TwoMatching};
use crate::error::{breach, Result};
use crate::lp::SupportGraph;

type Arc = (usize, usize);

/// Arc changes produced by the tree growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Growth {
    pub remove: Vec<Arc>,
    pub add: Vec<Arc>,
    /// For undirected use: `(a, b)` means "remove arc `b` instead of `a`".
    pub alt: Option<(Arc, Arc)>,
}

impl Growth {
    fn apply(&self, m: &DirectedTwoMatching) -> Option<DirectedTwoMatching> {
        let mut next = m.clone();
        for &(u, v) in &self.remove {
            if !next.remove(u, v) {
                return None;
            }
        }
        for &(u, v) in &self.add {
            if !next.add(u, v) {
                return None;
            }
        }
        Some(next)
    }
}

fn tree_path(via: &[Option<Arc>], s: usize) -> (Vec<Arc>, Vec<Arc>) {
    let (mut forward, mut backward) = (Vec::new(), Vec::new());
    let mut cur = s;
    while let Some((u, w)) = via[cur] {
        backward.push((cur, w));
        forward.push((u, w));
        cur = u;
    }
    (forward, backward)
}

/// Grows `S` from the singleton `v` until an improving move appears.
/// Assumes no basic improvement exists; a stall is reported as a breach.
pub(crate) fn grow(m: &DirectedTwoMatching, out: &[Vec<usize>], v: usize) -> Result<Growth> {
    let n = m.n();
    if m.succ(v).is_some() || m.pred(v).is_some() {
        return breach(format!("vertex {v} is not a singleton"));
    }
    let st = DirStructure::new(m);
    let mut in_s = vec![false; n];
    let mut start_in_s = vec![false; n];
    let mut via: Vec<Option<Arc>> = vec![None; n];
    in_s[v] = true;
    start_in_s[v] = true;
    loop {
        let arc = (0..n)
            .filter(|&u| start_in_s[u])
            .flat_map(|u| out[u].iter().map(move |&w| (u, w)))
            .find(|&(u, w)| !in_s[w] && !m.has(u, w));
        let Some((u, w)) = arc else {
            return breach(format!("singleton growth from {v} stalled"));
        };
        let (mut add, remove) = tree_path(&via, u);
        if st.is_start(m, w) {
            let mut remove = remove;
            if st.on_cycle(w) {
                remove.push((m.pred(w).expect("cycle vertex has a predecessor"), w));
            }
            add.push((u, w));
            return Ok(Growth { remove, add, alt: None });
        }
        let p = m.pred(w).expect("non-start vertex has a predecessor");
        if m.pred(p).is_some() {
            let mut remove = remove;
            remove.push((p, w));
            add.push((u, w));
            let alt = m
                .succ(w)
                .filter(|&q| m.succ(q).is_some())
                .map(|q| ((p, w), (w, q)));
            return Ok(Growth { remove, add, alt });
        }
        in_s[w] = true;
        in_s[p] = true;
        start_in_s[p] = true;
        via[p] = Some((u, w));
        if let Some(&s2) = out[p].iter().find(|&&s2| s2 != p && start_in_s[s2]) {
            let (mut add, remove) = tree_path(&via, p);
            add.push((p, s2));
            return Ok(Growth { remove, add, alt: None });
        }
    }
}

/// One directed singleton-removal step: a basic improvement if one exists,
/// otherwise the tree growth from the smallest singleton.
pub(crate) fn directed_step(m: &DirectedTwoMatching, out: &[Vec<usize>]) -> Result<Option<DirectedTwoMatching>> {
    let before = m.potential();
    if let Some(next) = basic_improvements(m, out, false)
        .into_iter()
        .find(|c| c.potential().improves_on(&before))
    {
        return Ok(Some(next));
    }
    let Some(&v) = m.singletons().first() else {
        return Ok(None);
    };
    let growth = grow(m, out, v)?;
    match growth.apply(m) {
        Some(next) if next.potential().improves_on(&before) => Ok(Some(next)),
        _ => breach(format!("singleton growth from {v} produced no improvement")),
    }
}

/// Removes singletons from a directed 2-matching until none remain.
pub fn remove_singletons_directed(m: &DirectedTwoMatching, out: &[Vec<usize>]) -> Result<DirectedTwoMatching> {
    if m.singletons().is_empty() {
        return crate::error::invalid("matching has no singleton component");
    }
    let mut cur = m.clone();
    while !cur.singletons().is_empty() {
        match directed_step(&cur, out)? {
            Some(next) => cur = next,
            None => return breach("no singleton move found"),
        }
    }
    Ok(cur)
}

/// Cycle edges at `v`, non-1-edges first.
pub(crate) fn cycle_edge_options(m: &TwoMatching, sup: &SupportGraph, v: usize) -> Vec<(usize, usize)> {
    let mut opts: Vec<(usize, usize)> = m.neighbors(v).iter().map(|&w| (v, w)).collect();
    opts.sort_by_key(|&(a, b)| (sup.is_one(a, b), b));
    opts
}

/// Undirected basic improvements: a support edge between two end vertices
/// not on one common cycle, with cycle edges opened as needed.
pub(crate) fn undirected_basic(m: &TwoMatching, st: &Structure, sup: &SupportGraph) -> Vec<TwoMatching> {
    let mut found = Vec::new();
    for a in 0..m.n() {
        if !st.is_end(a) {
            continue;
        }
        for &b in sup.nbrs[a].iter().filter(|&&b| b > a) {
            if m.has(a, b) || !st.is_end(b) || st.same_cycle(a, b) {
                continue;
            }
            let opts_a = if st.on_cycle(a) { cycle_edge_options(m, sup, a) } else { vec![] };
            let opts_b = if st.on_cycle(b) { cycle_edge_options(m, sup, b) } else { vec![] };
            for ra in option_iter(&opts_a) {
                for rb in option_iter(&opts_b) {
                    let mut next = m.clone();
                    if let Some((x, y)) = ra {
                        next.remove(x, y);
                    }
                    if let Some((x, y)) = rb {
                        next.remove(x, y);
                    }
                    if next.add(a, b) {
                        found.push(next);
                    }
                }
            }
        }
    }
    found
}

fn option_iter(opts: &[(usize, usize)]) -> Vec<Option<(usize, usize)>> {
    if opts.is_empty() {
        vec![None]
    } else {
        opts.iter().copied().map(Some).collect()
    }
}

/// Orients paths so the first edge is not a 1-edge where possible.
fn orient(m: &TwoMatching, sup: &SupportGraph) -> DirectedTwoMatching {
    let mut d = DirectedTwoMatching::new(m.n());
    for comp in m.components() {
        let mut vs = comp.vertices.clone();
        let k = vs.len();
        if !comp.cycle && k >= 3 && sup.is_one(vs[0], vs[1]) && !sup.is_one(vs[k - 2], vs[k - 1]) {
            vs.reverse();
        }
        for w in vs.windows(2) {
            d.add(w[0], w[1]);
        }
        if comp.cycle {
            d.add(vs[k - 1], vs[0]);
        }
    }
    d
}

fn undirect(n: usize, d: &DirectedTwoMatching) -> Option<TwoMatching> {
    let edges: BTreeSet<(usize, usize)> = d.arcs().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
    TwoMatching::from_edges(n, edges).ok()
}

/// Candidate matchings for removing a singleton of an undirected matching,
/// in preference order: basic improvements first, then the bidirected tree
/// growth (with its alternative removal when the default one hits a 1-edge).
pub(crate) fn undirected_candidates(m: &TwoMatching, st: &Structure, sup: &SupportGraph) -> Result<Vec<TwoMatching>> {
    let mut out = undirected_basic(m, st, sup);
    let Some(v) = (0..m.n()).find(|&v| m.degree(v) == 0) else {
        return Ok(out);
    };
    let d = orient(m, sup);
    let growth = match grow(&d, &sup.nbrs, v) {
        Ok(g) => g,
        Err(e) => {
            log::debug!("undirected singleton growth: {e}");
            return Ok(out);
        }
    };
    let default = growth.apply(&d).and_then(|x| undirect(m.n(), &x));
    let mut alternative = None;
    if let Some((instead, other)) = growth.alt {
        // Dropping the successor edge instead leaves `w` with both path
        // neighbours, which is only meaningful once orientation is gone.
        let mut alt = m.clone();
        let removes = growth.remove.iter().map(|&a| if a == instead { other } else { a });
        let ok = removes.into_iter().all(|(a, b)| alt.remove(a, b)) && growth.add.iter().all(|&(a, b)| alt.add(a, b));
        if ok {
            alternative = Some((alt, sup.is_one(instead.0, instead.1)));
        }
    }
    match alternative {
        Some((alt, true)) => out.extend([Some(alt), default].into_iter().flatten()),
        Some((alt, false)) => out.extend([default, Some(alt)].into_iter().flatten()),
        None => out.extend(default),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_joins_a_path_through_an_inner_arc() {
        // Path 0 -> 1 -> 2 -> 3, singleton 4 with arc 4 -> 2 and 1 -> 4.
        let m = DirectedTwoMatching::from_arcs(5, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut out = vec![Vec::new(); 5];
        out[4] = vec![2];
        out[1] = vec![4];
        let g = grow(&m, &out, 4).unwrap();
        assert_eq!(g.remove, vec![(1, 2)]);
        assert_eq!(g.add, vec![(4, 2)]);
        let next = g.apply(&m).unwrap();
        assert!(next.singletons().is_empty());
        assert_eq!(next.potential().components, 2);
    }

    #[test]
    fn stall_is_reported() {
        let m = DirectedTwoMatching::from_arcs(3, [(0, 1)]).unwrap();
        let out = vec![Vec::new(); 3];
        assert!(grow(&m, &out, 2).is_err());
    }
}
