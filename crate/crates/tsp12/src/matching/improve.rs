//! Improvement search over a 2-matching in the LP support.

use super::altpath::{self, AltPath};
use super::singleton::{cycle_edge_options, undirected_basic, undirected_candidates};
use super::undirected::{Structure, TwoMatching};
use crate::error::breach;
use crate::lp::SupportGraph;
use crate::Result;

/// Longest alternating path considered (length below 7).
pub const MAX_LEN: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImproveOptions {
    /// Length-3 paths from a 3-cycle vertex to a path end.
    pub special_three_cycle: bool,
    /// Reject candidates that leave a path end of support degree below 3,
    /// provided the input satisfied that property.
    pub enforce_end_degree: bool,
}

/// An accepted improvement with the rule that produced it.
#[derive(Clone, Debug)]
pub struct Improvement {
    pub matching: TwoMatching,
    pub rule: &'static str,
    pub witness: Vec<usize>,
}

struct Ctx<'a> {
    m: &'a TwoMatching,
    st: Structure,
    sup: &'a SupportGraph,
    opts: ImproveOptions,
    base_ok: bool,
}

impl Ctx<'_> {
    fn accepts(&self, c: &TwoMatching) -> bool {
        c.potential().improves_on(&self.m.potential())
            && (!self.opts.enforce_end_degree || !self.base_ok || c.ends_have_degree_three(self.sup))
    }

    fn pick(&self, cands: Vec<TwoMatching>) -> Option<TwoMatching> {
        cands.into_iter().find(|c| self.accepts(c))
    }

    fn apply(&self, q: &AltPath) -> Vec<TwoMatching> {
        altpath::apply(self.m, &self.st, self.sup, q)
    }
}

fn found(matching: TwoMatching, rule: &'static str, witness: &[usize]) -> Result<Option<Improvement>> {
    Ok(Some(Improvement {
        matching,
        rule,
        witness: witness.to_vec(),
    }))
}

/// Searches for the first applicable improvement in rule order: singleton
/// removal, then the alternating-path rules. `None` means `m` is a fixpoint.
pub fn find_improvement(m: &TwoMatching, sup: &SupportGraph, opts: ImproveOptions) -> Result<Option<Improvement>> {
    let st = Structure::new(m);
    let paths = altpath::enumerate(m, &st, sup, MAX_LEN);
    find_with_paths(m, sup, opts, st, &paths)
}

pub(crate) fn find_with_paths(
    m: &TwoMatching,
    sup: &SupportGraph,
    opts: ImproveOptions,
    st: Structure,
    paths: &[AltPath],
) -> Result<Option<Improvement>> {
    let ctx = Ctx {
        m,
        st,
        sup,
        opts,
        base_ok: m.ends_have_degree_three(sup),
    };
    let st = &ctx.st;

    if m.has_singleton() {
        if let Some(c) = ctx.pick(undirected_candidates(m, st, sup)?) {
            return found(c, "lemma3", &[]);
        }
    }

    let open = || paths.iter().filter(|q| !q.closed);
    let both_path_ends = |q: &AltPath| st.is_path_end(q.s()) && st.is_path_end(q.t());

    // (a) a single connecting edge
    for q in open().filter(|q| q.len() == 1) {
        if let Some(c) = ctx.pick(ctx.apply(q)) {
            return found(c, "lemma4a", &q.verts);
        }
    }
    // (b) ends of two different paths, length below 5
    for q in open().filter(|q| q.len() <= 3 && both_path_ends(q) && !st.same_comp(q.s(), q.t())) {
        if let Some(c) = ctx.pick(ctx.apply(q)) {
            check_other_ends(st, &c, q)?;
            return found(c, "lemma4b", &q.verts);
        }
    }
    // (c) path ends, not all vertices inside one path, clean end edges
    for q in open() {
        let one_path = q.verts.iter().all(|&v| st.same_path(v, q.s()));
        if !both_path_ends(q) || one_path || !q.ends_clean() {
            continue;
        }
        if let Some(c) = ctx.pick(ctx.apply(q)) {
            check_other_ends(st, &c, q)?;
            return found(c, "lemma4c", &q.verts);
        }
    }
    // (d) inward paths
    for q in open().filter(|q| q.inward) {
        if let Some(c) = ctx.pick(ctx.apply(q)) {
            return found(c, "lemma4d", &q.verts);
        }
    }
    // (e) both ends on one path, completed by a truncated inward path
    for q in open() {
        if !both_path_ends(q) || !st.same_path(q.s(), q.t()) || !q.ends_clean() {
            continue;
        }
        if let Some(c) = lemma4e(&ctx, q) {
            return found(c, "lemma4e", &q.verts);
        }
    }

    let closed = || paths.iter().filter(|q| q.closed);
    // Closed paths at the end of a path with at least two vertices.
    for q in closed() {
        let s = q.s();
        if !st.is_path_end(s) || m.degree(s) != 1 {
            continue;
        }
        let u = m.neighbors(s)[0];
        let Some(m1) = ctx.apply(q).into_iter().next() else {
            continue;
        };
        for &t in &sup.nbrs[u] {
            if t == s || !st.is_path_end(t) || st.same_comp(t, s) || m.has(u, t) {
                continue;
            }
            let mut c = m1.clone();
            if c.add(u, t) && ctx.accepts(&c) {
                return found(c, "lemma5a", &q.verts);
            }
        }
    }
    for q in closed() {
        let s = q.s();
        if !st.is_path_end(s) || st.comp(s).vertices.len() != 2 {
            continue;
        }
        let u = m.neighbors(s)[0];
        for q2 in closed().filter(|p| p.s() == u) {
            if let Some(c) = lemma5b(&ctx, q, q2) {
                return found(c, "lemma5b", &q.verts);
            }
        }
    }

    // Closed paths s, u, v, s of length three.
    let triangles = || closed().filter(|q| q.len() == 3 && st.is_path_end(q.s()));
    for q in triangles() {
        let (s, u, v) = (q.verts[0], q.verts[1], q.verts[2]);
        for w in [u, v] {
            if m.degree(w) <= 1 {
                let mut c = m.clone();
                if c.add(s, w) && ctx.accepts(&c) {
                    return found(c, "lemma6a", &q.verts);
                }
            }
        }
    }
    for q in triangles() {
        if let Some(c) = lemma6b(&ctx, q) {
            return found(c, "lemma6b", &q.verts);
        }
    }

    if opts.special_three_cycle {
        for q in open().filter(|q| q.len() == 3) {
            let (s, t) = (q.s(), q.t());
            let tri = st.on_cycle(s) && st.comp(s).vertices.len() == 3;
            if tri && st.is_path_end(t) {
                if let Some(c) = ctx.pick(ctx.apply(q)) {
                    return found(c, "special3cycle", &q.verts);
                }
            }
        }
    }
    Ok(None)
}

fn check_other_ends(st: &Structure, c: &TwoMatching, q: &AltPath) -> Result<()> {
    if q.s() != q.t() && !altpath::preserves_other_ends(st, c, q) {
        return breach(format!("applying {:?} changed the end status of another path end", q.verts));
    }
    Ok(())
}

fn lemma4e(ctx: &Ctx<'_>, q: &AltPath) -> Option<TwoMatching> {
    let target = ctx.st.comp_of[q.s()];
    let truncated = altpath::truncated_into(ctx.m, &ctx.st, ctx.sup, target);
    for m1 in ctx.apply(q) {
        if ctx.accepts(&m1) {
            return Some(m1);
        }
        let st1 = Structure::new(&m1);
        for r in &truncated {
            if r.verts.iter().any(|v| q.internal().contains(v)) {
                log::debug!("truncated path {:?} overlaps {:?}", r.verts, q.verts);
            }
            let last = r.t();
            if !st1.is_end(last) || !st1.is_end(r.s()) {
                continue;
            }
            // Re-tag against the matching after Q.
            let valid = (0..r.len()).all(|i| {
                let (a, b) = (r.verts[i], r.verts[i + 1]);
                m1.has(a, b) != AltPath::is_connecting(i)
            });
            if !valid || r.internal().iter().any(|&v| st1.on_cycle(v)) {
                continue;
            }
            if let Some(c) = altpath::apply(&m1, &st1, ctx.sup, r).into_iter().find(|c| ctx.accepts(c)) {
                return Some(c);
            }
        }
    }
    None
}

fn lemma5b(ctx: &Ctx<'_>, q: &AltPath, q2: &AltPath) -> Option<TwoMatching> {
    let sup = ctx.sup;
    let (s, u) = (q.s(), q2.s());
    let m1 = ctx.apply(q).into_iter().next()?;
    let old_cycles: Vec<Vec<usize>> = ctx
        .st
        .comps
        .iter()
        .filter(|c| c.cycle)
        .map(|c| sorted(&c.vertices))
        .collect();
    let new_cycles: Vec<Vec<usize>> = m1
        .components()
        .into_iter()
        .filter(|c| c.cycle)
        .map(|c| sorted(&c.vertices))
        .filter(|c| !old_cycles.contains(c))
        .collect();
    let mut cands = Vec::new();
    if new_cycles.is_empty() {
        // Case 1: apply Q' next.
        let mut c = m1.clone();
        for &w in m1.neighbors(u) {
            c.remove(u, w);
        }
        let ok = q2.matching_edges().iter().all(|&(a, b)| c.remove(a, b))
            && q2.connecting_edges().iter().all(|&(a, b)| c.add(a, b));
        if ok {
            cands.push(c);
        }
    } else {
        let through_s = new_cycles.iter().any(|c| c.contains(&s));
        let removals: Vec<(usize, usize)> = if through_s {
            cycle_edge_options(&m1, sup, s)
        } else {
            m1.neighbors(s)
                .iter()
                .filter(|&&w| !sup.is_one(s, w))
                .map(|&w| (s, w))
                .collect()
        };
        for (a, b) in removals {
            let mut c = m1.clone();
            if c.remove(a, b) && c.add(s, u) {
                let st2 = Structure::new(&c);
                let follow = undirected_basic(&c, &st2, sup);
                cands.push(c);
                cands.extend(follow);
            }
        }
    }
    ctx.pick(cands)
}

fn lemma6b(ctx: &Ctx<'_>, q: &AltPath) -> Option<TwoMatching> {
    let (m, st, sup) = (ctx.m, &ctx.st, ctx.sup);
    let (s, u, v) = (q.verts[0], q.verts[1], q.verts[2]);
    let other = |a: usize, b: usize| m.neighbors(a).iter().copied().find(|&w| w != b);
    let u2 = other(u, v);
    let v2 = other(v, u);
    // (w, edge removed, edge added afterwards)
    let mut rows = Vec::new();
    if let Some(u2) = u2 {
        rows.push((u2, (u2, u), (s, u)));
    }
    rows.push((u, (u, v), (s, v)));
    rows.push((v, (u, v), (s, u)));
    if let Some(v2) = v2 {
        rows.push((v2, (v, v2), (s, v)));
    }
    for t in 0..m.n() {
        if t == s || !st.is_end(t) {
            continue;
        }
        for &(w, (ra, rb), (aa, ab)) in &rows {
            if t == w || !sup.has(t, w) || m.has(t, w) {
                continue;
            }
            let opts: Vec<Option<(usize, usize)>> = if st.on_cycle(t) {
                cycle_edge_options(m, sup, t).into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            for rt in opts {
                let mut c = m.clone();
                let ok = rt.is_none_or(|(a, b)| c.remove(a, b))
                    && c.add(t, w)
                    && c.remove(ra, rb)
                    && c.add(aa, ab);
                if ok && ctx.accepts(&c) {
                    return Some(c);
                }
            }
        }
    }
    None
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_ser;
    use crate::{gen, Instance, Kind};

    fn cycle(n: usize) -> Instance {
        Instance::new(Kind::Symmetric, n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn opts() -> ImproveOptions {
        ImproveOptions {
            special_three_cycle: false,
            enforce_end_degree: true,
        }
    }

    #[test]
    fn hamiltonian_cycle_is_a_fixpoint() {
        let x = solve_ser(&cycle(6)).unwrap();
        let m = TwoMatching::from_edges(6, x.one_edges()).unwrap();
        assert!(find_improvement(&m, &x.support(), opts()).unwrap().is_none());
    }

    #[test]
    fn single_connecting_edge_closes_a_path() {
        let x = solve_ser(&cycle(5)).unwrap();
        let m = TwoMatching::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let imp = find_improvement(&m, &x.support(), opts()).unwrap().unwrap();
        assert_eq!(imp.rule, "lemma4a");
        assert_eq!(imp.witness.len(), 2);
        let comps = imp.matching.components();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].cycle);
    }

    #[test]
    fn two_paths_are_joined() {
        let x = solve_ser(&cycle(6)).unwrap();
        let m = TwoMatching::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let imp = find_improvement(&m, &x.support(), opts()).unwrap().unwrap();
        assert_eq!(imp.rule, "lemma4a");
        assert_eq!(imp.matching.components().len(), 1);
    }

    #[test]
    fn singletons_go_first() {
        let x = solve_ser(&cycle(5)).unwrap();
        let m = TwoMatching::from_edges(5, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let imp = find_improvement(&m, &x.support(), opts()).unwrap().unwrap();
        assert_eq!(imp.rule, "lemma3");
        assert!(!imp.matching.has_singleton());
    }

    #[test]
    fn improvements_stay_in_support() {
        let inst = gen::fig1a();
        let x = solve_ser(&inst).unwrap();
        let sup = x.support();
        let mut m = TwoMatching::new(9);
        while let Some(imp) = find_improvement(&m, &sup, opts()).unwrap() {
            assert!(imp.matching.within(&sup));
            assert!(imp.matching.potential() < m.potential());
            m = imp.matching;
        }
        assert!(m.components().len() <= 2);
    }
}
