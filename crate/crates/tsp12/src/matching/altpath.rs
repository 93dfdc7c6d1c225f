//! Alternating paths: matching and connecting edges alternate, starting and
//! ending with connecting edges at end vertices.

use super::singleton::cycle_edge_options;
use super::undirected::{Structure, TwoMatching};
use crate::lp::SupportGraph;

/// Largest cycle for which path-forming pairs are decided exactly.
pub const PATH_FORMING_LIMIT: usize = 12;

/// An alternating path given by its vertex sequence. Edge `i` joins
/// `verts[i]` and `verts[i + 1]`; even edges are connecting edges and odd
/// edges are matching edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AltPath {
    pub verts: Vec<usize>,
    pub closed: bool,
    pub truncated: bool,
    pub inward: bool,
    /// Connecting-edge indices involved in a violation of the inward rule.
    pub violations: Vec<usize>,
}

impl AltPath {
    fn build(verts: Vec<usize>, st: &Structure, truncated: bool) -> Self {
        let violations = inward_violations(&verts, st);
        let closed = verts.len() > 2 && verts[0] == verts[verts.len() - 1];
        Self {
            verts,
            closed,
            truncated,
            inward: violations.is_empty(),
            violations,
        }
    }

    pub fn len(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 2
    }

    pub fn s(&self) -> usize {
        self.verts[0]
    }

    pub fn t(&self) -> usize {
        self.verts[self.verts.len() - 1]
    }

    pub fn is_connecting(i: usize) -> bool {
        i % 2 == 0
    }

    pub fn connecting_edges(&self) -> Vec<(usize, usize)> {
        self.edges_where(true)
    }

    pub fn matching_edges(&self) -> Vec<(usize, usize)> {
        self.edges_where(false)
    }

    fn edges_where(&self, connecting: bool) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter(|&i| Self::is_connecting(i) == connecting)
            .map(|i| (self.verts[i], self.verts[i + 1]))
            .collect()
    }

    /// Neither the first nor the last edge is involved in a violation.
    pub fn ends_clean(&self) -> bool {
        let last = self.len() - 1;
        !self.violations.contains(&0) && !self.violations.contains(&last)
    }

    pub fn internal(&self) -> &[usize] {
        &self.verts[1..self.verts.len() - 1]
    }
}

/// Indices of connecting edges `{a, b}` inside one path of `M` where an
/// endpoint that is internal to `Q` leaves along `Q` away from the other
/// endpoint.
fn inward_violations(verts: &[usize], st: &Structure) -> Vec<usize> {
    let len = verts.len() - 1;
    let mut out = Vec::new();
    for i in (0..len).step_by(2) {
        let (a, b) = (verts[i], verts[i + 1]);
        if !st.same_path(a, b) {
            continue;
        }
        let bad_a = i > 0 && !st.strictly_between(a, verts[i - 1], b);
        let bad_b = i + 1 < len && !st.strictly_between(b, verts[i + 2], a);
        if bad_a || bad_b {
            out.push(i);
        }
    }
    out
}

/// All alternating paths with at most `max_len` edges (open and closed),
/// sorted by vertex sequence.
pub fn enumerate(m: &TwoMatching, st: &Structure, sup: &SupportGraph, max_len: usize) -> Vec<AltPath> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len + 1);
    let mut used = vec![false; m.n()];
    for s in 0..m.n() {
        if !st.is_end(s) {
            continue;
        }
        path.push(s);
        used[s] = true;
        extend(m, st, sup, max_len, &mut path, &mut used, &mut out);
        used[s] = false;
        path.pop();
    }
    out.sort();
    out
}

fn extend(
    m: &TwoMatching,
    st: &Structure,
    sup: &SupportGraph,
    max_len: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<AltPath>,
) {
    let c = *path.last().expect("non-empty path");
    let s = path[0];
    let len = path.len(); // edge count after appending one more vertex
    for &w in &sup.nbrs[c] {
        if m.has(c, w) {
            continue;
        }
        if w == s {
            if len >= 3 {
                let mut verts = path.clone();
                verts.push(s);
                out.push(AltPath::build(verts, st, false));
            }
            continue;
        }
        if used[w] {
            continue;
        }
        if st.is_end(w) && !(len == 1 && st.same_cycle(s, w)) {
            let mut verts = path.clone();
            verts.push(w);
            out.push(AltPath::build(verts, st, false));
        }
        if len + 2 <= max_len && !st.on_cycle(w) {
            path.push(w);
            used[w] = true;
            for &z in m.neighbors(w) {
                if used[z] {
                    continue;
                }
                path.push(z);
                used[z] = true;
                extend(m, st, sup, max_len, path, used, out);
                used[z] = false;
                path.pop();
            }
            used[w] = false;
            path.pop();
        }
    }
}

/// Independent check of the defining properties for a vertex sequence.
/// Returns the tagged path if `verts` is a (non-truncated) alternating path.
pub fn validate(m: &TwoMatching, st: &Structure, sup: &SupportGraph, verts: &[usize]) -> Option<AltPath> {
    if verts.len() < 2 {
        return None;
    }
    let len = verts.len() - 1;
    let (s, t) = (verts[0], verts[len]);
    for i in 0..len {
        let (a, b) = (verts[i], verts[i + 1]);
        if !sup.has(a, b) || m.has(a, b) != !AltPath::is_connecting(i) {
            return None;
        }
    }
    // Both end edges must be connecting edges.
    if !AltPath::is_connecting(len - 1) {
        return None;
    }
    let closed = s == t;
    let mut seen = std::collections::BTreeSet::new();
    let distinct = if closed { &verts[..len] } else { verts };
    if !distinct.iter().all(|v| seen.insert(*v)) || (closed && len < 3) {
        return None;
    }
    if !st.is_end(s) || !st.is_end(t) {
        return None;
    }
    if verts[1..len].iter().any(|&v| st.on_cycle(v)) {
        return None;
    }
    if len == 1 && st.same_cycle(s, t) {
        return None;
    }
    Some(AltPath::build(verts.to_vec(), st, false))
}

/// Truncated inward paths of length 1 or 3 from an end of another path
/// into the path `target`, stopping at the first vertex inside it.
pub fn truncated_into(m: &TwoMatching, st: &Structure, sup: &SupportGraph, target: usize) -> Vec<AltPath> {
    let mut out = Vec::new();
    let in_target = |v: usize| st.comp_of[v] == target;
    for s in 0..m.n() {
        if !st.is_path_end(s) || in_target(s) {
            continue;
        }
        for &r1 in &sup.nbrs[s] {
            if m.has(s, r1) {
                continue;
            }
            if in_target(r1) {
                out.push(AltPath::build(vec![s, r1], st, true));
                continue;
            }
            if st.on_cycle(r1) {
                continue;
            }
            for &r2 in m.neighbors(r1) {
                if r2 == s || in_target(r2) {
                    continue;
                }
                for &r3 in &sup.nbrs[r2] {
                    if in_target(r3) && !m.has(r2, r3) {
                        out.push(AltPath::build(vec![s, r1, r2, r3], st, true));
                    }
                }
            }
        }
    }
    out.retain(|p| p.inward);
    out.sort();
    out
}

/// Hamiltonian path from `s` to `t` through exactly `verts` in the support.
pub fn ham_path(sup: &SupportGraph, verts: &[usize], s: usize, t: usize) -> Option<Vec<usize>> {
    let k = verts.len();
    let idx = |v: usize| verts.iter().position(|&w| w == v);
    let (si, ti) = (idx(s)?, idx(t)?);
    let full = (1u32 << k) - 1;
    // reach[mask] bit j: a path from s covering mask can end at verts[j]
    let mut reach = vec![0u32; 1 << k];
    reach[1 << si] = 1 << si;
    for mask in 1..=full {
        let ends = reach[mask as usize];
        if ends == 0 {
            continue;
        }
        for j in (0..k).filter(|j| ends >> j & 1 == 1) {
            for l in (0..k).filter(|l| mask >> l & 1 == 0) {
                if sup.has(verts[j], verts[l]) && (l != ti || mask | 1 << l == full) {
                    reach[(mask | 1 << l) as usize] |= 1 << l;
                }
            }
        }
    }
    if reach[full as usize] >> ti & 1 == 0 {
        return None;
    }
    // Walk back from t.
    let mut order = vec![t];
    let (mut mask, mut j) = (full, ti);
    while mask != 1 << si {
        let prev_mask = mask & !(1 << j);
        let l = (0..k)
            .find(|&l| reach[prev_mask as usize] >> l & 1 == 1 && sup.has(verts[l], verts[j]))
            .expect("predecessor exists");
        order.push(verts[l]);
        mask = prev_mask;
        j = l;
    }
    order.reverse();
    Some(order)
}

fn swap_edges(next: &mut TwoMatching, q: &AltPath) -> bool {
    q.matching_edges().iter().all(|&(a, b)| next.remove(a, b))
        && q.connecting_edges().iter().all(|&(a, b)| next.add(a, b))
}

/// Applies `q` to `m`. Several results are possible when an end lies on a
/// cycle; they are listed with the non-1-edge removal first. Empty when the
/// application is impossible (for example, a non-path-forming pair).
pub fn apply(m: &TwoMatching, st: &Structure, sup: &SupportGraph, q: &AltPath) -> Vec<TwoMatching> {
    let (s, t) = (q.s(), q.t());
    if q.closed {
        let mut next = m.clone();
        for &w in m.neighbors(s) {
            next.remove(s, w);
        }
        return if swap_edges(&mut next, q) { vec![next] } else { vec![] };
    }
    if st.same_cycle(s, t) {
        let cyc = &st.comp(s).vertices;
        if cyc.len() > PATH_FORMING_LIMIT {
            log::warn!("cycle of length {} treated as not path-forming", cyc.len());
            return vec![];
        }
        let Some(order) = ham_path(sup, cyc, s, t) else {
            return vec![];
        };
        let mut next = m.clone();
        for i in 0..cyc.len() {
            next.remove(cyc[i], cyc[(i + 1) % cyc.len()]);
        }
        let ok = order.windows(2).all(|w| next.add(w[0], w[1])) && swap_edges(&mut next, q);
        return if ok { vec![next] } else { vec![] };
    }
    let opts = |v: usize| -> Vec<Option<(usize, usize)>> {
        if st.on_cycle(v) {
            cycle_edge_options(m, sup, v).into_iter().map(Some).collect()
        } else {
            vec![None]
        }
    };
    let mut out = Vec::new();
    for rs in opts(s) {
        for rt in opts(t) {
            let mut next = m.clone();
            let ok = rs.is_none_or(|(a, b)| next.remove(a, b))
                && rt.is_none_or(|(a, b)| next.remove(a, b))
                && swap_edges(&mut next, q);
            if ok {
                out.push(next);
            }
        }
    }
    out
}

/// For `s != t` both path ends, applying `q` keeps every
/// other path end a path end.
pub fn preserves_other_ends(before: &Structure, after: &TwoMatching, q: &AltPath) -> bool {
    let st = Structure::new(after);
    (0..after.n())
        .filter(|&v| v != q.s() && v != q.t() && before.is_path_end(v))
        .all(|v| st.is_path_end(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::lp::solve_ser;
    use crate::matching::unit_matching;
    use std::collections::BTreeSet;

    /// Every simple vertex sequence of at most `max_len` edges (plus closed
    /// ones), filtered by `validate`.
    fn brute(m: &TwoMatching, st: &Structure, sup: &SupportGraph, max_len: usize) -> BTreeSet<Vec<usize>> {
        fn go(
            m: &TwoMatching,
            st: &Structure,
            sup: &SupportGraph,
            max_len: usize,
            seq: &mut Vec<usize>,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            if seq.len() >= 2 && validate(m, st, sup, seq).is_some() {
                out.insert(seq.clone());
            }
            if seq.len() > max_len || (seq.len() > 2 && seq[0] == seq[seq.len() - 1]) {
                return;
            }
            let last = seq[seq.len() - 1];
            for &w in &sup.nbrs[last] {
                if w == seq[0] || !seq.contains(&w) {
                    seq.push(w);
                    go(m, st, sup, max_len, seq, out);
                    seq.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        for s in 0..m.n() {
            go(m, st, sup, max_len, &mut vec![s], &mut out);
        }
        out
    }

    fn compare(m: &TwoMatching, sup: &SupportGraph) {
        let st = Structure::new(m);
        let fast: BTreeSet<Vec<usize>> = enumerate(m, &st, sup, 5).into_iter().map(|q| q.verts).collect();
        assert_eq!(fast, brute(m, &st, sup, 5));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let x = solve_ser(&gen::fig1a()).unwrap();
        let sup = x.support();
        compare(&unit_matching(&x).unwrap(), &sup);
        compare(&TwoMatching::new(9), &sup);
        for seed in 0..20 {
            let mut r = gen::rng(seed);
            let inst = gen::triangle_spokes(12, 0.05, &mut r);
            let x = solve_ser(&inst).unwrap();
            compare(&unit_matching(&x).unwrap(), &x.support());
        }
    }

    #[test]
    fn inward_tags() {
        // M is the path 0-1-2-3-4 on a 5-cycle of unit edges plus chord 1-4.
        let inst = crate::Instance::new(crate::Kind::Symmetric, 5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 4)]).unwrap();
        let x = solve_ser(&inst).unwrap();
        let m = TwoMatching::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let st = Structure::new(&m);
        let q = validate(&m, &st, &x.support(), &[0, 4]);
        if let Some(q) = q {
            assert!(q.inward);
        }
        // The connecting edge 0-4 joins both ends and closes the cycle.
        let q = AltPath::build(vec![0, 4], &st, false);
        assert!(q.inward && q.ends_clean());
    }

    #[test]
    fn ham_path_on_a_square() {
        let inst = crate::Instance::new(crate::Kind::Symmetric, 4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let x = solve_ser(&inst).unwrap();
        let sup = x.support();
        assert_eq!(ham_path(&sup, &[0, 1, 2, 3], 0, 3), Some(vec![0, 1, 2, 3]));
        assert_eq!(ham_path(&sup, &[0, 1, 2, 3], 0, 2), None);
    }
}
