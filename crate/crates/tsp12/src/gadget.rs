//! The Clique to k-edge-change reduction built from switch gadgets.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{format_err, invalid};
use crate::instance::tour_cost;
use crate::{Instance, Kind, Result, Tour};

/// Local gadget vertex order: the gates, the inner pair on the top row,
/// then the two middle vertices.
pub const ALPHA: usize = 0;
pub const TOP_A: usize = 1;
pub const TOP_B: usize = 2;
pub const BETA: usize = 3;
pub const MID_1: usize = 4;
pub const MID_2: usize = 5;
pub const GAMMA: usize = 6;
pub const DELTA: usize = 7;

const GADGET_EDGES: [(usize, usize); 9] = [
    (ALPHA, TOP_A),
    (TOP_A, TOP_B),
    (TOP_B, BETA),
    (ALPHA, MID_1),
    (BETA, MID_2),
    (MID_1, GAMMA),
    (MID_2, DELTA),
    (GAMMA, TOP_B),
    (TOP_A, DELTA),
];
/// Entering at alpha and leaving at beta.
pub const UPPER: [usize; 8] = [ALPHA, MID_1, GAMMA, TOP_B, TOP_A, DELTA, MID_2, BETA];
/// Entering at gamma and leaving at delta.
pub const LOWER: [usize; 8] = [GAMMA, MID_1, ALPHA, TOP_A, TOP_B, BETA, MID_2, DELTA];

/// A simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n || u == v {
                return invalid(format!("bad graph edge {u} {v}"));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return invalid(format!("duplicate graph edge {u} {v}"));
            }
            norm.push(e);
        }
        Ok(Self { n, edges: norm })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self { n, edges }
    }

    /// `GRAPH <n> <m>` followed by `m` lines `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, head) = lines.next().ok_or_else(|| format_err(1, "empty graph file"))?;
        let parts: Vec<&str> = head.split_whitespace().collect();
        let (n, m) = match parts[..] {
            ["GRAPH", n, m] => (
                n.parse::<usize>().map_err(|_| format_err(no, "bad vertex count"))?,
                m.parse::<usize>().map_err(|_| format_err(no, "bad edge count"))?,
            ),
            _ => return Err(format_err(no, "expected `GRAPH <n> <m>`")),
        };
        let mut edges = Vec::new();
        for (no, line) in lines {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| format_err(no, "bad vertex id")))
                .collect::<Result<_>>()?;
            let [u, v] = nums[..] else {
                return Err(format_err(no, "expected `u v`"));
            };
            if u >= n || v >= n || u == v {
                return Err(format_err(no, format!("bad edge {u} {v}")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(format_err(no, format!("header announces {m} edges, found {}", edges.len())));
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("GRAPH {} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    fn edge_index(&self) -> HashMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueInput {
    pub graph: Graph,
    pub t: usize,
}

impl CliqueInput {
    pub fn new(graph: Graph, t: usize) -> Result<Self> {
        if t < 3 || t % 2 == 0 {
            return invalid(format!("clique size must be odd and at least 3, got {t}"));
        }
        if t > graph.n {
            return invalid(format!("clique size {t} exceeds the {} graph vertices", graph.n));
        }
        Ok(Self { graph, t })
    }
}

/// Pairs of `1..=t` ordered along an Euler circuit of `K_t`, so that each
/// pair starts where the previous one ended.
pub fn euler_pair_order(t: usize) -> Result<Vec<(usize, usize)>> {
    if t < 3 || t % 2 == 0 {
        return invalid(format!("t must be odd and at least 3, got {t}"));
    }
    let mut unused: Vec<BTreeSet<usize>> = (0..=t).map(|v| (1..=t).filter(|&w| w != v).collect()).collect();
    unused[0].clear();
    let mut stack = vec![1];
    let mut circuit = Vec::new();
    while let Some(&v) = stack.last() {
        match unused[v].iter().next().copied() {
            Some(w) => {
                unused[v].remove(&w);
                unused[w].remove(&v);
                stack.push(w);
            }
            None => circuit.push(stack.pop().expect("non-empty")),
        }
    }
    circuit.reverse();
    Ok(circuit.windows(2).map(|w| (w[0], w[1])).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetKind {
    /// Vertex `i` of H and the pair at position `pair` of the Euler order.
    Vertex { i: usize, pair: usize },
    /// Edge `r` of H and the pair at position `pair`.
    Edge { r: usize, pair: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetInfo {
    pub kind: GadgetKind,
    pub verts: [usize; 8],
}

impl GadgetInfo {
    pub fn gate(&self, local: usize) -> usize {
        self.verts[local]
    }

    fn walk(&self, order: &[usize; 8]) -> impl Iterator<Item = usize> + '_ {
        let order = *order;
        (0..8).map(move |k| self.verts[order[k]])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SegmentKind {
    /// Vertex segment for vertex `i` of H and clique position `j` (1-based).
    Vertex { i: usize, j: usize },
    /// Edge segment for edge `r` and clique positions `j1 < j2` (1-based).
    Edge { r: usize, j1: usize, j2: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentInfo {
    pub kind: SegmentKind,
    pub entrance: usize,
    pub exit: usize,
    /// Gadget ids in traversal order.
    pub gadgets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub gadgets: Vec<GadgetInfo>,
    pub segments: Vec<SegmentInfo>,
    pub v_first: usize,
    pub v_last: usize,
}

impl Layout {
    /// One line per gadget with its gates, then the segment landmarks.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (id, g) in self.gadgets.iter().enumerate() {
            let _ = writeln!(
                s,
                "gadget {id} alpha {} beta {} gamma {} delta {}",
                g.verts[ALPHA], g.verts[BETA], g.verts[GAMMA], g.verts[DELTA]
            );
        }
        for (id, seg) in self.segments.iter().enumerate() {
            let _ = writeln!(s, "segment {id} entrance {} exit {}", seg.entrance, seg.exit);
        }
        let _ = writeln!(s, "first {}\nlast {}", self.v_first, self.v_last);
        s
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub instance: Instance,
    pub tour_c: Tour,
    pub k: usize,
    pub pairs: Vec<(usize, usize)>,
    pub layout: Layout,
    gadget_of: HashMap<GadgetKind, usize>,
}

impl ReductionOutput {
    pub fn gadget(&self, kind: GadgetKind) -> &GadgetInfo {
        &self.layout.gadgets[self.gadget_of[&kind]]
    }
}

pub fn vertex_count(n: usize, m: usize, t: usize) -> usize {
    4 * n * t * t - 2 * n * t + 5 * m * t * (t - 1)
}

pub fn budget(t: usize) -> usize {
    7 * t * (t - 1) + 2 * (t + 1)
}

/// Builds the reduction instance, the planted tour through every gadget's
/// upper gates, and the budget.
pub fn build_reduction(input: &CliqueInput) -> Result<ReductionOutput> {
    let CliqueInput { graph, t } = input;
    let t = *t;
    let pairs = euler_pair_order(t)?;
    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let mut gadgets = Vec::new();
    let mut gadget_of = HashMap::new();
    let mut new_gadget = |kind: GadgetKind, fresh: &mut dyn FnMut() -> usize| {
        let verts = std::array::from_fn(|_| fresh());
        gadget_of.insert(kind, gadgets.len());
        gadgets.push(GadgetInfo { kind, verts });
        gadgets.len() - 1
    };

    let mut segments = Vec::new();
    for i in 0..graph.n {
        for j in 1..=t {
            let entrance = fresh();
            let ids: Vec<usize> = (0..pairs.len())
                .filter(|&l| pairs[l].0 == j)
                .map(|l| new_gadget(GadgetKind::Vertex { i, pair: l }, &mut fresh))
                .collect();
            let exit = fresh();
            segments.push(SegmentInfo {
                kind: SegmentKind::Vertex { i, j },
                entrance,
                exit,
                gadgets: ids,
            });
        }
    }
    let pair_pos: HashMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(l, &(a, b))| ((a.min(b), a.max(b)), l))
        .collect();
    for r in 0..graph.edges.len() {
        for j1 in 1..=t {
            for j2 in j1 + 1..=t {
                let entrance = fresh();
                let id = new_gadget(GadgetKind::Edge { r, pair: pair_pos[&(j1, j2)] }, &mut fresh);
                let exit = fresh();
                segments.push(SegmentInfo {
                    kind: SegmentKind::Edge { r, j1, j2 },
                    entrance,
                    exit,
                    gadgets: vec![id],
                });
            }
        }
    }
    let total = next;
    if total != vertex_count(graph.n, graph.edges.len(), t) {
        return crate::error::breach("vertex count differs from the closed form");
    }
    let v_first = segments[0].entrance;
    let v_last = segments[segments.len() - 1].exit;

    let mut edges = BTreeSet::new();
    let mut link = |a: usize, b: usize| {
        edges.insert((a.min(b), a.max(b)));
    };
    for g in &gadgets {
        for (a, b) in GADGET_EDGES {
            link(g.verts[a], g.verts[b]);
        }
    }
    for seg in &segments {
        let mut prev = seg.entrance;
        for &gid in &seg.gadgets {
            link(prev, gadgets[gid].verts[ALPHA]);
            prev = gadgets[gid].verts[BETA];
        }
        link(prev, seg.exit);
        link(seg.entrance, seg.exit);
    }
    for w in segments.windows(2) {
        link(w[0].exit, w[1].entrance);
    }
    let gate = |kind: GadgetKind, local: usize| gadgets[gadget_of[&kind]].verts[local];
    let last = pairs.len() - 1;
    for (r, &(x, y)) in graph.edges.iter().enumerate() {
        for (i, i2) in [(x, y), (y, x)] {
            for l in 0..pairs.len() {
                link(gate(GadgetKind::Vertex { i, pair: l }, DELTA), gate(GadgetKind::Edge { r, pair: l }, GAMMA));
                if l < last {
                    link(
                        gate(GadgetKind::Edge { r, pair: l }, DELTA),
                        gate(GadgetKind::Vertex { i: i2, pair: l + 1 }, GAMMA),
                    );
                }
            }
        }
        link(gate(GadgetKind::Edge { r, pair: last }, DELTA), v_first);
    }
    for i in 0..graph.n {
        link(v_last, gate(GadgetKind::Vertex { i, pair: 0 }, GAMMA));
    }
    let instance = Instance::new(Kind::Symmetric, total, edges)?;

    let mut order = Vec::with_capacity(total);
    for seg in &segments {
        order.push(seg.entrance);
        for &gid in &seg.gadgets {
            order.extend(gadgets[gid].walk(&UPPER));
        }
        order.push(seg.exit);
    }
    let tour_c = Tour::new(order)?;
    let out = ReductionOutput {
        instance,
        tour_c,
        k: budget(t),
        pairs,
        layout: Layout {
            gadgets,
            segments,
            v_first,
            v_last,
        },
        gadget_of,
    };
    let cost = tour_cost(&out.instance, &out.tour_c)?;
    if cost != total as u64 + 1 {
        return crate::error::breach(format!("planted tour costs {cost}, expected {}", total + 1));
    }
    Ok(out)
}

/// The improving tour for a `t`-clique of H: it bypasses the segments the
/// clique selects and collects their gadgets through the lower gates.
pub fn clique_tour(input: &CliqueInput, clique: &[usize], red: &ReductionOutput) -> Result<Tour> {
    let g = &input.graph;
    let mut vs: Vec<usize> = clique.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() != input.t || vs.len() != clique.len() {
        return invalid(format!("clique must have {} distinct vertices", input.t));
    }
    if vs.iter().any(|&v| v >= g.n) {
        return invalid("clique vertex out of range");
    }
    let index = g.edge_index();
    // `at[j]` is the clique vertex at position j (1-based).
    let at = |j: usize| vs[j - 1];
    let edge_of = |j1: usize, j2: usize| -> Result<usize> {
        let (a, b) = (at(j1).min(at(j2)), at(j1).max(at(j2)));
        index
            .get(&(a, b))
            .copied()
            .ok_or_else(|| crate::Error::Invalid(format!("{a} and {b} are not adjacent; not a clique")))
    };
    let mut bypass = BTreeSet::new();
    for j in 1..=input.t {
        bypass.insert(SegmentKind::Vertex { i: at(j), j });
    }
    for j1 in 1..=input.t {
        for j2 in j1 + 1..=input.t {
            bypass.insert(SegmentKind::Edge { r: edge_of(j1, j2)?, j1, j2 });
        }
    }
    let lay = &red.layout;
    let mut order = Vec::with_capacity(red.instance.n());
    for seg in &lay.segments {
        order.push(seg.entrance);
        if !bypass.contains(&seg.kind) {
            for &gid in &seg.gadgets {
                order.extend(lay.gadgets[gid].walk(&UPPER));
            }
        }
        order.push(seg.exit);
    }
    for (l, &(p, q)) in red.pairs.iter().enumerate() {
        order.extend(red.gadget(GadgetKind::Vertex { i: at(p), pair: l }).walk(&LOWER));
        order.extend(red.gadget(GadgetKind::Edge { r: edge_of(p, q)?, pair: l }).walk(&LOWER));
    }
    Tour::new(order)
}

/// Symmetric difference of the edge sets of two tours, and the number of
/// edges of `a` missing from `b`.
pub fn edge_distance(a: &Tour, b: &Tour) -> (usize, usize) {
    let set = |t: &Tour| -> BTreeSet<(usize, usize)> { t.steps().map(|(u, v)| (u.min(v), u.max(v))).collect() };
    let (sa, sb) = (set(a), set(b));
    let removed = sa.difference(&sb).count();
    let added = sb.difference(&sa).count();
    (removed + added, removed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    Upper,
    Lower,
    Invalid,
}

#[derive(Clone, Debug)]
pub struct TraversalReport {
    pub verdicts: Vec<Traversal>,
    /// Segments whose bypass edge the tour uses.
    pub active: Vec<usize>,
    pub active_vertex_segments: usize,
    pub active_edge_segments: usize,
    pub unit_cost: bool,
}

impl TraversalReport {
    pub fn count(&self, kind: Traversal) -> usize {
        self.verdicts.iter().filter(|&&v| v == kind).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (id, v) in self.verdicts.iter().enumerate() {
            let tag = match v {
                Traversal::Upper => "upper",
                Traversal::Lower => "lower",
                Traversal::Invalid => "invalid",
            };
            let _ = writeln!(s, "gadget {id} {tag}");
        }
        let _ = writeln!(s, "upper = {}", self.count(Traversal::Upper));
        let _ = writeln!(s, "lower = {}", self.count(Traversal::Lower));
        let _ = writeln!(s, "invalid = {}", self.count(Traversal::Invalid));
        let _ = writeln!(s, "active_segments = {}", self.active.len());
        let _ = writeln!(s, "active_vertex_segments = {}", self.active_vertex_segments);
        let _ = writeln!(s, "active_edge_segments = {}", self.active_edge_segments);
        let _ = writeln!(s, "unit_cost = {}", self.unit_cost);
        s
    }
}

/// Classifies how `tour` passes each gadget and lists the active segments.
pub fn check_gadget_traversal(tour: &Tour, red: &ReductionOutput) -> Result<TraversalReport> {
    let n = red.instance.n();
    if tour.n() != n {
        return invalid(format!("tour has {} vertices, instance has {n}", tour.n()));
    }
    let order = tour.order();
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let lay = &red.layout;
    let verdicts = lay
        .gadgets
        .iter()
        .map(|g| {
            let start = pos[g.verts[0]];
            // Rotate so the block, if contiguous, starts within 8 steps back.
            for back in 0..8 {
                let s = (start + n - back) % n;
                let block: Vec<usize> = (0..8).map(|k| order[(s + k) % n]).collect();
                for (pattern, kind) in [(UPPER, Traversal::Upper), (LOWER, Traversal::Lower)] {
                    let fwd: Vec<usize> = g.walk(&pattern).collect();
                    let rev: Vec<usize> = fwd.iter().rev().copied().collect();
                    if block == fwd || block == rev {
                        return kind;
                    }
                }
            }
            Traversal::Invalid
        })
        .collect();
    let adjacent = |a: usize, b: usize| {
        let d = (pos[a] + n - pos[b]) % n;
        d == 1 || d == n - 1
    };
    let mut active = Vec::new();
    let (mut av, mut ae) = (0, 0);
    for (id, seg) in lay.segments.iter().enumerate() {
        if adjacent(seg.entrance, seg.exit) {
            active.push(id);
            match seg.kind {
                SegmentKind::Vertex { .. } => av += 1,
                SegmentKind::Edge { .. } => ae += 1,
            }
        }
    }
    let unit_cost = tour_cost(&red.instance, tour)? == n as u64;
    Ok(TraversalReport {
        verdicts,
        active,
        active_vertex_segments: av,
        active_edge_segments: ae,
        unit_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_orders() {
        assert_eq!(euler_pair_order(3).unwrap(), vec![(1, 2), (2, 3), (3, 1)]);
        let p = euler_pair_order(5).unwrap();
        assert_eq!(p.len(), 10);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        let unordered: BTreeSet<_> = p.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        assert_eq!(unordered.len(), 10);
        for j in 1..=5 {
            assert_eq!(p.iter().filter(|q| q.0 == j).count(), 2);
        }
        assert!(euler_pair_order(4).is_err());
        assert!(euler_pair_order(1).is_err());
    }

    #[test]
    fn gadget_walks_use_gadget_edges() {
        let has = |a: usize, b: usize| GADGET_EDGES.contains(&(a, b)) || GADGET_EDGES.contains(&(b, a));
        for walk in [UPPER, LOWER] {
            assert!(walk.windows(2).all(|w| has(w[0], w[1])));
        }
        assert_eq!((UPPER[0], UPPER[7]), (ALPHA, BETA));
        assert_eq!((LOWER[0], LOWER[7]), (GAMMA, DELTA));
    }

    #[test]
    fn triangle_reduction() {
        let input = CliqueInput::new(Graph::complete(3), 3).unwrap();
        let red = build_reduction(&input).unwrap();
        assert_eq!(red.instance.n(), 180);
        assert_eq!(red.k, 50);
        let c2 = clique_tour(&input, &[0, 1, 2], &red).unwrap();
        assert_eq!(tour_cost(&red.instance, &c2).unwrap(), 180);
    }

    #[test]
    fn missing_edge_is_rejected() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let input = CliqueInput::new(g, 3).unwrap();
        let red = build_reduction(&input).unwrap();
        assert!(clique_tour(&input, &[1, 2, 3], &red).is_err());
        assert!(clique_tour(&input, &[0, 1, 2], &red).is_ok());
    }

    #[test]
    fn graph_file_round_trip() {
        let g = Graph::complete(4);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        assert!(Graph::parse("GRAPH 3 1\n0 0\n").is_err());
        assert!(Graph::parse("GRAPH 3 2\n0 1\n").is_err());
    }
}
