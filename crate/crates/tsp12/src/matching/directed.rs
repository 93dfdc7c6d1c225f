use super::{potential_of, Component, Potential};
use crate::error::{invalid, Result};

/// Directed 2-matching: in- and out-degree at most one everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectedTwoMatching {
    succ: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
}

impl DirectedTwoMatching {
    pub fn new(n: usize) -> Self {
        Self {
            succ: vec![None; n],
            pred: vec![None; n],
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Self::new(n);
        for (u, v) in arcs {
            if u >= n || v >= n || !m.add(u, v) {
                return invalid(format!("arc {u} {v} breaks the degree bounds"));
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, v: usize) -> Option<usize> {
        self.succ[v]
    }

    pub fn pred(&self, v: usize) -> Option<usize> {
        self.pred[v]
    }

    pub fn has(&self, u: usize, v: usize) -> bool {
        self.succ[u] == Some(v)
    }

    pub fn add(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.succ[u].is_some() || self.pred[v].is_some() {
            return false;
        }
        self.succ[u] = Some(v);
        self.pred[v] = Some(u);
        true
    }

    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        if !self.has(u, v) {
            return false;
        }
        self.succ[u] = None;
        self.pred[v] = None;
        true
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.succ
            .iter()
            .enumerate()
            .filter_map(|(u, s)| s.map(|v| (u, v)))
            .collect()
    }

    /// Paths listed from their start, cycles from their smallest vertex.
    pub fn components(&self) -> Vec<Component> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for v in 0..n {
            if self.pred[v].is_none() {
                let mut order = vec![v];
                seen[v] = true;
                let mut cur = v;
                while let Some(w) = self.succ[cur] {
                    seen[w] = true;
                    order.push(w);
                    cur = w;
                }
                out.push(Component {
                    vertices: order,
                    cycle: false,
                });
            }
        }
        for v in 0..n {
            if !seen[v] {
                let mut order = vec![v];
                seen[v] = true;
                let mut cur = v;
                while let Some(w) = self.succ[cur].filter(|&w| !seen[w]) {
                    seen[w] = true;
                    order.push(w);
                    cur = w;
                }
                out.push(Component {
                    vertices: order,
                    cycle: true,
                });
            }
        }
        out.sort_by_key(|c| c.vertices.iter().copied().min());
        out
    }

    pub fn potential(&self) -> Potential {
        potential_of(&self.components())
    }

    pub fn singletons(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.succ[v].is_none() && self.pred[v].is_none())
            .collect()
    }

    pub fn contains_all(&self, arcs: &[(usize, usize)]) -> bool {
        arcs.iter().all(|&(u, v)| self.has(u, v))
    }
}

/// Cycle membership for a directed snapshot.
pub(crate) struct DirStructure {
    cycle_id: Vec<Option<usize>>,
}

impl DirStructure {
    pub fn new(m: &DirectedTwoMatching) -> Self {
        let mut cycle_id = vec![None; m.n()];
        for (ci, c) in m.components().iter().enumerate() {
            if c.cycle {
                for &v in &c.vertices {
                    cycle_id[v] = Some(ci);
                }
            }
        }
        Self { cycle_id }
    }

    pub fn on_cycle(&self, v: usize) -> bool {
        self.cycle_id[v].is_some()
    }

    pub fn same_cycle(&self, u: usize, v: usize) -> bool {
        self.cycle_id[u].is_some() && self.cycle_id[u] == self.cycle_id[v]
    }

    pub fn is_start(&self, m: &DirectedTwoMatching, v: usize) -> bool {
        m.pred(v).is_none() || self.on_cycle(v)
    }

    pub fn is_end(&self, m: &DirectedTwoMatching, v: usize) -> bool {
        m.succ(v).is_none() || self.on_cycle(v)
    }
}

/// All basic improvements in ascending `(end, start)` order: an arc from an
/// end vertex to a start vertex, not inside one cycle, with cycle arcs
/// opened as needed. With `forbid_two_cycles`, arcs whose reverse is in `m`
/// are skipped.
pub(crate) fn basic_improvements(
    m: &DirectedTwoMatching,
    out: &[Vec<usize>],
    forbid_two_cycles: bool,
) -> Vec<DirectedTwoMatching> {
    let st = DirStructure::new(m);
    let mut found = Vec::new();
    for e in 0..m.n() {
        if !st.is_end(m, e) {
            continue;
        }
        for &s in &out[e] {
            if m.has(e, s) || !st.is_start(m, s) || st.same_cycle(e, s) {
                continue;
            }
            if forbid_two_cycles && m.has(s, e) {
                continue;
            }
            let mut next = m.clone();
            if st.on_cycle(e) {
                let f = m.succ(e).expect("cycle vertex has a successor");
                next.remove(e, f);
            }
            if st.on_cycle(s) {
                let p = m.pred(s).expect("cycle vertex has a predecessor");
                next.remove(p, s);
            }
            if next.add(e, s) {
                found.push(next);
            }
        }
    }
    found
}
