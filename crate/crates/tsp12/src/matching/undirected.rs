use super::{potential_of, Component, Potential};
use crate::error::{invalid, Result};
use crate::lp::SupportGraph;

/// Undirected 2-matching: a simple graph with every degree at most two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoMatching {
    adj: Vec<Vec<usize>>,
}

impl TwoMatching {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Self::new(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge {u} {v} out of range"));
            }
            if !m.add(u, v) {
                return invalid(format!("edge {u} {v} breaks the degree bound or repeats"));
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Adds `{u, v}`; returns false (leaving `self` unchanged) if that
    /// would repeat an edge, form a loop or exceed degree two.
    pub fn add(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has(u, v) || self.degree(u) >= 2 || self.degree(v) >= 2 {
            return false;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.adj[u].sort_unstable();
        self.adj[v].sort_unstable();
        true
    }

    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        if !self.has(u, v) {
            return false;
        }
        self.adj[u].retain(|&w| w != v);
        self.adj[v].retain(|&w| w != u);
        true
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Paths start at their smaller end; cycles start at their smallest
    /// vertex and continue towards its smaller neighbour.
    pub fn components(&self) -> Vec<Component> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for v in 0..n {
            if seen[v] || self.degree(v) == 2 {
                continue;
            }
            out.push(Component {
                vertices: self.walk(v, &mut seen),
                cycle: false,
            });
        }
        for v in 0..n {
            if !seen[v] {
                out.push(Component {
                    vertices: self.walk(v, &mut seen),
                    cycle: true,
                });
            }
        }
        out.sort_by_key(|c| c.vertices.iter().copied().min());
        out
    }

    fn walk(&self, start: usize, seen: &mut [bool]) -> Vec<usize> {
        let mut order = vec![start];
        seen[start] = true;
        let mut cur = start;
        loop {
            let next = self.adj[cur].iter().copied().find(|&w| !seen[w]);
            match next {
                Some(w) => {
                    seen[w] = true;
                    order.push(w);
                    cur = w;
                }
                None => return order,
            }
        }
    }

    pub fn potential(&self) -> Potential {
        potential_of(&self.components())
    }

    pub fn has_singleton(&self) -> bool {
        self.adj.iter().any(Vec::is_empty)
    }

    /// Every edge lies in the support.
    pub fn within(&self, support: &SupportGraph) -> bool {
        self.edges().iter().all(|&(u, v)| support.has(u, v))
    }

    /// Every path end vertex has support degree at least three.
    pub fn ends_have_degree_three(&self, support: &SupportGraph) -> bool {
        let st = Structure::new(self);
        (0..self.n()).all(|v| !st.is_path_end(v) || support.degree(v) >= 3)
    }

    pub fn contains_all(&self, edges: &[(usize, usize)]) -> bool {
        edges.iter().all(|&(u, v)| self.has(u, v))
    }
}

/// Component lookup tables for one matching snapshot.
#[derive(Clone, Debug)]
pub struct Structure {
    pub comps: Vec<Component>,
    pub comp_of: Vec<usize>,
    pub pos: Vec<usize>,
    deg: Vec<usize>,
}

impl Structure {
    pub fn new(m: &TwoMatching) -> Self {
        let comps = m.components();
        let n = m.n();
        let mut comp_of = vec![0; n];
        let mut pos = vec![0; n];
        for (ci, c) in comps.iter().enumerate() {
            for (i, &v) in c.vertices.iter().enumerate() {
                comp_of[v] = ci;
                pos[v] = i;
            }
        }
        let deg = (0..n).map(|v| m.degree(v)).collect();
        Self {
            comps,
            comp_of,
            pos,
            deg,
        }
    }

    pub fn on_cycle(&self, v: usize) -> bool {
        self.comps[self.comp_of[v]].cycle
    }

    /// End vertex: on a cycle, or at most one neighbour in its component.
    pub fn is_end(&self, v: usize) -> bool {
        self.on_cycle(v) || self.deg[v] <= 1
    }

    /// End of a path (singletons included).
    pub fn is_path_end(&self, v: usize) -> bool {
        !self.on_cycle(v) && self.deg[v] <= 1
    }

    pub fn same_comp(&self, u: usize, v: usize) -> bool {
        self.comp_of[u] == self.comp_of[v]
    }

    pub fn same_cycle(&self, u: usize, v: usize) -> bool {
        self.same_comp(u, v) && self.on_cycle(u)
    }

    pub fn same_path(&self, u: usize, v: usize) -> bool {
        self.same_comp(u, v) && !self.on_cycle(u)
    }

    pub fn comp(&self, v: usize) -> &Component {
        &self.comps[self.comp_of[v]]
    }

    /// Whether `w` lies strictly between `a` and `b` on their common path.
    pub fn strictly_between(&self, a: usize, w: usize, b: usize) -> bool {
        let (pa, pw, pb) = (self.pos[a], self.pos[w], self.pos[b]);
        (pa < pw && pw < pb) || (pb < pw && pw < pa)
    }
}
