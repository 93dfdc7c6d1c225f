//! (1,2)-TSP instances, tours and the line-oriented text formats.
//!
//! An instance stores only its cost-1 pairs; every other pair costs 2.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{format_err, invalid, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Symmetric,
    Asymmetric,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Symmetric => "sym",
            Kind::Asymmetric => "asym",
        }
    }

    /// Canonical key of a pair: sorted for symmetric instances.
    pub fn key(self, u: usize, v: usize) -> (usize, usize) {
        match self {
            Kind::Symmetric if u > v => (v, u),
            _ => (u, v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    kind: Kind,
    n: usize,
    unit: Vec<bool>,
}

impl Instance {
    pub fn new(kind: Kind, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut inst = Self::empty(kind, n)?;
        for (u, v) in edges {
            inst.check_pair(u, v)?;
            if inst.is_unit(u, v) {
                return invalid(format!("duplicate pair {u} {v}"));
            }
            inst.set_unit(u, v, true);
        }
        Ok(inst)
    }

    /// Instance where every pair costs 2.
    pub fn empty(kind: Kind, n: usize) -> Result<Self> {
        if n < 3 {
            return invalid(format!("need at least 3 vertices, got {n}"));
        }
        Ok(Self {
            kind,
            n,
            unit: vec![false; n * n],
        })
    }

    /// Builds an instance from a cost predicate over canonical pairs.
    pub fn from_fn(kind: Kind, n: usize, mut is_unit: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut inst = Self::empty(kind, n)?;
        for (u, v) in inst.pairs() {
            if is_unit(u, v) {
                inst.set_unit(u, v, true);
            }
        }
        Ok(inst)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_unit(&self, u: usize, v: usize) -> bool {
        self.unit[u * self.n + v]
    }

    /// Cost of a pair; callers guarantee `u != v` and both in range.
    pub fn cost(&self, u: usize, v: usize) -> u32 {
        debug_assert!(u != v && u < self.n && v < self.n);
        if self.is_unit(u, v) {
            1
        } else {
            2
        }
    }

    pub fn edge_cost(&self, u: usize, v: usize) -> Result<u32> {
        self.check_pair(u, v)?;
        Ok(self.cost(u, v))
    }

    pub(crate) fn set_unit(&mut self, u: usize, v: usize, unit: bool) {
        self.unit[u * self.n + v] = unit;
        if self.kind == Kind::Symmetric {
            self.unit[v * self.n + u] = unit;
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return invalid(format!("vertex out of range in pair {u} {v} (n = {})", self.n));
        }
        if u == v {
            return invalid(format!("self-loop at {u}"));
        }
        Ok(())
    }

    /// All variable pairs in canonical order: `u < v` for symmetric
    /// instances, every ordered `u != v` otherwise.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.kind, self.n)
    }

    pub fn unit_edges(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|&(u, v)| self.is_unit(u, v)).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (lineno, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (kind, n) = match parts.as_slice() {
            ["TSP12", kind, n] => {
                let kind = match *kind {
                    "sym" => Kind::Symmetric,
                    "asym" => Kind::Asymmetric,
                    other => return Err(format_err(lineno, format!("unknown kind {other:?}"))),
                };
                let n: usize = n.parse().map_err(|_| format_err(lineno, "bad vertex count"))?;
                (kind, n)
            }
            _ => return Err(format_err(lineno, "expected `TSP12 <sym|asym> <n>`")),
        };
        let mut inst = Self::empty(kind, n).map_err(|e| format_err(lineno, e.to_string()))?;
        for (lineno, line) in lines {
            let (u, v) = parse_pair(lineno, line)?;
            inst.check_pair(u, v).map_err(|e| format_err(lineno, e.to_string()))?;
            if inst.is_unit(u, v) {
                return Err(format_err(lineno, format!("duplicate pair {u} {v}")));
            }
            inst.set_unit(u, v, true);
        }
        Ok(inst)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("TSP12 {} {}\n", self.kind.tag(), self.n);
        for (u, v) in self.unit_edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

pub fn pairs(kind: Kind, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let keep = match kind {
                Kind::Symmetric => u < v,
                Kind::Asymmetric => u != v,
            };
            if keep {
                out.push((u, v));
            }
        }
    }
    out
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_pair(lineno: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| format_err(lineno, "expected `u v`"))?
            .parse()
            .map_err(|_| format_err(lineno, "vertex id is not a non-negative integer"))
    };
    let u = next()?;
    let v = next()?;
    if it.next().is_some() {
        return Err(format_err(lineno, "trailing tokens"));
    }
    Ok((u, v))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return invalid(format!("tour is not a permutation of 0..{n}"));
            }
            seen[v] = true;
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Consecutive pairs in traversal order, including the closing one.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |i| (self.order[i], self.order[(i + 1) % n]))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (lineno, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["TOUR", n] => n.parse::<usize>().map_err(|_| format_err(lineno, "bad vertex count"))?,
            _ => return Err(format_err(lineno, "expected `TOUR <n>`")),
        };
        let mut order = Vec::with_capacity(n);
        for (lineno, line) in lines {
            let v = line
                .parse::<usize>()
                .map_err(|_| format_err(lineno, "expected a vertex id"))?;
            order.push(v);
        }
        if order.len() != n {
            return Err(format_err(0, format!("expected {n} vertices, got {}", order.len())));
        }
        Tour::new(order).map_err(|e| format_err(0, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("TOUR {}\n", self.order.len());
        for v in &self.order {
            let _ = writeln!(out, "{v}");
        }
        out
    }
}

pub fn tour_cost(inst: &Instance, tour: &Tour) -> Result<u64> {
    if tour.n() != inst.n() {
        return invalid(format!("tour has {} vertices, instance has {}", tour.n(), inst.n()));
    }
    Ok(tour.steps().map(|(u, v)| inst.cost(u, v) as u64).sum())
}

/// Raw contents of an `LPSOL` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpFile {
    pub n: usize,
    pub values: Vec<((usize, usize), Rational)>,
    pub cuts: Vec<Vec<usize>>,
}

impl LpFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cuts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.trim().strip_prefix("# cut") {
                let set = rest
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| format_err(i + 1, "bad cut vertex"))?;
                cuts.push(set);
            }
        }
        let mut lines = content_lines(text);
        let (lineno, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["LPSOL", n] => n.parse::<usize>().map_err(|_| format_err(lineno, "bad vertex count"))?,
            _ => return Err(format_err(lineno, "expected `LPSOL <n>`")),
        };
        let mut values = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [u, v, q] = parts.as_slice() else {
                return Err(format_err(lineno, "expected `u v num/den`"));
            };
            let (u, v) = parse_pair(lineno, &format!("{u} {v}"))?;
            if u >= n || v >= n || u == v {
                return Err(format_err(lineno, format!("bad pair {u} {v}")));
            }
            let q = rational::parse(q).ok_or_else(|| format_err(lineno, "bad rational"))?;
            if !seen.insert((u, v)) {
                return Err(format_err(lineno, format!("duplicate pair {u} {v}")));
            }
            values.push(((u, v), q));
        }
        for cut in &cuts {
            if cut.iter().any(|&v| v >= n) {
                return Err(format_err(0, "cut vertex out of range"));
            }
        }
        Ok(Self { n, values, cuts })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("LPSOL {}\n", self.n);
        for ((u, v), q) in &self.values {
            let _ = writeln!(out, "{u} {v} {}", rational::to_frac_string(q));
        }
        for cut in &self.cuts {
            out.push_str("# cut");
            for v in cut {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}
