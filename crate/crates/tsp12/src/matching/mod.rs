//! 2-matchings in the LP support and the improvement engine.

pub mod algorithm;
pub mod altpath;
pub mod directed;
pub mod improve;
pub mod singleton;
pub mod undirected;

use std::cmp::{Ordering, Reverse};
use std::fmt;

pub use algorithm::{run_algorithm1, run_algorithm1_on, run_directed, run_directed_on, Run, Step};
pub use altpath::AltPath;
pub use directed::DirectedTwoMatching;
pub use improve::{find_improvement, ImproveOptions};
pub use undirected::{Structure, TwoMatching};

/// Lexicographic progress measure: fewer components, then more cycles, more
/// edges in cycles, fewer singletons, fewer two-vertex components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Potential {
    pub components: usize,
    pub cycles: usize,
    pub edges_in_cycles: usize,
    pub singletons: usize,
    pub size_two_components: usize,
}

impl Potential {
    fn key(&self) -> (usize, Reverse<usize>, Reverse<usize>, usize, usize) {
        (
            self.components,
            Reverse(self.cycles),
            Reverse(self.edges_in_cycles),
            self.singletons,
            self.size_two_components,
        )
    }

    /// True when `self` is an improvement over `other`.
    pub fn improves_on(&self, other: &Potential) -> bool {
        self < other
    }
}

impl Ord for Potential {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Potential {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.components, self.cycles, self.edges_in_cycles, self.singletons, self.size_two_components
        )
    }
}

/// A component listed in traversal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub cycle: bool,
}

pub(crate) fn potential_of(components: &[Component]) -> Potential {
    let cycles: Vec<&Component> = components.iter().filter(|c| c.cycle).collect();
    Potential {
        components: components.len(),
        cycles: cycles.len(),
        edges_in_cycles: cycles.iter().map(|c| c.vertices.len()).sum(),
        singletons: components.iter().filter(|c| c.vertices.len() == 1).count(),
        size_two_components: components.iter().filter(|c| c.vertices.len() == 2).count(),
    }
}

/// The 2-matching of all pairs with LP value one.
pub fn unit_matching(x: &crate::lp::LpSolution) -> crate::Result<TwoMatching> {
    TwoMatching::from_edges(x.n, x.one_edges())
}

pub fn unit_directed_matching(x: &crate::lp::LpSolution) -> crate::Result<DirectedTwoMatching> {
    DirectedTwoMatching::from_arcs(x.n, x.one_edges())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_order() {
        let p = |c, y, e, s, t| Potential {
            components: c,
            cycles: y,
            edges_in_cycles: e,
            singletons: s,
            size_two_components: t,
        };
        assert!(p(2, 0, 0, 0, 0).improves_on(&p(3, 3, 9, 0, 0)));
        assert!(p(2, 1, 3, 0, 0).improves_on(&p(2, 0, 0, 0, 0)));
        assert!(p(2, 1, 4, 1, 0).improves_on(&p(2, 1, 3, 0, 0)));
        assert!(p(2, 1, 3, 0, 0).improves_on(&p(2, 1, 3, 1, 0)));
        assert!(p(2, 1, 3, 0, 0).improves_on(&p(2, 1, 3, 0, 1)));
        assert!(!p(2, 1, 3, 0, 1).improves_on(&p(2, 1, 3, 0, 1)));
        assert_eq!(p(1, 2, 3, 4, 5).to_string(), "1,2,3,4,5");
    }
}
