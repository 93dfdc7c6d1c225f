//! The symmetric improvement loop and the directed pipeline.

use std::fmt::Write as _;

use super::directed::basic_improvements;
use super::improve::{find_improvement, ImproveOptions};
use super::singleton::directed_step;
use super::{unit_directed_matching, unit_matching, DirectedTwoMatching, Potential, TwoMatching};
use crate::error::{breach, invalid};
use crate::lp::{solve_ser, solve_ser_plus, LpSolution};
use crate::{Instance, Kind, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub index: usize,
    pub rule: &'static str,
    pub potential: Potential,
}

impl Step {
    pub fn trace_line(&self) -> String {
        format!("step {} rule {} potential {}", self.index, self.rule, self.potential)
    }
}

/// Result of an improvement run: the LP solution, the fixpoint matching
/// and every step taken.
#[derive(Clone, Debug)]
pub struct Run<M> {
    pub solution: LpSolution,
    pub matching: M,
    pub steps: Vec<Step>,
}

impl<M> Run<M> {
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let _ = writeln!(out, "{}", s.trace_line());
        }
        out
    }
}

fn step_cap(n: usize) -> usize {
    (n as u64).saturating_pow(5).min(usize::MAX as u64) as usize
}

fn ser_plus(inst: &Instance) -> Result<LpSolution> {
    let base = solve_ser(inst)?;
    solve_ser_plus(inst, &base)
}

/// Solves SER and SER⁺ for a symmetric instance, then improves the
/// 2-matching of 1-edges to a fixpoint.
pub fn run_algorithm1(inst: &Instance) -> Result<Run<TwoMatching>> {
    if inst.kind() != Kind::Symmetric {
        return invalid("the improvement loop needs a symmetric instance");
    }
    run_algorithm1_on(&ser_plus(inst)?)
}

/// The improvement loop on a given feasible LP solution.
pub fn run_algorithm1_on(x: &LpSolution) -> Result<Run<TwoMatching>> {
    if x.kind != Kind::Symmetric {
        return invalid("the improvement loop needs a symmetric solution");
    }
    let sup = x.support();
    let opts = ImproveOptions {
        special_three_cycle: x.flags.half_integral,
        enforce_end_degree: true,
    };
    let mut m = unit_matching(x)?;
    let ones = x.one_edges();
    let mut steps = Vec::new();
    let cap = step_cap(x.n);
    while let Some(imp) = find_improvement(&m, &sup, opts)? {
        let before = m.potential();
        let after = imp.matching.potential();
        if !after.improves_on(&before) {
            return breach(format!("rule {} did not decrease the potential", imp.rule));
        }
        if !imp.matching.within(&sup) {
            return breach(format!("rule {} left the support", imp.rule));
        }
        steps.push(Step {
            index: steps.len() + 1,
            rule: imp.rule,
            potential: after,
        });
        log::debug!("{}", steps[steps.len() - 1].trace_line());
        m = imp.matching;
        if steps.len() > cap {
            return breach(format!("step cap {cap} exceeded"));
        }
    }
    if !m.contains_all(&ones) {
        log::warn!("fixpoint does not contain every 1-edge");
    }
    Ok(Run {
        solution: x.clone(),
        matching: m,
        steps,
    })
}

/// The directed pipeline: basic improvements and singleton removal on the
/// support of the SER⁺ optimum.
pub fn run_directed(inst: &Instance) -> Result<Run<DirectedTwoMatching>> {
    if inst.kind() != Kind::Asymmetric {
        return invalid("the directed pipeline needs an asymmetric instance");
    }
    run_directed_on(&ser_plus(inst)?)
}

pub fn run_directed_on(x: &LpSolution) -> Result<Run<DirectedTwoMatching>> {
    if x.kind != Kind::Asymmetric {
        return invalid("the directed pipeline needs an asymmetric solution");
    }
    let sup = x.support();
    let ones = x.one_edges();
    let mut m = unit_directed_matching(x)?;
    let mut steps = Vec::new();
    let cap = step_cap(x.n);
    loop {
        let before = m.potential();
        let basic = basic_improvements(&m, &sup.out, false)
            .into_iter()
            .find(|c| c.potential().improves_on(&before) && c.contains_all(&ones));
        let (next, rule) = match basic {
            Some(c) => (c, "basic"),
            None if !m.singletons().is_empty() => match directed_step(&m, &sup.out)? {
                Some(c) => (c, "lemma3"),
                None => break,
            },
            None => break,
        };
        let after = next.potential();
        if !after.improves_on(&before) {
            return breach(format!("rule {rule} did not decrease the potential"));
        }
        if !next.contains_all(&ones) {
            return breach(format!("rule {rule} dropped a 1-arc"));
        }
        steps.push(Step {
            index: steps.len() + 1,
            rule,
            potential: after,
        });
        m = next;
        if steps.len() > cap {
            return breach(format!("step cap {cap} exceeded"));
        }
    }
    Ok(Run {
        solution: x.clone(),
        matching: m,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::tour::complete_directed;

    #[test]
    fn fig1a_reaches_few_components() {
        let run = run_algorithm1(&gen::fig1a()).unwrap();
        assert!(run.matching.components().len() <= 2);
        let mut prev = unit_matching(&run.solution).unwrap().potential();
        for s in &run.steps {
            assert!(s.potential < prev);
            prev = s.potential;
        }
        assert_eq!(run.trace().lines().count(), run.steps.len());
        assert!(run.steps[0].trace_line().starts_with("step 1 rule "));
    }

    #[test]
    fn complete_unit_k4_gives_one_cycle() {
        let inst = Instance::from_fn(Kind::Symmetric, 4, |_, _| true).unwrap();
        let run = run_algorithm1(&inst).unwrap();
        let comps = run.matching.components();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].cycle);
    }

    #[test]
    fn kinds_are_checked() {
        assert!(run_algorithm1(&gen::fig1b()).is_err());
        assert!(run_directed(&gen::fig1a()).is_err());
    }

    #[test]
    fn directed_fig1b() {
        let inst = gen::fig1b();
        let run = run_directed(&inst).unwrap();
        assert!(run.matching.contains_all(&run.solution.one_edges()));
        let tour = complete_directed(&run.matching, &inst).unwrap();
        let cost = crate::instance::tour_cost(&inst, &tour).unwrap();
        assert!((6..=8).contains(&cost));
    }

    #[test]
    fn trace_format() {
        let s = Step {
            index: 3,
            rule: "lemma4b",
            potential: Potential {
                components: 2,
                cycles: 1,
                edges_in_cycles: 4,
                singletons: 0,
                size_two_components: 0,
            },
        };
        assert_eq!(s.trace_line(), "step 3 rule lemma4b potential 2,1,4,0,0");
    }
}
