use std::fmt::Write as _;

use super::assign::assignment_feasible;
use super::oracle::{exact_opt, OPT_LIMIT};
use crate::instance::tour_cost;
use crate::lp::{solve_ser, solve_ser_plus, Flags};
use crate::matching::{run_algorithm1_on, run_directed_on};
use crate::rational::{frac, int, Rational};
use crate::tour::{complete_directed, complete_to_tour};
use crate::{Instance, Kind, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct ReportOptions {
    /// Compute the exact optimum (limited to small orders).
    pub oracle: bool,
}

/// Outcome of one class bound for the pipeline tour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub kind: Kind,
    pub n: usize,
    pub opt: Option<u64>,
    pub opt_ser: Rational,
    pub opt_ser_plus: Rational,
    pub gap_ser: Option<Rational>,
    pub gap_ser_plus: Option<Rational>,
    pub flags: Flags,
    pub components: usize,
    pub tour_cost: u64,
    pub ratio: Rational,
    pub verdicts: Vec<Verdict>,
    /// `(alpha, feasible)` when an assignment check was requested.
    pub assignment: Option<(Rational, bool)>,
}

/// Solves SER and SER⁺, runs the matching pipeline, completes a tour and
/// evaluates the class bounds that apply.
pub fn gap_report(inst: &Instance, opts: ReportOptions, alpha: Option<&Rational>) -> Result<GapReport> {
    let n = inst.n();
    let ser = solve_ser(inst)?;
    let plus = solve_ser_plus(inst, &ser)?;
    let flags = plus.flags;
    let (components, tour, assignment) = match inst.kind() {
        Kind::Symmetric => {
            let run = run_algorithm1_on(&plus)?;
            let tour = complete_to_tour(&run.matching, inst)?;
            let assignment = match alpha {
                Some(a) => Some((a.clone(), assignment_feasible(&plus, &run.matching, a)?.is_some())),
                None => None,
            };
            (run.matching.components().len(), tour, assignment)
        }
        Kind::Asymmetric => {
            let run = run_directed_on(&plus)?;
            let tour = complete_directed(&run.matching, inst)?;
            (run.matching.components().len(), tour, None)
        }
    };
    let cost = tour_cost(inst, &tour)?;
    let ratio = int(cost as i64) / plus.objective.clone();
    let opt = if opts.oracle && n <= OPT_LIMIT {
        Some(exact_opt(inst)?)
    } else {
        None
    };
    let gap = |d: &Rational| opt.map(|o| int(o as i64) / d.clone());

    let mut classes: Vec<(&str, Rational)> = Vec::new();
    if flags.unit_support_cost {
        match inst.kind() {
            Kind::Symmetric => {
                classes.push(("general", frac(5, 4)));
                if flags.half_integral {
                    classes.push(("half_integral", frac(7, 6)));
                }
                if flags.subcubic_support {
                    classes.push(("subcubic", frac(10, 9)));
                }
            }
            Kind::Asymmetric => {
                classes.push(("general", frac(3, 2)));
                if flags.half_integral {
                    classes.push(("half_integral", frac(4, 3)));
                }
            }
        }
    }
    let verdicts = classes
        .into_iter()
        .map(|(name, bound)| Verdict {
            name: name.to_string(),
            holds: ratio <= bound,
            bound,
        })
        .collect();
    Ok(GapReport {
        kind: inst.kind(),
        n,
        opt,
        gap_ser: gap(&ser.objective),
        gap_ser_plus: gap(&plus.objective),
        opt_ser: ser.objective,
        opt_ser_plus: plus.objective,
        flags,
        components,
        tour_cost: cost,
        ratio,
        verdicts,
        assignment,
    })
}

impl GapReport {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("kind", self.kind.tag().to_string());
        put("n", self.n.to_string());
        put("opt_ser", self.opt_ser.to_string());
        put("opt_ser_plus", self.opt_ser_plus.to_string());
        if let Some(o) = self.opt {
            put("opt", o.to_string());
        }
        if let Some(g) = &self.gap_ser {
            put("gap_ser", g.to_string());
        }
        if let Some(g) = &self.gap_ser_plus {
            put("gap_ser_plus", g.to_string());
        }
        put("half_integral", self.flags.half_integral.to_string());
        put("subcubic_support", self.flags.subcubic_support.to_string());
        put("unit_support_cost", self.flags.unit_support_cost.to_string());
        put("components", self.components.to_string());
        put("tour_cost", self.tour_cost.to_string());
        put("ratio", self.ratio.to_string());
        for v in &self.verdicts {
            let verdict = if v.holds { "holds" } else { "fails" };
            put(&format!("bound_{}", v.name), format!("{} {verdict}", v.bound));
        }
        if let Some((a, ok)) = &self.assignment {
            put("assignment_alpha", a.to_string());
            put("assignment_feasible", ok.to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn fig1b_gap() {
        let r = gap_report(&gen::fig1b(), ReportOptions { oracle: true }, None).unwrap();
        assert_eq!(r.gap_ser, Some(frac(6, 5)));
        assert!(r.to_text().contains("gap_ser = 6/5"));
    }

    #[test]
    fn fig1a_gap() {
        let r = gap_report(&gen::fig1a(), ReportOptions { oracle: true }, Some(&int(4))).unwrap();
        assert_eq!(r.gap_ser, Some(frac(10, 9)));
        assert!(r.verdicts.iter().all(|v| v.holds));
    }

    #[test]
    fn complete_unit_graph_has_gap_one() {
        let inst = Instance::from_fn(Kind::Symmetric, 4, |_, _| true).unwrap();
        let r = gap_report(&inst, ReportOptions { oracle: true }, None).unwrap();
        assert_eq!(r.gap_ser, Some(int(1)));
        assert!(r.gap_ser.clone() >= r.gap_ser_plus.clone());
    }
}
