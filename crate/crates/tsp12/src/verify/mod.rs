//! Certificates and exact oracles.

mod assign;
mod oracle;
mod report;

pub use assign::{assignment_feasible, wolsey_check, Assignment};
pub use oracle::{exact_opt, min_components, unit_hamiltonian_cycle, MIN_COMPONENTS_LIMIT, OPT_LIMIT};
pub use report::{gap_report, GapReport, ReportOptions, Verdict};
