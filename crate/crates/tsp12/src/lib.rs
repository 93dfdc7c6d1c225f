//! Exact linear-programming structure of (1,2)-TSP.
//!
//! The crate solves the subtour elimination relaxation over exact rationals,
//! runs the 2-matching improvement algorithm on the LP support, certifies
//! integrality-gap bounds with independent oracles, builds gap-amplified
//! instances and generates the clique reduction gadget graphs.

pub mod error;
pub mod gadget;
pub mod gen;
pub mod instance;
pub mod lp;
pub mod matching;
pub mod par;
pub mod rational;
pub mod tour;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{Instance, Kind, Tour};
pub use lp::{LpSolution, SupportGraph};
pub use rational::Rational;
