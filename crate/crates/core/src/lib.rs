//! Asymptotic termination-time analysis for vector addition systems with states.
//!
//! Given a VASS, the analysis decides whether its worst-case termination time is
//! linear (with the exact constant), `Θ(n^k)`, bounded below by `Ω(n^k)`, or
//! infinite, and produces checkable witnesses for each verdict: ranking and
//! quasi-ranking functions for upper bounds, non-negative multi-cycles for
//! non-termination.

pub mod decompose;
pub mod farkas;
pub mod generate;
pub mod graph;
pub mod linear;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod ratlp;
pub mod samples;
pub mod verify;

pub use decompose::{classify, classify_general, BoundKind, Degree, Report, SccReport, Verdict};
pub use farkas::FarkasVerdict;
pub use graph::{MultiCycle, Path};
pub use linear::{Computation, LinMap, LinearResult};
pub use model::{parse_vass, Config, ModelError, Transition, Vass};
pub use oracle::{Curve, RunLength};
pub use rational::{RatMatrix, RatVec, Rational};
pub use ratlp::{solve_lp, LpOutcome, LpProblem};
pub use verify::{Role, VerifyResult};
