//! Optimal subgradient algorithm (OSGA) for nonsmooth convex minimization
//! over simple domains and functional constraints.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod objective;
pub mod point;
pub mod problems;
pub mod projections;
pub mod solver;
pub mod subproblem;
pub mod trace;

pub use error::{Error, Result};
pub use objective::{FnObjective, Objective};
pub use point::Point;
pub use projections::{Domain, DomainKind};
pub use solver::{OsgaParams, OsgaState};
pub use subproblem::{ProxParams, Relaxation, SubproblemMethod, SubproblemSolution};
pub use trace::{SolveResult, StopReason, TraceRecord};

/// Matrix types used by the public API, e.g. [`Domain::affine`].
pub use nalgebra;
