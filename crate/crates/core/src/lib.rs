//! Budget-constrained personalized incentive policies.
//!
//! A regulator pays individuals to switch from their preferred alternative to
//! one with a higher social indicator (here, CO2 avoided). Choosing one
//! alternative per individual under a total budget is a multiple-choice
//! knapsack problem. This crate solves it with the classical greedy over
//! LP-extremes and reports, with every solution, a certified bound on the
//! distance to the optimum.
//!
//! Pipeline:
//!
//! 1. [`model`] / [`io`] / [`generator`]: build or load an [`Instance`].
//! 2. [`concavize`]: reduce each individual to its LP-extremes.
//! 3. [`greedy`]: solve for a budget, get the welfare curve, resume with more
//!    budget, or stop early.
//! 4. [`oracle`]: exact solutions for small instances, to check the bound.
//! 5. [`imperfect`]: expected incentives under Gumbel noise and the sequential
//!    proposal simulation.
//!
//! ```
//! use incentive_policy::{concavize_all, solve, Alternative, Individual, Instance};
//!
//! let instance = Instance::new(vec![
//!     Individual::new(1, vec![
//!         Alternative::new(0, 0.0, 0.0),
//!         Alternative::new(1, -1.0, 5.0),
//!         Alternative::new(2, -3.0, 9.0),
//!     ]),
//!     Individual::new(2, vec![Alternative::new(0, 0.0, 0.0), Alternative::new(1, -2.0, 8.0)]),
//! ])?;
//! let profiles = concavize_all(&instance);
//! let result = solve(&profiles, 4.0)?;
//! assert_eq!(result.welfare, 13.0);
//! assert_eq!(result.gap_bound, 2.0);
//! # Ok::<(), incentive_policy::Error>(())
//! ```

pub mod cli;
pub mod concavize;
pub mod error;
pub mod generator;
pub mod greedy;
pub mod imperfect;
pub mod io;
pub mod model;
pub mod oracle;
pub mod report;

pub use concavize::{concavize_all, hull_of, lp_extremes, ExtremeProfile, HullStep};
pub use error::{Error, Result};
pub use generator::{synthesize_population, GeneratorConfig};
pub use greedy::{
    build_step_queue, certify, curve, resume, solve, stop_anytime, Allocation, GreedyResult,
    GreedySolver, SplitItem, Step, WelfareCurve, BUDGET_TOLERANCE,
};
pub use imperfect::{
    expected_weights, gumbel_incentive, simulate_sequential, SimulationReport, StochasticInstance,
};
pub use io::{load_instance, save_instance, Format};
pub use model::{AltId, Alternative, ChoiceSet, IndId, Individual, Instance};
pub use oracle::{exact_dp, exact_enumerate, OracleConfig, OracleMode, OracleSolution};
