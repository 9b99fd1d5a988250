//! Simulation library for the beta-Bernoulli bandit alignment problem.
//!
//! An agent faces `N` environment arms and `N` paired human queries. Pulling
//! arm `a` yields `Bernoulli(phi_a)`; querying `a` yields `Bernoulli(theta_a)`
//! and costs reward `-1`. The (unobserved) reward of arm `a` is
//! `phi_a theta_a + (1 - phi_a)(1 - theta_a)`: high when the environment's
//! outcomes line up with what the human prefers.
//!
//! - [`belief`]: actions, observations, conjugate posteriors.
//! - [`environment`]: sampled instances, observations, regret ledger.
//! - [`infotheory`]: digamma, beta-Bernoulli mutual information, E[r*] estimation.
//! - [`ids_solver`]: information-ratio minimization over action distributions.
//! - [`agents`]: greedy, explore-then-exploit, epsilon-greedy, Thompson, mixed Thompson, IDS.
//! - [`harness`]: configs, parallel experiments, aggregation, CSV, verification.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod agents;
pub mod belief;
pub mod environment;
mod error;
pub mod harness;
pub mod ids_solver;
pub mod infotheory;
pub mod rng;

pub use agents::{AgentSpec, DEFAULT_MC_SAMPLES};
pub use belief::{Action, ActionKind, BeliefState, BetaPosterior, Observation};
pub use environment::{ProblemInstance, RegretTrace, TraceRecord};
pub use error::{Error, Result};
pub use ids_solver::{ActionDistribution, IdsSolution};
