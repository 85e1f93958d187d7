//! Online multiprocessor scheduling with testing.
//!
//! Jobs arrive one at a time with an upper bound `u` on their processing time
//! and a test length `t`. An online algorithm decides on arrival whether to
//! run a job untested (cost `u`) or test it first (cost `t + p`), and on which
//! machine. This crate provides the GCL family of barely randomized
//! algorithms, the exact offline optimum, the lower-bound constructions, and
//! exhaustive verifiers for the associated competitive ratios.

pub mod adversary;
pub mod checks;
pub mod corpus;
pub mod error;
pub mod game;
pub mod model;
pub mod offline;
pub mod policy;
pub mod scheduler;
pub mod verifier;

pub use error::{Error, Result};
pub use game::{AdaptiveGame, AdversaryRule, Instance, Member, RandomizedFamily};
pub use model::{makespan, rho, Decision, FixedInstance, Job, Observation, OnlineInstance, Schedule};
pub use offline::{makespan_lower_bound, optimal_makespan, OfflineResult};
pub use policy::{
    component_decision, gcl_bound, mixture_weights, phi, revised_two_machine_params, thresholds,
    Mixture, PolicyParams, RevisedParams, Size, Verdict,
};
pub use scheduler::{
    component_makespan, expected_job_time, gcl_expected_makespan, list_schedule, Played, TestPolicy,
};
pub use verifier::{BoundKind, BoundReport, EnumConfig, Strategy};
