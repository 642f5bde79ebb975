//! Exact simulation of global preemptive fixed-job-priority scheduling on
//! unrelated multiprocessor platforms, with checkers for predictability and
//! processor-availability inclusion.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod gantt;
pub mod generator;
pub mod io;
pub mod model;
pub mod rational;

pub use engine::{
    assign_instant, availability, finish_time, simulate, start_time, Schedule, Segment,
};
pub use error::{Error, Result};
pub use model::{
    processor_order, validate, validate_scenario, ExecutionScenario, Job, JobSet, Platform,
    PlatformKind, Violation,
};
pub use rational::{rat, ArithmeticError, Rational};
