//! Two job sets with the same total demand whose schedules free a processor
//! at different instants, which is why a demand-based argument cannot bound
//! processor availability on multiprocessors.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{availability, simulate, Schedule};
use crate::error::Result;
use crate::model::{ExecutionScenario, Job, JobSet, Platform};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleSide {
    pub name: String,
    pub jobs: JobSet,
    pub schedule: Schedule,
    /// Total execution requirement released in the demand window.
    pub demand: Rational,
    /// Earliest instant, from the first release on, with an idle processor.
    pub earliest_availability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub processors: usize,
    pub window: (Rational, Rational),
    pub first: CounterexampleSide,
    pub second: CounterexampleSide,
    pub demands_equal: bool,
    pub availabilities_differ: bool,
}

impl CounterexampleReport {
    /// Equal demand but different availability: the refutation holds.
    pub fn refutes_demand_argument(&self) -> bool {
        self.demands_equal && self.availabilities_differ
    }
}

/// Sum of execution times of jobs released in `[from, to)`.
pub fn total_demand(
    jobs: &JobSet,
    scenario: &ExecutionScenario,
    from: Rational,
    to: Rational,
) -> Result<Rational> {
    let mut total = Rational::ZERO;
    for (i, job) in jobs.iter().enumerate() {
        if from <= job.release && job.release < to {
            total = total.checked_add(scenario.get(i))?;
        }
    }
    Ok(total)
}

/// Earliest instant at or after `from` where some processor is idle.
///
/// Availability only changes at segment boundaries, so those (and `from`
/// itself) are the only candidates.
pub fn earliest_availability(schedule: &Schedule, from: Rational) -> Option<Rational> {
    let candidates: BTreeSet<Rational> = std::iter::once(from)
        .chain(schedule.event_instants.iter().copied())
        .chain(schedule.segments.iter().flat_map(|s| [s.start, s.end]))
        .filter(|&t| t >= from)
        .collect();
    candidates
        .into_iter()
        .find(|&t| !availability(schedule, t).is_empty())
}

fn side(
    name: &str,
    jobs: JobSet,
    platform: &Platform,
    window: (Rational, Rational),
) -> Result<CounterexampleSide> {
    let scenario = ExecutionScenario::maximal(&jobs);
    let schedule = simulate(&jobs, platform, &scenario)?;
    let first_release = jobs
        .iter()
        .map(|j| j.release)
        .min()
        .unwrap_or(Rational::ZERO);
    let earliest =
        earliest_availability(&schedule, first_release).expect("every schedule eventually idles");
    Ok(CounterexampleSide {
        name: name.to_string(),
        demand: total_demand(&jobs, &scenario, window.0, window.1)?,
        jobs,
        schedule,
        earliest_availability: earliest,
    })
}

/// Builds J = {(0,3,inf), (0,3,inf)} and J' = {(1,5,inf), (1,1,inf)} on two
/// identical processors and compares their demand over `[0, 2)` with the
/// first instant a processor becomes idle.
pub fn reproduce_counterexample() -> Result<CounterexampleReport> {
    let int = Rational::integer;
    let window = (int(0), int(2));
    let platform = Platform::identical(2, 2);
    let first = side(
        "J",
        JobSet::new(vec![
            Job::exact("J1", int(0), int(3), None),
            Job::exact("J2", int(0), int(3), None),
        ]),
        &platform,
        window,
    )?;
    let second = side(
        "J'",
        JobSet::new(vec![
            Job::exact("J3", int(1), int(5), None),
            Job::exact("J4", int(1), int(1), None),
        ]),
        &platform,
        window,
    )?;
    Ok(CounterexampleReport {
        processors: platform.processors(),
        window,
        demands_equal: first.demand == second.demand,
        availabilities_differ: first.earliest_availability != second.earliest_availability,
        first,
        second,
    })
}
