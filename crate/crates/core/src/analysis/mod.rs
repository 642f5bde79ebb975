//! Checkers for the predictability of fixed-job-priority schedules.
//!
//! For every prefix of a job set the checkers simulate the all-best-case,
//! the all-worst-case and each supplied scenario, then compare start and
//! finish instants of the lowest-priority job, processor availability over
//! time, and the cumulative progress of that job.

mod counterexample;
mod invariants;
mod oracle;

use std::collections::BTreeSet;

use serde::Serialize;

pub use counterexample::{
    earliest_availability, reproduce_counterexample, total_demand, CounterexampleReport,
    CounterexampleSide,
};
pub use invariants::{check_schedule, InvariantViolation};
pub use oracle::quantum_oracle;

use crate::engine::{availability, finish_time, simulate, start_time, Schedule, Segment};
use crate::error::Result;
use crate::model::{ExecutionScenario, JobSet, Platform};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StartFinish {
    pub start: Rational,
    pub finish: Rational,
}

impl StartFinish {
    fn of(schedule: &Schedule) -> Option<StartFinish> {
        Some(StartFinish {
            start: start_time(schedule)?,
            finish: finish_time(schedule)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioOutcome {
    /// Index into the scenario list passed to [`check_predictability`].
    pub scenario: usize,
    pub actual: StartFinish,
    pub sandwich_ok: bool,
    pub inclusion_ok: bool,
    pub progression_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixReport {
    /// Number of jobs in the prefix, starting at 1.
    pub prefix: usize,
    pub minimal: StartFinish,
    pub maximal: StartFinish,
    pub scenarios: Vec<ScenarioOutcome>,
    pub sandwich_ok: bool,
    pub lemma_ok: bool,
    pub progression_ok: bool,
    /// Whether the all-worst-case prefix meets every deadline.
    pub schedulable_plus: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    StartBeforeMinimal,
    StartAfterMaximal,
    FinishBeforeMinimal,
    FinishAfterMaximal,
    AvailabilityInclusion,
    Progression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub instant: Option<Rational>,
    pub maximal_available: Option<BTreeSet<usize>>,
    pub actual_available: Option<BTreeSet<usize>>,
    pub maximal_segments: Vec<Segment>,
    pub actual_segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyViolation {
    pub prefix: usize,
    pub scenario: usize,
    pub kind: ViolationKind,
    pub detail: String,
    /// False when the all-worst-case prefix misses a deadline; such
    /// violations fall outside the predictability claim.
    pub counts_against_theorem: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredictabilityReport {
    pub prefixes: Vec<PrefixReport>,
    pub violations: Vec<PropertyViolation>,
}

impl PredictabilityReport {
    /// Start/finish sandwich violations on prefixes whose worst case is
    /// schedulable.
    pub fn theorem_violations(&self) -> impl Iterator<Item = &PropertyViolation> {
        self.violations.iter().filter(|v| {
            v.counts_against_theorem
                && matches!(
                    v.kind,
                    ViolationKind::StartBeforeMinimal
                        | ViolationKind::StartAfterMaximal
                        | ViolationKind::FinishBeforeMinimal
                        | ViolationKind::FinishAfterMaximal
                )
        })
    }

    pub fn inclusion_violations(&self) -> impl Iterator<Item = &PropertyViolation> {
        self.violations
            .iter()
            .filter(|v| v.kind == ViolationKind::AvailabilityInclusion)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Instants at which two piecewise-constant schedules must be compared:
/// the union of their event instants and the midpoint of every consecutive
/// pair.
pub fn sample_instants(a: &Schedule, b: &Schedule) -> Result<Vec<Rational>> {
    let events: BTreeSet<Rational> = a
        .event_instants
        .iter()
        .chain(&b.event_instants)
        .copied()
        .collect();
    let events: Vec<Rational> = events.into_iter().collect();
    let mut out = Vec::with_capacity(events.len() * 2);
    for (k, &t) in events.iter().enumerate() {
        out.push(t);
        if let Some(&next) = events.get(k + 1) {
            out.push(t.midpoint(next)?);
        }
    }
    Ok(out)
}

/// First sampled instant where a processor idle under `maximal` is busy
/// under `actual`.
pub fn inclusion_witness(
    maximal: &Schedule,
    actual: &Schedule,
) -> Result<Option<InclusionWitness>> {
    for t in sample_instants(maximal, actual)? {
        let plus = availability(maximal, t);
        let here = availability(actual, t);
        if !plus.is_subset(&here) {
            return Ok(Some(InclusionWitness {
                instant: t,
                maximal_available: plus,
                actual_available: here,
            }));
        }
    }
    Ok(None)
}

/// First sampled instant up to the actual completion of `job` where it has
/// done less work under `actual` than under `maximal`.
pub fn progression_witness(
    platform: &Platform,
    maximal: &Schedule,
    actual: &Schedule,
    job: usize,
) -> Result<Option<Rational>> {
    let until = actual.finish[job];
    for t in sample_instants(maximal, actual)? {
        if t > until {
            break;
        }
        if actual.work_done(platform, job, t)? < maximal.work_done(platform, job, t)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionWitness {
    pub instant: Rational,
    pub maximal_available: BTreeSet<usize>,
    pub actual_available: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixInclusion {
    pub prefix: usize,
    pub holds: bool,
    pub witness: Option<InclusionWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub prefixes: Vec<PrefixInclusion>,
}

impl InclusionReport {
    pub fn holds(&self) -> bool {
        self.prefixes.iter().all(|p| p.holds)
    }

    pub fn first_violation(&self) -> Option<&PrefixInclusion> {
        self.prefixes.iter().find(|p| !p.holds)
    }
}

/// Checks, for every prefix, that processors idle in the all-worst-case
/// schedule are idle in the schedule of `scenario` too.
pub fn check_availability_inclusion(
    jobs: &JobSet,
    platform: &Platform,
    scenario: &ExecutionScenario,
) -> Result<InclusionReport> {
    let mut prefixes = Vec::with_capacity(jobs.len());
    for len in 1..=jobs.len() {
        let (sub_jobs, sub_platform) = (jobs.prefix(len)?, platform.prefix(len)?);
        let maximal = simulate(
            &sub_jobs,
            &sub_platform,
            &ExecutionScenario::maximal(&sub_jobs),
        )?;
        let actual = simulate(&sub_jobs, &sub_platform, &scenario.prefix(len))?;
        let witness = inclusion_witness(&maximal, &actual)?;
        prefixes.push(PrefixInclusion {
            prefix: len,
            holds: witness.is_none(),
            witness,
        });
    }
    Ok(InclusionReport { prefixes })
}

/// Simulates every prefix under the best case, the worst case and each of
/// `scenarios`, and reports every broken sandwich, inclusion or progression
/// property.
pub fn check_predictability(
    jobs: &JobSet,
    platform: &Platform,
    scenarios: &[ExecutionScenario],
) -> Result<PredictabilityReport> {
    let mut prefixes = Vec::with_capacity(jobs.len());
    let mut violations = Vec::new();

    for len in 1..=jobs.len() {
        let lowest = len - 1;
        let (sub_jobs, sub_platform) = (jobs.prefix(len)?, platform.prefix(len)?);
        let minimal = simulate(
            &sub_jobs,
            &sub_platform,
            &ExecutionScenario::minimal(&sub_jobs),
        )?;
        let maximal = simulate(
            &sub_jobs,
            &sub_platform,
            &ExecutionScenario::maximal(&sub_jobs),
        )?;
        let lo = StartFinish::of(&minimal).expect("nonempty prefix");
        let hi = StartFinish::of(&maximal).expect("nonempty prefix");
        let schedulable_plus = maximal.deadline_misses.is_empty();

        let mut outcomes = Vec::with_capacity(scenarios.len());
        for (index, scenario) in scenarios.iter().enumerate() {
            let actual = simulate(&sub_jobs, &sub_platform, &scenario.prefix(len))?;
            let here = StartFinish::of(&actual).expect("nonempty prefix");
            let mut report = |kind, detail: String, instant, sets: Option<(_, _)>| {
                let (maximal_available, actual_available) = match sets {
                    Some((a, b)) => (Some(a), Some(b)),
                    None => (None, None),
                };
                violations.push(PropertyViolation {
                    prefix: len,
                    scenario: index,
                    kind,
                    detail,
                    counts_against_theorem: schedulable_plus,
                    witness: Witness {
                        instant,
                        maximal_available,
                        actual_available,
                        maximal_segments: maximal.segments.clone(),
                        actual_segments: actual.segments.clone(),
                    },
                });
            };

            let checks = [
                (
                    here.start < lo.start,
                    ViolationKind::StartBeforeMinimal,
                    format!("S = {} < S- = {}", here.start, lo.start),
                ),
                (
                    here.start > hi.start,
                    ViolationKind::StartAfterMaximal,
                    format!("S = {} > S+ = {}", here.start, hi.start),
                ),
                (
                    here.finish < lo.finish,
                    ViolationKind::FinishBeforeMinimal,
                    format!("F = {} < F- = {}", here.finish, lo.finish),
                ),
                (
                    here.finish > hi.finish,
                    ViolationKind::FinishAfterMaximal,
                    format!("F = {} > F+ = {}", here.finish, hi.finish),
                ),
            ];
            let mut sandwich_ok = true;
            for (broken, kind, detail) in checks {
                if broken {
                    sandwich_ok = false;
                    report(kind, detail, None, None);
                }
            }

            let inclusion = inclusion_witness(&maximal, &actual)?;
            let inclusion_ok = inclusion.is_none();
            if let Some(w) = inclusion {
                report(
                    ViolationKind::AvailabilityInclusion,
                    format!(
                        "at t = {}: idle under worst case {:?}, idle under scenario {:?}",
                        w.instant, w.maximal_available, w.actual_available
                    ),
                    Some(w.instant),
                    Some((w.maximal_available, w.actual_available)),
                );
            }

            let progression = progression_witness(&sub_platform, &maximal, &actual, lowest)?;
            let progression_ok = progression.is_none();
            if let Some(t) = progression {
                report(
                    ViolationKind::Progression,
                    format!(
                        "at t = {t}: job {lowest} has done less work than under the worst case"
                    ),
                    Some(t),
                    None,
                );
            }

            outcomes.push(ScenarioOutcome {
                scenario: index,
                actual: here,
                sandwich_ok,
                inclusion_ok,
                progression_ok,
            });
        }

        prefixes.push(PrefixReport {
            prefix: len,
            minimal: lo,
            maximal: hi,
            sandwich_ok: outcomes.iter().all(|o| o.sandwich_ok),
            lemma_ok: outcomes.iter().all(|o| o.inclusion_ok),
            progression_ok: outcomes.iter().all(|o| o.progression_ok),
            scenarios: outcomes,
            schedulable_plus,
        });
    }

    Ok(PredictabilityReport {
        prefixes,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    fn int(v: i128) -> Rational {
        Rational::integer(v)
    }

    #[test]
    fn single_job_monotone() {
        let jobs = JobSet::new(vec![Job::new("J", int(0), int(1), int(4), Some(int(10)))]);
        let platform = Platform::identical(1, 1);
        let report =
            check_predictability(&jobs, &platform, &[ExecutionScenario::new(vec![int(2)])])
                .unwrap();
        let p = &report.prefixes[0];
        assert_eq!(
            p.minimal,
            StartFinish {
                start: int(0),
                finish: int(1)
            }
        );
        assert_eq!(
            p.maximal,
            StartFinish {
                start: int(0),
                finish: int(4)
            }
        );
        assert_eq!(
            p.scenarios[0].actual,
            StartFinish {
                start: int(0),
                finish: int(2)
            }
        );
        assert!(p.sandwich_ok && p.lemma_ok && p.schedulable_plus);
        assert!(report.is_clean());
    }

    #[test]
    fn degenerate_intervals_give_identical_schedules() {
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(2), None),
            Job::exact("B", int(1), int(3), None),
            Job::exact("C", int(0), int(1), None),
        ]);
        let platform = Platform::identical(3, 2);
        let scenario = ExecutionScenario::maximal(&jobs);
        let report =
            check_predictability(&jobs, &platform, std::slice::from_ref(&scenario)).unwrap();
        for p in &report.prefixes {
            assert_eq!(p.minimal, p.maximal);
            assert_eq!(p.scenarios[0].actual, p.maximal);
        }
        let lo = simulate(&jobs, &platform, &ExecutionScenario::minimal(&jobs)).unwrap();
        let hi = simulate(&jobs, &platform, &scenario).unwrap();
        assert_eq!(lo, hi);
        for t in sample_instants(&lo, &hi).unwrap() {
            assert_eq!(availability(&lo, t), availability(&hi, t));
        }
        assert!(check_availability_inclusion(&jobs, &platform, &scenario)
            .unwrap()
            .holds());
    }

    #[test]
    fn inclusion_witness_detects_busy_processor() {
        // Hand-built pair where the "maximal" schedule leaves P2 idle while the
        // "actual" one keeps it busy.
        let jobs = JobSet::new(vec![Job::exact("A", int(0), int(1), None)]);
        let platform = Platform::identical(1, 2);
        let a = simulate(&jobs, &platform, &ExecutionScenario::maximal(&jobs)).unwrap();
        let mut b = a.clone();
        b.segments[0].processor = 1;
        let w = inclusion_witness(&a, &b).unwrap().unwrap();
        assert_eq!(w.instant, int(0));
        assert_eq!(w.maximal_available, [1].into());
        assert_eq!(w.actual_available, [0].into());
    }

    #[test]
    fn sample_instants_interleave_midpoints() {
        let jobs = JobSet::new(vec![Job::exact("A", int(0), int(2), None)]);
        let s = simulate(
            &jobs,
            &Platform::identical(1, 1),
            &ExecutionScenario::maximal(&jobs),
        )
        .unwrap();
        assert_eq!(
            sample_instants(&s, &s).unwrap(),
            vec![int(0), int(1), int(2)]
        );
    }

    #[test]
    fn unschedulable_worst_case_is_not_counted() {
        // Two jobs on one processor; the second misses its deadline under the
        // worst case, so its prefix is outside the theorem's scope.
        let jobs = JobSet::new(vec![
            Job::new("A", int(0), int(1), int(3), None),
            Job::new("B", int(0), int(1), int(1), Some(int(2))),
        ]);
        let report = check_predictability(
            &jobs,
            &Platform::identical(2, 1),
            &[ExecutionScenario::new(vec![int(2), int(1)])],
        )
        .unwrap();
        assert!(report.prefixes[0].schedulable_plus);
        assert!(!report.prefixes[1].schedulable_plus);
        assert!(report.prefixes.iter().all(|p| p.sandwich_ok));
    }
}
