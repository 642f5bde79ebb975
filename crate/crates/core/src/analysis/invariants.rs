//! Structural checks on a finished schedule, independent of how it was
//! produced.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{Schedule, Segment};
use crate::error::Result;
use crate::model::{JobSet, Platform};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantViolation {
    EmptySegment {
        segment: Segment,
    },
    JobOverlap {
        job: usize,
        first: Segment,
        second: Segment,
    },
    ProcessorOverlap {
        processor: usize,
        first: Segment,
        second: Segment,
    },
    IneligibleProcessor {
        segment: Segment,
    },
    RunsBeforeRelease {
        segment: Segment,
    },
    WorkMismatch {
        job: usize,
        expected: Rational,
        executed: Rational,
    },
    StartMismatch {
        job: usize,
        recorded: Rational,
        observed: Rational,
    },
    FinishMismatch {
        job: usize,
        recorded: Rational,
        observed: Rational,
    },
    /// `job` is active and waiting at `instant` although `processor`,
    /// eligible for it, is idle or runs a lower-priority job.
    PriorityInversion {
        job: usize,
        instant: Rational,
        processor: usize,
        running: Option<usize>,
    },
}

fn overlaps(mut segments: Vec<Segment>) -> Option<(Segment, Segment)> {
    segments.sort_by_key(|s| (s.start, s.end));
    segments
        .windows(2)
        .find(|w| w[1].start < w[0].end)
        .map(|w| (w[0], w[1]))
}

/// Checks segment sanity, the absence of job parallelism and processor
/// sharing, exact work accounting against the schedule's scenario, and
/// that no active job waits while an eligible processor is idle or serves
/// a lower-priority job.
pub fn check_schedule(
    jobs: &JobSet,
    platform: &Platform,
    schedule: &Schedule,
) -> Result<Vec<InvariantViolation>> {
    use InvariantViolation::*;
    let mut out = Vec::new();

    for seg in &schedule.segments {
        if seg.start >= seg.end {
            out.push(EmptySegment { segment: *seg });
        }
        if !platform.rate(seg.job, seg.processor).is_positive() {
            out.push(IneligibleProcessor { segment: *seg });
        }
        if seg.start < jobs.jobs()[seg.job].release {
            out.push(RunsBeforeRelease { segment: *seg });
        }
    }

    for job in 0..jobs.len() {
        let mine: Vec<Segment> = schedule.segments_of(job).copied().collect();
        if let Some((first, second)) = overlaps(mine.clone()) {
            out.push(JobOverlap { job, first, second });
        }
        let mut executed = Rational::ZERO;
        for seg in &mine {
            let span = seg.end.checked_sub(seg.start)?;
            executed =
                executed.checked_add(span.checked_mul(platform.rate(job, seg.processor))?)?;
        }
        let expected = schedule.scenario.get(job);
        if executed != expected {
            out.push(WorkMismatch {
                job,
                expected,
                executed,
            });
        }
        let release = jobs.jobs()[job].release;
        let observed_start = mine.iter().map(|s| s.start).min().unwrap_or(release);
        let observed_finish = mine.iter().map(|s| s.end).max().unwrap_or(release);
        if schedule.start[job] != observed_start {
            out.push(StartMismatch {
                job,
                recorded: schedule.start[job],
                observed: observed_start,
            });
        }
        if schedule.finish[job] != observed_finish {
            out.push(FinishMismatch {
                job,
                recorded: schedule.finish[job],
                observed: observed_finish,
            });
        }
    }

    for processor in 0..schedule.processors {
        let mine: Vec<Segment> = schedule
            .segments
            .iter()
            .filter(|s| s.processor == processor)
            .copied()
            .collect();
        if let Some((first, second)) = overlaps(mine) {
            out.push(ProcessorOverlap {
                processor,
                first,
                second,
            });
        }
    }

    // The assignment is constant between consecutive breakpoints.
    let breakpoints: BTreeSet<Rational> = schedule
        .event_instants
        .iter()
        .copied()
        .chain(schedule.segments.iter().flat_map(|s| [s.start, s.end]))
        .collect();
    for &t in &breakpoints {
        let running: Vec<Option<usize>> = (0..schedule.processors)
            .map(|p| schedule.running_on(p, t))
            .collect();
        for (job, spec) in jobs.iter().enumerate() {
            let active = spec.release <= t && t < schedule.finish[job];
            if !active || running.contains(&Some(job)) {
                continue;
            }
            for (p, current) in running.iter().enumerate() {
                if !platform.rate(job, p).is_positive() {
                    continue;
                }
                if current.is_none_or(|other| other > job) {
                    out.push(PriorityInversion {
                        job,
                        instant: t,
                        processor: p,
                        running: *current,
                    });
                }
            }
        }
    }
    Ok(out)
}
