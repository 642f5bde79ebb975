//! Slot-by-slot reference scheduler.
//!
//! Time advances in fixed quanta. At every slot boundary the greedy
//! assignment is recomputed; a job that runs out of work inside a slot is
//! back-dated to its exact completion instant, but its processor stays idle
//! until the next boundary. When every true event instant lies on the
//! quantum grid the result coincides with the event-driven simulator.

use std::collections::BTreeSet;

use crate::engine::{assign_instant, Schedule, Segment};
use crate::error::{Error, Result};
use crate::model::{ensure_valid, ExecutionScenario, JobSet, Platform};
use crate::rational::Rational;

/// First grid point `k * quantum` that is `>= t`.
fn grid_ceil(t: Rational, quantum: Rational) -> Result<Rational> {
    let slots = t.checked_div(quantum)?.ceil();
    Ok(Rational::integer(slots).checked_mul(quantum)?)
}

pub fn quantum_oracle(
    jobs: &JobSet,
    platform: &Platform,
    scenario: &ExecutionScenario,
    quantum: Rational,
) -> Result<Schedule> {
    if !quantum.is_positive() {
        return Err(Error::NonPositiveQuantum(quantum));
    }
    ensure_valid(jobs, platform, scenario)?;
    let n = jobs.len();
    let m = platform.processors();
    let all: BTreeSet<usize> = (0..m).collect();
    let mut remaining = scenario.actual().to_vec();
    let mut start: Vec<Option<Rational>> = vec![None; n];
    let mut finish: Vec<Option<Rational>> = vec![None; n];
    let mut segments: Vec<Segment> = Vec::new();

    for (i, job) in jobs.iter().enumerate() {
        if remaining[i].is_zero() {
            start[i] = Some(job.release);
            finish[i] = Some(job.release);
        }
    }

    let mut now = match jobs.iter().map(|j| j.release).min() {
        Some(first) => grid_ceil(first, quantum)?,
        None => Rational::ZERO,
    };
    while finish.iter().any(Option::is_none) {
        let active: Vec<usize> = (0..n)
            .filter(|&i| finish[i].is_none() && jobs.jobs()[i].release <= now)
            .collect();
        if active.is_empty() {
            let next = jobs
                .iter()
                .enumerate()
                .filter(|(i, _)| finish[*i].is_none())
                .map(|(_, j)| j.release)
                .min()
                .expect("an unfinished job exists");
            now = grid_ceil(next, quantum)?;
            continue;
        }

        let slot_end = now.checked_add(quantum)?;
        for (job, p) in assign_instant(&active, &all, platform)? {
            let rate = platform.rate(job, p);
            start[job].get_or_insert(now);
            let capacity = rate.checked_mul(quantum)?;
            let end = if capacity >= remaining[job] {
                let done = now.checked_add(remaining[job].checked_div(rate)?)?;
                remaining[job] = Rational::ZERO;
                finish[job] = Some(done);
                done
            } else {
                remaining[job] = remaining[job].checked_sub(capacity)?;
                slot_end
            };
            let extended = segments
                .iter_mut()
                .rev()
                .find(|s| s.job == job && s.processor == p && s.end == now);
            match extended {
                Some(seg) => seg.end = end,
                None => segments.push(Segment {
                    job,
                    processor: p,
                    start: now,
                    end,
                }),
            }
        }
        now = slot_end;
    }

    segments.sort_by_key(|s| (s.start, s.processor));
    let finish: Vec<Rational> = finish.into_iter().flatten().collect();
    let start: Vec<Rational> = start.into_iter().flatten().collect();
    let event_instants: Vec<Rational> = jobs
        .iter()
        .map(|j| j.release)
        .chain(finish.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let deadline_misses = jobs
        .iter()
        .enumerate()
        .filter(|(i, j)| !j.meets_deadline(finish[*i]))
        .map(|(i, _)| i)
        .collect();
    Ok(Schedule {
        processors: m,
        segments,
        start,
        finish,
        event_instants,
        deadline_misses,
        scenario: scenario.clone(),
    })
}
