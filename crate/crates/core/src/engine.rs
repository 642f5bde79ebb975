//! Event-driven construction of the work-conserving fixed-job-priority
//! schedule.
//!
//! The assignment of jobs to processors only changes when a job is released
//! or completes, so the simulator jumps from one such instant to the next
//! and computes completion instants exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ensure_valid, processor_order, ExecutionScenario, JobSet, Platform};
use crate::rational::Rational;

/// Job `job` runs on `processor` during `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub job: usize,
    pub processor: usize,
    pub start: Rational,
    pub end: Rational,
}

impl Segment {
    pub fn contains(&self, t: Rational) -> bool {
        self.start <= t && t < self.end
    }

    pub fn duration(&self) -> Result<Rational> {
        Ok(self.end.checked_sub(self.start)?)
    }
}

/// Job-to-processor map produced by one greedy assignment round.
pub type Assignment = BTreeMap<usize, usize>;

/// The complete schedule of a job set under one execution scenario.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Schedule {
    pub processors: usize,
    /// Maximal runs, sorted by `(start, processor)`.
    pub segments: Vec<Segment>,
    pub start: Vec<Rational>,
    pub finish: Vec<Rational>,
    /// Releases and completions, sorted and deduplicated.
    pub event_instants: Vec<Rational>,
    pub deadline_misses: Vec<usize>,
    pub scenario: ExecutionScenario,
}

impl Schedule {
    pub fn job_count(&self) -> usize {
        self.start.len()
    }

    pub fn segments_of(&self, job: usize) -> impl Iterator<Item = &Segment> + '_ {
        self.segments.iter().filter(move |s| s.job == job)
    }

    /// The job running on `processor` at `t`, if any.
    pub fn running_on(&self, processor: usize, t: Rational) -> Option<usize> {
        self.segments
            .iter()
            .find(|s| s.processor == processor && s.contains(t))
            .map(|s| s.job)
    }

    /// Work completed by `job` during `[0, t)`.
    pub fn work_done(&self, platform: &Platform, job: usize, t: Rational) -> Result<Rational> {
        let mut total = Rational::ZERO;
        for seg in self.segments_of(job) {
            if seg.start >= t {
                continue;
            }
            let end = seg.end.min(t);
            let span = end.checked_sub(seg.start)?;
            total = total.checked_add(span.checked_mul(platform.rate(job, seg.processor))?)?;
        }
        Ok(total)
    }

    /// Completion instant of the last job to finish.
    pub fn makespan(&self) -> Option<Rational> {
        self.finish.iter().copied().max()
    }
}

/// Greedy work-conserving assignment: in priority order, each active job
/// takes the first free processor of its processor order; a job with no
/// free eligible processor waits.
pub fn assign_instant(
    active: &[usize],
    free: &BTreeSet<usize>,
    platform: &Platform,
) -> Result<Assignment> {
    let orders = active
        .iter()
        .map(|&job| processor_order(platform, job).map(|order| (job, order)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(assign_with_orders(active, free, |job| &orders[&job]))
}

pub(crate) fn assign_with_orders<'a>(
    active: &[usize],
    free: &BTreeSet<usize>,
    order_of: impl Fn(usize) -> &'a Vec<usize>,
) -> Assignment {
    let mut free = free.clone();
    let mut assignment = Assignment::new();
    for &job in active {
        if free.is_empty() {
            break;
        }
        if let Some(&p) = order_of(job).iter().find(|p| free.contains(p)) {
            free.remove(&p);
            assignment.insert(job, p);
        }
    }
    assignment
}

/// Builds the unique work-conserving schedule of `jobs` on `platform` when
/// each job executes for exactly `scenario`'s time.
pub fn simulate(
    jobs: &JobSet,
    platform: &Platform,
    scenario: &ExecutionScenario,
) -> Result<Schedule> {
    ensure_valid(jobs, platform, scenario)?;
    let n = jobs.len();
    let m = platform.processors();
    let orders = (0..n)
        .map(|i| processor_order(platform, i))
        .collect::<Result<Vec<_>>>()?;
    let releases: BTreeSet<Rational> = jobs.iter().map(|j| j.release).collect();
    let all_processors: BTreeSet<usize> = (0..m).collect();

    let mut remaining = scenario.actual().to_vec();
    let mut start: Vec<Option<Rational>> = vec![None; n];
    let mut finish: Vec<Option<Rational>> = vec![None; n];
    let mut tracker = SegmentTracker::new(m);

    let Some(mut now) = releases.first().copied() else {
        return Ok(Schedule {
            processors: m,
            segments: Vec::new(),
            start: Vec::new(),
            finish: Vec::new(),
            event_instants: Vec::new(),
            deadline_misses: Vec::new(),
            scenario: scenario.clone(),
        });
    };

    loop {
        for (i, job) in jobs.iter().enumerate() {
            if job.release == now && remaining[i].is_zero() && finish[i].is_none() {
                start[i] = Some(now);
                finish[i] = Some(now);
            }
        }
        let active: Vec<usize> = (0..n)
            .filter(|&i| jobs.jobs()[i].release <= now && finish[i].is_none())
            .collect();
        let assignment = assign_with_orders(&active, &all_processors, |i| &orders[i]);
        tracker.apply(now, &assignment);

        let mut next = releases
            .range((Bound::Excluded(now), Bound::Unbounded))
            .next()
            .copied();
        for (&job, &p) in &assignment {
            start[job].get_or_insert(now);
            let done_at = now.checked_add(remaining[job].checked_div(platform.rate(job, p))?)?;
            next = Some(next.map_or(done_at, |t| t.min(done_at)));
        }
        let Some(next) = next else { break };

        let elapsed = next.checked_sub(now)?;
        for (&job, &p) in &assignment {
            let work = elapsed.checked_mul(platform.rate(job, p))?;
            remaining[job] = remaining[job].checked_sub(work)?;
            if remaining[job].is_zero() {
                finish[job] = Some(next);
            }
        }
        now = next;
    }
    tracker.apply(now, &Assignment::new());

    let start: Vec<Rational> = start
        .into_iter()
        .map(|s| s.expect("every job starts"))
        .collect();
    let finish: Vec<Rational> = finish
        .into_iter()
        .map(|f| f.expect("every job finishes"))
        .collect();
    let event_instants: Vec<Rational> = releases
        .iter()
        .copied()
        .chain(finish.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let deadline_misses = jobs
        .iter()
        .enumerate()
        .filter(|(i, job)| !job.meets_deadline(finish[*i]))
        .map(|(i, _)| i)
        .collect();

    Ok(Schedule {
        processors: m,
        segments: tracker.finish(),
        start,
        finish,
        event_instants,
        deadline_misses,
        scenario: scenario.clone(),
    })
}

/// Accumulates per-processor runs, merging consecutive instants where a
/// processor keeps the same job.
pub(crate) struct SegmentTracker {
    open: Vec<Option<(usize, Rational)>>,
    closed: Vec<Segment>,
}

impl SegmentTracker {
    pub(crate) fn new(processors: usize) -> Self {
        SegmentTracker {
            open: vec![None; processors],
            closed: Vec::new(),
        }
    }

    /// From `now` on, processors run the jobs in `assignment` and the rest
    /// are idle.
    pub(crate) fn apply(&mut self, now: Rational, assignment: &Assignment) {
        let mut running: Vec<Option<usize>> = vec![None; self.open.len()];
        for (&job, &p) in assignment {
            running[p] = Some(job);
        }
        for (p, slot) in self.open.iter_mut().enumerate() {
            let current = slot.map(|(job, _)| job);
            if current == running[p] {
                continue;
            }
            if let Some((job, since)) = slot.take() {
                if since < now {
                    self.closed.push(Segment {
                        job,
                        processor: p,
                        start: since,
                        end: now,
                    });
                }
            }
            *slot = running[p].map(|job| (job, now));
        }
    }

    pub(crate) fn finish(mut self) -> Vec<Segment> {
        self.closed.sort_by_key(|s| (s.start, s.processor));
        self.closed
    }
}

/// Processors idle at `t`.
pub fn availability(schedule: &Schedule, t: Rational) -> BTreeSet<usize> {
    let mut free: BTreeSet<usize> = (0..schedule.processors).collect();
    for seg in &schedule.segments {
        if seg.contains(t) {
            free.remove(&seg.processor);
        }
    }
    free
}

/// Start instant of the lowest-priority job.
pub fn start_time(schedule: &Schedule) -> Option<Rational> {
    schedule.start.last().copied()
}

/// Completion instant of the lowest-priority job.
pub fn finish_time(schedule: &Schedule) -> Option<Rational> {
    schedule.finish.last().copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::Job;
    use crate::rational::rat;

    fn int(v: i128) -> Rational {
        Rational::integer(v)
    }

    fn row(values: &[i128]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    fn seg(job: usize, processor: usize, start: i128, end: i128) -> Segment {
        Segment {
            job,
            processor,
            start: int(start),
            end: int(end),
        }
    }

    fn run_max(jobs: &JobSet, platform: &Platform) -> Schedule {
        simulate(jobs, platform, &ExecutionScenario::maximal(jobs)).unwrap()
    }

    fn abc() -> (JobSet, Platform) {
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(2), None),
            Job::exact("B", int(0), int(2), None),
            Job::exact("C", int(0), int(3), None),
        ]);
        let platform = Platform::unrelated(2, vec![row(&[1, 0]), row(&[1, 2]), row(&[1, 1])]);
        (jobs, platform)
    }

    #[test]
    fn greedy_assignment_examples() {
        let both: BTreeSet<usize> = [0, 1].into();
        let identical = Platform::identical(2, 2);
        let a = assign_instant(&[0, 1], &both, &identical).unwrap();
        assert_eq!(a, [(0, 0), (1, 1)].into());

        let fast_second = Platform::unrelated(2, vec![row(&[1, 2])]);
        assert_eq!(
            assign_instant(&[0], &both, &fast_second).unwrap(),
            [(0, 1)].into()
        );

        // B prefers P1 (rate 3) but A, with higher priority, takes it first.
        let p = Platform::unrelated(2, vec![row(&[1, 1]), row(&[3, 1])]);
        assert_eq!(
            assign_instant(&[0, 1], &both, &p).unwrap(),
            [(0, 0), (1, 1)].into()
        );

        let only_first: BTreeSet<usize> = [0].into();
        assert_eq!(
            assign_instant(&[0, 1], &only_first, &identical).unwrap(),
            [(0, 0)].into()
        );
    }

    #[test]
    fn two_jobs_fill_both_processors_until_three() {
        let jobs = JobSet::new(vec![
            Job::exact("J1", int(0), int(3), None),
            Job::exact("J2", int(0), int(3), None),
        ]);
        let s = run_max(&jobs, &Platform::identical(2, 2));
        assert_eq!(s.start, vec![int(0), int(0)]);
        assert_eq!(s.finish, vec![int(3), int(3)]);
        assert_eq!(s.segments, vec![seg(0, 0, 0, 3), seg(1, 1, 0, 3)]);
        for t in [rat(0, 1), rat(1, 2), int(2), rat(29, 10)] {
            assert!(availability(&s, t).is_empty());
        }
        assert_eq!(availability(&s, int(3)), [0, 1].into());
    }

    #[test]
    fn single_job_unit_rate() {
        let jobs = JobSet::new(vec![Job::exact("J", int(0), int(4), Some(int(10)))]);
        let s = run_max(&jobs, &Platform::identical(1, 1));
        assert_eq!(s.segments, vec![seg(0, 0, 0, 4)]);
        assert_eq!(start_time(&s), Some(int(0)));
        assert_eq!(finish_time(&s), Some(int(4)));
        assert!(s.deadline_misses.is_empty());
        assert_eq!(s.event_instants, vec![int(0), int(4)]);
    }

    #[test]
    fn migration_to_freed_processor() {
        let (jobs, platform) = abc();
        let s = run_max(&jobs, &platform);
        assert_eq!(
            s.segments,
            vec![
                seg(0, 0, 0, 2),
                seg(1, 1, 0, 1),
                seg(2, 1, 1, 2),
                seg(2, 0, 2, 4)
            ]
        );
        assert_eq!(s.start, vec![int(0), int(0), int(1)]);
        assert_eq!(s.finish, vec![int(2), int(1), int(4)]);
        assert_eq!(s.event_instants, vec![int(0), int(1), int(2), int(4)]);
    }

    #[test]
    fn second_counterexample_set() {
        let jobs = JobSet::new(vec![
            Job::exact("J3", int(1), int(5), None),
            Job::exact("J4", int(1), int(1), None),
        ]);
        let s = run_max(&jobs, &Platform::identical(2, 2));
        assert_eq!(start_time(&s), Some(int(1)));
        assert_eq!(finish_time(&s), Some(int(2)));
        assert_eq!(availability(&s, int(2)), [1].into());
        assert_eq!(availability(&s, rat(1, 2)), [0, 1].into());
        assert_eq!(availability(&s, int(100)), [0, 1].into());
    }

    #[test]
    fn zero_work_job_starts_and_finishes_at_release() {
        let jobs = JobSet::new(vec![Job::exact("Z", int(7), int(0), None)]);
        let s = run_max(&jobs, &Platform::identical(1, 1));
        assert!(s.segments.is_empty());
        assert_eq!(start_time(&s), Some(int(7)));
        assert_eq!(finish_time(&s), Some(int(7)));
        assert_eq!(s.event_instants, vec![int(7)]);
    }

    #[test]
    fn fractional_completion_instants() {
        // Rate 3 on a single processor: 2 units of work take 2/3.
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(2), None),
            Job::exact("B", rat(1, 3), int(1), Some(int(1))),
        ]);
        let p = Platform::uniform(2, vec![int(3)]);
        let s = run_max(&jobs, &p);
        assert_eq!(s.finish, vec![rat(2, 3), rat(1, 1)]);
        assert_eq!(s.start[1], rat(2, 3));
        assert!(s.deadline_misses.is_empty());
        assert_eq!(s.work_done(&p, 1, int(5)).unwrap(), int(1));
    }

    #[test]
    fn deadline_miss_reported_not_fatal() {
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(4), None),
            Job::exact("B", int(0), int(1), Some(int(2))),
        ]);
        let s = run_max(&jobs, &Platform::identical(2, 1));
        assert_eq!(s.finish, vec![int(4), int(5)]);
        assert_eq!(s.deadline_misses, vec![1]);
    }

    #[test]
    fn idle_gap_between_releases() {
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(1), None),
            Job::exact("B", int(5), int(1), None),
        ]);
        let s = run_max(&jobs, &Platform::identical(2, 1));
        assert_eq!(s.segments, vec![seg(0, 0, 0, 1), seg(1, 0, 5, 6)]);
        assert_eq!(availability(&s, int(3)), [0].into());
    }

    #[test]
    fn preemption_by_later_higher_priority_job() {
        let jobs = JobSet::new(vec![
            Job::exact("H", int(1), int(1), None),
            Job::exact("L", int(0), int(3), None),
        ]);
        let s = run_max(&jobs, &Platform::identical(2, 1));
        assert_eq!(
            s.segments,
            vec![seg(1, 0, 0, 1), seg(0, 0, 1, 2), seg(1, 0, 2, 4)]
        );
        assert_eq!(s.start, vec![int(1), int(0)]);
        assert_eq!(s.finish, vec![int(2), int(4)]);
    }

    #[test]
    fn rejects_invalid_input() {
        let jobs = JobSet::new(vec![Job::new("A", int(0), int(3), int(2), None)]);
        let err = simulate(
            &jobs,
            &Platform::identical(1, 1),
            &ExecutionScenario::new(vec![int(2)]),
        );
        assert!(matches!(err, Err(Error::InvalidInstance(_))));

        let jobs = JobSet::new(vec![Job::new("A", int(0), int(1), int(2), None)]);
        let err = simulate(
            &jobs,
            &Platform::identical(1, 1),
            &ExecutionScenario::new(vec![int(3)]),
        );
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn empty_job_set() {
        let jobs = JobSet::default();
        let s = simulate(
            &jobs,
            &Platform::identical(0, 2),
            &ExecutionScenario::new(vec![]),
        )
        .unwrap();
        assert!(s.segments.is_empty());
        assert_eq!(start_time(&s), None);
        assert_eq!(availability(&s, int(0)), [0, 1].into());
    }
}
