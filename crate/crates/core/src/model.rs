//! Jobs, platforms and execution scenarios.
//!
//! Priority is positional: `jobs[0]` of a [`JobSet`] has the highest
//! priority and every later job is strictly lower. Processors are indexed
//! from zero; rendering code shows them as `P1..Pm`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    pub release: Rational,
    /// Best-case execution requirement.
    pub bcet: Rational,
    /// Worst-case execution requirement.
    pub wcet: Rational,
    /// Absolute deadline; `None` is an infinite deadline.
    pub deadline: Option<Rational>,
}

impl Job {
    pub fn new(
        id: impl Into<String>,
        release: Rational,
        bcet: Rational,
        wcet: Rational,
        deadline: Option<Rational>,
    ) -> Self {
        Job {
            id: id.into(),
            release,
            bcet,
            wcet,
            deadline,
        }
    }

    /// A job whose execution requirement is known exactly.
    pub fn exact(
        id: impl Into<String>,
        release: Rational,
        exec: Rational,
        deadline: Option<Rational>,
    ) -> Self {
        Job::new(id, release, exec, exec, deadline)
    }

    pub fn meets_deadline(&self, finish: Rational) -> bool {
        self.deadline.is_none_or(|d| finish <= d)
    }
}

/// Jobs in strictly decreasing priority order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobSet {
    jobs: Vec<Job>,
}

impl JobSet {
    pub fn new(jobs: Vec<Job>) -> Self {
        JobSet { jobs }
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Job> {
        self.jobs.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Job> {
        self.jobs.iter()
    }

    /// The `len` highest-priority jobs.
    pub fn prefix(&self, len: usize) -> Result<JobSet> {
        if len == 0 || len > self.jobs.len() {
            return Err(Error::PrefixOutOfRange {
                requested: len,
                len: self.jobs.len(),
            });
        }
        Ok(JobSet::new(self.jobs[..len].to_vec()))
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }
}

impl<'a> IntoIterator for &'a JobSet {
    type Item = &'a Job;
    type IntoIter = std::slice::Iter<'a, Job>;

    fn into_iter(self) -> Self::IntoIter {
        self.jobs.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlatformKind {
    Identical,
    Uniform,
    Unrelated,
}

impl fmt::Display for PlatformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlatformKind::Identical => "identical",
            PlatformKind::Uniform => "uniform",
            PlatformKind::Unrelated => "unrelated",
        })
    }
}

impl std::str::FromStr for PlatformKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identical" => Ok(PlatformKind::Identical),
            "uniform" => Ok(PlatformKind::Uniform),
            "unrelated" => Ok(PlatformKind::Unrelated),
            other => Err(format!("unknown platform kind {other:?}")),
        }
    }
}

/// Execution rates `rates[job][processor]`: running job `i` on processor
/// `j` for `t` time units completes `rates[i][j] * t` units of work.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Platform {
    kind: PlatformKind,
    processors: usize,
    rates: Vec<Vec<Rational>>,
    speeds: Option<Vec<Rational>>,
}

impl Platform {
    /// `processors` unit-speed processors for `jobs` jobs.
    pub fn identical(jobs: usize, processors: usize) -> Self {
        Platform {
            kind: PlatformKind::Identical,
            processors,
            rates: vec![vec![Rational::ONE; processors]; jobs],
            speeds: None,
        }
    }

    /// Per-processor speeds shared by every job.
    pub fn uniform(jobs: usize, speeds: Vec<Rational>) -> Self {
        Platform {
            kind: PlatformKind::Uniform,
            processors: speeds.len(),
            rates: vec![speeds.clone(); jobs],
            speeds: Some(speeds),
        }
    }

    /// An arbitrary job × processor rate matrix. Row lengths are checked by
    /// [`validate`], not here.
    pub fn unrelated(processors: usize, rates: Vec<Vec<Rational>>) -> Self {
        Platform {
            kind: PlatformKind::Unrelated,
            processors,
            rates,
            speeds: None,
        }
    }

    pub fn kind(&self) -> PlatformKind {
        self.kind
    }

    pub fn processors(&self) -> usize {
        self.processors
    }

    pub fn rates(&self) -> &[Vec<Rational>] {
        &self.rates
    }

    pub fn rate(&self, job: usize, processor: usize) -> Rational {
        self.rates[job][processor]
    }

    /// Processor speeds of a uniform platform.
    pub fn speeds(&self) -> Option<&[Rational]> {
        self.speeds.as_deref()
    }

    /// Keeps the rows of the `len` highest-priority jobs.
    pub fn prefix(&self, len: usize) -> Result<Platform> {
        if len == 0 || len > self.rates.len() {
            return Err(Error::PrefixOutOfRange {
                requested: len,
                len: self.rates.len(),
            });
        }
        Ok(Platform {
            rates: self.rates[..len].to_vec(),
            ..self.clone()
        })
    }

    /// Resizes an identical or uniform platform to `jobs` rows. Unrelated
    /// platforms are returned unchanged.
    pub fn with_job_count(&self, jobs: usize) -> Platform {
        match self.kind {
            PlatformKind::Identical => Platform::identical(jobs, self.processors),
            PlatformKind::Uniform => {
                let speeds = self.speeds.clone().unwrap_or_default();
                Platform::uniform(jobs, speeds)
            }
            PlatformKind::Unrelated => self.clone(),
        }
    }
}

/// Eligible processors of job `job`, fastest first, equal rates ordered by
/// ascending processor index. Rate-zero processors are left out.
pub fn processor_order(platform: &Platform, job: usize) -> Result<Vec<usize>> {
    let row = platform.rates.get(job).ok_or(Error::JobIndexOutOfRange {
        index: job,
        len: platform.rates.len(),
    })?;
    let mut order: Vec<usize> = (0..row.len()).filter(|&p| row[p].is_positive()).collect();
    if order.is_empty() {
        return Err(Error::NoEligibleProcessor { job });
    }
    order.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
    Ok(order)
}

/// One actual execution time per job.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecutionScenario {
    actual: Vec<Rational>,
}

impl ExecutionScenario {
    pub fn new(actual: Vec<Rational>) -> Self {
        ExecutionScenario { actual }
    }

    /// Every job runs for its best-case time.
    pub fn minimal(jobs: &JobSet) -> Self {
        ExecutionScenario::new(jobs.iter().map(|j| j.bcet).collect())
    }

    /// Every job runs for its worst-case time.
    pub fn maximal(jobs: &JobSet) -> Self {
        ExecutionScenario::new(jobs.iter().map(|j| j.wcet).collect())
    }

    pub fn actual(&self) -> &[Rational] {
        &self.actual
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn get(&self, job: usize) -> Rational {
        self.actual[job]
    }

    pub fn prefix(&self, len: usize) -> ExecutionScenario {
        ExecutionScenario::new(self.actual[..len.min(self.actual.len())].to_vec())
    }
}

/// A single broken invariant found by [`validate`] or [`validate_scenario`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId {
        id: String,
    },
    NegativeRelease {
        job: usize,
    },
    NegativeBcet {
        job: usize,
    },
    BcetExceedsWcet {
        job: usize,
    },
    DeadlineBeforeRelease {
        job: usize,
    },
    NoProcessors,
    RowCountMismatch {
        jobs: usize,
        rows: usize,
    },
    RowLengthMismatch {
        job: usize,
        expected: usize,
        found: usize,
    },
    NegativeRate {
        job: usize,
        processor: usize,
    },
    NoEligibleProcessor {
        job: usize,
    },
    NotIdentical {
        job: usize,
        processor: usize,
    },
    NotUniform {
        job: usize,
        processor: usize,
    },
    ScenarioLengthMismatch {
        jobs: usize,
        scenario: usize,
    },
    ScenarioOutOfBounds {
        job: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateId { id } => write!(f, "duplicate job id {id:?}"),
            NegativeRelease { job } => write!(f, "job {job}: negative release"),
            NegativeBcet { job } => write!(f, "job {job}: negative bcet"),
            BcetExceedsWcet { job } => write!(f, "job {job}: bcet exceeds wcet"),
            DeadlineBeforeRelease { job } => write!(f, "job {job}: deadline before release"),
            NoProcessors => write!(f, "platform has no processors"),
            RowCountMismatch { jobs, rows } => {
                write!(f, "rate matrix has {rows} rows for {jobs} jobs")
            }
            RowLengthMismatch {
                job,
                expected,
                found,
            } => write!(
                f,
                "job {job}: rate row has {found} entries, expected {expected}"
            ),
            NegativeRate { job, processor } => {
                write!(f, "job {job}: negative rate on processor {processor}")
            }
            NoEligibleProcessor { job } => write!(f, "job {job}: no eligible processor"),
            NotIdentical { job, processor } => write!(
                f,
                "job {job}: identical platform has non-unit rate on processor {processor}"
            ),
            NotUniform { job, processor } => write!(
                f,
                "job {job}: uniform platform rate on processor {processor} differs from its speed"
            ),
            ScenarioLengthMismatch { jobs, scenario } => {
                write!(f, "scenario has {scenario} entries for {jobs} jobs")
            }
            ScenarioOutOfBounds { job } => {
                write!(f, "job {job}: actual execution time outside [bcet, wcet]")
            }
        }
    }
}

/// Checks every job and platform invariant and returns all violations.
pub fn validate(jobs: &JobSet, platform: &Platform) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, job) in jobs.iter().enumerate() {
        if !seen.insert(job.id.as_str()) {
            out.push(Violation::DuplicateId { id: job.id.clone() });
        }
        if job.release.is_negative() {
            out.push(Violation::NegativeRelease { job: i });
        }
        if job.bcet.is_negative() {
            out.push(Violation::NegativeBcet { job: i });
        }
        if job.bcet > job.wcet {
            out.push(Violation::BcetExceedsWcet { job: i });
        }
        if job.deadline.is_some_and(|d| d < job.release) {
            out.push(Violation::DeadlineBeforeRelease { job: i });
        }
    }

    let m = platform.processors;
    if m == 0 {
        out.push(Violation::NoProcessors);
    }
    if platform.rates.len() != jobs.len() {
        out.push(Violation::RowCountMismatch {
            jobs: jobs.len(),
            rows: platform.rates.len(),
        });
    }
    for (i, row) in platform.rates.iter().enumerate() {
        if row.len() != m {
            out.push(Violation::RowLengthMismatch {
                job: i,
                expected: m,
                found: row.len(),
            });
        }
        for (p, rate) in row.iter().enumerate() {
            if rate.is_negative() {
                out.push(Violation::NegativeRate {
                    job: i,
                    processor: p,
                });
            }
            match platform.kind {
                PlatformKind::Identical if *rate != Rational::ONE => {
                    out.push(Violation::NotIdentical {
                        job: i,
                        processor: p,
                    });
                }
                PlatformKind::Uniform => {
                    let speed = platform
                        .speeds
                        .as_ref()
                        .and_then(|s| s.get(p))
                        .copied()
                        .unwrap_or(platform.rates[0][p]);
                    if *rate != speed {
                        out.push(Violation::NotUniform {
                            job: i,
                            processor: p,
                        });
                    }
                }
                _ => {}
            }
        }
        if !row.iter().any(Rational::is_positive) {
            out.push(Violation::NoEligibleProcessor { job: i });
        }
    }
    out
}

/// Checks that `scenario` assigns every job a time within `[bcet, wcet]`.
pub fn validate_scenario(jobs: &JobSet, scenario: &ExecutionScenario) -> Vec<Violation> {
    if scenario.len() != jobs.len() {
        return vec![Violation::ScenarioLengthMismatch {
            jobs: jobs.len(),
            scenario: scenario.len(),
        }];
    }
    jobs.iter()
        .zip(scenario.actual())
        .enumerate()
        .filter(|(_, (job, e))| **e < job.bcet || **e > job.wcet)
        .map(|(i, _)| Violation::ScenarioOutOfBounds { job: i })
        .collect()
}

/// Fails with [`Error::InvalidInstance`] unless the instance and scenario
/// are both valid.
pub fn ensure_valid(
    jobs: &JobSet,
    platform: &Platform,
    scenario: &ExecutionScenario,
) -> Result<()> {
    let mut violations = validate(jobs, platform);
    violations.extend(validate_scenario(jobs, scenario));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(violations))
    }
}
