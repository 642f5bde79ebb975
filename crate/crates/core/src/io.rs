//! JSON instance and trace files.
//!
//! Rationals are written as JSON integers when integral and as `"p/q"`
//! strings otherwise; floating-point numbers are rejected on input. Output
//! is canonical: identical values always serialize to identical bytes.
//!
//! Instance file:
//!
//! ```json
//! {
//!   "platform": { "kind": "identical", "m": 2 },
//!   "jobs": [
//!     { "id": "J1", "release": 0, "bcet": 2, "wcet": 3, "deadline": null },
//!     { "id": "J2", "release": "1/2", "bcet": 1, "wcet": 1, "deadline": 10 }
//!   ]
//! }
//! ```
//!
//! `platform` may instead be `{ "kind": "uniform", "speeds": [...] }` or
//! `{ "kind": "unrelated", "m": 2, "rates": [[...], ...] }` with one rate
//! row per job. An optional `gen_config` object records how a generated
//! instance was drawn. A `null` deadline is infinite.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Schedule, Segment};
use crate::generator::GenConfig;
use crate::model::{Job, JobSet, Platform, PlatformKind};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}, field `{field}`: {message}")]
    Syntax {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> FormatError {
    FormatError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed: Result<T, _> = serde_path_to_error::deserialize(de);
    parsed.map_err(|err| {
        let field = match err.path().to_string() {
            p if p == "?" || p == "." => "<root>".to_string(),
            p => p,
        };
        let inner = err.into_inner();
        FormatError::Syntax {
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })
}

fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PlatformRecord {
    Identical {
        m: usize,
    },
    Uniform {
        speeds: Vec<Rational>,
    },
    Unrelated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        rates: Vec<Vec<Rational>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRecord {
    id: String,
    release: Rational,
    bcet: Rational,
    wcet: Rational,
    #[serde(default)]
    deadline: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    platform: PlatformRecord,
    jobs: Vec<JobRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gen_config: Option<GenConfig>,
}

/// A job set, its platform and, for generated instances, the generator
/// configuration that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub jobs: JobSet,
    pub platform: Platform,
    pub gen_config: Option<GenConfig>,
}

impl Instance {
    pub fn new(jobs: JobSet, platform: Platform) -> Self {
        Instance {
            jobs,
            platform,
            gen_config: None,
        }
    }
}

pub fn parse_instance_str(text: &str) -> Result<Instance, FormatError> {
    let record: InstanceRecord = from_json(text)?;

    let mut ids = HashSet::new();
    for (i, job) in record.jobs.iter().enumerate() {
        if !ids.insert(job.id.as_str()) {
            return Err(invalid(
                format!("jobs[{i}].id"),
                format!("duplicate job id {:?}", job.id),
            ));
        }
    }
    let n = record.jobs.len();
    let platform = match record.platform {
        PlatformRecord::Identical { m } => Platform::identical(n, m),
        PlatformRecord::Uniform { speeds } => Platform::uniform(n, speeds),
        PlatformRecord::Unrelated { m, rates } => {
            if rates.len() != n {
                return Err(invalid(
                    "platform.rates",
                    format!("{} rate rows for {n} jobs", rates.len()),
                ));
            }
            let m = match (m, rates.first()) {
                (Some(m), _) => m,
                (None, Some(row)) => row.len(),
                (None, None) => {
                    return Err(invalid(
                        "platform.m",
                        "processor count missing and no rate rows",
                    ))
                }
            };
            if let Some(k) = rates.iter().position(|row| row.len() != m) {
                return Err(invalid(
                    format!("platform.rates[{k}]"),
                    format!("{} entries, expected {m}", rates[k].len()),
                ));
            }
            Platform::unrelated(m, rates)
        }
    };
    let jobs = JobSet::new(
        record
            .jobs
            .into_iter()
            .map(|j| Job::new(j.id, j.release, j.bcet, j.wcet, j.deadline))
            .collect(),
    );
    Ok(Instance {
        jobs,
        platform,
        gen_config: record.gen_config,
    })
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance, FormatError> {
    parse_instance_str(&read(path.as_ref())?)
}

pub fn instance_to_string(instance: &Instance) -> String {
    let platform = &instance.platform;
    let platform = match platform.kind() {
        PlatformKind::Identical => PlatformRecord::Identical {
            m: platform.processors(),
        },
        PlatformKind::Uniform => PlatformRecord::Uniform {
            speeds: platform
                .speeds()
                .map(<[Rational]>::to_vec)
                .unwrap_or_else(|| platform.rates().first().cloned().unwrap_or_default()),
        },
        PlatformKind::Unrelated => PlatformRecord::Unrelated {
            m: Some(platform.processors()),
            rates: platform.rates().to_vec(),
        },
    };
    let record = InstanceRecord {
        platform,
        jobs: instance
            .jobs
            .iter()
            .map(|j| JobRecord {
                id: j.id.clone(),
                release: j.release,
                bcet: j.bcet,
                wcet: j.wcet,
                deadline: j.deadline,
            })
            .collect(),
        gen_config: instance.gen_config.clone(),
    };
    to_canonical_json(&record)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), FormatError> {
    write(path.as_ref(), &instance_to_string(instance))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJob {
    pub id: String,
    pub release: Rational,
    pub executed: Rational,
    pub deadline: Option<Rational>,
    pub start: Rational,
    pub finish: Rational,
    pub deadline_missed: bool,
}

/// On-disk form of a [`Schedule`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub processors: usize,
    pub scenario: Vec<Rational>,
    pub jobs: Vec<TraceJob>,
    pub segments: Vec<Segment>,
    pub event_instants: Vec<Rational>,
    pub deadline_misses: Vec<String>,
}

impl TraceFile {
    pub fn new(jobs: &JobSet, schedule: &Schedule) -> Self {
        TraceFile {
            processors: schedule.processors,
            scenario: schedule.scenario.actual().to_vec(),
            jobs: jobs
                .iter()
                .enumerate()
                .map(|(i, job)| TraceJob {
                    id: job.id.clone(),
                    release: job.release,
                    executed: schedule.scenario.get(i),
                    deadline: job.deadline,
                    start: schedule.start[i],
                    finish: schedule.finish[i],
                    deadline_missed: schedule.deadline_misses.contains(&i),
                })
                .collect(),
            segments: schedule.segments.clone(),
            event_instants: schedule.event_instants.clone(),
            deadline_misses: schedule
                .deadline_misses
                .iter()
                .map(|&i| jobs.jobs()[i].id.clone())
                .collect(),
        }
    }
}

pub fn trace_to_string(jobs: &JobSet, schedule: &Schedule) -> String {
    to_canonical_json(&TraceFile::new(jobs, schedule))
}

pub fn write_trace(
    jobs: &JobSet,
    schedule: &Schedule,
    path: impl AsRef<Path>,
) -> Result<(), FormatError> {
    write(path.as_ref(), &trace_to_string(jobs, schedule))
}

pub fn parse_trace_str(text: &str) -> Result<TraceFile, FormatError> {
    from_json(text)
}

/// Canonical JSON for any report type.
pub fn report_to_string<T: Serialize>(report: &T) -> String {
    to_canonical_json(report)
}

/// Reads a scenario file: a JSON array with one execution time per job.
pub fn parse_scenario_str(text: &str) -> Result<crate::model::ExecutionScenario, FormatError> {
    from_json(text)
}

pub fn parse_scenario(
    path: impl AsRef<Path>,
) -> Result<crate::model::ExecutionScenario, FormatError> {
    parse_scenario_str(&read(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::simulate;
    use crate::model::{validate, ExecutionScenario};
    use crate::rational::rat;

    #[test]
    fn identical_platform_expands_to_unit_matrix() {
        let inst = parse_instance_str(
            r#"{"platform": {"kind": "identical", "m": 2},
                "jobs": [{"id": "J1", "release": 0, "bcet": 3, "wcet": 3, "deadline": null},
                         {"id": "J2", "release": 0, "bcet": 3, "wcet": 3, "deadline": null}]}"#,
        )
        .unwrap();
        assert_eq!(inst.platform.processors(), 2);
        assert_eq!(
            inst.platform.rates(),
            &[vec![Rational::ONE; 2], vec![Rational::ONE; 2]]
        );
        assert_eq!(inst.jobs.jobs()[0].deadline, None);
        assert!(validate(&inst.jobs, &inst.platform).is_empty());
    }

    #[test]
    fn rationals_stay_exact() {
        let inst = parse_instance_str(
            r#"{"platform": {"kind": "uniform", "speeds": ["1/2", 3]},
                "jobs": [{"id": "A", "release": "5/2", "bcet": "1/3", "wcet": 2, "deadline": 9}]}"#,
        )
        .unwrap();
        let job = &inst.jobs.jobs()[0];
        assert_eq!(job.release, rat(5, 2));
        assert_eq!(job.bcet, rat(1, 3));
        assert_eq!(job.deadline, Some(Rational::integer(9)));
        assert_eq!(
            inst.platform.speeds().unwrap(),
            &[rat(1, 2), Rational::integer(3)]
        );
    }

    #[test]
    fn malformed_inputs_carry_context() {
        let float = parse_instance_str(
            "{\"platform\": {\"kind\": \"identical\", \"m\": 1},\n\"jobs\": [{\"id\": \"A\", \"release\": 2.5, \"bcet\": 1, \"wcet\": 1}]}",
        )
        .unwrap_err();
        match float {
            FormatError::Syntax { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "jobs[0].release");
            }
            other => panic!("unexpected {other:?}"),
        }

        let bad_rational = parse_instance_str(
            r#"{"platform": {"kind": "identical", "m": 1},
                "jobs": [{"id": "A", "release": "1/0", "bcet": 1, "wcet": 1}]}"#,
        )
        .unwrap_err();
        assert!(
            bad_rational.to_string().contains("zero denominator"),
            "{bad_rational}"
        );

        let kind = parse_instance_str(r#"{"platform": {"kind": "quantum", "m": 1}, "jobs": []}"#)
            .unwrap_err();
        assert!(kind.to_string().contains("quantum"), "{kind}");

        let dup = parse_instance_str(
            r#"{"platform": {"kind": "identical", "m": 1},
                "jobs": [{"id": "A", "release": 0, "bcet": 1, "wcet": 1},
                         {"id": "A", "release": 0, "bcet": 1, "wcet": 1}]}"#,
        )
        .unwrap_err();
        assert!(dup.to_string().contains("jobs[1].id"), "{dup}");

        let dims = parse_instance_str(
            r#"{"platform": {"kind": "unrelated", "rates": [[1, 2], [1]]},
                "jobs": [{"id": "A", "release": 0, "bcet": 1, "wcet": 1},
                         {"id": "B", "release": 0, "bcet": 1, "wcet": 1}]}"#,
        )
        .unwrap_err();
        assert!(dims.to_string().contains("platform.rates[1]"), "{dims}");

        let rows = parse_instance_str(
            r#"{"platform": {"kind": "unrelated", "rates": [[1, 2]]},
                "jobs": [{"id": "A", "release": 0, "bcet": 1, "wcet": 1},
                         {"id": "B", "release": 0, "bcet": 1, "wcet": 1}]}"#,
        )
        .unwrap_err();
        assert!(
            rows.to_string().contains("1 rate rows for 2 jobs"),
            "{rows}"
        );
    }

    #[test]
    fn trace_is_exact_and_canonical() {
        let jobs = JobSet::new(vec![Job::exact("A", Rational::ZERO, rat(5, 2), None)]);
        let platform = Platform::identical(1, 1);
        let s = simulate(&jobs, &platform, &ExecutionScenario::maximal(&jobs)).unwrap();
        let text = trace_to_string(&jobs, &s);
        assert!(text.contains("\"5/2\""));
        assert_eq!(text, trace_to_string(&jobs, &s.clone()));
        let back = parse_trace_str(&text).unwrap();
        assert_eq!(back, TraceFile::new(&jobs, &s));
        assert_eq!(back.jobs[0].finish, rat(5, 2));
    }

    #[test]
    fn scenario_file() {
        let s = parse_scenario_str(r#"[1, "3/2"]"#).unwrap();
        assert_eq!(s.actual(), &[Rational::ONE, rat(3, 2)]);
    }
}
