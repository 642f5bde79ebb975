//! Seeded random instances and execution scenarios.
//!
//! # Reproducibility scheme
//!
//! Every draw comes from a ChaCha8 keystream addressed by three
//! coordinates:
//!
//! * the 64-bit master seed, expanded into the ChaCha key by
//!   `ChaCha8Rng::seed_from_u64`;
//! * a purpose label (`"instance"`, `"scenario"`), hashed with 64-bit
//!   FNV-1a into the ChaCha stream id;
//! * an item index, which selects a disjoint window of 2^32 words in that
//!   stream (`word_pos = index << 32`).
//!
//! Items are therefore independent of each other and of the order in which
//! they are requested: drawing scenarios never shifts instance generation
//! under the same master seed, and scenario `k` is the same whether or not
//! scenarios `0..k` were generated first. Integer draws use
//! `rand::Rng::gen_range` from `rand` 0.8; rationals are drawn as a uniform
//! numerator over a fixed denominator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate, ExecutionScenario, Job, JobSet, Platform, PlatformKind};
use crate::rational::Rational;

pub const DEFAULT_DENOMINATOR: u32 = 4;
const MAX_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRange {
    pub min: Rational,
    pub max: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum DeadlinePolicy {
    AllInfinite,
    /// Deadline = release + a span drawn from the range.
    ReleasePlusSpan {
        span: RationalRange,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub jobs: CountRange,
    pub processors: CountRange,
    pub rate_pool: Vec<Rational>,
    pub release: RationalRange,
    pub exec: RationalRange,
    /// Release, execution and scenario draws are multiples of
    /// `1 / denominator`.
    pub denominator: u32,
    pub deadlines: DeadlinePolicy,
    pub kind: PlatformKind,
}

impl Default for GenConfig {
    fn default() -> Self {
        let int = Rational::integer;
        GenConfig {
            seed: 0,
            jobs: CountRange { min: 1, max: 8 },
            processors: CountRange { min: 1, max: 4 },
            rate_pool: vec![
                int(0),
                Rational::new(1, 2).expect("valid"),
                int(1),
                int(2),
                int(3),
            ],
            release: RationalRange {
                min: int(0),
                max: int(10),
            },
            exec: RationalRange {
                min: int(0),
                max: int(10),
            },
            denominator: DEFAULT_DENOMINATOR,
            deadlines: DeadlinePolicy::AllInfinite,
            kind: PlatformKind::Unrelated,
        }
    }
}

fn fnv1a(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// The keystream for item `index` of purpose `label` under `seed`.
pub fn substream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label));
    rng.set_word_pos((index as u128) << 32);
    rng
}

fn draw_count(rng: &mut ChaCha8Rng, range: CountRange) -> usize {
    rng.gen_range(range.min..=range.max)
}

fn draw_rational(rng: &mut ChaCha8Rng, range: RationalRange, denominator: u32) -> Result<Rational> {
    let d = Rational::integer(denominator as i128);
    let lo = range.min.checked_mul(d)?.ceil();
    let hi = range.max.checked_mul(d)?.floor();
    if lo > hi {
        return Err(Error::UnattainableConfig(format!(
            "no multiple of 1/{denominator} in [{}, {}]",
            range.min, range.max
        )));
    }
    Ok(Rational::new(rng.gen_range(lo..=hi), denominator as i128)?)
}

fn check_config(config: &GenConfig) -> Result<()> {
    let fail = |msg: &str| Err(Error::UnattainableConfig(msg.to_string()));
    if config.jobs.min == 0 || config.jobs.min > config.jobs.max {
        return fail("job count range must be nonempty and start at 1 or more");
    }
    if config.processors.min == 0 || config.processors.min > config.processors.max {
        return fail("processor count range must be nonempty and start at 1 or more");
    }
    if config.denominator == 0 {
        return fail("denominator must be positive");
    }
    if config.kind != PlatformKind::Identical && !config.rate_pool.iter().any(Rational::is_positive)
    {
        return fail("rate pool has no positive rate");
    }
    if config.rate_pool.iter().any(Rational::is_negative) {
        return fail("rate pool contains a negative rate");
    }
    if config.release.min.is_negative() || config.exec.min.is_negative() {
        return fail("release and execution ranges must be nonnegative");
    }
    if config.release.min > config.release.max || config.exec.min > config.exec.max {
        return fail("empty release or execution range");
    }
    if let DeadlinePolicy::ReleasePlusSpan { span } = config.deadlines {
        if span.min.is_negative() || span.min > span.max {
            return fail("deadline span range must be nonempty and nonnegative");
        }
    }
    Ok(())
}

fn draw_row(rng: &mut ChaCha8Rng, pool: &[Rational], m: usize) -> Result<Vec<Rational>> {
    for _ in 0..MAX_RESAMPLES {
        let row: Vec<Rational> = (0..m).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
        if row.iter().any(Rational::is_positive) {
            return Ok(row);
        }
    }
    Err(Error::UnattainableConfig(
        "could not draw a rate row with an eligible processor".into(),
    ))
}

/// Draws one job set and platform from the `"instance"` substream of
/// `config.seed`.
pub fn generate_instance(config: &GenConfig) -> Result<(JobSet, Platform)> {
    check_config(config)?;
    let mut rng = substream(config.seed, "instance", 0);
    let n = draw_count(&mut rng, config.jobs);
    let m = draw_count(&mut rng, config.processors);

    let platform = match config.kind {
        PlatformKind::Identical => Platform::identical(n, m),
        PlatformKind::Uniform => Platform::uniform(n, draw_row(&mut rng, &config.rate_pool, m)?),
        PlatformKind::Unrelated => {
            let rows = (0..n)
                .map(|_| draw_row(&mut rng, &config.rate_pool, m))
                .collect::<Result<Vec<_>>>()?;
            Platform::unrelated(m, rows)
        }
    };

    let mut jobs = Vec::with_capacity(n);
    for i in 0..n {
        let release = draw_rational(&mut rng, config.release, config.denominator)?;
        let a = draw_rational(&mut rng, config.exec, config.denominator)?;
        let b = draw_rational(&mut rng, config.exec, config.denominator)?;
        let deadline = match config.deadlines {
            DeadlinePolicy::AllInfinite => None,
            DeadlinePolicy::ReleasePlusSpan { span } => {
                Some(release.checked_add(draw_rational(&mut rng, span, config.denominator)?)?)
            }
        };
        jobs.push(Job::new(
            format!("J{}", i + 1),
            release,
            a.min(b),
            a.max(b),
            deadline,
        ));
    }
    let jobs = JobSet::new(jobs);
    debug_assert!(validate(&jobs, &platform).is_empty());
    Ok((jobs, platform))
}

/// `count` scenarios with execution times on a `1/DEFAULT_DENOMINATOR`
/// grid between each job's bounds.
pub fn generate_scenarios(jobs: &JobSet, count: usize, seed: u64) -> Vec<ExecutionScenario> {
    generate_scenarios_on_grid(jobs, count, seed, DEFAULT_DENOMINATOR)
}

/// Scenario `k` takes, for each job, `bcet + (j / grid) * (wcet - bcet)`
/// with `j` uniform in `0..=grid`, drawn from item `k` of the `"scenario"`
/// substream.
pub fn generate_scenarios_on_grid(
    jobs: &JobSet,
    count: usize,
    seed: u64,
    grid: u32,
) -> Vec<ExecutionScenario> {
    let grid = grid.max(1);
    (0..count)
        .map(|k| {
            let mut rng = substream(seed, "scenario", k as u64);
            ExecutionScenario::new(
                jobs.iter()
                    .map(|job| {
                        let step = rng.gen_range(0..=grid as i128);
                        let spread = job.wcet.checked_sub(job.bcet).expect("bounded");
                        let frac = Rational::new(step, grid as i128).expect("positive grid");
                        job.bcet
                            .checked_add(spread.checked_mul(frac).expect("bounded"))
                            .expect("bounded")
                    })
                    .collect(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_scenario;

    fn config(seed: u64, kind: PlatformKind) -> GenConfig {
        GenConfig {
            seed,
            kind,
            ..GenConfig::default()
        }
    }

    #[test]
    fn identical_platform_has_unit_rates() {
        for seed in 0..20 {
            let (_, p) = generate_instance(&config(seed, PlatformKind::Identical)).unwrap();
            assert!(p.rates().iter().flatten().all(|r| *r == Rational::ONE));
        }
    }

    #[test]
    fn uniform_platform_has_constant_columns() {
        for seed in 0..20 {
            let (_, p) = generate_instance(&config(seed, PlatformKind::Uniform)).unwrap();
            for row in p.rates() {
                assert_eq!(row.as_slice(), p.rates()[0].as_slice());
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let c = config(1234, PlatformKind::Unrelated);
        assert_eq!(
            generate_instance(&c).unwrap(),
            generate_instance(&c).unwrap()
        );
        let other = config(1235, PlatformKind::Unrelated);
        assert_ne!(
            generate_instance(&c).unwrap(),
            generate_instance(&other).unwrap()
        );
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..200 {
            for kind in [
                PlatformKind::Identical,
                PlatformKind::Uniform,
                PlatformKind::Unrelated,
            ] {
                let (jobs, p) = generate_instance(&config(seed, kind)).unwrap();
                assert!(validate(&jobs, &p).is_empty(), "seed {seed} {kind}");
                assert!((1..=8).contains(&jobs.len()));
                assert!((1..=4).contains(&p.processors()));
            }
        }
    }

    #[test]
    fn unattainable_configs_rejected() {
        let zero_pool = GenConfig {
            rate_pool: vec![Rational::ZERO],
            ..GenConfig::default()
        };
        assert!(matches!(
            generate_instance(&zero_pool),
            Err(Error::UnattainableConfig(_))
        ));
        let bad_range = GenConfig {
            jobs: CountRange { min: 3, max: 2 },
            ..GenConfig::default()
        };
        assert!(generate_instance(&bad_range).is_err());
    }

    #[test]
    fn deadlines_follow_policy() {
        let c = GenConfig {
            deadlines: DeadlinePolicy::ReleasePlusSpan {
                span: RationalRange {
                    min: Rational::integer(5),
                    max: Rational::integer(5),
                },
            },
            ..GenConfig::default()
        };
        let (jobs, _) = generate_instance(&c).unwrap();
        for job in &jobs {
            assert_eq!(
                job.deadline,
                Some(job.release.checked_add(Rational::integer(5)).unwrap())
            );
        }
    }

    #[test]
    fn scenario_examples() {
        let int = Rational::integer;
        let jobs = JobSet::new(vec![
            Job::new("A", int(0), int(1), int(5), None),
            Job::new("B", int(0), int(3), int(3), None),
        ]);
        assert!(generate_scenarios(&jobs, 0, 7).is_empty());
        let scenarios = generate_scenarios(&jobs, 50, 7);
        assert_eq!(scenarios.len(), 50);
        for s in &scenarios {
            assert!(validate_scenario(&jobs, s).is_empty());
            assert!(s.get(0) >= int(1) && s.get(0) <= int(5));
            assert_eq!(s.get(1), int(3));
        }
        assert_eq!(scenarios, generate_scenarios(&jobs, 50, 7));
        // Item k does not depend on how many items were requested.
        assert_eq!(scenarios[..10], generate_scenarios(&jobs, 10, 7)[..]);
    }

    #[test]
    fn substreams_are_independent() {
        let mut a = substream(9, "instance", 0);
        let mut b = substream(9, "scenario", 0);
        let mut c = substream(9, "instance", 1);
        let xa: u64 = a.gen();
        assert_ne!(xa, b.gen::<u64>());
        assert_ne!(xa, c.gen::<u64>());
    }

    #[test]
    fn config_json_round_trip() {
        let c = GenConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<GenConfig>(&text).unwrap(), c);
        let partial: GenConfig = serde_json::from_str(r#"{"seed": 5, "kind": "uniform"}"#).unwrap();
        assert_eq!(partial.seed, 5);
        assert_eq!(partial.kind, PlatformKind::Uniform);
        assert_eq!(partial.rate_pool, GenConfig::default().rate_pool);
    }
}
