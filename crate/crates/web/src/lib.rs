//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function takes and returns JSON text. The plain-Rust
//! versions in this module do the work and are unit-tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fjpsim_core::analysis::{check_predictability, reproduce_counterexample};
use fjpsim_core::gantt::render_gantt;
use fjpsim_core::generator::{generate_instance, generate_scenarios, GenConfig};
use fjpsim_core::io::{instance_to_string, parse_instance_str, Instance};
use fjpsim_core::{
    simulate, validate, ExecutionScenario, JobSet, PlatformKind, Rational, Schedule,
};

#[derive(Serialize)]
struct SegmentView {
    job: usize,
    processor: usize,
    start: String,
    end: String,
    start_f: f64,
    end_f: f64,
}

#[derive(Serialize)]
struct JobView {
    id: String,
    executed: String,
    start: String,
    finish: String,
    deadline_missed: bool,
}

#[derive(Serialize)]
struct ScheduleView {
    processors: usize,
    horizon: f64,
    jobs: Vec<JobView>,
    segments: Vec<SegmentView>,
    gantt: String,
}

impl ScheduleView {
    fn new(jobs: &JobSet, schedule: &Schedule) -> Self {
        ScheduleView {
            processors: schedule.processors,
            horizon: schedule.makespan().map_or(0.0, |t| t.to_f64()),
            jobs: jobs
                .iter()
                .enumerate()
                .map(|(i, job)| JobView {
                    id: job.id.clone(),
                    executed: schedule.scenario.get(i).to_string(),
                    start: schedule.start[i].to_string(),
                    finish: schedule.finish[i].to_string(),
                    deadline_missed: schedule.deadline_misses.contains(&i),
                })
                .collect(),
            segments: schedule
                .segments
                .iter()
                .map(|s| SegmentView {
                    job: s.job,
                    processor: s.processor,
                    start: s.start.to_string(),
                    end: s.end.to_string(),
                    start_f: s.start.to_f64(),
                    end_f: s.end.to_f64(),
                })
                .collect(),
            gantt: render_gantt(jobs, schedule, 48),
        }
    }
}

fn load(text: &str) -> Result<Instance, String> {
    let inst = parse_instance_str(text).map_err(|e| e.to_string())?;
    let violations = validate(&inst.jobs, &inst.platform);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; "))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

#[derive(Serialize)]
struct CounterexampleView {
    name: String,
    demand: String,
    earliest_availability: String,
    schedule: ScheduleView,
}

pub fn counterexample_json() -> Result<String, String> {
    let r = reproduce_counterexample().map_err(|e| e.to_string())?;
    let views: Vec<CounterexampleView> = [&r.first, &r.second]
        .into_iter()
        .map(|side| CounterexampleView {
            name: side.name.clone(),
            demand: side.demand.to_string(),
            earliest_availability: side.earliest_availability.to_string(),
            schedule: ScheduleView::new(&side.jobs, &side.schedule),
        })
        .collect();
    Ok(to_json(&views))
}

/// Schedule with every job running `bcet + (step / steps) * (wcet - bcet)`.
pub fn simulate_json(instance: &str, step: u32, steps: u32) -> Result<String, String> {
    let inst = load(instance)?;
    let steps = steps.max(1);
    let frac = Rational::new(step.min(steps) as i128, steps as i128).map_err(|e| e.to_string())?;
    let actual = inst
        .jobs
        .iter()
        .map(|j| {
            let spread = j.wcet.checked_sub(j.bcet)?;
            j.bcet.checked_add(spread.checked_mul(frac)?)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let schedule = simulate(&inst.jobs, &inst.platform, &ExecutionScenario::new(actual))
        .map_err(|e| e.to_string())?;
    Ok(to_json(&ScheduleView::new(&inst.jobs, &schedule)))
}

#[derive(Serialize)]
struct PrefixView {
    prefix: usize,
    job: String,
    s_min: String,
    s_max: String,
    f_min: String,
    f_max: String,
    actual: Vec<(String, String)>,
    sandwich_ok: bool,
    inclusion_ok: bool,
}

#[derive(Serialize)]
struct CheckView {
    scenarios: usize,
    violations: usize,
    prefixes: Vec<PrefixView>,
}

pub fn check_json(instance: &str, random_scenarios: usize, seed: u64) -> Result<String, String> {
    let inst = load(instance)?;
    let mut scenarios = vec![
        ExecutionScenario::minimal(&inst.jobs),
        ExecutionScenario::maximal(&inst.jobs),
    ];
    scenarios.extend(generate_scenarios(&inst.jobs, random_scenarios, seed));
    let report =
        check_predictability(&inst.jobs, &inst.platform, &scenarios).map_err(|e| e.to_string())?;
    let view = CheckView {
        scenarios: scenarios.len(),
        violations: report.violations.len(),
        prefixes: report
            .prefixes
            .iter()
            .map(|p| PrefixView {
                prefix: p.prefix,
                job: inst.jobs.jobs()[p.prefix - 1].id.clone(),
                s_min: p.minimal.start.to_string(),
                s_max: p.maximal.start.to_string(),
                f_min: p.minimal.finish.to_string(),
                f_max: p.maximal.finish.to_string(),
                actual: p
                    .scenarios
                    .iter()
                    .map(|o| (o.actual.start.to_string(), o.actual.finish.to_string()))
                    .collect(),
                sandwich_ok: p.sandwich_ok,
                inclusion_ok: p.lemma_ok,
            })
            .collect(),
    };
    Ok(to_json(&view))
}

pub fn generate_text(seed: u64, kind: &str) -> Result<String, String> {
    let kind: PlatformKind = kind.parse()?;
    let config = GenConfig {
        seed,
        kind,
        jobs: fjpsim_core::generator::CountRange { min: 3, max: 6 },
        processors: fjpsim_core::generator::CountRange { min: 2, max: 3 },
        ..GenConfig::default()
    };
    let (jobs, platform) = generate_instance(&config).map_err(|e| e.to_string())?;
    Ok(instance_to_string(&Instance {
        jobs,
        platform,
        gen_config: Some(config),
    }))
}

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

/// Both schedules of the equal-demand counter-example.
#[wasm_bindgen]
pub fn counterexample() -> Result<String, JsError> {
    js(counterexample_json())
}

#[wasm_bindgen]
pub fn simulate_instance(instance: &str, step: u32, steps: u32) -> Result<String, JsError> {
    js(simulate_json(instance, step, steps))
}

#[wasm_bindgen]
pub fn check_instance(
    instance: &str,
    random_scenarios: usize,
    seed: u64,
) -> Result<String, JsError> {
    js(check_json(instance, random_scenarios, seed))
}

#[wasm_bindgen]
pub fn generate(seed: u64, kind: &str) -> Result<String, JsError> {
    js(generate_text(seed, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const ABC: &str = r#"{"platform": {"kind": "unrelated", "rates": [[1, 0], [1, 2], [1, 1]]},
        "jobs": [{"id": "A", "release": 0, "bcet": 1, "wcet": 2, "deadline": null},
                 {"id": "B", "release": 0, "bcet": 2, "wcet": 2, "deadline": null},
                 {"id": "C", "release": 0, "bcet": 3, "wcet": 3, "deadline": null}]}"#;

    #[test]
    fn counterexample_view() {
        let v: Value = serde_json::from_str(&counterexample_json().unwrap()).unwrap();
        assert_eq!(v[0]["earliest_availability"], "3");
        assert_eq!(v[1]["earliest_availability"], "2");
        assert_eq!(v[0]["demand"], "6");
        assert_eq!(v[1]["demand"], "6");
    }

    #[test]
    fn slider_endpoints() {
        let hi: Value = serde_json::from_str(&simulate_json(ABC, 10, 10).unwrap()).unwrap();
        assert_eq!(hi["jobs"][2]["finish"], "4");
        assert_eq!(hi["segments"].as_array().unwrap().len(), 4);
        let lo: Value = serde_json::from_str(&simulate_json(ABC, 0, 10).unwrap()).unwrap();
        assert_eq!(lo["jobs"][0]["executed"], "1");
        let mid: Value = serde_json::from_str(&simulate_json(ABC, 1, 2).unwrap()).unwrap();
        assert_eq!(mid["jobs"][0]["executed"], "3/2");
    }

    #[test]
    fn check_and_generate() {
        let text = generate_text(11, "uniform").unwrap();
        let v: Value = serde_json::from_str(&check_json(&text, 3, 11).unwrap()).unwrap();
        assert_eq!(v["violations"], 0);
        assert_eq!(v["scenarios"], 5);
        assert!(generate_text(1, "bogus").is_err());
        assert!(simulate_json("{}", 0, 1).is_err());
    }
}
