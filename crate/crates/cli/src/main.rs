//! `fjpsim` - simulate and check fixed-job-priority multiprocessor schedules.
//!
//! Exit codes: 0 on success, 1 when a checked property is violated, 2 on
//! malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use fjpsim_core::analysis::{check_predictability, quantum_oracle, reproduce_counterexample};
use fjpsim_core::gantt::render_gantt;
use fjpsim_core::generator::{generate_instance, generate_scenarios, CountRange, GenConfig};
use fjpsim_core::io::{self, Instance};
use fjpsim_core::{simulate, validate, ExecutionScenario, PlatformKind, Rational};

#[derive(Parser)]
#[command(
    name = "fjpsim",
    version,
    about = "Fixed-job-priority scheduling on unrelated multiprocessors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one instance under one execution scenario
    Simulate {
        instance: PathBuf,
        /// `min`, `max` or `file:<path>` (JSON array of execution times)
        #[arg(long, default_value = "max")]
        scenario: ScenarioChoice,
        /// Write the trace file here (`-` for stdout)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print an ASCII Gantt chart
        #[arg(long)]
        gantt: bool,
        #[arg(long, default_value_t = 60)]
        width: usize,
    },
    /// Check predictability and availability inclusion on every prefix
    Check {
        instance: PathBuf,
        /// Random scenarios in addition to the best and worst case
        #[arg(long, default_value_t = 5)]
        scenarios: usize,
        /// Scenario seed; defaults to the instance's generator seed, else 0
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Reproduce the equal-demand, different-availability counter-example
    Counterexample {
        #[arg(long, default_value_t = 30)]
        width: usize,
    },
    /// Draw a random instance
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive job-count range `a..b`
        #[arg(long, default_value = "1..8")]
        jobs: Span,
        /// Inclusive processor-count range `a..b`
        #[arg(long, default_value = "1..4")]
        procs: Span,
        #[arg(long, default_value = "unrelated")]
        kind: PlatformKind,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Compare the event-driven simulator with the slot-based oracle
    OracleCompare {
        instance: PathBuf,
        /// Slot length as an integer or `p/q`
        #[arg(long)]
        quantum: Rational,
        #[arg(long, default_value = "max")]
        scenario: ScenarioChoice,
    },
}

#[derive(Clone, Debug)]
enum ScenarioChoice {
    Min,
    Max,
    File(PathBuf),
}

impl FromStr for ScenarioChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min" => Ok(ScenarioChoice::Min),
            "max" => Ok(ScenarioChoice::Max),
            _ => s
                .strip_prefix("file:")
                .map(|p| ScenarioChoice::File(PathBuf::from(p)))
                .ok_or_else(|| format!("expected min, max or file:<path>, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Span(CountRange);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Ok(Span(CountRange {
            min: parse(a)?,
            max: parse(b.trim_start_matches('='))?,
        }))
    }
}

enum Failure {
    Input(anyhow::Error),
    Violation(String),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Input(err)
    }
}

fn load(path: &Path) -> Result<Instance> {
    let instance = io::parse_instance(path)?;
    let violations = validate(&instance.jobs, &instance.platform);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        bail!("{}: invalid instance: {}", path.display(), list.join("; "));
    }
    Ok(instance)
}

fn scenario_for(choice: &ScenarioChoice, instance: &Instance) -> Result<ExecutionScenario> {
    Ok(match choice {
        ScenarioChoice::Min => ExecutionScenario::minimal(&instance.jobs),
        ScenarioChoice::Max => ExecutionScenario::maximal(&instance.jobs),
        ScenarioChoice::File(path) => io::parse_scenario(path)?,
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => print!("{text}"),
        Some(p) if p.as_os_str() == "-" => print!("{text}"),
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            instance,
            scenario,
            trace,
            gantt,
            width,
        } => {
            let inst = load(&instance)?;
            let scenario = scenario_for(&scenario, &inst)?;
            let schedule =
                simulate(&inst.jobs, &inst.platform, &scenario).map_err(|e| anyhow!(e))?;
            if let Some(path) = &trace {
                emit(Some(path), &io::trace_to_string(&inst.jobs, &schedule))?;
            }
            if gantt {
                print!("{}", render_gantt(&inst.jobs, &schedule, width));
            } else if trace.as_deref().is_none_or(|p| p.as_os_str() != "-") {
                for (i, job) in inst.jobs.iter().enumerate() {
                    println!(
                        "{}: S={} F={}",
                        job.id, schedule.start[i], schedule.finish[i]
                    );
                }
            }
            if !schedule.deadline_misses.is_empty() {
                let ids: Vec<&str> = schedule
                    .deadline_misses
                    .iter()
                    .map(|&i| inst.jobs.jobs()[i].id.as_str())
                    .collect();
                eprintln!("deadline misses: {}", ids.join(", "));
            }
        }

        Command::Check {
            instance,
            scenarios,
            seed,
            report,
        } => {
            let inst = load(&instance)?;
            let seed = seed
                .or(inst.gen_config.as_ref().map(|c| c.seed))
                .unwrap_or(0);
            let mut list = vec![
                ExecutionScenario::minimal(&inst.jobs),
                ExecutionScenario::maximal(&inst.jobs),
            ];
            list.extend(generate_scenarios(&inst.jobs, scenarios, seed));
            let result =
                check_predictability(&inst.jobs, &inst.platform, &list).map_err(|e| anyhow!(e))?;
            for p in &result.prefixes {
                println!(
                    "prefix {}: S-={} S+={} F-={} F+={} sandwich={} inclusion={} progression={} schedulable+={}",
                    p.prefix,
                    p.minimal.start,
                    p.maximal.start,
                    p.minimal.finish,
                    p.maximal.finish,
                    p.sandwich_ok,
                    p.lemma_ok,
                    p.progression_ok,
                    p.schedulable_plus
                );
            }
            let text = io::report_to_string(&result);
            let counted = result
                .violations
                .iter()
                .filter(|v| v.counts_against_theorem)
                .count();
            let report_path = match report {
                Some(p) => {
                    emit(Some(&p), &text)?;
                    Some(p)
                }
                None if counted > 0 => {
                    let p = std::env::temp_dir().join(format!("fjpsim-report-{seed}.json"));
                    emit(Some(&p), &text)?;
                    Some(p)
                }
                None => None,
            };
            if counted > 0 {
                let where_ = report_path
                    .map(|p| p.display().to_string())
                    .unwrap_or_default();
                return Err(Failure::Violation(format!(
                    "{counted} property violations; report: {where_}"
                )));
            }
            println!("all properties hold over {} scenarios", list.len());
        }

        Command::Counterexample { width } => {
            let r = reproduce_counterexample().map_err(|e| anyhow!(e))?;
            for side in [&r.first, &r.second] {
                println!(
                    "{}: demand in [{}, {}) = {}, first idle processor at t = {}",
                    side.name, r.window.0, r.window.1, side.demand, side.earliest_availability
                );
                print!("{}", render_gantt(&side.jobs, &side.schedule, width));
            }
            if !r.refutes_demand_argument() {
                return Err(Failure::Violation(
                    "expected equal demand with different availability".into(),
                ));
            }
            println!(
                "equal demand ({}), different availability ({} vs {})",
                r.first.demand, r.first.earliest_availability, r.second.earliest_availability
            );
        }

        Command::Generate {
            seed,
            jobs,
            procs,
            kind,
            output,
        } => {
            let config = GenConfig {
                seed,
                jobs: jobs.0,
                processors: procs.0,
                kind,
                ..GenConfig::default()
            };
            let (job_set, platform) = generate_instance(&config).map_err(|e| anyhow!(e))?;
            let instance = Instance {
                jobs: job_set,
                platform,
                gen_config: Some(config),
            };
            emit(output.as_deref(), &io::instance_to_string(&instance))?;
        }

        Command::OracleCompare {
            instance,
            quantum,
            scenario,
        } => {
            let inst = load(&instance)?;
            let scenario = scenario_for(&scenario, &inst)?;
            let sim = simulate(&inst.jobs, &inst.platform, &scenario).map_err(|e| anyhow!(e))?;
            let oracle = quantum_oracle(&inst.jobs, &inst.platform, &scenario, quantum)
                .map_err(|e| anyhow!(e))?;
            let on_grid = sim.event_instants.iter().all(|t| {
                t.checked_div(quantum)
                    .map(|k| k.is_integer())
                    .unwrap_or(false)
            });
            let mut mismatched = 0;
            for (i, job) in inst.jobs.iter().enumerate() {
                let same = sim.start[i] == oracle.start[i] && sim.finish[i] == oracle.finish[i];
                if !same {
                    mismatched += 1;
                }
                println!(
                    "{}: simulate S={} F={} | oracle S={} F={}{}",
                    job.id,
                    sim.start[i],
                    sim.finish[i],
                    oracle.start[i],
                    oracle.finish[i],
                    if same { "" } else { "  <- differs" }
                );
            }
            if !on_grid {
                println!("note: some event instants are off the {quantum} grid; differences are expected");
            } else if mismatched > 0 {
                return Err(Failure::Violation(format!(
                    "{mismatched} jobs differ on a grid-compatible instance"
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
