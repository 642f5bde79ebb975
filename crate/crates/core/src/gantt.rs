//! ASCII Gantt charts.

use std::fmt::Write;

use crate::engine::Schedule;
use crate::model::JobSet;
use crate::rational::Rational;

pub const MIN_WIDTH: usize = 20;

const GLYPHS: &[u8] = b"123456789abcdefghijklmnopqrstuvwxyz";

/// Glyph used for job `index` (0-based): `1..9`, then `a..z`, then `#`.
pub fn glyph(index: usize) -> char {
    GLYPHS.get(index).map_or('#', |&b| b as char)
}

/// One row per processor, `width` cells spanning `[0, makespan)`. A cell
/// shows the job running at its midpoint, `.` when idle. The legend lists
/// exact start and finish instants.
pub fn render_gantt(jobs: &JobSet, schedule: &Schedule, width: usize) -> String {
    let width = width.max(MIN_WIDTH);
    let horizon = schedule
        .segments
        .iter()
        .map(|s| s.end)
        .chain(schedule.finish.iter().copied())
        .max()
        .unwrap_or(Rational::ZERO);

    let mut out = String::new();
    if !horizon.is_positive() {
        let _ = writeln!(out, "time [0, {horizon}) | empty schedule");
        return out;
    }
    let _ = writeln!(
        out,
        "time [0, {horizon}) | {width} cells of {}",
        horizon
            .checked_div(Rational::integer(width as i128))
            .unwrap_or(Rational::ZERO)
    );

    let cells = 2 * width as i128;
    let midpoints: Vec<Option<Rational>> = (0..width as i128)
        .map(|k| {
            Rational::new(2 * k + 1, cells)
                .and_then(|f| f.checked_mul(horizon))
                .ok()
        })
        .collect();
    let label_width = format!("P{}", schedule.processors).len();
    for p in 0..schedule.processors {
        let row: String = midpoints
            .iter()
            .map(|t| match t.and_then(|t| schedule.running_on(p, t)) {
                Some(job) => glyph(job),
                None => '.',
            })
            .collect();
        let label = format!("P{}", p + 1);
        let _ = writeln!(out, "{label:<label_width$} |{row}|");
    }

    for (i, job) in jobs.iter().enumerate().take(schedule.job_count()) {
        let missed = if schedule.deadline_misses.contains(&i) {
            "  deadline missed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} {}: S={} F={}{missed}",
            glyph(i),
            job.id,
            schedule.start[i],
            schedule.finish[i]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::simulate;
    use crate::model::{ExecutionScenario, Job, Platform};

    fn int(v: i128) -> Rational {
        Rational::integer(v)
    }

    #[test]
    fn counterexample_rows_are_full() {
        let jobs = JobSet::new(vec![
            Job::exact("J1", int(0), int(3), None),
            Job::exact("J2", int(0), int(3), None),
        ]);
        let s = simulate(
            &jobs,
            &Platform::identical(2, 2),
            &ExecutionScenario::maximal(&jobs),
        )
        .unwrap();
        let text = render_gantt(&jobs, &s, 30);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], format!("P1 |{}|", "1".repeat(30)));
        assert_eq!(lines[2], format!("P2 |{}|", "2".repeat(30)));
        assert!(text.contains("J1: S=0 F=3"));
    }

    #[test]
    fn empty_schedule_header_only() {
        let jobs = JobSet::default();
        let s = simulate(
            &jobs,
            &Platform::identical(0, 2),
            &ExecutionScenario::new(vec![]),
        )
        .unwrap();
        let text = render_gantt(&jobs, &s, 40);
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn shows_migration() {
        let jobs = JobSet::new(vec![
            Job::exact("A", int(0), int(2), None),
            Job::exact("B", int(0), int(2), None),
            Job::exact("C", int(0), int(3), None),
        ]);
        let platform = Platform::unrelated(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(1), int(2)],
                vec![int(1), int(1)],
            ],
        );
        let s = simulate(&jobs, &platform, &ExecutionScenario::maximal(&jobs)).unwrap();
        // Horizon 4 over 20 cells: 5 cells per time unit.
        let text = render_gantt(&jobs, &s, 20);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "P1 |11111111113333333333|");
        assert_eq!(lines[2], "P2 |2222233333..........|");
    }

    #[test]
    fn narrow_width_is_clamped() {
        let jobs = JobSet::new(vec![Job::exact("A", int(0), int(1), None)]);
        let s = simulate(
            &jobs,
            &Platform::identical(1, 1),
            &ExecutionScenario::maximal(&jobs),
        )
        .unwrap();
        let text = render_gantt(&jobs, &s, 3);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .contains(&"1".repeat(MIN_WIDTH)));
    }
}
