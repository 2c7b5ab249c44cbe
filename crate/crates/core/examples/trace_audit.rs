//! Record an event trace, write it out, read it back and re-check it.

use mtrrt::heuristics::SeededRng;
use mtrrt::planners::trace::{lifecycle_violations, parse_trace, validate_trace, write_trace, MapSource, TraceHeader};
use mtrrt::planners::{plan, PlanOptions, PlannerKind, Query};
use mtrrt::workspace::builtin_map;

fn main() -> mtrrt::Result<()> {
    let clutter = builtin_map("clutter")?;
    let query = Query::new(clutter.start, clutter.goal);
    let options = PlanOptions {
        trace: true,
        audit: true,
    };
    let r = plan(
        PlannerKind::Mtrrt,
        &query,
        &clutter.grid,
        &mut SeededRng::new(2),
        options,
    )?;
    println!("per-iteration audit: {} violations", r.audit_violations.len());

    let header = TraceHeader {
        planner: PlannerKind::Mtrrt,
        seed: 2,
        map: MapSource::Builtin("clutter".into()),
        inflate: 0.0,
        start: query.start,
        goal: query.goal,
        goal_radius: query.goal_radius,
        dt: query.params.dt,
    };
    let text = write_trace(&header, &r);
    let trace = parse_trace(&text)?;
    println!("{} lines, {} events", text.lines().count(), trace.events.len());
    println!("trace check: {:?}", validate_trace(&trace, &clutter.grid));
    println!("lifecycle check: {:?}", lifecycle_violations(&trace));
    Ok(())
}
