use cfevrp::model::{Instance, Schedule};
use cfevrp::oracle::{oracle_check_schedule, oracle_solve, oracle_solve_with, OracleError, OracleLimits, OracleResult};
use cfevrp::validate::validate;

fn two_node(or: u32, pickup_tw: [u32; 2]) -> Instance {
    Instance::from_json(&format!(
        r#"{{"nodes": ["A", "B"],
            "edges": [{{"from": "A", "to": "B", "length": 1, "capacity": 1}},
                      {{"from": "B", "to": "A", "length": 1, "capacity": 1}}],
            "vehicles": [{{"id": "v", "start": "A"}}],
            "jobs": [{{"id": "j", "eligible": ["v"], "tasks": [
                {{"id": "p", "location": "B", "tw": [{}, {}]}},
                {{"id": "d", "location": "A", "predecessors": ["p"], "tw": [0, 4]}}]}}],
            "battery": {{"operating_range": {or}, "charge": 1, "discharge": 1}},
            "deadline": 4}}"#,
        pickup_tw[0], pickup_tw[1]
    ))
    .unwrap()
}

#[test]
fn round_trip_job_costs_two() {
    let inst = two_node(2, [0, 4]);
    let r = oracle_solve(&inst, true).unwrap();
    assert_eq!(r.cost(), Some(2));
    let OracleResult::Sat { schedule, .. } = r else { unreachable!() };
    assert!(validate(&schedule, &inst).overall);
    assert!(oracle_check_schedule(&schedule, &inst));
}

#[test]
fn one_unit_of_range_cannot_return() {
    assert_eq!(oracle_solve(&two_node(1, [0, 4]), true).unwrap(), OracleResult::Unsat);
}

#[test]
fn no_jobs_costs_nothing() {
    let inst = Instance::from_json(
        r#"{"nodes": ["A"], "edges": [], "vehicles": [{"id": "v", "start": "A"}],
            "battery": {"operating_range": 1, "charge": 1, "discharge": 1}, "deadline": 2}"#,
    )
    .unwrap();
    assert_eq!(oracle_solve(&inst, false).unwrap().cost(), Some(0));
}

#[test]
fn witness_is_deterministic() {
    let inst = two_node(3, [0, 4]);
    assert_eq!(oracle_solve(&inst, true).unwrap(), oracle_solve(&inst, true).unwrap());
}

#[test]
fn refuses_large_instances() {
    let showcase = cfevrp::fixtures::showcase();
    assert!(matches!(oracle_solve(&showcase, true), Err(OracleError::TooLarge { what: "nodes", .. })));
    let tight = OracleLimits {
        max_horizon: 3,
        ..OracleLimits::default()
    };
    assert!(matches!(
        oracle_solve_with(&two_node(2, [0, 4]), true, &tight),
        Err(OracleError::TooLarge { what: "horizon", value: 5, limit: 3 })
    ));
}

#[test]
fn replay_rejects_window_violation() {
    let inst = two_node(2, [0, 4]);
    let OracleResult::Sat { mut schedule, .. } = oracle_solve(&inst, true).unwrap() else { unreachable!() };
    // the pickup is served at B; narrow its window to exclude that time
    let t = schedule.vehicles[0].services[0].time;
    let narrowed = two_node(2, [t + 1, 4]);
    assert!(!oracle_check_schedule(&schedule, &narrowed));
    assert!(!validate(&schedule, &narrowed).overall);
    schedule.vehicles[0].services.clear();
    assert!(!oracle_check_schedule(&schedule, &inst));
}

#[test]
fn empty_schedule_with_jobs_is_infeasible() {
    let inst = two_node(2, [0, 4]);
    let empty = Schedule::default();
    assert!(!oracle_check_schedule(&empty, &inst));
    assert!(!validate(&empty, &inst).overall);
}

#[test]
fn untracked_departure_may_reappear_at_once() {
    // a length-2 edge left at T-1 ends past the horizon; the vehicle may
    // show up anywhere at T and serve there
    let inst = Instance::from_json(
        r#"{"nodes": ["A", "B", "C"],
            "edges": [{"from": "A", "to": "B", "length": 2, "capacity": 1},
                      {"from": "B", "to": "A", "length": 2, "capacity": 1}],
            "vehicles": [{"id": "v", "start": "A"}],
            "jobs": [{"id": "j", "eligible": ["v"], "tasks": [
                {"id": "p", "location": "C", "tw": [2, 2]}]}],
            "battery": {"operating_range": 4, "charge": 0, "discharge": 1, "stations": []},
            "deadline": 0}"#,
    )
    .unwrap();
    let OracleResult::Sat { schedule, cost } = oracle_solve(&inst, true).unwrap() else {
        panic!("expected a schedule")
    };
    assert_eq!(cost, 2);
    assert_eq!(schedule.vehicles[0].moves[0].time, 1);
    assert!(validate(&schedule, &inst).overall);
    assert!(oracle_check_schedule(&schedule, &inst));
}
