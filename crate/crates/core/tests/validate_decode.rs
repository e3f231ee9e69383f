mod common;

use cfevrp::encoder::{encode, Assignment, Family};
use cfevrp::encoder::term::{Names, Sort};
use cfevrp::generator::generate_tiny;
use cfevrp::model::{Instance, MoveEvent, Schedule, VehicleTimeline};
use cfevrp::oracle::{oracle_check_schedule, oracle_solve, OracleResult};
use cfevrp::smt::SolverModel;
use cfevrp::validate::{decode, validate, DecodeError};

fn two_node(or: u32) -> Instance {
    Instance::from_json(&format!(
        r#"{{"nodes": ["A", "B"],
            "edges": [{{"from": "A", "to": "B", "length": 1, "capacity": 1}},
                      {{"from": "B", "to": "A", "length": 1, "capacity": 1}}],
            "vehicles": [{{"id": "v", "start": "A"}}],
            "jobs": [{{"id": "j", "eligible": ["v"], "tasks": [
                {{"id": "p", "location": "B", "tw": [0, 4]}},
                {{"id": "d", "location": "A", "predecessors": ["p"], "tw": [0, 4]}}]}}],
            "battery": {{"operating_range": {or}, "charge": 1, "discharge": 1}},
            "deadline": 4}}"#
    ))
    .unwrap()
}

fn witness(inst: &Instance) -> Schedule {
    match oracle_solve(inst, true).unwrap() {
        OracleResult::Sat { schedule, .. } => schedule,
        OracleResult::Unsat => panic!("expected a feasible instance"),
    }
}

/// Solver model whose layout values are exactly those of `schedule`.
fn model_of(inst: &Instance, schedule: &Schedule) -> (cfevrp::encoder::EncodedModel, SolverModel) {
    let encoded = encode(inst);
    let values = Assignment::from_schedule(&encoded, inst, schedule).values().to_vec();
    let mut model = SolverModel::default();
    for (v, name, sort) in encoded.table.iter().take(encoded.layout.len()) {
        let x = values[v.0 as usize];
        match sort {
            Sort::Bool => {
                model.bools.insert(name.to_string(), x != 0);
            }
            Sort::Int => {
                model.ints.insert(name.to_string(), x);
            }
        }
    }
    (encoded, model)
}

#[test]
fn decode_inverts_lifting() {
    let mut n = 0;
    for seed in 0..80 {
        let inst = generate_tiny(seed);
        let Ok(OracleResult::Sat { schedule, .. }) = oracle_solve(&inst, true) else { continue };
        let (encoded, model) = model_of(&inst, &schedule);
        let decoded = decode(&model, &encoded, &inst).unwrap();
        assert!(validate(&decoded, &inst).overall, "seed {seed}");
        assert_eq!(decoded.total_cost, schedule.total_cost);
        assert_eq!(decoded.vehicles.len(), schedule.vehicles.len());
        for (a, b) in decoded.vehicles.iter().zip(&schedule.vehicles) {
            assert_eq!(a.moves, b.moves, "seed {seed}");
            assert_eq!(a.services, b.services, "seed {seed}");
        }
        n += 1;
    }
    assert!(n > 10);
}

#[test]
fn zero_job_model_decodes_to_parked_vehicles() {
    let inst = Instance::from_json(
        r#"{"nodes": ["A", "B"], "edges": [{"from": "A", "to": "B", "length": 1, "capacity": 1}],
            "vehicles": [{"id": "v", "start": "B"}],
            "battery": {"operating_range": 3, "charge": 1, "discharge": 1}, "deadline": 3}"#,
    )
    .unwrap();
    let (encoded, model) = model_of(&inst, &witness(&inst));
    let s = decode(&model, &encoded, &inst).unwrap();
    assert_eq!(s.total_cost, 0);
    let b = inst.graph.find("B").unwrap();
    assert!(s.vehicles[0].location.iter().all(|&l| l == Some(b)));
    assert!(s.vehicles[0].moves.is_empty());
}

#[test]
fn two_locations_at_once_is_a_decode_error() {
    let inst = two_node(4);
    let (encoded, mut model) = model_of(&inst, &witness(&inst));
    model.bools.insert("at_0_0_3".into(), true);
    model.bools.insert("at_0_1_3".into(), true);
    let err = decode(&model, &encoded, &inst).unwrap_err();
    assert!(matches!(err, DecodeError::SeveralLocations { time: 3, .. }), "{err}");
}

#[test]
fn missing_charge_is_a_decode_error() {
    let inst = two_node(4);
    let (encoded, mut model) = model_of(&inst, &witness(&inst));
    let rc = encoded.table.var_name(encoded.layout.rc(0, 2)).to_string();
    model.ints.remove(&rc);
    assert_eq!(decode(&model, &encoded, &inst).unwrap_err(), DecodeError::MissingCharge { var: rc });
}

#[test]
fn delivery_before_pickup_fails_precedence() {
    let inst = two_node(4);
    let mut s = witness(&inst);
    let sv = &mut s.vehicles[0].services;
    let (tp, td) = (sv[0].time, sv[1].time);
    sv[0].time = td;
    sv[1].time = tp;
    let r = validate(&s, &inst);
    assert!(!r.overall);
    assert!(!r.passed(Family::Rule(5)), "{}", r.render());
    assert!(!oracle_check_schedule(&s, &inst));
}

#[test]
fn oncoming_traffic_on_single_lane_fails_capacity() {
    let inst = Instance::from_json(
        r#"{"nodes": ["A", "B"],
            "edges": [{"from": "A", "to": "B", "length": 2, "capacity": 1},
                      {"from": "B", "to": "A", "length": 2, "capacity": 1}],
            "vehicles": [{"id": "v1", "start": "A"}, {"id": "v2", "start": "B"}],
            "battery": {"operating_range": 10, "charge": 1, "discharge": 1}, "deadline": 5}"#,
    )
    .unwrap();
    let (a, b) = (inst.graph.find("A").unwrap(), inst.graph.find("B").unwrap());
    let timeline = |start, moves: Vec<MoveEvent>| VehicleTimeline {
        location: vec![Some(start)],
        moves,
        ..Default::default()
    };
    let mut s = Schedule {
        vehicles: vec![
            timeline(a, vec![MoveEvent { time: 0, from: a, to: b }, MoveEvent { time: 2, from: b, to: a }]),
            timeline(b, vec![MoveEvent { time: 1, from: b, to: a }, MoveEvent { time: 3, from: a, to: b }]),
        ],
        total_cost: 0,
    };
    common::rebuild(&mut s, &inst);
    let r = validate(&s, &inst);
    let twenty = r.family(Family::Rule(20)).unwrap();
    assert!(!twenty.pass, "{}", r.render());
    let w = twenty.witness.as_ref().unwrap();
    assert!(w.vehicle.is_some() && w.time.is_some());
    // everything else about the two trips is fine
    assert_eq!(r.failed(), vec![Family::Rule(20)], "{}", r.render());
    assert!(!oracle_check_schedule(&s, &inst));
}

#[test]
fn single_field_injections_hit_their_family() {
    let inst = two_node(4);
    let base = witness(&inst);
    assert!(validate(&base, &inst).overall);

    let check = |s: &Schedule, f: Family| {
        let r = validate(s, &inst);
        assert!(!r.passed(f), "expected {f} to fail\n{}", r.render());
        assert!(!r.overall);
        assert!(!oracle_check_schedule(s, &inst));
    };

    let mut s = base.clone();
    s.total_cost += 1;
    check(&s, Family::Rule(25));

    let mut s = base.clone();
    s.vehicles[0].charge[0] = 5;
    check(&s, Family::Rule(21));

    let mut s = base.clone();
    s.vehicles[0].services.clear();
    check(&s, Family::Cover);

    let mut s = base.clone();
    let b = inst.graph.find("B").unwrap();
    s.vehicles[0].location[0] = Some(b);
    check(&s, Family::Rule(9));

    let mut s = base.clone();
    s.vehicles[0].services[1].time = 7;
    check(&s, Family::Rule(7));

    let mut s = base.clone();
    s.vehicles[0].services.pop();
    check(&s, Family::Rule(6));
}

#[test]
fn occupancy_of_a_non_hub_node() {
    let inst = Instance::from_json(
        r#"{"nodes": ["A", "B", "C"],
            "edges": [{"from": "A", "to": "B", "length": 1, "capacity": 2},
                      {"from": "C", "to": "B", "length": 1, "capacity": 2},
                      {"from": "B", "to": "A", "length": 1, "capacity": 2},
                      {"from": "B", "to": "C", "length": 1, "capacity": 2}],
            "vehicles": [{"id": "v1", "start": "A"}, {"id": "v2", "start": "C"}],
            "battery": {"operating_range": 10, "charge": 1, "discharge": 1}, "deadline": 4}"#,
    )
    .unwrap();
    let n = |x: &str| inst.graph.find(x).unwrap();
    let timeline = |start: &str, moves: Vec<MoveEvent>| VehicleTimeline {
        location: vec![Some(n(start))],
        moves,
        ..Default::default()
    };
    let mut s = Schedule {
        vehicles: vec![
            timeline("A", vec![MoveEvent { time: 0, from: n("A"), to: n("B") }, MoveEvent { time: 1, from: n("B"), to: n("A") }]),
            timeline("C", vec![MoveEvent { time: 0, from: n("C"), to: n("B") }, MoveEvent { time: 1, from: n("B"), to: n("C") }]),
        ],
        total_cost: 0,
    };
    common::rebuild(&mut s, &inst);
    let r = validate(&s, &inst);
    assert_eq!(r.failed(), vec![Family::Rule(12)], "{}", r.render());
    assert_eq!(r.family(Family::Rule(12)).unwrap().witness.as_ref().unwrap().time, Some(1));
}
