use std::time::Duration;

use cfevrp::bench::{bench, plot_dot, plot_svg, read_records, render_table, summarize, BenchConfig, BenchStatus};
use cfevrp::generator::{generate, generate_suite, Class, GenSpec};
use cfevrp::model::{Schedule, VehicleTimeline};
use cfevrp::smt::SolverConfig;

fn config() -> BenchConfig {
    BenchConfig {
        solver: SolverConfig {
            time_limit: Duration::from_secs(120),
            unsat_cores: false,
            ..SolverConfig::default()
        },
        ..BenchConfig::default()
    }
}

#[test]
fn interrupted_suite_resumes_to_the_same_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_suite(&[Class::C15_3_5], &[0], &[15], 3, dir.path()).unwrap();
    let results = dir.path().join("results.csv");

    let first = bench(&manifest, dir.path(), &results, &config()).unwrap();
    assert!(first.failures.is_empty(), "{:?}", first.failures);
    assert_eq!((first.records.len(), first.skipped), (3, 0));
    for r in &first.records {
        assert_ne!(r.status, BenchStatus::Timeout);
        assert_eq!(r.cost.is_some(), r.status == BenchStatus::Sat);
    }

    // nothing left to do
    let again = bench(&manifest, dir.path(), &results, &config()).unwrap();
    assert_eq!(again.skipped, 3);
    assert_eq!(again.records, first.records);

    // simulate an interrupt after the first record
    let text = std::fs::read_to_string(&results).unwrap();
    let kept: Vec<&str> = text.lines().take(2).collect();
    std::fs::write(&results, kept.join("\n") + "\n").unwrap();
    let resumed = bench(&manifest, dir.path(), &results, &config()).unwrap();
    assert_eq!(resumed.skipped, 1);
    let key = |rs: &[cfevrp::bench::BenchRecord]| -> Vec<_> {
        rs.iter().map(|r| (r.instance.clone(), r.status, r.cost)).collect()
    };
    assert_eq!(key(&resumed.records), key(&first.records));
    assert_eq!(key(&read_records(&results).unwrap()), key(&first.records));

    let s = summarize(&resumed.records);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].solved(), 3);
    assert!(render_table(&s).contains("15-3-5/r0/d15"));
}

#[test]
fn plot_of_a_parked_fleet_has_only_the_layout() {
    let inst = generate(&GenSpec {
        class: Class::C15_3_5,
        reduction: 50,
        deadline: 15,
        seed: 3,
    })
    .unwrap();
    let parked = Schedule {
        vehicles: inst
            .vehicles
            .iter()
            .map(|v| VehicleTimeline {
                location: vec![Some(v.start); inst.horizon() as usize + 1],
                charge: vec![i64::from(inst.battery.operating_range); inst.horizon() as usize + 1],
                ..Default::default()
            })
            .collect(),
        total_cost: 0,
    };
    let dot = plot_dot(&parked, &inst);
    assert_eq!(dot.matches("doublecircle").count(), 3);
    // one undirected line per remaining edge pair, no route edges
    assert_eq!(dot.matches("dir=none").count(), inst.graph.edges().len() / 2);
    assert_eq!(dot.matches("penwidth=2,").count(), 0);
    let svg = plot_svg(&parked, &inst);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<line").count(), inst.graph.edges().len());
}
