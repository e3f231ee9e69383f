//! The validator and the oracle's replay implement the rules independently;
//! on valid and mutated schedules they must agree.

mod common;

use cfevrp::generator::generate_tiny;
use cfevrp::oracle::{oracle_check_schedule, oracle_solve, OracleResult};
use cfevrp::validate::validate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn validator_and_replay_agree_on_mutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut total, mut valid, mut bases) = (0, 0, 0);
    for seed in 0..200 {
        let inst = generate_tiny(seed);
        let Ok(OracleResult::Sat { schedule, .. }) = oracle_solve(&inst, true) else {
            continue;
        };
        bases += 1;
        assert!(validate(&schedule, &inst).overall, "witness of seed {seed} rejected");
        assert!(oracle_check_schedule(&schedule, &inst));
        let mut current = schedule.clone();
        for round in 0..30 {
            // chain a few edits now and then to get further from the witness
            let base = if round % 3 == 0 { &schedule } else { &current };
            let m = common::mutate(base, &inst, &mut rng);
            let report = validate(&m, &inst);
            let replay = oracle_check_schedule(&m, &inst);
            assert_eq!(
                report.overall,
                replay,
                "seed {seed} round {round}\n{}\n{}\n{}",
                inst.to_json(),
                m.to_json(&inst),
                report.render()
            );
            total += 1;
            valid += usize::from(replay);
            current = m;
        }
    }
    eprintln!("{bases} witnesses, {total} mutated schedules, {valid} still valid");
    assert!(total >= 1000);
    assert!(valid > 0 && valid < total);
}
