use std::fmt::Write;
use std::time::Instant;

use crate::encoder::EncodedModel;

use super::emit::{prefix, suffix, EmitOptions};
use super::process::run_limited;
use super::{Mode, SmtError, SolverConfig, SolverModel, SolverOutcome, Status};

fn options(config: &SolverConfig, mode: Mode) -> EmitOptions {
    EmitOptions {
        mode,
        unsat_cores: config.unsat_cores,
        seed: config.seed,
        bound: None,
    }
}

fn with_cost(mut o: SolverOutcome, encoded: &EncodedModel) -> SolverOutcome {
    o.cost = o.model.as_ref().map(|m| m.objective(encoded).max(0) as u64);
    o
}

/// Solves `encoded` in the configured mode.
pub fn solve(encoded: &EncodedModel, config: &SolverConfig) -> Result<SolverOutcome, SmtError> {
    match config.mode {
        Mode::Satisfy => {
            let opts = options(config, Mode::Satisfy);
            let doc = prefix(encoded, &opts) + &suffix(encoded, &opts);
            Ok(with_cost(run_limited(&doc, config, config.time_limit)?, encoded))
        }
        Mode::OptimizeNative => {
            if !config.supports_native_optimization() {
                return Err(SmtError::NoNativeOptimization(config.solver.display().to_string()));
            }
            let opts = options(config, Mode::OptimizeNative);
            let doc = prefix(encoded, &opts) + &suffix(encoded, &opts);
            let mut o = with_cost(run_limited(&doc, config, config.time_limit)?, encoded);
            o.optimal = o.status == Status::Sat;
            Ok(o)
        }
        Mode::OptimizeBoundSearch => optimize_by_bound_search(encoded, config),
    }
}

/// Minimizes the travelled distance by bisection on `total_cost <= b`.
///
/// The time limit covers the whole search. When it expires after a first
/// model was found, the best model so far is returned with `optimal` unset.
pub fn optimize_by_bound_search(encoded: &EncodedModel, config: &SolverConfig) -> Result<SolverOutcome, SmtError> {
    let start = Instant::now();
    let opts = options(config, Mode::Satisfy);
    let pre = prefix(encoded, &opts);
    let first = with_cost(run_limited(&(pre.clone() + &suffix(encoded, &opts)), config, config.time_limit)?, encoded);
    if first.status != Status::Sat {
        return Ok(first);
    }
    let bounded = EmitOptions {
        unsat_cores: false,
        ..opts
    };
    let mut best = first;
    let mut best_cost = best.cost.expect("sat outcome has a cost");
    let mut lower = 0u64;
    let mut calls = 1;
    let mut timed_out = false;
    while lower < best_cost {
        let remaining = config.time_limit.saturating_sub(start.elapsed());
        if remaining.is_zero() {
            timed_out = true;
            break;
        }
        let bound = lower + (best_cost - lower - 1) / 2;
        let doc = pre.clone()
            + &suffix(
                encoded,
                &EmitOptions {
                    bound: Some(bound),
                    ..bounded
                },
            );
        let r = with_cost(run_limited(&doc, config, remaining)?, encoded);
        calls += 1;
        match r.status {
            Status::Sat => {
                best_cost = r.cost.expect("sat outcome has a cost");
                best = r;
            }
            Status::Unsat => lower = bound + 1,
            Status::Unknown => {
                timed_out = r.timed_out;
                break;
            }
        }
    }
    best.optimal = lower >= best_cost;
    best.timed_out = timed_out;
    best.calls = calls;
    best.solve_time = start.elapsed();
    Ok(best)
}

/// Re-checks `model` by asserting its layout values as unit constraints.
pub fn check_authentic(encoded: &EncodedModel, model: &SolverModel, config: &SolverConfig) -> Result<bool, SmtError> {
    let opts = EmitOptions {
        mode: Mode::Satisfy,
        unsat_cores: false,
        seed: config.seed,
        bound: None,
    };
    let mut doc = prefix(encoded, &opts);
    for (_, name, _) in encoded.table.iter().take(encoded.layout.len()) {
        if let Some(b) = model.bool(name) {
            let _ = writeln!(doc, "(assert {})", if b { name.to_string() } else { format!("(not {name})") });
        } else if let Some(i) = model.int(name) {
            let lit = if i < 0 { format!("(- {})", i.unsigned_abs()) } else { i.to_string() };
            let _ = writeln!(doc, "(assert (= {name} {lit}))");
        }
    }
    doc.push_str("(check-sat)\n");
    Ok(run_limited(&doc, config, config.time_limit)?.status == Status::Sat)
}
