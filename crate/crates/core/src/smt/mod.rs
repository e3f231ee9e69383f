//! SMT-LIB2 emission and an external solver driver.
//!
//! The solver runs as a child process fed over stdin; the time limit is
//! enforced by killing the process, never by solver options.

mod emit;
mod optimize;
mod process;
mod sexpr;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use crate::encoder::{Assignment, EncodedModel};

pub use emit::{emit_smtlib, EmitOptions};
pub use optimize::{check_authentic, optimize_by_bound_search, solve};
pub use process::run_solver;
pub use sexpr::{parse_output, SExpr, SolverOutput};

/// Environment variable overriding the solver executable.
pub const SOLVER_ENV: &str = "CFEVRP_SOLVER";

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error("cannot start solver `{solver}`: {source}")]
    Spawn {
        solver: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed solver output: {0}")]
    Malformed(String),
    #[error("solver `{0}` does not support native optimization")]
    NoNativeOptimization(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Satisfy,
    OptimizeNative,
    OptimizeBoundSearch,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Satisfy => "satisfy",
            Mode::OptimizeNative => "optimize-native",
            Mode::OptimizeBoundSearch => "optimize-bound-search",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "satisfy" => Ok(Mode::Satisfy),
            "optimize-native" | "native" => Ok(Mode::OptimizeNative),
            "optimize-bound-search" | "optimize" | "bound-search" => Ok(Mode::OptimizeBoundSearch),
            _ => Err(format!("unknown mode `{s}` (satisfy, optimize-native, optimize-bound-search)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub solver: PathBuf,
    /// Wall-clock budget for one solve; in bound search, for the whole search.
    pub time_limit: Duration,
    pub mode: Mode,
    pub seed: Option<u64>,
    /// Request an unsat core on unsat answers.
    pub unsat_cores: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solver: default_solver(),
            time_limit: Duration::from_secs(300),
            mode: Mode::Satisfy,
            seed: None,
            unsat_cores: true,
        }
    }
}

/// `$CFEVRP_SOLVER`, else `z3` on the `PATH`.
pub fn default_solver() -> PathBuf {
    std::env::var_os(SOLVER_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("z3"))
}

impl SolverConfig {
    /// Solvers known to accept `(minimize ...)`.
    pub fn supports_native_optimization(&self) -> bool {
        let stem = self.solver.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        stem.starts_with("z3") || stem.starts_with("optimathsat")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    /// Solver answered `unknown` or was killed at the time limit.
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
        })
    }
}

/// Variable values reported by the solver.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverModel {
    pub bools: BTreeMap<String, bool>,
    pub ints: BTreeMap<String, i64>,
}

impl SolverModel {
    pub fn bool(&self, name: &str) -> Option<bool> {
        self.bools.get(name).copied()
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        self.ints.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.bools.is_empty() && self.ints.is_empty()
    }

    /// Value of `name` as an integer (Booleans as 0/1).
    pub fn value(&self, name: &str) -> Option<i64> {
        self.int(name).or_else(|| self.bool(name).map(i64::from))
    }

    /// Completes the model over `encoded` and evaluates its objective.
    pub fn objective(&self, encoded: &EncodedModel) -> i64 {
        self.assignment(encoded).objective()
    }

    pub fn assignment<'m>(&self, encoded: &'m EncodedModel) -> Assignment<'m> {
        let names: Vec<&str> = encoded.table.iter().map(|(_, n, _)| n).collect();
        Assignment::complete(encoded, |v| self.value(names[v.0 as usize]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub status: Status,
    /// Present iff `status` is sat.
    pub model: Option<SolverModel>,
    pub solve_time: Duration,
    /// Encoding plus emission time; filled by the pipeline, zero otherwise.
    pub generation_time: Duration,
    pub timed_out: bool,
    /// Assertion labels of the unsat core, when requested and supported.
    pub unsat_core: Vec<String>,
    /// Objective value of the model, when known.
    pub cost: Option<u64>,
    /// The cost is proven minimal.
    pub optimal: bool,
    /// Number of solver invocations.
    pub calls: usize,
}

impl SolverOutcome {
    pub(crate) fn unknown(elapsed: Duration, timed_out: bool) -> Self {
        Self {
            status: Status::Unknown,
            model: None,
            solve_time: elapsed,
            generation_time: Duration::ZERO,
            timed_out,
            unsat_core: Vec::new(),
            cost: None,
            optimal: false,
            calls: 1,
        }
    }

    /// Constraint families named by the unsat core.
    pub fn core_families(&self) -> std::collections::BTreeSet<crate::encoder::Family> {
        self.unsat_core
            .iter()
            .filter_map(|n| crate::encoder::Family::from_assertion_name(n))
            .collect()
    }
}
