use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

use super::sexpr::parse_output;
use super::{SmtError, SolverConfig, SolverOutcome, Status};

fn solver_args(config: &SolverConfig) -> &'static [&'static str] {
    let stem = config.solver.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    if stem.starts_with("z3") {
        &["-in", "-smt2"]
    } else if stem.starts_with("cvc5") || stem.starts_with("cvc4") {
        &["--lang=smt2", "--incremental"]
    } else {
        &[]
    }
}

/// Raw process output, or `None` when the time limit expired.
pub(crate) fn run_raw(document: &str, config: &SolverConfig, limit: Duration) -> Result<Option<String>, SmtError> {
    let mut cmd = Command::new(&config.solver);
    cmd.args(solver_args(config))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    // own process group, so a timeout also reaches wrapper-script children
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let mut child = cmd
        .spawn()
        .map_err(|source| SmtError::Spawn {
            solver: config.solver.display().to_string(),
            source,
        })?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let doc = document.to_string();
    // a solver that exits early closes its end; the broken pipe is not our error
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(doc.as_bytes());
    });
    let reader = thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let Some(_status) = child.wait_timeout(limit)? else {
        kill_group(&mut child);
        let _ = child.wait();
        // the pipe threads finish once the last descendant is gone; they
        // are not joined so that nothing left behind can stall the caller
        drop((writer, reader, err_reader));
        return Ok(None);
    };
    let _ = writer.join();
    let out = reader.join().expect("reader thread")?;
    let err = err_reader.join().expect("stderr thread");
    if out.trim().is_empty() && !err.trim().is_empty() {
        return Err(SmtError::Malformed(err.trim().to_string()));
    }
    Ok(Some(out))
}

#[cfg(unix)]
fn kill_group(child: &mut std::process::Child) {
    if let Ok(pid) = libc::pid_t::try_from(child.id()) {
        // SAFETY: plain syscall on the group this function's caller created
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

#[cfg(not(unix))]
fn kill_group(child: &mut std::process::Child) {
    let _ = child.kill();
}

/// Runs the configured solver on one document.
pub fn run_solver(document: &str, config: &SolverConfig) -> Result<SolverOutcome, SmtError> {
    run_limited(document, config, config.time_limit)
}

pub(crate) fn run_limited(document: &str, config: &SolverConfig, limit: Duration) -> Result<SolverOutcome, SmtError> {
    let start = Instant::now();
    let Some(text) = run_raw(document, config, limit)? else {
        return Ok(SolverOutcome::unknown(limit, true));
    };
    let elapsed = start.elapsed();
    let parsed = parse_output(&text)?;
    let status = parsed.status.unwrap_or(Status::Unknown);
    Ok(SolverOutcome {
        status,
        model: (status == Status::Sat).then_some(parsed.model),
        solve_time: elapsed,
        generation_time: Duration::ZERO,
        timed_out: false,
        unsat_core: if status == Status::Unsat { parsed.core } else { Vec::new() },
        cost: None,
        optimal: false,
        calls: 1,
    })
}
