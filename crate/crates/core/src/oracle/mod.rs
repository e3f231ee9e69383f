//! Exhaustive time-expanded search for tiny instances: the ground truth for
//! satisfiability and minimum travelled distance.
//!
//! States are expanded layer by layer in time and memoised exactly. Charge
//! dominance is not used for pruning: more charge is not always better,
//! since a full battery cannot idle at a charging station.

mod replay;
mod step;

use std::collections::HashMap;

use crate::model::{Instance, MoveEvent, Schedule, ServiceEvent, VehicleTimeline};

pub use replay::oracle_check_schedule;
use step::{Action, JointState, Motion, Pos, Rules};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_vehicles: usize,
    pub max_horizon: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_nodes: 9,
            max_vehicles: 2,
            max_horizon: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: {what} = {value} exceeds {limit}")]
    TooLarge { what: &'static str, value: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Sat { cost: u64, schedule: Schedule },
    Unsat,
}

impl OracleResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleResult::Sat { .. })
    }

    pub fn cost(&self) -> Option<u64> {
        match self {
            OracleResult::Sat { cost, .. } => Some(*cost),
            OracleResult::Unsat => None,
        }
    }
}

fn check_limits(inst: &Instance, limits: &OracleLimits) -> Result<(), OracleError> {
    let checks = [
        ("nodes", inst.graph.node_count(), limits.max_nodes),
        ("vehicles", inst.vehicles.len(), limits.max_vehicles.min(16)),
        ("horizon", inst.horizon() as usize, limits.max_horizon as usize),
        ("tasks", inst.task_count(), 64),
    ];
    for (what, value, limit) in checks {
        if value > limit {
            return Err(OracleError::TooLarge { what, value, limit });
        }
    }
    Ok(())
}

/// Minimum-distance solution under the default size guard.
///
/// The search is exhaustive either way, so `optimize` only documents intent:
/// the returned witness always has minimum cost, ties broken by the
/// lexicographically smallest action sequence.
pub fn oracle_solve(instance: &Instance, optimize: bool) -> Result<OracleResult, OracleError> {
    oracle_solve_with(instance, optimize, &OracleLimits::default())
}

struct Node {
    state: JointState,
    cost: u64,
    parent: usize,
    action: Vec<Action>,
}

pub fn oracle_solve_with(instance: &Instance, _optimize: bool, limits: &OracleLimits) -> Result<OracleResult, OracleError> {
    check_limits(instance, limits)?;
    let rules = Rules::new(instance);
    let horizon = rules.horizon;
    let dist: Vec<Vec<Option<u32>>> = instance
        .vehicles
        .iter()
        .map(|v| {
            let from: Vec<Option<u32>> = instance
                .graph
                .nodes()
                .map(|n| instance.graph.shortest_path_length(n, v.start))
                .collect();
            from
        })
        .collect();

    let init = rules.initial();
    if !rules.state_ok(0, &init) {
        return Ok(OracleResult::Unsat);
    }
    let mut layers: Vec<Vec<Node>> = vec![vec![Node {
        state: init,
        cost: 0,
        parent: usize::MAX,
        action: Vec::new(),
    }]];

    for t in 0..=horizon {
        let layer = layers.last().expect("current layer");
        let mut index: HashMap<JointState, usize> = HashMap::new();
        let mut next: Vec<Node> = Vec::new();
        let mut best_final: Option<(u64, usize, Vec<Action>)> = None;
        for (pi, node) in layer.iter().enumerate() {
            let per_vehicle: Vec<Vec<Action>> = (0..instance.vehicles.len())
                .map(|i| options(&rules, t, &node.state, i))
                .collect();
            for joint in product(&per_vehicle) {
                let Some((succ, c)) = rules.step(t, &node.state, &joint) else {
                    continue;
                };
                let cost = node.cost + c;
                if t == horizon {
                    if rules.complete(&succ) {
                        let cand = (cost, pi, joint);
                        if best_final.as_ref().is_none_or(|b| (cand.0, cand.1, &cand.2) < (b.0, b.1, &b.2)) {
                            best_final = Some(cand);
                        }
                    }
                    continue;
                }
                if !rules.state_ok(t + 1, &succ) || !viable(&rules, &dist, t + 1, &succ) {
                    continue;
                }
                match index.get(&succ) {
                    Some(&k) => {
                        let n = &mut next[k];
                        if (cost, pi, &joint) < (n.cost, n.parent, &n.action) {
                            n.cost = cost;
                            n.parent = pi;
                            n.action = joint;
                        }
                    }
                    None => {
                        index.insert(succ.clone(), next.len());
                        next.push(Node {
                            state: succ,
                            cost,
                            parent: pi,
                            action: joint,
                        });
                    }
                }
            }
        }
        if t == horizon {
            let Some((cost, pi, last)) = best_final else {
                return Ok(OracleResult::Unsat);
            };
            return Ok(OracleResult::Sat {
                cost,
                schedule: witness(&rules, &layers, pi, last, cost),
            });
        }
        if next.is_empty() {
            return Ok(OracleResult::Unsat);
        }
        // rank by path order so ties keep resolving lexicographically
        next.sort_by(|a, b| (a.parent, &a.action).cmp(&(b.parent, &b.action)));
        layers.push(next);
    }
    unreachable!("the horizon layer always returns")
}

/// Sound pruning: every vehicle can still be home by the deadline and no
/// unserved task has a closed window.
fn viable(rules: &Rules, dist: &[Vec<Option<u32>>], t: u32, s: &JointState) -> bool {
    let inst = rules.inst;
    for (j, job) in inst.jobs.iter().enumerate() {
        for (k, task) in job.tasks.iter().enumerate() {
            if task.tw_upper < t && s.served & rules.bit(j, k) == 0 {
                return false;
            }
        }
    }
    if t <= inst.deadline {
        let left = inst.deadline - t;
        for (i, v) in s.vehicles.iter().enumerate() {
            let need = match v.pos {
                Pos::At(n) => dist[i][n.index()],
                Pos::Transit { to, arrive } => dist[i][to.index()].map(|d| d + (arrive - t)),
                Pos::Free => None,
            };
            if need.is_none_or(|d| d > left) {
                return false;
            }
        }
    }
    true
}

fn options(rules: &Rules, t: u32, s: &JointState, i: usize) -> Vec<Action> {
    let inst = rules.inst;
    let avail = rules.servable(t, s, i);
    let subsets: Vec<Vec<(usize, usize)>> = (0u32..1 << avail.len())
        .map(|m| (0..avail.len()).filter(|b| m & (1 << b) != 0).map(|b| avail[b]).collect())
        .collect();
    let motions: Vec<Motion> = if t == rules.horizon {
        vec![Motion::Wait]
    } else {
        match s.vehicles[i].pos {
            Pos::At(n) => {
                let mut out = vec![Motion::Stay];
                for &m in inst.graph.successors(n).iter().filter(|&&m| m != n) {
                    out.push(Motion::Go(m));
                    let untracked = inst.graph.edge(n, m).is_some_and(|e| t + e.length > rules.horizon);
                    if untracked {
                        out.extend(inst.graph.nodes().flat_map(|p| {
                            (0..=i64::from(inst.battery.operating_range)).map(move |c| Motion::GoAppear(m, p, c))
                        }));
                    }
                }
                out
            }
            Pos::Transit { .. } => vec![Motion::Wait],
            Pos::Free => std::iter::once(Motion::Wait)
                .chain(inst.graph.nodes().flat_map(|n| {
                    (0..=i64::from(inst.battery.operating_range)).map(move |c| Motion::Appear(n, c))
                }))
                .collect(),
        }
    };
    let mut out = Vec::with_capacity(subsets.len() * motions.len());
    for serve in &subsets {
        for motion in &motions {
            out.push(Action {
                serve: serve.clone(),
                motion: motion.clone(),
            });
        }
    }
    out
}

fn product(per_vehicle: &[Vec<Action>]) -> Vec<Vec<Action>> {
    let mut acc: Vec<Vec<Action>> = vec![Vec::new()];
    for opts in per_vehicle {
        let mut grown = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                grown.push(p);
            }
        }
        acc = grown;
    }
    acc
}

fn witness(rules: &Rules, layers: &[Vec<Node>], mut pi: usize, last: Vec<Action>, cost: u64) -> Schedule {
    let inst = rules.inst;
    let horizon = rules.horizon as usize;
    // walk back: states[t] and actions[t] for t in 0..=T
    let mut actions = vec![last];
    let mut states = Vec::with_capacity(horizon + 1);
    for t in (0..=horizon).rev() {
        let node = &layers[t][pi];
        states.push(node.state.clone());
        if t > 0 {
            actions.push(node.action.clone());
            pi = node.parent;
        }
    }
    states.reverse();
    actions.reverse();

    let mut vehicles: Vec<VehicleTimeline> = vec![VehicleTimeline::default(); inst.vehicles.len()];
    for (t, (s, acts)) in states.iter().zip(&actions).enumerate() {
        for (i, tl) in vehicles.iter_mut().enumerate() {
            let v = s.vehicles[i];
            let here = match v.pos {
                Pos::At(n) => Some(n),
                _ => None,
            };
            tl.location.push(here);
            tl.charge.push(if v.pos == Pos::Free { 0 } else { v.charge });
            if let (Some(from), Motion::Go(to) | Motion::GoAppear(to, ..)) = (here, &acts[i].motion) {
                tl.moves.push(MoveEvent {
                    time: t as u32,
                    from,
                    to: *to,
                });
            }
            for &(job, task) in &acts[i].serve {
                tl.services.push(ServiceEvent {
                    job,
                    task,
                    time: t as u32,
                });
            }
        }
    }
    Schedule {
        vehicles,
        total_cost: cost,
    }
}
