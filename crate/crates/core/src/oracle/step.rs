//! Joint state and the one-step transition relation shared by the search
//! and the schedule replay.

use std::collections::BTreeMap;

use crate::model::{Instance, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    At(NodeId),
    Transit { to: NodeId, arrive: u32 },
    /// Departed too late for the arrival to be tracked; may reappear anywhere.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VState {
    pub pos: Pos,
    /// Meaningless (kept 0) while free.
    pub charge: i64,
    /// Job started but not finished by this vehicle.
    pub open: Option<u8>,
}

/// Opposing-traffic restriction created by departures on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction {
    /// Vehicles at the head of the edge when the departure happened.
    pub vehicles: u16,
    /// Tail of the edge; those vehicles may not flood into it.
    pub target: NodeId,
    pub until: u32,
    pub limit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointState {
    pub vehicles: Vec<VState>,
    /// Vehicle bound to each job.
    pub bound: Vec<Option<u8>>,
    /// Served tasks, one bit per task in job-major order.
    pub served: u64,
    pub pending: Vec<Restriction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Motion {
    /// No choice: in transit, free and staying free, or at the horizon.
    Wait,
    Stay,
    Go(NodeId),
    Appear(NodeId, i64),
    /// Departure whose arrival lies past the horizon, reappearing at the
    /// next step.
    GoAppear(NodeId, NodeId, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    /// `(job, task)` pairs served at this step.
    pub serve: Vec<(usize, usize)>,
    pub motion: Motion,
}

pub struct Rules<'a> {
    pub inst: &'a Instance,
    pub horizon: u32,
    task_base: Vec<usize>,
}

impl<'a> Rules<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let mut task_base = Vec::new();
        let mut n = 0;
        for j in &inst.jobs {
            task_base.push(n);
            n += j.tasks.len();
        }
        Self {
            inst,
            horizon: inst.horizon(),
            task_base,
        }
    }

    pub fn bit(&self, j: usize, k: usize) -> u64 {
        1u64 << (self.task_base[j] + k)
    }

    fn job_mask(&self, j: usize) -> u64 {
        (0..self.inst.jobs[j].tasks.len()).fold(0, |m, k| m | self.bit(j, k))
    }

    pub fn all_served(&self) -> u64 {
        (0..self.inst.jobs.len()).fold(0, |m, j| m | self.job_mask(j))
    }

    pub fn initial(&self) -> JointState {
        JointState {
            vehicles: self
                .inst
                .vehicles
                .iter()
                .map(|v| VState {
                    pos: Pos::At(v.start),
                    charge: i64::from(self.inst.battery.operating_range),
                    open: None,
                })
                .collect(),
            bound: vec![None; self.inst.jobs.len()],
            served: 0,
            pending: Vec::new(),
        }
    }

    /// Conditions on a state at time `t` by itself: node occupancy and the
    /// return to the start nodes at the deadline.
    pub fn state_ok(&self, t: u32, s: &JointState) -> bool {
        let g = &self.inst.graph;
        let mut seen = Vec::new();
        for v in &s.vehicles {
            if let Pos::At(n) = v.pos {
                if !g.is_hub(n) {
                    if seen.contains(&n) {
                        return false;
                    }
                    seen.push(n);
                }
            }
        }
        if t == self.inst.deadline {
            return s
                .vehicles
                .iter()
                .zip(&self.inst.vehicles)
                .all(|(v, veh)| v.pos == Pos::At(veh.start));
        }
        true
    }

    /// Final acceptance at the horizon, after the last services.
    pub fn complete(&self, s: &JointState) -> bool {
        s.served == self.all_served()
    }

    /// Tasks vehicle `i` could serve at `t` taken one at a time.
    pub fn servable(&self, t: u32, s: &JointState, i: usize) -> Vec<(usize, usize)> {
        let Pos::At(n) = s.vehicles[i].pos else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (j, job) in self.inst.jobs.iter().enumerate() {
            if !job.eligible.contains(&i) || s.bound[j].is_some_and(|b| b as usize != i) {
                continue;
            }
            for (k, task) in job.tasks.iter().enumerate() {
                if task.location == n
                    && task.tw_lower <= t
                    && t <= task.tw_upper
                    && s.served & self.bit(j, k) == 0
                    && task.predecessors.iter().all(|&p| s.served & self.bit(j, p) != 0)
                {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Applies one joint action at time `t`. Returns the successor state
    /// (meaningless at the horizon) and the distance travelled, or `None`
    /// when the action breaks a rule.
    pub fn step(&self, t: u32, s: &JointState, actions: &[Action]) -> Option<(JointState, u64)> {
        let inst = self.inst;
        let g = &inst.graph;
        let b = &inst.battery;
        let range = i64::from(b.operating_range);
        let mut next = s.clone();
        let mut cost = 0u64;

        // services
        for (i, a) in actions.iter().enumerate() {
            if a.serve.is_empty() {
                continue;
            }
            let Pos::At(n) = s.vehicles[i].pos else { return None };
            let mut started: Vec<usize> = Vec::new();
            for &(j, k) in &a.serve {
                let job = inst.jobs.get(j)?;
                let task = job.tasks.get(k)?;
                if task.location != n || t < task.tw_lower || t > task.tw_upper || !job.eligible.contains(&i) {
                    return None;
                }
                // served before this step, or earlier in this one
                if next.served & self.bit(j, k) != 0 {
                    return None;
                }
                if task.predecessors.iter().any(|&p| s.served & self.bit(j, p) == 0) {
                    return None;
                }
                match next.bound[j] {
                    Some(v) if v as usize != i => return None,
                    _ => next.bound[j] = Some(i as u8),
                }
                if let Some(open) = s.vehicles[i].open {
                    if open as usize != j {
                        return None;
                    }
                }
                next.served |= self.bit(j, k);
                if !started.contains(&j) {
                    started.push(j);
                }
            }
            let unfinished: Vec<usize> = started
                .iter()
                .copied()
                .filter(|&j| next.served & self.job_mask(j) != self.job_mask(j))
                .collect();
            next.vehicles[i].open = match unfinished.as_slice() {
                [] => None,
                [j] => Some(*j as u8),
                _ => return None,
            };
        }

        if t == self.horizon {
            return actions.iter().all(|a| a.motion == Motion::Wait).then_some((next, 0));
        }

        // motion
        let mut departures: BTreeMap<(NodeId, NodeId), Vec<usize>> = BTreeMap::new();
        let mut into: Vec<Option<NodeId>> = vec![None; actions.len()];
        for (i, a) in actions.iter().enumerate() {
            let v = s.vehicles[i];
            let nv = &mut next.vehicles[i];
            match (v.pos, &a.motion) {
                (Pos::At(n), Motion::Stay) => {
                    let c = if b.is_station(n) {
                        v.charge + i64::from(b.charge_coeff)
                    } else {
                        v.charge
                    };
                    if c > range {
                        return None;
                    }
                    nv.charge = c;
                }
                (Pos::At(n), &(Motion::Go(m) | Motion::GoAppear(m, ..))) => {
                    let e = g.edge(n, m).filter(|_| m != n)?;
                    cost += u64::from(e.length);
                    departures.entry((n, m)).or_default().push(i);
                    into[i] = Some(m);
                    if t + e.length <= self.horizon {
                        if matches!(a.motion, Motion::GoAppear(..)) {
                            return None;
                        }
                        let d = i64::from(b.discharge_coeff);
                        if v.charge - d * i64::from(e.length) < 0 {
                            return None;
                        }
                        nv.charge = v.charge - d;
                        nv.pos = if e.length == 1 {
                            Pos::At(m)
                        } else {
                            Pos::Transit {
                                to: m,
                                arrive: t + e.length,
                            }
                        };
                    } else if let &Motion::GoAppear(_, p, c) = &a.motion {
                        if p.index() >= g.node_count() || !(0..=range).contains(&c) {
                            return None;
                        }
                        nv.pos = Pos::At(p);
                        nv.charge = c;
                    } else {
                        nv.pos = Pos::Free;
                        nv.charge = 0;
                    }
                }
                (Pos::Transit { to, arrive }, Motion::Wait) => {
                    nv.charge = v.charge - i64::from(b.discharge_coeff);
                    if t + 1 == arrive {
                        nv.pos = Pos::At(to);
                    }
                }
                (Pos::Free, Motion::Wait) => {}
                (Pos::Free, &Motion::Appear(n, c)) => {
                    if n.index() >= g.node_count() || !(0..=range).contains(&c) {
                        return None;
                    }
                    nv.pos = Pos::At(n);
                    nv.charge = c;
                }
                _ => return None,
            }
        }

        // conflict-free routing
        for (&(n, m), deps) in &departures {
            let e = g.edge(n, m).expect("departure along an edge");
            let cap = e.capacity as usize;
            if deps.len() > cap {
                return None;
            }
            if t + e.length <= self.horizon {
                let opposing = s
                    .vehicles
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.pos == Pos::At(m))
                    .fold(0u16, |acc, (i, _)| acc | 1 << i);
                next.pending.push(Restriction {
                    vehicles: opposing,
                    target: n,
                    until: t + e.length,
                    limit: (cap - deps.len().min(cap)) as u8,
                });
            }
        }
        for r in &next.pending {
            let count = (0..actions.len())
                .filter(|&i| r.vehicles & (1 << i) != 0 && into[i] == Some(r.target))
                .count();
            if count > r.limit as usize {
                return None;
            }
        }
        next.pending.retain(|r| r.until > t);
        next.pending.sort();
        next.pending.dedup();
        Some((next, cost))
    }
}
