use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use crate::encoder::Family;
use crate::model::{Instance, MoveEvent, NodeId, Schedule};

/// Where a violation was observed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<u32>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCheck {
    pub family: Family,
    pub pass: bool,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub overall: bool,
    pub families: Vec<FamilyCheck>,
    /// Travelled distance recomputed from the move events.
    pub cost: u64,
    /// Distance claimed by the schedule.
    pub reported_cost: u64,
    pub charge_min: Option<i64>,
    pub charge_max: Option<i64>,
    /// Observations that do not fail validation.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn family(&self, f: Family) -> Option<&FamilyCheck> {
        self.families.iter().find(|c| c.family == f)
    }

    pub fn passed(&self, f: Family) -> bool {
        self.family(f).is_none_or(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<Family> {
        self.families.iter().filter(|c| !c.pass).map(|c| c.family).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable table, one row per family.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:<5} witness", "family", "ok");
        for c in &self.families {
            let w = c.witness.as_ref().map(describe).unwrap_or_default();
            let _ = writeln!(out, "{:<8} {:<5} {}", c.family, if c.pass { "pass" } else { "FAIL" }, w);
        }
        let _ = writeln!(out, "cost {} (reported {})", self.cost, self.reported_cost);
        if let (Some(lo), Some(hi)) = (self.charge_min, self.charge_max) {
            let _ = writeln!(out, "charge range [{lo}, {hi}]");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "overall {}", if self.overall { "PASS" } else { "FAIL" });
        out
    }
}

fn describe(w: &Witness) -> String {
    let mut parts = Vec::new();
    if let Some(v) = &w.vehicle {
        parts.push(format!("vehicle={v}"));
    }
    if let Some(n) = &w.node {
        parts.push(format!("node={n}"));
    }
    if let Some(j) = &w.job {
        parts.push(format!("job={j}"));
    }
    if let Some(k) = &w.task {
        parts.push(format!("task={k}"));
    }
    if let Some(t) = w.time {
        parts.push(format!("t={t}"));
    }
    parts.push(w.detail.clone());
    parts.join(" ")
}

struct Log<'a> {
    inst: &'a Instance,
    found: BTreeMap<Family, (usize, Witness)>,
}

impl Log<'_> {
    fn fail(&mut self, f: u8, w: Witness) {
        self.fail_family(Family::Rule(f), w);
    }

    fn fail_family(&mut self, f: Family, w: Witness) {
        self.found.entry(f).or_insert((0, w)).0 += 1;
    }

    fn vehicle(&self, i: usize) -> Option<String> {
        self.inst.vehicles.get(i).map(|v| v.id.clone())
    }

    fn node(&self, n: NodeId) -> Option<String> {
        (n.index() < self.inst.graph.node_count()).then(|| self.inst.graph.name(n).to_string())
    }

    fn at(&self, i: usize, node: Option<NodeId>, t: u32, detail: String) -> Witness {
        Witness {
            vehicle: self.vehicle(i),
            node: node.and_then(|n| self.node(n)),
            time: Some(t),
            detail,
            ..Witness::default()
        }
    }

    fn task(&self, i: Option<usize>, j: usize, k: Option<usize>, t: Option<u32>, detail: String) -> Witness {
        let job = self.inst.jobs.get(j);
        Witness {
            vehicle: i.and_then(|i| self.vehicle(i)),
            job: job.map(|x| x.id.clone()),
            task: k.and_then(|k| job.and_then(|x| x.tasks.get(k)).map(|x| x.id.clone())),
            time: t,
            detail,
            ..Witness::default()
        }
    }
}

enum Obligation {
    At(NodeId),
    Transit { to: NodeId, arrive: u32 },
    /// Departed too late for the arrival to be tracked.
    Free,
}

fn from_location(l: Option<NodeId>) -> Obligation {
    l.map_or(Obligation::Free, Obligation::At)
}

/// Per-vehicle facts derived from the timeline for the later checks.
#[derive(Default)]
struct Motion {
    /// Accepted move per time step `0..T`.
    moves: Vec<Option<MoveEvent>>,
    /// Step `t -> t+1` is part of a tracked traversal.
    transit: Vec<bool>,
    usable: bool,
}

/// Checks a schedule against every requirement by direct simulation.
pub fn validate(schedule: &Schedule, instance: &Instance) -> ValidationReport {
    let inst = instance;
    let g = &inst.graph;
    let horizon = inst.horizon();
    let steps = horizon as usize + 1;
    let nv = inst.vehicles.len();
    let mut log = Log {
        inst,
        found: BTreeMap::new(),
    };
    if schedule.vehicles.len() != nv {
        log.fail(
            11,
            Witness {
                detail: format!("{} timelines for {} vehicles", schedule.vehicles.len(), nv),
                ..Witness::default()
            },
        );
    }
    let timelines = &schedule.vehicles[..schedule.vehicles.len().min(nv)];

    // movement
    let mut motion: Vec<Motion> = Vec::with_capacity(timelines.len());
    for (i, tl) in timelines.iter().enumerate() {
        let mut m = Motion {
            moves: vec![None; horizon as usize],
            transit: vec![false; horizon as usize],
            usable: tl.location.len() == steps,
        };
        if !m.usable {
            let w = log.at(i, None, 0, format!("timeline has {} entries, expected {steps}", tl.location.len()));
            log.fail(11, w);
            motion.push(m);
            continue;
        }
        let loc = |t: u32| tl.location[t as usize];
        let start = inst.vehicles[i].start;
        if loc(0) != Some(start) {
            let w = log.at(i, Some(start), 0, "not at the start node".into());
            log.fail(9, w);
        }
        if loc(inst.deadline) != Some(start) {
            let w = log.at(i, Some(start), inst.deadline, "not back at the start node by the deadline".into());
            log.fail(10, w);
        }
        for mv in &tl.moves {
            let t = mv.time;
            if t >= horizon {
                let w = log.at(i, Some(mv.to), t, "move at or after the horizon".into());
                log.fail(13, w);
                continue;
            }
            if m.moves[t as usize].is_some() {
                let w = log.at(i, Some(mv.to), t, "second move at the same time".into());
                log.fail(13, w);
                continue;
            }
            if loc(t) != Some(mv.from) {
                let w = log.at(i, Some(mv.from), t, "move does not start at the current location".into());
                log.fail(15, w);
                continue;
            }
            if mv.to == mv.from {
                let w = log.at(i, Some(mv.to), t, "move to the current node".into());
                log.fail(14, w);
                continue;
            }
            if g.edge(mv.from, mv.to).is_none() {
                let w = log.at(i, Some(mv.to), t, "move along a missing edge".into());
                log.fail(15, w);
                continue;
            }
            m.moves[t as usize] = Some(*mv);
        }

        let mut state = from_location(loc(0));
        for t in 0..horizon {
            let next = loc(t + 1);
            if let Obligation::At(n) = state {
                match m.moves[t as usize] {
                    Some(mv) => {
                        let d = g.edge(n, mv.to).expect("accepted move follows an edge").length;
                        if t + d <= horizon {
                            for s in t..t + d {
                                m.transit[s as usize] = true;
                            }
                            state = Obligation::Transit {
                                to: mv.to,
                                arrive: t + d,
                            };
                        } else {
                            state = Obligation::Free;
                        }
                    }
                    None => {
                        if next != Some(n) {
                            let w = log.at(i, Some(n), t + 1, "left a node without moving".into());
                            log.fail(16, w);
                            state = from_location(next);
                            continue;
                        }
                    }
                }
            }
            state = match state {
                Obligation::Transit { arrive, .. } if t + 1 < arrive => {
                    if next.is_some() {
                        let w = log.at(i, next, t + 1, "at a node while traversing an edge".into());
                        log.fail(17, w);
                        from_location(next)
                    } else {
                        state
                    }
                }
                Obligation::Transit { to, .. } => {
                    if next != Some(to) {
                        let w = log.at(i, Some(to), t + 1, "did not arrive at the end of the edge".into());
                        log.fail(17, w);
                    }
                    from_location(next)
                }
                _ => from_location(next),
            };
        }
        motion.push(m);
    }

    // node occupancy
    for t in 0..steps {
        let mut seen: BTreeMap<NodeId, usize> = BTreeMap::new();
        for (i, tl) in timelines.iter().enumerate() {
            if !motion[i].usable {
                continue;
            }
            if let Some(n) = tl.location[t] {
                if g.is_hub(n) {
                    continue;
                }
                if let Some(&other) = seen.get(&n) {
                    let w = log.at(i, Some(n), t as u32, format!("shares the node with vehicle `{}`", inst.vehicles[other].id));
                    log.fail(12, w);
                } else {
                    seen.insert(n, i);
                }
            }
        }
    }

    // jobs and tasks
    let nj = inst.jobs.len();
    let mut servers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nj];
    let mut served: BTreeMap<(usize, usize), Vec<(usize, u32)>> = BTreeMap::new();
    for (i, tl) in timelines.iter().enumerate() {
        for s in &tl.services {
            let Some(task) = inst.jobs.get(s.job).and_then(|j| j.tasks.get(s.task)) else {
                let w = log.task(Some(i), s.job, None, Some(s.time), "service of an unknown task".into());
                log.fail(1, w);
                continue;
            };
            servers[s.job].insert(i);
            served.entry((s.job, s.task)).or_default().push((i, s.time));
            if s.time > horizon || !motion[i].usable || tl.location[s.time as usize] != Some(task.location) {
                let w = log.task(Some(i), s.job, Some(s.task), Some(s.time), "not at the task location".into());
                log.fail(1, w);
            }
            if s.time < task.tw_lower || s.time > task.tw_upper {
                let w = log.task(
                    Some(i),
                    s.job,
                    Some(s.task),
                    Some(s.time),
                    format!("outside the window [{}, {}]", task.tw_lower, task.tw_upper),
                );
                log.fail(7, w);
            }
            if !inst.jobs[s.job].eligible.contains(&i) {
                let w = log.task(Some(i), s.job, Some(s.task), Some(s.time), "vehicle not eligible".into());
                log.fail(8, w);
            }
        }
    }
    for (j, job) in inst.jobs.iter().enumerate() {
        match servers[j].len() {
            0 => {
                let w = log.task(None, j, None, None, "job never served".into());
                log.fail_family(Family::Cover, w);
                continue;
            }
            1 => {}
            _ => {
                let w = log.task(servers[j].iter().nth(1).copied(), j, None, None, "served by several vehicles".into());
                log.fail(2, w);
            }
        }
        for (k, task) in job.tasks.iter().enumerate() {
            let events = served.get(&(j, k)).map(Vec::as_slice).unwrap_or(&[]);
            match events {
                [] => {
                    let w = log.task(servers[j].first().copied(), j, Some(k), None, "task never served".into());
                    log.fail(6, w);
                }
                [_] => {}
                [_, (i, t), ..] => {
                    let w = log.task(Some(*i), j, Some(k), Some(*t), "task served more than once".into());
                    log.fail(3, w);
                }
            }
            let Some(&(i, t)) = events.first() else { continue };
            for &p in &task.predecessors {
                if let Some(&(_, tp)) = served.get(&(j, p)).and_then(|e| e.first()) {
                    if tp >= t {
                        let w = log.task(
                            Some(i),
                            j,
                            Some(k),
                            Some(t),
                            format!("predecessor `{}` served at {tp}", job.tasks[p].id),
                        );
                        log.fail(5, w);
                    }
                }
            }
        }
    }
    for (i, tl) in timelines.iter().enumerate() {
        let mut span: BTreeMap<usize, (u32, u32)> = BTreeMap::new();
        for s in tl.services.iter().filter(|s| s.job < nj) {
            let e = span.entry(s.job).or_insert((s.time, s.time));
            e.0 = e.0.min(s.time);
            e.1 = e.1.max(s.time);
        }
        for (&j, &(first, last)) in &span {
            if let Some(o) = tl
                .services
                .iter()
                .find(|s| s.job != j && s.job < nj && s.time > first && s.time <= last)
            {
                let w = log.task(
                    Some(i),
                    j,
                    None,
                    Some(o.time),
                    format!("job `{}` served in between", inst.jobs[o.job].id),
                );
                log.fail(18, w);
            }
        }
    }

    // edge capacity
    let mut warnings = Vec::new();
    for (&(n, m), e) in g.edges() {
        let cap = e.capacity as usize;
        let d = e.length;
        let departing = |t: u32| -> Vec<usize> {
            (0..timelines.len())
                .filter(|&i| motion[i].usable && motion[i].moves[t as usize].is_some_and(|mv| mv.from == n && mv.to == m))
                .collect()
        };
        for t in 0..horizon {
            let dep = departing(t);
            if dep.len() > cap {
                let w = log.at(dep[cap], Some(n), t, format!("{} departures towards {}", dep.len(), g.name(m)));
                log.fail(19, w);
            }
            if dep.is_empty() || t + d > horizon {
                continue;
            }
            let opposing: Vec<usize> = (0..timelines.len())
                .filter(|&i| motion[i].usable && timelines[i].location[t as usize] == Some(m))
                .collect();
            let allowed = cap - dep.len().min(cap);
            for t2 in t..=t + d {
                let against: Vec<usize> = opposing
                    .iter()
                    .copied()
                    .filter(|&i| motion[i].moves.get(t2 as usize).copied().flatten().is_some_and(|mv| mv.to == n))
                    .collect();
                if against.len() > allowed {
                    let w = log.at(
                        against[0],
                        Some(m),
                        t2,
                        format!("enters {} against traffic departed at {t}", g.name(n)),
                    );
                    log.fail(20, w);
                }
            }
        }
        // same-direction overlap: reported only
        for t in 0..horizon {
            let active: usize = (t.saturating_sub(d - 1)..=t).map(|s| departing(s).len()).sum();
            if active > cap && !departing(t).is_empty() {
                warnings.push(format!(
                    "{} vehicles on {}->{} at time {t} (capacity {cap})",
                    active,
                    g.name(n),
                    g.name(m)
                ));
            }
        }
    }

    // battery
    let b = &inst.battery;
    let range = i64::from(b.operating_range);
    let mut lo: Option<i64> = None;
    let mut hi: Option<i64> = None;
    for (i, tl) in timelines.iter().enumerate() {
        let c = &tl.charge;
        if c.len() != steps {
            let w = log.at(i, None, 0, format!("charge trace has {} entries, expected {steps}", c.len()));
            log.fail(21, w);
            continue;
        }
        if let (Some(&a), Some(&z)) = (c.iter().min(), c.iter().max()) {
            lo = Some(lo.map_or(a, |x| x.min(a)));
            hi = Some(hi.map_or(z, |x| x.max(z)));
        }
        if c[0] != range {
            let w = log.at(i, None, 0, format!("initial charge {} instead of {range}", c[0]));
            log.fail(21, w);
        }
        if let Some(t) = c.iter().position(|&x| x < 0 || x > range) {
            let w = log.at(i, None, t as u32, format!("charge {} outside [0, {range}]", c[t]));
            log.fail(21, w);
        }
        let m = &motion[i];
        if !m.usable {
            continue;
        }
        for t in 0..horizon as usize {
            let (now, next) = (c[t], c[t + 1]);
            if m.transit[t] {
                let want = now - i64::from(b.discharge_coeff);
                if next != want {
                    let w = log.at(i, None, t as u32 + 1, format!("charge {next} while travelling, expected {want}"));
                    log.fail(22, w);
                }
            } else if let (Some(n), None) = (tl.location[t], m.moves[t]) {
                if b.is_station(n) {
                    let want = now + i64::from(b.charge_coeff);
                    if next != want {
                        let w = log.at(i, Some(n), t as u32 + 1, format!("charge {next} at a charger, expected {want}"));
                        log.fail(24, w);
                    }
                } else if next != now {
                    let w = log.at(i, Some(n), t as u32 + 1, format!("charge {next} while parked, expected {now}"));
                    log.fail(23, w);
                }
            }
        }
    }

    let cost = schedule.move_cost(inst);
    if cost != schedule.total_cost {
        log.fail(
            25,
            Witness {
                detail: format!("reported cost {} but moves add up to {cost}", schedule.total_cost),
                ..Witness::default()
            },
        );
    }

    let families: Vec<FamilyCheck> = Family::all()
        .map(|f| match log.found.remove(&f) {
            Some((n, w)) => FamilyCheck {
                family: f,
                pass: false,
                violations: n,
                witness: Some(w),
            },
            None => FamilyCheck {
                family: f,
                pass: true,
                violations: 0,
                witness: None,
            },
        })
        .collect();
    ValidationReport {
        overall: families.iter().all(|c| c.pass),
        families,
        cost,
        reported_cost: schedule.total_cost,
        charge_min: lo,
        charge_max: hi,
        warnings,
    }
}
