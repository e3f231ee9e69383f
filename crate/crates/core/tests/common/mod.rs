//! Schedule mutation helpers shared by the integration tests.
#![allow(dead_code)]

use cfevrp::model::{Instance, MoveEvent, Schedule, ServiceEvent};
use rand::seq::SliceRandom;
use rand::Rng;

/// Recomputes locations, charge levels and cost from the move events,
/// keeping each vehicle's position at t = 0. Moves that do not fit the
/// trajectory are kept verbatim so the result stays invalid.
pub fn rebuild(s: &mut Schedule, inst: &Instance) {
    let horizon = inst.horizon();
    let b = &inst.battery;
    for v in &mut s.vehicles {
        v.moves.sort();
        let mut loc = vec![None; horizon as usize + 1];
        let mut charge = vec![0i64; horizon as usize + 1];
        loc[0] = v.location.first().copied().flatten();
        charge[0] = i64::from(b.operating_range);
        let mut t = 0u32;
        while t < horizon {
            let here = loc[t as usize];
            let mv = v.moves.iter().find(|m| m.time == t && Some(m.from) == here);
            match (here, mv.and_then(|m| inst.graph.edge(m.from, m.to).map(|e| (m, e.length)))) {
                (Some(_), Some((m, d))) => {
                    for k in 1..=d {
                        let tk = t + k;
                        if tk > horizon {
                            break;
                        }
                        charge[tk as usize] = charge[tk as usize - 1] - i64::from(b.discharge_coeff);
                        loc[tk as usize] = if k == d { Some(m.to) } else { None };
                    }
                    t += d;
                }
                (Some(n), None) => {
                    let up = if b.is_station(n) { i64::from(b.charge_coeff) } else { 0 };
                    charge[t as usize + 1] = charge[t as usize] + up;
                    loc[t as usize + 1] = Some(n);
                    t += 1;
                }
                (None, _) => {
                    charge[t as usize + 1] = charge[t as usize];
                    t += 1;
                }
            }
        }
        v.location = loc;
        v.charge = charge;
    }
    s.total_cost = s.move_cost(inst);
}

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> Option<&'a T> {
    xs.choose(rng)
}

/// One random edit. Some edits keep the schedule coherent (moves rebuilt
/// into locations and charge), others break a single field.
pub fn mutate<R: Rng>(s: &Schedule, inst: &Instance, rng: &mut R) -> Schedule {
    let mut m = s.clone();
    let nv = m.vehicles.len();
    if nv == 0 {
        return m;
    }
    let horizon = inst.horizon();
    let i = rng.gen_range(0..nv);
    match rng.gen_range(0..12) {
        0 => {
            // shift a service in time
            if let Some(k) = (0..m.vehicles[i].services.len()).collect::<Vec<_>>().choose(rng).copied() {
                let sv = &mut m.vehicles[i].services[k];
                sv.time = if rng.gen_bool(0.5) { sv.time.saturating_sub(rng.gen_range(1..=2)) } else { (sv.time + rng.gen_range(1..=2)).min(horizon) };
            }
        }
        1 => {
            if !m.vehicles[i].services.is_empty() {
                let k = rng.gen_range(0..m.vehicles[i].services.len());
                m.vehicles[i].services.remove(k);
            }
        }
        2 => {
            // hand a service to another vehicle at the same time
            let j = rng.gen_range(0..nv);
            if !m.vehicles[i].services.is_empty() {
                let k = rng.gen_range(0..m.vehicles[i].services.len());
                let sv = m.vehicles[i].services.remove(k);
                m.vehicles[j].services.push(sv);
                m.vehicles[j].services.sort();
            }
        }
        3 => {
            // serve a random task at the vehicle's current node
            if !inst.jobs.is_empty() {
                let t = rng.gen_range(0..=horizon);
                let job = rng.gen_range(0..inst.jobs.len());
                let task = rng.gen_range(0..inst.jobs[job].tasks.len());
                m.vehicles[i].services.push(ServiceEvent { job, task, time: t });
                m.vehicles[i].services.sort();
            }
        }
        4 => {
            let t = rng.gen_range(0..=horizon as usize);
            if let Some(c) = m.vehicles[i].charge.get_mut(t) {
                *c += if rng.gen_bool(0.5) { 1 } else { -1 };
            }
        }
        5 => {
            // delay every move from some point on
            let moves = &mut m.vehicles[i].moves;
            if !moves.is_empty() {
                let from = rng.gen_range(0..moves.len());
                let by = rng.gen_range(1..=2);
                for mv in &mut moves[from..] {
                    mv.time += by;
                }
                moves.retain(|mv| mv.time <= horizon);
            }
            rebuild(&mut m, inst);
        }
        6 => {
            // advance every move from some point on
            let moves = &mut m.vehicles[i].moves;
            if !moves.is_empty() {
                let from = rng.gen_range(0..moves.len());
                if moves[from].time > 0 {
                    for mv in &mut moves[from..] {
                        mv.time = mv.time.saturating_sub(1);
                    }
                }
            }
            rebuild(&mut m, inst);
        }
        7 => {
            // drop one move
            if !m.vehicles[i].moves.is_empty() {
                let k = rng.gen_range(0..m.vehicles[i].moves.len());
                m.vehicles[i].moves.remove(k);
            }
            rebuild(&mut m, inst);
        }
        8 => {
            // out-and-back detour while idle
            let idle: Vec<u32> = (0..horizon)
                .filter(|&t| m.vehicles[i].loc(t).is_some() && m.vehicles[i].move_at(t).is_none())
                .collect();
            if let Some(&t) = pick(rng, &idle) {
                let n = m.vehicles[i].loc(t).unwrap();
                if let Some(&to) = pick(rng, inst.graph.successors(n)) {
                    let d = inst.graph.edge(n, to).unwrap().length;
                    let back = inst.graph.edge(to, n).map(|e| e.length);
                    m.vehicles[i].moves.push(MoveEvent { time: t, from: n, to });
                    if let Some(bd) = back {
                        // later moves are pushed back by the detour length
                        let shift = d + bd;
                        for mv in m.vehicles[i].moves.iter_mut().filter(|mv| mv.time > t) {
                            mv.time += shift;
                        }
                        m.vehicles[i].moves.push(MoveEvent { time: t + d, from: to, to: n });
                        for sv in m.vehicles[i].services.iter_mut().filter(|sv| sv.time > t) {
                            sv.time += shift;
                        }
                    }
                    m.vehicles[i].moves.retain(|mv| mv.time <= horizon);
                }
            }
            rebuild(&mut m, inst);
        }
        9 => {
            // redirect a move to another successor
            if !m.vehicles[i].moves.is_empty() {
                let k = rng.gen_range(0..m.vehicles[i].moves.len());
                let from = m.vehicles[i].moves[k].from;
                if let Some(&to) = pick(rng, inst.graph.successors(from)) {
                    m.vehicles[i].moves[k].to = to;
                }
            }
            rebuild(&mut m, inst);
        }
        10 => {
            m.total_cost = m.total_cost.saturating_add_signed(if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        _ => {
            // overwrite one location entry
            let t = rng.gen_range(0..=horizon as usize);
            let n = rng.gen_range(0..inst.graph.node_count());
            if let Some(l) = m.vehicles[i].location.get_mut(t) {
                *l = if rng.gen_bool(0.2) { None } else { inst.graph.nodes().nth(n) };
            }
        }
    }
    m
}
