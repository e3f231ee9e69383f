use crate::model::{Instance, Schedule};

use super::step::{Action, Motion, Pos, Rules};

/// Replays `schedule` through the oracle's transition relation.
///
/// No size guard applies: replay is linear in the horizon.
pub fn oracle_check_schedule(schedule: &Schedule, instance: &Instance) -> bool {
    let rules = Rules::new(instance);
    let horizon = rules.horizon;
    let steps = horizon as usize + 1;
    let range = i64::from(instance.battery.operating_range);
    let nv = instance.vehicles.len();
    if schedule.vehicles.len() != nv || instance.task_count() > 64 || nv > 16 {
        return false;
    }
    for tl in &schedule.vehicles {
        if tl.location.len() != steps || tl.charge.len() != steps {
            return false;
        }
        if tl.charge.iter().any(|&c| c < 0 || c > range) {
            return false;
        }
        let mut times: Vec<u32> = tl.moves.iter().map(|m| m.time).collect();
        times.sort_unstable();
        if times.windows(2).any(|w| w[0] == w[1]) || times.last().is_some_and(|&t| t >= horizon) {
            return false;
        }
        if tl.services.iter().any(|s| s.time > horizon) {
            return false;
        }
    }

    let untracked = |from, to, t: u32| instance.graph.edge(from, to).is_some_and(|e| t + e.length > horizon);
    let mut state = rules.initial();
    let mut cost = 0;
    for t in 0..=horizon {
        let ti = t as usize;
        if !rules.state_ok(t, &state) {
            return false;
        }
        let mut actions = Vec::with_capacity(nv);
        for (i, tl) in schedule.vehicles.iter().enumerate() {
            let v = state.vehicles[i];
            match v.pos {
                Pos::At(n) => {
                    if tl.location[ti] != Some(n) || tl.charge[ti] != v.charge {
                        return false;
                    }
                }
                Pos::Transit { .. } => {
                    if tl.location[ti].is_some() || tl.charge[ti] != v.charge {
                        return false;
                    }
                }
                Pos::Free => {
                    if tl.location[ti].is_some() {
                        return false;
                    }
                }
            }
            let serve = tl
                .services
                .iter()
                .filter(|s| s.time == t)
                .map(|s| (s.job, s.task))
                .collect();
            let mv = tl.move_at(t);
            let motion = if t == horizon {
                Motion::Wait
            } else {
                match v.pos {
                    Pos::At(n) => match mv {
                        Some(m) if m.from == n => match (untracked(m.from, m.to, t), tl.location[ti + 1]) {
                            (true, Some(p)) => Motion::GoAppear(m.to, p, tl.charge[ti + 1]),
                            _ => Motion::Go(m.to),
                        },
                        Some(_) => return false,
                        None => Motion::Stay,
                    },
                    Pos::Transit { .. } if mv.is_some() => return false,
                    Pos::Transit { .. } => Motion::Wait,
                    Pos::Free if mv.is_some() => return false,
                    Pos::Free => match tl.location[ti + 1] {
                        Some(n) => Motion::Appear(n, tl.charge[ti + 1]),
                        None => Motion::Wait,
                    },
                }
            };
            actions.push(Action { serve, motion });
        }
        let Some((next, c)) = rules.step(t, &state, &actions) else {
            return false;
        };
        cost += c;
        if t == horizon {
            return rules.complete(&next) && cost == schedule.total_cost;
        }
        state = next;
    }
    unreachable!("the horizon step returns")
}
