use crate::encoder::term::{Names, VarId};
use crate::encoder::EncodedModel;
use crate::model::{Instance, MoveEvent, NodeId, Schedule, ServiceEvent, VehicleTimeline};
use crate::smt::SolverModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("vehicle `{vehicle}` is at {nodes:?} at time {time} (at most one location)")]
    SeveralLocations { vehicle: String, time: u32, nodes: Vec<String> },
    #[error("vehicle `{vehicle}` moves to {nodes:?} at time {time} (at most one destination)")]
    SeveralMoves { vehicle: String, time: u32, nodes: Vec<String> },
    #[error("no value for `{var}`")]
    MissingCharge { var: String },
}

/// Reads a schedule off a satisfying assignment.
///
/// A task's service time is the earliest time inside its window at which its
/// service variable holds for the vehicle assigned to the job, falling back
/// to the earliest such time anywhere.
pub fn decode(model: &SolverModel, encoded: &EncodedModel, instance: &Instance) -> Result<Schedule, DecodeError> {
    let l = &encoded.layout;
    let names = &encoded.table;
    let truth = |v: VarId| model.bool(names.var_name(v)).unwrap_or(false);
    let g = &instance.graph;
    let horizon = instance.horizon();
    let node_names = |ns: &[NodeId]| ns.iter().map(|&n| g.name(n).to_string()).collect();

    let mut vehicles = Vec::with_capacity(instance.vehicles.len());
    for (i, v) in instance.vehicles.iter().enumerate() {
        let mut tl = VehicleTimeline::default();
        for t in 0..=horizon {
            let here: Vec<NodeId> = g.nodes().filter(|&n| truth(l.at(i, n, t))).collect();
            if here.len() > 1 {
                return Err(DecodeError::SeveralLocations {
                    vehicle: v.id.clone(),
                    time: t,
                    nodes: node_names(&here),
                });
            }
            tl.location.push(here.first().copied());
        }
        for t in 0..horizon {
            let Some(from) = tl.location[t as usize] else { continue };
            let dest: Vec<NodeId> = g.nodes().filter(|&n| truth(l.mv(i, n, t))).collect();
            match dest.as_slice() {
                [] => {}
                [to] => tl.moves.push(MoveEvent { time: t, from, to: *to }),
                _ => {
                    return Err(DecodeError::SeveralMoves {
                        vehicle: v.id.clone(),
                        time: t,
                        nodes: node_names(&dest),
                    })
                }
            }
        }
        for t in 0..=horizon {
            let var = names.var_name(l.rc(i, t));
            let c = model.int(var).ok_or_else(|| DecodeError::MissingCharge { var: var.to_string() })?;
            tl.charge.push(c);
        }
        vehicles.push(tl);
    }

    for (j, job) in instance.jobs.iter().enumerate() {
        let Some(i) = (0..instance.vehicles.len()).find(|&i| truth(l.x(i, j))) else {
            continue;
        };
        for (k, task) in job.tasks.iter().enumerate() {
            let served = |t: &u32| truth(l.z(i, j, k, *t));
            let time = (task.tw_lower..=task.tw_upper)
                .find(served)
                .or_else(|| (0..=horizon).find(served));
            if let Some(time) = time {
                vehicles[i].services.push(ServiceEvent { job: j, task: k, time });
            }
        }
    }
    for tl in &mut vehicles {
        tl.services.sort_by_key(|s| (s.time, s.job, s.task));
    }
    let mut schedule = Schedule {
        vehicles,
        total_cost: 0,
    };
    schedule.total_cost = schedule.move_cost(instance);
    Ok(schedule)
}
