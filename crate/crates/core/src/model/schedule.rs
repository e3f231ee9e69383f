use serde::{Deserialize, Serialize};

use super::graph::NodeId;
use super::instance::{Instance, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MoveEvent {
    pub time: u32,
    pub from: NodeId,
    pub to: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServiceEvent {
    pub job: usize,
    pub task: usize,
    pub time: u32,
}

/// Timeline of a single vehicle over `0..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VehicleTimeline {
    /// `location[t]` is the node the vehicle is at, `None` while in transit.
    pub location: Vec<Option<NodeId>>,
    pub moves: Vec<MoveEvent>,
    pub services: Vec<ServiceEvent>,
    pub charge: Vec<i64>,
}

impl VehicleTimeline {
    pub fn move_at(&self, t: u32) -> Option<&MoveEvent> {
        self.moves.iter().find(|m| m.time == t)
    }

    pub fn loc(&self, t: u32) -> Option<NodeId> {
        self.location.get(t as usize).copied().flatten()
    }
}

/// Per-vehicle timelines plus the travelled distance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    pub vehicles: Vec<VehicleTimeline>,
    pub total_cost: u64,
}

impl Schedule {
    /// Sum of edge lengths over all move events; events on non-edges count 0.
    pub fn move_cost(&self, instance: &Instance) -> u64 {
        self.vehicles
            .iter()
            .flat_map(|v| v.moves.iter())
            .filter_map(|m| instance.graph.edge(m.from, m.to))
            .map(|e| u64::from(e.length))
            .sum()
    }

    pub fn to_file(&self, instance: &Instance) -> ScheduleFile {
        let g = &instance.graph;
        let name = |n: NodeId| g.name(n).to_string();
        ScheduleFile {
            total_cost: self.total_cost,
            vehicles: self
                .vehicles
                .iter()
                .enumerate()
                .map(|(i, v)| VehicleRecord {
                    id: instance.vehicles.get(i).map(|x| x.id.clone()).unwrap_or_default(),
                    location: v.location.iter().map(|l| l.map(name)).collect(),
                    moves: v
                        .moves
                        .iter()
                        .map(|m| MoveRecord {
                            time: m.time,
                            from: name(m.from),
                            to: name(m.to),
                        })
                        .collect(),
                    services: v
                        .services
                        .iter()
                        .map(|s| {
                            let job = &instance.jobs[s.job];
                            ServiceRecord {
                                job: job.id.clone(),
                                task: job.tasks[s.task].id.clone(),
                                time: s.time,
                            }
                        })
                        .collect(),
                    charge: v.charge.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self, instance: &Instance) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file(instance)).expect("schedule serializes");
        s.push('\n');
        s
    }

    /// Resolves names against `instance`. Vehicles are matched by id and
    /// reordered to instance order.
    pub fn from_file(file: &ScheduleFile, instance: &Instance) -> Result<Self, ModelError> {
        let g = &instance.graph;
        let node = |path: String, n: &str| {
            g.find(n).ok_or_else(|| ModelError::UnknownNode {
                path,
                node: n.to_string(),
            })
        };
        let mut vehicles = vec![None; instance.vehicles.len()];
        for (vi, rec) in file.vehicles.iter().enumerate() {
            let p = format!("vehicles[{vi}]");
            let ix = instance
                .vehicle_index(&rec.id)
                .ok_or_else(|| ModelError::UnknownVehicle {
                    path: format!("{p}.id"),
                    vehicle: rec.id.clone(),
                })?;
            let mut tl = VehicleTimeline {
                charge: rec.charge.clone(),
                ..Default::default()
            };
            for (t, l) in rec.location.iter().enumerate() {
                tl.location.push(match l {
                    Some(n) => Some(node(format!("{p}.location[{t}]"), n)?),
                    None => None,
                });
            }
            for (k, m) in rec.moves.iter().enumerate() {
                tl.moves.push(MoveEvent {
                    time: m.time,
                    from: node(format!("{p}.moves[{k}].from"), &m.from)?,
                    to: node(format!("{p}.moves[{k}].to"), &m.to)?,
                });
            }
            for (k, s) in rec.services.iter().enumerate() {
                let sp = format!("{p}.services[{k}]");
                let job = instance.job_index(&s.job).ok_or_else(|| ModelError::Invalid {
                    path: format!("{sp}.job"),
                    reason: format!("unknown job `{}`", s.job),
                })?;
                let task = instance.jobs[job]
                    .tasks
                    .iter()
                    .position(|t| t.id == s.task)
                    .ok_or_else(|| ModelError::UnknownTask {
                        path: format!("{sp}.task"),
                        task: s.task.clone(),
                    })?;
                tl.services.push(ServiceEvent {
                    job,
                    task,
                    time: s.time,
                });
            }
            if vehicles[ix].replace(tl).is_some() {
                return Err(ModelError::Invalid {
                    path: p,
                    reason: format!("vehicle `{}` listed twice", rec.id),
                });
            }
        }
        let vehicles = vehicles
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| ModelError::Invalid {
                    path: "vehicles".into(),
                    reason: format!("missing timeline for vehicle `{}`", instance.vehicles[i].id),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            vehicles,
            total_cost: file.total_cost,
        })
    }

    pub fn from_json(text: &str, instance: &Instance) -> Result<Self, ModelError> {
        Self::from_file(&serde_json::from_str(text)?, instance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub total_cost: u64,
    pub vehicles: Vec<VehicleRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub id: String,
    pub location: Vec<Option<String>>,
    pub moves: Vec<MoveRecord>,
    pub services: Vec<ServiceRecord>,
    pub charge: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub time: u32,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRecord {
    pub job: String,
    pub task: String,
    pub time: u32,
}
