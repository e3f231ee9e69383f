use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{EdgeAttr, Graph, NodeId};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: unknown node `{node}`")]
    UnknownNode { path: String, node: String },
    #[error("{path}: unknown vehicle `{vehicle}`")]
    UnknownVehicle { path: String, vehicle: String },
    #[error("{path}: unknown task `{task}`")]
    UnknownTask { path: String, task: String },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        path: path.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vehicle {
    pub id: String,
    pub start: NodeId,
}

/// Pickup or delivery operation; service duration is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    pub location: NodeId,
    /// Indices (within the owning job) of tasks that must be served strictly
    /// earlier.
    pub predecessors: Vec<usize>,
    pub tw_lower: u32,
    pub tw_upper: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: String,
    pub tasks: Vec<Task>,
    /// Indices of the eligible vehicles.
    pub eligible: BTreeSet<usize>,
    /// Index of the delivery task: the unique task that transitively
    /// succeeds every other task of the job.
    pub delivery: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatteryParams {
    pub operating_range: u32,
    pub charge_coeff: u32,
    pub discharge_coeff: u32,
    pub stations: BTreeSet<NodeId>,
}

impl BatteryParams {
    pub fn is_station(&self, n: NodeId) -> bool {
        self.stations.contains(&n)
    }
}

/// A complete, validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub vehicles: Vec<Vehicle>,
    pub jobs: Vec<Job>,
    pub battery: BatteryParams,
    /// Time by which every vehicle must be back at its start node.
    pub deadline: u32,
    longest_edge: u32,
    horizon: u32,
}

impl Instance {
    pub fn longest_edge(&self) -> u32 {
        self.longest_edge
    }

    /// Last time index of the encoding: deadline plus the longest edge.
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn job_index(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }

    pub fn vehicle_index(&self, id: &str) -> Option<usize> {
        self.vehicles.iter().position(|v| v.id == id)
    }

    pub fn task_count(&self) -> usize {
        self.jobs.iter().map(|j| j.tasks.len()).sum()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| ModelError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Checks every invariant of the file document and resolves names.
    pub fn from_file(file: &InstanceFile) -> Result<Self, ModelError> {
        let mut node_ix: HashMap<&str, NodeId> = HashMap::new();
        for (i, name) in file.nodes.iter().enumerate() {
            if node_ix.insert(name.as_str(), NodeId(i)).is_some() {
                return Err(invalid(format!("nodes[{i}]"), format!("duplicate node `{name}`")));
            }
        }
        let node = |path: String, name: &str| {
            node_ix
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownNode {
                    path,
                    node: name.to_string(),
                })
        };

        let mut hubs = BTreeSet::new();
        for (i, h) in file.hubs.iter().enumerate() {
            hubs.insert(node(format!("hubs[{i}]"), h)?);
        }

        let mut edges = BTreeMap::new();
        for (i, e) in file.edges.iter().enumerate() {
            let p = format!("edges[{i}]");
            let a = node(format!("{p}.from"), &e.from)?;
            let b = node(format!("{p}.to"), &e.to)?;
            if a == b {
                return Err(invalid(p, "self-loop edges are not allowed"));
            }
            if e.length < 1 {
                return Err(invalid(format!("{p}.length"), "edge length must be >= 1"));
            }
            if e.capacity < 1 {
                return Err(invalid(format!("{p}.capacity"), "edge capacity must be >= 1"));
            }
            let attr = EdgeAttr {
                length: e.length,
                capacity: e.capacity,
            };
            if edges.insert((a, b), attr).is_some() {
                return Err(invalid(p, "duplicate edge"));
            }
        }
        let graph = Graph::new(file.nodes.clone(), hubs, edges);
        let longest_edge = graph.longest_edge();
        let horizon = file.deadline + longest_edge;

        let mut vehicles: Vec<Vehicle> = Vec::with_capacity(file.vehicles.len());
        let mut veh_ix: HashMap<&str, usize> = HashMap::new();
        for (i, v) in file.vehicles.iter().enumerate() {
            let p = format!("vehicles[{i}]");
            if veh_ix.insert(v.id.as_str(), i).is_some() {
                return Err(invalid(p, format!("duplicate vehicle `{}`", v.id)));
            }
            let start = node(format!("{p}.start"), &v.start)?;
            if let Some(other) = vehicles.iter().find(|o| o.start == start) {
                if !graph.is_hub(start) {
                    return Err(invalid(
                        format!("{p}.start"),
                        format!(
                            "vehicles `{}` and `{}` share start node `{}` which is not a hub",
                            other.id, v.id, v.start
                        ),
                    ));
                }
            }
            vehicles.push(Vehicle {
                id: v.id.clone(),
                start,
            });
        }

        let mut jobs = Vec::with_capacity(file.jobs.len());
        let mut job_ids = BTreeSet::new();
        for (ji, j) in file.jobs.iter().enumerate() {
            let p = format!("jobs[{ji}]");
            if !job_ids.insert(j.id.as_str()) {
                return Err(invalid(p, format!("duplicate job `{}`", j.id)));
            }
            if j.tasks.is_empty() {
                return Err(invalid(format!("{p}.tasks"), "job has no tasks"));
            }
            if j.eligible.is_empty() {
                return Err(invalid(format!("{p}.eligible"), "no eligible vehicle"));
            }
            let mut eligible = BTreeSet::new();
            for (k, v) in j.eligible.iter().enumerate() {
                let ix = veh_ix
                    .get(v.as_str())
                    .copied()
                    .ok_or_else(|| ModelError::UnknownVehicle {
                        path: format!("{p}.eligible[{k}]"),
                        vehicle: v.clone(),
                    })?;
                eligible.insert(ix);
            }
            let mut task_ix: HashMap<&str, usize> = HashMap::new();
            for (k, t) in j.tasks.iter().enumerate() {
                if task_ix.insert(t.id.as_str(), k).is_some() {
                    return Err(invalid(
                        format!("{p}.tasks[{k}]"),
                        format!("duplicate task `{}`", t.id),
                    ));
                }
            }
            let mut tasks = Vec::with_capacity(j.tasks.len());
            for (k, t) in j.tasks.iter().enumerate() {
                let tp = format!("{p}.tasks[{k}]");
                let location = node(format!("{tp}.location"), &t.location)?;
                let [lo, hi] = t.tw;
                if lo > hi || hi > horizon {
                    return Err(invalid(
                        format!("{tp}.tw"),
                        format!("time window [{lo},{hi}] must satisfy 0 <= lo <= hi <= {horizon}"),
                    ));
                }
                let mut predecessors = Vec::new();
                for (q, pred) in t.predecessors.iter().enumerate() {
                    let ix = task_ix.get(pred.as_str()).copied().ok_or_else(|| {
                        ModelError::UnknownTask {
                            path: format!("{tp}.predecessors[{q}]"),
                            task: pred.clone(),
                        }
                    })?;
                    if !predecessors.contains(&ix) {
                        predecessors.push(ix);
                    }
                }
                tasks.push(Task {
                    id: t.id.clone(),
                    location,
                    predecessors,
                    tw_lower: lo,
                    tw_upper: hi,
                });
            }
            let delivery = find_delivery(&tasks).map_err(|reason| invalid(format!("{p}.tasks"), reason))?;
            jobs.push(Job {
                id: j.id.clone(),
                tasks,
                eligible,
                delivery,
            });
        }

        let b = &file.battery;
        let mut stations = BTreeSet::new();
        for (i, s) in b.stations.iter().enumerate() {
            stations.insert(node(format!("battery.stations[{i}]"), s)?);
        }

        Ok(Self {
            graph,
            vehicles,
            jobs,
            battery: BatteryParams {
                operating_range: b.operating_range,
                charge_coeff: b.charge,
                discharge_coeff: b.discharge,
                stations,
            },
            deadline: file.deadline,
            longest_edge,
            horizon,
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        let g = &self.graph;
        let name = |n: NodeId| g.name(n).to_string();
        InstanceFile {
            nodes: g.names().to_vec(),
            hubs: g.hubs().iter().map(|&h| name(h)).collect(),
            edges: g
                .edges()
                .iter()
                .map(|(&(a, b), e)| EdgeRecord {
                    from: name(a),
                    to: name(b),
                    length: e.length,
                    capacity: e.capacity,
                })
                .collect(),
            vehicles: self
                .vehicles
                .iter()
                .map(|v| VehicleRecord {
                    id: v.id.clone(),
                    start: name(v.start),
                })
                .collect(),
            jobs: self
                .jobs
                .iter()
                .map(|j| JobRecord {
                    id: j.id.clone(),
                    eligible: j.eligible.iter().map(|&v| self.vehicles[v].id.clone()).collect(),
                    tasks: j
                        .tasks
                        .iter()
                        .map(|t| TaskRecord {
                            id: t.id.clone(),
                            location: name(t.location),
                            predecessors: t.predecessors.iter().map(|&p| j.tasks[p].id.clone()).collect(),
                            tw: [t.tw_lower, t.tw_upper],
                        })
                        .collect(),
                })
                .collect(),
            battery: BatteryRecord {
                operating_range: self.battery.operating_range,
                charge: self.battery.charge_coeff,
                discharge: self.battery.discharge_coeff,
                stations: self.battery.stations.iter().map(|&s| name(s)).collect(),
            },
            deadline: self.deadline,
        }
    }
}

/// Locates the delivery task and checks that the precedence relation is
/// acyclic.
fn find_delivery(tasks: &[Task]) -> Result<usize, String> {
    let n = tasks.len();
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    fn visit(k: usize, tasks: &[Task], state: &mut [u8], order: &mut Vec<usize>) -> Result<(), String> {
        match state[k] {
            1 => return Err(format!("precedence cycle through task `{}`", tasks[k].id)),
            2 => return Ok(()),
            _ => {}
        }
        state[k] = 1;
        for &p in &tasks[k].predecessors {
            visit(p, tasks, state, order)?;
        }
        state[k] = 2;
        order.push(k);
        Ok(())
    }
    for k in 0..n {
        visit(k, tasks, &mut state, &mut order)?;
    }
    // every task that must precede k, transitively
    let mut ancestors = vec![BTreeSet::new(); n];
    for &k in &order {
        let mut acc = BTreeSet::new();
        for &p in &tasks[k].predecessors {
            acc.insert(p);
            acc.extend(ancestors[p].iter().copied());
        }
        ancestors[k] = acc;
    }
    let sinks: Vec<usize> = (0..n).filter(|&k| ancestors[k].len() == n - 1).collect();
    match sinks.as_slice() {
        [d] => Ok(*d),
        [] => Err("no task succeeds all other tasks of the job (missing delivery)".into()),
        _ => Err("more than one task qualifies as delivery".into()),
    }
}

/// On-disk instance document. Horizon and adjacency are derived on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub hubs: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    pub vehicles: Vec<VehicleRecord>,
    #[serde(default)]
    pub jobs: Vec<JobRecord>,
    pub battery: BatteryRecord,
    pub deadline: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub from: String,
    pub to: String,
    pub length: u32,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleRecord {
    pub id: String,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRecord {
    pub id: String,
    pub eligible: Vec<String>,
    pub tasks: Vec<TaskRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRecord {
    pub id: String,
    pub location: String,
    #[serde(default)]
    pub predecessors: Vec<String>,
    pub tw: [u32; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryRecord {
    pub operating_range: u32,
    pub charge: u32,
    pub discharge: u32,
    #[serde(default)]
    pub stations: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node(jobs: &str, vehicles: &str, hubs: &str) -> String {
        format!(
            r#"{{
              "nodes": ["A", "B"],
              "hubs": {hubs},
              "edges": [{{"from":"A","to":"B","length":1,"capacity":1}},
                        {{"from":"B","to":"A","length":1,"capacity":1}}],
              "vehicles": {vehicles},
              "jobs": {jobs},
              "battery": {{"operating_range": 4, "charge": 1, "discharge": 1, "stations": []}},
              "deadline": 4
            }}"#
        )
    }

    #[test]
    fn zero_jobs_one_vehicle_is_valid() {
        let inst = Instance::from_json(&two_node("[]", r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap();
        assert_eq!(inst.jobs.len(), 0);
        assert_eq!(inst.vehicles.len(), 1);
        assert_eq!(inst.horizon() - inst.deadline, inst.longest_edge());
        assert_eq!(inst.horizon(), 5);
    }

    #[test]
    fn task_with_unknown_node_fails() {
        let jobs = r#"[{"id":"j","eligible":["v"],"tasks":[{"id":"d","location":"Z","tw":[0,4]}]}]"#;
        let err = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap_err();
        assert!(err.to_string().contains("unknown node"), "{err}");
        assert!(err.to_string().contains("jobs[0].tasks[0].location"), "{err}");
    }

    #[test]
    fn shared_start_requires_hub() {
        let vehicles = r#"[{"id":"v1","start":"A"},{"id":"v2","start":"A"}]"#;
        let err = Instance::from_json(&two_node("[]", vehicles, "[]")).unwrap_err();
        assert!(err.to_string().contains("not a hub"), "{err}");
        assert!(Instance::from_json(&two_node("[]", vehicles, r#"["A"]"#)).is_ok());
    }

    #[test]
    fn unknown_eligible_vehicle() {
        let jobs = r#"[{"id":"j","eligible":["w"],"tasks":[{"id":"d","location":"A","tw":[0,4]}]}]"#;
        let err = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap_err();
        assert!(matches!(err, ModelError::UnknownVehicle { .. }));
    }

    #[test]
    fn window_beyond_horizon_rejected() {
        let jobs = r#"[{"id":"j","eligible":["v"],"tasks":[{"id":"d","location":"A","tw":[0,6]}]}]"#;
        let err = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap_err();
        assert!(err.to_string().contains("tw"), "{err}");
    }

    #[test]
    fn two_sinks_rejected_and_cycle_rejected() {
        let jobs = r#"[{"id":"j","eligible":["v"],"tasks":[
            {"id":"p","location":"A","tw":[0,4]},
            {"id":"d","location":"B","tw":[0,4]}]}]"#;
        let err = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap_err();
        assert!(err.to_string().contains("delivery"), "{err}");

        let jobs = r#"[{"id":"j","eligible":["v"],"tasks":[
            {"id":"p","location":"A","predecessors":["d"],"tw":[0,4]},
            {"id":"d","location":"B","predecessors":["p"],"tw":[0,4]}]}]"#;
        let err = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap_err();
        assert!(err.to_string().contains("cycle"), "{err}");
    }

    #[test]
    fn delivery_is_transitive_sink() {
        let jobs = r#"[{"id":"j","eligible":["v"],"tasks":[
            {"id":"d","location":"A","predecessors":["p2"],"tw":[0,4]},
            {"id":"p1","location":"A","tw":[0,4]},
            {"id":"p2","location":"B","predecessors":["p1"],"tw":[0,4]}]}]"#;
        let inst = Instance::from_json(&two_node(jobs, r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap();
        assert_eq!(inst.jobs[0].delivery, 0);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let inst = Instance::from_json(&two_node("[]", r#"[{"id":"v","start":"A"}]"#, "[]")).unwrap();
        let err = inst.save("/nonexistent-dir/x/y.json").unwrap_err();
        assert!(matches!(err, ModelError::Io { .. }));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(Instance::from_json("{ nodes: "), Err(ModelError::Parse(_))));
    }
}
