//! Instance data model: plant graph, vehicles, jobs, battery parameters and
//! the schedule representation shared by the decoder, validator and oracle.

mod graph;
mod instance;
mod schedule;

pub use graph::{EdgeAttr, Graph, NodeId};
pub use instance::{
    BatteryParams, BatteryRecord, EdgeRecord, Instance, InstanceFile, Job, JobRecord, ModelError, Task,
    TaskRecord, Vehicle, VehicleRecord,
};
pub use schedule::{MoveEvent, Schedule, ScheduleFile, ServiceEvent, VehicleTimeline};

/// Convenience wrapper over [`Instance::load`].
pub fn load_instance(path: impl AsRef<std::path::Path>) -> Result<Instance, ModelError> {
    Instance::load(path)
}

/// Convenience wrapper over [`Instance::save`].
pub fn save_instance(instance: &Instance, path: impl AsRef<std::path::Path>) -> Result<(), ModelError> {
    instance.save(path)
}

/// Shortest directed path length by edge length; `None` when unreachable.
pub fn shortest_path_length(graph: &Graph, a: NodeId, b: NodeId) -> Option<u32> {
    graph.shortest_path_length(a, b)
}
