use crate::model::{Instance, NodeId};

use super::term::{Sort, VarId, VarTable};

/// Maps the decision variables (assignment, service, position, movement,
/// remaining charge) to solver variables.
///
/// Variables are declared in a fixed order, `x`, `y`, `z`, `at`, `mv`, `rc`,
/// each block iterated in index order; names are a pure function of the
/// indices, so identical instances give identical declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    vehicles: usize,
    nodes: usize,
    steps: usize,
    task_offset: Vec<usize>,
    tasks_total: usize,
    x0: usize,
    y0: usize,
    z0: usize,
    at0: usize,
    mv0: usize,
    rc0: usize,
    end: usize,
}

impl VariableLayout {
    /// Declares every layout variable in `table`. The table must be empty.
    pub fn declare(instance: &Instance, table: &mut VarTable) -> Self {
        assert!(table.is_empty(), "layout variables must come first");
        let vehicles = instance.vehicles.len();
        let jobs = instance.jobs.len();
        let nodes = instance.graph.node_count();
        let steps = instance.horizon() as usize + 1;
        let mut task_offset = Vec::with_capacity(jobs);
        let mut tasks_total = 0;
        for j in &instance.jobs {
            task_offset.push(tasks_total);
            tasks_total += j.tasks.len();
        }
        let x0 = 0;
        let y0 = x0 + vehicles * jobs;
        let z0 = y0 + vehicles * tasks_total;
        let at0 = z0 + vehicles * tasks_total * steps;
        let mv0 = at0 + vehicles * nodes * steps;
        let rc0 = mv0 + vehicles * nodes * steps;
        let end = rc0 + vehicles * steps;
        let layout = Self {
            vehicles,
            nodes,
            steps,
            task_offset,
            tasks_total,
            x0,
            y0,
            z0,
            at0,
            mv0,
            rc0,
            end,
        };

        for i in 0..vehicles {
            for j in 0..jobs {
                table.declare(format!("x_{i}_{j}"), Sort::Bool);
            }
        }
        for i in 0..vehicles {
            for (j, job) in instance.jobs.iter().enumerate() {
                for k in 0..job.tasks.len() {
                    table.declare(format!("y_{i}_{j}_{k}"), Sort::Bool);
                }
            }
        }
        for i in 0..vehicles {
            for (j, job) in instance.jobs.iter().enumerate() {
                for k in 0..job.tasks.len() {
                    for t in 0..steps {
                        table.declare(format!("z_{i}_{j}_{k}_{t}"), Sort::Bool);
                    }
                }
            }
        }
        for prefix in ["at", "mv"] {
            for i in 0..vehicles {
                for n in 0..nodes {
                    for t in 0..steps {
                        table.declare(format!("{prefix}_{i}_{n}_{t}"), Sort::Bool);
                    }
                }
            }
        }
        for i in 0..vehicles {
            for t in 0..steps {
                table.declare(format!("rc_{i}_{t}"), Sort::Int);
            }
        }
        debug_assert_eq!(table.len(), end);
        layout
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    pub fn horizon(&self) -> u32 {
        (self.steps - 1) as u32
    }

    /// Number of variables owned by the layout (auxiliaries come after).
    pub fn len(&self) -> usize {
        self.end
    }

    pub fn is_empty(&self) -> bool {
        self.end == 0
    }

    fn flat_task(&self, j: usize, k: usize) -> usize {
        self.task_offset[j] + k
    }

    pub fn x(&self, i: usize, j: usize) -> VarId {
        VarId((self.x0 + i * self.task_offset.len() + j) as u32)
    }

    pub fn y(&self, i: usize, j: usize, k: usize) -> VarId {
        VarId((self.y0 + i * self.tasks_total + self.flat_task(j, k)) as u32)
    }

    pub fn z(&self, i: usize, j: usize, k: usize, t: u32) -> VarId {
        let base = self.z0 + (i * self.tasks_total + self.flat_task(j, k)) * self.steps;
        VarId((base + t as usize) as u32)
    }

    pub fn at(&self, i: usize, n: NodeId, t: u32) -> VarId {
        VarId((self.at0 + (i * self.nodes + n.0) * self.steps + t as usize) as u32)
    }

    pub fn mv(&self, i: usize, n: NodeId, t: u32) -> VarId {
        VarId((self.mv0 + (i * self.nodes + n.0) * self.steps + t as usize) as u32)
    }

    pub fn rc(&self, i: usize, t: u32) -> VarId {
        VarId((self.rc0 + i * self.steps + t as usize) as u32)
    }
}
