use super::term::{and, implies, not, or, Term};
use super::{Assertion, Encoder, Family};

impl Encoder<'_> {
    /// Job assignment families 1-8 plus job covering and task-to-job
    /// channeling.
    pub fn encode_assignment(&mut self) -> Vec<Assertion> {
        let inst = self.instance;
        let l = &self.layout;
        let horizon = inst.horizon();
        let nv = inst.vehicles.len();
        let mut out = Vec::new();
        let push = |out: &mut Vec<Assertion>, f: u8, t: Term| out.push(Assertion::new(Family::Rule(f), t));

        // (1) serving requires presence at the task location
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for (k, task) in job.tasks.iter().enumerate() {
                    for t in 0..=horizon {
                        push(&mut out, 1, implies(l.z(i, j, k, t), l.at(i, task.location, t)));
                    }
                }
            }
        }
        // (2) one vehicle per job
        for i in 0..nv {
            for j in 0..inst.jobs.len() {
                let others: Vec<Term> = (0..nv).filter(|&o| o != i).map(|o| not(l.x(o, j))).collect();
                if !others.is_empty() {
                    push(&mut out, 2, implies(l.x(i, j), and(others)));
                }
            }
        }
        // (3) one vehicle per task
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for k in 0..job.tasks.len() {
                    let others: Vec<Term> = (0..nv).filter(|&o| o != i).map(|o| not(l.y(o, j, k))).collect();
                    if !others.is_empty() {
                        push(&mut out, 3, implies(l.y(i, j, k), and(others)));
                    }
                }
            }
        }
        // (4) an assigned task is served at some time
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for k in 0..job.tasks.len() {
                    let any = (0..=horizon).map(|t| l.z(i, j, k, t).into()).collect();
                    push(&mut out, 4, implies(l.y(i, j, k), or(any)));
                }
            }
        }
        // (5) predecessors are not served at or after a successor
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for (k, task) in job.tasks.iter().enumerate() {
                    if task.predecessors.is_empty() {
                        continue;
                    }
                    for t in 0..=horizon {
                        let mut forbidden = Vec::new();
                        for &p in &task.predecessors {
                            for t2 in t..=horizon {
                                forbidden.push(not(l.z(i, j, p, t2)));
                            }
                        }
                        push(&mut out, 5, implies(l.z(i, j, k, t), and(forbidden)));
                    }
                }
            }
        }
        // (6) an assigned vehicle takes every task of the job
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                let all = (0..job.tasks.len()).map(|k| l.y(i, j, k).into()).collect();
                push(&mut out, 6, implies(l.x(i, j), and(all)));
            }
        }
        // (7) service inside the time window
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for (k, task) in job.tasks.iter().enumerate() {
                    let within = (task.tw_lower..=task.tw_upper).map(|t| l.z(i, j, k, t).into()).collect();
                    push(&mut out, 7, implies(l.y(i, j, k), or(within)));
                }
            }
        }
        // (8) eligibility
        for (j, job) in inst.jobs.iter().enumerate() {
            for i in 0..nv {
                if !job.eligible.contains(&i) {
                    push(&mut out, 8, not(l.x(i, j)));
                }
            }
        }
        // every job is taken by some eligible vehicle
        for (j, job) in inst.jobs.iter().enumerate() {
            let any = job.eligible.iter().map(|&i| l.x(i, j).into()).collect();
            out.push(Assertion::new(Family::Cover, or(any)));
        }
        // task assignment implies job assignment
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                for k in 0..job.tasks.len() {
                    out.push(Assertion::new(Family::Channel, implies(l.y(i, j, k), l.x(i, j))));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::super::testing::{instance, line};
    use super::*;

    fn render(enc: &Encoder, asserts: &[Assertion], f: Family) -> Vec<String> {
        asserts
            .iter()
            .filter(|a| a.family == f)
            .map(|a| a.term.to_smt(enc.table()))
            .collect()
    }

    #[test]
    fn no_jobs_no_assertions() {
        let inst = instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], 1, 1),
            "vehicles": [{"id": "v", "start": "A"}],
            "battery": {"operating_range": 3, "charge": 1, "discharge": 1}, "deadline": 4
        }));
        let mut enc = Encoder::new(&inst);
        assert!(enc.encode_assignment().is_empty());
    }

    #[test]
    fn single_window_disjunction() {
        // horizon = deadline 4 + longest edge 1 = 5
        let inst = instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], 1, 1),
            "vehicles": [{"id": "v", "start": "A"}],
            "jobs": [{"id": "j", "eligible": ["v"], "tasks": [{"id": "d", "location": "B", "tw": [2, 3]}]}],
            "battery": {"operating_range": 3, "charge": 1, "discharge": 1}, "deadline": 4
        }));
        assert_eq!(inst.horizon(), 5);
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_assignment();
        assert_eq!(render(&enc, &a, Family::Rule(7)), ["(=> y_0_0_0 (or z_0_0_0_2 z_0_0_0_3))"]);
        assert_eq!(render(&enc, &a, Family::Rule(1)).len(), 6);
        // single vehicle: (2) and (3) have nothing to exclude
        assert!(render(&enc, &a, Family::Rule(2)).is_empty());
        assert!(render(&enc, &a, Family::Rule(3)).is_empty());
        assert!(render(&enc, &a, Family::Rule(5)).is_empty());
        assert_eq!(render(&enc, &a, Family::Cover), ["x_0_0"]);
    }

    #[test]
    fn ineligible_vehicle_is_excluded() {
        let inst = instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], 1, 1),
            "vehicles": [{"id": "v1", "start": "A"}, {"id": "v2", "start": "B"}],
            "jobs": [{"id": "j", "eligible": ["v1"], "tasks": [{"id": "d", "location": "B", "tw": [0, 4]}]}],
            "battery": {"operating_range": 3, "charge": 1, "discharge": 1}, "deadline": 4
        }));
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_assignment();
        assert_eq!(render(&enc, &a, Family::Rule(8)), ["(not x_1_0)"]);
        assert_eq!(render(&enc, &a, Family::Rule(2)), ["(=> x_0_0 (not x_1_0))", "(=> x_1_0 (not x_0_0))"]);
    }

    #[test]
    fn precedence_excludes_later_predecessor_service() {
        let inst = instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], 1, 1),
            "vehicles": [{"id": "v", "start": "A"}],
            "jobs": [{"id": "j", "eligible": ["v"], "tasks": [
                {"id": "p", "location": "B", "tw": [0, 2]},
                {"id": "d", "location": "A", "predecessors": ["p"], "tw": [0, 2]}]}],
            "battery": {"operating_range": 3, "charge": 1, "discharge": 1}, "deadline": 1
        }));
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_assignment();
        let five = render(&enc, &a, Family::Rule(5));
        assert_eq!(five.len(), 3);
        assert_eq!(five[1], "(=> z_0_0_1_1 (and (not z_0_0_0_1) (not z_0_0_0_2)))");
        assert_eq!(render(&enc, &a, Family::Rule(6)), ["(=> x_0_0 (and y_0_0_0 y_0_0_1))"]);
    }
}
