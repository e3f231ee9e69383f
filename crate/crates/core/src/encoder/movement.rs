use super::cardinality::amo;
use super::term::{and, implies, not, Term};
use super::{Assertion, Encoder, Family};

impl Encoder<'_> {
    /// Vehicle movement families 9-18.
    pub fn encode_movement(&mut self) -> Vec<Assertion> {
        let inst = self.instance;
        let g = &inst.graph;
        let horizon = inst.horizon();
        let nv = inst.vehicles.len();
        let mut out = Vec::new();
        let push = |out: &mut Vec<Assertion>, f: u8, t: Term| out.push(Assertion::new(Family::Rule(f), t));

        // (9), (10) depots at time zero and at the deadline
        for (i, v) in inst.vehicles.iter().enumerate() {
            push(&mut out, 9, self.layout.at(i, v.start, 0).into());
        }
        for (i, v) in inst.vehicles.iter().enumerate() {
            push(&mut out, 10, self.layout.at(i, v.start, inst.deadline).into());
        }
        // (11) at most one location per vehicle
        for i in 0..nv {
            for t in 0..=horizon {
                let vars: Vec<Term> = g.nodes().map(|n| self.layout.at(i, n, t).into()).collect();
                for c in amo(&vars, &mut self.table) {
                    push(&mut out, 11, c);
                }
            }
        }
        // (12) at most one vehicle on a non-hub node
        for n in g.nodes().filter(|&n| !g.is_hub(n)) {
            for t in 0..=horizon {
                let vars: Vec<Term> = (0..nv).map(|i| self.layout.at(i, n, t).into()).collect();
                for c in amo(&vars, &mut self.table) {
                    push(&mut out, 12, c);
                }
            }
        }
        // (13) at most one destination
        for i in 0..nv {
            for t in 0..=horizon {
                let vars: Vec<Term> = g.nodes().map(|n| self.layout.mv(i, n, t).into()).collect();
                for c in amo(&vars, &mut self.table) {
                    push(&mut out, 13, c);
                }
            }
        }
        let l = &self.layout;
        // (14) no move to the current node
        for i in 0..nv {
            for n in g.nodes() {
                for t in 0..=horizon {
                    push(&mut out, 14, implies(l.at(i, n, t), not(l.mv(i, n, t))));
                }
            }
        }
        // (15) no move to a non-successor
        for i in 0..nv {
            for n in g.nodes() {
                let succ = g.successors(n);
                for t in 0..=horizon {
                    let banned: Vec<Term> = g
                        .nodes()
                        .filter(|m| !succ.contains(m))
                        .map(|m| not(l.mv(i, m, t)))
                        .collect();
                    push(&mut out, 15, implies(l.at(i, n, t), and(banned)));
                }
            }
        }
        // (16) an idle vehicle stays put
        for i in 0..nv {
            for t in 0..horizon {
                let idle = self.idle(i, t);
                let l = &self.layout;
                for n in g.nodes() {
                    push(
                        &mut out,
                        16,
                        implies(and(vec![l.at(i, n, t).into(), idle.clone()]), l.at(i, n, t + 1)),
                    );
                }
            }
        }
        let l = &self.layout;
        // (17) edge traversal: nowhere while in transit, at the head after d steps
        for i in 0..nv {
            for (&(n, m), e) in g.edges() {
                let d = e.length;
                if d > horizon {
                    continue;
                }
                for t in 0..=horizon - d {
                    let mut then: Vec<Term> = Vec::new();
                    for t2 in t + 1..t + d {
                        for q in g.nodes() {
                            then.push(not(l.at(i, q, t2)));
                        }
                    }
                    then.push(l.at(i, m, t + d).into());
                    push(
                        &mut out,
                        17,
                        implies(and(vec![l.at(i, n, t).into(), l.mv(i, m, t).into()]), and(then)),
                    );
                }
            }
        }
        // (18) no task of another job between two tasks of the same job
        for i in 0..nv {
            for (j, job) in inst.jobs.iter().enumerate() {
                let kn = job.tasks.len();
                for k1 in 0..kn {
                    for k2 in (0..kn).filter(|&k2| k2 != k1) {
                        for t1 in 0..=horizon {
                            for t2 in t1..=horizon {
                                let mut forbidden = Vec::new();
                                for t3 in t1 + 1..=t2 {
                                    match self.busy(i, j, t3) {
                                        Some(b) => forbidden.push(not(b)),
                                        None => break,
                                    }
                                }
                                // t2 == t1, or no other job: nothing to forbid
                                if forbidden.is_empty() {
                                    continue;
                                }
                                let l = &self.layout;
                                push(
                                    &mut out,
                                    18,
                                    implies(
                                        and(vec![l.z(i, j, k1, t1).into(), l.z(i, j, k2, t2).into()]),
                                        and(forbidden),
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
