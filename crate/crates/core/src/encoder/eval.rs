use std::collections::HashMap;

use crate::model::{Instance, Schedule};

use super::term::{DefId, Term, Valuation, VarId};
use super::{EncodedModel, Family};

/// A total assignment to the variables of an [`EncodedModel`], built from
/// values for the layout variables. Sequential-counter auxiliaries are
/// completed with their intended meaning, so any assignment that encodes a
/// feasible schedule satisfies every assertion.
pub struct Assignment<'m> {
    model: &'m EncodedModel,
    values: Vec<i64>,
}

impl Valuation for Assignment<'_> {
    fn value(&self, v: VarId) -> i64 {
        self.values[v.0 as usize]
    }

    fn def_body(&self, d: DefId) -> &Term {
        &self.model.table.def(d).body
    }
}

struct Partial<'a> {
    model: &'a EncodedModel,
    values: &'a [i64],
}

impl Valuation for Partial<'_> {
    fn value(&self, v: VarId) -> i64 {
        self.values[v.0 as usize]
    }

    fn def_body(&self, d: DefId) -> &Term {
        &self.model.table.def(d).body
    }
}

impl<'m> Assignment<'m> {
    /// `layout` supplies the value of each layout variable (Booleans as 0/1);
    /// missing values default to 0.
    pub fn complete(model: &'m EncodedModel, layout: impl Fn(VarId) -> Option<i64>) -> Self {
        let n = model.layout.len();
        let mut values: Vec<i64> = (0..model.table.len())
            .map(|i| if i < n { layout(VarId(i as u32)).unwrap_or(0) } else { 0 })
            .collect();
        for c in model.table.counters() {
            let mut count = 0usize;
            for (i, input) in c.inputs.iter().enumerate() {
                count += usize::from(input.eval(&Partial { model, values: &values }) != 0);
                if let Some(regs) = c.registers.get(i) {
                    for (j, r) in regs.iter().enumerate() {
                        values[r.0 as usize] = i64::from(count > j);
                    }
                }
            }
        }
        Assignment { model, values }
    }

    /// Lifts a schedule onto the layout variables: positions, moves,
    /// services and charge levels as the schedule states them.
    pub fn from_schedule(model: &'m EncodedModel, instance: &Instance, schedule: &Schedule) -> Self {
        let l = &model.layout;
        let horizon = l.horizon();
        let mut vals: HashMap<VarId, i64> = HashMap::new();
        for (i, v) in schedule.vehicles.iter().enumerate().take(l.vehicles()) {
            for t in 0..=horizon {
                if let Some(n) = v.loc(t) {
                    vals.insert(l.at(i, n, t), 1);
                }
                if let Some(&c) = v.charge.get(t as usize) {
                    vals.insert(l.rc(i, t), c);
                }
            }
            for m in v.moves.iter().filter(|m| m.time <= horizon) {
                vals.insert(l.mv(i, m.to, m.time), 1);
            }
            for s in v.services.iter().filter(|s| s.time <= horizon) {
                if s.job < instance.jobs.len() && s.task < instance.jobs[s.job].tasks.len() {
                    vals.insert(l.x(i, s.job), 1);
                    vals.insert(l.y(i, s.job, s.task), 1);
                    vals.insert(l.z(i, s.job, s.task, s.time), 1);
                }
            }
        }
        Self::complete(model, |v| vals.get(&v).copied())
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn objective(&self) -> i64 {
        Term::Def(self.model.objective).eval(self)
    }

    /// Labels and families of the assertions this assignment violates.
    pub fn violated(&self) -> Vec<(String, Family)> {
        self.model
            .named_assertions()
            .filter(|(_, a)| a.term.eval(self) == 0)
            .map(|(name, a)| (name, a.family))
            .collect()
    }
}
