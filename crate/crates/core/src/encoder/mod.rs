//! Translation of an [`Instance`] into the constraint system over the
//! time-expanded assignment, position, movement and charge variables.
//!
//! Each emitted assertion carries a [`Family`] label naming the constraint
//! group it instantiates (job assignment 1-8, movement 9-18, conflict-free
//! routing 19-20, battery 21-24, objective 25) plus the two covering groups
//! `cover` and `channel`.

mod assignment;
mod battery;
pub mod cardinality;
mod capacity;
mod eval;
mod layout;
mod movement;
pub mod term;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::model::Instance;

pub use cardinality::{amn, amo, SeqCounter, PAIRWISE_MAX};
pub use eval::Assignment;
pub use layout::VariableLayout;
use term::{add, and, ite, not, DefId, Sort, Term, VarTable};

/// Constraint family label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Numbered constraint family, 1 to 25.
    Rule(u8),
    Cover,
    Channel,
}

impl Family {
    pub const OBJECTIVE: Family = Family::Rule(25);

    /// Every label, in report order.
    pub fn all() -> impl Iterator<Item = Family> {
        (1..=25).map(Family::Rule).chain([Family::Cover, Family::Channel])
    }

    /// Parses a `:named` assertion label such as `f17_42` or `fcover_0`.
    pub fn from_assertion_name(name: &str) -> Option<Family> {
        let rest = name.strip_prefix('f')?;
        let (fam, seq) = rest.rsplit_once('_')?;
        seq.parse::<usize>().ok()?;
        fam.parse().ok()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Rule(n) => f.pad(&n.to_string()),
            Family::Cover => f.pad("cover"),
            Family::Channel => f.pad("channel"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cover" => Ok(Family::Cover),
            "channel" => Ok(Family::Channel),
            _ => match s.parse::<u8>() {
                Ok(n @ 1..=25) => Ok(Family::Rule(n)),
                _ => Err(format!("unknown constraint family `{s}`")),
            },
        }
    }
}

impl serde::Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub family: Family,
    pub term: Term,
}

impl Assertion {
    fn new(family: Family, term: Term) -> Self {
        Self { family, term }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Emit the conflict-free routing families (19, 20). Disabling them is a
    /// debugging aid used by generator calibration.
    pub capacity: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self { capacity: true }
    }
}

/// The complete constraint system for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedModel {
    pub table: VarTable,
    pub layout: VariableLayout,
    pub assertions: Vec<Assertion>,
    /// Nullary integer definition holding the travelled-distance sum.
    pub objective: DefId,
    /// Number of `ite` terms in the objective.
    pub objective_terms: usize,
    pub stats: BTreeMap<Family, usize>,
}

impl EncodedModel {
    pub fn count(&self, family: Family) -> usize {
        self.stats.get(&family).copied().unwrap_or(0)
    }

    /// `(family, assertion)` pairs with their `:named` label, in order.
    pub fn named_assertions(&self) -> impl Iterator<Item = (String, &Assertion)> + '_ {
        let mut seq: HashMap<Family, usize> = HashMap::new();
        self.assertions.iter().map(move |a| {
            let n = seq.entry(a.family).or_default();
            let name = format!("f{}_{}", a.family, n);
            *n += 1;
            (name, a)
        })
    }
}

/// Stateful builder shared by the family encoders; caches the nullary
/// helper definitions (`idle`, `busy`) so each is emitted once.
pub struct Encoder<'a> {
    instance: &'a Instance,
    table: VarTable,
    layout: VariableLayout,
    idle: HashMap<(usize, u32), DefId>,
    busy: HashMap<(usize, usize, u32), Option<DefId>>,
}

impl<'a> Encoder<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let mut table = VarTable::default();
        let layout = VariableLayout::declare(instance, &mut table);
        Self {
            instance,
            table,
            layout,
            idle: HashMap::new(),
            busy: HashMap::new(),
        }
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn table(&self) -> &VarTable {
        &self.table
    }

    /// `idle_i_t`: vehicle `i` moves to no node at time `t`.
    fn idle(&mut self, i: usize, t: u32) -> Term {
        if let Some(&d) = self.idle.get(&(i, t)) {
            return d.into();
        }
        let body = and(
            self.instance
                .graph
                .nodes()
                .map(|n| not(self.layout.mv(i, n, t)))
                .collect(),
        );
        let d = self.table.define(format!("idle_{i}_{t}"), Sort::Bool, body);
        self.idle.insert((i, t), d);
        d.into()
    }

    /// `busy_i_j_t`: vehicle `i` serves some task of a job other than `j`
    /// at time `t`. `None` when there is no other job.
    fn busy(&mut self, i: usize, j: usize, t: u32) -> Option<Term> {
        if let Some(d) = self.busy.get(&(i, j, t)) {
            return d.map(Term::Def);
        }
        let mut lits = Vec::new();
        for (j2, job) in self.instance.jobs.iter().enumerate() {
            if j2 == j {
                continue;
            }
            for k in 0..job.tasks.len() {
                lits.push(Term::Var(self.layout.z(i, j2, k, t)));
            }
        }
        let d = (!lits.is_empty())
            .then(|| self.table.define(format!("busy_{i}_{j}_{t}"), Sort::Bool, term::or(lits)));
        self.busy.insert((i, j, t), d);
        d.map(Term::Def)
    }

    /// Travelled distance: one `ite` per vehicle, directed edge and time
    /// step `0..T-1`, summed per vehicle.
    pub fn encode_objective(&mut self) -> (DefId, usize) {
        let inst = self.instance;
        let horizon = inst.horizon();
        let mut per_vehicle = Vec::with_capacity(inst.vehicles.len());
        let mut terms = 0;
        for i in 0..inst.vehicles.len() {
            let mut items = Vec::new();
            for t in 0..horizon {
                for (&(n, m), e) in inst.graph.edges() {
                    items.push(ite(
                        and(vec![self.layout.at(i, n, t).into(), self.layout.mv(i, m, t).into()]),
                        Term::Int(i64::from(e.length)),
                        Term::Int(0),
                    ));
                }
            }
            terms += items.len();
            let d = self.table.define(format!("cost_{i}"), Sort::Int, add(items));
            per_vehicle.push(Term::Def(d));
        }
        let total = self.table.define("total_cost".into(), Sort::Int, add(per_vehicle));
        (total, terms)
    }

    pub fn finish(self, assertions: Vec<Assertion>, objective: DefId, objective_terms: usize) -> EncodedModel {
        let mut stats = BTreeMap::new();
        for a in &assertions {
            *stats.entry(a.family).or_insert(0) += 1;
        }
        EncodedModel {
            table: self.table,
            layout: self.layout,
            assertions,
            objective,
            objective_terms,
            stats,
        }
    }
}

pub fn encode(instance: &Instance) -> EncodedModel {
    encode_with(instance, EncodeOptions::default())
}

pub fn encode_with(instance: &Instance, options: EncodeOptions) -> EncodedModel {
    let mut enc = Encoder::new(instance);
    let mut assertions = enc.encode_assignment();
    assertions.extend(enc.encode_movement());
    if options.capacity {
        assertions.extend(enc.encode_capacity());
    }
    assertions.extend(enc.encode_battery());
    let (objective, terms) = enc.encode_objective();
    enc.finish(assertions, objective, terms)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::all() {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert_eq!(Family::from_assertion_name("f17_42"), Some(Family::Rule(17)));
        assert_eq!(Family::from_assertion_name("fcover_0"), Some(Family::Cover));
        assert_eq!(Family::from_assertion_name("f26_0"), None);
        assert_eq!(Family::from_assertion_name("aux_3"), None);
    }
}
