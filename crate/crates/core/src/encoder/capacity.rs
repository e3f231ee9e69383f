use itertools::Itertools;

use super::term::{and, not, Term};
use super::{Assertion, Encoder, Family};

impl Encoder<'_> {
    /// Conflict-free routing families 19 (simultaneous departures) and 20
    /// (opposing traffic while a traversal is in progress).
    ///
    /// Only minimal violating vehicle subsets are instantiated: size `g + 1`
    /// for 19, sizes `a` and `g - a + 1` for 20. Larger subsets are implied.
    pub fn encode_capacity(&mut self) -> Vec<Assertion> {
        let inst = self.instance;
        let l = &self.layout;
        let horizon = inst.horizon();
        let nv = inst.vehicles.len();
        let mut out = Vec::new();

        for (&(n, m), e) in inst.graph.edges() {
            let g = e.capacity as usize;
            if g >= nv {
                continue;
            }
            for t in 0..=horizon {
                for group in (0..nv).combinations(g + 1) {
                    let lits: Vec<Term> = group
                        .iter()
                        .flat_map(|&i| [l.at(i, n, t).into(), l.mv(i, m, t).into()])
                        .collect();
                    out.push(Assertion::new(Family::Rule(19), not(and(lits))));
                }
            }
        }

        for (&(n, m), e) in inst.graph.edges() {
            let g = e.capacity as usize;
            let d = e.length;
            if g >= nv || d > horizon {
                continue;
            }
            for t in 0..=horizon - d {
                for a in 1..=g {
                    for forward in (0..nv).combinations(a) {
                        let rest: Vec<usize> = (0..nv).filter(|i| !forward.contains(i)).collect();
                        for opposing in rest.iter().copied().combinations(g - a + 1) {
                            for t2 in t..=t + d {
                                let mut lits: Vec<Term> = Vec::new();
                                for &i in &forward {
                                    lits.push(l.at(i, n, t).into());
                                    lits.push(l.mv(i, m, t).into());
                                }
                                for &i in &opposing {
                                    lits.push(l.at(i, m, t).into());
                                }
                                for &i in &opposing {
                                    lits.push(l.mv(i, n, t2).into());
                                }
                                out.push(Assertion::new(Family::Rule(20), not(and(lits))));
                            }
                        }
                    }
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

    fn two_vehicles(length: u32, capacity: u32) -> crate::model::Instance {
        instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], length, capacity),
            "vehicles": [{"id": "v1", "start": "A"}, {"id": "v2", "start": "B"}],
            "battery": {"operating_range": 9, "charge": 1, "discharge": 1}, "deadline": 2
        }))
    }

    fn render(enc: &Encoder, asserts: &[Assertion], f: u8) -> Vec<String> {
        asserts
            .iter()
            .filter(|a| a.family == Family::Rule(f))
            .map(|a| a.term.to_smt(enc.table()))
            .collect()
    }

    #[test]
    fn capacity_covering_fleet_emits_nothing() {
        let inst = two_vehicles(1, 2);
        let mut enc = Encoder::new(&inst);
        assert!(enc.encode_capacity().is_empty());
    }

    #[test]
    fn single_departure_pair() {
        let inst = two_vehicles(1, 1);
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_capacity();
        let nineteen = render(&enc, &a, 19);
        // one subset per directed edge and time step, T = 3
        assert_eq!(nineteen.len(), 2 * 4);
        assert_eq!(nineteen[0], "(not (and at_0_0_0 mv_0_1_0 at_1_0_0 mv_1_1_0))");
    }

    #[test]
    fn opposing_traffic_window() {
        let inst = two_vehicles(2, 1);
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_capacity();
        let twenty = render(&enc, &a, 20);
        let expected: Vec<String> = (0..=2)
            .map(|t2| format!("(not (and at_0_0_0 mv_0_1_0 at_1_1_0 mv_1_0_{t2}))"))
            .collect();
        assert_eq!(twenty[..3], expected[..]);
        // symmetric split with vehicle 2 departing first
        assert_eq!(twenty[3], "(not (and at_1_0_0 mv_1_1_0 at_0_1_0 mv_0_0_0))");
        // T = 4, departures t = 0..=2, two splits, three t', two edges
        assert_eq!(twenty.len(), 3 * 2 * 3 * 2);
    }
}
