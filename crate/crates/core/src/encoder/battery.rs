use super::term::{add, and, eq, ge, implies, le, sub, Term};
use super::{Assertion, Encoder, Family};

impl Encoder<'_> {
    /// Battery families 21-24. The remaining charge starts at the operating
    /// range; a traversal of an edge of length `d` departing at `t` costs
    /// `D` at each of the steps `t+1..=t+d`.
    pub fn encode_battery(&mut self) -> Vec<Assertion> {
        let inst = self.instance;
        let g = &inst.graph;
        let b = &inst.battery;
        let horizon = inst.horizon();
        let nv = inst.vehicles.len();
        let range = i64::from(b.operating_range);
        let discharge = i64::from(b.discharge_coeff);
        let charge = i64::from(b.charge_coeff);
        let mut out = Vec::new();
        let push = |out: &mut Vec<Assertion>, f: u8, t: Term| out.push(Assertion::new(Family::Rule(f), t));

        for i in 0..nv {
            push(&mut out, 21, eq(self.layout.rc(i, 0), Term::Int(range)));
            for t in 0..=horizon {
                let rc = self.layout.rc(i, t);
                push(&mut out, 21, and(vec![ge(rc, Term::Int(0)), le(rc, Term::Int(range))]));
            }
        }
        let l = &self.layout;
        for i in 0..nv {
            for (&(n, m), e) in g.edges() {
                let d = e.length;
                if d > horizon {
                    continue;
                }
                for t in 0..=horizon - d {
                    let steps = (t + 1..=t + d)
                        .map(|t2| eq(l.rc(i, t2), sub(l.rc(i, t2 - 1), Term::Int(discharge))))
                        .collect();
                    push(
                        &mut out,
                        22,
                        implies(and(vec![l.at(i, n, t).into(), l.mv(i, m, t).into()]), and(steps)),
                    );
                }
            }
        }
        for i in 0..nv {
            for t in 0..horizon {
                let idle = self.idle(i, t);
                let l = &self.layout;
                for n in g.nodes() {
                    let premise = and(vec![l.at(i, n, t).into(), idle.clone()]);
                    if b.is_station(n) {
                        let next = eq(l.rc(i, t + 1), add(vec![l.rc(i, t).into(), Term::Int(charge)]));
                        push(&mut out, 24, implies(premise, next));
                    } else {
                        push(&mut out, 23, implies(premise, eq(l.rc(i, t + 1), l.rc(i, t))));
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

    #[test]
    fn discharge_window_covers_exactly_d_steps() {
        let inst = instance(json!({
            "nodes": ["A", "B"], "edges": line(&["A", "B"], 2, 1),
            "vehicles": [{"id": "v", "start": "A"}],
            "battery": {"operating_range": 15, "charge": 1, "discharge": 1, "stations": ["B"]}, "deadline": 4
        }));
        let mut enc = Encoder::new(&inst);
        let a = enc.encode_battery();
        let text = |f: u8| -> Vec<String> {
            a.iter()
                .filter(|x| x.family == Family::Rule(f))
                .map(|x| x.term.to_smt(enc.table()))
                .collect()
        };
        assert_eq!(text(21)[0], "(= rc_0_0 15)");
        assert_eq!(text(21)[1], "(and (>= rc_0_0 0) (<= rc_0_0 15))");
        assert_eq!(
            text(22)[0],
            "(=> (and at_0_0_0 mv_0_1_0) (and (= rc_0_1 (- rc_0_0 1)) (= rc_0_2 (- rc_0_1 1))))"
        );
        assert_eq!(text(23)[0], "(=> (and at_0_0_0 idle_0_0) (= rc_0_1 rc_0_0))");
        assert_eq!(text(24)[0], "(=> (and at_0_1_0 idle_0_0) (= rc_0_1 (+ rc_0_0 1)))");
        // horizon 6: one non-charger and one charger per t in 0..6
        assert_eq!(text(23).len(), 6);
        assert_eq!(text(24).len(), 6);
    }
}
