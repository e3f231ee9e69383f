//! At-most-one / at-most-n constraints over Boolean terms.
//!
//! AMO uses the pairwise encoding up to [`PAIRWISE_MAX`] inputs and a
//! sequential counter beyond; AMN always uses the sequential counter.

use super::term::{not, or, Term, VarId, VarTable};

pub const PAIRWISE_MAX: usize = 6;

/// Auxiliary registers of one sequential counter. `registers[i][j]` holds
/// "at least `j + 1` of `inputs[..=i]` are true" in every model that
/// satisfies the counter clauses with the intended assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqCounter {
    pub inputs: Vec<Term>,
    pub registers: Vec<Vec<VarId>>,
}

pub fn amo(vars: &[Term], table: &mut VarTable) -> Vec<Term> {
    if vars.len() <= PAIRWISE_MAX {
        pairwise(vars)
    } else {
        sequential_counter(vars, 1, table)
    }
}

pub fn amn(vars: &[Term], n: usize, table: &mut VarTable) -> Vec<Term> {
    sequential_counter(vars, n, table)
}

fn pairwise(vars: &[Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            out.push(or(vec![not(a.clone()), not(b.clone())]));
        }
    }
    out
}

fn sequential_counter(vars: &[Term], k: usize, table: &mut VarTable) -> Vec<Term> {
    let n = vars.len();
    if k >= n {
        return Vec::new();
    }
    if k == 0 {
        return vars.iter().map(|v| not(v.clone())).collect();
    }
    let s: Vec<Vec<VarId>> = (0..n - 1)
        .map(|_| (0..k).map(|_| table.fresh_aux()).collect())
        .collect();
    let x = |i: usize| vars[i].clone();
    let sv = |i: usize, j: usize| Term::Var(s[i][j]);
    let mut out = vec![or(vec![not(x(0)), sv(0, 0)])];
    for j in 1..k {
        out.push(not(sv(0, j)));
    }
    for i in 1..n - 1 {
        out.push(or(vec![not(x(i)), sv(i, 0)]));
        out.push(or(vec![not(sv(i - 1, 0)), sv(i, 0)]));
        for j in 1..k {
            out.push(or(vec![not(x(i)), not(sv(i - 1, j - 1)), sv(i, j)]));
            out.push(or(vec![not(sv(i - 1, j)), sv(i, j)]));
        }
        out.push(or(vec![not(x(i)), not(sv(i - 1, k - 1))]));
    }
    out.push(or(vec![not(x(n - 1)), not(sv(n - 2, k - 1))]));
    table.register_counter(SeqCounter {
        inputs: vars.to_vec(),
        registers: s,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::term::{DefId, Sort, Valuation};

    struct Vals<'a>(&'a [i64]);
    impl Valuation for Vals<'_> {
        fn value(&self, v: VarId) -> i64 {
            self.0[v.0 as usize]
        }
        fn def_body(&self, _: DefId) -> &Term {
            unreachable!()
        }
    }

    fn inputs(n: usize) -> (VarTable, Vec<Term>) {
        let mut t = VarTable::default();
        let v = (0..n).map(|i| Term::Var(t.declare(format!("x{i}"), Sort::Bool))).collect();
        (t, v)
    }

    /// True if some assignment of the auxiliaries (vars `n..total`) satisfies
    /// every clause, found by plain backtracking.
    fn exists_aux(clauses: &[Term], vals: &mut Vec<i64>, next: usize, total: usize) -> bool {
        let all_assigned_ok = |vals: &Vec<i64>, upto: usize| {
            clauses.iter().all(|c| {
                let mut vs = Vec::new();
                c.vars(&mut vs);
                vs.iter().any(|v| v.0 as usize >= upto) || c.eval(&Vals(vals)) != 0
            })
        };
        if !all_assigned_ok(vals, next) {
            return false;
        }
        if next == total {
            return true;
        }
        for b in [0, 1] {
            vals[next] = b;
            if exists_aux(clauses, vals, next + 1, total) {
                return true;
            }
        }
        false
    }

    fn check_projection(n: usize, bound: usize, use_amo: bool) {
        let (mut table, vars) = inputs(n);
        let clauses = if use_amo {
            amo(&vars, &mut table)
        } else {
            amn(&vars, bound, &mut table)
        };
        let total = table.len();
        for mask in 0u32..(1 << n) {
            let mut vals = vec![0i64; total];
            for (i, v) in vals.iter_mut().enumerate().take(n) {
                *v = i64::from((mask >> i) & 1);
            }
            let expected = mask.count_ones() as usize <= bound;
            let got = exists_aux(&clauses, &mut vals, n, total);
            assert_eq!(got, expected, "n={n} bound={bound} amo={use_amo} mask={mask:b}");
        }
    }

    #[test]
    fn empty_and_singleton_amo_are_empty() {
        let (mut t, v) = inputs(1);
        assert!(amo(&[], &mut t).is_empty());
        assert!(amo(&v, &mut t).is_empty());
    }

    #[test]
    fn pairwise_three() {
        let (mut t, v) = inputs(3);
        let cl = amo(&v, &mut t);
        let text: Vec<String> = cl.iter().map(|c| c.to_smt(&t)).collect();
        assert_eq!(
            text,
            [
                "(or (not x0) (not x1))",
                "(or (not x0) (not x2))",
                "(or (not x1) (not x2))"
            ]
        );
        check_projection(3, 1, true);
    }

    #[test]
    fn amn_trivial_when_bound_covers_inputs() {
        let (mut t, v) = inputs(4);
        assert!(amn(&v, 4, &mut t).is_empty());
        assert!(amn(&v, 7, &mut t).is_empty());
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn amn_four_choose_two() {
        // 1 + 4 + 6 assignments with at most two true
        let (mut table, vars) = inputs(4);
        let clauses = amn(&vars, 2, &mut table);
        let total = table.len();
        let mut count = 0;
        for mask in 0u32..16 {
            let mut vals = vec![0i64; total];
            for (i, v) in vals.iter_mut().enumerate().take(4) {
                *v = i64::from((mask >> i) & 1);
            }
            if exists_aux(&clauses, &mut vals, 4, total) {
                count += 1;
            }
        }
        assert_eq!(count, 11);
    }

    #[test]
    fn amn_one_matches_amo() {
        for n in 0..=5 {
            check_projection(n, 1, false);
            check_projection(n, 1, true);
        }
    }

    #[test]
    fn counter_amo_above_threshold() {
        check_projection(PAIRWISE_MAX + 2, 1, true);
    }

    #[test]
    fn intended_registers_satisfy_clauses() {
        let (mut table, vars) = inputs(5);
        let clauses = amn(&vars, 2, &mut table);
        let counter = table.counters()[0].clone();
        for mask in 0u32..32 {
            if mask.count_ones() > 2 {
                continue;
            }
            let mut vals = vec![0i64; table.len()];
            for (i, v) in vals.iter_mut().enumerate().take(5) {
                *v = i64::from((mask >> i) & 1);
            }
            for (i, row) in counter.registers.iter().enumerate() {
                let seen = (0..=i).filter(|&q| (mask >> q) & 1 == 1).count();
                for (j, r) in row.iter().enumerate() {
                    vals[r.0 as usize] = i64::from(seen > j);
                }
            }
            assert!(clauses.iter().all(|c| c.eval(&Vals(&vals)) != 0), "mask {mask:b}");
        }
    }
}
