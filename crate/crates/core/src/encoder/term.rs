//! Quantifier-free Boolean / linear integer terms and their SMT-LIB2 text.

use std::fmt::{self, Write};

use super::cardinality::SeqCounter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Bool => "Bool",
            Sort::Int => "Int",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Bool(bool),
    Int(i64),
    Var(VarId),
    /// Reference to a nullary `define-fun`.
    Def(DefId),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Box<Term>, Box<Term>),
    Eq(Box<Term>, Box<Term>),
    Le(Box<Term>, Box<Term>),
    Ge(Box<Term>, Box<Term>),
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
}

impl From<VarId> for Term {
    fn from(v: VarId) -> Self {
        Term::Var(v)
    }
}

impl From<DefId> for Term {
    fn from(d: DefId) -> Self {
        Term::Def(d)
    }
}

pub fn not(t: impl Into<Term>) -> Term {
    Term::Not(Box::new(t.into()))
}

pub fn and(ts: Vec<Term>) -> Term {
    Term::And(ts)
}

pub fn or(ts: Vec<Term>) -> Term {
    Term::Or(ts)
}

pub fn implies(a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Implies(Box::new(a.into()), Box::new(b.into()))
}

pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Eq(Box::new(a.into()), Box::new(b.into()))
}

pub fn le(a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Le(Box::new(a.into()), Box::new(b.into()))
}

pub fn ge(a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Ge(Box::new(a.into()), Box::new(b.into()))
}

pub fn add(ts: Vec<Term>) -> Term {
    Term::Add(ts)
}

pub fn sub(a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Sub(Box::new(a.into()), Box::new(b.into()))
}

pub fn ite(c: impl Into<Term>, a: impl Into<Term>, b: impl Into<Term>) -> Term {
    Term::Ite(Box::new(c.into()), Box::new(a.into()), Box::new(b.into()))
}

/// Resolves variable and definition names while printing.
pub trait Names {
    fn var_name(&self, v: VarId) -> &str;
    fn def_name(&self, d: DefId) -> &str;
}

/// Values for evaluation: Booleans are 0/1.
pub trait Valuation {
    fn value(&self, v: VarId) -> i64;
    fn def_body(&self, d: DefId) -> &Term;
}

impl Term {
    pub fn write_smt(&self, names: &dyn Names, out: &mut String) {
        match self {
            Term::Bool(true) => out.push_str("true"),
            Term::Bool(false) => out.push_str("false"),
            Term::Int(i) if *i < 0 => {
                let _ = write!(out, "(- {})", i.unsigned_abs());
            }
            Term::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Term::Var(v) => out.push_str(names.var_name(*v)),
            Term::Def(d) => out.push_str(names.def_name(*d)),
            Term::Not(a) => nary(out, "not", std::slice::from_ref(a.as_ref()), names),
            Term::And(ts) if ts.is_empty() => out.push_str("true"),
            Term::And(ts) if ts.len() == 1 => ts[0].write_smt(names, out),
            Term::And(ts) => nary(out, "and", ts, names),
            Term::Or(ts) if ts.is_empty() => out.push_str("false"),
            Term::Or(ts) if ts.len() == 1 => ts[0].write_smt(names, out),
            Term::Or(ts) => nary(out, "or", ts, names),
            Term::Implies(a, b) => binary(out, "=>", a, b, names),
            Term::Eq(a, b) => binary(out, "=", a, b, names),
            Term::Le(a, b) => binary(out, "<=", a, b, names),
            Term::Ge(a, b) => binary(out, ">=", a, b, names),
            Term::Add(ts) if ts.is_empty() => out.push('0'),
            Term::Add(ts) if ts.len() == 1 => ts[0].write_smt(names, out),
            Term::Add(ts) => nary(out, "+", ts, names),
            Term::Sub(a, b) => binary(out, "-", a, b, names),
            Term::Ite(c, a, b) => {
                out.push_str("(ite ");
                c.write_smt(names, out);
                out.push(' ');
                a.write_smt(names, out);
                out.push(' ');
                b.write_smt(names, out);
                out.push(')');
            }
        }
    }

    pub fn to_smt(&self, names: &dyn Names) -> String {
        let mut s = String::new();
        self.write_smt(names, &mut s);
        s
    }

    pub fn eval(&self, vals: &dyn Valuation) -> i64 {
        let b = |x: bool| i64::from(x);
        match self {
            Term::Bool(x) => b(*x),
            Term::Int(i) => *i,
            Term::Var(v) => vals.value(*v),
            Term::Def(d) => vals.def_body(*d).eval(vals),
            Term::Not(a) => b(a.eval(vals) == 0),
            Term::And(ts) => b(ts.iter().all(|t| t.eval(vals) != 0)),
            Term::Or(ts) => b(ts.iter().any(|t| t.eval(vals) != 0)),
            Term::Implies(p, q) => b(p.eval(vals) == 0 || q.eval(vals) != 0),
            Term::Eq(p, q) => b(p.eval(vals) == q.eval(vals)),
            Term::Le(p, q) => b(p.eval(vals) <= q.eval(vals)),
            Term::Ge(p, q) => b(p.eval(vals) >= q.eval(vals)),
            Term::Add(ts) => ts.iter().map(|t| t.eval(vals)).sum(),
            Term::Sub(p, q) => p.eval(vals) - q.eval(vals),
            Term::Ite(c, p, q) => {
                if c.eval(vals) != 0 {
                    p.eval(vals)
                } else {
                    q.eval(vals)
                }
            }
        }
    }

    /// Collects every variable mentioned (definitions are not expanded).
    pub fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::Bool(_) | Term::Int(_) | Term::Def(_) => {}
            Term::Not(a) => a.vars(out),
            Term::And(ts) | Term::Or(ts) | Term::Add(ts) => ts.iter().for_each(|t| t.vars(out)),
            Term::Implies(a, b) | Term::Eq(a, b) | Term::Le(a, b) | Term::Ge(a, b) | Term::Sub(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Ite(c, a, b) => {
                c.vars(out);
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

fn nary(out: &mut String, op: &str, ts: &[Term], names: &dyn Names) {
    out.push('(');
    out.push_str(op);
    for t in ts {
        out.push(' ');
        t.write_smt(names, out);
    }
    out.push(')');
}

fn binary(out: &mut String, op: &str, a: &Term, b: &Term, names: &dyn Names) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    a.write_smt(names, out);
    out.push(' ');
    b.write_smt(names, out);
    out.push(')');
}

/// Declared variables and nullary definitions of an encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    sorts: Vec<Sort>,
    defs: Vec<Definition>,
    counters: Vec<SeqCounter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub sort: Sort,
    pub body: Term,
}

impl VarTable {
    pub fn declare(&mut self, name: String, sort: Sort) -> VarId {
        let id = VarId(self.names.len() as u32);
        self.names.push(name);
        self.sorts.push(sort);
        id
    }

    pub fn fresh_aux(&mut self) -> VarId {
        let name = format!("aux_{}", self.names.len());
        self.declare(name, Sort::Bool)
    }

    pub fn define(&mut self, name: String, sort: Sort, body: Term) -> DefId {
        let id = DefId(self.defs.len() as u32);
        self.defs.push(Definition { name, sort, body });
        id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn register_counter(&mut self, c: SeqCounter) {
        self.counters.push(c);
    }

    /// Sequential counters created through this table, in creation order.
    pub fn counters(&self) -> &[SeqCounter] {
        &self.counters
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn sort(&self, v: VarId) -> Sort {
        self.sorts[v.0 as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &str, Sort)> + '_ {
        self.names
            .iter()
            .zip(&self.sorts)
            .enumerate()
            .map(|(i, (n, s))| (VarId(i as u32), n.as_str(), *s))
    }

    pub fn defs(&self) -> &[Definition] {
        &self.defs
    }

    pub fn def(&self, d: DefId) -> &Definition {
        &self.defs[d.0 as usize]
    }
}

impl Names for VarTable {
    fn var_name(&self, v: VarId) -> &str {
        &self.names[v.0 as usize]
    }

    fn def_name(&self, d: DefId) -> &str {
        &self.defs[d.0 as usize].name
    }
}
