//! Tolerant reader for solver responses: status lines, `get-value` answers,
//! `(model ...)` blocks, unsat cores and `(error ...)` diagnostics in any
//! order.

use super::{SmtError, SolverModel, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(l) => Some(l),
            SExpr::Atom(_) => None,
        }
    }
}

pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, String> {
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().filter(|_| !stack.is_empty()).ok_or("unbalanced `)`")?;
                stack.last_mut().expect("outer level").push(SExpr::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                stack.last_mut().expect("level").push(SExpr::Atom(s));
            }
            '|' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('|') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated quoted symbol".into()),
                    }
                }
                stack.last_mut().expect("level").push(SExpr::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || matches!(n, '(' | ')' | ';' | '"' | '|') {
                        break;
                    }
                    s.push(n);
                    chars.next();
                }
                stack.last_mut().expect("level").push(SExpr::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().expect("top level"))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverOutput {
    pub status: Option<Status>,
    pub model: SolverModel,
    pub core: Vec<String>,
    pub errors: Vec<String>,
}

enum Value {
    Bool(bool),
    Int(i64),
}

fn value(e: &SExpr) -> Option<Value> {
    match e {
        SExpr::Atom(a) => match a.as_str() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => a.parse().ok().map(Value::Int),
        },
        SExpr::List(l) => match l.as_slice() {
            [op, x] if op.atom() == Some("-") => match value(x)? {
                Value::Int(i) => Some(Value::Int(-i)),
                Value::Bool(_) => None,
            },
            _ => None,
        },
    }
}

fn bind(model: &mut SolverModel, name: &str, v: Value) {
    match v {
        Value::Bool(b) => {
            model.bools.insert(name.to_string(), b);
        }
        Value::Int(i) => {
            model.ints.insert(name.to_string(), i);
        }
    }
}

/// `(define-fun name () Sort value)`; definitions with parameters or
/// non-literal bodies are skipped.
fn define_fun(model: &mut SolverModel, items: &[SExpr]) -> bool {
    match items {
        [kw, name, params, _sort, body] if kw.atom() == Some("define-fun") => {
            if let (Some(name), Some([])) = (name.atom(), params.list()) {
                if let Some(v) = value(body) {
                    bind(model, name, v);
                }
            }
            true
        }
        _ => false,
    }
}

pub fn parse_output(text: &str) -> Result<SolverOutput, SmtError> {
    let exprs = parse_sexprs(text).map_err(|e| SmtError::Malformed(format!("{e}: {text}")))?;
    let mut out = SolverOutput::default();
    for e in &exprs {
        match e {
            SExpr::Atom(a) => match a.as_str() {
                "sat" if out.status.is_none() => out.status = Some(Status::Sat),
                "unsat" if out.status.is_none() => out.status = Some(Status::Unsat),
                "unknown" | "timeout" if out.status.is_none() => out.status = Some(Status::Unknown),
                _ => {}
            },
            SExpr::List(items) => {
                if let [head, rest @ ..] = items.as_slice() {
                    match head.atom() {
                        Some("error") => {
                            out.errors.push(rest.iter().filter_map(SExpr::atom).collect::<Vec<_>>().join(" "));
                            continue;
                        }
                        Some("model") => {
                            for d in rest {
                                if let Some(l) = d.list() {
                                    define_fun(&mut out.model, l);
                                }
                            }
                            continue;
                        }
                        _ => {}
                    }
                }
                if items.iter().all(|x| x.atom().is_some()) {
                    out.core.extend(items.iter().filter_map(|x| x.atom().map(str::to_string)));
                    continue;
                }
                for item in items {
                    let Some(pair) = item.list() else { continue };
                    if define_fun(&mut out.model, pair) {
                        continue;
                    }
                    if let [name, v] = pair {
                        if let (Some(name), Some(v)) = (name.atom(), value(v)) {
                            bind(&mut out.model, name, v);
                        }
                    }
                }
            }
        }
    }
    if out.status.is_none() {
        return Err(SmtError::Malformed(text.trim().to_string()));
    }
    Ok(out)
}
