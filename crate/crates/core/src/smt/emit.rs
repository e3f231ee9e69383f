use std::fmt::Write;

use crate::encoder::term::Names;
use crate::encoder::EncodedModel;

use super::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmitOptions {
    pub mode: Mode,
    pub unsat_cores: bool,
    pub seed: Option<u64>,
    /// Extra `total_cost <= bound` assertion, labelled as the objective family.
    pub bound: Option<u64>,
}

/// SMT-LIB2 document for `model` with default options for `mode`.
pub fn emit_smtlib(model: &EncodedModel, mode: Mode) -> String {
    emit_with(
        model,
        &EmitOptions {
            mode,
            ..EmitOptions::default()
        },
    )
}

pub(crate) fn emit_with(model: &EncodedModel, opts: &EmitOptions) -> String {
    let mut doc = prefix(model, opts);
    doc.push_str(&suffix(model, opts));
    doc
}

fn is_empty(model: &EncodedModel) -> bool {
    model.table.is_empty() && model.assertions.is_empty()
}

/// Options, declarations, definitions and named assertions.
pub(crate) fn prefix(model: &EncodedModel, opts: &EmitOptions) -> String {
    let mut out = String::new();
    if is_empty(model) {
        return out;
    }
    let table = &model.table;
    out.push_str("(set-option :produce-models true)\n");
    if opts.unsat_cores {
        out.push_str("(set-option :produce-unsat-cores true)\n");
    }
    if let Some(seed) = opts.seed {
        let _ = writeln!(out, "(set-option :random-seed {seed})");
    }
    for (_, name, sort) in table.iter() {
        let _ = writeln!(out, "(declare-fun {name} () {sort})");
    }
    for d in table.defs() {
        let _ = write!(out, "(define-fun {} () {} ", d.name, d.sort);
        d.body.write_smt(table, &mut out);
        out.push_str(")\n");
    }
    for (label, a) in model.named_assertions() {
        out.push_str("(assert (! ");
        a.term.write_smt(table, &mut out);
        let _ = writeln!(out, " :named {label}))");
    }
    out
}

/// Bound, optimization directive, check and value extraction.
pub(crate) fn suffix(model: &EncodedModel, opts: &EmitOptions) -> String {
    let mut out = String::new();
    if is_empty(model) {
        out.push_str("(check-sat)\n");
        return out;
    }
    let cost = model.table.def_name(model.objective);
    if let Some(b) = opts.bound {
        let seq = model.count(crate::encoder::Family::OBJECTIVE);
        let _ = writeln!(out, "(assert (! (<= {cost} {b}) :named f25_{seq}))");
    }
    if opts.mode == Mode::OptimizeNative {
        let _ = writeln!(out, "(minimize {cost})");
    }
    out.push_str("(check-sat)\n");
    let layout = model.layout.len();
    if layout > 0 {
        out.push_str("(get-value (");
        for (i, (_, name, _)) in model.table.iter().take(layout).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(name);
        }
        out.push_str("))\n");
    }
    if opts.unsat_cores {
        out.push_str("(get-unsat-core)\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;
    use crate::encoder::{encode, EncodedModel};
    use crate::model::Instance;

    fn parked() -> EncodedModel {
        let inst = Instance::from_json(
            &json!({
                "nodes": ["A", "B"],
                "edges": [{"from": "A", "to": "B", "length": 1, "capacity": 1},
                          {"from": "B", "to": "A", "length": 1, "capacity": 1}],
                "vehicles": [{"id": "v", "start": "A"}],
                "jobs": [],
                "battery": {"operating_range": 3, "charge": 1, "discharge": 1},
                "deadline": 2
            })
            .to_string(),
        )
        .unwrap();
        encode(&inst)
    }

    #[test]
    fn empty_model_is_only_a_check() {
        let inst = Instance::from_json(
            &json!({"nodes": ["A"], "edges": [], "vehicles": [], "jobs": [],
                    "battery": {"operating_range": 0, "charge": 0, "discharge": 0}, "deadline": 0})
            .to_string(),
        )
        .unwrap();
        let m = encode(&inst);
        assert!(m.assertions.is_empty() && m.table.is_empty());
        assert_eq!(emit_smtlib(&m, Mode::Satisfy), "(check-sat)\n");
    }

    #[test]
    fn document_shape() {
        let m = parked();
        let doc = emit_with(
            &m,
            &EmitOptions {
                mode: Mode::OptimizeNative,
                unsat_cores: true,
                seed: Some(4),
                bound: Some(7),
            },
        );
        assert!(doc.starts_with("(set-option :produce-models true)\n(set-option :produce-unsat-cores true)\n"));
        assert!(doc.contains("(declare-fun at_0_0_0 () Bool)\n"));
        assert!(doc.contains("(declare-fun rc_0_0 () Int)\n"));
        assert!(doc.contains("(assert (! at_0_0_0 :named f9_0))\n"));
        assert!(doc.contains("(define-fun total_cost () Int cost_0)\n"));
        assert!(doc.contains("(assert (! (<= total_cost 7) :named f25_0))\n(minimize total_cost)\n(check-sat)\n"));
        assert!(doc.ends_with("(get-unsat-core)\n"));
        assert_eq!(emit_smtlib(&m, Mode::Satisfy), emit_smtlib(&m, Mode::Satisfy));
    }
}
