use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{Instance, NodeId, Schedule};

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn color(i: usize) -> &'static str {
    COLORS[i % COLORS.len()]
}

/// Grid coordinates `(column, row)`: parsed from `r<row>c<col>` names when
/// every node has one, otherwise row-major on a square-ish grid.
fn positions(instance: &Instance) -> Vec<(f64, f64)> {
    let g = &instance.graph;
    let parse = |s: &str| -> Option<(f64, f64)> {
        let rest = s.strip_prefix('r')?;
        let (r, c) = rest.split_once('c')?;
        Some((c.parse().ok()?, r.parse().ok()?))
    };
    let parsed: Option<Vec<_>> = g.names().iter().map(|n| parse(n)).collect();
    parsed.unwrap_or_else(|| {
        let n = g.node_count();
        let cols = ((n as f64).sqrt().ceil() as usize).max(1);
        (0..n).map(|i| ((i % cols) as f64, (i / cols) as f64)).collect()
    })
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn service_labels(schedule: &Schedule, instance: &Instance) -> BTreeMap<NodeId, Vec<String>> {
    let mut labels: BTreeMap<NodeId, Vec<String>> = BTreeMap::new();
    for (i, v) in schedule.vehicles.iter().enumerate() {
        for s in &v.services {
            let job = &instance.jobs[s.job];
            let node = job.tasks[s.task].location;
            labels.entry(node).or_default().push(format!(
                "{}.{}@{} ({})",
                job.id, job.tasks[s.task].id, s.time, instance.vehicles[i].id
            ));
        }
    }
    labels
}

/// Graphviz drawing: the layout with depots (double circles) and chargers
/// (filled), then one colored, time-labelled edge per vehicle move.
pub fn plot_dot(schedule: &Schedule, instance: &Instance) -> String {
    let g = &instance.graph;
    let pos = positions(instance);
    let depots: BTreeMap<NodeId, Vec<&str>> = instance.vehicles.iter().fold(BTreeMap::new(), |mut m, v| {
        m.entry(v.start).or_insert_with(Vec::new).push(v.id.as_str());
        m
    });
    let services = service_labels(schedule, instance);
    let mut out = String::from("digraph schedule {\n  layout=neato;\n  node [shape=circle, fontsize=10];\n");
    for n in g.nodes() {
        let (x, y) = pos[n.index()];
        // + 0.0 turns -0 into 0
        let mut attrs = vec![format!("pos=\"{},{}!\"", x * 1.5, -y * 1.5 + 0.0)];
        let mut label = escape(g.name(n));
        if let Some(vs) = depots.get(&n) {
            attrs.push("shape=doublecircle".into());
            label.push_str(&format!("\\n[{}]", escape(&vs.join(","))));
        }
        if instance.battery.is_station(n) {
            attrs.push("style=filled, fillcolor=\"#fff3b0\"".into());
        }
        if g.is_hub(n) {
            attrs.push("penwidth=2".into());
        }
        if let Some(s) = services.get(&n) {
            let lines: Vec<String> = s.iter().map(|l| escape(l)).collect();
            attrs.push(format!("xlabel=\"{}\"", lines.join("\\n")));
        }
        attrs.push(format!("label=\"{label}\""));
        let _ = writeln!(out, "  n{} [{}];", n.index(), attrs.join(", "));
    }
    for (&(a, b), e) in g.edges() {
        let both = g.edge(b, a).is_some();
        if both && b < a {
            continue;
        }
        let dir = if both { "none" } else { "forward" };
        let _ = writeln!(
            out,
            "  n{} -> n{} [color=\"#bbbbbb\", dir={dir}, label=\"{}\", fontsize=8];",
            a.index(),
            b.index(),
            e.length
        );
    }
    for (i, v) in schedule.vehicles.iter().enumerate() {
        for m in &v.moves {
            let _ = writeln!(
                out,
                "  n{} -> n{} [color=\"{}\", penwidth=2, label=\"{}@{}\", fontcolor=\"{}\", fontsize=8];",
                m.from.index(),
                m.to.index(),
                color(i),
                escape(&instance.vehicles[i].id),
                m.time,
                color(i)
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Self-contained SVG version of [`plot_dot`]; routes are offset per
/// vehicle so overlapping paths stay visible.
pub fn plot_svg(schedule: &Schedule, instance: &Instance) -> String {
    const SCALE: f64 = 90.0;
    const MARGIN: f64 = 60.0;
    let g = &instance.graph;
    let pos = positions(instance);
    let xy = |n: NodeId| {
        let (x, y) = pos[n.index()];
        (MARGIN + x * SCALE, MARGIN + y * SCALE)
    };
    let w = pos.iter().map(|p| p.0).fold(0.0, f64::max) * SCALE + 2.0 * MARGIN;
    let h = pos.iter().map(|p| p.1).fold(0.0, f64::max) * SCALE + 2.0 * MARGIN;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    );
    for &(a, b) in g.edges().keys() {
        let ((x1, y1), (x2, y2)) = (xy(a), xy(b));
        let _ = writeln!(
            out,
            "  <line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#cccccc\" stroke-width=\"2\"/>"
        );
    }
    let nv = schedule.vehicles.len().max(1) as f64;
    for (i, v) in schedule.vehicles.iter().enumerate() {
        let off = (i as f64 - (nv - 1.0) / 2.0) * 4.0;
        for m in &v.moves {
            let ((x1, y1), (x2, y2)) = (xy(m.from), xy(m.to));
            let (x1, y1, x2, y2) = (x1 + off, y1 + off, x2 + off, y2 + off);
            let _ = writeln!(
                out,
                "  <line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{}\" stroke-width=\"2.5\"/>",
                color(i)
            );
            let _ = writeln!(
                out,
                "  <text x=\"{:.1}\" y=\"{:.1}\" fill=\"{}\">{}</text>",
                (x1 + x2) / 2.0 + 3.0,
                (y1 + y2) / 2.0 - 3.0,
                color(i),
                m.time
            );
        }
    }
    let depots: Vec<NodeId> = instance.vehicles.iter().map(|v| v.start).collect();
    for n in g.nodes() {
        let (x, y) = xy(n);
        let fill = if instance.battery.is_station(n) { "#fff3b0" } else { "white" };
        let _ = writeln!(out, "  <circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"14\" fill=\"{fill}\" stroke=\"black\"/>");
        if depots.contains(&n) {
            let _ = writeln!(out, "  <circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"18\" fill=\"none\" stroke=\"black\"/>");
        }
        let name = g.name(n).replace('&', "&amp;").replace('<', "&lt;");
        let _ = writeln!(out, "  <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{name}</text>", y + 4.0);
    }
    out.push_str("</svg>\n");
    out
}
