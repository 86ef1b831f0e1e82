//! Graphviz export.

use std::fmt::Write;

use kpmod_core::{CoverBall, KGraph, RepKGraph};

const PALETTE: [&str; 6] = ["blue", "red", "darkgreen", "orange", "purple", "brown"];

fn color(c: usize) -> &'static str {
    PALETTE[c % PALETTE.len()]
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn kgraph_dot(g: &KGraph) -> String {
    let mut s = String::from("digraph kgraph {\n");
    for v in g.vertices() {
        writeln!(s, "  {};", quote(g.vertex_name(v))).unwrap();
    }
    for e in g.edge_ids() {
        let d = g.edge(e);
        writeln!(
            s,
            "  {} -> {} [label={}, color={}];",
            quote(g.vertex_name(d.src)),
            quote(g.vertex_name(d.rng)),
            quote(g.edge_name(e)),
            color(d.color)
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

/// Core vertices whose out-edges continue into the implicit completion are dashed.
pub fn rep_dot(d: &RepKGraph) -> String {
    let g = d.base();
    let mut s = String::from("digraph repgraph {\n");
    for c in d.core() {
        let v = d.core_alpha(c);
        let open = g.edge_ids().any(|e| g.edge(e).src == v && d.out_edge(c, e).is_none());
        let label = format!("{} : {}", d.name(c), g.vertex_name(v));
        let style = if open { ", style=dashed" } else { "" };
        writeln!(s, "  {} [label={}{}];", quote(d.name(c)), quote(&label), style).unwrap();
    }
    for e in d.core_edges() {
        let label = format!("{} : {}", e.name, g.edge_name(e.label));
        writeln!(
            s,
            "  {} -> {} [label={}, color={}];",
            quote(d.name(e.src)),
            quote(d.name(e.rng)),
            quote(&label),
            color(g.color(e.label))
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

/// Boundary vertices of the ball are dashed.
pub fn ball_dot(d: &RepKGraph, ball: &CoverBall) -> String {
    let g = d.base();
    let mut s = String::from("digraph cover_ball {\n");
    for i in 0..ball.nodes().len() {
        let style = if ball.is_boundary(i) { ", style=dashed" } else { "" };
        writeln!(s, "  n{i} [label={}{}];", quote(&ball.node_label(d, i)), style).unwrap();
    }
    for e in ball.edges() {
        let label = g.edge_name(d.core_edges()[e.edge].label);
        let c = g.color(d.core_edges()[e.edge].label);
        writeln!(s, "  n{} -> n{} [label={}, color={}];", e.src, e.rng, quote(label), color(c)).unwrap();
    }
    s.push_str("}\n");
    s
}
