//! Small named graphs used by tests, benches and the acceptance suite.

use std::sync::Arc;

use crate::kgraph::{validate_kgraph, EdgeId, KGraph, RawEdge, RawKGraph, VertexId};
use crate::repgraph::{validate_rep, RawCoreEdge, RawCoreVertex, RawRep, RepKGraph};
use crate::walks::{Letter, Walk};

fn edge(id: &str, color: usize, src: &str, rng: &str) -> RawEdge {
    RawEdge { id: id.into(), color, src: src.into(), rng: rng.into() }
}

fn square(a: [&str; 2], b: [&str; 2]) -> [[String; 2]; 2] {
    [a.map(String::from), b.map(String::from)]
}

fn build(raw: RawKGraph) -> KGraph {
    validate_kgraph(&raw).expect("fixture graph is valid")
}

/// One vertex with a single loop `l`.
pub fn raw_one_loop() -> RawKGraph {
    RawKGraph { k: 1, vertices: vec!["v".into()], edges: vec![edge("l", 1, "v", "v")], squares: vec![] }
}

/// One vertex with loops `a` and `b`.
pub fn raw_two_loops() -> RawKGraph {
    RawKGraph {
        k: 1,
        vertices: vec!["v".into()],
        edges: vec![edge("a", 1, "v", "v"), edge("b", 1, "v", "v")],
        squares: vec![],
    }
}

/// One vertex with loops `e`, `f` and `g`.
pub fn raw_three_loops() -> RawKGraph {
    RawKGraph {
        k: 1,
        vertices: vec!["v".into()],
        edges: vec![edge("e", 1, "v", "v"), edge("f", 1, "v", "v"), edge("g", 1, "v", "v")],
        squares: vec![],
    }
}

/// One vertex, a blue loop `e` and a red loop `f` that commute.
pub fn raw_torus() -> RawKGraph {
    RawKGraph {
        k: 2,
        vertices: vec!["v".into()],
        edges: vec![edge("e", 1, "v", "v"), edge("f", 2, "v", "v")],
        squares: vec![square(["f", "e"], ["e", "f"])],
    }
}

/// One vertex, blue loops `e1`, `e2`, red loops `f1`, `f2`, with `ej∘fi = fj∘ei`.
pub fn raw_two_by_two() -> RawKGraph {
    let mut squares = Vec::new();
    for i in 1..=2 {
        for j in 1..=2 {
            let (fi, ei, fj, ej) = (format!("f{i}"), format!("e{i}"), format!("f{j}"), format!("e{j}"));
            squares.push([[fi, ej], [ei, fj]]);
        }
    }
    RawKGraph {
        k: 2,
        vertices: vec!["v".into()],
        edges: vec![edge("e1", 1, "v", "v"), edge("e2", 1, "v", "v"), edge("f1", 2, "v", "v"), edge("f2", 2, "v", "v")],
        squares,
    }
}

/// Vertices `a`, `b` with edges `ab: a → b` and `ba: b → a`.
pub fn raw_two_vertex_cycle() -> RawKGraph {
    RawKGraph {
        k: 1,
        vertices: vec!["a".into(), "b".into()],
        edges: vec![edge("ab", 1, "a", "b"), edge("ba", 1, "b", "a")],
        squares: vec![],
    }
}

pub fn two_vertex_cycle() -> KGraph {
    build(raw_two_vertex_cycle())
}

pub fn one_loop() -> KGraph {
    build(raw_one_loop())
}

pub fn two_loops() -> KGraph {
    build(raw_two_loops())
}

pub fn three_loops() -> KGraph {
    build(raw_three_loops())
}

pub fn torus() -> KGraph {
    build(raw_torus())
}

pub fn two_by_two() -> KGraph {
    build(raw_two_by_two())
}

fn rep(base: KGraph, raw: RawRep) -> RepKGraph {
    validate_rep(Arc::new(base), &raw).expect("fixture representation graph is valid")
}

fn raw_rep(vertices: &[(&str, &str)], edges: &[(&str, &str, &str, &str)]) -> RawRep {
    RawRep {
        core_vertices: vertices
            .iter()
            .map(|(id, a)| RawCoreVertex { id: id.to_string(), alpha: a.to_string() })
            .collect(),
        core_edges: edges
            .iter()
            .map(|(id, label, src, rng)| RawCoreEdge {
                id: id.to_string(),
                alpha_edge: label.to_string(),
                color: None,
                src: src.to_string(),
                rng: rng.to_string(),
            })
            .collect(),
    }
}

/// Over [`one_loop`]: `v1 → v2 → v1`.
pub fn raw_two_cycle() -> RawRep {
    raw_rep(&[("v1", "v"), ("v2", "v")], &[("a", "l", "v1", "v2"), ("b", "l", "v2", "v1")])
}

pub fn two_cycle() -> RepKGraph {
    rep(one_loop(), raw_two_cycle())
}

/// Over [`one_loop`]: `w0 → w1 → w2 → w3 → w0`.
pub fn four_cycle() -> RepKGraph {
    rep(
        one_loop(),
        raw_rep(
            &[("w0", "v"), ("w1", "v"), ("w2", "v"), ("w3", "v")],
            &[("a", "l", "w0", "w1"), ("b", "l", "w1", "w2"), ("c", "l", "w2", "w3"), ("d", "l", "w3", "w0")],
        ),
    )
}

/// Over [`two_loops`]: `p →a q →b p`.
pub fn alternating_cycle() -> RepKGraph {
    rep(two_loops(), raw_rep(&[("p", "v"), ("q", "v")], &[("x", "a", "p", "q"), ("y", "b", "q", "p")]))
}

/// Over [`three_loops`]: a 6-cycle labelled g, e, f, g, e, f.
pub fn raw_hexagon() -> RawRep {
    raw_rep(
        &[("H1", "v"), ("H2", "v"), ("H3", "v"), ("H4", "v"), ("H5", "v"), ("H6", "v")],
        &[
            ("h1", "g", "H1", "H2"),
            ("h2", "e", "H2", "H3"),
            ("h3", "f", "H3", "H4"),
            ("h4", "g", "H4", "H5"),
            ("h5", "e", "H5", "H6"),
            ("h6", "f", "H6", "H1"),
        ],
    )
}

pub fn hexagon() -> RepKGraph {
    rep(three_loops(), raw_hexagon())
}

/// Over [`three_loops`]: a 3-cycle labelled g, e, f.
pub fn raw_triangle() -> RawRep {
    raw_rep(
        &[("X", "v"), ("Y", "v"), ("Z", "v")],
        &[("t1", "g", "X", "Y"), ("t2", "e", "Y", "Z"), ("t3", "f", "Z", "X")],
    )
}

pub fn triangle() -> RepKGraph {
    rep(three_loops(), raw_triangle())
}

/// [`torus`] as a representation of itself.
pub fn raw_torus_identity() -> RawRep {
    raw_rep(&[("x", "v")], &[("e", "e", "x", "x"), ("f", "f", "x", "x")])
}

pub fn torus_identity() -> RepKGraph {
    rep(torus(), raw_torus_identity())
}

/// Over [`torus`]: blue loops at `p` and `q`, joined by a red 2-cycle.
pub fn red_cycle_blue_loops() -> RepKGraph {
    rep(
        torus(),
        raw_rep(
            &[("p", "v"), ("q", "v")],
            &[("ep", "e", "p", "p"), ("eq", "e", "q", "q"), ("fp", "f", "p", "q"), ("fq", "f", "q", "p")],
        ),
    )
}

/// Over [`two_by_two`]: loops `e1`, `f1` at `A` and edges `e2`, `f2` from `A` to `B`.
pub fn raw_two_by_two_pair() -> RawRep {
    raw_rep(
        &[("A", "v"), ("B", "v")],
        &[("a1", "e1", "A", "A"), ("a2", "f1", "A", "A"), ("b1", "e2", "A", "B"), ("b2", "f2", "A", "B")],
    )
}

pub fn two_by_two_pair() -> RepKGraph {
    rep(two_by_two(), raw_two_by_two_pair())
}

/// Over [`two_by_two`]: single-vertex cores with loops `e1, f1` and `e2, f2`.
pub fn blue_loop_pair() -> (RepKGraph, RepKGraph) {
    (
        rep(two_by_two(), raw_rep(&[("x", "v")], &[("a", "e1", "x", "x"), ("b", "f1", "x", "x")])),
        rep(two_by_two(), raw_rep(&[("y", "v")], &[("a", "e2", "y", "y"), ("b", "f2", "y", "y")])),
    )
}

/// [`two_vertex_cycle`] as a representation of itself.
pub fn two_vertex_identity() -> RepKGraph {
    rep(two_vertex_cycle(), raw_rep(&[("p", "a"), ("q", "b")], &[("x", "ab", "p", "q"), ("y", "ba", "q", "p")]))
}

/// Every representation graph fixture with a descriptive name.
pub fn all_reps() -> Vec<(&'static str, RepKGraph)> {
    let (x, y) = blue_loop_pair();
    vec![
        ("two_cycle", two_cycle()),
        ("two_vertex_identity", two_vertex_identity()),
        ("four_cycle", four_cycle()),
        ("alternating_cycle", alternating_cycle()),
        ("hexagon", hexagon()),
        ("triangle", triangle()),
        ("torus_identity", torus_identity()),
        ("red_cycle_blue_loops", red_cycle_blue_loops()),
        ("two_by_two_pair", two_by_two_pair()),
        ("loops_e1_f1", x),
        ("loops_e2_f2", y),
    ]
}

/// A walk from `start` built from `(index, star)` choices: each step takes
/// the `index`-th (cyclically) out-edge, or in-edge backwards when `star` is set.
pub fn walk_from_choices(g: &KGraph, start: VertexId, choices: &[(usize, bool)]) -> Walk {
    let mut at = start;
    let mut letters = Vec::new();
    for &(i, star) in choices {
        let options: Vec<EdgeId> = (0..g.k())
            .flat_map(|c| if star { g.in_edges(at, c) } else { g.out_edges(at, c) }.iter().copied())
            .collect();
        let e = options[i % options.len()];
        let l = Letter { path: g.edge_path(e), star };
        at = l.to();
        letters.push(l);
    }
    Walk::new(start, letters).expect("choices follow edges")
}
