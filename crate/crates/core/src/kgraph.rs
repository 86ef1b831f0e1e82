//! Higher-rank graphs presented by a coloured skeleton and commuting squares.
//!
//! Paths are stored in a colour-sorted normal form: reading from the source,
//! all colour-1 edges come first, then colour-2 edges, and so on. Any edge
//! word is brought to this form by swapping adjacent edges of decreasing
//! colour through the unique commuting square that contains them. Square
//! uniqueness plus the associativity check performed at validation time make
//! the result independent of the swap order, so two paths are equal exactly
//! when their normal forms are.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// An element of ℕ^k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    /// The unit degree of colour `color` (0-based).
    pub fn unit(k: usize, color: usize) -> Self {
        let mut d = vec![0; k];
        d[color] = 1;
        Degree(d)
    }

    pub fn from_vec(components: Vec<u32>) -> Self {
        Degree(components)
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` unless `other <= self`.
    pub fn checked_sub(&self, other: &Degree) -> Option<Degree> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Degree)
    }

    /// Least upper bound (componentwise max).
    pub fn join(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Componentwise order.
    pub fn le(&self, other: &Degree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn get(&self, color: usize) -> u32 {
        self.0[color]
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeData {
    pub name: String,
    /// 0-based colour.
    pub color: usize,
    pub src: VertexId,
    pub rng: VertexId,
}

/// A path in normal form. `edges[0]` is applied first (it leaves the source).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathNF {
    source: VertexId,
    edges: Vec<EdgeId>,
    range: VertexId,
    degree: Degree,
}

impl PathNF {
    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdge {
    pub id: String,
    /// 1-based colour as written in documents.
    pub color: usize,
    pub src: String,
    pub rng: String,
}

/// Two length-2 paths, each written `[inner, outer]`.
pub type RawSquare = [[String; 2]; 2];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawKGraph {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<RawEdge>,
    pub squares: Vec<RawSquare>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KGraphViolation {
    #[error("the graph has no vertices")]
    Empty,
    #[error("rank k must be positive")]
    InvalidRank,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge `{edge}` has colour {color} outside 1..={k}")]
    ColorOutOfRange { edge: String, color: usize, k: usize },
    #[error("square {square} refers to unknown edge `{edge}`")]
    UnknownEdge { square: usize, edge: String },
    #[error("square {square}: {detail}")]
    SquareEndpointMismatch { square: usize, detail: String },
    #[error("no square contains the path `{inner}` then `{outer}`")]
    MissingSquare { inner: String, outer: String },
    #[error("the path `{inner}` then `{outer}` lies in more than one square")]
    DuplicateSquare { inner: String, outer: String },
    #[error("square swaps are not associative on `{}` then `{}` then `{}` at `{vertex}`", .path[0], .path[1], .path[2])]
    HexagonFailure { vertex: String, path: [String; 3] },
    #[error("vertex `{vertex}` receives no edge of colour {color}")]
    SourceVertex { vertex: String, color: usize },
    #[error("vertex `{vertex}` is not connected to `{root}`")]
    Disconnected { vertex: String, root: String },
}

/// Every invariant violated by a raw k-graph, each with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", render_violations(.0))]
pub struct KGraphReport(pub Vec<KGraphViolation>);

fn render_violations(v: &[KGraphViolation]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KGraphError {
    #[error("edges are not composable")]
    NotComposable,
    #[error("degree {requested} is not below {available}")]
    DegreeOutOfRange { requested: Degree, available: Degree },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
}

/// A validated k-graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGraph {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeData>,
    squares: Vec<[[EdgeId; 2]; 2]>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    swap: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    // [vertex][color] -> edges
    in_edges: Vec<Vec<Vec<EdgeId>>>,
    out_edges: Vec<Vec<Vec<EdgeId>>>,
}

impl KGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeData {
        &self.edges[e.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn color(&self, e: EdgeId) -> usize {
        self.edges[e.0].color
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, KGraphError> {
        self.vertex_index.get(name).copied().ok_or_else(|| KGraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_by_name(&self, name: &str) -> Result<EdgeId, KGraphError> {
        self.edge_index.get(name).copied().ok_or_else(|| KGraphError::UnknownEdge(name.to_string()))
    }

    /// The squares as given, each `[[inner, outer], [inner, outer]]`.
    pub fn squares(&self) -> &[[[EdgeId; 2]; 2]] {
        &self.squares
    }

    pub fn in_edges(&self, v: VertexId, color: usize) -> &[EdgeId] {
        &self.in_edges[v.0][color]
    }

    pub fn out_edges(&self, v: VertexId, color: usize) -> &[EdgeId] {
        &self.out_edges[v.0][color]
    }

    /// Partner of the bicoloured path `inner` then `outer` in its square.
    pub fn swap(&self, inner: EdgeId, outer: EdgeId) -> Option<(EdgeId, EdgeId)> {
        self.swap.get(&(inner, outer)).copied()
    }

    pub fn identity(&self, v: VertexId) -> PathNF {
        PathNF { source: v, edges: Vec::new(), range: v, degree: Degree::zero(self.k) }
    }

    pub fn edge_path(&self, e: EdgeId) -> PathNF {
        let data = self.edge(e);
        PathNF { source: data.src, edges: vec![e], range: data.rng, degree: Degree::unit(self.k, data.color) }
    }

    /// Normal form of the edge word `edges` (applied left to right) starting at `start`.
    pub fn normalize(&self, start: VertexId, edges: &[EdgeId]) -> Result<PathNF, KGraphError> {
        let mut at = start;
        let mut degree = Degree::zero(self.k);
        for &e in edges {
            let data = self.edge(e);
            if data.src != at {
                return Err(KGraphError::NotComposable);
            }
            at = data.rng;
            degree.0[data.color] += 1;
        }
        let mut word = edges.to_vec();
        self.sort_word(&mut word, |g, e| g.color(e));
        Ok(PathNF { source: start, edges: word, range: at, degree })
    }

    /// Bubble-sorts a composable word by `key` using square swaps. Keys of
    /// equal-coloured edges must already be in order.
    fn sort_word<K: Ord>(&self, word: &mut [EdgeId], key: impl Fn(&Self, EdgeId) -> K) {
        self.sort_tagged(word, &mut vec![(); word.len()], |g, e, _| key(g, e));
    }

    fn sort_tagged<T: Copy, K: Ord>(&self, word: &mut [EdgeId], tags: &mut [T], key: impl Fn(&Self, EdgeId, T) -> K) {
        loop {
            let mut swapped = false;
            for i in 0..word.len().saturating_sub(1) {
                if key(self, word[i], tags[i]) > key(self, word[i + 1], tags[i + 1]) {
                    let (inner, outer) = self
                        .swap(word[i], word[i + 1])
                        .expect("validated k-graph has a square for every bicoloured path");
                    word[i] = inner;
                    word[i + 1] = outer;
                    tags.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }

    /// `outer ∘ inner`: first `inner`, then `outer`.
    pub fn compose(&self, outer: &PathNF, inner: &PathNF) -> Result<PathNF, KGraphError> {
        if outer.source != inner.range {
            return Err(KGraphError::NotComposable);
        }
        let word: Vec<EdgeId> = inner.edges.iter().chain(&outer.edges).copied().collect();
        self.normalize(inner.source, &word)
    }

    /// Splits `path` as `first_part ∘ tail` with `d(tail) = m`; returns `(head, tail)`
    /// where `tail` is applied first.
    pub fn factorize(&self, path: &PathNF, m: &Degree) -> Result<(PathNF, PathNF), KGraphError> {
        let rest = path
            .degree
            .checked_sub(m)
            .ok_or_else(|| KGraphError::DegreeOutOfRange { requested: m.clone(), available: path.degree.clone() })?;
        let mut word = path.edges.clone();
        let mut seen = vec![0u32; self.k];
        let mut tags: Vec<u8> = word
            .iter()
            .map(|&e| {
                let c = self.color(e);
                seen[c] += 1;
                u8::from(seen[c] > m.0[c])
            })
            .collect();
        self.sort_tagged(&mut word, &mut tags, |g, e, t| (t, g.color(e)));
        let cut = m.total() as usize;
        let tail_word = &word[..cut];
        let head_word = &word[cut..];
        let mid = tail_word.last().map(|&e| self.edge(e).rng).unwrap_or(path.source);
        let tail = PathNF { source: path.source, edges: tail_word.to_vec(), range: mid, degree: m.clone() };
        let head = PathNF { source: mid, edges: head_word.to_vec(), range: path.range, degree: rest };
        Ok((head, tail))
    }

    /// All paths of degree `n` with source `v`.
    pub fn paths_from(&self, v: VertexId, n: &Degree) -> Vec<PathNF> {
        let mut out = Vec::new();
        let mut word = Vec::new();
        self.extend_forward(v, n, 0, 0, &mut word, v, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_forward(
        &self,
        start: VertexId,
        n: &Degree,
        color: usize,
        taken: u32,
        word: &mut Vec<EdgeId>,
        at: VertexId,
        out: &mut Vec<PathNF>,
    ) {
        if color == self.k {
            out.push(PathNF { source: start, edges: word.clone(), range: at, degree: n.clone() });
            return;
        }
        if taken == n.0[color] {
            self.extend_forward(start, n, color + 1, 0, word, at, out);
            return;
        }
        for &e in self.out_edges(at, color) {
            word.push(e);
            self.extend_forward(start, n, color, taken + 1, word, self.edge(e).rng, out);
            word.pop();
        }
    }

    /// All paths of degree `n` with range `v`.
    pub fn paths_into(&self, v: VertexId, n: &Degree) -> Vec<PathNF> {
        let mut out = Vec::new();
        let mut rev = Vec::new();
        self.extend_backward(v, n, self.k, 0, &mut rev, v, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_backward(
        &self,
        end: VertexId,
        n: &Degree,
        color_plus_one: usize,
        taken: u32,
        rev: &mut Vec<EdgeId>,
        at: VertexId,
        out: &mut Vec<PathNF>,
    ) {
        if color_plus_one == 0 {
            let edges: Vec<EdgeId> = rev.iter().rev().copied().collect();
            out.push(PathNF { source: at, edges, range: end, degree: n.clone() });
            return;
        }
        let color = color_plus_one - 1;
        if taken == n.0[color] {
            self.extend_backward(end, n, color, 0, rev, at, out);
            return;
        }
        for &e in self.in_edges(at, color) {
            rev.push(e);
            self.extend_backward(end, n, color_plus_one, taken + 1, rev, self.edge(e).src, out);
            rev.pop();
        }
    }

    /// Minimal common extensions: all `(a, b)` with `mu ∘ a = nu ∘ b` of degree `d(mu) ∨ d(nu)`.
    pub fn minimal_common_extensions(&self, mu: &PathNF, nu: &PathNF) -> Vec<(PathNF, PathNF)> {
        if mu.range != nu.range {
            return Vec::new();
        }
        let join = mu.degree.join(&nu.degree);
        let a_deg = join.checked_sub(&mu.degree).expect("join dominates");
        let b_deg = join.checked_sub(&nu.degree).expect("join dominates");
        let mut out = Vec::new();
        for lambda in self.paths_into(mu.range, &join) {
            let (m_head, a) = self.factorize(&lambda, &a_deg).expect("degree in range");
            if &m_head != mu {
                continue;
            }
            let (n_head, b) = self.factorize(&lambda, &b_deg).expect("degree in range");
            if &n_head == nu {
                out.push((a, b));
            }
        }
        out
    }

    /// Writes a path in composition order (rightmost edge applied first).
    pub fn path_to_string(&self, path: &PathNF) -> String {
        if path.edges.is_empty() {
            return format!("1_{}", self.vertex_name(path.source));
        }
        path.edges.iter().rev().map(|&e| self.edge_name(e)).collect::<Vec<_>>().join(" ")
    }
}

/// Checks every k-graph invariant and builds the validated graph.
pub fn validate_kgraph(raw: &RawKGraph) -> Result<KGraph, KGraphReport> {
    let mut report = Vec::new();
    if raw.k == 0 {
        report.push(KGraphViolation::InvalidRank);
    }
    if raw.vertices.is_empty() {
        report.push(KGraphViolation::Empty);
    }
    if !report.is_empty() {
        return Err(KGraphReport(report));
    }
    let k = raw.k;

    let mut vertex_index = HashMap::new();
    for (i, name) in raw.vertices.iter().enumerate() {
        if vertex_index.insert(name.clone(), VertexId(i)).is_some() {
            report.push(KGraphViolation::DuplicateId(name.clone()));
        }
    }
    let mut edge_index = HashMap::new();
    let mut edges = Vec::new();
    for e in &raw.edges {
        if edge_index.contains_key(&e.id) || vertex_index.contains_key(&e.id) {
            report.push(KGraphViolation::DuplicateId(e.id.clone()));
            continue;
        }
        let mut ok = true;
        for v in [&e.src, &e.rng] {
            if !vertex_index.contains_key(v) {
                report.push(KGraphViolation::UnknownVertex { edge: e.id.clone(), vertex: v.clone() });
                ok = false;
            }
        }
        if e.color == 0 || e.color > k {
            report.push(KGraphViolation::ColorOutOfRange { edge: e.id.clone(), color: e.color, k });
            ok = false;
        }
        if ok {
            edge_index.insert(e.id.clone(), EdgeId(edges.len()));
            edges.push(EdgeData {
                name: e.id.clone(),
                color: e.color - 1,
                src: vertex_index[&e.src],
                rng: vertex_index[&e.rng],
            });
        }
    }
    if !report.is_empty() {
        return Err(KGraphReport(report));
    }

    let n = raw.vertices.len();
    let mut in_edges = vec![vec![Vec::new(); k]; n];
    let mut out_edges = vec![vec![Vec::new(); k]; n];
    for (i, e) in edges.iter().enumerate() {
        in_edges[e.rng.0][e.color].push(EdgeId(i));
        out_edges[e.src.0][e.color].push(EdgeId(i));
    }

    // Squares.
    let mut squares = Vec::new();
    let mut swap: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)> = HashMap::new();
    let mut square_trouble = false;
    for (si, sq) in raw.squares.iter().enumerate() {
        let mut ids = [[EdgeId(0); 2]; 2];
        let mut known = true;
        for (p, path) in sq.iter().enumerate() {
            for (q, name) in path.iter().enumerate() {
                match edge_index.get(name) {
                    Some(&id) => ids[p][q] = id,
                    None => {
                        report.push(KGraphViolation::UnknownEdge { square: si, edge: name.clone() });
                        known = false;
                    }
                }
            }
        }
        if !known {
            square_trouble = true;
            continue;
        }
        let [[a_in, a_out], [b_in, b_out]] = ids;
        let (ai, ao, bi, bo) = (&edges[a_in.0], &edges[a_out.0], &edges[b_in.0], &edges[b_out.0]);
        let mut problems = Vec::new();
        if ai.rng != ao.src || bi.rng != bo.src {
            problems.push("a side is not a composable path".to_string());
        }
        if ai.color == ao.color {
            problems.push("the first path is not bicoloured".to_string());
        }
        if bi.color != ao.color || bo.color != ai.color {
            problems.push("the second path does not swap the colour order of the first".to_string());
        }
        if ai.src != bi.src || ao.rng != bo.rng {
            problems.push("the two paths have different endpoints".to_string());
        }
        if !problems.is_empty() {
            report.push(KGraphViolation::SquareEndpointMismatch { square: si, detail: problems.join(", ") });
            square_trouble = true;
            continue;
        }
        for (from, to) in [((a_in, a_out), (b_in, b_out)), ((b_in, b_out), (a_in, a_out))] {
            if swap.insert(from, to).is_some() {
                report.push(KGraphViolation::DuplicateSquare {
                    inner: edges[from.0 .0].name.clone(),
                    outer: edges[from.1 .0].name.clone(),
                });
                square_trouble = true;
            }
        }
        squares.push(ids);
    }
    // Every bicoloured path lies in a square.
    for (i, inner) in edges.iter().enumerate() {
        for (c, outs) in out_edges[inner.rng.0].iter().enumerate() {
            if c == inner.color {
                continue;
            }
            for &outer in outs {
                if !swap.contains_key(&(EdgeId(i), outer)) {
                    report.push(KGraphViolation::MissingSquare {
                        inner: inner.name.clone(),
                        outer: edges[outer.0].name.clone(),
                    });
                    square_trouble = true;
                }
            }
        }
    }

    // No sources.
    for (v, per) in in_edges.iter().enumerate() {
        for (c, ins) in per.iter().enumerate() {
            if ins.is_empty() {
                report.push(KGraphViolation::SourceVertex { vertex: raw.vertices[v].clone(), color: c + 1 });
            }
        }
    }

    // Connectivity of the undirected skeleton.
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for c in 0..k {
            for e in in_edges[v][c].iter().chain(&out_edges[v][c]) {
                let d = &edges[e.0];
                for w in [d.src.0, d.rng.0] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    for (v, reached) in seen.iter().enumerate() {
        if !reached {
            report
                .push(KGraphViolation::Disconnected { vertex: raw.vertices[v].clone(), root: raw.vertices[0].clone() });
        }
    }

    let graph = KGraph {
        k,
        vertices: raw.vertices.clone(),
        edges,
        squares,
        vertex_index,
        edge_index,
        swap,
        in_edges,
        out_edges,
    };

    if k >= 3 && !square_trouble {
        report.extend(hexagon_failures(&graph));
    }
    if report.is_empty() {
        Ok(graph)
    } else {
        Err(KGraphReport(report))
    }
}

/// Checks that the two ways of reversing every tricoloured 3-path agree.
fn hexagon_failures(g: &KGraph) -> Vec<KGraphViolation> {
    let mut failures = Vec::new();
    let apply = |word: &mut [EdgeId; 3], at: usize| {
        let (i, o) = g.swap(word[at], word[at + 1]).expect("squares complete");
        word[at] = i;
        word[at + 1] = o;
    };
    for v in g.vertices() {
        for a in (0..g.k).flat_map(|c| g.out_edges(v, c).iter().copied()) {
            let ca = g.color(a);
            let mid = g.edge(a).rng;
            for b in (0..g.k).filter(|&c| c != ca).flat_map(|c| g.out_edges(mid, c).iter().copied()) {
                let cb = g.color(b);
                let end = g.edge(b).rng;
                for c in (0..g.k).filter(|&c| c != ca && c != cb).flat_map(|c| g.out_edges(end, c).iter().copied()) {
                    let mut left = [a, b, c];
                    let mut right = [a, b, c];
                    for at in [0, 1, 0] {
                        apply(&mut left, at);
                    }
                    for at in [1, 0, 1] {
                        apply(&mut right, at);
                    }
                    if left != right {
                        failures.push(KGraphViolation::HexagonFailure {
                            vertex: g.vertex_name(v).to_string(),
                            path: [a, b, c].map(|e| g.edge_name(e).to_string()),
                        });
                    }
                }
            }
        }
    }
    failures
}

/// Sorted set of the distinct degrees up to `bound` (componentwise), used for exhaustive checks.
pub fn degrees_up_to(bound: &Degree) -> Vec<Degree> {
    let mut out = BTreeSet::new();
    let k = bound.rank();
    let mut cur = vec![0u32; k];
    loop {
        out.insert(Degree(cur.clone()));
        let mut i = 0;
        loop {
            if i == k {
                return out.into_iter().collect();
            }
            if cur[i] < bound.0[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}
