//! Representation k-graphs given by a finite backward-closed core.
//!
//! Every core vertex has exactly one in-edge of each colour and that edge
//! starts in the core. Out-edges that are not listed explicitly lead into an
//! implicit forward completion: a vertex outside the core is addressed by a
//! core anchor plus a Λ-path leaving it. For k ≥ 2 two different addresses
//! can name the same implicit vertex, so equality goes through
//! [`RepKGraph::same_vertex`], which compares the unique in-paths of a common
//! degree.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kgraph::{Degree, EdgeId, KGraph, PathNF, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCoreVertex {
    pub id: String,
    pub alpha: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCoreEdge {
    pub id: String,
    pub alpha_edge: String,
    /// Optional 1-based colour; checked against the colour of `alpha_edge`.
    pub color: Option<usize>,
    pub src: String,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawRep {
    pub core_vertices: Vec<RawCoreVertex>,
    pub core_edges: Vec<RawCoreEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepViolation {
    #[error("the core has no vertices")]
    Empty,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("vertex `{vertex}` is labelled by unknown base vertex `{alpha}`")]
    UnknownAlphaVertex { vertex: String, alpha: String },
    #[error("edge `{edge}` is labelled by unknown base edge `{alpha_edge}`")]
    UnknownAlphaEdge { edge: String, alpha_edge: String },
    #[error("edge `{edge}` ends at unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge `{edge}` enters the core from `{vertex}`, which is not a core vertex")]
    InEdgeLeavesCore { edge: String, vertex: String },
    #[error("edge `{edge}` has colour {given} but its label has colour {expected}")]
    AlphaColorMismatch { edge: String, given: usize, expected: usize },
    #[error("edge `{edge}`: the label does not join the labels of its endpoints")]
    AlphaEndpointMismatch { edge: String },
    #[error("vertex `{vertex}` has no in-edge of colour {color}")]
    MissingInEdge { vertex: String, color: usize },
    #[error("vertex `{vertex}` has several in-edges of colour {color}")]
    DuplicateInEdge { vertex: String, color: usize },
    #[error("vertex `{vertex}` has several out-edges labelled `{label}`")]
    DuplicateOutLabel { vertex: String, label: String },
    #[error("the in-paths of colours {first} and {second} at `{vertex}` do not form a square")]
    SquareIncompatible { vertex: String, first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct RepReport(pub Vec<RepViolation>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreEdge {
    pub name: String,
    pub label: EdgeId,
    pub src: CoreId,
    pub rng: CoreId,
}

/// A vertex of Δ: a core vertex or a path leaving the core into the implicit completion.
#[derive(Debug, Clone)]
pub enum VertexAddr {
    Core(CoreId),
    /// Kept reduced: no first edge of `path` is an explicit out-edge of `anchor`.
    Implicit {
        anchor: CoreId,
        path: PathNF,
    },
}

impl VertexAddr {
    pub fn is_core(&self) -> bool {
        matches!(self, VertexAddr::Core(_))
    }

    pub fn anchor(&self) -> CoreId {
        match self {
            VertexAddr::Core(c) => *c,
            VertexAddr::Implicit { anchor, .. } => *anchor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddrError {
    #[error("unknown core vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown base edge `{0}`")]
    UnknownEdge(String),
    #[error("the labels of `{0}` do not form a path from the anchor")]
    NotAPath(String),
}

/// A representation k-graph over a shared base.
#[derive(Debug, Clone)]
pub struct RepKGraph {
    base: Arc<KGraph>,
    names: Vec<String>,
    alpha: Vec<VertexId>,
    edges: Vec<CoreEdge>,
    index: HashMap<String, CoreId>,
    in_edge: Vec<Vec<usize>>,
    out_edge: Vec<HashMap<EdgeId, usize>>,
}

pub fn validate_rep(base: Arc<KGraph>, raw: &RawRep) -> Result<RepKGraph, RepReport> {
    let g = &*base;
    let k = g.k();
    let mut report = Vec::new();
    if raw.core_vertices.is_empty() {
        return Err(RepReport(vec![RepViolation::Empty]));
    }
    let mut index = HashMap::new();
    let mut names = Vec::new();
    let mut alpha = Vec::new();
    for v in &raw.core_vertices {
        if index.contains_key(&v.id) {
            report.push(RepViolation::DuplicateId(v.id.clone()));
            continue;
        }
        match g.vertex(&v.alpha) {
            Ok(a) => {
                index.insert(v.id.clone(), CoreId(names.len()));
                names.push(v.id.clone());
                alpha.push(a);
            }
            Err(_) => report.push(RepViolation::UnknownAlphaVertex { vertex: v.id.clone(), alpha: v.alpha.clone() }),
        }
    }
    let mut edges = Vec::new();
    let mut edge_ids = HashSet::new();
    for e in &raw.core_edges {
        if !edge_ids.insert(e.id.clone()) || index.contains_key(&e.id) {
            report.push(RepViolation::DuplicateId(e.id.clone()));
            continue;
        }
        let label = match g.edge_by_name(&e.alpha_edge) {
            Ok(l) => Some(l),
            Err(_) => {
                report.push(RepViolation::UnknownAlphaEdge { edge: e.id.clone(), alpha_edge: e.alpha_edge.clone() });
                None
            }
        };
        let src = index.get(&e.src).copied();
        if src.is_none() {
            report.push(RepViolation::InEdgeLeavesCore { edge: e.id.clone(), vertex: e.src.clone() });
        }
        let rng = index.get(&e.rng).copied();
        if rng.is_none() {
            report.push(RepViolation::UnknownVertex { edge: e.id.clone(), vertex: e.rng.clone() });
        }
        let (Some(label), Some(src), Some(rng)) = (label, src, rng) else { continue };
        let data = g.edge(label);
        if let Some(c) = e.color {
            if c != data.color + 1 {
                report.push(RepViolation::AlphaColorMismatch {
                    edge: e.id.clone(),
                    given: c,
                    expected: data.color + 1,
                });
                continue;
            }
        }
        if alpha[src.0] != data.src || alpha[rng.0] != data.rng {
            report.push(RepViolation::AlphaEndpointMismatch { edge: e.id.clone() });
            continue;
        }
        edges.push(CoreEdge { name: e.id.clone(), label, src, rng });
    }
    if !report.is_empty() {
        return Err(RepReport(report));
    }

    let n = names.len();
    let mut ins: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k]; n];
    let mut out_edge: Vec<HashMap<EdgeId, usize>> = vec![HashMap::new(); n];
    for (i, e) in edges.iter().enumerate() {
        ins[e.rng.0][g.color(e.label)].push(i);
        if out_edge[e.src.0].insert(e.label, i).is_some() {
            report.push(RepViolation::DuplicateOutLabel {
                vertex: names[e.src.0].clone(),
                label: g.edge_name(e.label).to_string(),
            });
        }
    }
    for (v, per) in ins.iter().enumerate() {
        for (c, l) in per.iter().enumerate() {
            match l.len() {
                0 => report.push(RepViolation::MissingInEdge { vertex: names[v].clone(), color: c + 1 }),
                1 => {}
                _ => report.push(RepViolation::DuplicateInEdge { vertex: names[v].clone(), color: c + 1 }),
            }
        }
    }
    if !report.is_empty() {
        return Err(RepReport(report));
    }
    let in_edge: Vec<Vec<usize>> = ins.into_iter().map(|per| per.into_iter().map(|l| l[0]).collect()).collect();

    for v in 0..n {
        for i in 0..k {
            for j in (i + 1)..k {
                // Last edge of colour i, preceded by colour j; and the other way round.
                let ei = &edges[in_edge[v][i]];
                let eji = &edges[in_edge[ei.src.0][j]];
                let ej = &edges[in_edge[v][j]];
                let eij = &edges[in_edge[ej.src.0][i]];
                let same_source = eji.src == eij.src;
                let same_path = g.swap(eji.label, ei.label) == Some((eij.label, ej.label));
                if !(same_source && same_path) {
                    report.push(RepViolation::SquareIncompatible {
                        vertex: names[v].clone(),
                        first: i + 1,
                        second: j + 1,
                    });
                }
            }
        }
    }
    if !report.is_empty() {
        return Err(RepReport(report));
    }
    Ok(RepKGraph { base, names, alpha, edges, index, in_edge, out_edge })
}

/// Blocks of core vertices. Blocks are sorted, and ordered by least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPartition {
    blocks: Vec<Vec<CoreId>>,
    block_of: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("vertex {0} is listed twice")]
    Repeated(usize),
    #[error("vertex {0} is not listed")]
    Missing(usize),
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("empty block")]
    EmptyBlock,
}

impl VertexPartition {
    pub fn new(n: usize, blocks: Vec<Vec<CoreId>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for v in b {
                if v.0 >= n {
                    return Err(PartitionError::OutOfRange(v.0));
                }
                if std::mem::replace(&mut seen[v.0], true) {
                    return Err(PartitionError::Repeated(v.0));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(PartitionError::Missing(v));
        }
        Ok(Self::from_labels(
            &(0..n).map(|v| blocks.iter().position(|b| b.contains(&CoreId(v))).unwrap()).collect::<Vec<_>>(),
        ))
    }

    /// Builds the partition whose blocks are the fibres of `labels`.
    pub fn from_labels<T: Ord + Clone>(labels: &[T]) -> Self {
        let mut by_label: BTreeMap<T, Vec<CoreId>> = BTreeMap::new();
        for (v, l) in labels.iter().enumerate() {
            by_label.entry(l.clone()).or_default().push(CoreId(v));
        }
        let mut blocks: Vec<Vec<CoreId>> = by_label.into_values().collect();
        blocks.sort();
        let mut block_of = vec![0; labels.len()];
        for (b, members) in blocks.iter().enumerate() {
            for v in members {
                block_of[v.0] = b;
            }
        }
        VertexPartition { blocks, block_of }
    }

    pub fn equality(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn blocks(&self) -> &[Vec<CoreId>] {
        &self.blocks
    }

    pub fn block_of(&self, v: CoreId) -> usize {
        self.block_of[v.0]
    }

    pub fn same_block(&self, u: CoreId, v: CoreId) -> bool {
        self.block_of[u.0] == self.block_of[v.0]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn is_finer_than(&self, other: &VertexPartition) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| other.same_block(*v, b[0])))
    }
}

/// One state of a minimized backward automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BackwardState {
    pub alpha: VertexId,
    /// Per colour: label of the in-edge and the state it comes from.
    pub ins: Vec<(EdgeId, usize)>,
}

/// The minimal deterministic backward automaton of a vertex, with states
/// numbered in breadth-first order from the vertex (state 0). Two vertices
/// have equal words exactly when their backward label data agree forever.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BackwardWord {
    pub states: Vec<BackwardState>,
}

impl BackwardWord {
    /// For one colour: the labels read backward from state 0, split into a
    /// preperiod and a period.
    pub fn lasso(&self, color: usize) -> (Vec<EdgeId>, Vec<EdgeId>) {
        let mut order = Vec::new();
        let mut at = 0;
        let mut pos = HashMap::new();
        while !pos.contains_key(&at) {
            pos.insert(at, order.len());
            let (label, next) = self.states[at].ins[color];
            order.push(label);
            at = next;
        }
        let start = pos[&at];
        (order[..start].to_vec(), order[start..].to_vec())
    }
}

/// Coarsest partition of a backward system compatible with labels and in-sources.
fn refine(nodes: &[BackwardState]) -> Vec<usize> {
    let mut block: Vec<usize> = intern(nodes.iter().map(|n| (n.alpha, n.ins.iter().map(|p| p.0).collect::<Vec<_>>())));
    let mut count = distinct(&block);
    loop {
        let next = intern(
            nodes.iter().enumerate().map(|(i, n)| (block[i], n.ins.iter().map(|p| block[p.1]).collect::<Vec<_>>())),
        );
        let c = distinct(&next);
        block = next;
        if c == count {
            return block;
        }
        count = c;
    }
}

fn intern<T: Ord>(keys: impl Iterator<Item = T>) -> Vec<usize> {
    let mut ids = BTreeMap::new();
    keys.map(|key| {
        let n = ids.len();
        *ids.entry(key).or_insert(n)
    })
    .collect()
}

fn distinct(v: &[usize]) -> usize {
    v.iter().collect::<HashSet<_>>().len()
}

fn minimized_word(nodes: &[BackwardState], blocks: &[usize], start: usize) -> BackwardWord {
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        rep.entry(*b).or_insert(i);
    }
    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![blocks[start]];
    number.insert(blocks[start], 0);
    let mut states = Vec::new();
    let mut at = 0;
    while at < order.len() {
        let node = &nodes[rep[&order[at]]];
        let ins = node
            .ins
            .iter()
            .map(|&(label, src)| {
                let b = blocks[src];
                let id = *number.entry(b).or_insert_with(|| {
                    order.push(b);
                    order.len() - 1
                });
                (label, id)
            })
            .collect();
        states.push(BackwardState { alpha: node.alpha, ins });
        at += 1;
    }
    BackwardWord { states }
}

/// Why a partition is not admissible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissibilityWitness {
    #[error("`{u}` and `{v}` are merged but have different walk languages")]
    NotFinerThanSim { u: String, v: String },
    #[error("`{u}` and `{v}` are merged but their colour-{color} in-edges have different labels")]
    InLabel { u: String, v: String, color: usize },
    #[error("`{u}` and `{v}` are merged but their colour-{color} in-edges come from different blocks")]
    InSource { u: String, v: String, color: usize },
    #[error("`{u}` and `{v}` are merged but their `{label}` out-edges end in different blocks")]
    ForwardSplit { u: String, v: String, label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("partition is not admissible: {0}")]
    NotAdmissible(AdmissibilityWitness),
    #[error("quotient failed validation: {0}")]
    Invalid(RepReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismFailure {
    #[error("the vertex map has {given} entries for {expected} core vertices")]
    WrongSize { given: usize, expected: usize },
    #[error("the vertex map does not commute with the labellings at `{vertex}`")]
    DiagramFails { vertex: String },
    #[error("edge `{edge}` has no image")]
    NotFunctorial { edge: String },
    #[error("not locally bijective at `{vertex}`: {detail}")]
    NotLocallyBijective { vertex: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the representation graphs have different bases")]
pub struct DifferentBase;

type CanonicalVertex = (VertexId, Vec<(EdgeId, usize)>, Vec<(EdgeId, usize)>);

/// A description of a rep graph that is equal for isomorphic graphs over the same base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    vertices: Vec<CanonicalVertex>,
}

impl RepKGraph {
    pub fn base(&self) -> &KGraph {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<KGraph> {
        &self.base
    }

    pub fn core_len(&self) -> usize {
        self.names.len()
    }

    pub fn core(&self) -> impl Iterator<Item = CoreId> + '_ {
        (0..self.names.len()).map(CoreId)
    }

    pub fn core_edges(&self) -> &[CoreEdge] {
        &self.edges
    }

    pub fn name(&self, c: CoreId) -> &str {
        &self.names[c.0]
    }

    pub fn core_id(&self, name: &str) -> Option<CoreId> {
        self.index.get(name).copied()
    }

    pub fn core_alpha(&self, c: CoreId) -> VertexId {
        self.alpha[c.0]
    }

    pub fn in_edge(&self, c: CoreId, color: usize) -> &CoreEdge {
        &self.edges[self.in_edge[c.0][color]]
    }

    pub fn out_edge(&self, c: CoreId, label: EdgeId) -> Option<&CoreEdge> {
        self.out_edge[c.0].get(&label).map(|&i| &self.edges[i])
    }

    /// Core out-edges of `c`, sorted by label.
    pub fn out_edges(&self, c: CoreId) -> Vec<&CoreEdge> {
        let mut out: Vec<&CoreEdge> = self.out_edge[c.0].values().map(|&i| &self.edges[i]).collect();
        out.sort_by_key(|e| e.label);
        out
    }

    pub fn alpha(&self, u: &VertexAddr) -> VertexId {
        match u {
            VertexAddr::Core(c) => self.alpha[c.0],
            VertexAddr::Implicit { path, .. } => path.range(),
        }
    }

    /// The address reached from core vertex `c` along `path`, in reduced form.
    pub fn reduce(&self, mut c: CoreId, mut path: PathNF) -> VertexAddr {
        let g = &*self.base;
        'outer: loop {
            if path.is_empty() {
                return VertexAddr::Core(c);
            }
            for color in 0..g.k() {
                if path.degree().get(color) == 0 {
                    continue;
                }
                let (rest, first) = g.factorize(&path, &Degree::unit(g.k(), color)).expect("colour present");
                if let Some(e) = self.out_edge(c, first.edges()[0]) {
                    c = e.rng;
                    path = rest;
                    continue 'outer;
                }
            }
            return VertexAddr::Implicit { anchor: c, path };
        }
    }

    /// Range of the lift of `lambda` at `u`, or `None` when `s(lambda) ≠ α(u)`.
    pub fn step_forward(&self, u: &VertexAddr, lambda: &PathNF) -> Option<VertexAddr> {
        if lambda.source() != self.alpha(u) {
            return None;
        }
        match u {
            VertexAddr::Core(c) => Some(self.reduce(*c, lambda.clone())),
            VertexAddr::Implicit { anchor, path } => {
                let joined = self.base.compose(lambda, path).expect("composable by construction");
                Some(self.reduce(*anchor, joined))
            }
        }
    }

    /// Source and label of the unique colour-`color` in-edge of `u`.
    pub fn step_backward(&self, u: &VertexAddr, color: usize) -> (VertexAddr, EdgeId) {
        let g = &*self.base;
        let z = Degree::unit(g.k(), color);
        match u {
            VertexAddr::Core(c) => {
                let e = self.in_edge(*c, color);
                (VertexAddr::Core(e.src), e.label)
            }
            VertexAddr::Implicit { anchor, path } => {
                if path.degree().get(color) > 0 {
                    let cut = path.degree().checked_sub(&z).expect("colour present");
                    let (last, rest) = g.factorize(path, &cut).expect("degree in range");
                    (self.reduce(*anchor, rest), last.edges()[0])
                } else {
                    let kappa = self.in_edge(*anchor, color);
                    let longer = g.compose(path, &g.edge_path(kappa.label)).expect("composable");
                    let (last, rest) = g.factorize(&longer, path.degree()).expect("degree in range");
                    (self.reduce(kappa.src, rest), last.edges()[0])
                }
            }
        }
    }

    /// The unique in-path of core vertex `c` of degree `m`, with its core source.
    pub fn core_in_path(&self, c: CoreId, m: &Degree) -> (CoreId, PathNF) {
        let mut at = c;
        let mut rev = Vec::new();
        for color in 0..self.base.k() {
            for _ in 0..m.get(color) {
                let e = self.in_edge(at, color);
                rev.push(e.label);
                at = e.src;
            }
        }
        rev.reverse();
        let path = self.base.normalize(self.alpha[at.0], &rev).expect("core in-path is composable");
        (at, path)
    }

    /// In-path of degree `n` as (core source, path) when `n` dominates the address degree.
    fn in_path_at(&self, u: &VertexAddr, n: &Degree) -> (CoreId, PathNF) {
        match u {
            VertexAddr::Core(c) => self.core_in_path(*c, n),
            VertexAddr::Implicit { anchor, path } => {
                let extra = n.checked_sub(path.degree()).expect("degree dominates");
                let (src, tail) = self.core_in_path(*anchor, &extra);
                (src, self.base.compose(path, &tail).expect("composable"))
            }
        }
    }

    pub fn same_vertex(&self, a: &VertexAddr, b: &VertexAddr) -> bool {
        match (a, b) {
            (VertexAddr::Core(x), VertexAddr::Core(y)) => x == y,
            (VertexAddr::Implicit { path: p, .. }, VertexAddr::Implicit { path: q, .. }) => {
                if p.range() != q.range() {
                    return false;
                }
                let n = p.degree().join(q.degree());
                self.in_path_at(a, &n) == self.in_path_at(b, &n)
            }
            _ => false,
        }
    }

    /// Parses `B` or `B:e1.f1` (labels in application order).
    pub fn parse_addr(&self, text: &str) -> Result<VertexAddr, AddrError> {
        let t = text.trim();
        let (anchor, labels) = match t.split_once(':') {
            Some((a, l)) => (a.trim(), Some(l)),
            None => (t, None),
        };
        let c = self.core_id(anchor).ok_or_else(|| AddrError::UnknownVertex(anchor.to_string()))?;
        let Some(labels) = labels else { return Ok(VertexAddr::Core(c)) };
        let edges = labels
            .split('.')
            .map(|l| self.base.edge_by_name(l.trim()).map_err(|_| AddrError::UnknownEdge(l.trim().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let path = self.base.normalize(self.alpha[c.0], &edges).map_err(|_| AddrError::NotAPath(t.to_string()))?;
        Ok(self.reduce(c, path))
    }

    pub fn addr_to_string(&self, u: &VertexAddr) -> String {
        match u {
            VertexAddr::Core(c) => self.names[c.0].clone(),
            VertexAddr::Implicit { anchor, path } => {
                let labels: Vec<&str> = path.edges().iter().map(|&e| self.base.edge_name(e)).collect();
                format!("{}:{}", self.names[anchor.0], labels.join("."))
            }
        }
    }

    fn core_nodes(&self) -> Vec<BackwardState> {
        self.core()
            .map(|c| BackwardState {
                alpha: self.alpha[c.0],
                ins: (0..self.base.k()).map(|i| (self.in_edge(c, i).label, self.in_edge(c, i).src.0)).collect(),
            })
            .collect()
    }

    /// The walk-language equivalence ∼ on core vertices.
    pub fn sim_relation(&self) -> VertexPartition {
        VertexPartition::from_labels(&refine(&self.core_nodes()))
    }

    /// Minimal backward automaton of any address.
    pub fn backward_word(&self, u: &VertexAddr) -> BackwardWord {
        let mut nodes = self.core_nodes();
        let start = match u {
            VertexAddr::Core(c) => c.0,
            VertexAddr::Implicit { .. } => {
                let mut found: Vec<VertexAddr> = vec![u.clone()];
                let base = nodes.len();
                nodes.push(BackwardState { alpha: self.alpha(u), ins: Vec::new() });
                let mut at = 0;
                while at < found.len() {
                    let here = found[at].clone();
                    let mut ins = Vec::new();
                    for color in 0..self.base.k() {
                        let (src, label) = self.step_backward(&here, color);
                        let idx = match &src {
                            VertexAddr::Core(c) => c.0,
                            implicit => match found.iter().position(|f| self.same_vertex(f, implicit)) {
                                Some(p) => base + p,
                                None => {
                                    found.push(implicit.clone());
                                    nodes.push(BackwardState { alpha: self.alpha(implicit), ins: Vec::new() });
                                    nodes.len() - 1
                                }
                            },
                        };
                        ins.push((label, idx));
                    }
                    nodes[base + at].ins = ins;
                    at += 1;
                }
                base
            }
        };
        minimized_word(&nodes, &refine(&nodes), start)
    }

    pub fn is_irreducible(&self) -> bool {
        self.sim_relation().is_discrete()
    }

    /// Checks the admissibility conditions; `Err` carries a violating pair.
    pub fn is_admissible(&self, p: &VertexPartition) -> Result<(), AdmissibilityWitness> {
        let sim = self.sim_relation();
        let name = |c: CoreId| self.names[c.0].clone();
        for block in p.blocks() {
            let u = block[0];
            for &v in &block[1..] {
                if !sim.same_block(u, v) {
                    return Err(AdmissibilityWitness::NotFinerThanSim { u: name(u), v: name(v) });
                }
                for color in 0..self.base.k() {
                    let (eu, ev) = (self.in_edge(u, color), self.in_edge(v, color));
                    if eu.label != ev.label {
                        return Err(AdmissibilityWitness::InLabel { u: name(u), v: name(v), color: color + 1 });
                    }
                    if !p.same_block(eu.src, ev.src) {
                        return Err(AdmissibilityWitness::InSource { u: name(u), v: name(v), color: color + 1 });
                    }
                }
                for eu in self.out_edges(u) {
                    if let Some(ev) = self.out_edge(v, eu.label) {
                        if !p.same_block(eu.rng, ev.rng) {
                            return Err(AdmissibilityWitness::ForwardSplit {
                                u: name(u),
                                v: name(v),
                                label: self.base.edge_name(eu.label).to_string(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The quotient by an admissible partition. Block `i` becomes core vertex `i`.
    pub fn quotient(&self, p: &VertexPartition) -> Result<RepKGraph, QuotientError> {
        self.is_admissible(p).map_err(QuotientError::NotAdmissible)?;
        let block_name = |b: &[CoreId]| b.iter().map(|c| self.names[c.0].as_str()).collect::<Vec<_>>().join("+");
        let core_vertices = p
            .blocks()
            .iter()
            .map(|b| RawCoreVertex { id: block_name(b), alpha: self.base.vertex_name(self.alpha[b[0].0]).to_string() })
            .collect();
        let mut merged: BTreeMap<(usize, EdgeId), (usize, Vec<&str>)> = BTreeMap::new();
        for e in &self.edges {
            let entry = merged.entry((p.block_of(e.src), e.label)).or_insert((p.block_of(e.rng), Vec::new()));
            entry.1.push(&e.name);
        }
        let core_edges = merged
            .into_iter()
            .map(|((src, label), (rng, names))| RawCoreEdge {
                id: names.join("+"),
                alpha_edge: self.base.edge_name(label).to_string(),
                color: None,
                src: block_name(&p.blocks()[src]),
                rng: block_name(&p.blocks()[rng]),
            })
            .collect();
        validate_rep(self.base.clone(), &RawRep { core_vertices, core_edges }).map_err(QuotientError::Invalid)
    }

    /// The canonical map onto the quotient by `p`.
    pub fn quotient_map(&self, p: &VertexPartition) -> Vec<CoreId> {
        self.core().map(|c| CoreId(p.block_of(c))).collect()
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let words: Vec<(VertexId, BackwardWord)> =
            self.core().map(|c| (self.alpha[c.0], self.backward_word(&VertexAddr::Core(c)))).collect();
        let least = words.iter().min().expect("nonempty core").clone();
        self.core().filter(|c| words[c.0] == least).map(|start| self.canonical_from(start)).min().expect("some start")
    }

    fn canonical_from(&self, start: CoreId) -> CanonicalForm {
        let n = self.core_len();
        let mut number: Vec<Option<usize>> = vec![None; n];
        let mut order: Vec<CoreId> = Vec::new();
        let mut vertices = Vec::new();
        let mut next_root = Some(start);
        while let Some(root) = next_root {
            number[root.0] = Some(order.len());
            order.push(root);
            let mut at = order.len() - 1;
            while at < order.len() {
                let c = order[at];
                let mut visit = |x: CoreId, order: &mut Vec<CoreId>| -> usize {
                    *number[x.0].get_or_insert_with(|| {
                        order.push(x);
                        order.len() - 1
                    })
                };
                let ins = (0..self.base.k())
                    .map(|i| self.in_edge(c, i))
                    .map(|e| (e.label, visit(e.src, &mut order)))
                    .collect();
                let outs = self.out_edges(c).into_iter().map(|e| (e.label, visit(e.rng, &mut order))).collect();
                vertices.push((self.alpha[c.0], ins, outs));
                at += 1;
            }
            next_root = self.core().find(|c| number[c.0].is_none());
        }
        CanonicalForm { vertices }
    }

    pub fn is_isomorphic(&self, other: &RepKGraph) -> bool {
        self.base == other.base && self.canonical_form() == other.canonical_form()
    }

    /// Image of an address under a core vertex map into `target`.
    pub fn map_addr(&self, target: &RepKGraph, map: &[CoreId], u: &VertexAddr) -> Option<VertexAddr> {
        match u {
            VertexAddr::Core(c) => Some(VertexAddr::Core(map[c.0])),
            VertexAddr::Implicit { anchor, path } => target.step_forward(&VertexAddr::Core(map[anchor.0]), path),
        }
    }

    /// Checks that `map` (core of `self` to core of `target`) induces a morphism.
    pub fn check_morphism(&self, target: &RepKGraph, map: &[CoreId]) -> Result<(), MorphismFailure> {
        if map.len() != self.core_len() || map.iter().any(|c| c.0 >= target.core_len()) {
            return Err(MorphismFailure::WrongSize { given: map.len(), expected: self.core_len() });
        }
        for c in self.core() {
            if target.alpha[map[c.0].0] != self.alpha[c.0] {
                return Err(MorphismFailure::DiagramFails { vertex: self.names[c.0].clone() });
            }
        }
        for e in &self.edges {
            match target.out_edge(map[e.src.0], e.label) {
                Some(img) if img.rng == map[e.rng.0] => {}
                _ => return Err(MorphismFailure::NotFunctorial { edge: e.name.clone() }),
            }
        }
        Ok(())
    }

    /// A morphism that is locally bijective on in- and out-edges at every core vertex.
    pub fn check_covering(&self, target: &RepKGraph, map: &[CoreId]) -> Result<(), MorphismFailure> {
        self.check_morphism(target, map)?;
        let g = &*self.base;
        for c in self.core() {
            let here = VertexAddr::Core(c);
            let image = VertexAddr::Core(map[c.0]);
            let fail =
                |detail: String| MorphismFailure::NotLocallyBijective { vertex: self.names[c.0].clone(), detail };
            for color in 0..g.k() {
                let (src, label) = self.step_backward(&here, color);
                let (img_src, img_label) = target.step_backward(&image, color);
                let mapped = self.map_addr(target, map, &src).expect("labels agree");
                if label != img_label || !target.same_vertex(&mapped, &img_src) {
                    return Err(fail(format!("colour-{} in-edge", color + 1)));
                }
            }
            let mut images = Vec::new();
            for lambda in (0..g.k()).flat_map(|i| g.out_edges(self.alpha[c.0], i).iter().copied()) {
                let p = g.edge_path(lambda);
                let end = self.step_forward(&here, &p).expect("label leaves α(c)");
                let mapped = self.map_addr(target, map, &end).expect("labels agree");
                let direct = target.step_forward(&image, &p).expect("label leaves β(φ(c))");
                if !target.same_vertex(&mapped, &direct) {
                    return Err(fail(format!("out-edge `{}`", g.edge_name(lambda))));
                }
                images.push(lambda);
            }
            let distinct: HashSet<_> = images.iter().collect();
            if distinct.len() != images.len() {
                return Err(fail("out-edges collide".into()));
            }
        }
        Ok(())
    }

    /// Whether some core vertex of `self` and of `other` share a backward word.
    pub fn same_component(&self, other: &RepKGraph) -> Result<bool, DifferentBase> {
        if self.base != other.base {
            return Err(DifferentBase);
        }
        let mine: HashSet<BackwardWord> = self.core().map(|c| self.backward_word(&VertexAddr::Core(c))).collect();
        Ok(other.core().any(|c| mine.contains(&other.backward_word(&VertexAddr::Core(c)))))
    }
}

impl fmt::Display for VertexPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}
