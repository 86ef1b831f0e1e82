//! Fundamental groups of representation graph cores, universal-cover balls,
//! and annihilators of the cover module on finite balls.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::linalg;
use crate::repgraph::{CoreId, RepKGraph};
use crate::scalar::{Field, Scalar};
use crate::walks::{Letter, Walk};

/// Letters are `±(g + 1)` for generator `g`.
pub type Word = Vec<i32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FundError {
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(i64),
    #[error("the walk reaches past the ball radius {0}")]
    RadiusTooSmall(usize),
    #[error("the ball's word problem is not decided")]
    Undecided,
    #[error("the walk leaves the core at `{0}`")]
    LeavesCore(String),
    #[error("core vertex `{0}` has out-edges in the implicit completion")]
    OpenCore(String),
    #[error("the walk starts at `{0}`, not at the ball's base vertex")]
    WrongStart(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        GroupPresentation { generators, relators }
    }

    pub fn word_to_string(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&x| {
                let name = &self.generators[x.unsigned_abs() as usize - 1];
                if x > 0 {
                    name.clone()
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_to_string(r)).collect();
        write!(f, "<{} | {}>", self.generators.join(", "), rels.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupClass {
    Free(usize),
    FreeAbelian(usize),
    Unknown(GroupPresentation),
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupClass::Free(n) => write!(f, "Free({n})"),
            GroupClass::FreeAbelian(n) => write!(f, "FreeAbelian({n})"),
            GroupClass::Unknown(p) => write!(f, "Unknown({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Indecomposable(GroupClass),
    Unknown(GroupClass),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Indecomposable(c) => write!(f, "Indecomposable ({c})"),
            Verdict::Unknown(c) => write!(f, "Unknown: group algebra of {c} not known to lack idempotents"),
        }
    }
}

pub fn invert(w: &[i32]) -> Word {
    w.iter().rev().map(|x| -x).collect()
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

/// The least rotation of `w` or of its inverse.
fn cyclic_key(w: &[i32]) -> Word {
    let w = cyclic_reduce(w);
    let inv = invert(&w);
    let mut best = w.clone();
    for base in [&w, &inv] {
        for i in 0..base.len() {
            let rot: Word = base[i..].iter().chain(&base[..i]).copied().collect();
            if rot < best {
                best = rot;
            }
        }
    }
    best
}

fn substitute(w: &[i32], g: usize, repl: &[i32]) -> Word {
    let mut out = Vec::new();
    for &x in w {
        if x.unsigned_abs() as usize == g + 1 {
            if x > 0 {
                out.extend_from_slice(repl);
            } else {
                out.extend(invert(repl));
            }
        } else {
            out.push(x);
        }
    }
    free_reduce(&out)
}

fn tidy(rels: Vec<Word>) -> Vec<Word> {
    let mut seen = BTreeSet::new();
    rels.into_iter().map(|r| cyclic_reduce(&r)).filter(|r| !r.is_empty() && seen.insert(cyclic_key(r))).collect()
}

/// Tietze-simplified presentation plus each original generator written over
/// the surviving ones.
#[derive(Debug, Clone)]
struct Simplified {
    presentation: GroupPresentation,
    subst: Vec<Word>,
}

fn simplify(p: &GroupPresentation) -> Simplified {
    let n = p.generators.len();
    let mut subst: Vec<Word> = (0..n).map(|g| vec![g as i32 + 1]).collect();
    let mut alive = vec![true; n];
    let mut rels = tidy(p.relators.clone());
    loop {
        let found = rels.iter().enumerate().find_map(|(ri, r)| {
            r.iter().position(|x| r.iter().filter(|y| y.abs() == x.abs()).count() == 1).map(|pos| (ri, pos))
        });
        let Some((ri, pos)) = found else { break };
        let r = rels.remove(ri);
        let rot: Word = r[pos..].iter().chain(&r[..pos]).copied().collect();
        let g = rot[0].unsigned_abs() as usize - 1;
        let rest = &rot[1..];
        let repl = if rot[0] > 0 { invert(rest) } else { rest.to_vec() };
        rels = tidy(rels.iter().map(|w| substitute(w, g, &repl)).collect());
        for s in subst.iter_mut() {
            *s = substitute(s, g, &repl);
        }
        alive[g] = false;
    }
    let mut renumber = vec![0i32; n];
    let mut generators = Vec::new();
    for g in 0..n {
        if alive[g] {
            generators.push(p.generators[g].clone());
            renumber[g] = generators.len() as i32;
        }
    }
    let rename =
        |w: &Word| -> Word { w.iter().map(|&x| x.signum() * renumber[x.unsigned_abs() as usize - 1]).collect() };
    Simplified {
        presentation: GroupPresentation { generators, relators: rels.iter().map(rename).collect() },
        subst: subst.iter().map(rename).collect(),
    }
}

fn classify_simplified(s: &Simplified) -> GroupClass {
    let p = &s.presentation;
    let n = p.generators.len();
    if p.relators.is_empty() {
        return GroupClass::Free(n);
    }
    let have: BTreeSet<Word> = p.relators.iter().map(|r| cyclic_key(r)).collect();
    let mut want = BTreeSet::new();
    for i in 1..=n as i32 {
        for j in i + 1..=n as i32 {
            want.insert(cyclic_key(&[i, j, -i, -j]));
        }
    }
    if have == want {
        GroupClass::FreeAbelian(n)
    } else {
        GroupClass::Unknown(p.clone())
    }
}

/// Free when no relators survive Tietze simplification, free abelian when
/// exactly the pairwise commutators do.
pub fn classify_group(p: &GroupPresentation) -> GroupClass {
    classify_simplified(&simplify(p))
}

/// π of the core component of `y`, with one generator per non-tree core edge.
#[derive(Debug, Clone)]
pub struct FundamentalGroup {
    base: CoreId,
    presentation: GroupPresentation,
    /// Generator word of each core edge; empty for tree edges and edges outside the component.
    edge_word: Vec<Word>,
    in_component: Vec<bool>,
}

impl FundamentalGroup {
    pub fn base(&self) -> CoreId {
        self.base
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn classify(&self) -> GroupClass {
        classify_group(&self.presentation)
    }

    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.in_component[edge] && self.edge_word[edge].is_empty()
    }
}

pub fn presentation(d: &RepKGraph, y: CoreId) -> FundamentalGroup {
    let edges = d.core_edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); d.core_len()];
    for (i, e) in edges.iter().enumerate() {
        incident[e.src.0].push(i);
        if e.rng != e.src {
            incident[e.rng.0].push(i);
        }
    }
    let mut seen = vec![false; d.core_len()];
    let mut tree = vec![false; edges.len()];
    let mut queue = VecDeque::from([y]);
    seen[y.0] = true;
    while let Some(v) = queue.pop_front() {
        for &i in &incident[v.0] {
            let other = if edges[i].src == v { edges[i].rng } else { edges[i].src };
            if !seen[other.0] {
                seen[other.0] = true;
                tree[i] = true;
                queue.push_back(other);
            }
        }
    }
    let in_component: Vec<bool> = edges.iter().map(|e| seen[e.src.0]).collect();
    let mut generators = Vec::new();
    let mut edge_word = vec![Vec::new(); edges.len()];
    for (i, e) in edges.iter().enumerate() {
        if in_component[i] && !tree[i] {
            generators.push(e.name.clone());
            edge_word[i] = vec![generators.len() as i32];
        }
    }
    let index: HashMap<&str, usize> = edges.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
    let in_idx = |v: CoreId, c: usize| index[d.in_edge(v, c).name.as_str()];
    let k = d.base().k();
    let mut relators = Vec::new();
    for v in d.core().filter(|v| seen[v.0]) {
        for i in 0..k {
            for j in i + 1..k {
                // Two factorizations of the unique in-path of degree z_i + z_j.
                let last_i = in_idx(v, i);
                let first_j = in_idx(edges[last_i].src, j);
                let last_j = in_idx(v, j);
                let first_i = in_idx(edges[last_j].src, i);
                debug_assert_eq!(edges[first_j].src, edges[first_i].src);
                let mut r = Vec::new();
                r.extend(&edge_word[first_j]);
                r.extend(&edge_word[last_i]);
                r.extend(invert(&edge_word[last_j]));
                r.extend(invert(&edge_word[first_i]));
                relators.push(r);
            }
        }
    }
    FundamentalGroup { base: y, presentation: GroupPresentation { generators, relators }, edge_word, in_component }
}

/// Classifies π of the irreducible quotient of `d`'s component.
pub fn indecomposability_verdict(d: &RepKGraph) -> Verdict {
    let q = d.quotient(&d.sim_relation()).expect("the walk-language relation is admissible");
    match presentation(&q, CoreId(0)).classify() {
        c @ (GroupClass::Free(_) | GroupClass::FreeAbelian(_)) => Verdict::Indecomposable(c),
        c => Verdict::Unknown(c),
    }
}

/// Normal forms for group elements, exact unless the class is unknown.
#[derive(Debug, Clone)]
struct Solver {
    subst: Vec<Word>,
    abelian: Option<usize>,
    exact: bool,
}

impl Solver {
    fn new(p: &GroupPresentation) -> Self {
        let s = simplify(p);
        let (abelian, exact) = match classify_simplified(&s) {
            GroupClass::Free(_) => (None, true),
            GroupClass::FreeAbelian(n) => (Some(n), true),
            GroupClass::Unknown(_) => (None, false),
        };
        Solver { subst: s.subst, abelian, exact }
    }

    /// The normal form of `nf · w`, where `nf` is already normal and `w` uses the original generators.
    fn step(&self, nf: &[i32], w: &[i32]) -> Word {
        let mut out = nf.to_vec();
        for &x in w {
            let s = &self.subst[x.unsigned_abs() as usize - 1];
            if x > 0 {
                out.extend_from_slice(s);
            } else {
                out.extend(invert(s));
            }
        }
        match self.abelian {
            None => free_reduce(&out),
            Some(n) => {
                let mut exp = vec![0i32; n];
                for x in out {
                    exp[x.unsigned_abs() as usize - 1] += x.signum();
                }
                let mut nf = Vec::new();
                for (g, e) in exp.iter().enumerate() {
                    let letter = if *e > 0 { g as i32 + 1 } else { -(g as i32 + 1) };
                    nf.extend(std::iter::repeat_n(letter, e.unsigned_abs() as usize));
                }
                nf
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallNode {
    pub vertex: CoreId,
    /// Normal form of the walk class from the base point.
    pub element: Word,
    pub dist: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallEdge {
    pub src: usize,
    pub rng: usize,
    /// Index into the core edge list.
    pub edge: usize,
}

/// The radius-`R` ball around a lift of `y` in the universal cover of `y`'s core component.
#[derive(Debug, Clone)]
pub struct CoverBall {
    group: FundamentalGroup,
    solver: Solver,
    radius: usize,
    nodes: Vec<BallNode>,
    edges: Vec<BallEdge>,
    index: HashMap<(CoreId, Word), usize>,
}

pub fn universal_cover_ball(d: &RepKGraph, y: CoreId, radius: i64) -> Result<CoverBall, FundError> {
    if radius < 0 {
        return Err(FundError::NegativeRadius(radius));
    }
    let radius = radius as usize;
    let group = presentation(d, y);
    let solver = Solver::new(&group.presentation);
    let core_edges = d.core_edges();
    let mut nodes = vec![BallNode { vertex: y, element: Vec::new(), dist: 0 }];
    let mut index = HashMap::from([((y, Vec::new()), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if nodes[i].dist == radius {
            continue;
        }
        let (v, elem, dist) = (nodes[i].vertex, nodes[i].element.clone(), nodes[i].dist);
        for (ei, e) in core_edges.iter().enumerate() {
            let mut steps = Vec::new();
            if e.src == v {
                steps.push((e.rng, group.edge_word[ei].clone()));
            }
            if e.rng == v {
                steps.push((e.src, invert(&group.edge_word[ei])));
            }
            for (w, letters) in steps {
                let key = (w, solver.step(&elem, &letters));
                if !index.contains_key(&key) {
                    index.insert(key.clone(), nodes.len());
                    queue.push_back(nodes.len());
                    nodes.push(BallNode { vertex: w, element: key.1, dist: dist + 1 });
                }
            }
        }
    }
    let mut edges = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        for (ei, e) in core_edges.iter().enumerate().filter(|(_, e)| e.src == n.vertex) {
            if let Some(&j) = index.get(&(e.rng, solver.step(&n.element, &group.edge_word[ei]))) {
                edges.push(BallEdge { src: i, rng: j, edge: ei });
            }
        }
    }
    Ok(CoverBall { group, solver, radius, nodes, edges, index })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FClass {
    Equal,
    Distinct,
    Undecided,
}

impl CoverBall {
    pub fn base(&self) -> CoreId {
        self.group.base
    }

    pub fn group(&self) -> &FundamentalGroup {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[BallEdge] {
        &self.edges
    }

    /// Whether node equality is exact.
    pub fn decided(&self) -> bool {
        self.solver.exact
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.nodes[node].dist == self.radius
    }

    /// Nodes lying over the base vertex.
    pub fn fiber(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].vertex == self.group.base).collect()
    }

    pub fn node_label(&self, d: &RepKGraph, node: usize) -> String {
        let n = &self.nodes[node];
        format!("{}[{}]", d.name(n.vertex), self.element_string(&n.element))
    }

    pub fn element_string(&self, w: &[i32]) -> String {
        let s = simplify(&self.group.presentation);
        s.presentation.word_to_string(w)
    }

    /// The endpoint of the lift of `w` from `node`, or `None` when `w` does not lift.
    pub fn lift(&self, d: &RepKGraph, node: usize, w: &Walk) -> Result<Option<usize>, FundError> {
        let g = d.base();
        let start = &self.nodes[node];
        if w.start() != d.core_alpha(start.vertex) {
            return Err(FundError::WrongStart(g.vertex_name(w.start()).into()));
        }
        let length: usize = w.letters().iter().map(|l| l.path.len()).sum();
        if start.dist + length > self.radius {
            return Err(FundError::RadiusTooSmall(self.radius));
        }
        let (mut v, mut word) = (start.vertex, Vec::new());
        for letter in w.letters() {
            let steps: Vec<_> = if letter.star {
                letter.path.edges().iter().rev().collect()
            } else {
                letter.path.edges().iter().collect()
            };
            for &e in steps {
                if letter.star {
                    let ce = d.in_edge(v, g.color(e));
                    if ce.label != e {
                        return Ok(None);
                    }
                    word.extend(invert(&self.group.edge_word[self.edge_index(d, &ce.name)]));
                    v = ce.src;
                } else {
                    let ce = d.out_edge(v, e).ok_or_else(|| FundError::LeavesCore(d.name(v).into()))?;
                    word.extend(&self.group.edge_word[self.edge_index(d, &ce.name)]);
                    v = ce.rng;
                }
            }
        }
        let key = (v, self.solver.step(&start.element, &word));
        self.index.get(&key).copied().map(Some).ok_or(FundError::RadiusTooSmall(self.radius))
    }

    fn edge_index(&self, d: &RepKGraph, name: &str) -> usize {
        d.core_edges().iter().position(|e| e.name == name).expect("core edge")
    }
}

/// Compares the endpoints of the lifts of two loops from the ball's base point.
pub fn f_class(d: &RepKGraph, ball: &CoverBall, p: &Walk, q: &Walk) -> Result<FClass, FundError> {
    let a = ball.lift(d, 0, p)?;
    let b = ball.lift(d, 0, q)?;
    Ok(if a == b {
        FClass::Equal
    } else if ball.decided() {
        FClass::Distinct
    } else {
        FClass::Undecided
    })
}

/// A kernel basis for loop walks at the base vertex acting on one fiber point.
#[derive(Debug, Clone)]
pub struct Annihilator {
    pub field: Field,
    /// Core loop walks at the base vertex of length at most `L`, shortest first.
    pub walks: Vec<Walk>,
    /// Coefficient vectors over `walks`.
    pub basis: Vec<Vec<Scalar>>,
}

/// Loop walks at `y` staying in the core, as single-edge letters.
fn core_loops(d: &RepKGraph, y: CoreId, length: usize) -> Vec<Walk> {
    let g = d.base();
    let mut out = Vec::new();
    let mut frontier: Vec<(CoreId, Vec<Letter>)> = vec![(y, Vec::new())];
    for step in 0..=length {
        let mut next = Vec::new();
        for (v, letters) in &frontier {
            if *v == y {
                out.push(Walk::new(d.core_alpha(y), letters.clone()).expect("core walks chain"));
            }
            if step == length {
                continue;
            }
            for e in d.core_edges() {
                if e.src == *v {
                    let mut l = letters.clone();
                    l.push(Letter { path: g.edge_path(e.label), star: false });
                    next.push((e.rng, l));
                }
                if e.rng == *v {
                    let mut l = letters.clone();
                    l.push(Letter { path: g.edge_path(e.label), star: true });
                    next.push((e.src, l));
                }
            }
        }
        frontier = next;
    }
    out
}

/// The annihilator of the fiber point `node` inside the span of core loops of length `≤ length`.
pub fn annihilator_at(
    d: &RepKGraph,
    ball: &CoverBall,
    node: usize,
    length: usize,
    field: Field,
) -> Result<Annihilator, FundError> {
    if !ball.decided() {
        return Err(FundError::Undecided);
    }
    if ball.nodes[node].dist + length > ball.radius {
        return Err(FundError::RadiusTooSmall(ball.radius));
    }
    for v in d.core() {
        for e in d.base().edge_ids().filter(|&e| d.base().edge(e).src == d.core_alpha(v)) {
            if d.out_edge(v, e).is_none() {
                return Err(FundError::OpenCore(d.name(v).into()));
            }
        }
    }
    let walks = core_loops(d, ball.base(), length);
    let mut rows = vec![vec![field.zero(); walks.len()]; ball.nodes.len()];
    for (j, w) in walks.iter().enumerate() {
        let end = ball.lift(d, node, w)?.expect("core loops lift");
        rows[end][j] = field.one();
    }
    let basis = linalg::nullspace(&rows, walks.len(), field);
    Ok(Annihilator { field, walks, basis })
}

pub fn annihilator_ball(
    d: &RepKGraph,
    ball: &CoverBall,
    length: usize,
    field: Field,
) -> Result<Annihilator, FundError> {
    annihilator_at(d, ball, 0, length, field)
}

impl Annihilator {
    /// Whether both bases span the same subspace.
    pub fn same_span(&self, other: &Annihilator) -> bool {
        let r = linalg::rank(&self.basis);
        r == linalg::rank(&other.basis) && r == linalg::rank(&[self.basis.clone(), other.basis.clone()].concat())
    }

    /// For every basis element, coefficients summed over each f-class vanish.
    pub fn f_class_sums_vanish(&self, d: &RepKGraph, ball: &CoverBall) -> Result<bool, FundError> {
        let ends: Vec<usize> = self
            .walks
            .iter()
            .map(|w| ball.lift(d, 0, w).map(|e| e.expect("core loops lift")))
            .collect::<Result<_, _>>()?;
        Ok(self.basis.iter().all(|v| {
            let mut sums: HashMap<usize, Scalar> = HashMap::new();
            for (c, e) in v.iter().zip(&ends) {
                let s = sums.entry(*e).or_insert_with(|| self.field.zero());
                *s = &*s + c;
            }
            sums.values().all(Scalar::is_zero)
        }))
    }
}

/// Compares the annihilator at the base point with every other fiber point whose
/// radius-`length` neighbourhood fits in the ball.
pub fn base_point_independent(d: &RepKGraph, ball: &CoverBall, length: usize, field: Field) -> Result<bool, FundError> {
    let at_base = annihilator_ball(d, ball, length, field)?;
    for x in ball.fiber().into_iter().filter(|&x| x != 0 && ball.nodes[x].dist + length <= ball.radius) {
        if !annihilator_at(d, ball, x, length, field)?.same_span(&at_base) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::walks::parse_walk;

    fn pres(n: usize, rels: Vec<Word>) -> GroupPresentation {
        GroupPresentation::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect(), rels)
    }

    #[test]
    fn classification_shapes() {
        assert_eq!(classify_group(&pres(3, vec![])), GroupClass::Free(3));
        assert_eq!(classify_group(&pres(2, vec![vec![1, 2, -1, -2]])), GroupClass::FreeAbelian(2));
        assert_eq!(classify_group(&pres(2, vec![vec![-2, 1, 2, -1]])), GroupClass::FreeAbelian(2));
        assert!(matches!(classify_group(&pres(2, vec![vec![1, 2, 1, 2]])), GroupClass::Unknown(_)));
        // c = ab eliminates c and leaves a free group.
        assert_eq!(classify_group(&pres(3, vec![vec![3, -2, -1]])), GroupClass::Free(2));
        assert_eq!(classify_group(&pres(1, vec![vec![1, -1]])), GroupClass::Free(1));
    }

    #[test]
    fn presentations_of_fixtures() {
        let c = fixtures::two_cycle();
        let p = presentation(&c, CoreId(0));
        assert_eq!((p.presentation().generators.len(), p.presentation().relators.len()), (1, 0));

        let t = fixtures::triangle();
        let p = presentation(&t, CoreId(0));
        assert_eq!((p.presentation().generators.len(), p.presentation().relators.len()), (1, 0));

        let x = fixtures::torus_identity();
        let p = presentation(&x, CoreId(0));
        assert_eq!(p.presentation().generators.len(), 2);
        assert_eq!(p.presentation().relators.len(), 1);
        assert_eq!(p.classify(), GroupClass::FreeAbelian(2));

        let d = fixtures::two_by_two_pair();
        assert_eq!(presentation(&d, CoreId(0)).classify(), GroupClass::FreeAbelian(2));
    }

    #[test]
    fn one_graph_groups_are_free() {
        for (name, d) in fixtures::all_reps().into_iter().filter(|(_, d)| d.base().k() == 1) {
            let p = presentation(&d, CoreId(0));
            let rank = d.core_edges().len() + 1 - d.core_len();
            assert!(p.presentation().relators.is_empty(), "{name}");
            assert_eq!(p.presentation().generators.len(), rank, "{name}");
            assert!(matches!(indecomposability_verdict(&d), Verdict::Indecomposable(GroupClass::Free(_))), "{name}");
        }
    }

    #[test]
    fn verdicts() {
        let v = indecomposability_verdict(&fixtures::torus_identity());
        assert_eq!(v.to_string(), "Indecomposable (FreeAbelian(2))");
    }

    #[test]
    fn ball_sizes() {
        let c = fixtures::two_cycle();
        assert_eq!(universal_cover_ball(&c, CoreId(0), 0).unwrap().nodes().len(), 1);
        assert_eq!(universal_cover_ball(&c, CoreId(0), 2).unwrap().nodes().len(), 5);
        let b = universal_cover_ball(&c, CoreId(0), 4).unwrap();
        assert_eq!((b.nodes().len(), b.edges().len()), (9, 8));
        assert!(b.decided());

        let t = fixtures::torus_identity();
        assert_eq!(universal_cover_ball(&t, CoreId(0), 1).unwrap().nodes().len(), 5);
        assert_eq!(universal_cover_ball(&t, CoreId(0), 2).unwrap().nodes().len(), 13);
        assert_eq!(universal_cover_ball(&t, CoreId(0), -1).unwrap_err(), FundError::NegativeRadius(-1));
    }

    #[test]
    fn interior_nodes_are_locally_bijective() {
        for (name, d) in fixtures::all_reps() {
            let ball = universal_cover_ball(&d, CoreId(0), 3).unwrap();
            for (i, n) in ball.nodes().iter().enumerate().filter(|(_, n)| n.dist < ball.radius()) {
                for c in 0..d.base().k() {
                    let ins =
                        ball.edges().iter().filter(|e| e.rng == i && d.base().color(d.core_edges()[e.edge].label) == c);
                    assert_eq!(ins.count(), 1, "{name}");
                }
                let mut outs: Vec<usize> = ball.edges().iter().filter(|e| e.src == i).map(|e| e.edge).collect();
                outs.sort();
                let mut want: Vec<usize> =
                    (0..d.core_edges().len()).filter(|&e| d.core_edges()[e].src == n.vertex).collect();
                want.sort();
                assert_eq!(outs, want, "{name}");
            }
        }
    }

    #[test]
    fn f_classes() {
        let c = fixtures::two_cycle();
        let g = c.base();
        let ball = universal_cover_ball(&c, CoreId(0), 4).unwrap();
        let w = |s: &str| parse_walk(g, s).unwrap();
        assert_eq!(f_class(&c, &ball, &w("l l"), &w("l l")).unwrap(), FClass::Equal);
        assert_eq!(f_class(&c, &ball, &w("l l"), &w("1_v")).unwrap(), FClass::Distinct);
        assert_eq!(f_class(&c, &ball, &w("l l*"), &w("1_v")).unwrap(), FClass::Equal);
        assert_eq!(f_class(&c, &ball, &w("l l l l l"), &w("1_v")).unwrap_err(), FundError::RadiusTooSmall(4));

        let t = fixtures::torus_identity();
        let ball = universal_cover_ball(&t, CoreId(0), 2).unwrap();
        let w = |s: &str| parse_walk(t.base(), s).unwrap();
        let ef = Walk::letter(t.base().edge_path(t.base().edge_by_name("f").unwrap()), false)
            .then(&Walk::letter(t.base().edge_path(t.base().edge_by_name("e").unwrap()), false))
            .unwrap();
        assert_eq!(f_class(&t, &ball, &ef, &w("f e")).unwrap(), FClass::Equal);
        assert_eq!(f_class(&t, &ball, &w("e* f"), &w("f e*")).unwrap(), FClass::Equal);
        assert_eq!(f_class(&t, &ball, &w("e f*"), &w("f e*")).unwrap(), FClass::Distinct);
    }

    #[test]
    fn annihilators() {
        let q = Field::Rational;
        let c = fixtures::two_cycle();
        let ball = universal_cover_ball(&c, CoreId(0), 4).unwrap();
        let zero = annihilator_ball(&c, &ball, 0, q).unwrap();
        assert_eq!((zero.walks.len(), zero.basis.len()), (1, 0));

        let ann = annihilator_ball(&c, &ball, 2, q).unwrap();
        // Loops of length ≤ 2 at v1: the empty walk, two backtracks and the two windings.
        assert_eq!(ann.walks.len(), 5);
        assert_eq!(ann.basis.len(), 2);
        assert!(ann.f_class_sums_vanish(&c, &ball).unwrap());
        assert!(base_point_independent(&c, &ball, 2, q).unwrap());
        let backtrack = ann.walks.iter().position(|w| w.display(c.base()).to_string() == "l l*").unwrap();
        let mut v = vec![q.zero(); 5];
        v[0] = -q.one();
        v[backtrack] = q.one();
        let mut rows = ann.basis.clone();
        let r = linalg::rank(&rows);
        rows.push(v);
        assert_eq!(linalg::rank(&rows), r);

        let t = fixtures::torus_identity();
        let ball = universal_cover_ball(&t, CoreId(0), 4).unwrap();
        let ann = annihilator_ball(&t, &ball, 2, q).unwrap();
        assert_eq!(ann.walks.len(), 21);
        assert!(ann.f_class_sums_vanish(&t, &ball).unwrap());
        assert!(base_point_independent(&t, &ball, 2, q).unwrap());
        assert_eq!(annihilator_ball(&t, &ball, 5, q).unwrap_err(), FundError::RadiusTooSmall(4));

        let d = fixtures::two_by_two_pair();
        let ball = universal_cover_ball(&d, CoreId(0), 2).unwrap();
        assert!(matches!(annihilator_ball(&d, &ball, 1, q), Err(FundError::OpenCore(_))));
    }
}
