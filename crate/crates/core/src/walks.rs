//! Walks in the doubled graph: letters are paths and starred paths.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::kgraph::{Degree, EdgeId, KGraph, PathNF, VertexId};
use crate::repgraph::{RepKGraph, VertexAddr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("letters are not composable")]
    NotComposable,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("walk starts at `{walk}` but the vertex lies over `{vertex}`")]
    BasePointMismatch { walk: String, vertex: String },
    #[error("empty walk expression")]
    Empty,
}

/// `path` traversed forwards, or backwards when `star` is set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub path: PathNF,
    pub star: bool,
}

impl Letter {
    pub fn from(&self) -> VertexId {
        if self.star {
            self.path.range()
        } else {
            self.path.source()
        }
    }

    pub fn to(&self) -> VertexId {
        if self.star {
            self.path.source()
        } else {
            self.path.range()
        }
    }
}

/// Letters in application order: `letters[0]` is traversed first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Walk {
    start: VertexId,
    letters: Vec<Letter>,
}

impl Walk {
    pub fn new(start: VertexId, letters: Vec<Letter>) -> Result<Walk, WalkError> {
        let mut at = start;
        for l in &letters {
            if l.from() != at {
                return Err(WalkError::NotComposable);
            }
            at = l.to();
        }
        Ok(Walk { start, letters })
    }

    pub fn identity(v: VertexId) -> Walk {
        Walk { start: v, letters: Vec::new() }
    }

    pub fn letter(path: PathNF, star: bool) -> Walk {
        let l = Letter { path, star };
        Walk { start: l.from(), letters: vec![l] }
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.letters.last().map_or(self.start, Letter::to)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Edge count, counting each letter's edges.
    pub fn len(&self) -> usize {
        self.letters.iter().map(|l| l.path.len()).sum()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Walk) -> Result<Walk, WalkError> {
        if self.end() != next.start {
            return Err(WalkError::NotComposable);
        }
        let mut letters = self.letters.clone();
        letters.extend(next.letters.iter().cloned());
        Ok(Walk { start: self.start, letters })
    }

    /// The reversed walk with every letter starred or unstarred.
    pub fn star(&self) -> Walk {
        let letters = self.letters.iter().rev().map(|l| Letter { path: l.path.clone(), star: !l.star }).collect();
        Walk { start: self.end(), letters }
    }

    /// Signed edges in application order.
    pub fn signed_edges(&self) -> Vec<(EdgeId, bool)> {
        let mut out = Vec::new();
        for l in &self.letters {
            if l.star {
                out.extend(l.path.edges().iter().rev().map(|&e| (e, true)));
            } else {
                out.extend(l.path.edges().iter().map(|&e| (e, false)));
            }
        }
        out
    }

    /// Writes the walk in composition order, one edge per token.
    pub fn display<'a>(&'a self, g: &'a KGraph) -> WalkDisplay<'a> {
        WalkDisplay { walk: self, g }
    }
}

pub struct WalkDisplay<'a> {
    walk: &'a Walk,
    g: &'a KGraph,
}

impl fmt::Display for WalkDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.walk.signed_edges();
        if edges.is_empty() {
            return write!(f, "1_{}", self.g.vertex_name(self.walk.start));
        }
        let tokens: Vec<String> = edges
            .iter()
            .rev()
            .map(|&(e, star)| format!("{}{}", self.g.edge_name(e), if star { "*" } else { "" }))
            .collect();
        write!(f, "{}", tokens.join(" "))
    }
}

/// Parses whitespace-separated edge ids with optional `*`; the rightmost token acts first.
/// `1_v` denotes the empty walk at `v`.
pub fn parse_walk(g: &KGraph, text: &str) -> Result<Walk, WalkError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(WalkError::Empty);
    }
    let mut letters = Vec::new();
    let mut anchor = None;
    for tok in tokens.iter().rev() {
        if let Some(v) = tok.strip_prefix("1_") {
            if g.edge_by_name(tok).is_err() {
                let v = g.vertex(v).map_err(|_| WalkError::UnknownVertex(v.to_string()))?;
                anchor.get_or_insert(v);
                let at = letters.last().map_or(v, Letter::to);
                if at != v {
                    return Err(WalkError::NotComposable);
                }
                continue;
            }
        }
        let (name, star) = match tok.strip_suffix('*') {
            Some(n) => (n, true),
            None => (*tok, false),
        };
        let e = g.edge_by_name(name).map_err(|_| WalkError::UnknownEdge(name.to_string()))?;
        letters.push(Letter { path: g.edge_path(e), star });
    }
    let start = match (letters.first(), anchor) {
        (Some(l), _) => l.from(),
        (None, Some(v)) => v,
        (None, None) => return Err(WalkError::Empty),
    };
    if let Some(v) = anchor {
        // An identity token must sit on the walk.
        let mut at = start;
        let mut on_walk = at == v;
        for l in &letters {
            at = l.to();
            on_walk |= at == v;
        }
        if !on_walk {
            return Err(WalkError::NotComposable);
        }
    }
    Walk::new(start, letters)
}

/// A reduced walk and whether reduction decides equality in the groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    pub walk: Walk,
    pub decided: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Run {
    Pos(PathNF),
    Neg(PathNF),
}

impl Run {
    fn path(&self) -> &PathNF {
        match self {
            Run::Pos(p) | Run::Neg(p) => p,
        }
    }
}

fn push_run(g: &KGraph, runs: &mut Vec<Run>, run: Run) {
    if run.path().is_identity() {
        return;
    }
    match (runs.last_mut(), run) {
        (Some(Run::Pos(prev)), Run::Pos(p)) => *prev = g.compose(&p, prev).expect("walk is composable"),
        (Some(Run::Neg(prev)), Run::Neg(p)) => *prev = g.compose(prev, &p).expect("walk is composable"),
        (_, run) => runs.push(run),
    }
}

/// Reachable-state budget for the exhaustive search used when k ≥ 2.
const SEARCH_LIMIT: usize = 20_000;

/// Cancels `λλ*` and `λ*λ` after merging runs of same-signed letters into
/// normal-form paths. For k = 1 this is free reduction. For k ≥ 2 the
/// cancellation order matters, so all orders are searched and the shortest
/// result (then least in a fixed order) is returned; past the search budget
/// the leftmost-first result is used.
pub fn reduce_walk(g: &KGraph, w: &Walk) -> Reduced {
    let mut runs: Vec<Run> = Vec::new();
    for l in w.letters() {
        let run = if l.star { Run::Neg(l.path.clone()) } else { Run::Pos(l.path.clone()) };
        push_run(g, &mut runs, run);
    }
    let runs = if g.k() == 1 {
        greedy(g, runs)
    } else {
        let mut memo = HashMap::new();
        search(g, runs.clone(), &mut memo).unwrap_or_else(|| greedy(g, runs))
    };
    let letters = runs
        .into_iter()
        .map(|r| match r {
            Run::Pos(p) => Letter { path: p, star: false },
            Run::Neg(p) => Letter { path: p, star: true },
        })
        .collect();
    Reduced { walk: Walk { start: w.start, letters }, decided: g.k() == 1 }
}

fn greedy(g: &KGraph, mut runs: Vec<Run>) -> Vec<Run> {
    while let Some(next) = cancellations(g, &runs).into_iter().next() {
        runs = next;
    }
    runs
}

fn weight(runs: &[Run]) -> usize {
    runs.iter().map(|r| r.path().len()).sum()
}

fn search(g: &KGraph, runs: Vec<Run>, memo: &mut HashMap<Vec<Run>, Vec<Run>>) -> Option<Vec<Run>> {
    if let Some(done) = memo.get(&runs) {
        return Some(done.clone());
    }
    if memo.len() > SEARCH_LIMIT {
        return None;
    }
    let mut best = runs.clone();
    for next in cancellations(g, &runs) {
        let candidate = search(g, next, memo)?;
        if (weight(&candidate), &candidate) < (weight(&best), &best) {
            best = candidate;
        }
    }
    memo.insert(runs, best.clone());
    Some(best)
}

/// Every run sequence reachable by one cancellation, leftmost boundary and lowest colour first.
fn cancellations(g: &KGraph, runs: &[Run]) -> Vec<Vec<Run>> {
    let k = g.k();
    let mut out = Vec::new();
    for i in 0..runs.len().saturating_sub(1) {
        for c in 0..k {
            let z = Degree::unit(k, c);
            let replaced = match (&runs[i], &runs[i + 1]) {
                (Run::Pos(p), Run::Neg(n)) if p.degree().get(c) > 0 && n.degree().get(c) > 0 => {
                    let (hp, tp) = g.factorize(p, &p.degree().checked_sub(&z).unwrap()).unwrap();
                    let (hn, tn) = g.factorize(n, &n.degree().checked_sub(&z).unwrap()).unwrap();
                    (hp == hn).then_some((Run::Pos(tp), Run::Neg(tn)))
                }
                (Run::Neg(n), Run::Pos(p)) if p.degree().get(c) > 0 && n.degree().get(c) > 0 => {
                    let (rn, fn_) = g.factorize(n, &z).unwrap();
                    let (rp, fp) = g.factorize(p, &z).unwrap();
                    (fn_ == fp).then_some((Run::Neg(rn), Run::Pos(rp)))
                }
                _ => None,
            };
            if let Some((left, right)) = replaced {
                let mut rebuilt = runs[..i].to_vec();
                push_run(g, &mut rebuilt, left);
                push_run(g, &mut rebuilt, right);
                for r in &runs[i + 2..] {
                    push_run(g, &mut rebuilt, r.clone());
                }
                out.push(rebuilt);
            }
        }
    }
    out
}

/// Endpoint of the lift of `w` starting at `u`, or `None` when a starred
/// letter does not match the in-path at the current vertex.
pub fn lift_walk(d: &RepKGraph, u: &VertexAddr, w: &Walk) -> Result<Option<VertexAddr>, WalkError> {
    let g = d.base();
    if d.alpha(u) != w.start() {
        return Err(WalkError::BasePointMismatch {
            walk: g.vertex_name(w.start()).to_string(),
            vertex: g.vertex_name(d.alpha(u)).to_string(),
        });
    }
    let mut at = u.clone();
    for l in w.letters() {
        if l.star {
            for &e in l.path.edges().iter().rev() {
                let (src, label) = d.step_backward(&at, g.color(e));
                if label != e {
                    return Ok(None);
                }
                at = src;
            }
        } else {
            at = d.step_forward(&at, &l.path).expect("walk letters chain");
        }
    }
    Ok(Some(at))
}
