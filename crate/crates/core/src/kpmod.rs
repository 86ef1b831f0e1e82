//! The module V over a representation graph: vectors with basis the vertices of Δ.

use std::collections::HashSet;

use thiserror::Error;

use crate::kgraph::PathNF;
use crate::kpalg::KPElement;
use crate::linalg;
use crate::repgraph::{CoreId, MorphismFailure, QuotientError, RepKGraph, VertexAddr, VertexPartition};
use crate::scalar::{Field, Scalar};
use crate::walks::{lift_walk, Letter, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("element and module live over different base graphs")]
    BaseMismatch,
    #[error("the vector is zero")]
    ZeroVector,
    #[error("no walk separates `{u}` from `{v}`")]
    NotIrreducible { u: String, v: String },
    #[error("not a morphism: {0}")]
    NotAMorphism(MorphismFailure),
    #[error(transparent)]
    NotAdmissible(QuotientError),
    #[error("the class of `{0}` is not finitely supported in the core")]
    UnsupportedInfiniteClass(String),
}

/// A finitely supported vector; addresses are merged with [`RepKGraph::same_vertex`].
#[derive(Debug, Clone)]
pub struct ModuleVector {
    field: Field,
    terms: Vec<(VertexAddr, Scalar)>,
}

impl ModuleVector {
    pub fn zero(field: Field) -> Self {
        ModuleVector { field, terms: Vec::new() }
    }

    pub fn basis(field: Field, u: VertexAddr) -> Self {
        ModuleVector { field, terms: vec![(u, field.one())] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &[(VertexAddr, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, d: &RepKGraph, u: VertexAddr, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.iter().position(|(v, _)| d.same_vertex(v, &u)) {
            Some(i) => {
                let sum = &self.terms[i].1 + &c;
                if sum.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = sum;
                }
            }
            None => self.terms.push((u, c)),
        }
    }

    pub fn add(&self, d: &RepKGraph, other: &ModuleVector) -> ModuleVector {
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(d, u.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &Scalar) -> ModuleVector {
        let terms = if k.is_zero() { Vec::new() } else { self.terms.iter().map(|(u, c)| (u.clone(), c * k)).collect() };
        ModuleVector { field: self.field, terms }
    }

    pub fn sub(&self, d: &RepKGraph, other: &ModuleVector) -> ModuleVector {
        self.add(d, &other.scale(&-self.field.one()))
    }

    pub fn equals(&self, d: &RepKGraph, other: &ModuleVector) -> bool {
        self.sub(d, other).is_zero()
    }

    /// `c@addr + …`, sorted by address text.
    pub fn to_string(&self, d: &RepKGraph) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<(String, String)> =
            self.terms.iter().map(|(u, c)| (d.addr_to_string(u), c.to_string())).collect();
        parts.sort();
        parts.iter().map(|(a, c)| format!("{c}@{a}")).collect::<Vec<_>>().join(" + ")
    }
}

/// `w.x`: each basis vertex moves to the endpoint of the lift of `w`, or to 0.
pub fn act_walk(d: &RepKGraph, w: &Walk, x: &ModuleVector) -> ModuleVector {
    let mut out = ModuleVector::zero(x.field);
    for (u, c) in &x.terms {
        if let Ok(Some(v)) = lift_walk(d, u, w) {
            out.add_term(d, v, c.clone());
        }
    }
    out
}

/// `σ_λ` or `σ_{λ*}`.
pub fn act_generator(d: &RepKGraph, path: &PathNF, star: bool, x: &ModuleVector) -> ModuleVector {
    act_walk(d, &Walk::letter(path.clone(), star), x)
}

pub fn act_element(d: &RepKGraph, a: &KPElement, x: &ModuleVector) -> Result<ModuleVector, ModError> {
    if a.base().as_ref() != d.base() {
        return Err(ModError::BaseMismatch);
    }
    let mut out = ModuleVector::zero(x.field);
    for (m, c) in a.terms() {
        out = out.add(d, &act_walk(d, &m.as_walk(), x).scale(c));
    }
    Ok(out)
}

pub fn is_simple(d: &RepKGraph) -> bool {
    d.is_irreducible()
}

/// Finds `k` and a walk `p` with `k·(p.x)` a single basis vertex.
pub fn reduce_to_vertex(d: &RepKGraph, x: &ModuleVector) -> Result<(Scalar, Walk), ModError> {
    if x.is_zero() {
        return Err(ModError::ZeroVector);
    }
    let mut cur = x.clone();
    let mut acc: Option<Walk> = None;
    while cur.terms.len() > 1 {
        let (u, v) = (&cur.terms[0].0, &cur.terms[1].0);
        let sep = separator(d, u, v)
            .ok_or_else(|| ModError::NotIrreducible { u: d.addr_to_string(u), v: d.addr_to_string(v) })?;
        cur = act_walk(d, &sep, &cur);
        acc = Some(match acc {
            None => sep,
            Some(w) => w.then(&sep).expect("separator starts where the walk ends"),
        });
    }
    let (u, c) = &cur.terms[0];
    let walk = acc.unwrap_or_else(|| Walk::identity(d.alpha(u)));
    Ok((c.inverse().expect("nonzero coefficient"), walk))
}

/// A starred walk that lifts from `u` but not from `v`, found by a
/// breadth-first search over paired backward steps.
fn separator(d: &RepKGraph, u: &VertexAddr, v: &VertexAddr) -> Option<Walk> {
    let g = d.base();
    if d.alpha(u) != d.alpha(v) {
        return Some(Walk::identity(d.alpha(u)));
    }
    let extra = |a: &VertexAddr| match a {
        VertexAddr::Core(_) => 0,
        VertexAddr::Implicit { path, .. } => path.len(),
    };
    let depth = 2 * d.core_len() + 2 + extra(u).max(extra(v));
    let mut seen: HashSet<(CoreId, CoreId)> = HashSet::new();
    // Labels are stored in the order they are read backward from u.
    let mut frontier: Vec<(VertexAddr, VertexAddr, Vec<crate::kgraph::EdgeId>)> =
        vec![(u.clone(), v.clone(), Vec::new())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (a, b, labels) in frontier {
            for color in 0..g.k() {
                let (a2, la) = d.step_backward(&a, color);
                let (b2, lb) = d.step_backward(&b, color);
                let mut path = labels.clone();
                path.push(la);
                if la != lb {
                    return Some(starred(d, u, &path));
                }
                if let (VertexAddr::Core(x), VertexAddr::Core(y)) = (&a2, &b2) {
                    if !seen.insert((*x, *y)) {
                        continue;
                    }
                }
                next.push((a2, b2, path));
            }
        }
        frontier = next;
    }
    None
}

/// The walk reading `labels` backward from `u`.
fn starred(d: &RepKGraph, u: &VertexAddr, labels: &[crate::kgraph::EdgeId]) -> Walk {
    let g = d.base();
    let letters: Vec<Letter> = labels.iter().map(|&e| Letter { path: g.edge_path(e), star: true }).collect();
    Walk::new(d.alpha(u), letters).expect("labels follow in-edges")
}

/// Two distinct ∼-equivalent core vertices, if any.
pub fn submodule_witness(d: &RepKGraph) -> Option<(CoreId, CoreId)> {
    d.sim_relation().blocks().iter().find(|b| b.len() >= 2).map(|b| (b[0], b[1]))
}

/// Spanning vectors of the cyclic submodule generated by `x`, closed under
/// every edge generator and its star up to `depth` steps.
pub fn cyclic_closure(d: &RepKGraph, x: &ModuleVector, depth: usize) -> Vec<ModuleVector> {
    let g = d.base();
    let gens: Vec<Walk> =
        g.edge_ids().flat_map(|e| [Walk::letter(g.edge_path(e), false), Walk::letter(g.edge_path(e), true)]).collect();
    let mut found = vec![x.clone()];
    let mut frontier = vec![x.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for y in &frontier {
            for w in &gens {
                let z = act_walk(d, w, y);
                if z.is_zero() || found.iter().any(|f| f.equals(d, &z)) {
                    continue;
                }
                found.push(z.clone());
                next.push(z);
            }
        }
        frontier = next;
    }
    found
}

/// A basis vertex in the span of `vectors`, if one exists among their supports.
pub fn basis_vertex_in_span(d: &RepKGraph, vectors: &[ModuleVector]) -> Option<VertexAddr> {
    let field = vectors.first()?.field;
    let mut coords: Vec<VertexAddr> = Vec::new();
    for v in vectors {
        for (u, _) in &v.terms {
            if !coords.iter().any(|c| d.same_vertex(c, u)) {
                coords.push(u.clone());
            }
        }
    }
    let row = |v: &ModuleVector| {
        let mut r = vec![field.zero(); coords.len()];
        for (u, c) in &v.terms {
            let i = coords.iter().position(|x| d.same_vertex(x, u)).expect("coordinate listed");
            r[i] = c.clone();
        }
        r
    };
    let rows: Vec<Vec<Scalar>> = vectors.iter().map(row).collect();
    let base_rank = linalg::rank(&rows);
    coords.iter().find_map(|u| {
        let mut extended = rows.clone();
        extended.push(row(&ModuleVector::basis(field, u.clone())));
        (linalg::rank(&extended) == base_rank).then(|| u.clone())
    })
}

/// The module map induced by a morphism of representation graphs.
pub struct InducedHom<'a> {
    source: &'a RepKGraph,
    target: &'a RepKGraph,
    map: Vec<CoreId>,
}

pub fn hom_from_morphism<'a>(
    source: &'a RepKGraph,
    target: &'a RepKGraph,
    map: Vec<CoreId>,
) -> Result<InducedHom<'a>, ModError> {
    source.check_morphism(target, &map).map_err(ModError::NotAMorphism)?;
    Ok(InducedHom { source, target, map })
}

impl InducedHom<'_> {
    pub fn apply(&self, x: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero(x.field);
        for (u, c) in &x.terms {
            let image = self.source.map_addr(self.target, &self.map, u).expect("morphisms preserve labels");
            out.add_term(self.target, image, c.clone());
        }
        out
    }
}

/// The section `[u] ↦ Σ_{v ≈ u} v` from the quotient back to Δ, on core-supported vectors.
pub struct Section<'a> {
    source: &'a RepKGraph,
    quotient: RepKGraph,
    partition: VertexPartition,
}

pub fn hom_section(d: &RepKGraph, p: VertexPartition) -> Result<Section<'_>, ModError> {
    let quotient = d.quotient(&p).map_err(ModError::NotAdmissible)?;
    for block in p.blocks() {
        for &u in block {
            for &v in block {
                for e in d.out_edges(u) {
                    if d.out_edge(v, e.label).is_none() {
                        return Err(ModError::UnsupportedInfiniteClass(d.name(v).to_string()));
                    }
                }
            }
        }
    }
    Ok(Section { source: d, quotient, partition: p })
}

impl Section<'_> {
    pub fn quotient(&self) -> &RepKGraph {
        &self.quotient
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector, ModError> {
        let mut out = ModuleVector::zero(x.field);
        for (u, c) in &x.terms {
            let VertexAddr::Core(b) = u else {
                return Err(ModError::UnsupportedInfiniteClass(self.quotient.addr_to_string(u)));
            };
            for &m in &self.partition.blocks()[b.0] {
                out.add_term(self.source, VertexAddr::Core(m), c.clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::walks::parse_walk;
    use std::sync::Arc;

    fn q() -> Field {
        Field::Rational
    }

    fn vec_of(d: &RepKGraph, terms: &[(i64, &str)]) -> ModuleVector {
        let mut x = ModuleVector::zero(q());
        for (c, a) in terms {
            x.add_term(d, d.parse_addr(a).unwrap(), q().from_int(*c));
        }
        x
    }

    fn walk(d: &RepKGraph, s: &str) -> Walk {
        parse_walk(d.base(), s).unwrap()
    }

    #[test]
    fn generator_actions() {
        let d = fixtures::two_cycle();
        let v1 = vec_of(&d, &[(1, "v1")]);
        let v2 = vec_of(&d, &[(1, "v2")]);
        assert!(act_walk(&d, &walk(&d, "l"), &v1).equals(&d, &v2));
        assert!(act_walk(&d, &walk(&d, "l*"), &v2).equals(&d, &v1));
        assert!(act_walk(&d, &walk(&d, "l l"), &v1).equals(&d, &v1));

        let d = fixtures::two_by_two_pair();
        let b = vec_of(&d, &[(1, "B")]);
        assert!(act_walk(&d, &walk(&d, "e1*"), &b).is_zero());
    }

    #[test]
    fn sum_of_range_projections_is_identity() {
        for (_, d) in fixtures::all_reps().into_iter().filter(|(_, d)| d.base().k() == 1) {
            let g = d.base().clone();
            let arc = Arc::new(g.clone());
            for c in d.core() {
                let x = ModuleVector::basis(q(), VertexAddr::Core(c));
                let v = d.core_alpha(c);
                let mut total = KPElement::zero(arc.clone(), q());
                for &e in g.in_edges(v, 0) {
                    let w = Walk::letter(g.edge_path(e), true).then(&Walk::letter(g.edge_path(e), false)).unwrap();
                    total = total.add(&KPElement::from_walk(arc.clone(), q(), &w)).unwrap();
                }
                assert!(act_element(&d, &total, &x).unwrap().equals(&d, &x));
            }
        }
    }

    #[test]
    fn simplicity() {
        assert!(is_simple(&fixtures::two_by_two_pair()));
        assert!(!is_simple(&fixtures::two_cycle()));
        assert!(is_simple(&fixtures::torus_identity()));
    }

    #[test]
    fn reduce_to_vertex_certificates() {
        let d = fixtures::two_by_two_pair();
        let x = vec_of(&d, &[(3, "A")]);
        let (k, w) = reduce_to_vertex(&d, &x).unwrap();
        assert_eq!(k, q().from_ratio(1, 3).unwrap());
        assert!(w.is_empty());

        let x = vec_of(&d, &[(1, "A"), (1, "B")]);
        let (k, w) = reduce_to_vertex(&d, &x).unwrap();
        assert!(k.is_one());
        assert_eq!(w.display(d.base()).to_string(), "e1*");
        assert!(act_walk(&d, &w, &x).equals(&d, &vec_of(&d, &[(1, "A")])));

        let y = vec_of(&d, &[(2, "B:e1"), (-1, "B:e2"), (5, "A:f1.f1")]);
        let (k, w) = reduce_to_vertex(&d, &y).unwrap();
        let image = act_walk(&d, &w, &y).scale(&k);
        assert_eq!(image.terms().len(), 1);
        assert!(image.terms()[0].1.is_one());

        let c = fixtures::two_cycle();
        let x = vec_of(&c, &[(1, "v1"), (-1, "v2")]);
        assert!(matches!(reduce_to_vertex(&c, &x), Err(ModError::NotIrreducible { .. })));
        assert_eq!(
            reduce_to_vertex(&c, &ModuleVector::zero(q())),
            Err(ModError::ZeroVector).map(|_: ()| unreachable!())
        );
    }

    #[test]
    fn witnesses_and_closure() {
        let c = fixtures::two_cycle();
        assert_eq!(submodule_witness(&c), Some((CoreId(0), CoreId(1))));
        assert_eq!(submodule_witness(&fixtures::two_by_two_pair()), None);
        let x = vec_of(&c, &[(1, "v1"), (-1, "v2")]);
        let span = cyclic_closure(&c, &x, 2 * c.core_len());
        assert!(basis_vertex_in_span(&c, &span).is_none());

        let h = fixtures::hexagon();
        let (u, v) = submodule_witness(&h).unwrap();
        assert!(h.sim_relation().same_block(u, v));
        let x = ModuleVector::basis(q(), VertexAddr::Core(u)).sub(&h, &ModuleVector::basis(q(), VertexAddr::Core(v)));
        assert!(basis_vertex_in_span(&h, &cyclic_closure(&h, &x, 4)).is_none());

        let d = fixtures::two_by_two_pair();
        let x = vec_of(&d, &[(1, "A"), (1, "B")]);
        assert!(basis_vertex_in_span(&d, &cyclic_closure(&d, &x, 1)).is_some());
    }

    #[test]
    fn induced_homs() {
        let c = fixtures::two_cycle();
        let sim = c.sim_relation();
        let q1 = c.quotient(&sim).unwrap();
        let hom = hom_from_morphism(&c, &q1, c.quotient_map(&sim)).unwrap();
        let img1 = hom.apply(&vec_of(&c, &[(1, "v1")]));
        let img2 = hom.apply(&vec_of(&c, &[(1, "v2")]));
        assert!(img1.equals(&q1, &img2));
        assert_eq!(img1.terms().len(), 1);

        let id = hom_from_morphism(&c, &c, vec![CoreId(0), CoreId(1)]).unwrap();
        let x = vec_of(&c, &[(2, "v1"), (3, "v2")]);
        assert!(id.apply(&x).equals(&c, &x));

        let section = hom_section(&c, sim).unwrap();
        let class = ModuleVector::basis(q(), VertexAddr::Core(CoreId(0)));
        assert!(section.apply(&class).unwrap().equals(&c, &vec_of(&c, &[(1, "v1"), (1, "v2")])));
        let g = c.base();
        for e in g.edge_ids() {
            for star in [false, true] {
                let p = g.edge_path(e);
                let lhs = section.apply(&act_generator(section.quotient(), &p, star, &class)).unwrap();
                let rhs = act_generator(&c, &p, star, &section.apply(&class).unwrap());
                assert!(lhs.equals(&c, &rhs));
            }
        }
    }
}
