//! Kumjian-Pask algebra elements as combinations of monomials `λμ*`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kgraph::{KGraph, PathNF, VertexId};
use crate::scalar::{Field, Scalar};
use crate::walks::{Letter, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KpError {
    #[error("a monomial λμ* needs s(λ) = s(μ)")]
    SourceMismatch,
    #[error("elements live over different base graphs")]
    BaseMismatch,
    #[error("elements use different scalar fields")]
    FieldMismatch,
}

/// The monomial `λμ*`: first `μ*`, then `λ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    lambda: PathNF,
    mu: PathNF,
}

impl Monomial {
    pub fn new(lambda: PathNF, mu: PathNF) -> Result<Self, KpError> {
        if lambda.source() != mu.source() {
            return Err(KpError::SourceMismatch);
        }
        Ok(Monomial { lambda, mu })
    }

    pub fn vertex(g: &KGraph, v: VertexId) -> Self {
        Monomial { lambda: g.identity(v), mu: g.identity(v) }
    }

    /// `λ` (when `star` is false) or `λ*`.
    pub fn generator(g: &KGraph, path: PathNF, star: bool) -> Self {
        let id = g.identity(path.source());
        if star {
            Monomial { lambda: id, mu: path }
        } else {
            Monomial { lambda: path, mu: id }
        }
    }

    pub fn lambda(&self) -> &PathNF {
        &self.lambda
    }

    pub fn mu(&self) -> &PathNF {
        &self.mu
    }

    /// `d(λ) − d(μ)`.
    pub fn grade(&self) -> Vec<i64> {
        let (a, b) = (self.lambda.degree().components(), self.mu.degree().components());
        a.iter().zip(b).map(|(x, y)| *x as i64 - *y as i64).collect()
    }

    pub fn star(&self) -> Self {
        Monomial { lambda: self.mu.clone(), mu: self.lambda.clone() }
    }

    /// The walk `μ*` then `λ`.
    pub fn as_walk(&self) -> Walk {
        let mut letters = Vec::new();
        if !self.mu.is_identity() {
            letters.push(Letter { path: self.mu.clone(), star: true });
        }
        if !self.lambda.is_identity() {
            letters.push(Letter { path: self.lambda.clone(), star: false });
        }
        Walk::new(self.mu.range(), letters).expect("monomial walks chain at s(λ) = s(μ)")
    }

    /// `(λμ*)(ρσ*) = Σ_{(α,β) ∈ MCE(μ,ρ)} (λ∘α)(σ∘β)*`.
    pub fn mul(&self, g: &KGraph, other: &Monomial) -> Vec<Monomial> {
        g.minimal_common_extensions(&self.mu, &other.lambda)
            .into_iter()
            .map(|(a, b)| Monomial {
                lambda: g.compose(&self.lambda, &a).expect("α continues λ"),
                mu: g.compose(&other.mu, &b).expect("β continues σ"),
            })
            .collect()
    }
}

/// A finite combination of monomials with nonzero coefficients.
#[derive(Debug, Clone)]
pub struct KPElement {
    base: Arc<KGraph>,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for KPElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms && same_base(&self.base, &other.base)
    }
}

impl Eq for KPElement {}

fn same_base(a: &Arc<KGraph>, b: &Arc<KGraph>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl KPElement {
    pub fn zero(base: Arc<KGraph>, field: Field) -> Self {
        KPElement { base, field, terms: BTreeMap::new() }
    }

    pub fn from_monomial(base: Arc<KGraph>, coef: Scalar, m: Monomial) -> Self {
        let mut e = Self::zero(base, coef.field());
        e.add_term(m, coef);
        e
    }

    /// `1_v`.
    pub fn vertex(base: Arc<KGraph>, field: Field, v: VertexId) -> Self {
        let m = Monomial::vertex(&base, v);
        Self::from_monomial(base, field.one(), m)
    }

    /// The product of the letter generators of `w`, last letter leftmost.
    pub fn from_walk(base: Arc<KGraph>, field: Field, w: &Walk) -> Self {
        let mut acc = Self::vertex(base.clone(), field, w.start());
        for l in w.letters() {
            let g = Self::from_monomial(base.clone(), field.one(), Monomial::generator(&base, l.path.clone(), l.star));
            acc = g.mul(&acc).expect("same base and field");
        }
        acc
    }

    pub fn base(&self) -> &Arc<KGraph> {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn add_term(&mut self, m: Monomial, coef: Scalar) {
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = &*c + &coef;
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, coef);
            }
        }
    }

    fn check(&self, other: &KPElement) -> Result<(), KpError> {
        if !same_base(&self.base, &other.base) {
            return Err(KpError::BaseMismatch);
        }
        if self.field != other.field {
            return Err(KpError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &KPElement) -> Result<KPElement, KpError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KPElement) -> Result<KPElement, KpError> {
        self.add(&other.scale(&-other.field.one()))
    }

    pub fn scale(&self, k: &Scalar) -> KPElement {
        let mut out = Self::zero(self.base.clone(), self.field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &KPElement) -> Result<KPElement, KpError> {
        self.check(other)?;
        let mut out = Self::zero(self.base.clone(), self.field);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca * cb;
                for m in a.mul(&self.base, b) {
                    out.add_term(m, c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn star(&self) -> KPElement {
        let mut out = Self::zero(self.base.clone(), self.field);
        for (m, c) in &self.terms {
            out.add_term(m.star(), c.clone());
        }
        out
    }

    /// Homogeneous components by grading in ℤ^k.
    pub fn grade(&self) -> BTreeMap<Vec<i64>, KPElement> {
        let mut out: BTreeMap<Vec<i64>, KPElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.grade())
                .or_insert_with(|| Self::zero(self.base.clone(), self.field))
                .add_term(m.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for KPElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*({})", c, m.as_walk().display(&self.base))?;
        }
        Ok(())
    }
}
