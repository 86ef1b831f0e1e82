//! Element and vector expressions: `2 e f* + -1/3 1_v`, `v1 - B:e1`.

use std::sync::Arc;

use kpmod_core::{parse_walk, Field, KGraph, KPElement, ModuleVector, RepKGraph, Scalar};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty term in `{0}`")]
    EmptyTerm(String),
    #[error("bad term `{term}`: {reason}")]
    BadTerm { term: String, reason: String },
}

/// Splits on standalone `+` and `-` into signed terms with an optional leading coefficient.
fn terms(text: &str, field: Field) -> Result<Vec<(Scalar, Vec<String>)>, ExprError> {
    let text = text.trim();
    if text.is_empty() || text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut sign = field.one();
    let mut current: Vec<String> = Vec::new();
    let mut flush = |sign: &Scalar, current: &mut Vec<String>| -> Result<(), ExprError> {
        if current.is_empty() {
            return Err(ExprError::EmptyTerm(text.to_string()));
        }
        let mut coef = sign.clone();
        if current.len() > 1 || field.parse_scalar(&current[0]).is_err() {
            if let Ok(c) = field.parse_scalar(&current[0]) {
                coef = &coef * &c;
                current.remove(0);
            }
        } else {
            return Err(ExprError::BadTerm { term: current.join(" "), reason: "a coefficient needs a walk".into() });
        }
        out.push((coef, std::mem::take(current)));
        Ok(())
    };
    for tok in text.split_whitespace() {
        match tok {
            "+" | "-" => {
                flush(&sign, &mut current)?;
                sign = if tok == "-" { -field.one() } else { field.one() };
            }
            _ => current.push(tok.to_string()),
        }
    }
    flush(&sign, &mut current)?;
    Ok(out)
}

pub fn parse_element(g: &Arc<KGraph>, field: Field, text: &str) -> Result<KPElement, ExprError> {
    let mut a = KPElement::zero(g.clone(), field);
    for (coef, toks) in terms(text, field)? {
        let body = toks.join(" ");
        let w = parse_walk(g, &body).map_err(|e| ExprError::BadTerm { term: body.clone(), reason: e.to_string() })?;
        a = a.add(&KPElement::from_walk(g.clone(), field, &w).scale(&coef)).expect("same base and field");
    }
    Ok(a)
}

pub fn parse_vector(d: &RepKGraph, field: Field, text: &str) -> Result<ModuleVector, ExprError> {
    let mut x = ModuleVector::zero(field);
    for (coef, toks) in terms(text, field)? {
        let [addr] = toks.as_slice() else {
            return Err(ExprError::BadTerm { term: toks.join(" "), reason: "expected one vertex address".into() });
        };
        let u = d.parse_addr(addr).map_err(|e| ExprError::BadTerm { term: addr.clone(), reason: e.to_string() })?;
        x.add_term(d, u, coef);
    }
    Ok(x)
}
