//! Dense exact Gaussian elimination.

use crate::scalar::{Field, Scalar};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Scalar>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&factor * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// A basis of `{x : A x = 0}` for `A` with `ncols` columns.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize, field: Field) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); ncols];
            v[f] = field.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| Field::Rational.from_int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ker = nullspace(&a, 3, Field::Rational);
        assert_eq!(ker.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ker[0]).fold(Field::Rational.zero(), |acc, (x, y)| &acc + &(x * y));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn prime_field_rank_differs() {
        let f = Field::prime(3).unwrap();
        let a: Vec<Vec<Scalar>> = [[1, 1], [1, 4]].iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect();
        assert_eq!(rank(&a), 1);
        let b = q(&[&[1, 1], &[1, 4]]);
        assert_eq!(rank(&b), 2);
        assert!(nullspace(&[], 2, Field::Rational).len() == 2);
    }
}
