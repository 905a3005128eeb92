//! Exact linear algebra over ℚ: reduced row echelon form, rank, kernel
//! bases, and span membership. This is the only solver the crate needs —
//! every cochain/derivation/center computation reduces to the kernel of a
//! rational matrix assembled from polynomial identities.

use crate::poly::{Monomial, Poly, Scalar};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Reduce `mat` (rows of equal length) to reduced row echelon form in
/// place. Returns the pivot column indices in order.
pub fn rref(mat: &mut [Vec<Scalar>]) -> Vec<usize> {
    let nrows = mat.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = mat[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(pr) = (row..nrows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let inv = {
            let p = &mat[row][col];
            Scalar::one() / p.clone()
        };
        for c in col..ncols {
            let v = &mat[row][c] * &inv;
            mat[row][c] = v;
        }
        for r in 0..nrows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..ncols {
                    let sub = &mat[row][c] * &factor;
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(mat: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = mat.to_vec();
    rref(&mut m).len()
}

/// A basis of the right kernel `{x : mat · x = 0}`, one vector per free
/// column, in column order. Deterministic for identical input.
pub fn kernel_basis(mat: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = mat.to_vec();
    for row in &m {
        assert_eq!(row.len(), ncols, "ragged matrix");
    }
    let pivots = rref(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            // rref row r reads: x[pc] + Σ m[r][c]·x[c] = 0 over free c.
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Kernel of a linear map into polynomial vectors, probed on unit
/// vectors: `eval(u)` must return the image of the u-th unknown as a list
/// of residual polynomials (the same list shape for every `u`). Rows of
/// the assembled matrix are indexed by (residual slot, monomial) pairs;
/// the returned kernel basis is deterministic for identical input.
pub fn kernel_of_poly_map(
    num_unknowns: usize,
    eval: impl Fn(usize) -> Vec<Poly>,
) -> Vec<Vec<Scalar>> {
    let images: Vec<Vec<Poly>> = (0..num_unknowns).map(eval).collect();
    let mut keys: BTreeSet<(usize, Monomial)> = BTreeSet::new();
    for img in &images {
        for (s, p) in img.iter().enumerate() {
            for (m, _) in p.terms() {
                keys.insert((s, m.clone()));
            }
        }
    }
    let keys: Vec<_> = keys.into_iter().collect();
    let mut mat = vec![vec![Scalar::zero(); num_unknowns]; keys.len()];
    for (u, img) in images.iter().enumerate() {
        for (r, (s, m)) in keys.iter().enumerate() {
            let c = img[*s].coeff(m);
            if !c.is_zero() {
                mat[r][u] = c;
            }
        }
    }
    kernel_basis(&mat, num_unknowns)
}

/// Whether `target` lies in the ℚ-span of `vectors`.
pub fn in_span(vectors: &[Vec<Scalar>], target: &[Scalar]) -> bool {
    if target.iter().all(Zero::is_zero) {
        return true;
    }
    let base = rank(vectors);
    let mut augmented: Vec<Vec<Scalar>> = vectors.to_vec();
    augmented.push(target.to_vec());
    rank(&augmented) == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn kernel_of_simple_system() {
        // x + y + z = 0, y - z = 0 → kernel spanned by (-2, 1, 1).
        let a = m(&[&[1, 1, 1], &[0, 1, -1]]);
        let k = kernel_basis(&a, 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        // Verify directly.
        assert!((&v[0] + &v[1] + &v[2]).is_zero());
        assert!((&v[1] - &v[2]).is_zero());
    }

    #[test]
    fn full_rank_kernel_is_trivial() {
        let a = m(&[&[1, 0], &[0, 1]]);
        assert!(kernel_basis(&a, 2).is_empty());
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn span_membership() {
        let basis = m(&[&[1, 0, 1], &[0, 1, 1]]);
        assert!(in_span(&basis, &[int(2), int(3), int(5)]));
        assert!(!in_span(&basis, &[int(0), int(0), int(1)]));
        assert!(in_span(&basis, &[rat(1, 2), rat(0, 1), rat(1, 2)]));
    }
}
