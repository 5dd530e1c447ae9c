//! Small dense linear-algebra helpers shared by the geometric modules.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Pairwise summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Gram–Schmidt on the columns of `columns`, processed in index order.
///
/// Returns the Euclidean-orthonormal frame and the upper-triangular matrix `C`
/// with `frame = columns * C`.
pub fn gram_schmidt(columns: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (rows, k) = columns.shape();
    let scale = columns.amax().max(1.0);
    let mut frame = DMatrix::<f64>::zeros(rows, k);
    let mut coeff = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        let mut v = columns.column(j).clone_owned();
        let mut c = DVector::<f64>::zeros(k);
        c[j] = 1.0;
        // two passes for stability
        for _ in 0..2 {
            for i in 0..j {
                let e = frame.column(i);
                let p = e.dot(&v);
                v -= e * p;
                let ci = coeff.column(i).clone_owned();
                c -= ci * p;
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 * scale {
            return Err(Error::DegenerateImmersion(format!(
                "column {j} is linearly dependent on its predecessors"
            )));
        }
        frame.set_column(j, &(v / norm));
        coeff.set_column(j, &(c / norm));
    }
    Ok((frame, coeff))
}

/// Numerical rank with threshold `rel * σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * max).count()
}

/// `‖A − Aᵀ‖∞` (entrywise max).
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// `‖A + Aᵀ‖∞` (entrywise max).
pub fn skew_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }

    #[test]
    fn gram_schmidt_frame_is_orthonormal() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 1.0, 2.0]);
        let (q, c) = gram_schmidt(&a).unwrap();
        let qtq = q.transpose() * &q;
        assert!((qtq - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!((&a * c - q).amax() < 1e-14);
    }

    #[test]
    fn gram_schmidt_rejects_rank_deficiency() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(gram_schmidt(&a), Err(Error::DegenerateImmersion(_))));
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(numerical_rank(&(&v * v.transpose()), 1e-8), 1);
    }
}
