//! Dense symmetric positive-definite solves via Cholesky, enough for the
//! small normal-equation systems of logistic regression.

use crate::Scalar;

/// Lower-triangular Cholesky factor of a row-major `p x p` matrix.
/// Returns `None` when a pivot is not strictly positive.
pub fn cholesky<F: Scalar>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let p = a.len();
    let mut l = vec![vec![F::zero(); p]; p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > F::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the factor.
pub fn cholesky_solve<F: Scalar>(l: &[Vec<F>], b: &[F]) -> Vec<F> {
    let p = l.len();
    let mut y = vec![F::zero(); p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![F::zero(); p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in i + 1..p {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Inverse of the factored matrix, column by column.
pub fn cholesky_inverse<F: Scalar>(l: &[Vec<F>]) -> Vec<Vec<F>> {
    let p = l.len();
    let mut inv = vec![vec![F::zero(); p]; p];
    for j in 0..p {
        let mut e = vec![F::zero(); p];
        e[j] = F::one();
        let col = cholesky_solve(l, &e);
        for i in 0..p {
            inv[i][j] = col[i];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_known_system() {
        let a = vec![
            vec![4.0, 12.0, -16.0],
            vec![12.0, 37.0, -43.0],
            vec![-16.0, -43.0, 98.0],
        ];
        let l = cholesky(&a).unwrap();
        assert_eq!(l[0], vec![2.0, 0.0, 0.0]);
        assert_eq!(l[1], vec![6.0, 1.0, 0.0]);
        assert_eq!(l[2], vec![-8.0, 5.0, 3.0]);
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        for (row, b) in a.iter().zip([1.0, 2.0, 3.0]) {
            let ax: f64 = row.iter().zip(&x).map(|(r, x)| r * x).sum();
            assert!((ax - b).abs() < 1e-9);
        }
        let inv = cholesky_inverse(&l);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_singular() {
        assert!(cholesky(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_none());
        assert!(cholesky(&[vec![-1.0f32]]).is_none());
    }
}
