//! Dense linear algebra for the tiny matrices that appear here (dimension <= 10 or so).
//!
//! Matrices are row-major `Vec<Vec<S>>`.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn transpose<S: Scalar>(a: &[Vec<S>]) -> Matrix<S> {
    if a.is_empty() {
        return Vec::new();
    }
    let (m, n) = (a.len(), a[0].len());
    (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect()
}

pub fn mat_vec<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(S::zero(), |acc, (&r, &v)| acc + r * v))
        .collect()
}

pub fn norm<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, &v| acc + v * v).sqrt()
}

pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter().zip(y).fold(S::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve<S: Scalar>(mut a: Matrix<S>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(S::zero(), |m, &v| m.max(v.abs()));
    if scale == S::zero() {
        return None;
    }
    let tiny = scale * S::epsilon() * S::lit(n as f64);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == S::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let tail = (row + 1..n).fold(S::zero(), |acc, k| acc + a[row][k] * x[k]);
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

pub fn determinant<S: Scalar>(mut a: Matrix<S>) -> S {
    let n = a.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == S::zero() {
            return S::zero();
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
        }
    }
    det
}

/// Singular values of an `m x n` matrix, sorted in descending order (one-sided Jacobi).
pub fn singular_values<S: Scalar>(a: &[Vec<S>]) -> Vec<S> {
    if a.is_empty() || a[0].is_empty() {
        return Vec::new();
    }
    // Work on the orientation with fewer columns.
    let mut cols: Vec<Vec<S>> = if a.len() >= a[0].len() {
        transpose(a)
    } else {
        a.to_vec()
    };
    let k = cols.len();
    let tol = S::epsilon() * S::lit(4.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == S::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (S::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = c * u - s * v;
                    *y = s * u + c * v;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<S> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Least-squares solution of `j x ~= f` through the normal equations.
pub fn least_squares<S: Scalar>(j: &[Vec<S>], f: &[S]) -> Option<Vec<S>> {
    let jt = transpose(j);
    let normal: Matrix<S> = jt
        .iter()
        .map(|ri| jt.iter().map(|rj| dot(ri, rj)).collect())
        .collect();
    let rhs: Vec<S> = jt.iter().map(|r| dot(r, f)).collect();
    solve(normal, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a: Matrix<f64> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(a, vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_system_is_rejected() {
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_none());
    }

    #[test]
    fn singular_values_of_rank_one_matrix() {
        let sv = singular_values::<f64>(&[vec![1.0, 2.0, 2.0], vec![2.0, 4.0, 4.0]]);
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let sv = singular_values::<f64>(&[vec![0.0, 3.0], vec![-4.0, 0.0], vec![0.0, 0.0]]);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_with_pivoting() {
        let d = determinant(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(d, -1.0);
    }
}
