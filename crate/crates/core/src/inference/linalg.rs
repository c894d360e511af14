//! Small dense symmetric-matrix routines (row-major `p x p`).

use crate::scalar::Scalar;

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// if a pivot is not positive.
pub fn cholesky<T: Scalar>(a: &[T], p: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i * p + j];
            for k in 0..j {
                s = s - l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    Some(l)
}

/// Solve `L L' x = b`.
pub fn cholesky_solve<T: Scalar>(l: &[T], p: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..p {
        for k in 0..i {
            y[i] = y[i] - l[i * p + k] * y[k];
        }
        y[i] = y[i] / l[i * p + i];
    }
    for i in (0..p).rev() {
        for k in i + 1..p {
            y[i] = y[i] - l[k * p + i] * y[k];
        }
        y[i] = y[i] / l[i * p + i];
    }
    y
}

pub fn cholesky_inverse<T: Scalar>(l: &[T], p: usize) -> Vec<T> {
    let mut inv = vec![T::zero(); p * p];
    let mut e = vec![T::zero(); p];
    for j in 0..p {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        let col = cholesky_solve(l, p, &e);
        for i in 0..p {
            inv[i * p + j] = col[i];
        }
    }
    inv
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &[T], p: usize) -> Vec<T> {
    let mut m = a.to_vec();
    let two = T::of(2.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..p {
            for j in i + 1..p {
                off = off + m[i * p + j] * m[i * p + j];
            }
        }
        if off.sqrt() <= T::epsilon() * T::of(1e-3) {
            break;
        }
        for q in 1..p {
            for r in 0..q {
                let apq = m[r * p + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * p + q] - m[r * p + r]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..p {
                    let mkr = m[k * p + r];
                    let mkq = m[k * p + q];
                    m[k * p + r] = c * mkr - s * mkq;
                    m[k * p + q] = s * mkr + c * mkq;
                }
                for k in 0..p {
                    let mrk = m[r * p + k];
                    let mqk = m[q * p + k];
                    m[r * p + k] = c * mrk - s * mqk;
                    m[q * p + k] = s * mrk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..p).map(|i| m[i * p + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}
