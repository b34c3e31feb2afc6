//! Small dense linear algebra: vector helpers, a cyclic Jacobi
//! eigendecomposition for symmetric matrices and a spectral minimum-norm
//! least-squares solve. Instances here are desk scale (n up to ~10^3), so a
//! plain O(n^3) Jacobi sweep is plenty and keeps the crate dependency-free.

use crate::error::{Error, Result};
use crate::scalar::{cst, Scalar};

#[inline]
pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + *x * *y;
    }
    acc
}

#[inline]
pub fn norm_sq<F: Scalar>(a: &[F]) -> F {
    dot(a, a)
}

/// `y += alpha * x`
#[inline]
pub fn axpy<F: Scalar>(alpha: F, x: &[F], y: &mut [F]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * *xi;
    }
}

pub fn sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

/// Dense symmetric matrix in row-major order.
#[derive(Debug, Clone)]
pub struct SymMatrix<F> {
    pub n: usize,
    pub data: Vec<F>, // n * n
}

impl<F: Scalar> SymMatrix<F> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![F::zero(); n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> F {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.n + j] = v;
    }

    /// `(1/m) * sum_i rows[i] rows[i]^T`
    pub fn second_moment(rows: &[Vec<F>]) -> Self {
        let n = rows[0].len();
        let mut m = SymMatrix::zeros(n);
        for row in rows {
            for i in 0..n {
                for j in i..n {
                    let v = m.at(i, j) + row[i] * row[j];
                    m.set(i, j, v);
                }
            }
        }
        let inv_m = F::one() / cst_len::<F>(rows.len());
        for i in 0..n {
            for j in i..n {
                let v = m.at(i, j) * inv_m;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    pub fn mat_vec(&self, x: &[F]) -> Vec<F> {
        let n = self.n;
        self.data.chunks_exact(n).map(|row| dot(row, x)).collect()
    }
}

#[inline]
fn cst_len<F: Scalar>(n: usize) -> F {
    cst(n as f64)
}

/// Eigendecomposition of a symmetric matrix: `a = V diag(values) V^T`,
/// eigenvalues ascending, eigenvectors as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen<F> {
    pub values: Vec<F>,
    /// Row-major n*n; column k is the eigenvector for `values[k]`.
    pub vectors: Vec<F>,
    pub n: usize,
}

impl<F: Scalar> SymEigen<F> {
    pub fn eigenvector(&self, k: usize) -> Vec<F> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
pub fn sym_eigen<F: Scalar>(a: &SymMatrix<F>) -> Result<SymEigen<F>> {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = F::one();
    }
    let eps = cst::<F>(1e-14);
    let scale = {
        let mut s = F::zero();
        for i in 0..n {
            s = s.max(m[i * n + i].abs());
        }
        s.max(F::one())
    };

    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = F::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + m[i * n + j] * m[i * n + j];
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= eps * scale * cst::<F>(1e-3) {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (cst::<F>(2.0) * apq);
                // Stable tangent of the rotation angle.
                let t = {
                    let sign = if theta >= F::zero() {
                        F::one()
                    } else {
                        -F::one()
                    };
                    sign / (theta.abs() + (F::one() + theta * theta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| m[i * n + i]).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let values: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![F::zero(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "eigensolve produced non-finite values".into(),
        ));
    }
    Ok(SymEigen { values, vectors, n })
}

/// Minimum-norm least-squares solution of `min_x (1/m) sum_i (a_i^T x - b_i)^2 / 2`
/// via the spectral pseudoinverse of the second-moment matrix. Returns the
/// solution together with the eigenvalues of `(1/m) sum a_i a_i^T` (ascending,
/// tiny ones clamped to zero by `cutoff`).
pub fn min_norm_least_squares<F: Scalar>(
    rows: &[Vec<F>],
    targets: &[F],
) -> Result<(Vec<F>, Vec<F>)> {
    if rows.is_empty() {
        return Err(Error::OracleConstruction(
            "least squares needs at least one row".into(),
        ));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::OracleConstruction("ragged data rows".into()));
    }
    if targets.len() != rows.len() {
        return Err(Error::OracleConstruction(
            "targets length != number of rows".into(),
        ));
    }

    let h = SymMatrix::second_moment(rows);
    // rhs = (1/m) sum b_i a_i
    let inv_m = F::one() / cst_len::<F>(rows.len());
    let mut rhs = vec![F::zero(); n];
    for (row, &b) in rows.iter().zip(targets) {
        axpy(b * inv_m, row, &mut rhs);
    }

    let eig = sym_eigen(&h)?;
    let lambda_max = eig
        .values
        .last()
        .copied()
        .unwrap_or(F::zero())
        .max(F::zero());
    let cutoff = cst::<F>(1e-12) * lambda_max;

    let mut x = vec![F::zero(); n];
    let mut clamped = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = eig.values[k];
        let vk = eig.eigenvector(k);
        if lambda > cutoff {
            let coeff = dot(&vk, &rhs) / lambda;
            axpy(coeff, &vk, &mut x);
            clamped.push(lambda);
        } else {
            clamped.push(F::zero());
        }
    }
    Ok((x, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_diagonal_spectrum() {
        let mut m = SymMatrix::zeros(3);
        for (i, v) in [3.0, 1.0, 2.0].iter().enumerate() {
            m.set(i, i, *v);
        }
        let eig = sym_eigen(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_2x2_known() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let mut m = SymMatrix::zeros(2);
        m.set(0, 0, 2.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 2.0);
        let eig = sym_eigen(&m).unwrap();
        assert!((eig.values[0] - 1.0f64).abs() < 1e-12);
        assert!((eig.values[1] - 3.0f64).abs() < 1e-12);
        // Eigenvector for 1 is (1,-1)/sqrt(2) up to sign.
        let v0 = eig.eigenvector(0);
        assert!((v0[0] + v0[1]).abs() < 1e-12);
    }

    #[test]
    fn min_norm_solution_hand_case() {
        // rows (1,), (1,), targets (+1, -1): x* = 0.
        let rows = vec![vec![1.0f64], vec![1.0]];
        let (x, eigs) = min_norm_least_squares(&rows, &[1.0, -1.0]).unwrap();
        assert!(x[0].abs() < 1e-14);
        assert!((eigs[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn min_norm_prefers_smallest_norm_on_singular_system() {
        // Single row (1, 0): any (x0, t) with x0 = b is a minimizer; the
        // minimum-norm one has second coordinate 0.
        let rows = vec![vec![1.0f64, 0.0]];
        let (x, eigs) = min_norm_least_squares(&rows, &[2.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!(x[1].abs() < 1e-14);
        assert_eq!(eigs[0], 0.0);
    }

    #[test]
    fn least_squares_residual_orthogonal_to_row_space() {
        let rows = vec![
            vec![1.0f64, 2.0, 0.5],
            vec![-1.0, 1.0, 1.5],
            vec![0.5, 0.5, -2.0],
            vec![2.0, -1.0, 0.0],
        ];
        let targets = [1.0, 2.0, -0.5, 0.25];
        let (x, _) = min_norm_least_squares(&rows, &targets).unwrap();
        // Gradient of the objective at x* must vanish.
        let m = rows.len() as f64;
        let mut grad = vec![0.0f64; 3];
        for (row, &b) in rows.iter().zip(&targets) {
            let r = dot(row, &x) - b;
            axpy(r / m, row, &mut grad);
        }
        assert!(norm_sq(&grad).sqrt() < 1e-12);
    }
}
