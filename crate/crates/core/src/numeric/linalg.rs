use alloc::format;
use alloc::vec;

use super::DenseMatrix;
use crate::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "cholesky (square)",
            expected: n,
            actual: a.cols(),
        });
    }
    let scale = a.max_abs();
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(Error::NotSymmetric(format!("{n}x{n} matrix")));
            }
        }
    }
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let row_j = &l.row(j)[..j];
        let diag = a[(j, j)] - super::dot(row_j, row_j);
        if !(diag > 0.0 && diag.is_finite()) {
            return Err(Error::NotPositiveDefinite(format!(
                "{n}x{n} matrix (pivot {j} = {diag:e})"
            )));
        }
        let pivot = libm::sqrt(diag);
        l[(j, j)] = pivot;
        for i in j + 1..n {
            let v = (a[(i, j)] - super::dot(&l.row(i)[..j], &l.row(j)[..j])) / pivot;
            l[(i, j)] = v;
        }
    }
    Ok(l)
}

/// Solves `A·X = B` for symmetric positive-definite `A` via its Cholesky factor.
pub fn spd_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "spd_solve rhs rows",
            expected: n,
            actual: b.rows(),
        });
    }
    let l = cholesky(a)?;
    let k = b.cols();
    // forward: L·Y = B, one row of Y at a time
    let mut y = b.clone();
    let mut acc = vec![0.0; k];
    for i in 0..n {
        acc.copy_from_slice(y.row(i));
        for p in 0..i {
            let lip = l[(i, p)];
            if lip != 0.0 {
                for (a, &yp) in acc.iter_mut().zip(y.row(p)) {
                    *a -= lip * yp;
                }
            }
        }
        let d = l[(i, i)];
        for (dst, a) in y.row_mut(i).iter_mut().zip(&acc) {
            *dst = a / d;
        }
    }
    // backward: Lᵀ·X = Y
    let mut x = y;
    for i in (0..n).rev() {
        acc.copy_from_slice(x.row(i));
        for p in i + 1..n {
            let lpi = l[(p, i)];
            if lpi != 0.0 {
                for (a, &xp) in acc.iter_mut().zip(x.row(p)) {
                    *a -= lpi * xp;
                }
            }
        }
        let d = l[(i, i)];
        for (dst, a) in x.row_mut(i).iter_mut().zip(&acc) {
            *dst = a / d;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng as _;

    fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = seeded(seed);
        let m = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let mut a = m.transpose().matmul(&m).unwrap();
        a.add_diagonal(1.0);
        a
    }

    #[test]
    fn identity_returns_rhs() {
        let b = DenseMatrix::from_rows(&[[1.0, -2.0], [3.5, 0.25], [7.0, 9.0]]).unwrap();
        assert_eq!(spd_solve(&DenseMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[[1.0], [1.0]]).unwrap();
        let x = spd_solve(&a, &b).unwrap();
        assert!((x[(0, 0)] - 0.125).abs() < 1e-15);
        assert!((x[(1, 0)] - 0.25).abs() < 1e-15);
        // A·x reproduces b
        let resid = a.matmul(&x).unwrap().sub(&b).unwrap().max_abs();
        assert!(resid < 1e-15);
    }

    #[test]
    fn indefinite_and_asymmetric_rejected() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let err = spd_solve(&a, &DenseMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)), "{err}");
        let a = DenseMatrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn factor_reconstructs_random_spd() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 17);
            let a = random_spd(n, seed);
            let l = cholesky(&a).unwrap();
            let rebuilt = l.matmul(&l.transpose()).unwrap();
            let err = rebuilt.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
            assert!(err <= 1e-9, "n={n} err={err}");
        }
    }

    #[test]
    fn residual_bound() {
        let mut rng = seeded(99);
        for seed in 0..10 {
            let a = random_spd(30, 100 + seed);
            let b = DenseMatrix::from_fn(30, 4, |_, _| rng.random_range(-5.0..5.0));
            let x = spd_solve(&a, &b).unwrap();
            let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
            let bound = 1e-8 * (a.frobenius_norm() * x.frobenius_norm() + b.frobenius_norm());
            assert!(resid <= bound, "{resid} > {bound}");
        }
    }
}
