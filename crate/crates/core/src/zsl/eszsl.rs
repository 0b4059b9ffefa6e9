//! Closed-form bilinear compatibility model.
//!
//! Minimizes `‖XᵀWA − Y‖²_F + γ‖WA‖²_F + γ‖XᵀW‖²_F + γ²‖W‖²_F`, whose stationary
//! point is `W = (XXᵀ + γI)⁻¹·X·Y·Aᵀ·(AAᵀ + γI)⁻¹`. Both inverses are applied as
//! Cholesky solves.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_dim, AttributeMatrix, Prediction};
use crate::numeric::{dot, spd_solve, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EszslModel {
    /// `p × s`.
    pub w: DenseMatrix,
    pub gamma: f64,
}

fn named(err: Error, name: &str) -> Error {
    match err {
        Error::NotPositiveDefinite(detail) => Error::NotPositiveDefinite(format!("{name}: {detail}")),
        Error::NotSymmetric(detail) => Error::NotSymmetric(format!("{name}: {detail}")),
        other => other,
    }
}

fn solve_closed_form(
    mut feature_gram: DenseMatrix,
    mut attribute_gram: DenseMatrix,
    xya: &DenseMatrix,
    gamma: f64,
) -> Result<EszslModel> {
    feature_gram.add_diagonal(gamma);
    attribute_gram.add_diagonal(gamma);
    // (XXᵀ + γI)⁻¹·B
    let left = spd_solve(&feature_gram, xya).map_err(|e| named(e, "X·Xᵀ + γI"))?;
    // left·(AAᵀ + γI)⁻¹ = ((AAᵀ + γI)⁻¹·leftᵀ)ᵀ by symmetry
    let w = spd_solve(&attribute_gram, &left.transpose())
        .map_err(|e| named(e, "A·Aᵀ + γI"))?
        .transpose();
    if !w.is_finite() {
        return Err(Error::NonFinite("ESZSL weights".into()));
    }
    Ok(EszslModel { w, gamma })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")))
    }
}

/// Fits from explicit matrices: `x` is `p × m`, `y` is `m × n_s` one-hot, `a` is
/// `s × n_s`.
pub fn eszsl_fit(x: &DenseMatrix, y: &DenseMatrix, a: &DenseMatrix, gamma: f64) -> Result<EszslModel> {
    check_gamma(gamma)?;
    if x.cols() == 0 {
        return Err(Error::InvalidArgument("ESZSL needs at least one example".into()));
    }
    check_dim("eszsl_fit Y rows", x.cols(), y.rows())?;
    check_dim("eszsl_fit A columns", y.cols(), a.cols())?;
    for i in 0..y.rows() {
        let row = y.row(i);
        let ones = row.iter().filter(|&&v| v == 1.0).count();
        let zeros = row.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != row.len() {
            return Err(Error::InvalidArgument(format!("row {i} of Y is not one-hot")));
        }
    }
    let xya = x.matmul(y)?.matmul(&a.transpose())?;
    solve_closed_form(x.gram(), a.gram(), &xya, gamma)
}

/// Fits from feature rows and label indices into `seen`.
pub fn eszsl_fit_features(
    features: &[Vec<f64>],
    labels: &[usize],
    seen: &AttributeMatrix,
    gamma: f64,
) -> Result<EszslModel> {
    check_gamma(gamma)?;
    check_dim("eszsl_fit_features labels", features.len(), labels.len())?;
    if features.is_empty() {
        return Err(Error::InvalidArgument("ESZSL needs at least one example".into()));
    }
    let p = features[0].len();
    // Xᵀ has the features as rows; X·Xᵀ is its column Gram, built from X's rows.
    let x = DenseMatrix::from_rows(features)?.transpose();
    let mut xy = DenseMatrix::zeros(p, seen.len());
    for (f, &l) in features.iter().zip(labels) {
        if l >= seen.len() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: seen.len(),
            });
        }
        for (j, v) in f.iter().enumerate() {
            xy[(j, l)] += v;
        }
    }
    let a = seen.as_columns();
    let xya = xy.matmul(&a.transpose())?;
    solve_closed_form(x.gram(), a.gram(), &xya, gamma)
}

impl EszslModel {
    pub fn feature_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn attribute_dim(&self) -> usize {
        self.w.cols()
    }
}

/// Ranks candidates by `xᵀ·W·â`.
pub fn eszsl_rank(model: &EszslModel, x: &[f64], candidates: &AttributeMatrix) -> Result<Prediction> {
    check_dim("eszsl_rank attributes", model.attribute_dim(), candidates.dim())?;
    let projected = model.w.matvec_transposed(x)?;
    let scores: Vec<f64> = (0..candidates.len())
        .map(|i| dot(&projected, candidates.vector(i)))
        .collect();
    Ok(Prediction::from_scores(candidates.labels(), &scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use alloc::string::String;
    use alloc::vec;
    use rand::Rng as _;

    fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = seeded(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn one_hot(labels: &[usize], n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(labels.len(), n, |i, j| if labels[i] == j { 1.0 } else { 0.0 })
    }

    /// Half the gradient of the composite objective: (XXᵀ+γI)·W·(AAᵀ+γI) − X·Y·Aᵀ.
    fn half_gradient(x: &DenseMatrix, y: &DenseMatrix, a: &DenseMatrix, w: &DenseMatrix, gamma: f64) -> DenseMatrix {
        let xwa = x.transpose().matmul(w).unwrap().matmul(a).unwrap();
        let resid = xwa.sub(y).unwrap();
        let mut g = x.matmul(&resid).unwrap().matmul(&a.transpose()).unwrap();
        let wa = w.matmul(a).unwrap().matmul(&a.transpose()).unwrap();
        let xxw = x.matmul(&x.transpose()).unwrap().matmul(w).unwrap();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                g[(i, j)] += gamma * wa[(i, j)] + gamma * xxw[(i, j)] + gamma * gamma * w[(i, j)];
            }
        }
        g
    }

    #[test]
    fn identity_problem_recovers_identity() {
        let n = 4;
        let eye = DenseMatrix::identity(n);
        let model = eszsl_fit(&eye, &eye, &eye, 1e-12).unwrap();
        assert!(model.w.sub(&eye).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn stationary_point_of_objective() {
        let (m, p, s, ns) = (30, 10, 5, 6);
        let x = random(p, m, 1);
        let labels: Vec<usize> = (0..m).map(|i| (i * 7) % ns).collect();
        let y = one_hot(&labels, ns);
        let a = random(s, ns, 2);
        let model = eszsl_fit(&x, &y, &a, 1.0).unwrap();
        let g = half_gradient(&x, &y, &a, &model.w, 1.0);
        let scale = x.matmul(&y).unwrap().matmul(&a.transpose()).unwrap().max_abs();
        assert!(g.max_abs() <= 1e-8 * scale, "{} vs {scale}", g.max_abs());
    }

    #[test]
    fn feature_path_matches_matrix_path() {
        let (m, p, s, ns) = (25, 7, 4, 5);
        let x = random(p, m, 3);
        let labels: Vec<usize> = (0..m).map(|i| (i * 3 + 1) % ns).collect();
        let a = random(s, ns, 4);
        let by_matrix = eszsl_fit(&x, &one_hot(&labels, ns), &a, 0.5).unwrap();
        let features: Vec<Vec<f64>> = (0..m).map(|i| x.column(i)).collect();
        let names = (0..ns).map(|i| format!("l{i}")).collect();
        let attrs_rows: Vec<Vec<f64>> = (0..ns).map(|j| a.column(j)).collect();
        let seen = AttributeMatrix::new(names, &attrs_rows).unwrap();
        let by_features = eszsl_fit_features(&features, &labels, &seen, 0.5).unwrap();
        assert!(by_matrix.w.sub(&by_features.w).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn huge_gamma_shrinks_to_zero() {
        let x = random(6, 20, 5);
        let labels: Vec<usize> = (0..20).map(|i| i % 3).collect();
        let a = random(4, 3, 6);
        let model = eszsl_fit(&x, &one_hot(&labels, 3), &a, 1e9).unwrap();
        let xya = x.matmul(&one_hot(&labels, 3)).unwrap().matmul(&a.transpose()).unwrap();
        // ‖W‖ ≈ ‖XYAᵀ‖/γ² once γ dominates both Gram matrices
        assert!(model.w.frobenius_norm() <= xya.frobenius_norm() / 1e9 * 1e-6);
    }

    #[test]
    fn input_validation() {
        let x = random(3, 4, 7);
        let y = one_hot(&[0, 1, 0, 1], 2);
        let a = random(2, 2, 8);
        assert!(eszsl_fit(&x, &y, &a, 0.0).is_err());
        let mut bad = y.clone();
        bad[(0, 1)] = 1.0;
        assert!(eszsl_fit(&x, &bad, &a, 1.0).is_err());
        assert!(eszsl_fit(&x, &one_hot(&[0, 1, 0], 2), &a, 1.0).is_err());
    }

    #[test]
    fn ranking_cases() {
        let names: Vec<String> = vec!["u0".into(), "u1".into(), "u2".into()];
        let unseen = AttributeMatrix::new(names, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let zero = EszslModel {
            w: DenseMatrix::zeros(3, 2),
            gamma: 1.0,
        };
        let p = eszsl_rank(&zero, &[1.0, 2.0, 3.0], &unseen).unwrap();
        assert_eq!(p.labels(), ["u0", "u1", "u2"]);
        assert!(p.ranked.iter().all(|r| r.score == 0.0));

        let model = EszslModel {
            w: random(3, 2, 9),
            gamma: 1.0,
        };
        let x = [0.3, -0.2, 0.9];
        let doubled: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
        assert_eq!(
            eszsl_rank(&model, &x, &unseen).unwrap().labels(),
            eszsl_rank(&model, &doubled, &unseen).unwrap().labels()
        );
    }
}
