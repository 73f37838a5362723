//! Dense helpers for the small matrices used by elliptical laws.

use crate::error::{domain, Error, Result};

pub type Matrix = Vec<Vec<f64>>;

/// Lower-triangular `L` with `L Lᵀ = a`. Fails with the index of the first
/// non-positive pivot.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return domain("matrix must be square");
    }
    for i in 0..n {
        for j in 0..i {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * a[i][j].abs().max(a[j][i].abs()).max(1.0) {
                return domain(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let pivot = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        l[j][j] = pivot.sqrt();
        for i in j + 1..n {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = s / l[j][j];
        }
    }
    Ok(l)
}

pub fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(row, v)).collect()
}

/// `aᵀ v`
pub fn mat_t_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().zip(v).map(|(row, vi)| row[j] * vi).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `uᵀ a u`
pub fn quad_form(a: &[Vec<f64>], u: &[f64]) -> f64 {
    dot(u, &mat_vec(a, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = vec![vec![4.0, 2.0, 0.4], vec![2.0, 5.0, 1.0], vec![0.4, 1.0, 3.0]];
        let l = cholesky(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((s - a[i][j]).abs() < 1e-14);
            }
            assert!(l[i][i] > 0.0);
        }
    }

    #[test]
    fn cholesky_reports_pivot() {
        assert_eq!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]]), Err(Error::NotPositiveDefinite { pivot: 1 }));
        assert_eq!(cholesky(&[vec![-1.0]]), Err(Error::NotPositiveDefinite { pivot: 0 }));
        assert!(cholesky(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
    }

    #[test]
    fn transposed_product() {
        let a = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(mat_t_vec(&a, &[1.0, 1.0]), vec![4.0, 6.0]);
        assert_eq!(quad_form(&a, &[1.0, 1.0]), 10.0);
    }
}
