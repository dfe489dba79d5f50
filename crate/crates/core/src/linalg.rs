//! Small numeric helpers shared by the estimators: moments, standardization,
//! correlation matrices and least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Columns whose variance falls below this are treated as constant.
pub const VARIANCE_FLOOR: f64 = 1e-12;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the n-1 denominator.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

pub fn column_vec(m: &DMatrix<f64>, j: usize) -> Vec<f64> {
    m.column(j).iter().copied().collect()
}

/// Location and scale of every column, used to standardize new data
/// with training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnScaling {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl ColumnScaling {
    pub fn fit(x: &DMatrix<f64>) -> Self {
        let (means, sds) = (0..x.ncols())
            .map(|j| {
                let col = column_vec(x, j);
                (mean(&col), std_dev(&col))
            })
            .unzip();
        ColumnScaling { means, sds }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for j in 0..out.ncols() {
            let (m, s) = (self.means[j], self.sds[j]);
            for v in out.column_mut(j).iter_mut() {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// Standardize every column to mean 0 and unit sample variance. Fails on
/// a constant column.
pub fn standardize(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, ColumnScaling)> {
    let scaling = ColumnScaling::fit(x);
    if let Some(j) = scaling.sds.iter().position(|s| *s * *s < VARIANCE_FLOOR) {
        return Err(Error::ZeroVariance(format!("column {j}")));
    }
    Ok((scaling.apply(x), scaling))
}

/// Rescale a single vector to mean 0, unit sample variance.
pub fn standardize_vec(v: &mut DVector<f64>) -> Result<()> {
    let n = v.len();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let m = v.mean();
    v.add_scalar_mut(-m);
    let var = v.norm_squared() / (n - 1) as f64;
    if var < VARIANCE_FLOOR {
        return Err(Error::ZeroVariance("composite score".into()));
    }
    *v /= var.sqrt();
    Ok(())
}

/// Pearson correlation matrix of the columns of `x`.
pub fn correlation_matrix(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (z, _) = standardize(x)?;
    let n = z.nrows() as f64;
    let mut r = z.transpose() * &z / (n - 1.0);
    for i in 0..r.nrows() {
        r[(i, i)] = 1.0;
    }
    Ok(r)
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Least-squares coefficients for `y ≈ X b` (no implicit intercept).
/// Rank deficiency is reported as singular.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, response has {}",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    let scale = xtx.diagonal().max().max(1.0);
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("normal equations".into()))?;
    // Cholesky succeeds on nearly-singular systems; guard with the pivot size.
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b * b));
    if min_pivot < 1e-11 * scale {
        return Err(Error::Singular("normal equations".into()));
    }
    Ok(chol.solve(&xty))
}

/// Least squares with an intercept column prepended. Returns
/// `(intercept, slopes)`.
pub fn least_squares_with_intercept(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<(f64, DVector<f64>)> {
    let n = x.nrows();
    let mut design = DMatrix::from_element(n, x.ncols() + 1, 1.0);
    design.view_mut((0, 1), (n, x.ncols())).copy_from(x);
    let b = least_squares(&design, y)?;
    Ok((b[0], b.rows(1, x.ncols()).into_owned()))
}

/// Select the given columns of `x` into a new matrix.
pub fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

/// Select the given rows of `x` into a new matrix.
pub fn select_rows(x: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

/// Eigenvalues of a symmetric matrix, largest first.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Sample skewness (moment estimator, population denominators).
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    m3 / m2.powf(1.5)
}

/// Quantile by linear interpolation between order statistics
/// (position `p * (n - 1)` in the sorted sample).
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_coefficients() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, -1.0]);
        let y = DVector::from_vec(vec![2.0, -1.0, 1.0, 5.0]);
        let b = least_squares(&x, &y).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(least_squares(&x, &y), Err(Error::Singular(_))));
    }

    #[test]
    fn quantile_interpolates() {
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!((quantile_linear(&s, 0.5) - 5.5).abs() < 1e-12);
        assert!((quantile_linear(&s, 0.9) - 9.1).abs() < 1e-12);
    }

    #[test]
    fn standardize_rejects_constant_column() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 4.0, 2.0, 4.0, 3.0, 4.0]);
        assert!(standardize(&x).is_err());
    }
}
