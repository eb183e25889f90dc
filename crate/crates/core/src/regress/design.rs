use nalgebra::{DMatrix, DVector};

use super::RegressError;

/// Named design matrix, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    matrix: DMatrix<f64>,
    has_intercept: bool,
}

pub const INTERCEPT: &str = "const";

impl Design {
    /// Intercept column named `const` followed by the given regressors.
    pub fn with_intercept(columns: &[(&str, &[f64])]) -> Result<Self, RegressError> {
        let n = columns.first().map(|(_, c)| c.len()).ok_or_else(|| {
            RegressError::Dimension("at least one regressor required; use intercept_only".into())
        })?;
        let ones = vec![1.0; n];
        let mut all: Vec<(&str, &[f64])> = vec![(INTERCEPT, &ones)];
        all.extend_from_slice(columns);
        Self::build(&all, true)
    }

    pub fn intercept_only(n: usize) -> Self {
        Design {
            names: vec![INTERCEPT.to_string()],
            matrix: DMatrix::from_element(n, 1, 1.0),
            has_intercept: true,
        }
    }

    /// Columns used as given; no intercept is added.
    pub fn from_columns(columns: &[(&str, &[f64])]) -> Result<Self, RegressError> {
        let has_intercept = columns.iter().any(|(_, c)| c.iter().all(|&v| v == 1.0));
        Self::build(columns, has_intercept)
    }

    fn build(columns: &[(&str, &[f64])], has_intercept: bool) -> Result<Self, RegressError> {
        let n = columns[0].1.len();
        if let Some((name, c)) = columns.iter().find(|(_, c)| c.len() != n) {
            return Err(RegressError::Dimension(format!(
                "column {name} has {} rows, expected {n}",
                c.len()
            )));
        }
        if columns
            .iter()
            .any(|(_, c)| c.iter().any(|v| !v.is_finite()))
        {
            return Err(RegressError::NonFinite);
        }
        let matrix = DMatrix::from_fn(n, columns.len(), |i, j| columns[j].1[i]);
        Ok(Design {
            names: columns.iter().map(|(n, _)| n.to_string()).collect(),
            matrix,
            has_intercept,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Rows selected by `idx`, in that order.
    pub(crate) fn select_rows(&self, idx: &[usize]) -> DMatrix<f64> {
        self.matrix.select_rows(idx)
    }
}

/// Least squares via Householder QR with a relative rank check on `R`.
pub(crate) struct LeastSquares {
    pub beta: DVector<f64>,
    /// `(XᵀX)⁻¹` of the (weighted) design.
    pub xtx_inv: DMatrix<f64>,
}

const RANK_TOLERANCE: f64 = 1e-10;

pub(crate) fn least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<LeastSquares, RegressError> {
    let p = x.ncols();
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 || (0..p).any(|j| r[(j, j)].abs() <= RANK_TOLERANCE * max_diag) {
        return Err(RegressError::Singular);
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(RegressError::Singular)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(RegressError::Singular)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares { beta, xtx_inv })
}

/// Weighted least squares, weights assumed non-negative.
pub(crate) fn weighted_least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
) -> Result<DVector<f64>, RegressError> {
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let xw = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * sw[i]);
    let yw = DVector::from_fn(y.len(), |i, _| y[i] * sw[i]);
    Ok(least_squares(&xw, &yw)?.beta)
}
