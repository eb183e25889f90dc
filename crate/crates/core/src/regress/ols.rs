use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::design::least_squares;
use super::{Coefficient, Design, Method, RegressError, RegressionFit};

/// Ordinary least squares with classical standard errors.
pub fn ols(y: &[f64], x: &Design) -> Result<RegressionFit, RegressError> {
    let (n, p) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(RegressError::Dimension(format!(
            "y has {} rows, design {n}",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressError::NonFinite);
    }
    if n <= p {
        return Err(RegressError::InsufficientData { n, p });
    }
    let yv = DVector::from_column_slice(y);
    let ls = least_squares(x.matrix(), &yv)?;
    let resid = &yv - x.matrix() * &ls.beta;
    let ssr = resid.norm_squared();
    let dof = (n - p) as f64;
    let sigma2 = ssr / dof;
    let r2 = r_squared(y, ssr, x.has_intercept());

    let t_dist = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
    let coefficients = x
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = (sigma2 * ls.xtx_inv[(j, j)]).max(0.0).sqrt();
            let estimate = ls.beta[j];
            let p = if se > 0.0 {
                2.0 * t_dist.sf((estimate / se).abs())
            } else if estimate == 0.0 {
                1.0
            } else {
                0.0
            };
            Coefficient {
                name: name.clone(),
                estimate,
                se,
                p,
            }
        })
        .collect();

    Ok(RegressionFit {
        method: Method::Ols,
        coefficients,
        r2,
        n,
        converged: true,
        seed: None,
        scale: sigma2.sqrt(),
    })
}

/// Centered R² when an intercept is present, uncentered otherwise; 0 when y has no variation.
fn r_squared(y: &[f64], ssr: f64, centered: bool) -> f64 {
    let mean = if centered {
        y.iter().sum::<f64>() / y.len() as f64
    } else {
        0.0
    };
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if sst == 0.0 {
        return 0.0;
    }
    (1.0 - ssr / sst).clamp(0.0, 1.0)
}
