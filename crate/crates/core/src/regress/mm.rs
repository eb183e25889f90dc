use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::design::{least_squares, weighted_least_squares};
use super::{Coefficient, Design, Method, RegressError, RegressionFit};

#[derive(Debug, Clone, PartialEq)]
pub struct MmConfig {
    pub seed: u64,
    pub subsets: usize,
    /// Bisquare constant of the S-step (50% breakdown with `breakdown` = 0.5).
    pub s_tuning: f64,
    pub breakdown: f64,
    /// Bisquare constant of the M-step (95% Gaussian efficiency).
    pub mm_tuning: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Candidates from the subset search carried into full S refinement.
    pub keep_best: usize,
    /// Concentration steps applied to every elemental candidate.
    pub initial_steps: usize,
}

impl Default for MmConfig {
    fn default() -> Self {
        MmConfig {
            seed: 0,
            subsets: 500,
            s_tuning: 1.547,
            breakdown: 0.5,
            mm_tuning: 4.685,
            tolerance: 1e-8,
            max_iter: 500,
            keep_best: 5,
            initial_steps: 2,
        }
    }
}

impl MmConfig {
    pub fn with_seed(seed: u64) -> Self {
        MmConfig {
            seed,
            ..Self::default()
        }
    }
}

/// Bisquare ρ normalized to [0, 1].
fn rho(u: f64, c: f64) -> f64 {
    let t = u / c;
    if t.abs() >= 1.0 {
        1.0
    } else {
        let a = 1.0 - t * t;
        1.0 - a * a * a
    }
}

/// IRLS weight ψ(u)/u.
fn weight(u: f64, c: f64) -> f64 {
    let t = u / c;
    if t.abs() >= 1.0 {
        0.0
    } else {
        let a = 1.0 - t * t;
        a * a
    }
}

fn psi(u: f64, c: f64) -> f64 {
    u * weight(u, c)
}

fn psi_prime(u: f64, c: f64) -> f64 {
    let t = u / c;
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - t * t) * (1.0 - 5.0 * t * t)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mad_scale(r: &[f64]) -> f64 {
    let mut abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();
    median(&mut abs) / 0.6745
}

/// M-scale: solves mean ρ(r/s) = b by fixed-point iteration.
fn m_scale(r: &[f64], c: f64, b: f64, start: f64) -> f64 {
    let mut s = if start > 0.0 { start } else { mad_scale(r) };
    if s <= 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mean: f64 = r.iter().map(|v| rho(v / s, c)).sum::<f64>() / r.len() as f64;
        let next = s * (mean / b).sqrt();
        if next <= 0.0 {
            return 0.0;
        }
        let done = ((next - s) / s).abs() < 1e-12;
        s = next;
        if done {
            break;
        }
    }
    s
}

fn residuals(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> Vec<f64> {
    (y - x * beta).iter().copied().collect()
}

#[derive(Debug, Clone)]
struct Candidate {
    beta: DVector<f64>,
    scale: f64,
}

/// `steps` iterations of S-estimator IRWLS from `beta`, each with a one-step scale update.
fn concentrate(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    mut beta: DVector<f64>,
    cfg: &MmConfig,
    steps: usize,
    tol: f64,
) -> Option<Candidate> {
    let (c, b) = (cfg.s_tuning, cfg.breakdown);
    let mut r = residuals(x, y, &beta);
    let mut s = mad_scale(&r);
    for _ in 0..steps {
        if s <= 0.0 {
            break;
        }
        let mean: f64 = r.iter().map(|v| rho(v / s, c)).sum::<f64>() / r.len() as f64;
        s *= (mean / b).sqrt();
        if s <= 0.0 {
            break;
        }
        let w: Vec<f64> = r.iter().map(|v| weight(v / s, c)).collect();
        let next = weighted_least_squares(x, y, &w).ok()?;
        let delta = (&next - &beta).amax();
        beta = next;
        r = residuals(x, y, &beta);
        if delta < tol * (1.0 + beta.amax()) {
            break;
        }
    }
    let scale = m_scale(&r, c, b, s);
    Some(Candidate { beta, scale })
}

fn elemental(x: &Design, y: &DVector<f64>, cfg: &MmConfig, subset: usize) -> Option<Candidate> {
    let (n, p) = (x.nrows(), x.ncols());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(subset as u64);
    let idx = sample(&mut rng, n, p).into_vec();
    let xs = x.select_rows(&idx);
    let ys = DVector::from_fn(p, |i, _| y[idx[i]]);
    let beta = least_squares(&xs, &ys).ok()?.beta;
    concentrate(x.matrix(), y, beta, cfg, cfg.initial_steps, 0.0)
}

fn s_estimate(x: &Design, y: &DVector<f64>, cfg: &MmConfig) -> Result<Candidate, RegressError> {
    let mut candidates: Vec<(usize, Candidate)> = (0..cfg.subsets)
        .into_par_iter()
        .filter_map(|i| elemental(x, y, cfg, i).map(|c| (i, c)))
        .collect();
    if candidates.is_empty() {
        return Err(RegressError::Degenerate(
            "no non-singular elemental subset found".into(),
        ));
    }
    candidates.sort_by(|a, b| a.1.scale.total_cmp(&b.1.scale).then(a.0.cmp(&b.0)));
    candidates.truncate(cfg.keep_best.max(1));
    candidates
        .into_iter()
        .filter_map(|(_, c)| concentrate(x.matrix(), y, c.beta, cfg, cfg.max_iter, 1e-12))
        .min_by(|a, b| a.scale.total_cmp(&b.scale))
        .ok_or(RegressError::Singular)
}

/// Robust MM regression with Tukey bisquare ρ.
pub fn mm_fit(y: &[f64], x: &Design, cfg: &MmConfig) -> Result<RegressionFit, RegressError> {
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
    if n < 3 * p || n <= p {
        return Err(RegressError::InsufficientData { n, p });
    }
    // Full-rank check on the whole design up front.
    let yv = DVector::from_column_slice(y);
    least_squares(x.matrix(), &yv)?;

    let start = s_estimate(x, &yv, cfg)?;
    let y_size = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if start.scale <= 1e-12 * y_size {
        return exact_fit(y, x, cfg, &start);
    }
    let s = start.scale;
    let c = cfg.mm_tuning;
    let xm = x.matrix();

    let mut beta = start.beta.clone();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let w: Vec<f64> = residuals(xm, &yv, &beta)
            .iter()
            .map(|r| weight(r / s, c))
            .collect();
        let next = weighted_least_squares(xm, &yv, &w)?;
        let delta = (&next - &beta).amax();
        beta = next;
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let u: Vec<f64> = residuals(xm, &yv, &beta).iter().map(|r| r / s).collect();
    let mean_psi2 = u.iter().map(|v| psi(*v, c).powi(2)).sum::<f64>() / n as f64;
    let mean_dpsi = u.iter().map(|v| psi_prime(*v, c)).sum::<f64>() / n as f64;
    if mean_dpsi <= 0.0 {
        return Err(RegressError::Degenerate(
            "non-positive mean psi derivative; sandwich undefined".into(),
        ));
    }
    let xtx_inv = least_squares(xm, &yv)?.xtx_inv;
    let factor = s * s * (n as f64 / (n - p) as f64) * mean_psi2 / (mean_dpsi * mean_dpsi);

    let objective: f64 = u.iter().map(|v| rho(*v, c)).sum();
    let r2 = pseudo_r2(y, x, objective, s, c, cfg);

    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let coefficients = x
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = (factor * xtx_inv[(j, j)]).max(0.0).sqrt();
            Coefficient {
                name: name.clone(),
                estimate: beta[j],
                se,
                p: two_sided_normal(&normal, beta[j], se),
            }
        })
        .collect();

    Ok(RegressionFit {
        method: Method::Mm,
        coefficients,
        r2,
        n,
        converged,
        seed: Some(cfg.seed),
        scale: s,
    })
}

fn two_sided_normal(normal: &Normal, estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        2.0 * normal.sf((estimate / se).abs())
    } else if estimate == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// More than half the data lie exactly on the S-fit: least squares on that subset.
fn exact_fit(
    y: &[f64],
    x: &Design,
    cfg: &MmConfig,
    start: &Candidate,
) -> Result<RegressionFit, RegressError> {
    let yv = DVector::from_column_slice(y);
    let y_size = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let r = residuals(x.matrix(), &yv, &start.beta);
    let w: Vec<f64> = r
        .iter()
        .map(|v| if v.abs() <= 1e-9 * y_size { 1.0 } else { 0.0 })
        .collect();
    let beta = weighted_least_squares(x.matrix(), &yv, &w)?;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let coefficients = x
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| Coefficient {
            name: name.clone(),
            estimate: beta[j],
            se: 0.0,
            p: two_sided_normal(&normal, beta[j], 0.0),
        })
        .collect();
    let r2 = if x.ncols() > 1 && y.iter().any(|v| *v != y[0]) {
        1.0
    } else {
        0.0
    };
    Ok(RegressionFit {
        method: Method::Mm,
        coefficients,
        r2,
        n: y.len(),
        converged: true,
        seed: Some(cfg.seed),
        scale: 0.0,
    })
}

/// Robust M-location at fixed scale, started from the median.
fn m_location(y: &[f64], s: f64, c: f64, cfg: &MmConfig) -> f64 {
    let mut mu = median(&mut y.to_vec());
    for _ in 0..cfg.max_iter {
        let (num, den) = y.iter().fold((0.0, 0.0), |(num, den), v| {
            let w = weight((v - mu) / s, c);
            (num + w * v, den + w)
        });
        if den <= 0.0 {
            break;
        }
        let next = num / den;
        let done = (next - mu).abs() < cfg.tolerance;
        mu = next;
        if done {
            break;
        }
    }
    mu
}

/// 1 − Σρ(r/s) at the fit over Σρ at the intercept-only robust location.
fn pseudo_r2(y: &[f64], x: &Design, objective: f64, s: f64, c: f64, cfg: &MmConfig) -> f64 {
    if x.ncols() == 1 && x.has_intercept() {
        return 0.0;
    }
    let mu = if x.has_intercept() {
        m_location(y, s, c, cfg)
    } else {
        0.0
    };
    let null: f64 = y.iter().map(|v| rho((v - mu) / s, c)).sum();
    if null <= 0.0 {
        return 0.0;
    }
    (1.0 - objective / null).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use rand::Rng;
    use rand_distr::{Distribution, Normal as NormalDist};

    use super::super::ols;
    use super::*;

    fn outlier_data(seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = NormalDist::new(0.0, 0.1).unwrap();
        let x: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..10.0)).collect();
        let mut y: Vec<f64> = x.iter().map(|x| 2.0 * x + noise.sample(&mut rng)).collect();
        let mut order: Vec<usize> = (0..200).collect();
        order.sort_by(|a, b| x[*b].total_cmp(&x[*a]));
        for &i in &order[..40] {
            y[i] += 50.0;
        }
        (x, y)
    }

    #[test]
    fn rho_constants() {
        assert_eq!(rho(0.0, 1.547), 0.0);
        assert_eq!(rho(2.0, 1.547), 1.0);
        assert!((psi_prime(0.0, 4.685) - 1.0).abs() < 1e-15);
        // Gaussian consistency of the S-step: E[ρ(Z)] ≈ 0.5 at c = 1.547.
        let n = 200_000;
        let h = 16.0 / n as f64;
        let e: f64 = (0..n)
            .map(|i| {
                let z = -8.0 + (i as f64 + 0.5) * h;
                rho(z, 1.547) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() * h
            })
            .sum();
        assert!((e - 0.5).abs() < 1e-3, "{e}");
    }

    #[test]
    fn clean_data_matches_ols() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.37).collect();
        let y: Vec<f64> = x.iter().map(|x| 1.5 - 0.25 * x).collect();
        let d = Design::with_intercept(&[("x", &x)]).unwrap();
        let mm = mm_fit(&y, &d, &MmConfig::with_seed(3)).unwrap();
        let o = ols(&y, &d).unwrap();
        for (a, b) in mm.estimates().iter().zip(o.estimates()) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(mm.converged);
    }

    #[test]
    fn gross_outliers_resisted() {
        let (x, y) = outlier_data(11);
        let d = Design::with_intercept(&[("x", &x)]).unwrap();
        let mm = mm_fit(&y, &d, &MmConfig::with_seed(42)).unwrap();
        let o = ols(&y, &d).unwrap();
        assert!((mm.coefficients[1].estimate - 2.0).abs() < 0.1, "{mm:?}");
        assert!((o.coefficients[1].estimate - 2.0).abs() > 1.0);
        assert!(mm.converged);
        assert!(mm
            .coefficients
            .iter()
            .all(|c| c.se >= 0.0 && c.se.is_finite()));
        assert!((0.0..=1.0).contains(&mm.r2));
    }

    #[test]
    fn bit_reproducible() {
        let (x, y) = outlier_data(5);
        let d = Design::with_intercept(&[("x", &x)]).unwrap();
        let a = mm_fit(&y, &d, &MmConfig::with_seed(9)).unwrap();
        let b = mm_fit(&y, &d, &MmConfig::with_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intercept_only_near_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = NormalDist::new(0.0, 1.0).unwrap();
        let mut y: Vec<f64> = (0..101).map(|_| 3.0 + noise.sample(&mut rng)).collect();
        // Symmetrize about 3.
        for i in 0..50 {
            y[50 + i + 1] = 6.0 - y[i];
        }
        y[50] = 3.0;
        let fit = mm_fit(&y, &Design::intercept_only(101), &MmConfig::with_seed(0)).unwrap();
        let med = median(&mut y.clone());
        assert!((fit.coefficients[0].estimate - med).abs() < 1e-6);
        assert_eq!(fit.r2, 0.0);
    }

    #[test]
    fn reorder_invariance() {
        let (x, y) = outlier_data(21);
        let d = Design::with_intercept(&[("x", &x)]).unwrap();
        let a = mm_fit(&y, &d, &MmConfig::with_seed(4)).unwrap();
        let rx: Vec<f64> = x.iter().rev().copied().collect();
        let ry: Vec<f64> = y.iter().rev().copied().collect();
        let b = mm_fit(
            &ry,
            &Design::with_intercept(&[("x", &rx)]).unwrap(),
            &MmConfig::with_seed(4),
        )
        .unwrap();
        for (u, v) in a.estimates().iter().zip(b.estimates()) {
            assert!((u - v).abs() < 1e-6, "{u} vs {v}");
        }
    }

    #[test]
    fn bounded_influence() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let noise = NormalDist::new(0.0, 0.5).unwrap();
        let x: Vec<f64> = (0..60).map(|i| i as f64 / 6.0).collect();
        let base: Vec<f64> = x
            .iter()
            .map(|x| 1.0 + 0.5 * x + noise.sample(&mut rng))
            .collect();
        let d = Design::with_intercept(&[("x", &x)]).unwrap();
        let cfg = MmConfig::with_seed(2);
        let mut mm_slopes = Vec::new();
        let mut ols_slopes = Vec::new();
        for shift in [1e2, 1e3, 1e4, 1e5] {
            let mut y = base.clone();
            y[59] += shift;
            mm_slopes.push(mm_fit(&y, &d, &cfg).unwrap().coefficients[1].estimate);
            ols_slopes.push(ols(&y, &d).unwrap().coefficients[1].estimate);
        }
        let spread = mm_slopes.iter().fold(f64::MIN, |a, b| a.max(*b))
            - mm_slopes.iter().fold(f64::MAX, |a, b| a.min(*b));
        assert!(spread < 1e-7, "{mm_slopes:?}");
        assert!(ols_slopes[3] - ols_slopes[2] > 100.0 * (ols_slopes[1] - ols_slopes[0]) * 0.9);
    }

    #[test]
    fn too_few_observations() {
        let d = Design::with_intercept(&[("x", &[1.0, 2.0, 3.0, 4.0, 5.0])]).unwrap();
        assert!(matches!(
            mm_fit(&[1.0, 2.0, 3.0, 4.0, 5.0], &d, &MmConfig::default()),
            Err(RegressError::InsufficientData { .. })
        ));
    }
}
