use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::EventStudyError;

/// Exact signed-rank distribution is used up to this many non-zero values.
pub const WILCOXON_EXACT_MAX: usize = 25;

pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTest {
    /// `None` when the sample has zero variance and a non-zero mean.
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub zero_variance: bool,
}

/// One-sample t-test of the mean against 0 with sample sd.
pub fn mean_t_test(values: &[f64]) -> TTest {
    let n = values.len();
    let (mean, sd) = mean_sd(values);
    if sd == 0.0 || n < 2 {
        let t = (mean == 0.0).then_some(0.0);
        return TTest {
            t,
            p: t.map(|_| 1.0),
            zero_variance: true,
        };
    }
    let t = mean / (sd / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive df");
    TTest {
        t: Some(t),
        p: Some((2.0 * dist.sf(t.abs())).min(1.0)),
        zero_variance: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Wilcoxon {
    /// Non-zero values entering the ranking.
    pub n_nonzero: usize,
    /// Sum of (average) ranks of the positive values.
    pub w_plus: f64,
    /// Normal approximation with continuity and tie correction.
    pub z: Option<f64>,
    /// Two-sided p: exact when `exact`, normal otherwise.
    pub p: Option<f64>,
    pub exact: bool,
}

/// Average ranks of `|v|`, doubled so ties stay integral.
fn doubled_ranks(abs: &[f64]) -> (Vec<u32>, Vec<usize>) {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|a, b| abs[*a].total_cmp(&abs[*b]));
    let mut ranks = vec![0u32; abs.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && abs[order[j + 1]] == abs[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 averaged, doubled: (i+1)+(j+1).
        let r = (i + j + 2) as u32;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided exact p for the observed doubled positive-rank sum.
pub fn exact_signed_rank_pvalue(doubled_ranks: &[u32], observed: u32) -> f64 {
    let total: usize = doubled_ranks.iter().map(|r| *r as usize).sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all = (1u64 << doubled_ranks.len()) as f64;
    let obs = observed as usize;
    let lower: u64 = counts[..=obs.min(total)].iter().sum();
    let upper: u64 = counts[obs.min(total + 1)..].iter().sum();
    (2.0 * (lower.min(upper) as f64) / all).min(1.0)
}

/// Wilcoxon signed-rank test of `values` against 0. Zeros are dropped; `None`
/// when nothing remains.
pub fn wilcoxon_signed_rank(values: &[f64]) -> Option<Wilcoxon> {
    let nonzero: Vec<f64> = values.iter().copied().filter(|v| *v != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return None;
    }
    let abs: Vec<f64> = nonzero.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = doubled_ranks(&abs);
    let w2: u32 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let w_plus = f64::from(w2) / 2.0;

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = ties
        .iter()
        .map(|t| (*t as f64).powi(3) - *t as f64)
        .sum::<f64>()
        / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    let z = (var > 0.0).then(|| {
        let d = w_plus - mean;
        d.signum() * (d.abs() - 0.5).max(0.0) / var.sqrt()
    });

    let exact = n <= WILCOXON_EXACT_MAX;
    let p = if exact {
        Some(exact_signed_rank_pvalue(&ranks, w2))
    } else {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        z.map(|z| (2.0 * normal.sf(z.abs())).min(1.0))
    };
    Some(Wilcoxon {
        n_nonzero: n,
        w_plus,
        z,
        p,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSample {
    /// mean(a) − mean(b)
    pub difference: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Welch two-sample t-test.
pub fn two_sample_t(a: &[f64], b: &[f64]) -> Result<TwoSample, EventStudyError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EventStudyError::Degenerate(format!(
            "two-sample t needs ≥ 2 per group (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let (va, vb) = (sa * sa / a.len() as f64, sb * sb / b.len() as f64);
    if va == 0.0 && vb == 0.0 {
        return Err(EventStudyError::Degenerate(
            "both groups have zero variance".into(),
        ));
    }
    let se = (va + vb).sqrt();
    let difference = ma - mb;
    let t = difference / se;
    let df = (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive df");
    Ok(TwoSample {
        difference,
        t,
        df,
        p: (2.0 * dist.sf(t.abs())).min(1.0),
    })
}
