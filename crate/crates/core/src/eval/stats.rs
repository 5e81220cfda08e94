//! Correlation coefficients and two-sided significance tests.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTest {
    pub coefficient: f64,
    /// Two-sided, from a t statistic with `n − 2` degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
}

fn check_pair(x: &[f64], y: &[f64], needed: usize) -> Result<(), EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < needed {
        return Err(EvalError::TooFewSamples { needed, got: x.len() });
    }
    Ok(())
}

fn coefficient(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn two_sided(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

fn correlation_p(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    two_sided(r * (df / (1.0 - r * r)).sqrt(), df)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationTest, EvalError> {
    check_pair(x, y, 3)?;
    let r = coefficient(x, y)?;
    Ok(CorrelationTest {
        coefficient: r,
        p_value: correlation_p(r, x.len()),
        n: x.len(),
    })
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            out[idx] = rank;
        }
        i = j;
    }
    out
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationTest, EvalError> {
    check_pair(x, y, 3)?;
    pearson(&ranks(x), &ranks(y))
}

/// Paired two-sided t-test on `a − b`.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    check_pair(a, b, 2)?;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let df = d.len() - 1;
    if var == 0.0 {
        let (statistic, p_value) = if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        };
        return Ok(TTest { statistic, p_value, df });
    }
    let t = mean / (var / n).sqrt();
    Ok(TTest {
        statistic: t,
        p_value: two_sided(t, df as f64),
        df,
    })
}

/// Two-sided permutation p-value for a correlation coefficient: the share of
/// shuffles of `y` whose |coefficient| reaches the observed one, with the
/// usual +1 correction.
pub fn permutation_p<F>(x: &[f64], y: &[f64], statistic: F, permutations: usize, seed: u64) -> Result<f64, EvalError>
where
    F: Fn(&[f64], &[f64]) -> Result<CorrelationTest, EvalError>,
{
    let observed = statistic(x, y)?.coefficient.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut hits = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        let r = match statistic(x, &shuffled) {
            Ok(t) => t.coefficient.abs(),
            Err(EvalError::ConstantInput) => 0.0,
            Err(e) => return Err(e),
        };
        if r >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((hits + 1) as f64 / (permutations + 1) as f64)
}
