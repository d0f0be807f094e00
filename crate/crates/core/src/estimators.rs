//! Monte Carlo checks of the expected measure, survival probability and
//! box-counting dimension.
//!
//! Replicate `i` always uses stream `i` of the master seed. Replicates are
//! evaluated in parallel and reduced in index order, so every estimate is
//! independent of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{level_counts, PercolationParams};
use crate::error::{Error, Result};
use crate::sequence::{Family, ProbSequence};

pub const MIN_REPLICATES: usize = 100;
/// Rejection attempts allowed per required surviving replicate.
pub const MAX_ATTEMPTS: u64 = 1000;
pub const DEFAULT_FIT_MIN_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    ExpectedMeasure,
    SurvivalProb,
    BoxDimension,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::ExpectedMeasure => "expected_measure",
            Quantity::SurvivalProb => "survival_prob",
            Quantity::BoxDimension => "box_dimension",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: Quantity,
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: usize,
    pub depth: u32,
    /// Value the estimate is compared against (`z_score` uses it).
    pub theory: Option<f64>,
    /// Exact value at the simulated depth, when known.
    pub theory_finite_depth: Option<f64>,
    /// Infinite-depth value, for context.
    pub theory_limit: Option<f64>,
    pub z_score: Option<f64>,
}

impl EstimateReport {
    fn with_z(mut self) -> Self {
        self.z_score = match self.theory {
            Some(t) if self.std_error > 0.0 => Some((self.estimate - t) / self.std_error),
            Some(t) if self.estimate == t => Some(0.0),
            _ => None,
        };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFitReport {
    pub levels_used: (u32, u32),
    /// Mean of the per-replicate least-squares slopes.
    pub slope: f64,
    pub slope_std_error: Option<f64>,
    pub intercept: f64,
    pub r_squared: f64,
    /// Mean `N_k` over the surviving replicates, `k` over `levels_used`.
    pub per_level_counts: Vec<f64>,
    pub conditioned_on_survival: bool,
    pub replicates: usize,
    pub attempts: u64,
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidParams(format!("at least {MIN_REPLICATES} replicates required, got {replicates}")));
    }
    Ok(())
}

/// `X_K` for every replicate, in replicate order.
fn final_counts(params: &PercolationParams, replicates: usize) -> Result<Vec<u64>> {
    params.validate()?;
    let results: Vec<Result<u64>> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| level_counts(params, i).map(|c| *c.last().expect("depth >= 1")))
        .collect();
    let mut out = Vec::with_capacity(replicates);
    for r in results {
        match r {
            Ok(x) => out.push(x),
            Err(Error::BudgetExceeded { level, count, budget, .. }) => {
                return Err(Error::BudgetExceeded { level, count, budget, completed_replicates: Some(out.len()) })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Mean and standard error of `λ_n(C(K)) = X_K m^{−nK}`.
pub fn estimate_measure(params: &PercolationParams, replicates: usize) -> Result<EstimateReport> {
    check_replicates(replicates)?;
    let counts = final_counts(params, replicates)?;
    // Exact integer moments, divided once at the end.
    let sum: u128 = counts.iter().map(|&x| x as u128).sum();
    let sum_sq: u128 = counts.iter().map(|&x| (x as u128) * (x as u128)).sum();
    let r = replicates as u128;
    let scale = (params.m as f64).powi(-((params.n * params.depth) as i32));
    let mean = sum as f64 / r as f64 * scale;
    let var_numerator = r * sum_sq - sum * sum;
    let var = var_numerator as f64 / (r * (r - 1)) as f64 * scale * scale;
    let theory = params.seq.log_prefix_product(params.depth as u64)?.exp();
    let limit = crate::dims::expected_measure(&params.seq, params.n, params.m, 4096)?.value;
    Ok(EstimateReport {
        quantity: Quantity::ExpectedMeasure,
        estimate: mean,
        std_error: (var / r as f64).sqrt(),
        replicates,
        depth: params.depth,
        theory: Some(theory),
        theory_finite_depth: Some(theory),
        theory_limit: Some(limit),
        z_score: None,
    }
    .with_z())
}

/// `P(X_K = 0)` for the inhomogeneous branching process with
/// `Binomial(m^n, p_k)` offspring at generation `k`:
/// `f_1(f_2(…f_K(0)))`, `f_k(s) = (1 − p_k + p_k s)^{m^n}`.
pub fn extinction_by_depth(seq: &ProbSequence, n: u32, m: u32, depth: u32) -> Result<f64> {
    let children = (m as f64).powi(n as i32);
    let mut s = 0.0;
    for k in (1..=depth as u64).rev() {
        let p = seq.eval_pk(k)?;
        s = (1.0 - p + p * s).powf(children);
    }
    Ok(s)
}

/// Smallest fixed point of `s = (1 − p + p s)^{m^n}`, by iterating from 0.
pub fn extinction_fixed_point(p: f64, n: u32, m: u32) -> f64 {
    let children = (m as f64).powi(n as i32);
    let mut s = 0.0f64;
    for _ in 0..1_000_000 {
        let next = (1.0 - p + p * s).powf(children);
        if (next - s).abs() < 1e-17 {
            return next;
        }
        s = next;
    }
    s
}

/// Fraction of replicates with `X_K > 0`.
pub fn estimate_survival(params: &PercolationParams, replicates: usize) -> Result<EstimateReport> {
    check_replicates(replicates)?;
    let counts = final_counts(params, replicates)?;
    let alive = counts.iter().filter(|&&x| x > 0).count();
    let frac = alive as f64 / replicates as f64;
    let finite = 1.0 - extinction_by_depth(&params.seq, params.n, params.m, params.depth)?;
    let limit = match params.seq.family() {
        Family::Mfp { p } if *p <= crate::sequence::threshold(params.n, params.m) => Some(0.0),
        Family::Mfp { p } => Some(1.0 - extinction_fixed_point(*p, params.n, params.m)),
        _ => None,
    };
    Ok(EstimateReport {
        quantity: Quantity::SurvivalProb,
        estimate: frac,
        std_error: (frac * (1.0 - frac) / replicates as f64).sqrt(),
        replicates,
        depth: params.depth,
        theory: limit,
        theory_finite_depth: Some(finite),
        theory_limit: limit,
        z_score: None,
    }
    .with_z())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LineFit { slope, intercept, r_squared }
}

/// Box-counting slope of `ln N_k` against `k ln m` over `fit_levels`,
/// averaged over `replicates` realizations conditioned on `X_K > 0`.
///
/// Surviving realizations are the first `replicates` surviving streams in
/// index order, searching at most `MAX_ATTEMPTS · replicates` streams.
pub fn estimate_boxdim(params: &PercolationParams, replicates: usize, fit_levels: (u32, u32)) -> Result<BoxFitReport> {
    params.validate()?;
    let (k_min, k_max) = fit_levels;
    if k_min < 1 || k_max > params.depth || k_max < k_min + 3 {
        return Err(Error::InvalidParams(format!(
            "fit levels [{k_min}, {k_max}] must lie in [1, {}] and span at least 4 levels",
            params.depth
        )));
    }
    if replicates < 1 {
        return Err(Error::InvalidParams("at least one replicate required".into()));
    }
    let max_attempts = MAX_ATTEMPTS * replicates as u64;
    let batch = (replicates as u64).max(rayon::current_num_threads() as u64);
    let mut survivors: Vec<Vec<u64>> = Vec::with_capacity(replicates);
    let mut attempts = 0u64;
    'search: while attempts < max_attempts {
        let end = (attempts + batch).min(max_attempts);
        let results: Vec<Result<Vec<u64>>> = (attempts..end).into_par_iter().map(|i| level_counts(params, i)).collect();
        for r in results {
            attempts += 1;
            let counts = r?;
            if counts[params.depth as usize] > 0 {
                survivors.push(counts);
                if survivors.len() == replicates {
                    break 'search;
                }
            }
        }
    }
    if survivors.is_empty() {
        return Err(Error::AllExtinct { attempts });
    }

    let lm = (params.m as f64).ln();
    let xs: Vec<f64> = (k_min..=k_max).map(|k| k as f64 * lm).collect();
    let fits: Vec<LineFit> = survivors
        .iter()
        .map(|counts| {
            let ys: Vec<f64> = (k_min..=k_max).map(|k| (counts[k as usize] as f64).ln()).collect();
            fit_line(&xs, &ys)
        })
        .collect();
    let r = fits.len() as f64;
    let slope = fits.iter().map(|f| f.slope).sum::<f64>() / r;
    let slope_std_error = (fits.len() > 1).then(|| {
        let var = fits.iter().map(|f| (f.slope - slope).powi(2)).sum::<f64>() / (r - 1.0);
        (var / r).sqrt()
    });
    let per_level_counts =
        (k_min..=k_max).map(|k| survivors.iter().map(|c| c[k as usize] as f64).sum::<f64>() / r).collect();
    Ok(BoxFitReport {
        levels_used: (k_min, k_max),
        slope,
        slope_std_error,
        intercept: fits.iter().map(|f| f.intercept).sum::<f64>() / r,
        r_squared: fits.iter().map(|f| f.r_squared).sum::<f64>() / r,
        per_level_counts,
        conditioned_on_survival: true,
        replicates: fits.len(),
        attempts,
    })
}

/// Column order of [`EstimateReport::csv_record`].
pub const CSV_HEADER: [&str; 11] =
    ["quantity", "n", "m", "K", "family", "params", "replicates", "estimate", "std_error", "theory", "z_score"];

/// 17 significant digits; empty for missing values.
pub fn format_float(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

impl EstimateReport {
    /// One CSV row in [`CSV_HEADER`] order.
    pub fn csv_record(&self, params: &PercolationParams) -> Vec<String> {
        vec![
            self.quantity.as_str().to_string(),
            params.n.to_string(),
            params.m.to_string(),
            params.depth.to_string(),
            params.seq.kind().as_str().to_string(),
            serde_json::to_string(&params.seq).expect("sequence serializes"),
            self.replicates.to_string(),
            format_float(Some(self.estimate)),
            format_float(Some(self.std_error)),
            format_float(self.theory.or(self.theory_finite_depth)),
            format_float(self.z_score),
        ]
    }
}
