//! Almost-sure fractal dimensions and expected Lebesgue measure of a fat
//! fractal percolation, computed from its probability sequence.
//!
//! Catalog families use closed forms. Explicit sequences go through the
//! windowed evaluation in [`crate::limits`], and the report says so.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{self, Window};
use crate::sequence::{self, analytic_alpha, check_nm, threshold, ExponentSpec, Family, Method, ProbSequence};

/// Default cap on the inner `sup_k` of the Assouad formula.
pub const DEFAULT_K_CAP: u64 = 4096;
/// Tolerance of the ordering and measure/dimension consistency checks on
/// closed-form reports.
pub const ANALYTIC_TOL: f64 = 1e-9;
/// Tolerance of the ordering check on windowed reports.
pub const WINDOWED_TOL: f64 = 5e-3;

/// Window parameters for the windowed dimension formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Windows {
    /// `k` window for liminf / limsup over `k`.
    pub k: Window,
    /// `t` window for the outer Assouad limsup.
    pub t: Window,
    /// Inner Assouad `sup_k` runs over `[1, k_cap]`.
    pub k_cap: u64,
}

impl Default for Windows {
    fn default() -> Self {
        Windows { k: Window::DEFAULT, t: Window::DEFAULT, k_cap: DEFAULT_K_CAP }
    }
}

/// A single dimension value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimValue {
    pub value: f64,
    pub method: Method,
    /// The set is empty almost surely; `value` is 0.
    pub degenerate: bool,
}

/// Expected Lebesgue measure with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
    /// False when a windowed product was still moving at `k_max`.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub hausdorff: f64,
    pub packing: f64,
    pub assouad: f64,
    pub box_lower: f64,
    pub box_upper: f64,
    pub expected_measure: f64,
    pub method: Method,
    pub window: Option<Window>,
    pub n: u32,
    pub m: u32,
    pub degenerate: bool,
    pub measure_converged: bool,
}

fn log_m(m: u32) -> f64 {
    (m as f64).ln()
}

/// Expected Lebesgue measure `∏ p_k` of the limit set.
pub fn expected_measure(seq: &ProbSequence, n: u32, m: u32, k_max: u64) -> Result<MeasureValue> {
    check_nm(n, m)?;
    if k_max < 1 {
        return Err(Error::InvalidParams("k_max must be >= 1".into()));
    }
    let analytic = |value| Ok(MeasureValue { value, method: Method::Analytic, converged: true });
    match seq.family() {
        Family::Mfp { .. } | Family::Table1Family1 { .. } => analytic(0.0),
        // p^{Σ (a^{k−1} − a^k)} = p^1.
        Family::Table1Family2 { p, .. } => analytic(*p),
        Family::Example1 { p, exponents } => match exponents {
            ExponentSpec::ConstantOne | ExponentSpec::ExplicitList { .. } => analytic(0.0),
            ExponentSpec::GeometricGap { .. } => analytic(*p),
        },
        Family::Explicit { .. } => {
            let sums = seq.log_prefix_sums(k_max)?;
            let last = sums[k_max as usize];
            if last < -sequence::LOG_UNDERFLOW {
                return Ok(MeasureValue { value: 0.0, method: Method::Windowed, converged: true });
            }
            let half = sums[(k_max / 2) as usize];
            Ok(MeasureValue {
                value: last.exp(),
                method: Method::Windowed,
                converged: (last - half).abs() < ANALYTIC_TOL,
            })
        }
    }
}

fn finish(raw: f64, n: u32, method: Method, degenerate: bool) -> DimValue {
    if degenerate {
        return DimValue { value: 0.0, method, degenerate };
    }
    DimValue { value: raw.clamp(0.0, n as f64), method, degenerate }
}

fn alpha_of(seq: &ProbSequence, window: Window) -> Result<(f64, Method)> {
    match analytic_alpha(seq) {
        Some(a) => Ok((a, Method::Analytic)),
        None => Ok((sequence::windowed_alpha(seq, window)?, Method::Windowed)),
    }
}

/// `dim_H = n + log_m α`.
pub fn dim_hausdorff(seq: &ProbSequence, n: u32, m: u32, window: Window) -> Result<DimValue> {
    check_nm(n, m)?;
    let (alpha, method) = alpha_of(seq, window)?;
    let degenerate = alpha <= threshold(n, m);
    let raw = if alpha > 0.0 { n as f64 + alpha.ln() / log_m(m) } else { 0.0 };
    Ok(finish(raw, n, method, degenerate))
}

/// Hausdorff dimension of an `Example1` sequence via its exponent means,
/// `n + (liminf Σ_{l≤k} a_l / k)·log_m p`. Independent of the log-product
/// route used by [`dim_hausdorff`].
pub fn example1_hausdorff(seq: &ProbSequence, n: u32, m: u32, window: Window) -> Result<DimValue> {
    check_nm(n, m)?;
    let Family::Example1 { p, exponents } = seq.family() else {
        return Err(Error::InvalidParams("exponent route needs an example1 sequence".into()));
    };
    window.check_span()?;
    let mut cumulative = Vec::with_capacity(window.hi as usize + 1);
    cumulative.push(0.0);
    let mut s = 0.0;
    for k in 1..=window.hi {
        s += exponents.exponent(k);
        cumulative.push(s);
    }
    let terms = limits::extrapolated_terms(window, |k| Ok(cumulative[k as usize] / k as f64))?;
    let mean_exponent = limits::window_min(&terms);
    let log_m_p = p.ln() / log_m(m);
    let raw = n as f64 + mean_exponent * log_m_p;
    let degenerate = raw <= 0.0;
    Ok(finish(raw, n, Method::Windowed, degenerate))
}

fn analytic_limit_dim(seq: &ProbSequence, n: u32, m: u32) -> Option<f64> {
    // For every catalog family the packing and Assouad expressions share the
    // limit n + log_m(lim p_k).
    analytic_alpha(seq).map(|alpha| n as f64 + alpha.ln() / log_m(m))
}

/// Packing dimension: limsup over `k` of
/// `(n + log_m (∏_{l≤k+1} p_l)^{1/(k+1)}) / (1 + (1/n) log_m p_{k+1}^{1/(k+1)})`.
pub fn dim_packing(seq: &ProbSequence, n: u32, m: u32, window: Window) -> Result<DimValue> {
    check_nm(n, m)?;
    let degenerate = alpha_of(seq, window)?.0 <= threshold(n, m);
    if let Some(raw) = analytic_limit_dim(seq, n, m) {
        return Ok(finish(raw, n, Method::Analytic, degenerate));
    }
    let raw = windowed_packing(seq, n, m, window)?;
    Ok(finish(raw, n, Method::Windowed, degenerate))
}

/// The packing formula term-by-term, extrapolated and maximised over `window`.
pub fn windowed_packing(seq: &ProbSequence, n: u32, m: u32, window: Window) -> Result<f64> {
    window.check_span()?;
    let sums = seq.log_prefix_sums(window.hi + 1)?;
    let lm = log_m(m);
    let nf = n as f64;
    let term = |k: u64| -> Result<f64> {
        let k1 = (k + 1) as f64;
        let numerator = nf + sums[k as usize + 1] / (k1 * lm);
        let denominator = 1.0 + seq.ln_pk(k + 1)? / (nf * k1 * lm);
        if denominator <= 0.0 {
            return Err(Error::FormulaSingularity { k });
        }
        Ok(numerator / denominator)
    };
    for k in window.lo..=window.hi {
        term(k)?;
    }
    let terms = limits::extrapolated_terms(window, term)?;
    Ok(limits::window_max(&terms))
}

/// Assouad dimension: `n + limsup_t sup_k log_m (∏_{l=k}^{k+t} p_l)^{1/(t+1)}`.
pub fn dim_assouad(seq: &ProbSequence, n: u32, m: u32, windows: Windows) -> Result<DimValue> {
    check_nm(n, m)?;
    let degenerate = alpha_of(seq, windows.k)?.0 <= threshold(n, m);
    if let Some(raw) = analytic_limit_dim(seq, n, m) {
        return Ok(finish(raw, n, Method::Analytic, degenerate));
    }
    let raw = windowed_assouad(seq, n, m, windows)?;
    Ok(finish(raw, n, Method::Windowed, degenerate))
}

/// Double windowed evaluation: `t` over `windows.t`, `k` over `[1, k_cap]`.
pub fn windowed_assouad(seq: &ProbSequence, n: u32, m: u32, windows: Windows) -> Result<f64> {
    windows.t.check_span()?;
    if windows.k_cap < 1 {
        return Err(Error::InvalidParams("k_cap must be >= 1".into()));
    }
    let sums = seq.log_prefix_sums(windows.k_cap + windows.t.hi)?;
    let lm = log_m(m);
    let mut best = f64::NEG_INFINITY;
    for t in windows.t.lo..=windows.t.hi {
        let mut inner = f64::NEG_INFINITY;
        for k in 1..=windows.k_cap {
            // ln ∏_{l=k}^{k+t} p_l
            let block = sums[(k + t) as usize] - sums[(k - 1) as usize];
            inner = inner.max(block);
        }
        best = best.max(inner / ((t + 1) as f64 * lm));
    }
    Ok(n as f64 + best.min(0.0))
}

/// All dimensions plus expected measure, with consistency checks.
pub fn full_report(seq: &ProbSequence, n: u32, m: u32, windows: Windows) -> Result<DimensionReport> {
    check_nm(n, m)?;
    let h = dim_hausdorff(seq, n, m, windows.k)?;
    let p = dim_packing(seq, n, m, windows.k)?;
    let a = dim_assouad(seq, n, m, windows)?;
    let e = expected_measure(seq, n, m, windows.k.hi)?;

    let method = if seq.is_catalog() { Method::Analytic } else { Method::Windowed };
    let report = DimensionReport {
        hausdorff: h.value,
        packing: p.value,
        assouad: a.value,
        box_lower: h.value,
        box_upper: p.value,
        expected_measure: e.value,
        method,
        window: (method == Method::Windowed).then_some(windows.k),
        n,
        m,
        degenerate: h.degenerate,
        measure_converged: e.converged,
    };
    check_report(&report)?;
    Ok(report)
}

/// Ordering `0 ≤ H ≤ box_lower ≤ box_upper = P ≤ A ≤ n`, and for closed
/// forms the equivalence `E > 0 ⟺ H = n`.
pub fn check_report(r: &DimensionReport) -> Result<()> {
    let tol = match r.method {
        Method::Analytic => ANALYTIC_TOL,
        Method::Windowed => WINDOWED_TOL,
    };
    let chain = [0.0, r.hausdorff, r.box_lower, r.box_upper, r.packing, r.assouad, r.n as f64];
    if let Some(w) = chain.windows(2).find(|w| w[0] > w[1] + tol) {
        return Err(Error::Internal(format!("dimension ordering violated ({} > {}) in {:?}", w[0], w[1], r)));
    }
    if r.box_upper != r.packing || r.box_lower != r.hausdorff {
        return Err(Error::Internal("box dimensions must equal H and P".into()));
    }
    if r.method == Method::Analytic {
        let full_dim = (r.hausdorff - r.n as f64).abs() < ANALYTIC_TOL;
        if r.expected_measure > 0.0 && !full_dim {
            return Err(Error::Internal(format!(
                "positive expected measure {} with dim_H = {} < n",
                r.expected_measure, r.hausdorff
            )));
        }
        if r.hausdorff < r.n as f64 - 1e-6 && r.expected_measure != 0.0 {
            return Err(Error::Internal("dim_H < n with non-zero expected measure".into()));
        }
    }
    Ok(())
}
