//! Retention-probability sequences `p_k` and the survival / interior
//! classifiers `α` and `β` derived from them.
//!
//! All products over the sequence are carried as sums of `ln p_k`; values
//! are exponentiated only when a report is assembled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{self, Window};

/// Partial sums of `m^{nk}·(−ln p_k)` beyond this are treated as divergent
/// (the product underflows in double precision).
pub const LOG_UNDERFLOW: f64 = 700.0;

/// Exponents `a_k` of the power family `p_k = p^{a_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    /// `a_k = 1` for every `k` (Mandelbrot percolation).
    ConstantOne,
    /// Finite list of exponents followed by a constant tail.
    ExplicitList { values: Vec<f64>, tail: f64 },
    /// `a_k = a^{k−1} − a^k`, `0 < a < 1`.
    GeometricGap { a: f64 },
}

impl ExponentSpec {
    pub fn exponent(&self, k: u64) -> f64 {
        match self {
            ExponentSpec::ConstantOne => 1.0,
            ExponentSpec::ExplicitList { values, tail } => values.get(k as usize - 1).copied().unwrap_or(*tail),
            ExponentSpec::GeometricGap { a } => geometric_gap(*a, k),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ExponentSpec::ConstantOne => Ok(()),
            ExponentSpec::ExplicitList { values, tail } => {
                if values.iter().chain(std::iter::once(tail)).any(|a| !(a.is_finite() && *a > 0.0)) {
                    return Err(Error::InvalidSequence("exponents must be finite and > 0".into()));
                }
                Ok(())
            }
            ExponentSpec::GeometricGap { a } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::InvalidSequence(format!("geometric gap parameter must be in (0, 1), got {a}")));
                }
                Ok(())
            }
        }
    }

    /// `a_k` non-increasing, i.e. `p_k = p^{a_k}` non-decreasing.
    fn is_monotone(&self) -> bool {
        match self {
            ExponentSpec::ConstantOne | ExponentSpec::GeometricGap { .. } => true,
            ExponentSpec::ExplicitList { values, tail } => {
                values.iter().chain(std::iter::once(tail)).collect::<Vec<_>>().windows(2).all(|w| w[0] >= w[1])
            }
        }
    }
}

/// `a^{k−1} − a^k`, written as `a^{k−1}(1 − a)` to avoid cancellation.
fn geometric_gap(a: f64, k: u64) -> f64 {
    a.powf((k - 1) as f64) * (1.0 - a)
}

/// The family a [`ProbSequence`] belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Finite prefix then a constant tail. `tail: None` repeats the last
    /// prefix value.
    Explicit { prefix: Vec<f64>, tail: Option<f64> },
    /// `p_k = p^{a_k}`.
    Example1 { p: f64, exponents: ExponentSpec },
    /// `p_k = p`.
    Mfp { p: f64 },
    /// `p_1 = p^a`, `p_k = p` for `k >= 2`; `a >= 1`.
    Table1Family1 { p: f64, a: f64 },
    /// `p_k = p^{a^{k−1} − a^k}`; `0 < a < 1`.
    Table1Family2 { p: f64, a: f64 },
}

impl Family {
    pub fn kind(&self) -> SeqKind {
        match self {
            Family::Explicit { .. } => SeqKind::Explicit,
            Family::Example1 { .. } => SeqKind::Example1,
            Family::Mfp { .. } => SeqKind::Mfp,
            Family::Table1Family1 { .. } => SeqKind::Table1Family1,
            Family::Table1Family2 { .. } => SeqKind::Table1Family2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqKind {
    Explicit,
    Example1,
    Mfp,
    Table1Family1,
    Table1Family2,
}

impl SeqKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeqKind::Explicit => "explicit",
            SeqKind::Example1 => "example1",
            SeqKind::Mfp => "mfp",
            SeqKind::Table1Family1 => "table1_family1",
            SeqKind::Table1Family2 => "table1_family2",
        }
    }
}

/// A validated, immutable sequence of retention probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqSpec", into = "SeqSpec")]
pub struct ProbSequence {
    family: Family,
    strict: bool,
    warning: Option<String>,
}

fn check_base(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidSequence(format!("base probability must be in (0, 1), got {p}")));
    }
    Ok(())
}

impl ProbSequence {
    /// Validates `family`. With `strict`, a sequence that is not non-decreasing
    /// is rejected; otherwise it is accepted and [`ProbSequence::warning`]
    /// records why.
    pub fn new(family: Family, strict: bool) -> Result<Self> {
        match &family {
            Family::Explicit { prefix, tail } => {
                if prefix.is_empty() && tail.is_none() {
                    return Err(Error::InvalidSequence(
                        "explicit sequence needs a non-empty prefix or a tail rule".into(),
                    ));
                }
                for (i, &v) in prefix.iter().chain(tail.iter()).enumerate() {
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(Error::InvalidProbability { k: i as u64 + 1, value: v });
                    }
                }
            }
            Family::Example1 { p, exponents } => {
                check_base(*p)?;
                exponents.validate()?;
            }
            Family::Mfp { p } => check_base(*p)?,
            Family::Table1Family1 { p, a } => {
                check_base(*p)?;
                if !(a.is_finite() && *a >= 1.0) {
                    return Err(Error::InvalidSequence(format!("family #1 needs a >= 1, got {a}")));
                }
            }
            Family::Table1Family2 { p, a } => {
                check_base(*p)?;
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::InvalidSequence(format!("family #2 needs 0 < a < 1, got {a}")));
                }
            }
        }

        let monotone = match &family {
            Family::Explicit { prefix, tail } => {
                prefix.iter().chain(tail.iter()).collect::<Vec<_>>().windows(2).all(|w| w[0] <= w[1])
            }
            Family::Example1 { exponents, .. } => exponents.is_monotone(),
            _ => true,
        };
        let warning = if monotone {
            None
        } else if strict {
            return Err(Error::InvalidSequence("sequence is not non-decreasing".into()));
        } else {
            Some("sequence is not non-decreasing; formulas are evaluated regardless".to_string())
        };

        let seq = ProbSequence { family, strict, warning };
        // Catches underflow of p^a for extreme exponents.
        seq.eval_pk(1)?;
        Ok(seq)
    }

    pub fn mfp(p: f64) -> Result<Self> {
        Self::new(Family::Mfp { p }, true)
    }

    pub fn table1_family1(p: f64, a: f64) -> Result<Self> {
        Self::new(Family::Table1Family1 { p, a }, true)
    }

    pub fn table1_family2(p: f64, a: f64) -> Result<Self> {
        Self::new(Family::Table1Family2 { p, a }, true)
    }

    pub fn example1(p: f64, exponents: ExponentSpec) -> Result<Self> {
        Self::new(Family::Example1 { p, exponents }, true)
    }

    pub fn explicit(prefix: Vec<f64>, tail: Option<f64>) -> Result<Self> {
        Self::new(Family::Explicit { prefix, tail }, true)
    }

    /// The all-ones sequence: nothing is ever discarded.
    pub fn full() -> Self {
        Self::explicit(vec![1.0], Some(1.0)).expect("constant one is valid")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> SeqKind {
        self.family.kind()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// Whether closed forms exist for α, β and the dimensions.
    pub fn is_catalog(&self) -> bool {
        !matches!(self.family, Family::Explicit { .. })
    }

    /// `p_k` for `k >= 1`.
    pub fn eval_pk(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::ZeroIndex);
        }
        let v = match &self.family {
            Family::Explicit { prefix, tail } => explicit_at(prefix, *tail, k),
            Family::Example1 { p, exponents } => p.powf(exponents.exponent(k)),
            Family::Mfp { p } => *p,
            Family::Table1Family1 { p, a } => {
                if k == 1 {
                    p.powf(*a)
                } else {
                    *p
                }
            }
            Family::Table1Family2 { p, a } => p.powf(geometric_gap(*a, k)),
        };
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidProbability { k, value: v });
        }
        Ok(v)
    }

    /// `ln p_k`, computed from the family's exponent form where possible.
    pub fn ln_pk(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::ZeroIndex);
        }
        let v = match &self.family {
            Family::Explicit { prefix, tail } => explicit_at(prefix, *tail, k).ln(),
            Family::Example1 { p, exponents } => exponents.exponent(k) * p.ln(),
            Family::Mfp { p } => p.ln(),
            Family::Table1Family1 { p, a } => {
                if k == 1 {
                    a * p.ln()
                } else {
                    p.ln()
                }
            }
            Family::Table1Family2 { p, a } => geometric_gap(*a, k) * p.ln(),
        };
        if !(v.is_finite() && v <= 0.0) {
            return Err(Error::InvalidProbability { k, value: v.exp() });
        }
        Ok(v)
    }

    /// `ln ∏_{l=1}^k p_l`, summed in ascending `l`.
    pub fn log_prefix_product(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::ZeroIndex);
        }
        let mut s = 0.0;
        for l in 1..=k {
            s += self.ln_pk(l)?;
        }
        Ok(s)
    }

    /// Table of `ln ∏_{l=1}^j p_l` for `j = 0..=k_max` (entry 0 is 0).
    /// Entry `j` is bit-identical to `log_prefix_product(j)`.
    pub fn log_prefix_sums(&self, k_max: u64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(k_max as usize + 1);
        out.push(0.0);
        let mut s = 0.0;
        for l in 1..=k_max {
            s += self.ln_pk(l)?;
            out.push(s);
        }
        Ok(out)
    }
}

fn explicit_at(prefix: &[f64], tail: Option<f64>, k: u64) -> f64 {
    match prefix.get(k as usize - 1) {
        Some(&v) => v,
        None => tail.or_else(|| prefix.last().copied()).expect("validated non-empty"),
    }
}

/// Flat JSON form: `{"kind": "...", "p": .., "a": .., "prefix": [..], "tail": ..}`.
/// Parses without validating; [`SeqSpec::build`] validates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    pub kind: SeqKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

impl SeqSpec {
    pub fn build(self) -> Result<ProbSequence> {
        self.try_into()
    }
}

fn need<T>(v: Option<T>, kind: SeqKind, field: &'static str) -> Result<T> {
    v.ok_or(Error::MissingField { kind: kind.as_str(), field })
}

impl TryFrom<SeqSpec> for ProbSequence {
    type Error = Error;

    fn try_from(r: SeqSpec) -> Result<Self> {
        let family = match r.kind {
            SeqKind::Explicit => Family::Explicit { prefix: r.prefix.unwrap_or_default(), tail: r.tail },
            SeqKind::Example1 => {
                Family::Example1 { p: need(r.p, r.kind, "p")?, exponents: need(r.exponents, r.kind, "exponents")? }
            }
            SeqKind::Mfp => Family::Mfp { p: need(r.p, r.kind, "p")? },
            SeqKind::Table1Family1 => Family::Table1Family1 { p: need(r.p, r.kind, "p")?, a: r.a.unwrap_or(1.0) },
            SeqKind::Table1Family2 => Family::Table1Family2 { p: need(r.p, r.kind, "p")?, a: r.a.unwrap_or(0.5) },
        };
        ProbSequence::new(family, r.strict.unwrap_or(true))
    }
}

impl From<ProbSequence> for SeqSpec {
    fn from(s: ProbSequence) -> Self {
        let mut r = SeqSpec {
            kind: s.kind(),
            p: None,
            a: None,
            prefix: None,
            tail: None,
            exponents: None,
            strict: (!s.strict).then_some(false),
        };
        match s.family {
            Family::Explicit { prefix, tail } => {
                r.prefix = Some(prefix);
                r.tail = tail;
            }
            Family::Example1 { p, exponents } => {
                r.p = Some(p);
                r.exponents = Some(exponents);
            }
            Family::Mfp { p } => r.p = Some(p),
            Family::Table1Family1 { p, a } | Family::Table1Family2 { p, a } => {
                r.p = Some(p);
                r.a = Some(a);
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Windowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalClass {
    /// Empty almost surely (`α <= m^{−n}`).
    EmptyAs,
    PositiveSurvival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorClass {
    EmptyInterior,
    NonEmptyInterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_method: Method,
    pub beta_method: Method,
    /// `Σ m^{nk}(−ln p_k)` diverges (or passed [`LOG_UNDERFLOW`]), so β = 0.
    pub beta_diverged: bool,
    pub survival_class: SurvivalClass,
    pub interior_class: InteriorClass,
}

pub(crate) fn check_nm(n: u32, m: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParams("ambient dimension n must be >= 1".into()));
    }
    if m < 2 {
        return Err(Error::InvalidParams("subdivision index m must be >= 2".into()));
    }
    Ok(())
}

/// `m^{−n}`, the survival threshold.
pub fn threshold(n: u32, m: u32) -> f64 {
    (m as f64).powi(-(n as i32))
}

/// Closed-form α for catalog families.
pub fn analytic_alpha(seq: &ProbSequence) -> Option<f64> {
    match seq.family() {
        Family::Mfp { p } | Family::Table1Family1 { p, .. } => Some(*p),
        Family::Table1Family2 { .. } => Some(1.0),
        Family::Example1 { p, exponents } => Some(match exponents {
            ExponentSpec::ConstantOne => *p,
            ExponentSpec::ExplicitList { tail, .. } => p.powf(*tail),
            ExponentSpec::GeometricGap { .. } => 1.0,
        }),
        Family::Explicit { .. } => None,
    }
}

/// α as the extrapolated window minimum of `(∏_{l≤k} p_l)^{1/k}`.
pub fn windowed_alpha(seq: &ProbSequence, window: Window) -> Result<f64> {
    window.check_span()?;
    let sums = seq.log_prefix_sums(window.hi)?;
    let terms = limits::extrapolated_terms(window, |k| Ok(sums[k as usize] / k as f64))?;
    Ok(limits::window_min(&terms).min(0.0).exp())
}

/// Result of a β evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub beta: f64,
    pub diverged: bool,
}

impl BetaValue {
    fn from_log_sum(sum: f64) -> Self {
        if sum > LOG_UNDERFLOW {
            BetaValue { beta: 0.0, diverged: true }
        } else {
            BetaValue { beta: (-sum).exp(), diverged: false }
        }
    }

    const DIVERGED: BetaValue = BetaValue { beta: 0.0, diverged: true };
}

/// Closed-form β for catalog families.
pub fn analytic_beta(seq: &ProbSequence, n: u32, m: u32) -> Option<BetaValue> {
    let cells = (m as f64).powi(n as i32);
    let gap = |p: f64, a: f64| {
        // Σ_k (m^n)^k a^{k−1}(1−a) = (1−a) m^n / (1 − m^n a) when m^n a < 1.
        let ratio = cells * a;
        if ratio < 1.0 {
            BetaValue::from_log_sum(-p.ln() * (1.0 - a) * cells / (1.0 - ratio))
        } else {
            BetaValue::DIVERGED
        }
    };
    match seq.family() {
        // Constant positive exponent on p < 1: every term at least m^{nk}·c.
        Family::Mfp { .. } | Family::Table1Family1 { .. } => Some(BetaValue::DIVERGED),
        Family::Table1Family2 { p, a } => Some(gap(*p, *a)),
        Family::Example1 { p, exponents } => Some(match exponents {
            ExponentSpec::ConstantOne | ExponentSpec::ExplicitList { .. } => BetaValue::DIVERGED,
            ExponentSpec::GeometricGap { a } => gap(*p, *a),
        }),
        Family::Explicit { .. } => None,
    }
}

/// Partial product `∏_{k≤k_hi} p_k^{m^{nk}}`, evaluated in log space.
pub fn windowed_beta(seq: &ProbSequence, n: u32, m: u32, k_hi: u64) -> Result<BetaValue> {
    let log_m = (m as f64).ln();
    let mut sum = 0.0;
    for k in 1..=k_hi {
        let neg_ln = -seq.ln_pk(k)?;
        if neg_ln == 0.0 {
            continue;
        }
        let log_term = (n as f64) * (k as f64) * log_m + neg_ln.ln();
        if log_term > LOG_UNDERFLOW.ln() + 1.0 {
            return Ok(BetaValue::DIVERGED);
        }
        sum += log_term.exp();
        if sum > LOG_UNDERFLOW {
            return Ok(BetaValue::DIVERGED);
        }
    }
    Ok(BetaValue::from_log_sum(sum))
}

/// Evaluates α and β and the resulting survival and interior classes.
pub fn classify(seq: &ProbSequence, n: u32, m: u32, window: Window) -> Result<ClassifierReport> {
    check_nm(n, m)?;
    let (alpha, alpha_method) = match analytic_alpha(seq) {
        Some(a) => (a, Method::Analytic),
        None => (windowed_alpha(seq, window)?, Method::Windowed),
    };
    let (beta, beta_method) = match analytic_beta(seq, n, m) {
        Some(b) => (b, Method::Analytic),
        None => (windowed_beta(seq, n, m, window.hi)?, Method::Windowed),
    };
    Ok(ClassifierReport {
        alpha,
        beta: beta.beta,
        alpha_method,
        beta_method,
        beta_diverged: beta.diverged,
        survival_class: if alpha <= threshold(n, m) { SurvivalClass::EmptyAs } else { SurvivalClass::PositiveSurvival },
        interior_class: if beta.beta > 0.0 { InteriorClass::NonEmptyInterior } else { InteriorClass::EmptyInterior },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ProbSequence::mfp(0.7).unwrap().eval_pk(5).unwrap(), 0.7);
        let f2 = ProbSequence::table1_family2(0.5, 0.5).unwrap();
        assert!(close(f2.eval_pk(1).unwrap(), 0.5f64.powf(0.5), 1e-15));
        assert!(close(f2.eval_pk(1).unwrap(), std::f64::consts::FRAC_1_SQRT_2, 1e-15));
        assert_eq!(ProbSequence::full().eval_pk(99).unwrap(), 1.0);
    }

    #[test]
    fn family1_first_term() {
        let f1 = ProbSequence::table1_family1(0.6, 2.0).unwrap();
        assert!(close(f1.eval_pk(1).unwrap(), 0.36, 1e-15));
        assert_eq!(f1.eval_pk(2).unwrap(), 0.6);
        assert_eq!(f1.eval_pk(50).unwrap(), 0.6);
    }

    #[test]
    fn zero_index_rejected() {
        let s = ProbSequence::mfp(0.5).unwrap();
        assert_eq!(s.eval_pk(0), Err(Error::ZeroIndex));
        assert_eq!(s.log_prefix_product(0), Err(Error::ZeroIndex));
    }

    #[test]
    fn explicit_needs_prefix_or_tail() {
        assert!(ProbSequence::explicit(vec![], None).is_err());
        let s = ProbSequence::explicit(vec![], Some(0.9)).unwrap();
        assert_eq!(s.eval_pk(3).unwrap(), 0.9);
        let s = ProbSequence::explicit(vec![0.5, 0.8], None).unwrap();
        assert_eq!(s.eval_pk(7).unwrap(), 0.8);
    }

    #[test]
    fn out_of_range_values_rejected() {
        assert!(ProbSequence::explicit(vec![0.0], None).is_err());
        assert!(ProbSequence::explicit(vec![1.1], None).is_err());
        assert!(ProbSequence::mfp(1.0).is_err());
        assert!(ProbSequence::mfp(0.0).is_err());
        assert!(ProbSequence::table1_family1(0.5, 0.5).is_err());
        assert!(ProbSequence::table1_family2(0.5, 1.0).is_err());
        assert!(ProbSequence::example1(0.5, ExponentSpec::GeometricGap { a: 1.5 }).is_err());
        // p^a underflows to zero.
        assert!(ProbSequence::table1_family1(0.1, 1e6).is_err());
    }

    #[test]
    fn strict_mode_rejects_decreasing() {
        assert!(ProbSequence::explicit(vec![0.9, 0.5], None).is_err());
        let lenient = ProbSequence::new(Family::Explicit { prefix: vec![0.9, 0.5], tail: None }, false).unwrap();
        assert!(lenient.warning().is_some());
        assert!(ProbSequence::mfp(0.4).unwrap().warning().is_none());
        // Increasing exponents mean decreasing probabilities.
        let inc = ExponentSpec::ExplicitList { values: vec![1.0, 2.0], tail: 2.0 };
        assert!(ProbSequence::example1(0.5, inc).is_err());
    }

    #[test]
    fn log_prefix_examples() {
        let s = ProbSequence::mfp(0.5).unwrap();
        assert!(close(s.log_prefix_product(3).unwrap(), 3.0 * 0.5f64.ln(), 1e-15));
        assert!(close(s.log_prefix_product(3).unwrap(), -2.0794, 1e-4));
        assert_eq!(ProbSequence::full().log_prefix_product(10).unwrap(), 0.0);
        let f2 = ProbSequence::table1_family2(0.5, 0.5).unwrap();
        for k in [1u64, 5, 20, 60] {
            let expect = 0.5f64.ln() * (1.0 - 0.5f64.powi(k as i32));
            assert!(close(f2.log_prefix_product(k).unwrap(), expect, 1e-14));
        }
        assert!(close(f2.log_prefix_product(2000).unwrap(), 0.5f64.ln(), 1e-14));
    }

    #[test]
    fn prefix_sums_match_direct_sum() {
        let s = ProbSequence::table1_family2(0.3, 0.7).unwrap();
        let sums = s.log_prefix_sums(100).unwrap();
        for k in [1u64, 2, 17, 100] {
            assert_eq!(sums[k as usize], s.log_prefix_product(k).unwrap());
        }
    }

    #[test]
    fn classify_mfp_boundary_is_extinction() {
        let r = classify(&ProbSequence::mfp(0.5).unwrap(), 1, 2, Window::DEFAULT).unwrap();
        assert_eq!(r.alpha, 0.5);
        assert_eq!(r.survival_class, SurvivalClass::EmptyAs);
        let r = classify(&ProbSequence::mfp(0.5000001).unwrap(), 1, 2, Window::DEFAULT).unwrap();
        assert_eq!(r.survival_class, SurvivalClass::PositiveSurvival);
    }

    #[test]
    fn classify_mfp_beta_zero() {
        let r = classify(&ProbSequence::mfp(0.9).unwrap(), 1, 2, Window::DEFAULT).unwrap();
        assert_eq!(r.beta, 0.0);
        assert!(r.beta_diverged);
        assert_eq!(r.interior_class, InteriorClass::EmptyInterior);
    }

    #[test]
    fn classify_explicit_geometric_beta() {
        // p_k = exp(−8^{−k}); Σ 2^k 8^{−k} = 1/3.
        let prefix: Vec<f64> = (1..=40).map(|k| (-(8f64.powi(-k))).exp()).collect();
        let seq = ProbSequence::explicit(prefix, Some(1.0)).unwrap();
        let r = classify(&seq, 1, 2, Window::DEFAULT).unwrap();
        assert_eq!(r.beta_method, Method::Windowed);
        assert!(close(r.beta, (-1.0f64 / 3.0).exp(), 1e-9), "beta = {}", r.beta);
        assert!(close(r.beta, 0.7165, 1e-4));
        assert_eq!(r.interior_class, InteriorClass::NonEmptyInterior);
        assert_eq!(r.survival_class, SurvivalClass::PositiveSurvival);
    }

    #[test]
    fn windowed_rejects_narrow_window() {
        let seq = ProbSequence::explicit(vec![0.9], None).unwrap();
        let w = Window::new(10, 15).unwrap();
        assert!(matches!(classify(&seq, 1, 2, w), Err(Error::WindowTooSmall { .. })));
        // Analytic families never need the window span.
        assert!(classify(&ProbSequence::mfp(0.9).unwrap(), 1, 2, w).is_ok());
    }

    #[test]
    fn family2_beta_closed_form_matches_partial_sums() {
        // m^n a < 1: the series converges; compare to a brute-force partial sum.
        let (p, a, n, m) = (0.8, 0.2f64, 1u32, 2u32);
        let seq = ProbSequence::table1_family2(p, a).unwrap();
        let closed = analytic_beta(&seq, n, m).unwrap();
        let mut sum = 0.0;
        for k in 1..200 {
            sum += 2f64.powi(k) * a.powi(k - 1) * (1.0 - a) * -p.ln();
        }
        assert!(!closed.diverged);
        assert!(close(closed.beta, (-sum).exp(), 1e-12));
        let partial = windowed_beta(&seq, n, m, 200).unwrap();
        assert!(close(closed.beta, partial.beta, 1e-12));
        // m^n a >= 1 diverges.
        let seq = ProbSequence::table1_family2(0.8, 0.5).unwrap();
        assert!(analytic_beta(&seq, 1, 2).unwrap().diverged);
    }

    #[test]
    fn json_shape() {
        let s = ProbSequence::mfp(0.7).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"mfp","p":0.7}"#);
        let s: ProbSequence = serde_json::from_str(r#"{"kind":"table1_family1","p":0.5,"a":1.5}"#).unwrap();
        assert_eq!(s.family(), &Family::Table1Family1 { p: 0.5, a: 1.5 });
        let s: ProbSequence = serde_json::from_str(r#"{"kind":"explicit","prefix":[0.5,0.9],"tail":1.0}"#).unwrap();
        assert_eq!(s.eval_pk(3).unwrap(), 1.0);
        let s: ProbSequence =
            serde_json::from_str(r#"{"kind":"example1","p":0.6,"exponents":{"kind":"geometric_gap","a":0.5}}"#)
                .unwrap();
        assert!(close(s.eval_pk(1).unwrap(), 0.6f64.sqrt(), 1e-15));
        assert!(serde_json::from_str::<ProbSequence>(r#"{"kind":"mfp"}"#).is_err());
        assert!(serde_json::from_str::<ProbSequence>(r#"{"kind":"mfp","p":2.0}"#).is_err());
        assert!(serde_json::from_str::<ProbSequence>(r#"{"kind":"mfp","p":0.5,"q":1}"#).is_err());
        let lenient: ProbSequence =
            serde_json::from_str(r#"{"kind":"explicit","prefix":[0.9,0.5],"strict":false}"#).unwrap();
        let back = serde_json::to_string(&lenient).unwrap();
        assert!(back.contains(r#""strict":false"#));
    }
}
