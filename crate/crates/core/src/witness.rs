//! Finite-resolution witnesses for prescribed (dimension, expected measure)
//! pairs, assembled from Table-1 families placed in disjoint boxes.
//!
//! A component is a unit-cube percolation mapped affinely onto its region;
//! its dimension is unchanged and its expected measure scales by the region
//! volume. Unions combine by `dim = max` and, over regions with disjoint
//! interiors, `measure = sum`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::{self, Windows, ANALYTIC_TOL};
use crate::engine::{generate_replicate, PercolationParams, Realization};
use crate::error::{Error, Result};
use crate::estimators::{self, EstimateReport, Quantity};
use crate::sequence::ProbSequence;

/// Default `a` for Table-1 family #1.
pub const FAMILY1_A: f64 = 1.0;
/// Default `a` for Table-1 family #2.
pub const FAMILY2_A: f64 = 0.5;

/// Axis-aligned box `∏ [lo_i, hi_i]` with its exact volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Carried separately so that volumes like `(b^{1/n})^n` stay exact.
    pub volume: f64,
}

impl Region {
    /// `[offset, offset + side]^n` with the given exact volume `side^n`.
    pub fn cube(n: u32, offset: f64, side: f64, volume: f64) -> Self {
        Region { lo: vec![offset; n as usize], hi: vec![offset + side; n as usize], volume }
    }

    pub fn unit(n: u32) -> Self {
        Region::cube(n, 0.0, 1.0, 1.0)
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Region) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((a_lo, a_hi), (b_lo, b_hi))| a_lo < b_hi && b_lo < a_hi)
    }

    /// Maps a point of the unit cube into this region.
    pub fn to_world(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter().zip(self.lo.iter().zip(&self.hi)).map(|(u, (lo, hi))| lo + (hi - lo) * u).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    NonIntegerDimZeroMeasure,
    IntegerDimZeroMeasure,
    PositiveMeasure,
    SghdtUnion,
}

/// Target for [`build_sghdt`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub r: f64,
    pub l: f64,
    pub n: u32,
    pub m: u32,
    pub case: WitnessCase,
    /// Number of union terms for integer `r` with `l = 0`.
    #[serde(default = "default_terms")]
    pub terms: u32,
    /// Sampling depth for [`sample_witness`].
    #[serde(default = "default_depth")]
    pub depth: u32,
}

fn default_terms() -> u32 {
    8
}

fn default_depth() -> u32 {
    8
}

impl WitnessSpec {
    pub fn sghdt(r: f64, l: f64, n: u32, m: u32) -> Self {
        WitnessSpec { r, l, n, m, case: WitnessCase::SghdtUnion, terms: default_terms(), depth: default_depth() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidWitness(format!("r must be > 0, got {}", self.r)));
        }
        if !(self.l.is_finite() && self.l >= 0.0) {
            return Err(Error::InvalidWitness(format!("l must be >= 0, got {}", self.l)));
        }
        if (self.n as f64) < self.r.ceil() {
            return Err(Error::InvalidWitness(format!(
                "ambient dimension n = {} must be >= ceil(r) = {}",
                self.n,
                self.r.ceil()
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidWitness("m must be >= 2".into()));
        }
        if self.case == WitnessCase::PositiveMeasure && self.l <= 0.0 {
            return Err(Error::InvalidWitness("positive-measure case needs l > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessComponent {
    pub label: String,
    pub region: Region,
    pub seq: ProbSequence,
    pub predicted_dim: f64,
    pub predicted_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub n: u32,
    pub m: u32,
    pub components: Vec<WitnessComponent>,
    /// `max` of the component dimensions.
    pub combined_dim: f64,
    /// Sum of the component measures (regions have disjoint interiors).
    pub combined_measure: f64,
    pub target_dim: f64,
    pub target_measure: f64,
    /// For a truncated countable union: the supremum it converges to.
    pub sup_limit_dim: Option<f64>,
    /// `sup_limit_dim − combined_dim`.
    pub truncation_gap: Option<f64>,
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

fn check_nm(n: u32, m: u32) -> Result<()> {
    if n < 1 || m < 2 {
        return Err(Error::InvalidWitness(format!("need n >= 1 and m >= 2, got n={n}, m={m}")));
    }
    Ok(())
}

/// Checks a component's predictions against the closed-form report.
fn verify(component: &WitnessComponent, n: u32, m: u32) -> Result<()> {
    let report = dims::full_report(&component.seq, n, m, Windows::default())?;
    let unit_measure = component.predicted_measure / component.region.volume;
    if (report.hausdorff - component.predicted_dim).abs() > ANALYTIC_TOL
        || (report.expected_measure - unit_measure).abs() > ANALYTIC_TOL
    {
        return Err(Error::Internal(format!(
            "component {} predicts (dim {}, measure {}) but the sequence gives ({}, {})",
            component.label, component.predicted_dim, unit_measure, report.hausdorff, report.expected_measure
        )));
    }
    Ok(())
}

impl WitnessReport {
    /// Combines components; rejects overlapping regions.
    pub fn from_components(
        n: u32,
        m: u32,
        components: Vec<WitnessComponent>,
        target_dim: f64,
        target_measure: f64,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidWitness("a witness needs at least one component".into()));
        }
        check_disjoint(&components)?;
        let combined_dim = components.iter().map(|c| c.predicted_dim).fold(f64::NEG_INFINITY, f64::max);
        let combined_measure = components.iter().map(|c| c.predicted_measure).sum();
        Ok(WitnessReport {
            n,
            m,
            components,
            combined_dim,
            combined_measure,
            target_dim,
            target_measure,
            sup_limit_dim: None,
            truncation_gap: None,
        })
    }

    /// Plain-text table of the components and the combination rules.
    pub fn ledger(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:<28} {:<16} {:>20} {:>22}",
            "component", "region", "family", "predicted_dim", "predicted_measure"
        );
        for c in &self.components {
            let region = format!("[{}, {}]^{}", fmt_num(c.region.lo[0]), fmt_num(c.region.hi[0]), self.n);
            let _ = writeln!(
                out,
                "{:<10} {:<28} {:<16} {:>20.17} {:>22.17}",
                c.label,
                region,
                c.seq.kind().as_str(),
                c.predicted_dim,
                c.predicted_measure
            );
        }
        let _ = writeln!(out, "combined_dim     = {:.17} (max over components)", self.combined_dim);
        let _ = writeln!(out, "combined_measure = {:.17} (additivity over disjoint regions)", self.combined_measure);
        let _ = writeln!(out, "target           = dim {:.17}, measure {:.17}", self.target_dim, self.target_measure);
        if let (Some(sup), Some(gap)) = (self.sup_limit_dim, self.truncation_gap) {
            let _ = writeln!(out, "truncated union  : sup-limit {sup:.17}, gap {gap:.17e}");
        }
        out
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn check_disjoint(components: &[WitnessComponent]) -> Result<()> {
    for (i, a) in components.iter().enumerate() {
        for b in &components[i + 1..] {
            if a.region.overlaps(&b.region) {
                return Err(Error::Internal(format!("regions of {} and {} overlap", a.label, b.label)));
            }
        }
    }
    Ok(())
}

/// Family #1 component of non-integer dimension `r` with measure 0, in `region`.
fn family1_component(label: String, r: f64, n: u32, m: u32, region: Region) -> Result<WitnessComponent> {
    let p = (m as f64).powf(r - n as f64);
    let c = WitnessComponent {
        label,
        region,
        seq: ProbSequence::table1_family1(p, FAMILY1_A)?,
        predicted_dim: r,
        predicted_measure: 0.0,
    };
    verify(&c, n, m)?;
    Ok(c)
}

fn check_case_i(r: f64, n: u32) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidWitness(format!("r must be > 0, got {r}")));
    }
    if is_integer(r) {
        return Err(Error::InvalidWitness(format!("r = {r} is an integer; use the countable-union construction")));
    }
    if (n as f64) < r.ceil() {
        return Err(Error::InvalidWitness(format!("n = {n} must be >= ceil(r) = {}", r.ceil())));
    }
    Ok(())
}

/// Non-integer `r`, measure 0: family #1 with `p = m^{r−n}`.
pub fn build_case_i(r: f64, n: u32, m: u32) -> Result<WitnessReport> {
    check_nm(n, m)?;
    check_case_i(r, n)?;
    let c = family1_component("G".into(), r, n, m, Region::unit(n))?;
    WitnessReport::from_components(n, m, vec![c], r, 0.0)
}

/// Components of dimension `r − 2^{−k}`, `k = 1..=terms`, placed in the
/// sub-boxes `[b(1 − 2^{1−k}), b(1 − 2^{−k})]^n` of `[0, b]^n`.
fn union_components(r: f64, n: u32, m: u32, terms: u32, b: f64, volume: f64) -> Result<Vec<WitnessComponent>> {
    (1..=terms)
        .map(|k| {
            let scale = 0.5f64.powi(k as i32);
            let region = Region::cube(n, b * (1.0 - 2.0 * scale), b * scale, volume * scale.powi(n as i32));
            family1_component(format!("G.{k}"), r - scale, n, m, region)
        })
        .collect()
}

fn check_case_ii(r: f64, n: u32, terms: u32) -> Result<()> {
    if !(r > 0.0 && is_integer(r)) {
        return Err(Error::InvalidWitness(format!("r = {r} must be a positive integer")));
    }
    if (n as f64) < r {
        return Err(Error::InvalidWitness(format!("n = {n} must be >= r = {r}")));
    }
    if terms < 2 {
        return Err(Error::InvalidWitness(format!("need at least 2 union terms, got {terms}")));
    }
    Ok(())
}

/// Integer `r`, measure 0: `terms`-term truncation of the countable union
/// of dimensions `r − 2^{−k}`.
pub fn build_case_ii(r: f64, n: u32, m: u32, terms: u32) -> Result<WitnessReport> {
    check_nm(n, m)?;
    check_case_ii(r, n, terms)?;
    let comps = union_components(r, n, m, terms, 1.0, 1.0)?;
    let mut report = WitnessReport::from_components(n, m, comps, r, 0.0)?;
    report.sup_limit_dim = Some(r);
    report.truncation_gap = Some(r - report.combined_dim);
    Ok(report)
}

/// `(⌊l⌋ + 1, p = l / (⌊l⌋ + 1))`.
fn positive_measure_split(l: f64) -> (f64, f64) {
    let volume = l.floor() + 1.0;
    (volume, l / volume)
}

fn positive_measure_component(l: f64, n: u32, m: u32) -> Result<WitnessComponent> {
    let (volume, p) = positive_measure_split(l);
    let side = volume.powf(1.0 / n as f64);
    let c = WitnessComponent {
        label: "G".into(),
        region: Region::cube(n, 0.0, side, volume),
        seq: ProbSequence::table1_family2(p, FAMILY2_A)?,
        predicted_dim: n as f64,
        predicted_measure: volume * p,
    };
    verify(&c, n, m)?;
    Ok(c)
}

/// Full dimension `n`, measure `l > 0`: family #2 with `p = l/(⌊l⌋+1)`
/// scaled onto `[0, (⌊l⌋+1)^{1/n}]^n`.
pub fn build_case_iii(n: u32, l: f64, m: u32) -> Result<WitnessReport> {
    check_nm(n, m)?;
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidWitness(format!("l must be > 0, got {l}")));
    }
    let c = positive_measure_component(l, n, m)?;
    WitnessReport::from_components(n, m, vec![c], n as f64, l)
}

/// `G = G₁ ∪ G₂`: `G₂ ⊂ [0, b]^n` realises (dim `r·1{l=0} + n·1{l>0}`,
/// measure `l`), `G₁ ⊂ [b, 2b]^n` has dimension at most `r/2` and measure 0,
/// with `b = (⌊l⌋ + 1)^{1/n}`.
pub fn build_sghdt(spec: &WitnessSpec) -> Result<WitnessReport> {
    spec.validate()?;
    let WitnessSpec { r, l, n, m, terms, .. } = *spec;
    let (volume, _) = positive_measure_split(l);
    let b = volume.powf(1.0 / n as f64);

    let mut components = Vec::new();
    let mut sup_limit = None;
    let target_dim = if l > 0.0 { n as f64 } else { r };
    if l > 0.0 {
        let mut c = positive_measure_component(l, n, m)?;
        c.label = "G2".into();
        components.push(c);
    } else if is_integer(r) {
        check_case_ii(r, n, terms)?;
        for mut c in union_components(r, n, m, terms, b, volume)? {
            c.label = format!("G2.{}", &c.label[2..]);
            components.push(c);
        }
        sup_limit = Some(r);
    } else {
        check_case_i(r, n)?;
        components.push(family1_component("G2".into(), r, n, m, Region::cube(n, 0.0, b, volume))?);
    }

    // r/2 when it is non-integer, else r/2 − 1/2; both are at most r/2.
    let half = if is_integer(r / 2.0) { r / 2.0 - 0.5 } else { r / 2.0 };
    components.push(family1_component("G1".into(), half, n, m, Region::cube(n, b, b, volume))?);

    let mut report = WitnessReport::from_components(n, m, components, target_dim, l)?;
    if let Some(sup) = sup_limit {
        report.sup_limit_dim = Some(sup);
        report.truncation_gap = Some(sup - report.combined_dim);
    }
    Ok(report)
}

/// Builds the witness selected by `spec.case`.
pub fn build(spec: &WitnessSpec) -> Result<WitnessReport> {
    spec.validate()?;
    match spec.case {
        WitnessCase::NonIntegerDimZeroMeasure | WitnessCase::IntegerDimZeroMeasure if spec.l != 0.0 => {
            Err(Error::InvalidWitness("zero-measure cases need l = 0".into()))
        }
        WitnessCase::NonIntegerDimZeroMeasure => build_case_i(spec.r, spec.n, spec.m),
        WitnessCase::IntegerDimZeroMeasure => build_case_ii(spec.r, spec.n, spec.m, spec.terms),
        WitnessCase::PositiveMeasure => build_case_iii(spec.n, spec.l, spec.m),
        WitnessCase::SghdtUnion => build_sghdt(spec),
    }
}

/// One realization of a witness component, with its affine frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSample {
    pub label: String,
    pub region: Region,
    pub realization: Realization,
}

impl ComponentSample {
    /// Lebesgue measure of the mapped `C(k)`: region volume times the
    /// unit-cube measure.
    pub fn measure_at(&self, k: u32) -> Result<f64> {
        Ok(self.region.volume * self.realization.measure_at(k)?)
    }
}

fn component_params(report: &WitnessReport, c: &WitnessComponent, depth: u32, seed: u64) -> PercolationParams {
    PercolationParams::new(report.n, report.m, depth, c.seq.clone(), seed)
}

/// Samples each component to `depth`; component `i` uses stream `i` of `seed`.
pub fn sample_witness(report: &WitnessReport, depth: u32, seed: u64) -> Result<Vec<ComponentSample>> {
    for c in &report.components {
        if c.region.lo.len() != report.n as usize
            || c.region
                .lo
                .iter()
                .zip(&c.region.hi)
                .any(|(lo, hi)| hi.partial_cmp(lo) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidWitness(format!("component {} has a degenerate region", c.label)));
        }
    }
    check_disjoint(&report.components)?;
    report
        .components
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let realization = generate_replicate(&component_params(report, c, depth, seed), i as u64)?;
            Ok(ComponentSample { label: c.label.clone(), region: c.region.clone(), realization })
        })
        .collect()
}

/// Monte Carlo estimate of the witness's expected measure at `depth`.
/// Component `i` runs `replicates` replicates under seed `derive_seed(seed, i)`;
/// the theory is `Σ volume_i · ∏_{l≤K} p_l^{(i)}`.
pub fn estimate_witness_measure(
    report: &WitnessReport,
    depth: u32,
    replicates: usize,
    seed: u64,
) -> Result<EstimateReport> {
    let mut estimate = 0.0;
    let mut var = 0.0;
    let mut theory = 0.0;
    for (i, c) in report.components.iter().enumerate() {
        let params = component_params(report, c, depth, crate::rng::derive_seed(seed, i as u64));
        let est = estimators::estimate_measure(&params, replicates)?;
        let v = c.region.volume;
        estimate += v * est.estimate;
        var += v * v * est.std_error * est.std_error;
        theory += v * est.theory.expect("measure theory is always set");
    }
    let std_error = var.sqrt();
    Ok(EstimateReport {
        quantity: Quantity::ExpectedMeasure,
        estimate,
        std_error,
        replicates,
        depth,
        theory: Some(theory),
        theory_finite_depth: Some(theory),
        theory_limit: Some(report.combined_measure),
        z_score: (std_error > 0.0).then(|| (estimate - theory) / std_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_i_examples() {
        let w = build_case_i(0.5, 1, 2).unwrap();
        assert_eq!(w.components.len(), 1);
        let crate::sequence::Family::Table1Family1 { p, .. } = *w.components[0].seq.family() else { panic!() };
        assert!((p - 2f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(w.combined_dim, 0.5);
        assert_eq!(w.combined_measure, 0.0);

        let w = build_case_i(1.5, 2, 3).unwrap();
        let crate::sequence::Family::Table1Family1 { p, .. } = *w.components[0].seq.family() else { panic!() };
        assert!((p - 3f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(w.combined_dim, 1.5);

        assert!(build_case_i(2.0, 2, 2).is_err());
        assert!(build_case_i(1.5, 1, 2).is_err());
    }

    #[test]
    fn case_ii_examples() {
        let w = build_case_ii(1.0, 1, 2, 8).unwrap();
        let dims: Vec<f64> = w.components.iter().map(|c| c.predicted_dim).collect();
        let expect: Vec<f64> = (1..=8).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        assert_eq!(dims, expect);
        assert_eq!(w.combined_dim, 1.0 - 2f64.powi(-8));
        assert_eq!(w.truncation_gap, Some(2f64.powi(-8)));
        assert_eq!(w.sup_limit_dim, Some(1.0));
        assert_eq!(w.combined_measure, 0.0);

        assert_eq!(build_case_ii(1.0, 1, 2, 2).unwrap().combined_dim, 0.75);
        assert!(build_case_ii(1.5, 2, 2, 4).is_err());
        assert!(build_case_ii(1.0, 1, 2, 1).is_err());
    }

    #[test]
    fn case_iii_examples() {
        let w = build_case_iii(1, 1.5, 2).unwrap();
        let c = &w.components[0];
        assert_eq!(c.region.hi, vec![2.0]);
        let crate::sequence::Family::Table1Family2 { p, .. } = *c.seq.family() else { panic!() };
        assert_eq!(p, 0.75);
        assert_eq!(w.combined_measure, 1.5);
        assert_eq!(w.combined_dim, 1.0);

        let w = build_case_iii(2, 0.25, 2).unwrap();
        assert_eq!(w.components[0].region.hi, vec![1.0, 1.0]);
        assert_eq!(w.combined_measure, 0.25);
        assert_eq!(w.combined_dim, 2.0);

        assert!(build_case_iii(1, 0.0, 2).is_err());
    }

    #[test]
    fn sghdt_examples() {
        let w = build_sghdt(&WitnessSpec::sghdt(0.5, 0.0, 1, 2)).unwrap();
        assert_eq!(w.combined_dim, 0.5);
        assert_eq!(w.combined_measure, 0.0);
        let g1 = w.components.iter().find(|c| c.label == "G1").unwrap();
        assert_eq!(g1.predicted_dim, 0.25);
        assert_eq!(g1.region.lo, vec![1.0]);

        let w = build_sghdt(&WitnessSpec::sghdt(1.0, 2.5, 1, 2)).unwrap();
        assert_eq!(w.combined_dim, 1.0);
        assert_eq!(w.combined_measure, 2.5);
        let g2 = w.components.iter().find(|c| c.label == "G2").unwrap();
        assert_eq!(g2.region.hi, vec![3.0]);

        let mut spec = WitnessSpec::sghdt(2.0, 0.0, 2, 3);
        spec.terms = 6;
        let w = build_sghdt(&spec).unwrap();
        assert_eq!(w.combined_dim, 2.0 - 2f64.powi(-6));
        assert_eq!(w.combined_measure, 0.0);
        // G1 at r/2 − 1/2 because r/2 is an integer.
        let g1 = w.components.iter().find(|c| c.label == "G1").unwrap();
        assert_eq!(g1.predicted_dim, 0.5);
    }

    #[test]
    fn sghdt_rejects_bad_specs() {
        assert!(build_sghdt(&WitnessSpec::sghdt(2.5, 0.0, 2, 2)).is_err());
        assert!(build_sghdt(&WitnessSpec::sghdt(0.0, 0.0, 1, 2)).is_err());
        assert!(build_sghdt(&WitnessSpec::sghdt(1.0, -1.0, 1, 2)).is_err());
        let mut spec = WitnessSpec::sghdt(1.0, 0.0, 1, 2);
        spec.case = WitnessCase::PositiveMeasure;
        assert!(build_sghdt(&spec).is_err());
    }

    #[test]
    fn overlapping_components_rejected() {
        let c = |label: &str, lo: f64| WitnessComponent {
            label: label.into(),
            region: Region::cube(1, lo, 1.0, 1.0),
            seq: ProbSequence::full(),
            predicted_dim: 1.0,
            predicted_measure: 1.0,
        };
        assert!(WitnessReport::from_components(1, 2, vec![c("a", 0.0), c("b", 0.5)], 1.0, 2.0).is_err());
        // Shared faces are fine.
        let w = WitnessReport::from_components(1, 2, vec![c("a", 0.0), c("b", 1.0)], 1.0, 2.0).unwrap();
        assert_eq!(w.combined_measure, 2.0);
    }

    #[test]
    fn sample_examples() {
        let full = WitnessComponent {
            label: "F".into(),
            region: Region::unit(2),
            seq: ProbSequence::full(),
            predicted_dim: 2.0,
            predicted_measure: 1.0,
        };
        let w = WitnessReport::from_components(2, 3, vec![full], 2.0, 1.0).unwrap();
        let s = sample_witness(&w, 2, 5).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].realization.counts()[2], 81);

        let w = build_case_ii(1.0, 1, 2, 2).unwrap();
        let s = sample_witness(&w, 4, 5).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s[0].region.overlaps(&s[1].region));

        let w = build_case_iii(1, 1.5, 2).unwrap();
        let s = sample_witness(&w, 6, 5).unwrap();
        let unit = s[0].realization.measure_at(6).unwrap();
        assert_eq!(s[0].measure_at(6).unwrap(), 2.0 * unit);
        assert_eq!(s[0].region.to_world(&[0.5]), vec![1.0]);
    }

    #[test]
    fn ledger_lists_components_and_rules() {
        let w = build_sghdt(&WitnessSpec::sghdt(1.0, 1.5, 1, 2)).unwrap();
        let text = w.ledger();
        assert!(text.contains("G1"));
        assert!(text.contains("G2"));
        assert!(text.contains("max over components"));
        assert!(text.contains("additivity"));
    }
}
