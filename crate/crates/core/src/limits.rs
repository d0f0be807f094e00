//! Finite-window evaluation of `liminf` / `limsup`.
//!
//! Every windowed limit in this crate goes through [`extrapolated_terms`]:
//! terms `T_k` that converge like `T + c/k` are combined pairwise as
//! `R_k = ((k+h)·T_{k+h} − k·T_k) / h` with `h = ⌈(hi − lo)/2⌉`, which
//! cancels the `c/k` transient, and the window extreme of `R_k` is taken.
//! For Cesàro means `T_k = S_k / k` this is exactly the tail mean
//! `(S_{k+h} − S_k) / h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest `hi - lo` accepted for windowed evaluation.
pub const MIN_WINDOW_SPAN: u64 = 8;

/// An inclusive index window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "(u64, u64)", try_from = "(u64, u64)")]
pub struct Window {
    pub lo: u64,
    pub hi: u64,
}

impl Window {
    pub const DEFAULT: Window = Window { lo: 64, hi: 512 };

    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo < 1 || lo >= hi {
            return Err(Error::InvalidParams(format!("window must satisfy 1 <= lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    /// Rejects windows too narrow for windowed evaluation.
    pub fn check_span(&self) -> Result<()> {
        if self.hi - self.lo < MIN_WINDOW_SPAN {
            return Err(Error::WindowTooSmall { lo: self.lo, hi: self.hi, min_span: MIN_WINDOW_SPAN });
        }
        Ok(())
    }

    pub(crate) fn step(&self) -> u64 {
        (self.hi - self.lo).div_ceil(2)
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::DEFAULT
    }
}

impl From<Window> for (u64, u64) {
    fn from(w: Window) -> Self {
        (w.lo, w.hi)
    }
}

impl TryFrom<(u64, u64)> for Window {
    type Error = Error;
    fn try_from((lo, hi): (u64, u64)) -> Result<Self> {
        Window::new(lo, hi)
    }
}

/// Extrapolated terms `(k, R_k)` for `k in [lo, hi - h]`.
pub(crate) fn extrapolated_terms<F>(window: Window, mut term: F) -> Result<Vec<(u64, f64)>>
where
    F: FnMut(u64) -> Result<f64>,
{
    let h = window.step();
    let mut out = Vec::with_capacity((window.hi - h - window.lo + 1) as usize);
    for k in window.lo..=window.hi - h {
        let near = term(k)?;
        let far = term(k + h)?;
        out.push((k, ((k + h) as f64 * far - k as f64 * near) / h as f64));
    }
    Ok(out)
}

pub(crate) fn window_min(terms: &[(u64, f64)]) -> f64 {
    terms.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
}

pub(crate) fn window_max(terms: &[(u64, f64)]) -> f64 {
    terms.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation() {
        assert!(Window::new(0, 10).is_err());
        assert!(Window::new(5, 5).is_err());
        assert!(Window::new(5, 12).unwrap().check_span().is_err());
        assert!(Window::new(5, 13).unwrap().check_span().is_ok());
    }

    #[test]
    fn first_order_transient_is_removed() {
        // T_k = 2 + 3/k is extrapolated to exactly 2.
        let w = Window::DEFAULT;
        let terms = extrapolated_terms(w, |k| Ok(2.0 + 3.0 / k as f64)).unwrap();
        for (_, v) in &terms {
            assert!((v - 2.0).abs() < 1e-12);
        }
        assert_eq!(terms.first().unwrap().0, 64);
        assert_eq!(terms.last().unwrap().0, 512 - 224);
    }

    #[test]
    fn window_serializes_as_pair() {
        let s = serde_json::to_string(&Window::DEFAULT).unwrap();
        assert_eq!(s, "[64,512]");
        let w: Window = serde_json::from_str("[3,40]").unwrap();
        assert_eq!(w, Window { lo: 3, hi: 40 });
        assert!(serde_json::from_str::<Window>("[4,2]").is_err());
    }
}
