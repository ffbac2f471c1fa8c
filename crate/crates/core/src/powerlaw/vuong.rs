//! Normalized log-likelihood ratio test between power-law and lognormal tails.

use serde::Serialize;

use super::fit::{Histogram, PowerLawFit};
use super::lognormal::LognormalFit;
use crate::degree::DegreeSample;
use crate::error::{Error, Result};
use crate::stats::normal_sf;

/// Default two-sided significance threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PowerLaw,
    Lognormal,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrTestResult {
    /// Log-likelihood ratio divided by its standard error; positive favors
    /// the power law.
    pub r: f64,
    pub p: f64,
    pub verdict: Verdict,
    /// Unnormalized `loglik_pl - loglik_ln` over the tail.
    pub log_ratio: f64,
    pub threshold: f64,
}

pub fn vuong_lr_test(
    sample: &DegreeSample,
    pl: &PowerLawFit,
    ln: &LognormalFit,
) -> Result<LrTestResult> {
    vuong_lr_test_with_threshold(sample, pl, ln, DEFAULT_THRESHOLD)
}

pub fn vuong_lr_test_with_threshold(
    sample: &DegreeSample,
    pl: &PowerLawFit,
    ln: &LognormalFit,
    threshold: f64,
) -> Result<LrTestResult> {
    vuong_histogram(&Histogram::from_sample(sample), pl, ln, threshold)
}

pub(crate) fn vuong_histogram(
    h: &Histogram,
    pl: &PowerLawFit,
    ln: &LognormalFit,
    threshold: f64,
) -> Result<LrTestResult> {
    if pl.xmin != ln.xmin {
        return Err(Error::Precondition(format!(
            "power-law xmin {} differs from lognormal xmin {}",
            pl.xmin, ln.xmin
        )));
    }
    let start = h.lower_bound(pl.xmin);
    let n = h.tail_count.get(start).copied().unwrap_or(0) as f64;
    if n < 2.0 {
        return Err(Error::DegenerateTest(
            "fewer than two tail observations".into(),
        ));
    }
    let diffs: Vec<(f64, f64)> = (start..h.values.len())
        .map(|i| {
            (
                pl.ln_pmf(h.values[i]) - ln.ln_pmf(h.values[i]),
                h.counts[i] as f64,
            )
        })
        .collect();
    let log_ratio: f64 = diffs.iter().map(|(d, c)| d * c).sum();
    let mean = log_ratio / n;
    let var = diffs
        .iter()
        .map(|(d, c)| c * (d - mean).powi(2))
        .sum::<f64>()
        / n;
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::DegenerateTest(format!(
            "pointwise log-likelihood differences have variance {var}"
        )));
    }
    let r = log_ratio / (n * var).sqrt();
    let p = (2.0 * normal_sf(r.abs())).min(1.0);
    let verdict = if p >= threshold {
        Verdict::Inconclusive
    } else if r > 0.0 {
        Verdict::PowerLaw
    } else {
        Verdict::Lognormal
    };
    Ok(LrTestResult {
        r,
        p,
        verdict,
        log_ratio,
        threshold,
    })
}
