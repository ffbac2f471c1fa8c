//! Discretized lognormal tail model.
//!
//! The mass at integer `k` is the continuous lognormal mass on
//! `(k - 1/2, k + 1/2)`, renormalized over `k >= xmin`.

use serde::Serialize;

use super::fit::{Histogram, MIN_TAIL};
use super::optimize::nelder_mead_max;
use crate::degree::DegreeSample;
use crate::error::{Error, Result};
use crate::stats::{ln_normal_interval, ln_normal_sf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LognormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub xmin: u64,
    pub loglik: f64,
    pub n_tail: usize,
}

fn ln_mass(k: u64, mu: f64, sigma: f64) -> f64 {
    let k = k as f64;
    let a = ((k - 0.5).ln() - mu) / sigma;
    let b = ((k + 0.5).ln() - mu) / sigma;
    ln_normal_interval(a, b)
}

fn ln_tail_mass(xmin: u64, mu: f64, sigma: f64) -> f64 {
    ln_normal_sf(((xmin as f64 - 0.5).ln() - mu) / sigma)
}

impl LognormalFit {
    pub fn ln_pmf(&self, k: u64) -> f64 {
        if k < self.xmin {
            return f64::NEG_INFINITY;
        }
        ln_mass(k, self.mu, self.sigma) - ln_tail_mass(self.xmin, self.mu, self.sigma)
    }
}

fn tail_loglik(h: &Histogram, start: usize, xmin: u64, mu: f64, sigma: f64) -> f64 {
    let mut ll = 0.0;
    for i in start..h.values.len() {
        ll += h.counts[i] as f64 * ln_mass(h.values[i], mu, sigma);
    }
    ll - h.tail_count[start] as f64 * ln_tail_mass(xmin, mu, sigma)
}

/// Optimizer tolerance on `mu` and `ln sigma`.
const TOL: f64 = 1e-7;

pub(crate) fn fit_lognormal_histogram(h: &Histogram, xmin: u64) -> Result<LognormalFit> {
    let start = h.lower_bound(xmin);
    let n_tail = h.tail_count.get(start).copied().unwrap_or(0) as usize;
    if n_tail < MIN_TAIL {
        return Err(Error::EstimationUnreliable(format!(
            "lognormal tail above xmin={xmin} has {n_tail} observations"
        )));
    }
    if start + 1 == h.values.len() {
        return Err(Error::EstimationUnreliable(format!(
            "degenerate tail: all {n_tail} values equal {}",
            h.values[start]
        )));
    }
    // Moments of ln x as the starting point.
    let nt = n_tail as f64;
    let mean = h.tail_ln[start] / nt;
    let var = (start..h.values.len())
        .map(|i| h.counts[i] as f64 * ((h.values[i] as f64).ln() - mean).powi(2))
        .sum::<f64>()
        / nt;
    let sd = var.sqrt().max(0.1);
    let objective = |p: [f64; 2]| tail_loglik(h, start, xmin, p[0], p[1].exp());
    let best = nelder_mead_max(objective, [mean, sd.ln()], [0.5 * sd, 0.3], TOL, 5_000);
    if !best.converged || !best.value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "lognormal fit above xmin={xmin} stopped at mu={:.4}, sigma={:.4}",
            best.x[0],
            best.x[1].exp()
        )));
    }
    Ok(LognormalFit {
        mu: best.x[0],
        sigma: best.x[1].exp(),
        xmin,
        loglik: best.value,
        n_tail,
    })
}

/// Maximum-likelihood lognormal for the observations `>= xmin`.
pub fn fit_lognormal_tail(sample: &DegreeSample, xmin: u64) -> Result<LognormalFit> {
    if xmin == 0 {
        return Err(Error::Precondition("xmin must be positive".into()));
    }
    fit_lognormal_histogram(&Histogram::from_sample(sample), xmin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_discrete_lognormal;

    #[test]
    fn recovers_parameters() {
        let s = gen_discrete_lognormal(50_000, 1.0, 1.0, 1, 21).unwrap();
        let fit = fit_lognormal_tail(&s, 1).unwrap();
        assert!((0.95..=1.05).contains(&fit.mu), "{fit:?}");
        assert!((0.95..=1.05).contains(&fit.sigma), "{fit:?}");
    }

    #[test]
    fn degenerate_tail_is_error() {
        let s = DegreeSample::new(vec![4; 50]);
        assert!(matches!(
            fit_lognormal_tail(&s, 1),
            Err(Error::EstimationUnreliable(_))
        ));
    }

    #[test]
    fn pmf_sums_to_one() {
        let fit = LognormalFit {
            mu: 0.5,
            sigma: 1.2,
            xmin: 3,
            loglik: 0.0,
            n_tail: 0,
        };
        let total: f64 = (3..200_000u64).map(|k| fit.ln_pmf(k).exp()).sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}
