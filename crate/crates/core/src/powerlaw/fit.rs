//! Discrete power-law maximum likelihood with KS-selected tail cutoff.

use serde::Serialize;

use super::optimize::brent_max;
use super::zeta::hurwitz_zeta;
use crate::degree::DegreeSample;
use crate::error::{Error, Result};

/// Smallest tail accepted by any estimator.
pub const MIN_TAIL: usize = 10;
/// Exponent search bracket.
pub const GAMMA_BOUNDS: (f64, f64) = (1.0 + 1e-6, 50.0);
/// Absolute tolerance on the fitted exponent.
pub const GAMMA_TOL: f64 = 1e-6;
/// Candidate cutoffs are sample values up to this quantile.
pub const XMIN_QUANTILE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "k")]
pub enum XminMode {
    /// Try every distinct value up to the 95th percentile; keep the one with
    /// the smallest KS distance.
    ScanAll,
    Fixed(u64),
}

/// Fitted discrete power law `P(k) = k^-gamma / zeta(gamma, xmin)`, `k >= xmin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub xmin: u64,
    pub ks: f64,
    pub loglik: f64,
    pub n_tail: usize,
    pub n: usize,
    pub ci95: Option<(f64, f64)>,
}

impl PowerLawFit {
    /// The constant `K` in `ln P(k) = -gamma ln k + K`.
    pub fn normalization(&self) -> f64 {
        -hurwitz_zeta(self.gamma, self.xmin as f64).ln()
    }

    pub fn ln_pmf(&self, k: u64) -> f64 {
        if k < self.xmin {
            return f64::NEG_INFINITY;
        }
        -self.gamma * (k as f64).ln() + self.normalization()
    }

    /// Fitted `P(X >= k)` within the tail.
    pub fn ccdf(&self, k: u64) -> f64 {
        if k <= self.xmin {
            return 1.0;
        }
        hurwitz_zeta(self.gamma, k as f64) / hurwitz_zeta(self.gamma, self.xmin as f64)
    }
}

/// Sorted distinct values with multiplicities and suffix sums.
#[derive(Debug, Clone)]
pub(crate) struct Histogram {
    pub values: Vec<u64>,
    pub counts: Vec<u64>,
    /// `tail_count[i]` = observations with value >= `values[i]`.
    pub tail_count: Vec<u64>,
    /// `tail_ln[i]` = sum of `ln x` over observations >= `values[i]`.
    pub tail_ln: Vec<f64>,
    pub n: u64,
}

impl Histogram {
    pub fn from_sample(sample: &DegreeSample) -> Histogram {
        let sorted = sample.sorted();
        let mut values = Vec::new();
        let mut counts = Vec::new();
        for &x in &sorted {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                counts.push(1);
            }
        }
        Histogram::from_parts(values, counts)
    }

    /// `values` ascending and distinct; zero counts are dropped.
    pub fn from_parts(values: Vec<u64>, counts: Vec<u64>) -> Histogram {
        let (values, counts): (Vec<u64>, Vec<u64>) = values
            .into_iter()
            .zip(counts)
            .filter(|&(_, c)| c > 0)
            .unzip();
        let m = values.len();
        let mut tail_count = vec![0u64; m];
        let mut tail_ln = vec![0f64; m];
        let mut c = 0u64;
        let mut l = 0f64;
        for i in (0..m).rev() {
            c += counts[i];
            l += counts[i] as f64 * (values[i] as f64).ln();
            tail_count[i] = c;
            tail_ln[i] = l;
        }
        Histogram {
            values,
            counts,
            tail_count,
            tail_ln,
            n: c,
        }
    }

    /// Index of the first value >= `x`.
    pub fn lower_bound(&self, x: u64) -> usize {
        self.values.partition_point(|&v| v < x)
    }

    /// Nearest-rank quantile.
    pub fn quantile(&self, q: f64) -> u64 {
        let rank = ((q * self.n as f64).ceil() as u64).clamp(1, self.n);
        let mut seen = 0;
        for (v, c) in self.values.iter().zip(&self.counts) {
            seen += c;
            if seen >= rank {
                return *v;
            }
        }
        *self.values.last().expect("nonempty histogram")
    }
}

/// Fit with cutoff `xmin`, where `values[start]` is the first observation
/// at or above it.
pub(crate) fn fit_tail(h: &Histogram, start: usize, xmin: u64) -> Result<PowerLawFit> {
    debug_assert!(xmin <= h.values[start] && (start == 0 || h.values[start - 1] < xmin));
    let n_tail = h.tail_count[start];
    if (n_tail as usize) < MIN_TAIL {
        return Err(Error::EstimationUnreliable(format!(
            "only {n_tail} observations at or above xmin={xmin}"
        )));
    }
    if start + 1 == h.values.len() && h.values[start] == xmin {
        return Err(Error::NonConvergence(format!(
            "all {n_tail} tail values equal {xmin}; likelihood increases without bound"
        )));
    }
    let sum_ln = h.tail_ln[start];
    let nt = n_tail as f64;
    let xmin_f = xmin as f64;
    let loglik = |gamma: f64| -gamma * sum_ln - nt * hurwitz_zeta(gamma, xmin_f).ln();
    let best = brent_max(loglik, GAMMA_BOUNDS.0, GAMMA_BOUNDS.1, GAMMA_TOL, 500);
    if best.x > GAMMA_BOUNDS.1 - 1e-3 || best.x < GAMMA_BOUNDS.0 + 1e-4 || !best.value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "exponent estimate {:.6} at bracket edge for xmin={xmin} (n_tail={n_tail}, iterations={})",
            best.x, best.iterations
        )));
    }
    let gamma = best.x;
    Ok(PowerLawFit {
        gamma,
        xmin,
        ks: ks_distance(h, start, gamma, xmin),
        loglik: best.value,
        n_tail: n_tail as usize,
        n: h.n as usize,
        ci95: None,
    })
}

/// Largest gap between consecutive distinct values summed term by term.
const DIRECT_GAP: u64 = 16;

/// Kolmogorov-Smirnov distance between the empirical tail and the fitted
/// law, taken over every integer `k >= xmin`.
pub(crate) fn ks_distance(h: &Histogram, start: usize, gamma: f64, xmin: u64) -> f64 {
    let z0 = hurwitz_zeta(gamma, xmin as f64);
    let nt = h.tail_count[start] as f64;
    let mut zeta_here = z0;
    let mut d: f64 = 0.0;
    if h.values[start] > xmin {
        // Empirical CDF is zero below the first observation.
        zeta_here = hurwitz_zeta(gamma, h.values[start] as f64);
        d = 1.0 - zeta_here / z0;
    }
    let mut cum = 0u64;
    let last = h.values.len() - 1;
    for i in start..=last {
        let v = h.values[i];
        cum += h.counts[i];
        let emp = cum as f64 / nt;
        // Fitted CDF at v: 1 - zeta(gamma, v + 1) / z0.
        let zeta_next = zeta_here - (v as f64).powf(-gamma);
        d = d.max((emp - (1.0 - zeta_next / z0)).abs());
        if i == last {
            break;
        }
        let next = h.values[i + 1];
        // Fitted CDF just below the next observed value.
        let zeta_at_next = if next - v <= DIRECT_GAP {
            let mut z = zeta_next;
            for k in v + 1..next {
                z -= (k as f64).powf(-gamma);
            }
            z
        } else {
            hurwitz_zeta(gamma, next as f64)
        };
        d = d.max((emp - (1.0 - zeta_at_next / z0)).abs());
        zeta_here = zeta_at_next;
    }
    d
}

pub(crate) fn fit_histogram(h: &Histogram, mode: XminMode) -> Result<PowerLawFit> {
    if (h.n as usize) < MIN_TAIL {
        return Err(Error::EstimationUnreliable(format!(
            "sample of {} points; at least {MIN_TAIL} required",
            h.n
        )));
    }
    match mode {
        XminMode::Fixed(k) => {
            let min = h.values[0];
            if k < min || k == 0 {
                return Err(Error::Precondition(format!(
                    "fixed xmin {k} below sample minimum {min}"
                )));
            }
            let start = h.lower_bound(k);
            if start == h.values.len() {
                return Err(Error::EstimationUnreliable(format!(
                    "no observations at or above xmin={k}"
                )));
            }
            fit_tail(h, start, k)
        }
        XminMode::ScanAll => {
            let cap = h.quantile(XMIN_QUANTILE);
            let mut best: Option<PowerLawFit> = None;
            let mut last_err = None;
            for start in 0..h.values.len() {
                if h.values[start] > cap || (h.tail_count[start] as usize) < MIN_TAIL {
                    break;
                }
                match fit_tail(h, start, h.values[start]) {
                    Ok(fit) => {
                        if best.as_ref().is_none_or(|b| fit.ks < b.ks) {
                            best = Some(fit);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            best.ok_or_else(|| {
                last_err.unwrap_or_else(|| {
                    Error::EstimationUnreliable(format!(
                        "no cutoff leaves a tail of {MIN_TAIL} or more observations"
                    ))
                })
            })
        }
    }
}

/// Maximum-likelihood discrete power law for the tail of `sample`.
pub fn fit_power_law(sample: &DegreeSample, xmin_mode: XminMode) -> Result<PowerLawFit> {
    fit_histogram(&Histogram::from_sample(sample), xmin_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_discrete_power_law;

    #[test]
    fn recovers_exponent() {
        let s = gen_discrete_power_law(50_000, 2.5, 1, 7).unwrap();
        let fit = fit_power_law(&s, XminMode::Fixed(1)).unwrap();
        assert!((fit.gamma - 2.5).abs() < 0.05, "{fit:?}");
        let fit = fit_power_law(&s, XminMode::ScanAll).unwrap();
        assert!((2.45..=2.55).contains(&fit.gamma), "{fit:?}");
        assert!(fit.ks >= 0.0 && fit.ks <= 1.0);
        assert!(fit.n_tail <= fit.n);
    }

    #[test]
    fn recovers_paper_magnitude() {
        let s = gen_discrete_power_law(50_000, 2.85, 1, 8).unwrap();
        let fit = fit_power_law(&s, XminMode::ScanAll).unwrap();
        assert!((2.78..=2.92).contains(&fit.gamma), "{fit:?}");
    }

    #[test]
    fn tiny_sample_is_unreliable() {
        let s = DegreeSample::new(vec![1, 2, 3, 5, 8]);
        assert!(matches!(
            fit_power_law(&s, XminMode::ScanAll),
            Err(Error::EstimationUnreliable(_))
        ));
    }

    #[test]
    fn fixed_xmin_below_minimum_rejected() {
        let s = gen_discrete_power_law(100, 2.5, 3, 1).unwrap();
        assert!(matches!(
            fit_power_law(&s, XminMode::Fixed(2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fixed_xmin_between_observations() {
        let s = DegreeSample::new((0..200).map(|i| 1 + (i % 7) * 3).collect());
        let fit = fit_power_law(&s, XminMode::Fixed(2)).unwrap();
        assert_eq!(fit.xmin, 2);
        assert!(fit.gamma > 1.0);
    }

    #[test]
    fn loglik_is_maximal() {
        let s = gen_discrete_power_law(5_000, 2.2, 2, 3).unwrap();
        let fit = fit_power_law(&s, XminMode::Fixed(2)).unwrap();
        let ll = |g: f64| {
            s.values
                .iter()
                .map(|&x| -g * (x as f64).ln() - hurwitz_zeta(g, 2.0).ln())
                .sum::<f64>()
        };
        assert!((ll(fit.gamma) - fit.loglik).abs() < 1e-6 * fit.loglik.abs());
        assert!(ll(fit.gamma + 1e-3) < fit.loglik);
        assert!(ll(fit.gamma - 1e-3) < fit.loglik);
    }

    #[test]
    fn ks_matches_brute_force() {
        let s = gen_discrete_power_law(2_000, 2.4, 1, 5).unwrap();
        let fit = fit_power_law(&s, XminMode::Fixed(1)).unwrap();
        let sorted = s.sorted();
        let max = *sorted.last().unwrap();
        let n = sorted.len() as f64;
        let z0 = hurwitz_zeta(fit.gamma, 1.0);
        let mut cdf_fit = 0.0;
        let mut d: f64 = 0.0;
        for k in 1..=max + 5 {
            cdf_fit += (k as f64).powf(-fit.gamma) / z0;
            let emp = sorted.partition_point(|&x| x <= k) as f64 / n;
            d = d.max((emp - cdf_fit).abs());
        }
        assert!((d - fit.ks).abs() < 1e-9, "{d} vs {}", fit.ks);
    }

    #[test]
    fn ccdf_closed_form_slope() {
        let fit = PowerLawFit {
            gamma: 2.5,
            xmin: 1,
            ks: 0.0,
            loglik: 0.0,
            n_tail: 1,
            n: 1,
            ci95: None,
        };
        let k1 = 1000u64;
        let k2 = 2000u64;
        let slope = (fit.ccdf(k2).ln() - fit.ccdf(k1).ln()) / ((k2 as f64).ln() - (k1 as f64).ln());
        assert!((slope - (1.0 - 2.5)).abs() < 1e-3);
        let total: f64 = (1..200_000u64).map(|k| fit.ln_pmf(k).exp()).sum();
        assert!((total + fit.ccdf(200_000) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn permutation_invariant() {
        let s = gen_discrete_power_law(3_000, 2.7, 1, 9).unwrap();
        let mut rev = s.clone();
        rev.values.reverse();
        assert_eq!(
            fit_power_law(&s, XminMode::ScanAll).unwrap(),
            fit_power_law(&rev, XminMode::ScanAll).unwrap()
        );
    }

    #[test]
    fn heavier_tail_lowers_exponent() {
        let light = gen_discrete_power_law(20_000, 3.0, 1, 4).unwrap();
        let heavy = DegreeSample::new(
            light
                .values
                .iter()
                .map(|&x| if x >= 3 { x * 2 } else { x })
                .collect(),
        );
        let a = fit_power_law(&light, XminMode::Fixed(1)).unwrap();
        let b = fit_power_law(&heavy, XminMode::Fixed(1)).unwrap();
        assert!(b.gamma < a.gamma);
    }
}
