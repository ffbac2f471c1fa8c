//! Bootstrap confidence intervals and the semiparametric goodness-of-fit test.
//!
//! Replicate `i` draws from a generator seeded by `seed::derive(seed, stream, i)`,
//! so results do not depend on how replicates are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_histogram, Histogram, PowerLawFit, XminMode};
use crate::degree::DegreeSample;
use crate::error::{Error, Result};
use crate::seed;
use crate::stats::quantile_sorted;
use crate::synth::DiscretePowerLaw;

/// Smallest replicate count accepted by either procedure.
pub const MIN_REPLICATES: usize = 100;
/// Largest tolerated share of failed replicates.
pub const MAX_FAILED_SHARE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub replicates: usize,
    pub failed: usize,
}

/// Maps each observation (in sorted order) to its histogram bin.
fn bin_index(h: &Histogram) -> Vec<u32> {
    let mut out = Vec::with_capacity(h.n as usize);
    for (i, &c) in h.counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(i as u32, c as usize));
    }
    out
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed as f64 > MAX_FAILED_SHARE * total as f64 {
        Err(Error::ReplicatesFailed { failed, total })
    } else {
        Ok(())
    }
}

/// Exponent replicates from full-procedure nonparametric resampling: each
/// replicate resamples the whole sample and refits with a cutoff scan.
pub fn bootstrap_replicates(
    sample: &DegreeSample,
    b: usize,
    seed: u64,
) -> Result<(Vec<f64>, usize)> {
    bootstrap_replicates_with(sample, XminMode::ScanAll, b, seed)
}

/// As [`bootstrap_replicates`], refitting each replicate with `mode`.
pub fn bootstrap_replicates_with(
    sample: &DegreeSample,
    mode: XminMode,
    b: usize,
    seed: u64,
) -> Result<(Vec<f64>, usize)> {
    if b < MIN_REPLICATES {
        return Err(Error::Precondition(format!(
            "bootstrap needs at least {MIN_REPLICATES} replicates, got {b}"
        )));
    }
    let h = Histogram::from_sample(sample);
    if h.n == 0 {
        return Err(Error::Precondition("empty sample".into()));
    }
    let bins = bin_index(&h);
    let results: Vec<Option<f64>> = (0..b as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, seed::stream::BOOTSTRAP, i));
            let mut counts = vec![0u64; h.values.len()];
            for _ in 0..h.n {
                counts[bins[rng.random_range(0..bins.len())] as usize] += 1;
            }
            let rh = Histogram::from_parts(h.values.clone(), counts);
            fit_histogram(&rh, mode).ok().map(|f| f.gamma)
        })
        .collect();
    let failed = results.iter().filter(|r| r.is_none()).count();
    check_failures(failed, b)?;
    Ok((results.into_iter().flatten().collect(), failed))
}

/// 2.5th and 97.5th percentiles of the bootstrap exponents.
pub fn bootstrap_ci(sample: &DegreeSample, b: usize, seed: u64) -> Result<ConfidenceInterval> {
    bootstrap_ci_with(sample, XminMode::ScanAll, b, seed)
}

pub fn bootstrap_ci_with(
    sample: &DegreeSample,
    mode: XminMode,
    b: usize,
    seed: u64,
) -> Result<ConfidenceInterval> {
    let (mut reps, failed) = bootstrap_replicates_with(sample, mode, b, seed)?;
    reps.sort_by(f64::total_cmp);
    Ok(ConfidenceInterval {
        lo: quantile_sorted(&reps, 0.025),
        hi: quantile_sorted(&reps, 0.975),
        replicates: b,
        failed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub p: f64,
    pub sims: usize,
    pub failed: usize,
}

/// Share of synthetic data sets whose refitted KS distance exceeds the
/// observed one. Synthetic sets keep the sample size; each point comes from
/// the fitted tail with probability `n_tail / n` and otherwise from the
/// empirical values below `xmin`.
pub fn gof_pvalue(
    sample: &DegreeSample,
    fit: &PowerLawFit,
    nsims: usize,
    seed: u64,
) -> Result<GofResult> {
    if nsims < MIN_REPLICATES {
        return Err(Error::Precondition(format!(
            "goodness-of-fit needs at least {MIN_REPLICATES} simulations, got {nsims}"
        )));
    }
    let h = Histogram::from_sample(sample);
    let body_end = h.lower_bound(fit.xmin);
    let body: Vec<u64> = (0..body_end)
        .flat_map(|i| std::iter::repeat_n(h.values[i], h.counts[i] as usize))
        .collect();
    let tail_prob = fit.n_tail as f64 / h.n as f64;
    let law = DiscretePowerLaw::new(fit.gamma, fit.xmin)?;
    let results: Vec<Option<bool>> = (0..nsims as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, seed::stream::GOF, i));
            let values: Vec<u64> = (0..h.n)
                .map(|_| {
                    if body.is_empty() || rng.random::<f64>() < tail_prob {
                        law.sample(&mut rng)
                    } else {
                        body[rng.random_range(0..body.len())]
                    }
                })
                .collect();
            let refit = fit_histogram(
                &Histogram::from_sample(&DegreeSample::new(values)),
                XminMode::ScanAll,
            )
            .ok()?;
            Some(refit.ks > fit.ks)
        })
        .collect();
    let failed = results.iter().filter(|r| r.is_none()).count();
    check_failures(failed, nsims)?;
    let exceed = results.iter().filter(|r| **r == Some(true)).count();
    Ok(GofResult {
        p: exceed as f64 / (nsims - failed) as f64,
        sims: nsims,
        failed,
    })
}
