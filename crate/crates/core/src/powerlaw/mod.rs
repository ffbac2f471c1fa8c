//! Heavy-tail estimation for integer samples: discrete power-law MLE with a
//! KS-selected cutoff, bootstrap intervals, a lognormal alternative, the
//! normalized likelihood-ratio test and a goodness-of-fit p-value.

mod fit;
mod lognormal;
pub mod optimize;
mod resample;
mod vuong;
pub mod zeta;

pub use fit::{fit_power_law, PowerLawFit, XminMode, GAMMA_TOL, MIN_TAIL, XMIN_QUANTILE};
pub use lognormal::{fit_lognormal_tail, LognormalFit};
pub use resample::{
    bootstrap_ci, bootstrap_ci_with, bootstrap_replicates, bootstrap_replicates_with, gof_pvalue,
    ConfidenceInterval, GofResult, MIN_REPLICATES,
};
pub use vuong::{
    vuong_lr_test, vuong_lr_test_with_threshold, LrTestResult, Verdict, DEFAULT_THRESHOLD,
};
pub use zeta::hurwitz_zeta;
