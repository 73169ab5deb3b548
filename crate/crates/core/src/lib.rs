//! Bayesian dual-systems estimation of an unobserved population count.
//!
//! Two incomplete record systems overlap; the number of events missed by
//! both is unknown. [`models`] provides integrated likelihoods for that
//! count under three models of increasing structure, [`posterior`] turns
//! them into a discrete posterior over the total, and [`oracle`] holds
//! brute-force quadratures that check the closed forms.

pub mod capture_data;
pub mod combinomial;
pub mod error;
pub mod lognum;
pub mod models;
pub mod oracle;
pub mod posterior;

pub use capture_data::{load_capture_table, CaptureTable, ReducedTable, SummaryStats};
pub use combinomial::{log_pmf, log_z, pmf_row, ComBinomialParams};
pub use error::{Error, Result};
pub use lognum::{log_binomial, log_factorial, log_sum_exp, LogWeight};
pub use models::{
    demographic_range, loglik_binomial, loglik_combinomial, loglik_simple, ComBinomialLikelihood,
    DemographicInputs, DemographicRange, Model, NuisanceGrid, Segment,
};
pub use posterior::{compute_posterior, PosteriorDistribution, PriorSpec, QuantileReport};
