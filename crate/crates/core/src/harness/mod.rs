//! Replica-parallel Monte Carlo campaigns.
//!
//! A [`CampaignConfig`] names a suite, its ladder and replica budget; the
//! campaign returns a [`StatsReport`] with tables and verdicts against the
//! loaded [`Expectations`](crate::expectations::Expectations). The
//! reducers in [`walks`] and [`profiles`] are usable on their own.

mod config;
pub mod profiles;
mod report;
mod suites;
pub mod walks;

pub use config::{CampaignConfig, Growth, Suite};
pub use report::{Check, StatsReport, Table, REPORT_SCHEMA};
pub use suites::{
    endpoint_law, inverse_time_asymptotics, kernel_extraction, local_clt_table, profile_shape, rk_equivalence, run_campaign,
    stationary_sigma2, tail_bounds_suite, w_boundary_terms, WINDOW,
};
