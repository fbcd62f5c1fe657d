//! Exact lattice computations behind the local limit statements.
//!
//! * [`exact_bivariate_pmf`]: the joint law of `(sum xi_j, sum j xi_j)` by
//!   dynamic programming, compared against its Gaussian limit.
//! * conditional laws of the weighted sum given the plain sum.
//! * a checker for lower bounds on convolutions of approximate discrete
//!   Gaussians, and the conditional-sum bound that uses it.

mod bivariate;
mod convolution;
mod decomposition;
mod gaussian;

pub use bivariate::{
    estimated_cells, exact_bivariate_ladder, exact_bivariate_pmf, BivariateMoments, BivariateOptions, BivariatePMF,
    ConditionalLaw, DEFAULT_PRUNE,
};
pub use convolution::{
    cond_sum_lclt_bound, convolution_lowerbound_check, normal_upper_tail, smallest_passing_sigma, std_normal_pdf,
    CenteredSeq, ConvolutionReport, HypothesisCheck, Lemma5Params,
};
pub use decomposition::{bulk_edge, DecompositionTerms};
pub use gaussian::{
    compare_bivariate, conditional_lclt_check, conditional_predicted, conditional_scale, conditional_sup_error,
    gaussian_bivariate_predicted, gaussian_bivariate_predicted_with, lclt_sup_error, scaled_bivariate_kernel,
    ConditionalCheck, ConditionalComparison, CrossTerm, GaussianComparison, GridPoint, COMPARISON_CSV_HEADER,
};
