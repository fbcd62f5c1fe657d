//! The embedded `eta` chain and the Ray-Knight description of local-time
//! profiles at inverse local times.

mod chain;
mod kernel;
mod lattice;
mod profile;
mod scaling;
mod stationary;

pub use chain::{sample_eta_chain, sample_eta_chain_with, EtaMarginals, RowSampler};
pub use kernel::{eta_kernel_row, EtaKernel, DEFAULT_EPS_TAIL};
pub use lattice::{Lattice1DDistribution, LatticeOffset};
pub use profile::{rk_profile_sampler, ChainIndexing, ProfileSampler};
pub use scaling::{beta_n, scaling_params, theta, ScalingParams, DEFAULT_ALPHA};
pub use stationary::{stationary_distribution, StationaryOptions, StationaryResult};
