//! Two-stage uplink channel estimation for hybrid analog/digital receive
//! arrays: angles sensed from data symbols with super-resolution spectra,
//! then path gains from a handful of pilots.
//!
//! The crate also carries the pilot-only least-squares benchmark, the
//! closed-form SNR expressions both schemes are judged by, and a Monte Carlo
//! harness that regenerates the comparison curves as CSV.

pub mod array;
pub mod conventional;
pub mod covariance;
pub mod doa;
pub mod error;
pub mod estimate;
pub mod frontend;
pub mod gains;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod random;
pub mod signal;
pub mod stats;

pub use array::{build_channel, manifold, steering_vector, ArrayConfig, ChannelVector, PathSampler, PathSet};
pub use covariance::{CovarianceEstimate, Provenance};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use signal::{simulate_uplink, ReceivedBlock, UplinkFrame};
