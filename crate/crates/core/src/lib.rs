//! Statistics of bit-string probabilities of Haar-random and depolarized
//! quantum states.
//!
//! The crate draws random states ([`state`]), splits their probability
//! vectors into subsystem marginals and conditional slices ([`marginals`]),
//! compares the results with exact analytic laws ([`laws`], [`stats`]) and
//! scores sampled bit strings with linear cross-entropy estimators
//! ([`xeb`]). [`experiment`] and [`io`] drive it all from configuration
//! files and the `haarstat` command line.

pub mod error;
pub mod experiment;
pub mod io;
pub mod laws;
pub mod marginals;
pub mod rng;
pub mod special;
pub mod state;
pub mod stats;
pub mod xeb;

pub use error::{Error, Result};
pub use laws::{AnalyticLaw, LawFamily};
pub use marginals::{
    conditional_slice, marginalize, noisy_conditional_affine, noisy_conditional_exact,
    ConditionalSlice, Partition,
};
pub use rng::RngSpec;
pub use state::{
    depolarize, probabilities, sample_flat_dirichlet, sample_haar_state, BitStringProbs,
    DepolarizedProbVector, ProbVector, StateVector,
};
pub use stats::{
    estimate_gap, estimate_lambda_mean, histogram, ks_one_sample, ks_two_sample, GofReport,
    Histogram,
};
pub use xeb::{
    draw_samples, xeb_conditional, xeb_full, xeb_subsystem, SampleSet, XebKind, XebResult,
};
