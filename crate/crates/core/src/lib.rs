//! Divergence inequalities, channel contraction and privacy amplification
//! for finite alphabets.
//!
//! * [`probkit`]: distributions, channels, push-forward and composition.
//! * [`divergences`]: TV, hockey-stick, `f_alpha`, Rényi, KL and order-infinity.
//! * [`inequalities`]: reverse Pinsker (`R_alpha`) and Pinsker (`g_alpha`)
//!   bounds and the binary joint-range envelope.
//! * [`contraction`]: confusion graphs, the no-contraction test, cross-channel
//!   likelihood-ratio extremes and contraction coefficients.
//! * [`privacy`]: RLDP of mechanisms and cascades, randomized response and
//!   block-uniform post-processing.
//! * [`oracle`]: brute-force reference computations for tests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contraction;
pub mod divergences;
pub mod error;
pub mod inequalities;
pub mod oracle;
pub mod privacy;
pub mod probkit;

pub use divergences::Alpha;
pub use error::{Error, Result};
pub use inequalities::GammaBounds;
pub use probkit::{Channel, Distribution, SupportSet};
