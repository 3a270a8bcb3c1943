//! Path signatures, signature-induced semi-metrics and Nadaraya–Watson
//! local regression on path-valued data.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor_algebra`]: dense truncated tensor algebra, words, the shuffle
//!   product and free Lie algebra dimension counting.
//! - [`signature`]: sampled paths (read as piecewise-linear) and their
//!   truncated signatures.
//! - [`metrics`]: signature, robust-signature, sup, `L^p`, `p`-variation and
//!   DTW distances behind one [`metrics::SemiMetricSpec`].
//! - [`regression`]: Nadaraya–Watson regression and classification with
//!   k-fold cross-validation.
//! - [`sde_lab`]: Brownian drivers, Euler–Maruyama, small-ball estimates and
//!   the RMSE-vs-sample-size study.
//! - [`synthetic`]: small generated classification benchmarks.

pub mod error;
pub mod format;
pub mod metrics;
pub mod regression;
pub mod sde_lab;
pub mod signature;
pub mod synthetic;
pub mod tensor_algebra;

pub use error::{Error, Result};
pub use metrics::{Metric, RobustParams, SemiMetricSpec};
pub use regression::{CvConfig, KernelSpec, NwModel};
pub use sde_lab::{RngSpec, SdeConfig};
pub use signature::Path;
pub use tensor_algebra::{FormalWordSum, TruncatedTensor, Word};
