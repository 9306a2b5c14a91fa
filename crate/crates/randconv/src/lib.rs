//! Conversion of random numbers between finite i.i.d. sources.
//!
//! The crate answers three questions about turning samples of one finite
//! distribution into approximate samples of another, with closeness measured
//! by the Bhattacharyya fidelity:
//!
//! * exactly, in one shot, under the majorization pre-order ([`major`]);
//! * exactly, at toy scale, over all deterministic maps ([`detmap`]);
//! * asymptotically to second order in the block length, via Gaussian limit
//!   curves and their inversion into √n copy-rate corrections ([`asym`]).
//!
//! [`experiments`] drives the finite-n convergence studies behind the
//! `randconv` CLI, and [`validate`] bundles the cross-module consistency
//! suites run by `randconv validate`.

use thiserror::Error;

pub mod asym;
pub mod block;
pub mod detmap;
pub mod dist;
pub mod experiments;
pub mod major;
pub mod normal;
pub mod quad;
pub mod validate;

pub use asym::{
    attainment_fidelity, f1_limit, f2_limit, feq_limit, gaussian_overlap, ldn_expand,
    limit_fidelity, regime_classify, second_order_rate, solve_threshold, AttainmentCurve,
    ConversionRegime, GaussianSpec, RateResult, RegimeKind, Threshold,
};
pub use block::BlockDist;
pub use detmap::{fm_l_n, max_fidelity_det, oneshot_l, pushforward, DetMap};
pub use dist::{entropy, fidelity, hellinger, stats, varentropy, FiniteDist, SourceStats};
pub use major::{majorizes, max_fidelity_major, oracle_max_fidelity, partition_bound, MajorSolution};

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distributions have different support sizes: {0} vs {1}")]
    SupportMismatch(usize, usize),

    #[error("distribution does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("negative or non-finite probability: {0}")]
    BadProbability(f64),

    #[error("distribution must have at least one positive mass")]
    EmptySupport,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("block table is inconsistent: {0}")]
    BadBlocks(String),

    #[error("i.i.d. power has {0} type classes, above the enumeration limit {1}")]
    PowerTooLarge(u64, u64),

    #[error("exhaustive map search needs {0} assignments, above the limit {1}; use the majorization bound instead")]
    SearchSpaceExceeded(f64, u64),

    #[error("target is a point mass, the copy count is unbounded")]
    UnboundedCopies,

    #[error("support {0} exceeds the oracle limit of {1}")]
    OracleSupportTooLarge(usize, usize),

    #[error("cut positions must be sorted and nonnegative")]
    BadCuts,

    #[error("both distributions are uniform; the second-order theory does not cover this case")]
    BothUniform,

    #[error("operation requires the {expected} regime but the pair is {actual}")]
    WrongRegime { expected: String, actual: String },

    #[error("no sign change found for the threshold equation in [{0}, {1}]")]
    BracketNotFound(f64, f64),

    #[error("threshold residual {0} exceeds tolerance {1}")]
    ResidualTooLarge(f64, f64),

    #[error("attainment curve is invalid: {0}")]
    BadCurve(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
