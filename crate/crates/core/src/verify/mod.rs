//! Statistical verification harness.
//!
//! Every statistic is a deterministic function of the seeds, whatever the
//! execution policy: samples are indexed by stream and all reductions run in
//! index order.

pub mod chf;
pub mod envelope;
pub mod ks;
pub mod moments;
pub mod report;
pub mod suites;

pub use chf::{associated_chf, empirical_chf, ChfEstimate};
pub use envelope::{
    envelope_check, envelope_check_paths, Envelope, EnvelopeOutcome, EnvelopeSpec, Sequence,
};
pub use ks::{ks_statistic, ks_threshold, ks_two_sample, ks_two_sample_tol, Hypothesis, WithAtoms};
pub use moments::{alpha_moment_quadrature, moment_check};
pub use report::{Check, Comparison, Verdict, VerificationReport};
pub use suites::{run_suite, Suite, SuiteConfig};
