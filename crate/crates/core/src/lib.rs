pub mod distributions;
pub mod divergences;
pub mod error;
pub mod experiments;
pub mod hypothesis;
pub mod rng;

pub use distributions::{Distribution, Family, SampleSet, Support};
pub use error::{Error, Result};
pub use hypothesis::{DpParams, RobustnessParams, TestDecision, TestKind, Verdict};
pub use experiments::{ErrorEstimate, ExperimentSpec, ThresholdPolicy};
