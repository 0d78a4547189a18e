//! Estimation of exponential location parameters when the scale parameters are
//! ordered (`σ1 <= σ2`).

pub mod boundary;
pub mod constants;
pub mod error;
pub mod estimators;
pub mod losses;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod pitman;
pub mod schemes;

pub use error::{Error, Result};
pub use estimators::{estimate, estimate_mu1, estimate_mu2, Estimate, EstimatorKind, EstimatorPlan, PointEstimator};
pub use losses::LossSpec;
pub use model::{Ancillaries, PopulationParams, SampleDesign, SufficientStats, Target};
pub use schemes::{SamplingPlan, Scheme};
