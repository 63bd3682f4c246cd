//! Branching-course model predictive control for short-term collision
//! avoidance of small surface vessels.
//!
//! The planner grows a tree of piecewise velocity maneuvers from the current
//! state, predicts how the vessel tracks each branch, and picks the branch
//! with the lowest combined path alignment, obstacle avoidance and switching
//! cost. [`sim::run`] closes the loop around a 2-DOF vessel model.
//!
//! All numeric code is generic over [`Scalar`]; the aliases at the crate root
//! fix it to `f64`.
//!
//! ```
//! let cfg = bcmpc::scenarios::head_on::<f64>();
//! let log = bcmpc::sim::run(&cfg).unwrap();
//! let metrics = bcmpc::sim::compute_metrics(&log, &cfg.planner.geometry);
//! assert!(metrics.obstacles[0].min_distance > 50.0);
//! ```

// `!(x > 0)` is how parameter checks reject NaN along with non-positives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod guidance;
pub mod objective;
pub mod obstacles;
pub mod planner;
pub mod primitives;
pub mod scalar;
pub mod scenarios;
pub mod sim;
pub mod tree;
pub mod types;
pub mod vessel;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Pose = types::Pose<f64>;
pub type Velocity2 = types::Velocity2<f64>;
pub type Accel2 = types::Accel2<f64>;
pub type VesselState = types::VesselState<f64>;
pub type TimeGrid = types::TimeGrid<f64>;
pub type VelocityTrajectory = types::VelocityTrajectory<f64>;
pub type PoseTrajectory = types::PoseTrajectory<f64>;
pub type Force2 = vessel::Force2<f64>;
pub type VesselModel = vessel::VesselModel<f64>;
pub type ControllerGains = vessel::ControllerGains<f64>;
pub type StepParams = primitives::StepParams<f64>;
pub type AccelBox = primitives::AccelBox<f64>;
pub type ErrorModel = primitives::ErrorModel<f64>;
pub type Maneuver = primitives::Maneuver<f64>;
pub type TreeParams = tree::TreeParams<f64>;
pub type CandidateTrajectory = tree::CandidateTrajectory<f64>;
pub type DesiredTrajectory = guidance::DesiredTrajectory<f64>;
pub type LosParams = guidance::LosParams<f64>;
pub type LosGuidance = guidance::LosGuidance<f64>;
pub type PenaltyGeometry = objective::PenaltyGeometry<f64>;
pub type ObjectiveWeights = objective::ObjectiveWeights<f64>;
pub type ObstaclePrediction = objective::ObstaclePrediction<f64>;
pub type Selection = objective::Selection<f64>;
pub type ObstacleScript = obstacles::ObstacleScript<f64>;
pub type ObstacleState = obstacles::ObstacleState<f64>;
pub type ObstacleEstimate = obstacles::ObstacleEstimate<f64>;
pub type EstimateNoise = obstacles::EstimateNoise<f64>;
pub type Planner = planner::Planner<f64>;
pub type Plan = planner::Plan<f64>;
pub type ScenarioConfig = sim::ScenarioConfig<f64>;
pub type RunLog = sim::RunLog<f64>;
