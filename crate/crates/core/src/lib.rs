//! Semantic-aware foothold planning for quadrupeds walking through clutter.
//!
//! The crate is organized bottom-up:
//!
//! - [`scenario`]: obstacle worlds, procedural tracks and their file format
//! - [`gridmap`]: robot-centered elevation and semantic grids
//! - [`gait`]: the walking clock and swing reference profile
//! - [`foothold`]: Raibert footholds refined by a collision-cost grid search
//! - [`reward`]: multiplicative reward stack
//! - [`observation`]: the flat 1513-scalar observation layout
//! - [`simulator`]: kinematic rollouts with virtual or rigid obstacles
//! - [`curriculum`]: velocity-bin and obstacle-density curricula
//! - [`bench`]: paired policy sweeps and their reports
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below name the common `f64` instantiations.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod curriculum;
pub mod error;
pub mod foothold;
pub mod gait;
pub mod geometry;
pub mod gridmap;
pub mod observation;
pub mod real;
pub mod reward;
pub mod scenario;
pub mod simulator;

pub use error::{Error, Result};
pub use real::Real;

pub use foothold::{CommandBounds, MapRule, VelocityCommand};
pub use gait::Leg;
pub use scenario::{ObstacleMode, ObstacleQuery};
pub use simulator::{PolicyKind, Termination};

pub type Vec2 = geometry::Vec2<f64>;
pub type Vec3 = geometry::Vec3<f64>;
pub type Pose2D = geometry::Pose2D<f64>;
pub type GridSpec = gridmap::GridSpec<f64>;
pub type DualMap = gridmap::DualMap<f64>;
pub type World = scenario::World<f64>;
pub type Obstacle = scenario::Obstacle<f64>;
pub type BehaviorParams = gait::BehaviorParams<f64>;
pub type GaitState = gait::GaitState<f64>;
pub type SearchConfig = foothold::SearchConfig<f64>;
pub type FootholdPlan = foothold::FootholdPlan<f64>;
pub type Command = foothold::VelocityCommand<f64>;
pub type RewardConfig = reward::RewardConfig<f64>;
pub type RewardBreakdown = reward::RewardBreakdown<f64>;
pub type ObservationVector = observation::ObservationVector<f64>;
pub type RobotState = simulator::RobotState<f64>;
pub type Policy = simulator::Policy<f64>;
pub type SimConfig = simulator::SimConfig<f64>;
pub type VelocityGrid = curriculum::VelocityGrid<f64>;
pub type DensitySchedule = curriculum::DensitySchedule<f64>;

pub type World32 = scenario::World<f32>;
pub type SearchConfig32 = foothold::SearchConfig<f32>;
pub type FootholdPlan32 = foothold::FootholdPlan<f32>;
pub type BehaviorParams32 = gait::BehaviorParams<f32>;
