//! Multiplicative reward: `total = r_primary * exp(c_penalty * r_penalty)`.
//!
//! `r_primary = w_vel * r_vel + w_sem * r_sem` rewards velocity tracking and
//! hitting the planned footholds during swing; `r_penalty <= 0` aggregates
//! weighted constraint costs, so penalties scale the primary reward down but
//! never flip its sign.

use crate::error::{Error, Result};
use crate::foothold::VelocityCommand;
use crate::gait::{swing_reference_height_unchecked, BehaviorParams, GaitState};
use crate::geometry::Vec2;
use crate::real::Real;

pub const CLEARANCE: &str = "clearance";
pub const ACTION_RATE: &str = "action_rate";
pub const BASE_COLLISION: &str = "base_collision";

#[derive(Debug, Clone, PartialEq)]
pub struct RewardConfig<T> {
    pub w_vel: T,
    pub w_sem: T,
    pub c_penalty: T,
    pub sigma_v: T,
    pub sigma_w: T,
    pub sigma_foot: T,
    /// Safety margin added to the swing reference height (m).
    pub delta_z: T,
    /// Named penalty weights; unknown names are allowed so extra terms can be
    /// configured without code changes.
    pub penalty_weights: Vec<(String, T)>,
}

impl<T: Real> Default for RewardConfig<T> {
    fn default() -> Self {
        Self {
            w_vel: T::one(),
            w_sem: T::half(),
            c_penalty: T::lit(0.1),
            sigma_v: T::lit(0.25),
            sigma_w: T::lit(0.25),
            sigma_foot: T::lit(0.0025),
            delta_z: T::lit(0.02),
            penalty_weights: vec![
                (CLEARANCE.to_string(), T::lit(100.0)),
                (ACTION_RATE.to_string(), T::one()),
                (BASE_COLLISION.to_string(), T::one()),
            ],
        }
    }
}

impl<T: Real> RewardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_v > T::zero() && self.sigma_w > T::zero() && self.sigma_foot > T::zero()) {
            return Err(Error::invalid("sigma", "all sigmas must be positive"));
        }
        if !(self.c_penalty > T::zero()) {
            return Err(Error::invalid("c_penalty", "must be positive"));
        }
        if !(self.delta_z >= T::zero()) {
            return Err(Error::invalid("delta_z", "must be nonnegative"));
        }
        if self.penalty_weights.iter().any(|(_, w)| !(*w >= T::zero())) {
            return Err(Error::invalid("penalty_weights", "weights must be nonnegative"));
        }
        Ok(())
    }

    pub fn penalty_weight(&self, name: &str) -> T {
        self.penalty_weights
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| *w)
            .unwrap_or_else(T::zero)
    }

    /// Weighted, sign-flipped contribution of a nonnegative cost.
    pub fn penalty(&self, name: &str, cost: T) -> Penalty<T> {
        Penalty {
            name: name.to_string(),
            value: T::zero() - self.penalty_weight(name) * cost,
        }
    }
}

/// One named penalty contribution (`-w_k * c_k`, nonpositive).
#[derive(Debug, Clone, PartialEq)]
pub struct Penalty<T> {
    pub name: String,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardBreakdown<T> {
    pub r_vel: T,
    pub r_sem: T,
    pub r_primary: T,
    pub penalties: Vec<Penalty<T>>,
    pub r_penalty: T,
    pub total: T,
}

/// `exp(-|v_xy - v_cmd|^2 / sigma_v) + exp(-(wz - wz_cmd)^2 / sigma_w)`, in `(0, 2]`.
pub fn velocity_tracking<T: Real>(v_xy: Vec2<T>, cmd: &VelocityCommand<T>, wz: T, cfg: &RewardConfig<T>) -> T {
    let lin = (v_xy - cmd.linear()).norm_squared();
    let ang = (wz - cmd.wz) * (wz - cmd.wz);
    (-lin / cfg.sigma_v).exp() + (-ang / cfg.sigma_w).exp()
}

/// Analytic gradient of [`velocity_tracking`] with respect to `v_xy`.
pub fn velocity_tracking_gradient<T: Real>(v_xy: Vec2<T>, cmd: &VelocityCommand<T>, cfg: &RewardConfig<T>) -> Vec2<T> {
    let e = v_xy - cmd.linear();
    let scale = -T::two() / cfg.sigma_v * (-e.norm_squared() / cfg.sigma_v).exp();
    e * scale
}

/// Sum over swinging legs of `exp(-|p_foot - p_target|^2 / sigma_foot)`, in `[0, 4]`.
///
/// Feet and targets must be expressed in the same frame.
pub fn semantic_foothold_tracking<T: Real>(
    foot_pos: &[Vec2<T>; 4],
    targets: &[Vec2<T>; 4],
    gait: &GaitState<T>,
    cfg: &RewardConfig<T>,
) -> T {
    (0..4)
        .filter(|&i| !gait.in_contact[i])
        .map(|i| (-(foot_pos[i] - targets[i]).norm_squared() / cfg.sigma_foot).exp())
        .sum()
}

/// Sum over swinging legs of `max(0, z_ref(phi) - z_foot)^2`.
pub fn clearance_penalty<T: Real>(
    foot_heights: &[T; 4],
    gait: &GaitState<T>,
    params: &BehaviorParams<T>,
    cfg: &RewardConfig<T>,
) -> T {
    (0..4)
        .filter(|&i| !gait.in_contact[i])
        .map(|i| {
            let z_ref = swing_reference_height_unchecked(gait.swing_progress[i], params.s_feet, cfg.delta_z);
            let gap = (z_ref - foot_heights[i]).max(T::zero());
            gap * gap
        })
        .sum()
}

/// Combines the primary terms with penalty contributions.
///
/// Fails if any contribution, or their sum, is positive.
pub fn total_reward<T: Real>(r_vel: T, r_sem: T, penalties: Vec<Penalty<T>>, cfg: &RewardConfig<T>) -> Result<RewardBreakdown<T>> {
    if let Some(p) = penalties.iter().find(|p| !(p.value <= T::zero())) {
        return Err(Error::invalid(
            "r_penalty",
            format!("penalty `{}` contributes {} (must be <= 0)", p.name, p.value),
        ));
    }
    let r_penalty: T = penalties.iter().map(|p| p.value).sum();
    let r_primary = cfg.w_vel * r_vel + cfg.w_sem * r_sem;
    let total = r_primary * (cfg.c_penalty * r_penalty).exp();
    Ok(RewardBreakdown {
        r_vel,
        r_sem,
        r_primary,
        penalties,
        r_penalty,
        total,
    })
}
