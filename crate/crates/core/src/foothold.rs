//! Raibert footholds refined by a local grid search over collision costs.
//!
//! For every leg the nominal stance point is shifted by the commanded
//! velocity (Raibert heuristic), then an `M x M` lattice of candidates around
//! that point is scored with `J = w_dev * |p - p_raibert| + w_col * collides(p)`
//! and the cheapest candidate becomes the target.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gait::{BehaviorParams, Leg};
use crate::geometry::{Pose2D, Vec2};
use crate::gridmap::DualMap;
use crate::real::Real;
use crate::scenario::ObstacleQuery;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VelocityCommand<T> {
    pub vx: T,
    pub vy: T,
    pub wz: T,
}

impl<T: Real> VelocityCommand<T> {
    pub fn new(vx: T, vy: T, wz: T) -> Self {
        Self { vx, vy, wz }
    }

    pub fn forward(vx: T) -> Self {
        Self::new(vx, T::zero(), T::zero())
    }

    pub fn linear(&self) -> Vec2<T> {
        Vec2::new(self.vx, self.vy)
    }
}

/// Symmetric per-axis limits on commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommandBounds<T> {
    pub vx: T,
    pub vy: T,
    pub wz: T,
}

impl<T: Real> Default for CommandBounds<T> {
    fn default() -> Self {
        Self {
            vx: T::one(),
            vy: T::half(),
            wz: T::one(),
        }
    }
}

impl<T: Real> CommandBounds<T> {
    pub fn check(&self, cmd: &VelocityCommand<T>) -> Result<()> {
        if cmd.vx.abs() <= self.vx && cmd.vy.abs() <= self.vy && cmd.wz.abs() <= self.wz {
            Ok(())
        } else {
            Err(Error::invalid(
                "command",
                format!("({}, {}, {}) exceeds the command bounds", cmd.vx, cmd.vy, cmd.wz),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig<T> {
    /// Candidates per side (`M`), odd so the Raibert point is a candidate.
    pub grid_size: usize,
    /// Candidate spacing (m).
    pub grid_res: T,
    pub w_dev: T,
    pub w_col: T,
    /// Obstacle boxes are dilated by this radius (m).
    pub r_foot: T,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            grid_size: 7,
            grid_res: T::lit(0.025),
            w_dev: T::one(),
            w_col: T::lit(10.0),
            r_foot: T::lit(0.02),
        }
    }
}

impl<T: Real> SearchConfig<T> {
    /// Smallest collision weight for which every free candidate beats
    /// every colliding one: `w_dev * grid_res * M * sqrt(2)`.
    pub fn collision_weight_bound(&self) -> T {
        self.w_dev * self.grid_res * T::from_count(self.grid_size) * T::SQRT_2()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_size.is_multiple_of(2) {
            return Err(Error::invalid("grid_size", "must be odd and at least 1"));
        }
        if !(self.grid_res > T::zero()) {
            return Err(Error::invalid("grid_res", "must be positive"));
        }
        if !(self.w_dev >= T::zero()) || !(self.r_foot >= T::zero()) {
            return Err(Error::invalid("search", "w_dev and r_foot must be nonnegative"));
        }
        if !(self.w_col > self.collision_weight_bound()) {
            return Err(Error::invalid(
                "w_col",
                format!("{} must exceed {}", self.w_col, self.collision_weight_bound()),
            ));
        }
        Ok(())
    }

    /// Body-frame offsets of the candidates around the Raibert point, in
    /// row-major order (rows along body x).
    pub fn candidate_offsets(&self) -> impl Iterator<Item = Vec2<T>> + '_ {
        let m = self.grid_size;
        let half = (m / 2) as i64;
        (0..m * m).map(move |k| {
            let i = (k / m) as i64 - half;
            let j = (k % m) as i64 - half;
            Vec2::new(
                T::from_i64(i).unwrap() * self.grid_res,
                T::from_i64(j).unwrap() * self.grid_res,
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPlan<T> {
    pub leg: Leg,
    pub p_nom: Vec2<T>,
    pub p_raibert: Vec2<T>,
    pub p_target: Vec2<T>,
    /// `J(p_target)`.
    pub cost: T,
    /// `|p_target - p_raibert|`.
    pub deviation: T,
    /// Row-major index of the chosen candidate.
    pub candidate: usize,
    pub collision_free: bool,
}

/// Targets for all four legs, body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootholdPlan<T> {
    pub legs: [LegPlan<T>; 4],
}

impl<T: Real> FootholdPlan<T> {
    pub fn leg(&self, leg: Leg) -> &LegPlan<T> {
        &self.legs[leg.index()]
    }

    pub fn targets(&self) -> [Vec2<T>; 4] {
        self.legs.map(|l| l.p_target)
    }
}

/// Default foot position: front legs at `+l/2`, left legs at `+w/2`.
pub fn nominal_stance<T: Real>(params: &BehaviorParams<T>, leg: Leg) -> Vec2<T> {
    let hx = params.stance_length * T::half();
    let hy = params.stance_width * T::half();
    Vec2::new(
        if leg.is_front() { hx } else { -hx },
        if leg.is_left() { hy } else { -hy },
    )
}

/// `p_nom + [T_st/2 * vx, T_st/2 * wz * x_nom]` with `T_st = d / f`.
pub fn raibert_position<T: Real>(params: &BehaviorParams<T>, cmd: &VelocityCommand<T>, leg: Leg) -> Vec2<T> {
    let p_nom = nominal_stance(params, leg);
    let half_stance = params.stance_duration() * T::half();
    let lin = Vec2::new(half_stance * cmd.vx, T::zero());
    let yaw = Vec2::new(T::zero(), half_stance * cmd.wz * p_nom.x);
    p_nom + lin + yaw
}

/// True when the world image of `p_body` lies in an obstacle box dilated by
/// `r_foot`. The boundary counts as a collision. Virtual and rigid obstacles
/// are treated alike.
pub fn collision_indicator<T: Real, Q: ObstacleQuery<T> + ?Sized>(
    p_body: Vec2<T>,
    base: &Pose2D<T>,
    world: &Q,
    r_foot: T,
) -> bool {
    world.collides(base.body_to_world(p_body), r_foot)
}

/// Which cells of a sampled map count as obstacles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapRule<T> {
    /// Any cell with a positive semantic cost.
    SemanticCost,
    /// Elevation cells strictly above a height threshold.
    ElevationAbove(T),
}

impl<T: Real> MapRule<T> {
    fn blocks(&self, height: T, cost: T) -> bool {
        match *self {
            MapRule::SemanticCost => cost > T::zero(),
            MapRule::ElevationAbove(threshold) => height > threshold,
        }
    }
}

/// Map-only collision test: true when any cell whose square intersects the
/// square `p +- r_foot` is blocked under `rule`. Points outside the map
/// window read as free.
pub fn collision_indicator_from_map<T: Real>(p_world: Vec2<T>, map: &DualMap<T>, r_foot: T, rule: MapRule<T>) -> bool {
    let p_map = map.center().world_to_body(p_world);
    map.cells_near(p_map, r_foot).any(|c| rule.blocks(c.height, c.cost))
}

/// `J = w_dev * |p - p_raibert| + w_col * collision`.
pub fn foothold_cost<T: Real>(p_candidate: Vec2<T>, p_raibert: Vec2<T>, collision: bool, cfg: &SearchConfig<T>) -> T {
    let dev = (p_candidate - p_raibert).norm();
    cfg.w_dev * dev + if collision { cfg.w_col } else { T::zero() }
}

/// Searches the candidate lattice around `p_raibert`.
///
/// `collides` receives body-frame candidates. Ties on cost go to the
/// smaller deviation, then to the lower row-major index.
pub fn search_leg<T: Real>(
    leg: Leg,
    p_nom: Vec2<T>,
    p_raibert: Vec2<T>,
    cfg: &SearchConfig<T>,
    mut collides: impl FnMut(Vec2<T>) -> bool,
) -> LegPlan<T> {
    let mut best: Option<(T, T, usize, Vec2<T>, bool)> = None;
    for (k, offset) in cfg.candidate_offsets().enumerate() {
        let p = p_raibert + offset;
        let hit = collides(p);
        // Deviation is taken from the lattice offset so that symmetric
        // candidates tie exactly.
        let dev = offset.norm();
        let cost = cfg.w_dev * dev + if hit { cfg.w_col } else { T::zero() };
        let better = match &best {
            None => true,
            Some((c, d, _, _, _)) => match cost.partial_cmp(c) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => dev < *d,
                _ => false,
            },
        };
        if better {
            best = Some((cost, dev, k, p, hit));
        }
    }
    let (cost, deviation, candidate, p_target, hit) = best.expect("grid_size >= 1");
    LegPlan {
        leg,
        p_nom,
        p_raibert,
        p_target,
        cost,
        deviation,
        candidate,
        collision_free: !hit,
    }
}

/// Plans all legs with an arbitrary body-frame collision test.
pub fn select_target_with<T: Real>(
    params: &BehaviorParams<T>,
    cmd: &VelocityCommand<T>,
    cfg: &SearchConfig<T>,
    mut collides: impl FnMut(Leg, Vec2<T>) -> bool,
) -> FootholdPlan<T> {
    let legs = Leg::ALL.map(|leg| {
        let p_nom = nominal_stance(params, leg);
        let p_raibert = raibert_position(params, cmd, leg);
        search_leg(leg, p_nom, p_raibert, cfg, |p| collides(leg, p))
    });
    FootholdPlan { legs }
}

/// Plans all legs against ground-truth obstacles seen from `base`.
pub fn select_target<T: Real, Q: ObstacleQuery<T> + ?Sized>(
    params: &BehaviorParams<T>,
    cmd: &VelocityCommand<T>,
    base: &Pose2D<T>,
    world: &Q,
    cfg: &SearchConfig<T>,
) -> FootholdPlan<T> {
    select_target_with(params, cmd, cfg, |_, p| collision_indicator(p, base, world, cfg.r_foot))
}

/// Unmodified Raibert targets (what a blind controller steps to).
pub fn raibert_plan<T: Real, Q: ObstacleQuery<T> + ?Sized>(
    params: &BehaviorParams<T>,
    cmd: &VelocityCommand<T>,
    base: &Pose2D<T>,
    world: &Q,
    cfg: &SearchConfig<T>,
) -> FootholdPlan<T> {
    let single = SearchConfig { grid_size: 1, ..*cfg };
    let mut plan = select_target(params, cmd, base, world, &single);
    for leg in &mut plan.legs {
        // Report the cost under the full weights, not the 1x1 search.
        leg.cost = foothold_cost(leg.p_target, leg.p_raibert, !leg.collision_free, cfg);
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{sample_dual_map, GridSpec};
    use crate::scenario::{Obstacle, ObstacleMode, World};

    fn params() -> BehaviorParams<f64> {
        BehaviorParams::default()
    }

    fn world_with(boxes: &[(f64, f64, f64, f64)]) -> World<f64> {
        let mut w = World::empty(10.0, 2.0);
        for &(cx, cy, hx, hy) in boxes {
            w.obstacles.push(Obstacle {
                center: Vec2::new(cx, cy),
                half_extents: Vec2::new(hx, hy),
                height: 0.05,
                class_id: 1,
                mode: ObstacleMode::Rigid,
            });
        }
        w
    }

    #[test]
    fn nominal_stance_convention() {
        let p = params();
        assert_eq!(nominal_stance(&p, Leg::FrontLeft), Vec2::new(0.20, 0.15));
        assert_eq!(nominal_stance(&p, Leg::RearRight), Vec2::new(-0.20, -0.15));
        let fl = nominal_stance(&p, Leg::FrontLeft);
        let fr = nominal_stance(&p, Leg::FrontRight);
        assert_eq!((fl.x, fl.y), (fr.x, -fr.y));
    }

    #[test]
    fn raibert_offsets() {
        let p = params();
        for leg in Leg::ALL {
            assert_eq!(raibert_position(&p, &VelocityCommand::default(), leg), nominal_stance(&p, leg));
        }
        let fl = raibert_position(&p, &VelocityCommand::forward(0.7), Leg::FrontLeft);
        assert!((fl.x - 0.2875).abs() < 1e-15 && fl.y == 0.15);

        let turn = VelocityCommand::new(0.0, 0.0, 0.8);
        let front = raibert_position(&p, &turn, Leg::FrontLeft).y - 0.15;
        let rear = raibert_position(&p, &turn, Leg::RearLeft).y - 0.15;
        assert!((front - 0.02).abs() < 1e-15);
        assert!((rear + 0.02).abs() < 1e-15);
    }

    #[test]
    fn lateral_command_has_no_offset() {
        let p = params();
        let a = raibert_position(&p, &VelocityCommand::new(0.3, 0.4, 0.0), Leg::FrontRight);
        let b = raibert_position(&p, &VelocityCommand::new(0.3, 0.0, 0.0), Leg::FrontRight);
        assert_eq!(a, b);
    }

    #[test]
    fn indicator_boundary_is_inclusive() {
        let w = world_with(&[(1.0, 0.0, 0.1, 0.1)]);
        let base = Pose2D::origin();
        let r = 0.02;
        assert!(!collision_indicator(Vec2::new(2.0, 0.0), &base, &w, r));
        assert!(collision_indicator(Vec2::new(1.0, 0.0), &base, &w, r));
        let edge = 1.0 + 0.1 + r;
        assert!(collision_indicator(Vec2::new(edge - 1e-6, 0.0), &base, &w, r));
        assert!(!collision_indicator(Vec2::new(edge + 1e-6, 0.0), &base, &w, r));
        // Exactly on the dilated edge, with dyadic values so the sum is exact.
        let w = world_with(&[(1.0, 0.0, 0.125, 0.125)]);
        assert!(collision_indicator(Vec2::new(1.0 + 0.125 + 0.0625, 0.0), &base, &w, 0.0625));
        assert!(collision_indicator(Vec2::new(1.0, -0.1875), &base, &w, 0.0625));
    }

    #[test]
    fn cost_values() {
        let cfg = SearchConfig::<f64>::default();
        let p = Vec2::new(0.3, 0.1);
        assert_eq!(foothold_cost(p, p, false, &cfg), 0.0);
        assert_eq!(foothold_cost(p, p, true, &cfg), cfg.w_col);
        assert!((foothold_cost(p + Vec2::new(0.05, 0.0), p, false, &cfg) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn config_bound() {
        let cfg = SearchConfig::<f64>::default();
        cfg.validate().unwrap();
        assert!((cfg.collision_weight_bound() - 0.025 * 7.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(SearchConfig { w_col: 0.2, ..cfg }.validate().is_err());
        assert!(SearchConfig { grid_size: 4, ..cfg }.validate().is_err());
        assert!(SearchConfig { grid_size: 0, ..cfg }.validate().is_err());
        let offsets: Vec<_> = cfg.candidate_offsets().collect();
        assert_eq!(offsets.len(), 49);
        assert_eq!(offsets[24], Vec2::new(0.0, 0.0));
        assert_eq!(offsets[0], Vec2::new(-3.0 * 0.025, -3.0 * 0.025));
        assert_eq!(offsets[1], Vec2::new(-3.0 * 0.025, -2.0 * 0.025));
    }

    #[test]
    fn empty_world_keeps_raibert_points() {
        let w = World::<f64>::empty(10.0, 2.0);
        let cmd = VelocityCommand::forward(0.7);
        let plan = select_target(&params(), &cmd, &Pose2D::new(3.0, 0.2, 0.4), &w, &SearchConfig::default());
        for l in plan.legs {
            assert_eq!(l.p_target, l.p_raibert);
            assert_eq!(l.cost, 0.0);
            assert!(l.collision_free);
        }
        let still = select_target(&params(), &VelocityCommand::default(), &Pose2D::origin(), &w, &SearchConfig::default());
        for l in still.legs {
            assert_eq!(l.p_target, l.p_nom);
        }
    }

    #[test]
    fn obstacle_on_raibert_point_moves_target() {
        let p = params();
        let cmd = VelocityCommand::forward(0.7);
        let cfg = SearchConfig::default();
        // FL Raibert point is (0.2875, 0.15). A 4 cm box around it, dilated
        // by 2 cm, blocks offsets up to 6 cm on each axis.
        let w = world_with(&[(0.2875, 0.15, 0.04, 0.04)]);
        let plan = select_target(&p, &cmd, &Pose2D::origin(), &w, &cfg);
        let fl = plan.leg(Leg::FrontLeft);
        assert!(fl.collision_free);
        // Nearest free candidates are 7.5 cm away along one axis; the first
        // in row-major order is (-0.075, 0).
        assert!((fl.deviation - 0.075).abs() < 1e-12);
        assert!((fl.cost - 0.075).abs() < 1e-12);
        assert_eq!(fl.candidate, 3);
        // Other legs are untouched.
        assert_eq!(plan.leg(Leg::RearRight).p_target, plan.leg(Leg::RearRight).p_raibert);
    }

    #[test]
    fn fully_blocked_window_keeps_center() {
        let p = params();
        let cmd = VelocityCommand::forward(0.7);
        let w = world_with(&[(0.0, 0.0, 1.0, 1.0)]);
        let plan = select_target(&p, &cmd, &Pose2D::origin(), &w, &SearchConfig::default());
        for l in plan.legs {
            assert_eq!(l.p_target, l.p_raibert);
            assert!(!l.collision_free);
            assert_eq!(l.cost, 10.0);
            assert_eq!(l.candidate, 24);
        }
    }

    #[test]
    fn map_indicator_rules() {
        let mut w = world_with(&[(0.3, 0.0, 0.05, 0.05)]);
        w.obstacles[0].height = 0.03;
        let map = sample_dual_map(&w, Pose2D::origin(), GridSpec::default());
        let on = Vec2::new(0.3, 0.0);
        assert!(collision_indicator_from_map(on, &map, 0.02, MapRule::SemanticCost));
        assert!(collision_indicator_from_map(on, &map, 0.02, MapRule::ElevationAbove(0.02)));
        assert!(!collision_indicator_from_map(on, &map, 0.02, MapRule::ElevationAbove(0.04)));
        assert!(!collision_indicator_from_map(Vec2::new(-0.3, 0.0), &map, 0.02, MapRule::SemanticCost));
        assert!(!collision_indicator_from_map(Vec2::new(5.0, 0.0), &map, 0.02, MapRule::SemanticCost));
    }

    #[test]
    fn raibert_plan_reports_collisions() {
        let w = world_with(&[(0.2875, 0.15, 0.04, 0.04)]);
        let plan = raibert_plan(&params(), &VelocityCommand::forward(0.7), &Pose2D::origin(), &w, &SearchConfig::default());
        let fl = plan.leg(Leg::FrontLeft);
        assert_eq!(fl.p_target, fl.p_raibert);
        assert!(!fl.collision_free);
        assert_eq!(fl.cost, 10.0);
    }
}
