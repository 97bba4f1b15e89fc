//! Kinematic quadruped rollouts over cluttered tracks.
//!
//! The base follows the commanded twist exactly (optionally with uniform
//! velocity noise). Each foot is either planted or swinging along a straight
//! line from its liftoff point to a world-frame target fixed at liftoff,
//! with height given by the swing reference profile blended between the
//! liftoff and landing terrain heights. Policies differ only in how they
//! choose targets and how high they are willing to lift:
//!
//! - `Blind` steps on the Raibert point and tracks the reference exactly.
//! - `GeometricProxy` searches around it, treating elevation cells above a
//!   threshold as obstacles, and raises the swing over mapped heights.
//! - `Semantic` searches against semantic costs and raises the swing over
//!   known obstacles.
//!
//! A step collision is a landing inside an obstacle box dilated by the foot
//! radius. With rigid obstacles, a swinging foot below the terrain top while
//! inside an obstacle footprint is a stub and ends the trial as a trip.

mod log;

pub use log::{RewardLog, TrajectoryLog};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::foothold::{
    collision_indicator_from_map, raibert_position, search_leg, MapRule, SearchConfig, VelocityCommand,
};
use crate::gait::{advance, swing_reference_height_unchecked, BehaviorParams, GaitState, Leg};
use crate::geometry::{Pose2D, Vec2, Vec3};
use crate::gridmap::{sample_dual_map_noisy, DualMap, GridSpec};
use crate::real::Real;
use crate::reward::{
    clearance_penalty, semantic_foothold_tracking, total_reward, velocity_tracking, RewardBreakdown, RewardConfig,
    ACTION_RATE, BASE_COLLISION, CLEARANCE,
};
use crate::scenario::{IndexedWorld, ObstacleQuery, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Blind,
    GeometricProxy,
    Semantic,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Blind, PolicyKind::GeometricProxy, PolicyKind::Semantic];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Blind => "blind",
            PolicyKind::GeometricProxy => "geo",
            PolicyKind::Semantic => "sem",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blind" => Ok(PolicyKind::Blind),
            "geo" | "geometric" | "geometric_proxy" => Ok(PolicyKind::GeometricProxy),
            "sem" | "semantic" => Ok(PolicyKind::Semantic),
            other => Err(format!("unknown policy `{other}` (expected blind, geo or sem)")),
        }
    }
}

/// Where a perceptive policy reads obstacles from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perception {
    /// Exact obstacle boxes.
    GroundTruth,
    /// The robot-centered grids sampled at liftoff.
    Map,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy<T> {
    pub kind: PolicyKind,
    pub search: SearchConfig<T>,
    /// Semantic policy only; the geometric proxy always reads the map.
    pub perception: Perception,
    /// Elevation above which the geometric proxy treats a cell as an obstacle.
    pub height_threshold: T,
    /// Ceiling on the footswing height a perceptive policy may command.
    pub max_swing_height: T,
    /// Clearance kept above perceived obstacle tops when lifting.
    pub lift_margin: T,
    /// Extra inflation of map queries. Cells report the terrain at their
    /// center, so an obstacle can reach up to half a cell past the cells
    /// that show it.
    pub map_margin: T,
}

impl<T: Real> Policy<T> {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            search: SearchConfig::default(),
            perception: Perception::GroundTruth,
            height_threshold: T::lit(0.04),
            max_swing_height: T::lit(0.25),
            lift_margin: T::lit(0.01),
            map_margin: T::lit(0.025),
        }
    }

    pub fn blind() -> Self {
        Self::new(PolicyKind::Blind)
    }

    pub fn geometric() -> Self {
        Self::new(PolicyKind::GeometricProxy)
    }

    pub fn semantic() -> Self {
        Self::new(PolicyKind::Semantic)
    }

    fn uses_map(&self) -> bool {
        match self.kind {
            PolicyKind::Blind => false,
            PolicyKind::GeometricProxy => true,
            PolicyKind::Semantic => self.perception == Perception::Map,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    /// Control period (s); 50 Hz by default.
    pub dt: T,
    pub behavior: BehaviorParams<T>,
    pub reward: RewardConfig<T>,
    pub grid: GridSpec<T>,
    pub max_time: T,
    /// First-order lag time constant on swing height; `None` tracks exactly.
    pub swing_lag: Option<T>,
    /// Amplitude of zero-mean uniform noise on the realized base twist.
    pub velocity_noise: T,
    /// Amplitude of zero-mean uniform noise on sampled elevation cells.
    pub map_noise: T,
    /// Terrain taller than `h_base - body_clearance` under the base counts
    /// as a body collision.
    pub body_clearance: T,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(0.02),
            behavior: BehaviorParams::default(),
            reward: RewardConfig::default(),
            grid: GridSpec::default(),
            max_time: T::lit(30.0),
            swing_lag: None,
            velocity_noise: T::zero(),
            map_noise: T::zero(),
            body_clearance: T::lit(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Running,
    Success,
    Trip,
    Timeout,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Running => "running",
            Termination::Success => "success",
            Termination::Trip => "trip",
            Termination::Timeout => "timeout",
        })
    }
}

impl FromStr for Termination {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "running" => Ok(Termination::Running),
            "success" => Ok(Termination::Success),
            "trip" => Ok(Termination::Trip),
            "timeout" => Ok(Termination::Timeout),
            other => Err(format!("unknown termination `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState<T> {
    pub base: Pose2D<T>,
    pub base_height: T,
    pub feet_world: [Vec3<T>; 4],
    pub gait: GaitState<T>,
    pub swing_origin: [Vec2<T>; 4],
    pub swing_target: [Vec2<T>; 4],
    /// Footswing height in use for the current swing of each leg.
    pub swing_height: [T; 4],
    /// Terrain heights at liftoff and at the landing target.
    pub liftoff_height: [T; 4],
    pub landing_height: [T; 4],
    pub steps: u64,
    pub last_cmd: VelocityCommand<T>,
}

impl<T: Real> RobotState<T> {
    /// Standing at `base` with every foot on its nominal stance point.
    pub fn standing(base: Pose2D<T>, params: &BehaviorParams<T>) -> Self {
        let feet = Leg::ALL.map(|leg| {
            let p = base.body_to_world(crate::foothold::nominal_stance(params, leg));
            Vec3::from_xy(p, T::zero())
        });
        let xy = feet.map(|f| f.xy());
        Self {
            base,
            base_height: params.h_base,
            feet_world: feet,
            gait: GaitState::initial(params),
            swing_origin: xy,
            swing_target: xy,
            swing_height: [params.s_feet; 4],
            liftoff_height: [T::zero(); 4],
            landing_height: [T::zero(); 4],
            steps: 0,
            last_cmd: VelocityCommand::default(),
        }
    }

    pub fn time(&self, dt: T) -> T {
        T::from_u64(self.steps).unwrap() * dt
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub new_state: RobotState<T>,
    /// Legs that touched down this step.
    pub landed: [bool; 4],
    /// Touchdowns inside a dilated obstacle box.
    pub foot_collisions: [bool; 4],
    /// Swing feet inside a rigid obstacle below its top.
    pub stub_events: [bool; 4],
    pub terminated: Termination,
    /// Progress along the track (m).
    pub distance: T,
    pub reward: RewardBreakdown<T>,
}

/// Per-trial benchmark record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub policy: PolicyKind,
    pub density: f64,
    pub distance: f64,
    pub success: bool,
    pub total_steps: u64,
    pub colliding_steps: u64,
    pub termination: Termination,
}

/// A world, policy and configuration bundled for stepping.
pub struct Simulator<'w, T: Real> {
    world: IndexedWorld<'w, T>,
    policy: Policy<T>,
    config: SimConfig<T>,
    rng: ChaCha8Rng,
}

impl<'w, T: Real> Simulator<'w, T> {
    /// `noise_seed` drives only the optional velocity and map noise.
    pub fn new(world: &'w World<T>, policy: Policy<T>, config: SimConfig<T>, noise_seed: u64) -> Self {
        Self {
            world: IndexedWorld::with_defaults(world),
            policy,
            config,
            rng: ChaCha8Rng::seed_from_u64(noise_seed),
        }
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.config
    }

    pub fn policy(&self) -> &Policy<T> {
        &self.policy
    }

    /// Initial state at the start of the track, with targets planned for
    /// legs that begin in swing.
    pub fn initial_state(&mut self, cmd: &VelocityCommand<T>) -> RobotState<T> {
        let mut state = RobotState::standing(Pose2D::origin(), &self.config.behavior);
        let mut map = None;
        for leg in Leg::ALL {
            if state.gait.is_swing(leg) {
                self.lift_off(&mut state, leg, cmd, &mut map);
                let i = leg.index();
                let phi = state.gait.swing_progress[i];
                let pos = self.swing_position(&state, i, phi);
                state.feet_world[i] = pos;
            }
        }
        state
    }

    pub fn step(&mut self, state: &RobotState<T>, cmd: &VelocityCommand<T>) -> StepOutcome<T> {
        let actual = if self.config.velocity_noise > T::zero() {
            let a = self.config.velocity_noise.as_f64();
            let mut noise = || T::lit(self.rng.gen_range(-a..=a));
            VelocityCommand::new(cmd.vx + noise(), cmd.vy + noise(), cmd.wz + noise())
        } else {
            *cmd
        };
        self.step_with_twist(state, cmd, &actual)
    }

    fn step_with_twist(
        &mut self,
        state: &RobotState<T>,
        cmd: &VelocityCommand<T>,
        actual: &VelocityCommand<T>,
    ) -> StepOutcome<T> {
        let cfg = &self.config;
        let params = cfg.behavior;
        let dt = cfg.dt;
        let mut next = state.clone();
        next.gait = advance(&state.gait, &params, dt);
        next.base = state.base.integrate(actual.vx, actual.vy, actual.wz, dt);
        next.steps = state.steps + 1;
        next.last_cmd = *cmd;

        let r_foot = self.policy.search.r_foot;
        let mut landed = [false; 4];
        let mut foot_collisions = [false; 4];
        let mut stub_events = [false; 4];
        let mut map: Option<DualMap<T>> = None;

        for leg in Leg::ALL {
            let i = leg.index();
            let was_contact = state.gait.in_contact[i];
            let now_contact = next.gait.in_contact[i];
            match (was_contact, now_contact) {
                (true, true) => {}
                (false, true) => {
                    let target = next.swing_target[i];
                    let z = self.world.height_at(target, true);
                    next.feet_world[i] = Vec3::from_xy(target, z);
                    landed[i] = true;
                    foot_collisions[i] = self.world.collides(target, r_foot);
                }
                (true, false) | (false, false) => {
                    if was_contact {
                        self.lift_off(&mut next, leg, cmd, &mut map);
                    }
                    let phi = next.gait.swing_progress[i];
                    let mut pos = self.swing_position(&next, i, phi);
                    if let Some(tau) = self.config.swing_lag {
                        let alpha = dt / (tau + dt);
                        let prev = state.feet_world[i].z;
                        pos.z = prev + alpha * (pos.z - prev);
                    }
                    next.feet_world[i] = pos;
                    let top = self.world.height_at(pos.xy(), true);
                    stub_events[i] = top > T::zero() && pos.z < top;
                }
            }
        }

        let cfg = &self.config;
        let distance = next.base.x.max(T::zero()).min(self.world.world().track_length);
        let finish = self.world.world().track_length - T::lit(1e-9);
        let terminated = if stub_events.iter().any(|&s| s) {
            Termination::Trip
        } else if next.base.x >= finish {
            Termination::Success
        } else if next.time(dt) >= cfg.max_time - T::lit(1e-9) {
            Termination::Timeout
        } else {
            Termination::Running
        };
        let distance = if terminated == Termination::Success {
            self.world.world().track_length
        } else {
            distance
        };

        let reward = self.reward(state, &next, cmd, actual);
        StepOutcome {
            new_state: next,
            landed,
            foot_collisions,
            stub_events,
            terminated,
            distance,
            reward,
        }
    }

    fn reward(
        &self,
        prev: &RobotState<T>,
        next: &RobotState<T>,
        cmd: &VelocityCommand<T>,
        actual: &VelocityCommand<T>,
    ) -> RewardBreakdown<T> {
        let cfg = &self.config;
        let r_vel = velocity_tracking(actual.linear(), cmd, actual.wz, &cfg.reward);
        let feet_xy = next.feet_world.map(|f| f.xy());
        let r_sem = semantic_foothold_tracking(&feet_xy, &next.swing_target, &next.gait, &cfg.reward);
        // Reference heights are relative to the blended terrain under the
        // swing, so compare clearance above that baseline.
        let rel: [T; 4] = std::array::from_fn(|i| {
            let phi = next.gait.swing_progress[i];
            let base = (T::one() - phi) * next.liftoff_height[i] + phi * next.landing_height[i];
            next.feet_world[i].z - base
        });
        let clearance = clearance_penalty(&rel, &next.gait, &cfg.behavior, &cfg.reward);
        let dc = VelocityCommand::new(cmd.vx - prev.last_cmd.vx, cmd.vy - prev.last_cmd.vy, cmd.wz - prev.last_cmd.wz);
        let action_rate = if prev.steps == 0 {
            T::zero()
        } else {
            dc.vx * dc.vx + dc.vy * dc.vy + dc.wz * dc.wz
        };
        let belly = next.base_height - cfg.body_clearance;
        let under = self.world.height_at(next.base.position(), false);
        let body_hit = if under > belly { T::one() } else { T::zero() };
        let penalties = vec![
            cfg.reward.penalty(CLEARANCE, clearance),
            cfg.reward.penalty(ACTION_RATE, action_rate),
            cfg.reward.penalty(BASE_COLLISION, body_hit),
        ];
        total_reward(r_vel, r_sem, penalties, &cfg.reward).expect("penalty terms are nonpositive by construction")
    }

    /// Plans the target and swing height for `leg`, which has just lifted off.
    fn lift_off(&mut self, state: &mut RobotState<T>, leg: Leg, cmd: &VelocityCommand<T>, map: &mut Option<DualMap<T>>) {
        let i = leg.index();
        let params = self.config.behavior;
        let phi = state.gait.swing_progress[i];
        let remaining = (T::one() - phi) * params.swing_duration();
        let touchdown = state.base.integrate(cmd.vx, cmd.vy, cmd.wz, remaining);
        let p_nom = crate::foothold::nominal_stance(&params, leg);
        let p_raibert = raibert_position(&params, cmd, leg);

        if self.policy.uses_map() && map.is_none() {
            let rng = &mut self.rng;
            *map = Some(sample_dual_map_noisy(
                &self.world,
                state.base,
                self.config.grid,
                self.config.map_noise,
                rng,
            ));
        }
        let policy = self.policy;
        let world = &self.world;
        let r_foot = policy.search.r_foot;
        let rule = match policy.kind {
            PolicyKind::GeometricProxy => MapRule::ElevationAbove(policy.height_threshold),
            _ => MapRule::SemanticCost,
        };

        let target_body = match policy.kind {
            PolicyKind::Blind => p_raibert,
            _ => {
                let plan = search_leg(leg, p_nom, p_raibert, &policy.search, |p| {
                    let w = touchdown.body_to_world(p);
                    match map.as_ref() {
                        Some(m) => collision_indicator_from_map(w, m, r_foot + policy.map_margin, rule),
                        None => world.collides(w, r_foot),
                    }
                });
                plan.p_target
            }
        };
        let target = touchdown.body_to_world(target_body);
        let origin = state.feet_world[i].xy();
        state.swing_origin[i] = origin;
        state.swing_target[i] = target;
        state.liftoff_height[i] = state.feet_world[i].z;
        state.landing_height[i] = world.height_at(target, true);
        state.swing_height[i] = match policy.kind {
            PolicyKind::Blind => params.s_feet,
            _ => self.lift_height(state, i, map.as_ref()),
        };
    }

    /// Smallest footswing height, within policy limits, that keeps the
    /// planned swing above perceived obstacle tops.
    fn lift_height(&self, state: &RobotState<T>, i: usize, map: Option<&DualMap<T>>) -> T {
        const SAMPLES: usize = 48;
        let params = &self.config.behavior;
        let dz = self.config.reward.delta_z;
        let r_foot = self.policy.search.r_foot;
        let perceived = |p: Vec2<T>| -> T {
            match map {
                Some(m) => {
                    let local = m.center().world_to_body(p);
                    let reach = r_foot + self.policy.map_margin;
                    m.cells_near(local, reach).map(|c| c.height).fold(T::zero(), T::max)
                }
                None => self.world.max_height_near(p, r_foot),
            }
        };
        let h0 = state.liftoff_height[i];
        let h1 = match map {
            Some(_) => perceived(state.swing_target[i]),
            None => state.landing_height[i],
        };
        let mut need = params.s_feet;
        for k in 1..SAMPLES {
            let phi = T::from_count(k) / T::from_count(SAMPLES);
            let p = state.swing_origin[i].lerp(state.swing_target[i], phi);
            let top = perceived(p);
            let floor = (T::one() - phi) * h0 + phi * h1 + dz;
            let gap = top + self.policy.lift_margin - floor;
            if gap > T::zero() {
                let shape = swing_reference_height_unchecked(phi, T::one(), T::zero());
                need = need.max(gap / shape);
            }
        }
        need.min(self.policy.max_swing_height.max(params.s_feet))
    }

    fn swing_position(&self, state: &RobotState<T>, i: usize, phi: T) -> Vec3<T> {
        let xy = state.swing_origin[i].lerp(state.swing_target[i], phi);
        let base = (T::one() - phi) * state.liftoff_height[i] + phi * state.landing_height[i];
        let z = swing_reference_height_unchecked(phi, state.swing_height[i], self.config.reward.delta_z) + base;
        Vec3::from_xy(xy, z)
    }

    /// Runs until success, trip or timeout.
    pub fn run(&mut self, cmd: &VelocityCommand<T>, mut logs: Option<&mut TrialLogs>) -> TrialResult {
        let mut state = self.initial_state(cmd);
        let mut total_steps = 0u64;
        let mut colliding_steps = 0u64;
        if let Some(l) = logs.as_deref_mut() {
            l.trajectory.record(T::zero(), &state, &[false; 4]);
        }
        loop {
            let out = self.step(&state, cmd);
            total_steps += out.landed.iter().filter(|&&l| l).count() as u64;
            colliding_steps += out.foot_collisions.iter().filter(|&&c| c).count() as u64;
            if let Some(l) = logs.as_deref_mut() {
                let t = out.new_state.time(self.config.dt);
                l.trajectory.record(t, &out.new_state, &out.foot_collisions);
                l.rewards.record(out.new_state.steps, &out.reward);
            }
            if out.terminated != Termination::Running {
                let world = self.world.world();
                return TrialResult {
                    seed: world.seed,
                    policy: self.policy.kind,
                    density: world.density.as_f64(),
                    distance: out.distance.as_f64(),
                    success: out.terminated == Termination::Success,
                    total_steps,
                    colliding_steps,
                    termination: out.terminated,
                };
            }
            state = out.new_state;
        }
    }
}

/// Optional per-step logs collected by [`Simulator::run`].
#[derive(Debug, Default, Clone)]
pub struct TrialLogs {
    pub trajectory: TrajectoryLog,
    pub rewards: RewardLog,
}

/// Noise-free single step.
pub fn step<T: Real>(
    state: &RobotState<T>,
    cmd: &VelocityCommand<T>,
    world: &World<T>,
    policy: &Policy<T>,
    config: &SimConfig<T>,
) -> StepOutcome<T> {
    let mut sim = Simulator::new(world, *policy, SimConfig { velocity_noise: T::zero(), map_noise: T::zero(), ..config.clone() }, 0);
    sim.step(state, cmd)
}

/// Runs one trial from the start of the track.
pub fn run_trial<T: Real>(
    world: &World<T>,
    policy: &Policy<T>,
    cmd: &VelocityCommand<T>,
    config: &SimConfig<T>,
) -> TrialResult {
    Simulator::new(world, *policy, config.clone(), world.seed).run(cmd, None)
}
