//! Four-beat walking schedule driven by the behavior parameters.

use crate::error::{Error, Result};
use crate::real::Real;

/// Leg order used throughout: front-left, front-right, rear-left, rear-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    FrontLeft = 0,
    FrontRight = 1,
    RearLeft = 2,
    RearRight = 3,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::FrontLeft, Leg::FrontRight, Leg::RearLeft, Leg::RearRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_front(self) -> bool {
        matches!(self, Leg::FrontLeft | Leg::FrontRight)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Leg::FrontLeft | Leg::RearLeft)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Leg::FrontLeft => "FL",
            Leg::FrontRight => "FR",
            Leg::RearLeft => "RL",
            Leg::RearRight => "RR",
        }
    }
}

/// Gait and posture parameters; 13 scalars in total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorParams<T> {
    /// Base height (m).
    pub h_base: T,
    /// Footswing height (m).
    pub s_feet: T,
    /// Phase offsets of FR, RL and RR relative to FL, each in `[0, 1)`.
    pub theta: [T; 3],
    /// Per-foot contact timers in `[0, 1)`; derived from the gait each step.
    pub t_feet: [T; 4],
    /// Contact frequency (Hz).
    pub frequency: T,
    /// Duty factor in `(0, 1)`.
    pub duty: T,
    /// Stance width (m).
    pub stance_width: T,
    /// Stance length (m).
    pub stance_length: T,
}

impl<T: Real> Default for BehaviorParams<T> {
    fn default() -> Self {
        Self {
            h_base: T::lit(0.32),
            s_feet: T::lit(0.09),
            theta: [T::lit(0.5), T::lit(0.75), T::lit(0.25)],
            t_feet: [T::zero(); 4],
            frequency: T::lit(2.0),
            duty: T::lit(0.5),
            stance_width: T::lit(0.30),
            stance_length: T::lit(0.40),
        }
    }
}

impl<T: Real> BehaviorParams<T> {
    pub const LEN: usize = 13;

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > T::zero()) {
            return Err(Error::invalid("frequency", "must be positive"));
        }
        if !(self.duty > T::zero() && self.duty < T::one()) {
            return Err(Error::invalid("duty", "must lie in (0, 1)"));
        }
        if !(self.stance_width > T::zero() && self.stance_length > T::zero()) {
            return Err(Error::invalid("stance", "width and length must be positive"));
        }
        if !(self.s_feet >= T::zero()) {
            return Err(Error::invalid("s_feet", "must be nonnegative"));
        }
        let unit = |v: &T| *v >= T::zero() && *v < T::one();
        if !self.theta.iter().all(unit) || !self.t_feet.iter().all(unit) {
            return Err(Error::invalid("phase", "offsets and timers must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Per-leg phase offsets: FL leads at 0, the rest follow `theta`.
    pub fn leg_offsets(&self) -> [T; 4] {
        [T::zero(), self.theta[0], self.theta[1], self.theta[2]]
    }

    /// Flattened in the order h_base, s_feet, theta(3), t_feet(4), f, d, w, l.
    pub fn to_array(&self) -> [T; 13] {
        let [a, b, c] = self.theta;
        let [t0, t1, t2, t3] = self.t_feet;
        [
            self.h_base,
            self.s_feet,
            a,
            b,
            c,
            t0,
            t1,
            t2,
            t3,
            self.frequency,
            self.duty,
            self.stance_width,
            self.stance_length,
        ]
    }

    pub fn from_array(v: [T; 13]) -> Self {
        Self {
            h_base: v[0],
            s_feet: v[1],
            theta: [v[2], v[3], v[4]],
            t_feet: [v[5], v[6], v[7], v[8]],
            frequency: v[9],
            duty: v[10],
            stance_width: v[11],
            stance_length: v[12],
        }
    }

    /// Copy with the contact timers refreshed from a gait state.
    pub fn with_timers(mut self, gait: &GaitState<T>) -> Self {
        self.t_feet = gait.leg_phase;
        self
    }

    pub fn stance_duration(&self) -> T {
        self.duty / self.frequency
    }

    pub fn swing_duration(&self) -> T {
        (T::one() - self.duty) / self.frequency
    }
}

/// `T_stance = d / f`.
pub fn stance_duration<T: Real>(frequency: T, duty: T) -> Result<T> {
    if !(frequency > T::zero()) {
        return Err(Error::invalid("frequency", "must be positive"));
    }
    if !(duty > T::zero() && duty < T::one()) {
        return Err(Error::invalid("duty", "must lie in (0, 1)"));
    }
    Ok(duty / frequency)
}

/// Swing reference height `s_feet * sqrt(sin(pi * phi)) + delta_z`.
///
/// The sine is evaluated on the nearer half of the swing so both endpoints
/// come out exactly at `delta_z`.
pub fn swing_reference_height<T: Real>(phi: T, s_feet: T, delta_z: T) -> Result<T> {
    if !(phi >= T::zero() && phi <= T::one()) {
        return Err(Error::invalid("phi", format!("{phi} is outside [0, 1]")));
    }
    Ok(swing_reference_height_unchecked(phi, s_feet, delta_z))
}

pub(crate) fn swing_reference_height_unchecked<T: Real>(phi: T, s_feet: T, delta_z: T) -> T {
    let folded = phi.min(T::one() - phi).max(T::zero());
    s_feet * (T::PI() * folded).sin().max(T::zero()).sqrt() + delta_z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitState<T> {
    pub global_phase: T,
    pub leg_phase: [T; 4],
    pub in_contact: [bool; 4],
    /// Normalized swing progress; zero for legs in stance.
    pub swing_progress: [T; 4],
}

fn wrap_unit<T: Real>(v: T) -> T {
    let w = v - v.floor();
    if w >= T::one() {
        T::zero()
    } else {
        w
    }
}

impl<T: Real> GaitState<T> {
    /// State at a given global phase.
    pub fn at_phase(global_phase: T, params: &BehaviorParams<T>) -> Self {
        let global_phase = wrap_unit(global_phase);
        let offsets = params.leg_offsets();
        let mut leg_phase = [T::zero(); 4];
        let mut in_contact = [false; 4];
        let mut swing_progress = [T::zero(); 4];
        for i in 0..4 {
            let phase = wrap_unit(global_phase + offsets[i]);
            leg_phase[i] = phase;
            // A leg exactly at the duty boundary has just lifted off.
            in_contact[i] = phase < params.duty;
            if !in_contact[i] {
                swing_progress[i] = (phase - params.duty) / (T::one() - params.duty);
            }
        }
        Self {
            global_phase,
            leg_phase,
            in_contact,
            swing_progress,
        }
    }

    pub fn initial(params: &BehaviorParams<T>) -> Self {
        Self::at_phase(T::zero(), params)
    }

    pub fn is_swing(&self, leg: Leg) -> bool {
        !self.in_contact[leg.index()]
    }

    pub fn contact_count(&self) -> usize {
        self.in_contact.iter().filter(|&&c| c).count()
    }
}

/// Advances the gait clock by `dt` seconds.
///
/// The whole-cycle part of `f * dt` is dropped before adding, so advancing
/// by an exact multiple of the period reproduces the phases bit for bit.
pub fn advance<T: Real>(state: &GaitState<T>, params: &BehaviorParams<T>, dt: T) -> GaitState<T> {
    assert!(dt >= T::zero(), "gait cannot run backwards");
    let delta = params.frequency * dt;
    let frac = delta - delta.floor();
    let mut g = state.global_phase + frac;
    if g >= T::one() {
        g = g - T::one();
    }
    GaitState::at_phase(g, params)
}
