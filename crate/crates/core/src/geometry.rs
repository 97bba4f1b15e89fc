//! Planar points and rigid transforms between the body and world frames.

use std::ops::{Add, Mul, Neg, Sub};

use crate::real::Real;

/// A 2D point or vector. Frame is implied by context (body or world).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Linear interpolation, `t = 0` gives `self`.
    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self) * t
    }

    pub fn rotated(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// A 3D point; used for foot positions where height matters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn from_xy(xy: Vec2<T>, z: T) -> Self {
        Self::new(xy.x, xy.y, z)
    }

    pub fn xy(self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Real>(angle: T) -> T {
    let two_pi = T::TAU();
    let mut a = angle % two_pi;
    if a <= -T::PI() {
        a = a + two_pi;
    } else if a > T::PI() {
        a = a - two_pi;
    }
    a
}

/// Planar robot base pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose2D<T> {
    pub x: T,
    pub y: T,
    pub yaw: T,
}

impl<T: Real> Pose2D<T> {
    /// Builds a pose, normalizing `yaw` into `(-pi, pi]`.
    pub fn new(x: T, y: T, yaw: T) -> Self {
        Self {
            x,
            y,
            yaw: normalize_angle(yaw),
        }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn position(&self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    /// Maps a body-frame point into the world frame.
    pub fn body_to_world(&self, p_body: Vec2<T>) -> Vec2<T> {
        p_body.rotated(self.yaw) + self.position()
    }

    /// Maps a world-frame point into this pose's body frame.
    pub fn world_to_body(&self, p_world: Vec2<T>) -> Vec2<T> {
        (p_world - self.position()).rotated(-self.yaw)
    }

    /// Pose reached after holding a constant body-frame twist for `dt`.
    ///
    /// Exact integration of the unicycle (plus lateral) model: the body
    /// velocity rotates with the heading, so the path is a circular arc.
    pub fn integrate(&self, vx: T, vy: T, wz: T, dt: T) -> Self {
        let dyaw = wz * dt;
        let eps = T::lit(1e-12);
        // Displacement in the starting body frame.
        let local = if dyaw.abs() < eps {
            Vec2::new(vx * dt, vy * dt)
        } else {
            let (s, c) = dyaw.sin_cos();
            let a = s / wz;
            let b = (T::one() - c) / wz;
            Vec2::new(a * vx - b * vy, b * vx + a * vy)
        };
        let p = self.body_to_world(local);
        Self::new(p.x, p.y, self.yaw + dyaw)
    }
}

/// Free-function form of [`Pose2D::body_to_world`].
pub fn body_to_world<T: Real>(base: &Pose2D<T>, p_body: Vec2<T>) -> Vec2<T> {
    base.body_to_world(p_body)
}

/// Free-function form of [`Pose2D::world_to_body`].
pub fn world_to_body<T: Real>(base: &Pose2D<T>, p_world: Vec2<T>) -> Vec2<T> {
    base.world_to_body(p_world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn identity_pose_is_identity() {
        let p = body_to_world(&Pose2D::origin(), Vec2::new(1.0, 2.0));
        assert_eq!(p, Vec2::new(1.0, 2.0));
    }

    #[test]
    fn quarter_turn() {
        let base = Pose2D::new(0.0, 0.0, FRAC_PI_2);
        let p = body_to_world(&base, Vec2::new(1.0, 0.0));
        assert!(p.x.abs() < 1e-15);
        assert!((p.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let base = Pose2D::new(
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-PI..PI),
            );
            let p = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let back = world_to_body(&base, body_to_world(&base, p));
            assert!((back - p).norm() < 1e-9);
        }
    }

    #[test]
    fn yaw_is_normalized() {
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(normalize_angle(-PI), PI);
        let p = Pose2D::new(0.0, 0.0, -7.0f64);
        assert!(p.yaw > -PI && p.yaw <= PI);
    }

    #[test]
    fn integrate_straight_and_arc() {
        let p = Pose2D::<f64>::origin().integrate(0.5, 0.0, 0.0, 2.0);
        assert!((p.x - 1.0).abs() < 1e-15 && p.y == 0.0);

        // Quarter circle of radius 1.
        let p = Pose2D::origin().integrate(1.0, 0.0, 1.0, FRAC_PI_2);
        assert!((p.x - 1.0).abs() < 1e-12);
        assert!((p.y - 1.0).abs() < 1e-12);
        assert!((p.yaw - FRAC_PI_2).abs() < 1e-12);

        // Integration composes.
        let a = Pose2D::<f64>::origin().integrate(0.7, 0.1, 0.4, 0.3).integrate(0.7, 0.1, 0.4, 0.2);
        let b = Pose2D::<f64>::origin().integrate(0.7, 0.1, 0.4, 0.5);
        assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    }
}
