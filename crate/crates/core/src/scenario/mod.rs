//! Cluttered benchmark worlds: obstacle boxes, semantic classes, procedural
//! track generation and the line-oriented scenario file format.

mod generate;
mod index;
mod io;

pub use generate::{generate_track, SizeConfig, TrackGenerator};
pub use index::IndexedWorld;
pub use io::{parse_world, read_world, write_world, SCENARIO_VERSION};

use std::fmt;
use std::str::FromStr;

use crate::geometry::Vec2;
use crate::real::Real;

/// Whether an obstacle takes part in physical contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObstacleMode {
    /// Visible to perception only; feet pass through it.
    Virtual,
    /// Physical: a swing foot hitting its side trips the robot.
    Rigid,
}

impl fmt::Display for ObstacleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObstacleMode::Virtual => "virtual",
            ObstacleMode::Rigid => "rigid",
        })
    }
}

impl FromStr for ObstacleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "virtual" => Ok(ObstacleMode::Virtual),
            "rigid" => Ok(ObstacleMode::Rigid),
            other => Err(format!("unknown obstacle mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticClass<T> {
    pub id: u32,
    pub name: String,
    pub cost: T,
    pub fragile: bool,
}

/// Id 0 is reserved for free ground.
pub const GROUND_CLASS: u32 = 0;

/// Default class table: ground, box, cable, device.
pub fn default_classes<T: Real>() -> Vec<SemanticClass<T>> {
    let class = |id, name: &str, cost, fragile| SemanticClass {
        id,
        name: name.to_string(),
        cost: T::lit(cost),
        fragile,
    };
    vec![
        class(GROUND_CLASS, "ground", 0.0, false),
        class(1, "box", 5.0, false),
        class(2, "cable", 10.0, true),
        class(3, "device", 10.0, true),
    ]
}

/// Axis-aligned box standing on the ground plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle<T> {
    pub center: Vec2<T>,
    pub half_extents: Vec2<T>,
    pub height: T,
    pub class_id: u32,
    pub mode: ObstacleMode,
}

impl<T: Real> Obstacle<T> {
    /// Inclusive point-in-footprint test with the box grown by `margin` on
    /// every side.
    #[inline]
    pub fn contains(&self, p: Vec2<T>, margin: T) -> bool {
        (p.x - self.center.x).abs() <= self.half_extents.x + margin
            && (p.y - self.center.y).abs() <= self.half_extents.y + margin
    }

    /// True when the two footprints share any area or boundary.
    pub fn overlaps(&self, other: &Self) -> bool {
        (self.center.x - other.center.x).abs() <= self.half_extents.x + other.half_extents.x
            && (self.center.y - other.center.y).abs() <= self.half_extents.y + other.half_extents.y
    }

    pub fn min_corner(&self) -> Vec2<T> {
        self.center - self.half_extents
    }

    pub fn max_corner(&self) -> Vec2<T> {
        self.center + self.half_extents
    }
}

/// A straight track along +x, spanning `x in [0, track_length]` and
/// `y in [-track_width/2, track_width/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct World<T> {
    pub obstacles: Vec<Obstacle<T>>,
    pub track_length: T,
    pub track_width: T,
    pub classes: Vec<SemanticClass<T>>,
    pub seed: u64,
    /// Requested density (obstacles per square meter of track).
    pub density: T,
    /// Mode assigned at generation time; individual obstacles carry their own.
    pub mode: ObstacleMode,
    /// When true, overlapping footprints stack and their heights add up.
    pub stacking: bool,
}

impl<T: Real> World<T> {
    /// An obstacle-free track with the default class table.
    pub fn empty(track_length: T, track_width: T) -> Self {
        Self {
            obstacles: Vec::new(),
            track_length,
            track_width,
            classes: default_classes(),
            seed: 0,
            density: T::zero(),
            mode: ObstacleMode::Rigid,
            stacking: false,
        }
    }

    pub fn class(&self, id: u32) -> Option<&SemanticClass<T>> {
        self.classes.iter().find(|c| c.id == id)
    }

    /// Traversal cost of a class id; unknown ids cost nothing.
    pub fn class_cost(&self, id: u32) -> T {
        self.class(id).map(|c| c.cost).unwrap_or_else(T::zero)
    }

    pub fn track_area(&self) -> T {
        self.track_length * self.track_width
    }

    /// True when every obstacle lies inside the track rectangle.
    pub fn obstacles_in_bounds(&self) -> bool {
        let half_w = self.track_width * T::half();
        self.obstacles.iter().all(|o| {
            let lo = o.min_corner();
            let hi = o.max_corner();
            lo.x >= T::zero() && hi.x <= self.track_length && lo.y >= -half_w && hi.y <= half_w
        })
    }
}

/// Height and semantic readings of the terrain at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSample<T> {
    pub height: T,
    pub cost: T,
    pub class_id: u32,
}

/// Point queries against a set of obstacles.
///
/// Implementors only enumerate obstacles that might contain a point; the
/// composition rules (max or stacked heights, max cost) live here so the
/// brute-force and indexed paths agree exactly.
pub trait ObstacleQuery<T: Real> {
    fn world(&self) -> &World<T>;

    /// Calls `f` for every obstacle whose footprint grown by `margin` could
    /// contain `p`. May report extra obstacles, never misses one.
    fn visit_near(&self, p: Vec2<T>, margin: T, f: &mut dyn FnMut(&Obstacle<T>));

    /// True when `p` is inside any footprint dilated by `margin`.
    fn collides(&self, p: Vec2<T>, margin: T) -> bool {
        let mut hit = false;
        self.visit_near(p, margin, &mut |o| hit |= o.contains(p, margin));
        hit
    }

    /// Terrain height at `p`, optionally counting only rigid obstacles.
    fn height_at(&self, p: Vec2<T>, rigid_only: bool) -> T {
        let stacking = self.world().stacking;
        let mut h = T::zero();
        self.visit_near(p, T::zero(), &mut |o| {
            if o.contains(p, T::zero()) && (!rigid_only || o.mode == ObstacleMode::Rigid) {
                h = if stacking { h + o.height } else { h.max(o.height) };
            }
        });
        h
    }

    /// Highest terrain within the square `p +- margin`.
    fn max_height_near(&self, p: Vec2<T>, margin: T) -> T {
        let stacking = self.world().stacking;
        let mut max = T::zero();
        let mut sum = T::zero();
        self.visit_near(p, margin, &mut |o| {
            if o.contains(p, margin) {
                max = max.max(o.height);
                sum = sum + o.height;
            }
        });
        if stacking {
            sum
        } else {
            max
        }
    }

    /// Full reading at `p`: height plus the semantic class of the costliest
    /// covering obstacle.
    fn sample(&self, p: Vec2<T>) -> TerrainSample<T> {
        let world = self.world();
        let mut out = TerrainSample {
            height: T::zero(),
            cost: T::zero(),
            class_id: GROUND_CLASS,
        };
        self.visit_near(p, T::zero(), &mut |o| {
            if !o.contains(p, T::zero()) {
                return;
            }
            out.height = if world.stacking {
                out.height + o.height
            } else {
                out.height.max(o.height)
            };
            let cost = world.class_cost(o.class_id);
            if out.class_id == GROUND_CLASS || cost > out.cost {
                out.cost = cost;
                out.class_id = o.class_id;
            }
        });
        out
    }
}

impl<T: Real> ObstacleQuery<T> for World<T> {
    fn world(&self) -> &World<T> {
        self
    }

    fn visit_near(&self, _p: Vec2<T>, _margin: T, f: &mut dyn FnMut(&Obstacle<T>)) {
        self.obstacles.iter().for_each(f);
    }
}
