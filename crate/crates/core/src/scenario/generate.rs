use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{default_classes, Obstacle, ObstacleMode, SemanticClass, World, GROUND_CLASS};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::real::Real;

/// Sampling ranges for obstacle footprints and heights (meters).
#[derive(Debug, Clone, PartialEq)]
pub struct SizeConfig {
    pub half_extent_min: f64,
    pub half_extent_max: f64,
    pub height_min: f64,
    pub height_max: f64,
}

impl Default for SizeConfig {
    fn default() -> Self {
        Self {
            half_extent_min: 0.03,
            half_extent_max: 0.10,
            height_min: 0.02,
            height_max: 0.12,
        }
    }
}

impl SizeConfig {
    /// Ranges used by the benchmark suite: the default footprints with
    /// heights capped at 0.07 m, which keeps the blind gait's distance at
    /// 10 obstacles/m^2 near 5.5 m under the kinematic trip rule.
    pub fn benchmark() -> Self {
        Self { height_max: 0.07, ..Self::default() }
    }
}

/// Procedural track generator. [`generate_track`] uses the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackGenerator<T> {
    pub sizes: SizeConfig,
    pub classes: Vec<SemanticClass<T>>,
    /// Clear zone at the start of the track (meters along x).
    pub start_clear: f64,
    /// Clear zone at the end of the track.
    pub end_clear: f64,
    /// Rejection-sampling budget per obstacle when stacking is disallowed.
    pub attempts_per_obstacle: usize,
}

impl<T: Real> Default for TrackGenerator<T> {
    fn default() -> Self {
        Self {
            sizes: SizeConfig::default(),
            classes: default_classes(),
            start_clear: 1.0,
            end_clear: 0.5,
            attempts_per_obstacle: 2000,
        }
    }
}

impl<T: Real> TrackGenerator<T> {
    pub fn generate(
        &self,
        density: T,
        seed: u64,
        length: T,
        width: T,
        mode: ObstacleMode,
        allow_stacking: bool,
    ) -> Result<World<T>> {
        let density_f = density.as_f64();
        let (len_f, width_f) = (length.as_f64(), width.as_f64());
        if !(density_f >= 0.0 && density_f.is_finite()) {
            return Err(Error::invalid("density", format!("{density} is not a finite nonnegative number")));
        }
        if !(len_f > 0.0 && width_f > 0.0) {
            return Err(Error::invalid("track", "length and width must be positive"));
        }
        let s = &self.sizes;
        if !(0.0 < s.half_extent_min && s.half_extent_min <= s.half_extent_max)
            || !(0.0 < s.height_min && s.height_min <= s.height_max)
        {
            return Err(Error::invalid("sizes", "ranges must be positive and ordered"));
        }
        let x_lo = self.start_clear;
        let x_hi = len_f - self.end_clear;
        if x_hi - x_lo < 2.0 * s.half_extent_max || width_f < 2.0 * s.half_extent_max {
            return Err(Error::invalid("track", "too small for the clear zones and obstacle sizes"));
        }
        let class_ids: Vec<u32> = self
            .classes
            .iter()
            .map(|c| c.id)
            .filter(|&id| id != GROUND_CLASS)
            .collect();
        let count = (density_f * len_f * width_f).round() as usize;
        if count > 0 && class_ids.is_empty() {
            return Err(Error::invalid("classes", "no non-ground class to assign"));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half_w = 0.5 * width_f;
        let mut obstacles: Vec<Obstacle<T>> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let budget = self.attempts_per_obstacle.max(1) * count.max(1);
        while obstacles.len() < count {
            if attempts >= budget {
                return Err(Error::PlacementFailed {
                    placed: obstacles.len(),
                    requested: count,
                    attempts,
                });
            }
            attempts += 1;
            let hx = sample(&mut rng, s.half_extent_min, s.half_extent_max);
            let hy = sample(&mut rng, s.half_extent_min, s.half_extent_max);
            let height = sample(&mut rng, s.height_min, s.height_max);
            let cx = sample(&mut rng, x_lo + hx, x_hi - hx);
            let cy = sample(&mut rng, -half_w + hy, half_w - hy);
            let class_id = class_ids[rng.gen_range(0..class_ids.len())];
            let candidate = Obstacle {
                center: Vec2::new(T::lit(cx), T::lit(cy)),
                half_extents: Vec2::new(T::lit(hx), T::lit(hy)),
                height: T::lit(height),
                class_id,
                mode,
            };
            if !allow_stacking && obstacles.iter().any(|o| o.overlaps(&candidate)) {
                continue;
            }
            obstacles.push(candidate);
        }

        Ok(World {
            obstacles,
            track_length: length,
            track_width: width,
            classes: self.classes.clone(),
            seed,
            density,
            mode,
            stacking: allow_stacking,
        })
    }
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Generates a track with the default size ranges, classes and clear zones.
pub fn generate_track<T: Real>(
    density: T,
    seed: u64,
    length: T,
    width: T,
    mode: ObstacleMode,
    allow_stacking: bool,
) -> Result<World<T>> {
    TrackGenerator::default().generate(density, seed, length, width, mode, allow_stacking)
}
