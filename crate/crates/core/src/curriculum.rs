//! Command and difficulty curricula.
//!
//! [`VelocityGrid`] bins the command space and samples bins in proportion
//! to how poorly each one is being tracked, using an exponential moving
//! average of the velocity tracking reward. [`DensitySchedule`] raises
//! obstacle density once tracking is good enough.

use std::fmt::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::foothold::{CommandBounds, VelocityCommand};
use crate::real::Real;

/// Upper bound of the velocity tracking reward.
const R_VEL_MAX: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid<T> {
    pub bounds: CommandBounds<T>,
    /// Bins per axis: vx, vy, wz.
    pub bins: [usize; 3],
    /// EMA decay applied to the old estimate on each update.
    pub decay: T,
    floor: T,
    ema: Vec<T>,
    probs: Vec<T>,
}

impl<T: Real> VelocityGrid<T> {
    /// Equal-width bins over `[-bound, bound]` on each axis. The probability
    /// floor defaults to 0.01, capped at half the uniform probability so it
    /// stays feasible on large grids.
    pub fn new(bounds: CommandBounds<T>, bins: [usize; 3]) -> Result<Self> {
        if bins.contains(&0) {
            return Err(Error::invalid("bins", "every axis needs at least one bin"));
        }
        if !(bounds.vx >= T::zero() && bounds.vy >= T::zero() && bounds.wz >= T::zero()) {
            return Err(Error::invalid("bounds", "command bounds must be nonnegative"));
        }
        let n = bins[0] * bins[1] * bins[2];
        let floor = T::lit(0.01).min(T::half() / T::from_count(n));
        let mut g = Self {
            bounds,
            bins,
            decay: T::lit(0.99),
            floor,
            ema: vec![T::zero(); n],
            probs: vec![T::zero(); n],
        };
        g.refresh();
        Ok(g)
    }

    /// Sets the per-bin probability floor; needs `0 < floor <= 1 / len`.
    pub fn with_floor(mut self, floor: T) -> Result<Self> {
        if !(floor > T::zero() && floor * T::from_count(self.len()) <= T::one()) {
            return Err(Error::invalid("floor", format!("{floor} must be in (0, 1/{}]", self.len())));
        }
        self.floor = floor;
        self.refresh();
        Ok(self)
    }

    pub fn floor(&self) -> T {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.ema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ema.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn ema(&self) -> &[T] {
        &self.ema
    }

    /// Replaces the tracking estimates and recomputes probabilities.
    pub fn with_ema(mut self, ema: Vec<T>) -> Result<Self> {
        if ema.len() != self.len() {
            return Err(Error::invalid("ema", format!("expected {} values, got {}", self.len(), ema.len())));
        }
        if let Some(v) = ema.iter().find(|v| !(**v >= T::zero() && **v <= T::lit(R_VEL_MAX))) {
            return Err(Error::invalid("ema", format!("{v} is outside [0, 2]")));
        }
        self.ema = ema;
        self.refresh();
        Ok(self)
    }

    fn bound(&self, axis: usize) -> T {
        match axis {
            0 => self.bounds.vx,
            1 => self.bounds.vy,
            _ => self.bounds.wz,
        }
    }

    /// `[lo, hi]` of bin `k` along `axis`.
    pub fn axis_range(&self, axis: usize, k: usize) -> (T, T) {
        let b = self.bound(axis);
        let w = T::two() * b / T::from_count(self.bins[axis]);
        (-b + w * T::from_count(k), -b + w * T::from_count(k + 1))
    }

    fn axis_bin(&self, axis: usize, v: T) -> usize {
        let b = self.bound(axis);
        let n = self.bins[axis];
        if b <= T::zero() {
            return 0;
        }
        let t = ((v + b) / (T::two() * b) * T::from_count(n)).floor();
        t.max(T::zero()).min(T::from_count(n - 1)).to_usize().unwrap()
    }

    fn split(&self, bin: usize) -> [usize; 3] {
        let [_, ny, nw] = self.bins;
        [bin / (ny * nw), (bin / nw) % ny, bin % nw]
    }

    /// Per-axis `[lo, hi]` ranges of a flat bin index.
    pub fn bin_box(&self, bin: usize) -> [(T, T); 3] {
        let idx = self.split(bin);
        [0, 1, 2].map(|a| self.axis_range(a, idx[a]))
    }

    /// Center command of a flat bin index.
    pub fn command(&self, bin: usize) -> VelocityCommand<T> {
        let [x, y, w] = self.bin_box(bin).map(|(lo, hi)| (lo + hi) * T::half());
        VelocityCommand::new(x, y, w)
    }

    /// Flat bin index containing `cmd` (values outside the bounds clamp).
    pub fn bin_of(&self, cmd: &VelocityCommand<T>) -> usize {
        let [_, ny, nw] = self.bins;
        (self.axis_bin(0, cmd.vx) * ny + self.axis_bin(1, cmd.vy)) * nw + self.axis_bin(2, cmd.wz)
    }

    /// Draws a bin by the current probabilities, then a command uniformly
    /// inside that bin. Returns the bin index and the command.
    pub fn sample_command<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, VelocityCommand<T>) {
        let u = T::lit(rng.gen::<f64>());
        let mut acc = T::zero();
        let mut chosen = self.len() - 1;
        for (i, p) in self.probs.iter().enumerate() {
            acc = acc + *p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        let [x, y, w] = self.bin_box(chosen).map(|(lo, hi)| lo + (hi - lo) * T::lit(rng.gen::<f64>()));
        (chosen, VelocityCommand::new(x, y, w))
    }

    /// Folds a tracking reward `r_vel` in `(0, 2]` into the estimate for `bin`.
    pub fn update_probs(&mut self, bin: usize, r_vel: T) -> Result<()> {
        if bin >= self.len() {
            return Err(Error::invalid("bin", format!("{bin} is out of range (have {})", self.len())));
        }
        if !(r_vel > T::zero() && r_vel <= T::lit(R_VEL_MAX)) {
            return Err(Error::invalid("r_vel", format!("{r_vel} is outside (0, 2]")));
        }
        self.ema[bin] = self.decay * self.ema[bin] + (T::one() - self.decay) * r_vel;
        self.refresh();
        Ok(())
    }

    // probs = floor + (1 - n floor) * w / sum(w), with w = 2 - ema.
    fn refresh(&mut self) {
        let n = T::from_count(self.len());
        let max = T::lit(R_VEL_MAX);
        let weights: Vec<T> = self.ema.iter().map(|e| (max - *e).max(T::zero())).collect();
        let sum: T = weights.iter().copied().sum();
        let free = T::one() - n * self.floor;
        self.probs = if sum > T::zero() {
            weights.into_iter().map(|w| self.floor + free * w / sum).collect()
        } else {
            vec![T::one() / n; self.len()]
        };
    }

    /// Mean tracking estimate across bins.
    pub fn mean_tracking(&self) -> T {
        self.ema.iter().copied().sum::<T>() / T::from_count(self.len())
    }

    /// Plain-text dump: a header line with bin counts and bounds, a floor
    /// line, then one `index ema prob` line per bin.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "velocity-grid {} {} {} {} {} {}\nfloor {} decay {}\n",
            self.bins[0], self.bins[1], self.bins[2], self.bounds.vx, self.bounds.vy, self.bounds.wz, self.floor, self.decay
        );
        for (i, (e, p)) in self.ema.iter().zip(&self.probs).enumerate() {
            writeln!(out, "{i} {e} {p}").unwrap();
        }
        out
    }

    /// Restores a grid written by [`VelocityGrid::to_text`]. Probabilities
    /// are recomputed from the estimates.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| Error::parse(1, "header", "empty input"))?;
        let f: Vec<&str> = head.split_whitespace().collect();
        if f.len() != 7 || f[0] != "velocity-grid" {
            return Err(Error::parse(1, "header", "expected `velocity-grid nx ny nw vx vy wz`"));
        }
        let count = |i: usize, name: &'static str| -> Result<usize> {
            f[i].parse().map_err(|_| Error::parse(1, name, format!("bad count `{}`", f[i])))
        };
        let real = |i: usize, name: &'static str| -> Result<T> {
            f[i].parse().map_err(|_| Error::parse(1, name, format!("bad number `{}`", f[i])))
        };
        let bins = [count(1, "nx")?, count(2, "ny")?, count(3, "nw")?];
        let bounds = CommandBounds { vx: real(4, "vx_max")?, vy: real(5, "vy_max")?, wz: real(6, "wz_max")? };
        let mut grid = Self::new(bounds, bins)?;

        let (n, line) = lines.next().ok_or_else(|| Error::parse(2, "floor", "missing floor line"))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 || f[0] != "floor" || f[2] != "decay" {
            return Err(Error::parse(n + 1, "floor", "expected `floor EPS decay D`"));
        }
        let floor: T = f[1].parse().map_err(|_| Error::parse(n + 1, "floor", "not a number"))?;
        let decay: T = f[3].parse().map_err(|_| Error::parse(n + 1, "decay", "not a number"))?;
        if !(decay >= T::zero() && decay < T::one()) {
            return Err(Error::parse(n + 1, "decay", "must be in [0, 1)"));
        }
        grid.decay = decay;
        grid = grid.with_floor(floor).map_err(|e| Error::parse(n + 1, "floor", e.to_string()))?;

        let mut ema = Vec::with_capacity(grid.len());
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::parse(n + 1, "row", "expected `index ema prob`"));
            }
            let idx: usize = f[0].parse().map_err(|_| Error::parse(n + 1, "index", "not an integer"))?;
            if idx != ema.len() {
                return Err(Error::parse(n + 1, "index", format!("expected {}, got {idx}", ema.len())));
            }
            let e: T = f[1].parse().map_err(|_| Error::parse(n + 1, "ema", "not a number"))?;
            ema.push(e);
        }
        grid.with_ema(ema)
    }
}

impl<T: Real> Default for VelocityGrid<T> {
    fn default() -> Self {
        Self::new(CommandBounds::default(), [11, 5, 11]).expect("default bins are nonzero")
    }
}

/// Obstacle density progression promoted on tracking performance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySchedule<T> {
    current: T,
    pub max: T,
    pub step: T,
    /// Mean tracking reward needed to move up one step.
    pub promote_threshold: T,
}

impl<T: Real> DensitySchedule<T> {
    pub fn new(current: T, max: T, step: T, promote_threshold: T) -> Result<Self> {
        if !(current >= T::zero() && current <= max) {
            return Err(Error::invalid("current", format!("{current} must be in [0, {max}]")));
        }
        if !(step > T::zero()) {
            return Err(Error::invalid("step", format!("{step} must be positive")));
        }
        Ok(Self { current, max, step, promote_threshold })
    }

    pub fn current(&self) -> T {
        self.current
    }

    /// Raises the density by one step (saturating at `max`) if
    /// `mean_tracking` reaches the threshold. Returns whether it changed.
    pub fn maybe_promote(&mut self, mean_tracking: T) -> bool {
        if mean_tracking >= self.promote_threshold && self.current < self.max {
            self.current = (self.current + self.step).min(self.max);
            true
        } else {
            false
        }
    }
}

impl<T: Real> Default for DensitySchedule<T> {
    fn default() -> Self {
        Self::new(T::zero(), T::lit(25.0), T::lit(5.0), T::lit(1.6)).expect("defaults are valid")
    }
}
