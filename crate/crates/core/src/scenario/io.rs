//! Line-oriented scenario files.
//!
//! ```text
//! footplan-scenario 1
//! seed 42
//! track 10 2
//! mode rigid
//! density 10
//! stacking false
//! classes 4
//! class 0 ground 0 false
//! ...
//! obstacles 200
//! o <cx> <cy> <hx> <hy> <height> <class_id> <mode>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written
//! with their shortest round-trip representation.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{Obstacle, ObstacleMode, SemanticClass, World};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::real::Real;

pub const SCENARIO_VERSION: u32 = 1;
const MAGIC: &str = "footplan-scenario";

pub fn write_world<T: Real>(world: &World<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {SCENARIO_VERSION}");
    let _ = writeln!(out, "seed {}", world.seed);
    let _ = writeln!(out, "track {} {}", world.track_length, world.track_width);
    let _ = writeln!(out, "mode {}", world.mode);
    let _ = writeln!(out, "density {}", world.density);
    let _ = writeln!(out, "stacking {}", world.stacking);
    let _ = writeln!(out, "classes {}", world.classes.len());
    for c in &world.classes {
        let _ = writeln!(out, "class {} {} {} {}", c.id, c.name, c.cost, c.fragile);
    }
    let _ = writeln!(out, "obstacles {}", world.obstacles.len());
    for o in &world.obstacles {
        let _ = writeln!(
            out,
            "o {} {} {} {} {} {} {}",
            o.center.x, o.center.y, o.half_extents.x, o.half_extents.y, o.height, o.class_id, o.mode
        );
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next meaningful line as (1-based line number, tokens).
    fn next_tokens(&mut self, expecting: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line.split_whitespace().collect()));
        }
        Err(Error::parse(self.last + 1, expecting, "unexpected end of file"))
    }

    fn keyed(&mut self, key: &str, arity: usize) -> Result<(usize, Vec<&'a str>)> {
        let (line, tokens) = self.next_tokens(key)?;
        if tokens[0] != key {
            return Err(Error::parse(line, key, format!("expected `{key}`, found `{}`", tokens[0])));
        }
        if tokens.len() != arity + 1 {
            return Err(Error::parse(
                line,
                key,
                format!("expected {arity} value(s), found {}", tokens.len() - 1),
            ));
        }
        Ok((line, tokens[1..].to_vec()))
    }
}

fn field<V: FromStr>(line: usize, name: &str, token: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    token
        .parse::<V>()
        .map_err(|e| Error::parse(line, name, format!("cannot parse `{token}`: {e}")))
}

fn real<T: Real>(line: usize, name: &str, token: &str) -> Result<T> {
    let v: T = token
        .parse()
        .map_err(|_| Error::parse(line, name, format!("cannot parse `{token}` as a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, name, "value must be finite"));
    }
    Ok(v)
}

pub fn parse_world<T: Real>(text: &str) -> Result<World<T>> {
    let mut lines = Lines::new(text);

    let (line, header) = lines.keyed(MAGIC, 1)?;
    let version: u32 = field(line, "version", header[0])?;
    if version != SCENARIO_VERSION {
        return Err(Error::parse(line, "version", format!("unsupported version {version}")));
    }
    let (line, v) = lines.keyed("seed", 1)?;
    let seed: u64 = field(line, "seed", v[0])?;
    let (line, v) = lines.keyed("track", 2)?;
    let track_length: T = real(line, "track_length", v[0])?;
    let track_width: T = real(line, "track_width", v[1])?;
    if track_length <= T::zero() || track_width <= T::zero() {
        return Err(Error::parse(line, "track", "dimensions must be positive"));
    }
    let (line, v) = lines.keyed("mode", 1)?;
    let mode: ObstacleMode = field(line, "mode", v[0])?;
    let (line, v) = lines.keyed("density", 1)?;
    let density: T = real(line, "density", v[0])?;
    let (line, v) = lines.keyed("stacking", 1)?;
    let stacking: bool = field(line, "stacking", v[0])?;

    let (line, v) = lines.keyed("classes", 1)?;
    let n_classes: usize = field(line, "classes", v[0])?;
    let mut classes = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let (line, v) = lines.keyed("class", 4)?;
        let class = SemanticClass {
            id: field(line, "class.id", v[0])?,
            name: v[1].to_string(),
            cost: real(line, "class.cost", v[2])?,
            fragile: field(line, "class.fragile", v[3])?,
        };
        if class.cost < T::zero() {
            return Err(Error::parse(line, "class.cost", "cost must be nonnegative"));
        }
        if class.id == super::GROUND_CLASS && class.cost != T::zero() {
            return Err(Error::parse(line, "class.cost", "ground class must cost 0"));
        }
        classes.push(class);
    }

    let (line, v) = lines.keyed("obstacles", 1)?;
    let n_obstacles: usize = field(line, "obstacles", v[0])?;
    let mut obstacles = Vec::with_capacity(n_obstacles);
    for _ in 0..n_obstacles {
        let (line, v) = lines.keyed("o", 7)?;
        let o = Obstacle {
            center: Vec2::new(real(line, "center_x", v[0])?, real(line, "center_y", v[1])?),
            half_extents: Vec2::new(real(line, "half_x", v[2])?, real(line, "half_y", v[3])?),
            height: real(line, "height", v[4])?,
            class_id: field(line, "class_id", v[5])?,
            mode: field(line, "mode", v[6])?,
        };
        if o.half_extents.x <= T::zero() || o.half_extents.y <= T::zero() {
            return Err(Error::parse(line, "half_extents", "must be positive"));
        }
        if o.height <= T::zero() {
            return Err(Error::parse(line, "height", "must be positive"));
        }
        if !classes.iter().any(|c| c.id == o.class_id) {
            return Err(Error::parse(line, "class_id", format!("unknown class {}", o.class_id)));
        }
        obstacles.push(o);
    }
    if let Ok((line, tokens)) = lines.next_tokens("end") {
        return Err(Error::parse(line, tokens[0], "trailing content after obstacle list"));
    }

    Ok(World {
        obstacles,
        track_length,
        track_width,
        classes,
        seed,
        density,
        mode,
        stacking,
    })
}

pub fn read_world<T: Real>(path: impl AsRef<Path>) -> Result<World<T>> {
    parse_world(&std::fs::read_to_string(path)?)
}
