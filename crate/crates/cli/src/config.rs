//! Optional TOML overrides. Every key is optional; missing keys keep the
//! library defaults.
//!
//! ```toml
//! [behavior]
//! s_feet = 0.10
//! frequency = 2.5
//!
//! [search]
//! grid_size = 9
//!
//! [sim]
//! max_time = 40.0
//!
//! [policy]
//! height_threshold = 0.03
//!
//! [track]
//! height_max = 0.12
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use footplan::scenario::SizeConfig;
use footplan::{BehaviorParams, Policy, SearchConfig, SimConfig};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub behavior: BehaviorSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub track: TrackSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorSection {
    pub h_base: Option<f64>,
    pub s_feet: Option<f64>,
    pub theta: Option<[f64; 3]>,
    pub frequency: Option<f64>,
    pub duty: Option<f64>,
    pub stance_width: Option<f64>,
    pub stance_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub grid_size: Option<usize>,
    pub grid_res: Option<f64>,
    pub w_dev: Option<f64>,
    pub w_col: Option<f64>,
    pub r_foot: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub dt: Option<f64>,
    pub max_time: Option<f64>,
    pub swing_lag: Option<f64>,
    pub velocity_noise: Option<f64>,
    pub map_noise: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub height_threshold: Option<f64>,
    pub max_swing_height: Option<f64>,
    pub lift_margin: Option<f64>,
    pub map_margin: Option<f64>,
    /// `truth` or `map`, for the semantic policy.
    pub perception: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSection {
    pub length: Option<f64>,
    pub width: Option<f64>,
    pub half_extent_min: Option<f64>,
    pub half_extent_max: Option<f64>,
    pub height_min: Option<f64>,
    pub height_max: Option<f64>,
}

fn set<T: Copy>(dst: &mut T, src: Option<T>) {
    if let Some(v) = src {
        *dst = v;
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn behavior(&self) -> Result<BehaviorParams> {
        let mut b = BehaviorParams::default();
        let s = &self.behavior;
        set(&mut b.h_base, s.h_base);
        set(&mut b.s_feet, s.s_feet);
        set(&mut b.theta, s.theta);
        set(&mut b.frequency, s.frequency);
        set(&mut b.duty, s.duty);
        set(&mut b.stance_width, s.stance_width);
        set(&mut b.stance_length, s.stance_length);
        b.validate()?;
        Ok(b)
    }

    pub fn search(&self) -> Result<SearchConfig> {
        let mut c = SearchConfig::default();
        let s = &self.search;
        set(&mut c.grid_size, s.grid_size);
        set(&mut c.grid_res, s.grid_res);
        set(&mut c.w_dev, s.w_dev);
        set(&mut c.w_col, s.w_col);
        set(&mut c.r_foot, s.r_foot);
        c.validate()?;
        Ok(c)
    }

    pub fn sim(&self) -> Result<SimConfig> {
        let mut c = SimConfig { behavior: self.behavior()?, ..SimConfig::default() };
        let s = &self.sim;
        set(&mut c.dt, s.dt);
        set(&mut c.max_time, s.max_time);
        set(&mut c.velocity_noise, s.velocity_noise);
        set(&mut c.map_noise, s.map_noise);
        if s.swing_lag.is_some() {
            c.swing_lag = s.swing_lag;
        }
        anyhow::ensure!(c.dt > 0.0, "sim.dt must be positive");
        anyhow::ensure!(c.max_time > 0.0, "sim.max_time must be positive");
        Ok(c)
    }

    pub fn policy(&self, kind: footplan::PolicyKind) -> Result<Policy> {
        let mut p = Policy::new(kind);
        p.search = self.search()?;
        let s = &self.policy;
        set(&mut p.height_threshold, s.height_threshold);
        set(&mut p.max_swing_height, s.max_swing_height);
        set(&mut p.lift_margin, s.lift_margin);
        set(&mut p.map_margin, s.map_margin);
        if let Some(v) = &s.perception {
            p.perception = match v.as_str() {
                "truth" => footplan::simulator::Perception::GroundTruth,
                "map" => footplan::simulator::Perception::Map,
                other => anyhow::bail!("policy.perception must be `truth` or `map`, got `{other}`"),
            };
        }
        Ok(p)
    }

    /// Obstacle sizes, starting from `base`.
    pub fn sizes(&self, base: SizeConfig) -> SizeConfig {
        let mut z = base;
        let s = &self.track;
        set(&mut z.half_extent_min, s.half_extent_min);
        set(&mut z.half_extent_max, s.half_extent_max);
        set(&mut z.height_min, s.height_min);
        set(&mut z.height_max, s.height_max);
        z
    }
}
