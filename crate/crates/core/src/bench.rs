//! Policy by density sweeps over seeded track suites, and their reports.
//!
//! Every (density, trial) pair maps to one world shared by all policies, so
//! policies are compared on identical layouts. Metrics per cell:
//!
//! - `S`: percentage of successful trials,
//! - `D`: mean distance over all trials, successes counting the full track,
//! - `C`: percentage of footsteps that landed inside a dilated obstacle.

use std::fmt::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foothold::VelocityCommand;
use crate::real::Real;
use crate::scenario::{ObstacleMode, SizeConfig, TrackGenerator};
use crate::simulator::{run_trial, Policy, PolicyKind, SimConfig};

pub use crate::simulator::TrialResult;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig<T> {
    pub track_length: T,
    pub track_width: T,
    /// Forward command for every trial.
    pub speed: T,
    /// Overlapping (stacked) obstacles are allowed, which keeps high
    /// densities placeable.
    pub allow_stacking: bool,
    /// Uses [`SizeConfig::benchmark`] sizes by default.
    pub generator: TrackGenerator<T>,
    pub sim: SimConfig<T>,
}

impl<T: Real> Default for SweepConfig<T> {
    fn default() -> Self {
        Self {
            track_length: T::lit(10.0),
            track_width: T::lit(2.0),
            speed: T::lit(0.7),
            allow_stacking: true,
            generator: TrackGenerator { sizes: SizeConfig::benchmark(), ..TrackGenerator::default() },
            sim: SimConfig::default(),
        }
    }
}

/// Aggregated metrics for one (policy, density) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub policy: PolicyKind,
    pub density: f64,
    /// Mean distance (m).
    pub distance: f64,
    /// Success rate (%).
    pub success: f64,
    /// Step collision rate (%).
    pub collision: f64,
    pub n_trials: usize,
    pub total_steps: u64,
    pub colliding_steps: u64,
}

impl SweepCell {
    /// Aggregates trials; all must share policy and density.
    pub fn from_trials(policy: PolicyKind, density: f64, trials: &[TrialResult]) -> Self {
        let n = trials.len();
        let successes = trials.iter().filter(|t| t.success).count();
        let total_steps: u64 = trials.iter().map(|t| t.total_steps).sum();
        let colliding_steps: u64 = trials.iter().map(|t| t.colliding_steps).sum();
        let distance = if n == 0 { 0.0 } else { trials.iter().map(|t| t.distance).sum::<f64>() / n as f64 };
        let success = if n == 0 { 0.0 } else { 100.0 * successes as f64 / n as f64 };
        let collision = if total_steps == 0 { 0.0 } else { 100.0 * colliding_steps as f64 / total_steps as f64 };
        Self { policy, density, distance, success, collision, n_trials: n, total_steps, colliding_steps }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    /// Every trial, ordered by (policy, density, trial index).
    pub trials: Vec<TrialResult>,
}

impl SweepReport {
    pub fn cell(&self, policy: PolicyKind, density: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.policy == policy && c.density == density)
    }

    /// Step collision rate pooled over every density for one policy.
    pub fn pooled_collision(&self, policy: PolicyKind) -> f64 {
        let (hit, total) = self
            .cells
            .iter()
            .filter(|c| c.policy == policy)
            .fold((0u64, 0u64), |(h, t), c| (h + c.colliding_steps, t + c.total_steps));
        if total == 0 {
            0.0
        } else {
            100.0 * hit as f64 / total as f64
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// World seed for one (density, trial) pair. Depends on the density value,
/// not its position in the sweep, so adding densities leaves others intact.
pub fn trial_seed(base_seed: u64, density: f64, trial: usize) -> u64 {
    splitmix(splitmix(base_seed ^ splitmix(density.to_bits())) ^ trial as u64)
}

/// Runs every policy on `n_trials` paired worlds per density.
pub fn run_sweep<T: Real>(
    policies: &[Policy<T>],
    densities: &[T],
    n_trials: usize,
    base_seed: u64,
    mode: ObstacleMode,
    cfg: &SweepConfig<T>,
) -> Result<SweepReport> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "need at least one trial"));
    }
    cfg.sim.behavior.validate()?;
    for p in policies {
        p.search.validate()?;
    }
    let cmd = VelocityCommand::forward(cfg.speed);
    let jobs: Vec<(usize, usize)> = (0..densities.len()).flat_map(|d| (0..n_trials).map(move |t| (d, t))).collect();
    let runs: Vec<Result<Vec<TrialResult>>> = jobs
        .par_iter()
        .map(|&(d, t)| {
            let density = densities[d];
            let seed = trial_seed(base_seed, density.as_f64(), t);
            let world =
                cfg.generator
                    .generate(density, seed, cfg.track_length, cfg.track_width, mode, cfg.allow_stacking)?;
            Ok(policies.iter().map(|p| run_trial(&world, p, &cmd, &cfg.sim)).collect())
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut report = SweepReport::default();
    for (pi, policy) in policies.iter().enumerate() {
        for (d, density) in densities.iter().enumerate() {
            let trials: Vec<TrialResult> = runs[d * n_trials..(d + 1) * n_trials].iter().map(|r| r[pi].clone()).collect();
            report.cells.push(SweepCell::from_trials(policy.kind, density.as_f64(), &trials));
            report.trials.extend(trials);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

pub const REPORT_HEADER: [&str; 6] = ["policy", "density", "D", "S", "C", "n"];

/// Renders cells with columns policy, density, D, S, C, n.
pub fn report(rep: &SweepReport, format: ReportFormat) -> String {
    let rows: Vec<[String; 6]> = rep
        .cells
        .iter()
        .map(|c| {
            [
                c.policy.name().to_string(),
                format!("{}", c.density),
                format!("{:.2}", c.distance),
                format!("{:.2}", c.success),
                format!("{:.2}", c.collision),
                c.n_trials.to_string(),
            ]
        })
        .collect();
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(&REPORT_HEADER.join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        ReportFormat::Table => {
            let mut width = REPORT_HEADER.map(str::len);
            for r in &rows {
                for (w, v) in width.iter_mut().zip(r) {
                    *w = (*w).max(v.len());
                }
            }
            let line = |cells: &[String]| {
                let mut s = String::new();
                for (i, (v, w)) in cells.iter().zip(width).enumerate() {
                    if i == 0 {
                        write!(s, "{v:<w$}").unwrap();
                    } else {
                        write!(s, "  {v:>w$}").unwrap();
                    }
                }
                s.push('\n');
                s
            };
            out.push_str(&line(&REPORT_HEADER.map(String::from)));
            let total: usize = width.iter().sum::<usize>() + 2 * (width.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
            for r in &rows {
                out.push_str(&line(r));
            }
        }
    }
    out
}

/// Parses a CSV written by [`report`]. Step counts are not stored in the
/// CSV and come back as zero.
pub fn parse_report_csv(text: &str) -> Result<Vec<SweepCell>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| Error::parse(1, "header", "empty report"))?;
    if head.split(',').map(str::trim).ne(REPORT_HEADER) {
        return Err(Error::parse(1, "header", format!("expected `{}`", REPORT_HEADER.join(","))));
    }
    let mut cells = Vec::new();
    for (n, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 {
            return Err(Error::parse(n + 1, "row", format!("expected 6 fields, got {}", f.len())));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse().map_err(|_| Error::parse(n + 1, REPORT_HEADER[i], format!("bad number `{}`", f[i])))
        };
        cells.push(SweepCell {
            policy: f[0].parse().map_err(|e: String| Error::parse(n + 1, "policy", e))?,
            density: num(1)?,
            distance: num(2)?,
            success: num(3)?,
            collision: num(4)?,
            n_trials: f[5].parse().map_err(|_| Error::parse(n + 1, "n", format!("bad count `{}`", f[5])))?,
            total_steps: 0,
            colliding_steps: 0,
        });
    }
    Ok(cells)
}

/// One row per trial, for offline analysis.
pub fn trials_csv(trials: &[TrialResult]) -> String {
    let mut out = String::from("policy,density,seed,distance,success,total_steps,colliding_steps,termination\n");
    for t in trials {
        writeln!(
            out,
            "{},{},{},{:.6},{},{},{},{}",
            t.policy, t.density, t.seed, t.distance, t.success as u8, t.total_steps, t.colliding_steps, t.termination
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Termination;

    fn trial(success: bool, distance: f64, total: u64, hit: u64) -> TrialResult {
        TrialResult {
            seed: 0,
            policy: PolicyKind::Blind,
            density: 10.0,
            distance,
            success,
            total_steps: total,
            colliding_steps: hit,
            termination: if success { Termination::Success } else { Termination::Trip },
        }
    }

    #[test]
    fn metrics_pool_footsteps() {
        let trials = [trial(true, 10.0, 100, 0), trial(false, 2.0, 10, 5)];
        let c = SweepCell::from_trials(PolicyKind::Blind, 10.0, &trials);
        assert_eq!(c.success, 50.0);
        assert_eq!(c.distance, 6.0);
        // 5 of 110 footsteps, not the mean of per-trial rates.
        assert!((c.collision - 100.0 * 5.0 / 110.0).abs() < 1e-12);
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = report(&SweepReport::default(), ReportFormat::Csv);
        assert_eq!(csv, "policy,density,D,S,C,n\n");
        assert!(parse_report_csv(&csv).unwrap().is_empty());
    }

    #[test]
    fn single_row_formatting() {
        let mut rep = SweepReport::default();
        rep.cells.push(SweepCell {
            policy: PolicyKind::Semantic,
            density: 10.0,
            distance: 9.666,
            success: 97.0,
            collision: 2.3712,
            n_trials: 100,
            total_steps: 0,
            colliding_steps: 0,
        });
        let csv = report(&rep, ReportFormat::Csv);
        assert_eq!(csv, "policy,density,D,S,C,n\nsem,10,9.67,97.00,2.37,100\n");
        let table = report(&rep, ReportFormat::Table);
        for v in ["sem", "9.67", "97.00", "2.37", "100"] {
            assert!(table.contains(v));
        }
        let back = parse_report_csv(&csv).unwrap();
        assert_eq!(report(&SweepReport { cells: back, trials: vec![] }, ReportFormat::Csv), csv);
    }

    #[test]
    fn seeds_depend_on_density_value() {
        assert_eq!(trial_seed(7, 10.0, 3), trial_seed(7, 10.0, 3));
        assert_ne!(trial_seed(7, 10.0, 3), trial_seed(7, 15.0, 3));
        assert_ne!(trial_seed(7, 10.0, 3), trial_seed(7, 10.0, 4));
        assert_ne!(trial_seed(7, 10.0, 3), trial_seed(8, 10.0, 3));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_report_csv("a,b\n").is_err());
        assert!(parse_report_csv("policy,density,D,S,C,n\nsem,x,1,1,1,1\n").is_err());
    }
}
