//! Flat observation vector: command (3), behavior (13), proprioception (57),
//! elevation grid (720) and semantic grid (720), 1513 scalars in total.
//!
//! Map blocks are flattened row-major with row 0 the rearmost body-x row.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::foothold::VelocityCommand;
use crate::gait::BehaviorParams;
use crate::gridmap::{DualMap, GridSpec};
use crate::real::Real;

pub const CMD: Range<usize> = 0..3;
pub const BEHAVIOR: Range<usize> = 3..16;
pub const PROPRIO: Range<usize> = 16..73;
pub const ELEVATION: Range<usize> = 73..793;
pub const SEMANTIC: Range<usize> = 793..1513;
pub const OBSERVATION_LEN: usize = 1513;
pub const EXTERO_LEN: usize = 1440;

/// Named blocks in layout order.
pub const BLOCKS: [(&str, Range<usize>); 5] = [
    ("cmd", CMD),
    ("behavior", BEHAVIOR),
    ("proprio", PROPRIO),
    ("elevation", ELEVATION),
    ("semantic", SEMANTIC),
];

/// IMU, joint and action history readings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Proprio<T> {
    pub v_hat: [T; 3],
    pub omega: [T; 3],
    pub gravity: [T; 3],
    pub q: [T; 12],
    pub dq: [T; 12],
    pub a_prev1: [T; 12],
    pub a_prev2: [T; 12],
}

impl<T: Real> Proprio<T> {
    pub const LEN: usize = 57;

    /// Standing still, level, joints zeroed.
    pub fn level() -> Self {
        Self {
            gravity: [T::zero(), T::zero(), -T::one()],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n: T = self.gravity.iter().map(|&g| g * g).sum::<T>().sqrt();
        if (n - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::invalid("gravity", format!("norm {n} is not 1")));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(Self::LEN);
        v.extend_from_slice(&self.v_hat);
        v.extend_from_slice(&self.omega);
        v.extend_from_slice(&self.gravity);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.dq);
        v.extend_from_slice(&self.a_prev1);
        v.extend_from_slice(&self.a_prev2);
        v
    }

    pub fn from_slice(s: &[T]) -> Self {
        assert_eq!(s.len(), Self::LEN);
        let take3 = |o: usize| -> [T; 3] { s[o..o + 3].try_into().unwrap() };
        let take12 = |o: usize| -> [T; 12] { s[o..o + 12].try_into().unwrap() };
        Self {
            v_hat: take3(0),
            omega: take3(3),
            gravity: take3(6),
            q: take12(9),
            dq: take12(21),
            a_prev1: take12(33),
            a_prev2: take12(45),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationVector<T> {
    data: Vec<T>,
}

/// Inverse of [`assemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedObservation<T> {
    pub cmd: VelocityCommand<T>,
    pub behavior: BehaviorParams<T>,
    pub proprio: Proprio<T>,
    pub elevation: Vec<T>,
    pub semantic: Vec<T>,
}

impl<T: Real> ObservationVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, range: Range<usize>) -> &[T] {
        &self.data[range]
    }

    pub fn from_vec(data: Vec<T>) -> Result<Self> {
        if data.len() != OBSERVATION_LEN {
            return Err(Error::invalid(
                "observation",
                format!("length {} != {OBSERVATION_LEN}", data.len()),
            ));
        }
        Ok(Self { data })
    }

    pub fn decode(&self) -> DecodedObservation<T> {
        let c = self.block(CMD);
        let b: [T; 13] = self.block(BEHAVIOR).try_into().unwrap();
        DecodedObservation {
            cmd: VelocityCommand::new(c[0], c[1], c[2]),
            behavior: BehaviorParams::from_array(b),
            proprio: Proprio::from_slice(self.block(PROPRIO)),
            elevation: self.block(ELEVATION).to_vec(),
            semantic: self.block(SEMANTIC).to_vec(),
        }
    }

    /// One scalar per line, each block introduced by `# <name> <len>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, range) in BLOCKS {
            let _ = writeln!(out, "# {name} {}", range.len());
            for v in &self.data[range] {
                let _ = writeln!(out, "{v}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut data = Vec::with_capacity(OBSERVATION_LEN);
        let mut blocks = BLOCKS.iter();
        let mut remaining = 0usize;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if remaining != 0 {
                    return Err(Error::parse(i + 1, "block", "previous block is short"));
                }
                let (name, range) = blocks
                    .next()
                    .ok_or_else(|| Error::parse(i + 1, "block", "too many blocks"))?;
                let mut parts = header.split_whitespace();
                if parts.next() != Some(*name) || parts.next() != Some(range.len().to_string().as_str()) {
                    return Err(Error::parse(i + 1, *name, format!("expected `# {name} {}`", range.len())));
                }
                remaining = range.len();
                continue;
            }
            if remaining == 0 {
                return Err(Error::parse(i + 1, "value", "value outside any block"));
            }
            let v: T = line
                .parse()
                .map_err(|_| Error::parse(i + 1, "value", format!("cannot parse `{line}`")))?;
            data.push(v);
            remaining -= 1;
        }
        if remaining != 0 || blocks.next().is_some() {
            return Err(Error::parse(text.lines().count(), "block", "missing values"));
        }
        Self::from_vec(data)
    }
}

/// Concatenates command, behavior, proprioception and both maps.
pub fn assemble<T: Real>(
    cmd: &VelocityCommand<T>,
    params: &BehaviorParams<T>,
    prop: &Proprio<T>,
    maps: &DualMap<T>,
) -> Result<ObservationVector<T>> {
    let expected = GridSpec::<T>::default();
    for spec in [&maps.elevation.spec, &maps.semantic.spec] {
        if spec.rows != expected.rows || spec.cols != expected.cols {
            return Err(Error::GridMismatch {
                expected_rows: expected.rows,
                expected_cols: expected.cols,
                rows: spec.rows,
                cols: spec.cols,
            });
        }
    }
    let mut data = Vec::with_capacity(OBSERVATION_LEN);
    data.extend_from_slice(&[cmd.vx, cmd.vy, cmd.wz]);
    data.extend_from_slice(&params.to_array());
    data.extend(prop.to_vec());
    data.extend_from_slice(&maps.elevation.heights);
    data.extend_from_slice(&maps.semantic.costs);
    ObservationVector::from_vec(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose2D;
    use crate::gridmap::{sample_dual_map, ElevationMap, SemanticMap};
    use crate::scenario::World;

    fn zero_maps() -> DualMap<f64> {
        sample_dual_map(&World::empty(10.0, 2.0), Pose2D::origin(), GridSpec::default())
    }

    fn zero_params() -> BehaviorParams<f64> {
        BehaviorParams::from_array([0.0; 13])
    }

    #[test]
    fn block_sizes_add_up() {
        let sizes: Vec<usize> = BLOCKS.iter().map(|(_, r)| r.len()).collect();
        assert_eq!(sizes, vec![3, 13, 57, 720, 720]);
        assert_eq!(sizes.iter().sum::<usize>(), OBSERVATION_LEN);
        assert_eq!(ELEVATION.len() + SEMANTIC.len(), EXTERO_LEN);
        for w in BLOCKS.windows(2) {
            assert_eq!(w[0].1.end, w[1].1.start);
        }
    }

    #[test]
    fn zero_inputs_give_zero_vector() {
        let o = assemble(&VelocityCommand::default(), &zero_params(), &Proprio::default(), &zero_maps()).unwrap();
        assert_eq!(o.len(), 1513);
        assert!(o.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn command_goes_first() {
        let o = assemble(&VelocityCommand::forward(0.7), &zero_params(), &Proprio::default(), &zero_maps()).unwrap();
        assert_eq!(o.as_slice()[0], 0.7);
        assert_eq!(&o.as_slice()[1..3], &[0.0, 0.0]);
    }

    #[test]
    fn wrong_grid_is_rejected() {
        let spec = GridSpec {
            rows: 20,
            span_x: 1.0,
            ..GridSpec::default()
        };
        let maps = DualMap {
            elevation: ElevationMap {
                spec,
                heights: vec![0.0; 480],
                center: Pose2D::origin(),
            },
            semantic: SemanticMap {
                spec,
                costs: vec![0.0; 480],
                class_ids: vec![0; 480],
                center: Pose2D::origin(),
            },
        };
        let err = assemble(&VelocityCommand::default(), &zero_params(), &Proprio::default(), &maps).unwrap_err();
        assert!(matches!(err, Error::GridMismatch { rows: 20, .. }));
    }

    #[test]
    fn gravity_must_be_unit() {
        Proprio::<f64>::level().validate().unwrap();
        assert!(Proprio::<f64>::default().validate().is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut maps = zero_maps();
        maps.elevation.heights[5] = 0.125;
        maps.semantic.costs[719] = 10.0;
        let o = assemble(&VelocityCommand::new(0.1, -0.2, 0.3), &BehaviorParams::default(), &Proprio::level(), &maps).unwrap();
        let text = o.to_text();
        assert!(text.starts_with("# cmd 3\n"));
        assert_eq!(ObservationVector::<f64>::from_text(&text).unwrap(), o);
        assert!(ObservationVector::<f64>::from_text("# cmd 3\n1\n").is_err());
    }
}
