use std::fmt::Write;

use crate::gait::Leg;
use crate::real::Real;
use crate::reward::RewardBreakdown;

use super::RobotState;

/// Per-step base pose, foot positions, contacts and landing collisions.
#[derive(Debug, Default, Clone)]
pub struct TrajectoryLog {
    rows: Vec<String>,
}

impl TrajectoryLog {
    pub fn header() -> String {
        let mut h = String::from("t,x,y,yaw");
        for leg in Leg::ALL {
            let n = leg.short_name();
            write!(h, ",{n}_x,{n}_y,{n}_z").unwrap();
        }
        for leg in Leg::ALL {
            write!(h, ",{}_contact", leg.short_name()).unwrap();
        }
        for leg in Leg::ALL {
            write!(h, ",{}_collision", leg.short_name()).unwrap();
        }
        h
    }

    pub fn record<T: Real>(&mut self, t: T, state: &RobotState<T>, collisions: &[bool; 4]) {
        let mut r = format!("{:.4},{:.6},{:.6},{:.6}", t, state.base.x, state.base.y, state.base.yaw);
        for f in &state.feet_world {
            write!(r, ",{:.6},{:.6},{:.6}", f.x, f.y, f.z).unwrap();
        }
        for c in state.gait.in_contact {
            write!(r, ",{}", c as u8).unwrap();
        }
        for c in collisions {
            write!(r, ",{}", *c as u8).unwrap();
        }
        self.rows.push(r);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::header();
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Per-step reward terms.
#[derive(Debug, Default, Clone)]
pub struct RewardLog {
    names: Vec<String>,
    rows: Vec<String>,
}

impl RewardLog {
    pub fn record<T: Real>(&mut self, step: u64, r: &RewardBreakdown<T>) {
        if self.names.is_empty() {
            self.names = r.penalties.iter().map(|p| p.name.clone()).collect();
        }
        let mut row = format!("{step},{:.6},{:.6}", r.r_vel, r.r_sem);
        for p in &r.penalties {
            write!(row, ",{:.6}", p.value).unwrap();
        }
        write!(row, ",{:.6},{:.6}", r.r_penalty, r.total).unwrap();
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,r_vel,r_sem");
        for n in &self.names {
            write!(out, ",{n}").unwrap();
        }
        out.push_str(",r_penalty,total\n");
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}
