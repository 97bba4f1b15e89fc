use footplan::bench::{run_sweep, SweepConfig};
use footplan::scenario::{generate_track, ObstacleMode, TrackGenerator, World};
use footplan::simulator::{run_trial, step, Policy, PolicyKind, RobotState, SimConfig, Simulator, Termination};
use footplan::{ObstacleQuery, VelocityCommand};

fn track(density: f64, seed: u64, mode: ObstacleMode) -> World<f64> {
    generate_track(density, seed, 10.0, 2.0, mode, true).unwrap()
}

#[test]
fn trials_are_pure_functions_of_inputs() {
    let world = track(15.0, 4, ObstacleMode::Rigid);
    let cmd = VelocityCommand::forward(0.7);
    for kind in PolicyKind::ALL {
        let a = run_trial(&world, &Policy::new(kind), &cmd, &SimConfig::default());
        let b = run_trial(&world, &Policy::new(kind), &cmd, &SimConfig::default());
        assert_eq!(a, b);
        assert!(a.colliding_steps <= a.total_steps);
        assert_eq!(a.success, a.termination == Termination::Success);
        if a.success {
            assert_eq!(a.distance, 10.0);
        } else {
            assert!(a.distance < 10.0);
        }
    }
}

#[test]
fn virtual_worlds_never_trip() {
    let cmd = VelocityCommand::forward(0.7);
    for seed in 0..10 {
        let world = track(20.0, seed, ObstacleMode::Virtual);
        for kind in PolicyKind::ALL {
            let r = run_trial(&world, &Policy::new(kind), &cmd, &SimConfig::default());
            assert_ne!(r.termination, Termination::Trip);
            assert!(r.success);
        }
    }
}

#[test]
fn virtual_blind_collides_more_than_semantic() {
    let cmd = VelocityCommand::forward(0.7);
    let (mut blind, mut sem) = (0, 0);
    for seed in 0..10 {
        let world = track(15.0, seed, ObstacleMode::Virtual);
        blind += run_trial(&world, &Policy::blind(), &cmd, &SimConfig::default()).colliding_steps;
        sem += run_trial(&world, &Policy::semantic(), &cmd, &SimConfig::default()).colliding_steps;
    }
    assert!(sem < blind, "sem {sem} blind {blind}");
}

#[test]
fn state_invariants_hold_along_rollouts() {
    let cmd = VelocityCommand::new(0.6, 0.05, 0.1);
    for seed in 0..5 {
        let world = track(10.0, seed, ObstacleMode::Rigid);
        for kind in PolicyKind::ALL {
            let mut sim = Simulator::new(&world, Policy::new(kind), SimConfig::default(), 0);
            let mut state: RobotState<f64> = sim.initial_state(&cmd);
            for _ in 0..600 {
                let out = sim.step(&state, &cmd);
                let next = &out.new_state;
                for i in 0..4 {
                    let foot = next.feet_world[i];
                    assert!(foot.z >= 0.0);
                    if next.gait.in_contact[i] {
                        let ground = world.height_at(foot.xy(), true);
                        assert_eq!(foot.z, ground);
                    }
                    if state.gait.in_contact[i] && next.gait.in_contact[i] {
                        assert_eq!(state.feet_world[i], foot);
                    }
                    if out.landed[i] {
                        assert_eq!(foot.xy(), next.swing_target[i]);
                    }
                }
                assert_eq!(out.terminated == Termination::Success, next.base.x >= 10.0 - 1e-9 && !out.stub_events.iter().any(|&s| s));
                if out.terminated != Termination::Running {
                    break;
                }
                state = out.new_state;
            }
        }
    }
}

#[test]
fn free_step_matches_simulator_step() {
    let world = track(10.0, 2, ObstacleMode::Rigid);
    let cmd = VelocityCommand::forward(0.7);
    let cfg = SimConfig::default();
    let policy = Policy::semantic();
    let mut sim = Simulator::new(&world, policy, cfg.clone(), 0);
    let mut state = sim.initial_state(&cmd);
    for _ in 0..200 {
        let a = sim.step(&state, &cmd);
        let b = step(&state, &cmd, &world, &policy, &cfg);
        assert_eq!(a, b);
        state = a.new_state;
    }
}

#[test]
fn density_zero_sweep_is_clean() {
    let policies = [Policy::blind(), Policy::geometric(), Policy::semantic()];
    let report = run_sweep(&policies, &[0.0], 5, 1, ObstacleMode::Rigid, &SweepConfig::default()).unwrap();
    for c in &report.cells {
        assert_eq!(c.success, 100.0);
        assert_eq!(c.distance, 10.0);
        assert_eq!(c.collision, 0.0);
        assert_eq!(c.n_trials, 5);
    }
}

#[test]
fn sweeps_are_paired_and_reproducible() {
    let policies = [Policy::blind(), Policy::semantic()];
    let cfg = SweepConfig::default();
    let a = run_sweep(&policies, &[10.0, 20.0], 8, 3, ObstacleMode::Rigid, &cfg).unwrap();
    let b = run_sweep(&policies, &[10.0, 20.0], 8, 3, ObstacleMode::Rigid, &cfg).unwrap();
    assert_eq!(a, b);
    // Every policy sees the same world seeds for a density.
    let seeds = |k: PolicyKind, d: f64| -> Vec<u64> {
        a.trials.iter().filter(|t| t.policy == k && t.density == d).map(|t| t.seed).collect()
    };
    assert_eq!(seeds(PolicyKind::Blind, 10.0), seeds(PolicyKind::Semantic, 10.0));
    assert_ne!(seeds(PolicyKind::Blind, 10.0), seeds(PolicyKind::Blind, 20.0));
    // A density's worlds do not depend on which other densities are swept.
    let c = run_sweep(&policies, &[20.0], 8, 3, ObstacleMode::Rigid, &cfg).unwrap();
    assert_eq!(c.cell(PolicyKind::Semantic, 20.0), a.cell(PolicyKind::Semantic, 20.0));
}

#[test]
fn sweep_rejects_zero_trials() {
    assert!(run_sweep(&[Policy::<f64>::blind()], &[10.0], 0, 1, ObstacleMode::Rigid, &SweepConfig::default()).is_err());
}

#[test]
fn single_precision_rollout() {
    let world = TrackGenerator::<f32>::default().generate(10.0, 5, 10.0, 2.0, ObstacleMode::Rigid, true).unwrap();
    let r = run_trial(&world, &Policy::<f32>::semantic(), &VelocityCommand::forward(0.7f32), &SimConfig::default());
    assert!(r.total_steps > 0);
    assert!(r.colliding_steps <= r.total_steps);
}
