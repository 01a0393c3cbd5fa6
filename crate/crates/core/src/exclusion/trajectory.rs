use rand::Rng;

use super::{sample_initial, JumpEvent, Observer, SimParams, Simulator, SpinState};

/// Recorded path: initial state, every jump, and snapshots at the sample times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: SimParams,
    pub initial: SpinState,
    pub events: Vec<JumpEvent>,
    /// Macroscopic sample times, nondecreasing, within `[0, horizon]`.
    pub sample_times: Vec<f64>,
    pub snapshots: Vec<SpinState>,
}

/// Observer that stores every jump.
#[derive(Debug, Default)]
pub struct EventRecorder {
    pub events: Vec<JumpEvent>,
}

impl Observer for EventRecorder {
    fn on_jump(&mut self, event: &JumpEvent, _state: &SpinState) {
        self.events.push(*event);
    }
}

impl Trajectory {
    /// Simulate from a Bernoulli(1/2) initial state.
    pub fn simulate<R: Rng + ?Sized>(params: SimParams, rng: &mut R, sample_times: &[f64]) -> Self {
        let initial = sample_initial(&params, rng);
        Self::simulate_from(params, initial, rng, sample_times)
    }

    pub fn simulate_from<R: Rng + ?Sized>(
        params: SimParams,
        initial: SpinState,
        rng: &mut R,
        sample_times: &[f64],
    ) -> Self {
        let mut sim = Simulator::new(params, initial.clone());
        let mut rec = EventRecorder::default();
        let mut snapshots = Vec::with_capacity(sample_times.len());
        for &t in sample_times {
            let target = params.to_micro(t);
            let dt = (target - sim.micro_time()).max(0.0);
            sim.advance(rng, dt, &mut rec);
            snapshots.push(sim.state().clone());
        }
        Self {
            params,
            initial,
            events: rec.events,
            sample_times: sample_times.to_vec(),
            snapshots,
        }
    }

    /// State at microscopic time `tau`, by replaying events.
    pub fn state_at(&self, tau: f64) -> SpinState {
        let mut s = self.initial.clone();
        let l = s.sites();
        for e in self.events.iter().take_while(|e| e.micro_time <= tau) {
            s.exchange(e.source, e.target(l));
        }
        s
    }

    /// Replay the path into `observer`, calling `at_sample(k, state)` when
    /// sample time `k` is reached.
    pub fn replay<O: Observer + ?Sized, F: FnMut(usize, &SpinState, &mut O)>(
        &self,
        observer: &mut O,
        mut at_sample: F,
    ) {
        let mut s = self.initial.clone();
        let l = s.sites();
        let mut now = 0.0;
        let mut next_event = 0;
        for (k, &t) in self.sample_times.iter().enumerate() {
            let target = self.params.to_micro(t);
            while next_event < self.events.len() && self.events[next_event].micro_time < target {
                let e = &self.events[next_event];
                if e.micro_time > now {
                    observer.on_hold(e.micro_time - now);
                    now = e.micro_time;
                }
                s.exchange(e.source, e.target(l));
                observer.on_jump(e, &s);
                next_event += 1;
            }
            if target > now {
                observer.on_hold(target - now);
                now = target;
            }
            at_sample(k, &s, observer);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn replay_reproduces_snapshots() {
        let p = SimParams::with_sites(0.1, 1.5, 40, 1.0).unwrap();
        let times: Vec<f64> = (0..=8).map(|k| k as f64 * 0.05).collect();
        let traj = Trajectory::simulate(p, &mut seeded(9), &times);
        assert!(!traj.events.is_empty());
        assert!(traj
            .events
            .windows(2)
            .all(|w| w[0].micro_time < w[1].micro_time));
        for (t, snap) in times.iter().zip(&traj.snapshots) {
            assert_eq!(&traj.state_at(p.to_micro(*t)), snap);
        }
        let mut seen = Vec::new();
        traj.replay(&mut (), |k, s, _| seen.push((k, s.clone())));
        for (k, s) in seen {
            assert_eq!(s, traj.snapshots[k]);
        }
    }

    #[test]
    fn frozen_trajectory() {
        let p = SimParams::with_sites(0.1, 1.0, 12, 1.0).unwrap();
        let traj =
            Trajectory::simulate_from(p, SpinState::filled(12), &mut seeded(1), &[0.0, 0.5, 1.0]);
        assert!(traj.events.is_empty());
        assert!(traj.snapshots.iter().all(|s| s == &SpinState::filled(12)));
    }
}
