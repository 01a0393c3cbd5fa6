//! Exact event-driven (Gillespie) simulation with incrementally maintained
//! sets of enabled jumps.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{SimParams, SpinState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub source: usize,
    pub direction: Direction,
    pub rate: f64,
    pub micro_time: f64,
}

impl JumpEvent {
    pub fn target(&self, sites: usize) -> usize {
        match self.direction {
            Direction::Right => (self.source + 1) % sites,
            Direction::Left => (self.source + sites - 1) % sites,
        }
    }
}

/// Receives the piecewise-constant structure of a path: holding intervals
/// (microscopic durations) and jumps (after the state has been updated).
pub trait Observer {
    fn on_hold(&mut self, _micro_dt: f64) {}
    fn on_jump(&mut self, _event: &JumpEvent, _state: &SpinState) {}
}

impl Observer for () {}

/// Every admissible jump out of `state`, with its rate. Zero-rate jumps
/// (possible only when `√ε|γ| = 1`) are omitted.
pub fn enabled_jumps(state: &SpinState, params: &SimParams) -> Vec<JumpEvent> {
    let l = state.sites();
    let mut out = Vec::new();
    for x in 0..l {
        if !state.occupied(x) {
            continue;
        }
        if !state.occupied(state.right(x)) && params.right_rate() > 0.0 {
            out.push(JumpEvent {
                source: x,
                direction: Direction::Right,
                rate: params.right_rate(),
                micro_time: 0.0,
            });
        }
        if !state.occupied(state.left(x)) && params.left_rate() > 0.0 {
            out.push(JumpEvent {
                source: x,
                direction: Direction::Left,
                rate: params.left_rate(),
                micro_time: 0.0,
            });
        }
    }
    out
}

/// Set of bond indices with O(1) insert, remove and uniform sampling.
#[derive(Debug, Clone)]
struct IndexedSet {
    items: Vec<u32>,
    slot: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedSet {
    fn new(capacity: usize) -> Self {
        Self {
            items: Vec::with_capacity(capacity),
            slot: vec![ABSENT; capacity],
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn set(&mut self, b: usize, present: bool) {
        let here = self.slot[b] != ABSENT;
        if present && !here {
            self.slot[b] = self.items.len() as u32;
            self.items.push(b as u32);
        } else if !present && here {
            let i = self.slot[b] as usize;
            let last = *self.items.last().unwrap();
            self.items[i] = last;
            self.slot[last as usize] = i as u32;
            self.items.pop();
            self.slot[b] = ABSENT;
        }
    }

    fn get(&self, i: usize) -> usize {
        self.items[i] as usize
    }
}

/// Gillespie engine for one replica. Bond `b` joins sites `b` and `b+1`; it
/// is right-enabled when `η(b)=1, η(b+1)=0` and left-enabled when
/// `η(b)=0, η(b+1)=1`.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SimParams,
    state: SpinState,
    right: IndexedSet,
    left: IndexedSet,
    micro_time: f64,
}

impl Simulator {
    pub fn new(params: SimParams, state: SpinState) -> Self {
        assert_eq!(params.sites, state.sites(), "state does not match params");
        let l = state.sites();
        let mut sim = Self {
            params,
            state,
            right: IndexedSet::new(l),
            left: IndexedSet::new(l),
            micro_time: 0.0,
        };
        for b in 0..l {
            sim.refresh_bond(b);
        }
        sim
    }

    pub fn state(&self) -> &SpinState {
        &self.state
    }

    pub fn into_state(self) -> SpinState {
        self.state
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn micro_time(&self) -> f64 {
        self.micro_time
    }

    pub fn total_rate(&self) -> f64 {
        self.params.right_rate() * self.right.len() as f64
            + self.params.left_rate() * self.left.len() as f64
    }

    fn refresh_bond(&mut self, b: usize) {
        let a = self.state.occupied(b);
        let c = self.state.occupied(self.state.right(b));
        self.right.set(b, a && !c && self.params.right_rate() > 0.0);
        self.left.set(b, !a && c && self.params.left_rate() > 0.0);
    }

    /// Run for `micro_duration` microscopic time units, reporting holding
    /// intervals and jumps to `observer`. Returns the number of jumps.
    pub fn advance<R: Rng + ?Sized, O: Observer + ?Sized>(
        &mut self,
        rng: &mut R,
        micro_duration: f64,
        observer: &mut O,
    ) -> usize {
        assert!(micro_duration >= 0.0, "duration must be nonnegative");
        let end = self.micro_time + micro_duration;
        let l = self.state.sites();
        let (rr, rl) = (self.params.right_rate(), self.params.left_rate());
        let mut jumps = 0;
        loop {
            let right_total = rr * self.right.len() as f64;
            let total = right_total + rl * self.left.len() as f64;
            if total <= 0.0 {
                break;
            }
            let e: f64 = Exp1.sample(rng);
            let dt = e / total;
            if self.micro_time + dt >= end {
                break;
            }
            observer.on_hold(dt);
            self.micro_time += dt;
            let pick_right = rng.gen::<f64>() * total < right_total;
            let event = if pick_right {
                let b = self.right.get(rng.gen_range(0..self.right.len()));
                JumpEvent {
                    source: b,
                    direction: Direction::Right,
                    rate: rr,
                    micro_time: self.micro_time,
                }
            } else {
                let b = self.left.get(rng.gen_range(0..self.left.len()));
                JumpEvent {
                    source: (b + 1) % l,
                    direction: Direction::Left,
                    rate: rl,
                    micro_time: self.micro_time,
                }
            };
            self.apply(&event);
            jumps += 1;
            observer.on_jump(&event, &self.state);
        }
        if end > self.micro_time {
            observer.on_hold(end - self.micro_time);
        }
        self.micro_time = end;
        jumps
    }

    fn apply(&mut self, event: &JumpEvent) {
        let l = self.state.sites();
        let target = event.target(l);
        debug_assert!(self.state.occupied(event.source) && !self.state.occupied(target));
        self.state.exchange(event.source, target);
        let bond = match event.direction {
            Direction::Right => event.source,
            Direction::Left => target,
        };
        self.refresh_bond((bond + l - 1) % l);
        self.refresh_bond(bond);
        self.refresh_bond((bond + 1) % l);
    }
}
