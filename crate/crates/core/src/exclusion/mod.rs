//! Continuous-time dynamics of the √ε-asymmetric simple exclusion process on
//! a periodic ring, with a dense-generator oracle for small rings.
//!
//! Particles jump right at rate `1 + √ε γ` and left at rate `1 − √ε γ`,
//! subject to exclusion. Macroscopic time `t` maps to microscopic time
//! `τ = t ε⁻²`.

mod engine;
mod generator;
mod params;
mod state;
mod trajectory;

pub use engine::{enabled_jumps, Direction, JumpEvent, Observer, Simulator};
pub use generator::{apply_generator_local, exact_generator_matrix, state_index, MAX_ORACLE_SITES};
pub use params::SimParams;
pub use state::{coordinate, sample_initial, SpinState};
pub use trajectory::{EventRecorder, Trajectory};
