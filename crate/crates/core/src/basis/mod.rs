//! Hermite and Dirichlet-sine bases, the weighted sup norms of test
//! functions, and the negative-order Sobolev norm on space-time pairings.

pub mod dirichlet;
pub mod hermite;
pub mod norms;
pub mod sobolev;

pub use dirichlet::DirichletBasis;
pub use hermite::{hermite_eval, HermiteBasis, MAX_HERMITE_ORDER};
pub use norms::{sup_by_l2_bound, weighted_sup_norm};
pub use sobolev::{neg_sobolev_norm, project, Coefficients, SobolevWeights, SpaceTimeField};
