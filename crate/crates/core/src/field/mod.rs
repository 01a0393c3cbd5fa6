//! The rescaled fluctuation field `Y^ε`, its pairings with test functions,
//! and the pathwise martingale decomposition.

pub mod forms;
pub mod ledger;
pub mod mollifier;
pub mod pairing;
pub mod test_function;

pub use forms::SpinForms;
pub use ledger::{
    decompose_trajectory, martingale_path, mollified_functional_path, record_path, taylor_bound,
    taylor_residual, DecompositionLedger, LedgerPlan, LedgerRow, LedgerState, SampleRecord,
};
pub use mollifier::{Mollifier, MollifierKind};
pub use pairing::{
    default_quad_step, discrete_pair_sum, drift_term, eval_field, mollified_field,
    nonlinear_integral, quadratic_variation_rate, remainder_terms, SPACE_QUAD_TOL,
};
pub use test_function::{Norms, TestFunction};
