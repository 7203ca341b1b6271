//! The flow `g_r = exp(rA)` generated by the path adjacency operator, and
//! everything needed to watch it converge on the Grassmannian.
//!
//! On `Λ^k V` the flow is computed as `exp(r D_k)` where `D_k` is the
//! additive compound of `A`. `D_k` is a nonnegative 0/1 matrix, so its
//! exponential is a sum of nonnegative terms and keeps full relative
//! accuracy even for Plücker coordinates many orders of magnitude below
//! the largest one. The determinant route ([`compound_matrix`] of `g_r`) is
//! kept as an independent cross-check.
//!
//! [`compound_matrix`]: crate::compound_matrix

mod expm;
mod flow;
mod path;
mod perron;
mod positivity;

pub use expm::{exp_ra, expm, taylor_backward_error_bound, TAYLOR_ORDER, THETA_MAX};
pub use flow::{
    apply_flow, flow_iterate, grassmann_distance, plucker_angle, FlowConfig, FlowContext, FlowRun,
    FlowStep, FlowTrace,
};
pub use path::{eigensystem_a, matrix_a, path_eigenvalue, PathOperator};
pub use perron::{fixed_subspace_e1, perron_line, PerronData, PerronLine, PERRON_MAX_ITERATIONS};
pub use positivity::{is_totally_positive, TotalPositivity, TP_FLOOR};
