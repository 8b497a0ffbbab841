//! Exact sub-step propagators of the split Bloch equation.

mod canonical;
mod cayley;
mod newton;
mod nsfd;
mod relax_nut;
mod strategy;

pub use canonical::{
    canonical3_coefficients, canonical_gap_threshold, min_node_gap, CANONICAL_GAP_TOLERANCE,
};
pub use cayley::{cayley, crank_nicolson_liouville};
pub use newton::{
    newton_divided_differences, newton_polynomial, newton_polynomial_horner, newton_to_power_basis,
};
pub use nsfd::{nsfd_report, NsfdReport, ThreeLevelNsfd, VANISHING_TOLERANCE};
pub use relax_nut::{build_relax_nut, relax_nut_half_step, RelaxNutPropagator, RelaxationModel};
pub use strategy::{ExponentialRoute, LiouvilleStrategy, Method, NewtonEvaluation};
