//! Strang composition of the two exact sub-flows, trajectories and order estimates.

mod convergence;
mod field;
mod strang;
mod trajectory;

pub use convergence::{
    convergence_order, convergence_order_with_reference, least_squares_slope, ConvergenceReport,
    NOISE_FLOOR, REFERENCE_REFINEMENT,
};
pub use field::{field_average, FieldSignal, TabulatedSignal};
pub use strang::{strang_step, StepPlan, StrangIntegrator};
pub use trajectory::{propagate, simulate, simulate_with_stride, Trajectory};
