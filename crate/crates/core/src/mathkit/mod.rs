//! Special functions and generic solvers.

mod expint;
mod kkt;
mod quadrature;
mod waterfill;
mod wishart;

pub use expint::{expint_ei, rate_integral_exp, scaled_e1, EULER_GAMMA};
pub(crate) use expint::rate_integral_exp0;
pub use kkt::{maximize_separable, KktSolution, SeparableConcave};
pub use quadrature::integrate;
pub use waterfill::{water_fill, WaterFillSolution};
pub use wishart::WishartMaxEig;
