//! Adaptive quadrature and bracketed root finding.

mod quadrature;
mod roots;

pub use quadrature::{integrate, integrate_with_tail, QuadratureError, QuadratureResult};
pub use roots::{find_root, Bracket, RootError};
