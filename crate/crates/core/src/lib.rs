//! First-order energy corrections for the Dirac equation with generalised
//! momenta, for a linear radial potential and a one-dimensional triangular
//! well.

pub mod cli;
pub mod gup;
pub mod numerics;
pub mod oracle;
pub mod radial;
pub mod specialfn;
pub mod triangular;
pub mod verify;
