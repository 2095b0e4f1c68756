//! Stationary states and symmetry-breaking bifurcations of the double-well
//! nonlinear Schrodinger equation in the two-mode (semiclassical) limit.
//!
//! The crate has two layers. The closed-form layer works entirely in the
//! reduced two-level picture: branch equations and critical couplings
//! ([`two_level`]), exact root counting for the branch-counting polynomial
//! ([`root_count`]), stability classification of every branch
//! ([`stability`]), and Hamiltonian time integration of the reduced dynamics
//! ([`dynamics`]). The verification layer cross-checks the reduction against
//! explicitly solvable and directly discretized problems: the double
//! Dirac-delta well with its Lambert-W spectrum ([`delta_well`]) and a 1D
//! finite-difference solver for the full stationary problem ([`grid`]).

pub mod checks;
pub mod delta_well;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod numeric;
pub mod root_count;
pub mod stability;
pub mod two_level;

pub use error::{Error, Result};
pub use two_level::NonlinearityPower;
