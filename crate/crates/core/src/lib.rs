//! Simulation and analysis of nonlinear coherent heat machines.
//!
//! Few-mode bosonic states are evolved in a truncated Fock space through
//! linear (beam splitter, phase shift) and nonlinear (cross-Kerr, s-order
//! dispersive, k-photon exchange) elements. On top of that sit:
//!
//! - [`thermo`]: ergotropy, passive states and entropies of single modes;
//! - [`engine`]: the semiclassical four-mode heat engine and its cascades;
//! - [`metrology`]: the cross-Kerr Mach-Zehnder interferometer and its
//!   quantum Fisher information;
//! - [`sensor`]: black-box process identification from work-capacity traces.
//!
//! Units: the mode frequency sets the energy scale, so energies and work
//! capacities are reported in quanta.

pub mod engine;
mod error;
pub mod fock;
mod linalg;
pub mod metrology;
pub mod sensor;
pub mod thermo;

pub use error::{Error, Result};
pub use num_complex::Complex64;
