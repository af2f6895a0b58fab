//! De Broglie-Bohm trajectory simulation of small quantum circuits.
//!
//! The crate compiles the Deutsch algorithm and a complete gate set
//! {H, T, CNOT} into generating-Hamiltonian schedules for two physical
//! qubit realizations, evolves the pilot wave exactly in time, and
//! integrates ensembles of configuration-space trajectories through
//! gates and measurements:
//!
//! * [`qubit`] — abstract register states, gates, generating
//!   Hamiltonians, ZXZ synthesis and circuit compilation;
//! * [`bell`] — Bell's spin model, where the only beable is the pointer
//!   coordinate of the measurement apparatus;
//! * [`well`] — qubits as the two lowest modes of an infinite square
//!   well, with drive potentials implementing the gates and an energy
//!   meter reading the data qubit out;
//! * [`trajectories`] — equilibrium/non-equilibrium samplers, the RK4
//!   guidance-flow integrator and statistical verification;
//! * [`quadrature`] — composite Gauss-Legendre rules used to verify
//!   drive matrix elements in the position basis.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values;
// the negated form is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod qubit;
pub mod trajectories;
pub mod well;

pub use error::{Error, Result};
