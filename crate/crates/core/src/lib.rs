//! Simulation and exact-solution toolkit for the decohered cluster state and
//! its parent Lindbladian.
//!
//! * [`pauli`] and [`stab`]: signed Pauli strings and a bit-packed stabilizer tableau.
//! * [`channel`] and [`estimate`]: measurement-feedback channels and Monte Carlo estimators.
//! * [`exact`]: dense states and the vectorized Lindbladian for small chains.
//! * [`freefermion`] and [`rdpert`]: closed forms and reaction-diffusion perturbation theory.

pub mod channel;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod freefermion;
pub mod io;
pub mod linalg;
pub mod pauli;
pub mod rdpert;
pub mod stab;

pub use error::{Error, Result};
pub use pauli::{string_operator, symmetry_operator, Boundary, Pauli1, PauliOperator, StringKind, SymmetryKind};
pub use stab::{Dyadic, Gate, StabilizerState};
pub use channel::{Channel, Frame, Initial, OddRealization, TrajectoryConfig};
pub use estimate::{EstimateResult, TwoCopyQuantity};
