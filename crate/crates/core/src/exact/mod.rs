//! Desk-scale exact solvers: dense states, jump operators, the vectorized
//! Lindbladian, its kernels and correlators.

pub mod correlators;
pub mod dense;
pub mod model;
pub mod states;
pub mod superop;

pub use correlators::{correlator, renyi1, renyi2, trace_channel, Quantity};
pub use dense::{DenseOperator, OperatorKind, PauliAction, C64, MAX_DENSITY_QUBITS};
pub use model::{conj_u_cz, jump_matrix, JumpKind, JumpTerm, LindbladModel, ObcL2Range, PauliSum};
pub use states::{build_state, stabilizer_projector, StateKind};
pub use superop::{
    charge_sector, u_cz_conjugate_diff, Charges, Interleave, SectorLabel, SteadySpace, Superoperator, DEFAULT_TOL,
};
