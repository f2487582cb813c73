//! Dense complex Hermitian linear algebra: matrices, states, observables,
//! distances, partial traces and dephasing.

mod eigen;
mod matrix;
mod ops;
mod states;

pub use eigen::{eig_hermitian, Eigen, Eigenspace};
pub(crate) use eigen::{group_levels, jacobi};
pub use matrix::{c64, ComplexMatrix};
pub use ops::{
    dephase, fidelity, partial_trace, partial_trace_matrix, tensor, trace_distance, Keep,
};
pub use states::{noninteracting_hamiltonian, DensityMatrix, HermitianObservable, PureState};
