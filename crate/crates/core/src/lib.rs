//! Numerical toolkit for the resource theory of coherence under
//! time-translation symmetry.
//!
//! States are finite-dimensional density operators, Hamiltonians are
//! Hermitian observables, and free operations are channels covariant under
//! `e^{-iHt}`. The crate computes coherence monotones (quantum Fisher
//! information, purity of coherence, skew information), optimal
//! purifications, clock energy distributions with their translated-Poisson
//! limits, pure-state conversion rates, and single-shot distillation
//! fidelities through a conditional min-entropy SDP.
//!
//! Everything is dense, deterministic and sized for matrices up to roughly
//! 64×64.

#![forbid(unsafe_code)]
// `!(x > 0.0)` guards are written that way to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod channels;
pub mod clock;
pub mod config;
pub mod conversion;
pub mod distillation;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod measures;
pub mod purification;
pub mod random;
pub mod sdp;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use hermitian::{c64, ComplexMatrix, DensityMatrix, HermitianObservable, PureState};
