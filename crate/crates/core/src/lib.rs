//! Entanglement-assisted and Holevo capacities of finite-dimensional quantum
//! channels, and instance-by-instance certification of the bound
//!
//! ```text
//! C_E(T) ≤ (4d−3)(2d−5/2)² / ((2d−3/2)·ln(2d−3/2) − 2d + 5/2) · C_H(T),   d = d_in
//! ```
//!
//! together with every intermediate inequality used to derive it.
//!
//! Entropies are in nats internally; capacities are also reported in bits.

pub mod capacity;
pub mod certify;
pub mod channel;
pub mod entropy;
pub mod error;
pub mod holevo;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod schmidt;
pub mod state;

pub use channel::QuantumChannel;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, HermitianEigensystem, Subsystem};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use state::DensityMatrix;
