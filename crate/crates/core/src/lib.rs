//! Convergence bounds on the capacities of iterated GNS-symmetric quantum
//! channels, and the active-versus-passive storage comparison for Pauli
//! noise protected by the five-qubit code.
//!
//! Module map:
//! - [`channel`]: dense channels, composition, tensor products, GNS checks.
//! - [`spectral`]: peripheral projection and its block structure.
//! - [`bounds`]: entropic constants and capacity bounds.
//! - [`pauli`]: closed-form single-qubit Pauli channels.
//! - [`stabilizer`]: the `[[5,1,3]]` code and its logical channels.
//! - [`scenario`]: passive/active bound curves, crossover search, CSV output.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod pauli;
pub mod scenario;
pub mod spectral;
pub mod stabilizer;

pub use channel::{ChannelDense, DensityMatrix, Tolerances};
pub use error::{Error, Result};
pub use exec::Execution;
