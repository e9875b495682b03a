//! Swap-network routing and simulation toolkit for counterdiabatic QAOA.
//!
//! Qubit 0 is the least-significant bit of every basis-state index.

pub mod ansatz;
pub mod circuit;
pub mod device;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod mitigate;
pub mod optimize;
pub mod router;
pub mod sim;

pub use circuit::{Circuit, Gate, GateKind};
pub use error::{Error, Result};
