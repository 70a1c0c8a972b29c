//! Compiles finite-dimensional quantum operations into circuits of
//! single-qubit rotations and C-NOT gates.
//!
//! Isometries (unitaries and state preparation included) are handled by
//! [`synth`], channels, POVMs and instruments by [`channel`]. Every
//! produced circuit can be checked against its source with [`verify`],
//! shortened with [`simplify`], retargeted to trapped-ion gates with
//! [`ion`], and written out with [`export`].
//!
//! Qubit 0 is the most significant tensor factor throughout.

pub mod channel;
pub mod circuit;
pub mod error;
pub mod export;
pub mod io;
pub mod ion;
pub mod numerics;
pub mod simplify;
pub mod synth;
pub mod verify;

pub use circuit::{Angle, Circuit, Gate};
pub use error::{Error, Result};
pub use numerics::CMatrix;
