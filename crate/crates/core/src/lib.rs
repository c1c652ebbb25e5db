//! Energy-efficient beamforming for MIMO links assisted by two nearly-passive
//! reconfigurable metasurfaces under global reflection constraints.

// `!(x > 0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod convex;
pub mod error;
pub mod multi_stream;
pub mod numerics;
pub mod oracle;
pub mod power;
mod reflection;
pub mod single_stream;
pub mod siso;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{db_to_linear, dbm_to_watts, watts_to_dbm, Cx, Real};

pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type ComplexMatrix32 = numerics::ComplexMatrix<f32>;
pub type Complex64 = Cx<f64>;
pub type Complex32 = Cx<f32>;
