// `!(x > y)` is how NaN inputs are rejected throughout; reference constants
// keep every digit they were published with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod fit;
pub mod mellin;
pub mod oracle;
pub mod quad;
pub mod radial;
pub mod specfun;
pub mod stable;

pub use error::{KernelError, Result};
