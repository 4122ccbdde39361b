pub mod algebraic;
pub mod bits;
pub mod circuit;
pub mod counter;
pub mod error;
pub mod generators;
pub mod geometric;
pub mod oracle;
pub mod scalar;
pub mod search;
pub mod tensor;

pub use bits::BitString;
pub use error::{Error, Result};
pub use scalar::{Dyadic, NumberSystem, Scalar};
pub use tensor::{IndexId, LabelAlloc, Tensor};
