pub mod algebra;
pub mod error;
pub mod legendrian;
pub mod modifications;
pub mod pipeline;
pub mod certify;
pub mod persist;

pub use error::{Error, Result};
