pub mod differentials;
pub mod error;
pub mod harness;
pub mod instance;
pub mod moduli;
pub mod numerics;
pub mod surface;
pub mod variations;

pub use error::{Error, Result};
pub use numerics::C64;
