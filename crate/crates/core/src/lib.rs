pub mod analytic;
pub mod concurrence;
pub mod error;
pub mod esd;
pub mod evolution;
pub mod expm;
pub mod liouvillian;
pub mod model;

pub use error::{Error, Result};
