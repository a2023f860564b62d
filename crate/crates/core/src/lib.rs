pub mod asymptotics;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod extended;
pub mod potential;
pub mod scatter1d;
pub mod surface;
pub mod zeros;

pub use error::{Error, Result};
