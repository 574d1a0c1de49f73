pub mod cli;
pub mod error;
pub mod ladders2d;
pub mod opalg;
pub mod osc3d;
pub mod su2;
pub mod symx;
pub mod verify;

pub use error::{Error, Result};
