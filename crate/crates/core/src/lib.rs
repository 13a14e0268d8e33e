pub mod characterize;
pub mod demo;
pub mod document;
pub mod error;
pub mod generate;
pub mod measure;
pub mod rational;
pub mod spacetime;
pub mod transport;

pub use error::{Error, Result};
