//! Large-h asymptotics of quartic anharmonic oscillators.

pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod quad;
pub mod series;
pub mod specfun;
pub mod tunneling;

pub use error::{Error, Result};
pub use model::{Case, Convention, LevelIndex, PotentialSpec};
