pub mod budget;
pub mod checks;
pub mod clifford;
pub mod error;
pub mod field;
pub mod functor;
pub mod linalg;
pub mod lipschitz;
pub mod metric;
pub mod ortho;
pub mod projective;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
