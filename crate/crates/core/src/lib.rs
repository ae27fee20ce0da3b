pub mod automata;
pub mod compiler;
pub mod error;
pub mod neurons;
pub mod patterns;
pub mod semigroups;

pub use error::{Error, Result};
