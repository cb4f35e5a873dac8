pub mod error;
pub mod exact;
pub mod families;
pub mod lattice;
pub mod pairing;
pub mod phase;
pub mod predictions;
pub mod propagators;
pub mod scenarios;
pub mod symbols;
pub mod window;

pub use error::{Error, Result};
