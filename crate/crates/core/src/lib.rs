pub mod bell;
pub mod channels;
pub mod chsh;
pub mod content;
pub mod error;
pub mod family;
pub mod optimize;
pub mod pauli;
pub mod qstate;
pub mod verify;

pub use error::{Error, Result};
