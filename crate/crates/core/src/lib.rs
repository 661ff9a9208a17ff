//! Bounded-rank positive semidefinite matrix completion over graphs.

pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod partial;
pub mod bridges;
pub mod completion;
pub mod sdp;

pub use error::{Error, Result};
