//! Exact lattice-level verification of Calabi–Yau threefolds obtained by
//! smoothing two-component SNC varieties glued along a K3 surface.

pub mod certificates;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod polyhedral;
pub mod projectivity;
pub mod scenario;
pub mod serde_int;
pub mod invariants;
pub mod snc;
pub mod wehler;

pub use error::{Error, Result};
