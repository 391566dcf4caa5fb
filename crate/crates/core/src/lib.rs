//! Exact computation in group rings of finite p-groups over p-adic
//! coefficient rings with a lift of Frobenius.

pub mod characters;
pub mod coeffring;
pub mod descent;
pub mod error;
pub mod groupring;
pub mod padiclog;
pub mod pgroup;
pub mod suites;
pub mod zmod;

pub use coeffring::{make_ring, Ring, RingElem, RingKind, RingSpec};
pub use error::{Error, Result};
