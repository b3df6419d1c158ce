//! Sandpile monoids and sandpile groups on finite directed multigraphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: the [`MultiDigraph`] model (with a designated sink), its text
//!   format, closures and the sink-augmented subgraphs used throughout.
//! - [`components`]: cyclic strong components, their reachability poset and
//!   the filters on it.
//! - [`engine`]: configurations, stabilization, `⊕`, `MAX`, the group
//!   identity and recurrence.
//! - [`monoid`]: exhaustive enumeration, the idempotents and their maximal
//!   subgroups.
//! - [`checker`]: abstract finite commutative monoids and obstructions to
//!   realising them as sandpile monoids.
//! - [`sdr`]: sink-distance-regular digraphs and the closed-form identity.
//! - [`families`]: deterministic graph constructors.

pub mod checker;
pub mod components;
pub mod engine;
mod error;
pub mod families;
pub mod graph;
pub mod monoid;
pub mod sdr;

pub use components::{ComponentPoset, Filter};
pub use engine::{Config, Stabilized, TopplePolicy};
pub use error::{Error, Result};
pub use graph::{MultiDigraph, Subgraph, VertexSet};
pub use monoid::{Caps, IdempotentRecord, MonoidEnumeration};
