//! Finite model checking of knowledge bases typed against DOLCE.
//!
//! A KB is loaded from the `.dkb` s-expression format, closed under the
//! derivation rules of the theory, and checked axiom by axiom. Each
//! violation carries a label and the witness binding that falsifies it.

pub mod concepts;
pub mod constitution;
pub mod engine;
pub mod error;
pub mod kb;
pub mod mereology;
pub mod presence;
pub mod quality;
pub mod surface;
pub mod taxonomy;
pub mod timeline;

pub use engine::closure::{close, ClosedKb};
pub use engine::registry::{check_all, explain, replay};
pub use engine::report::{ViolationReport, Value};
pub use kb::{EntityId, KnowledgeBase, Options};
pub use surface::{load_str, parse, print, SourceDocument};
pub use taxonomy::Taxonomy;
pub use timeline::TimeRegion;
