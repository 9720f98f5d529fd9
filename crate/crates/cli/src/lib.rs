//! Command-line harness for `nccausal-core`: scene files, reports, CSV
//! emission and the invariant suites behind `nccausal verify`.

pub mod commands;
pub mod csv;
pub mod sampling;
pub mod scene;
pub mod verify;

pub use commands::{CommandError, DistanceKind, Output, EXIT_INTERNAL, EXIT_NOT_RELATED, EXIT_OK, EXIT_USAGE};
pub use scene::{Scene, SceneError};
pub use verify::Suite;
