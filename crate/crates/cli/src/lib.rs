//! Pipeline orchestration behind the `ventplan` command.

pub mod failure;
pub mod output;
pub mod pipeline;
pub mod project;
pub mod svg;

pub use failure::{CliResult, Failure, FailureKind};
pub use pipeline::Layout;
pub use project::{Project, ProjectFile};
