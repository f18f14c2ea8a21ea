//! Configuration, study orchestration and file output behind the `axlab`
//! binary.

pub mod config;
pub mod output;
pub mod run;
pub mod study;

pub use config::{FieldKind, ModeConfig, RunConfig, StudyKind};
