//! Generative floor-plan design with an annual thermal-discomfort evaluator.

pub mod comfort;
pub mod error;
pub mod evaluation;
pub mod generator;
pub mod optimizer;
pub mod plan;
pub mod scenarios;
pub mod thermal;
pub mod weather;

pub use error::{Error, Result};
