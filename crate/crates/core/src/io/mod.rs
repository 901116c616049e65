//! Instance and solution serialization, plus the random instance generator.

mod generator;
mod li_lim;
mod native;
mod report;

use thiserror::Error;

use crate::model::ModelError;

pub use generator::{generate_random, generate_with_tour, GeneratorParams};
pub use li_lim::parse_li_lim;
pub use native::{parse_native, write_native};
pub use report::{
    parse_solution, render_text, write_solution, RouteReport, SolutionReport, StopReport,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("invalid generator parameters: {0}")]
    Generator(String),
}

/// Rounds to the six fractional digits kept by the text formats.
pub(crate) fn round6(v: f64) -> f64 {
    if v.is_finite() {
        (v * 1e6).round() / 1e6
    } else {
        v
    }
}
