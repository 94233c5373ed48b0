//! Library half of the `groves` binary: argument-independent command logic
//! and the report format, so tests can drive both without a subprocess.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

use rayon::prelude::*;

pub use error::{CliError, CliResult};
pub use report::{Exact, Report};

/// Order-preserving parallel map that stops at the first error in order.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> CliResult<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> CliResult<U> + Send + Sync,
{
    items.par_iter().map(f).collect()
}
