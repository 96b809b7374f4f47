//! Library half of the `levykernel` binary, split out so the table format and
//! command logic can be tested without spawning processes.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod kernel;
pub mod table;

pub use error::{CliError, ExitCode};

/// Caps the rayon pool from `LEVYKERNEL_THREADS`. Must run before any parallel work.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LEVYKERNEL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("LEVYKERNEL_THREADS must be a positive integer, got {raw:?}")))?;
    // a second call in the same process (tests) finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
