//! Text front end for `lincong`: a small language for congruence systems and
//! the `lincong` command that counts, enumerates and cross-checks them.

mod cli;
pub mod dsl;
pub mod json;

pub use cli::{run_cli, DEFAULT_CLI_CAP, EXIT_HYPOTHESIS, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
pub use dsl::{parse_system, Diagnostic, SystemDocument};
