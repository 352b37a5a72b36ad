use std::path::PathBuf;

use clap::Args;
use percussim_core::load_library_file;

use crate::common::PATTERNS_ENV;
use crate::error::CliError;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Pattern library files (TOML). Defaults to the file named by
    /// the pattern library environment variable.
    #[arg(value_name = "FILE", env = PATTERNS_ENV, required = true, num_args = 1..)]
    pub files: Vec<PathBuf>,
}

/// Checks every file and reports each problem; fails if any file failed.
pub fn execute(args: &ValidateArgs) -> Result<(), CliError> {
    let mut failed: Option<i32> = None;
    for path in &args.files {
        match load_library_file(path) {
            Ok(lib) => println!(
                "{}: ok, library `{}` with {} patterns, digest {}",
                path.display(),
                lib.name(),
                lib.len(),
                lib.digest()
            ),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                failed.get_or_insert(CliError::from(e).code());
            }
        }
    }
    match failed {
        None => Ok(()),
        Some(code) => Err(CliError::Reported(code)),
    }
}
