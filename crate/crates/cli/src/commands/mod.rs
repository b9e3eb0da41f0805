pub mod bounds;
pub mod prior_mc;
pub mod simulate;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Buffered writer to `path`, or to stdout when no path is given.
pub(crate) fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub(crate) fn output_error(path: Option<&Path>, e: io::Error) -> CliError {
    CliError::io(path.unwrap_or(Path::new("<stdout>")), e)
}
