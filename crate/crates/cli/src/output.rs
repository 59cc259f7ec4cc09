use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::args::OutputArgs;
use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "NBPK_OUTPUT_DIR";

/// Where a command writes: the explicit `--output`, else the default
/// directory from the environment, else stdout.
pub fn destination(out: &OutputArgs, command: &str) -> Option<PathBuf> {
    if let Some(p) = &out.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{command}.{}", out.format.extension())))
}

pub fn open(out: &OutputArgs, command: &str) -> Result<Box<dyn Write>, CliError> {
    match destination(out, command) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            Ok(Box::new(BufWriter::new(File::create(&path)?)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_row(w: &mut dyn Write, cells: impl IntoIterator<Item = String>) -> io::Result<()> {
    let line = cells.into_iter().collect::<Vec<_>>().join(",");
    writeln!(w, "{line}")
}
