//! Fixed-precision text and JSON output.

use std::io::{self, Write};

use gluing_core::estimates::csv::sig17;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Compact JSON with every float at 17 significant digits; non-finite floats become `null`.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(sig17(value).as_bytes())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Output(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Output(e.to_string()))
}

/// `re+imi` at 17 significant digits; readable back by the complex flag parser.
pub fn complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", sig17(z.re), sig17(z.im.abs()))
}

/// Writes `text` to `path`, or to stdout without one.
pub fn emit(text: &str, path: Option<&str>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("cannot write {p}: {e}"))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(format!("cannot write stdout: {e}"))),
    }
}

/// Human-readable lines: to stdout when the artifact went to a file, to stderr otherwise.
pub fn summary(lines: &[String], artifact_in_file: bool) {
    for l in lines {
        if artifact_in_file {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
}
