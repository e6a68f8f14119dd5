//! CSV serialization: 9-significant-digit scientific notation, `.` decimal
//! separator, LF line endings, deterministic byte-for-byte output.

use std::io::Write;
use std::path::Path;

/// Format one float with 9 significant digits in scientific notation.
/// Non-finite values serialize as `nan` (with sign dropped) so downstream
/// tools see a stable token.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.8e}")
    }
}

/// Accumulates CSV text with LF endings.
#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.buf
    }

    /// Write to `path`, or to standard output when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> std::io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, self.buf.as_bytes()),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(self.buf.as_bytes())
            }
        }
    }
}
