use std::path::Path;

use ontb_core::domain_model::SourceMap;
use ontb_core::report::{Diagnostic, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Error,
    Warning,
}

impl From<Severity> for Level {
    fn from(s: Severity) -> Self {
        match s {
            Severity::Error => Level::Error,
            Severity::Warning => Level::Warning,
        }
    }
}

/// Writes `file:line:col: severity: message` lines to stderr.
pub struct Diag {
    color: bool,
}

impl Diag {
    /// Colour is on only when `ONTB_COLOR=1`.
    pub fn from_env() -> Self {
        Diag { color: std::env::var("ONTB_COLOR").is_ok_and(|v| v == "1") }
    }

    pub fn at(&self, file: &Path, pos: Option<(usize, usize)>, level: Level, message: &str) {
        let (word, code) = match level {
            Level::Error => ("error", "31"),
            Level::Warning => ("warning", "33"),
        };
        let word = if self.color { format!("\x1b[1;{code}m{word}\x1b[0m") } else { word.to_string() };
        match pos {
            Some((line, col)) => eprintln!("{}:{line}:{col}: {word}: {message}", file.display()),
            None => eprintln!("{}: {word}: {message}", file.display()),
        }
    }

    /// A domain diagnostic, positioned by its element path.
    pub fn domain(&self, file: &Path, spans: &SourceMap, d: &Diagnostic) {
        let message = format!("{} [{}]", d.message, d.code);
        self.at(file, spans.locate(&d.path).or(Some((1, 1))), d.severity.into(), &format!("{}: {message}", d.path));
    }
}
