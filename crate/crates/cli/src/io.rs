use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::diag::{Diag, Level};
use crate::Status;

pub fn read(diag: &Diag, path: &Path) -> Result<String, Status> {
    fs::read_to_string(path).map_err(|e| {
        diag.at(path, None, Level::Error, &format!("cannot read: {e}"));
        Status::Input
    })
}

/// Write every file through a temporary sibling and rename it into place.
/// All temporaries are written before the first rename, so an I/O failure
/// leaves the previous outputs untouched.
pub fn write_all(diag: &Diag, files: &[(PathBuf, String)]) -> Result<(), Status> {
    let fail = |path: &Path, e: std::io::Error| {
        diag.at(path, None, Level::Error, &format!("cannot write: {e}"));
        Status::Input
    };
    let mut staged = Vec::with_capacity(files.len());
    for (path, text) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir).map_err(|e| fail(path, e))?;
        let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| fail(path, e))?;
        tmp.write_all(text.as_bytes()).map_err(|e| fail(path, e))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| fail(path, e.error))?;
    }
    Ok(())
}
