//! Output directory plumbing: writer lock, checksummed manifest, CSV and summary files.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const LOCK_FILE: &str = ".regwatch.lock";
pub const MANIFEST_FILE: &str = "MANIFEST.sha256";

/// Exclusive writer lock on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id()).map_err(|e| CliError::io(&path, e))?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(dir.to_path_buf())),
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        if let Err(e) = fs::remove_file(&self.path) {
            log::warn!("could not remove lock {}: {e}", self.path.display());
        }
    }
}

pub fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let read = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn relative_name(rel: &Path) -> String {
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Writes `MANIFEST.sha256` listing `files` (relative to `dir`) in sorted order.
pub fn write_manifest(dir: &Path, files: &[PathBuf]) -> CliResult<PathBuf> {
    let mut names: Vec<String> = files.iter().map(|f| relative_name(f)).collect();
    names.sort();
    names.dedup();
    let path = dir.join(MANIFEST_FILE);
    let mut out = create_file(&path)?;
    for name in names {
        let digest = sha256_file(&dir.join(&name))?;
        writeln!(out, "{digest}  {name}").map_err(|e| CliError::io(&path, e))?;
    }
    out.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Checks every entry of the manifest in `dir`. Returns `Ok(false)` when there is no manifest.
pub fn verify_manifest(dir: &Path) -> CliResult<bool> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(false);
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    for (line_no, line) in text.lines().enumerate() {
        let (digest, name) = line
            .split_once("  ")
            .ok_or_else(|| CliError::Input(format!("{}:{}: malformed manifest line", path.display(), line_no + 1)))?;
        let file = dir.join(name);
        if sha256_file(&file)? != digest {
            return Err(CliError::Checksum(file));
        }
    }
    Ok(true)
}

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file with a header row and values printed to 17 significant digits.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut out = create_file(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Ordered `key = value` report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_value(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format_value(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut out = create_file(path)?;
        let io = |e| CliError::io(path, e);
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = OutputLock::acquire(dir.path()).unwrap();
        assert!(matches!(OutputLock::acquire(dir.path()), Err(CliError::Locked(_))));
        drop(lock);
        assert!(!dir.path().join(LOCK_FILE).exists());
        OutputLock::acquire(dir.path()).unwrap();
    }

    #[test]
    fn manifest_detects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("sub/a.bin"), b"abc").unwrap();
        fs::write(dir.path().join("b.txt"), b"").unwrap();
        write_manifest(dir.path(), &["sub/a.bin".into(), "b.txt".into()]).unwrap();
        let text = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        // SHA-256 of "abc" and of the empty string
        assert!(text.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad  sub/a.bin"));
        assert!(text.starts_with("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855  b.txt"));
        assert!(verify_manifest(dir.path()).unwrap());
        fs::write(dir.path().join("sub/a.bin"), b"abd").unwrap();
        assert!(matches!(verify_manifest(dir.path()), Err(CliError::Checksum(_))));
    }

    #[test]
    fn csv_uses_seventeen_significant_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_csv(&path, &["t".into(), "e".into()], &[vec![0.1, 1.0 / 3.0]]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let row = text.lines().nth(1).unwrap();
        let back: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
        assert_eq!(row.split(',').next().unwrap(), "1.0000000000000001e-1");
    }
}
