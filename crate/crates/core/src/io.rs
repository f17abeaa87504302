//! File readers and writers for the newline-delimited and CSV artifacts, and
//! the per-run manifest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{parse_snapshot, serialize_notice, serialize_snapshot, AccountSnapshot, ComplianceNotice, NoticeReader};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("input not found: {}", .0.display())]
    Missing(PathBuf),
    #[error("{}: line {line}: {message}", path.display())]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(IoError::Missing(path.to_path_buf())),
        Err(source) => Err(IoError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| IoError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads an event stream. Records with an unknown kind are skipped and
/// counted; any other malformed record is a schema error.
pub fn read_notices(path: &Path) -> Result<(Vec<ComplianceNotice>, usize), IoError> {
    let mut notices = Vec::new();
    let mut skipped = 0;
    for item in NoticeReader::new(open(path)?) {
        match item {
            Ok(n) => notices.push(n),
            Err(e) if e.is_skippable() => {
                log::warn!("{}: {e}", path.display());
                skipped += 1;
            }
            Err(e) => {
                return Err(IoError::Schema {
                    path: path.to_path_buf(),
                    line: e.line(),
                    message: e.to_string(),
                })
            }
        }
    }
    Ok((notices, skipped))
}

pub fn write_notices(path: &Path, notices: &[ComplianceNotice]) -> Result<(), IoError> {
    let mut w = create(path)?;
    for n in notices {
        writeln!(w, "{}", serialize_notice(n)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_snapshots(path: &Path) -> Result<Vec<AccountSnapshot>, IoError> {
    read_lines(path, parse_snapshot)
}

pub fn write_snapshots(path: &Path, snapshots: &[AccountSnapshot]) -> Result<(), IoError> {
    let mut w = create(path)?;
    for s in snapshots {
        writeln!(w, "{}", serialize_snapshot(s)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_lines<T, E: std::fmt::Display>(
    path: &Path,
    parse: impl Fn(&str, usize) -> Result<T, E>,
) -> Result<Vec<T>, IoError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line.trim(), i + 1).map_err(|e| IoError::Schema {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Reads one JSON value per line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    read_lines(path, |s, _| serde_json::from_str::<T>(s))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), IoError> {
    let mut w = create(path)?;
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| io_err(path)(e.into()))?;
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path)(e.into()))?;
    writeln!(w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Writes rows with a header derived from the row type.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes an explicit header followed by string rows. Used where the
/// header must exist even when there are no rows.
pub fn write_csv_records(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, row) in r.deserialize().enumerate() {
        out.push(row.map_err(|e: csv::Error| IoError::Schema {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn sha256_file(path: &Path) -> Result<String, IoError> {
    let mut reader = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = std::io::Read::read(&mut reader, &mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command: inputs with digests, effective
/// parameters and the tool version. Contains no timestamps so that repeated
/// runs produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            parameters,
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), IoError> {
        let files = if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(io_err(path))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            entries
        } else {
            vec![path.to_path_buf()]
        };
        for f in files {
            self.inputs.push(InputDigest {
                sha256: sha256_file(&f)?,
                path: f.display().to_string(),
            });
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<(), IoError> {
        write_json(&dir.join("manifest.json"), self)
    }
}
