//! Binary corpus cache: magic header, format version, the checksum of the
//! input files it was built from, then the bincode payload.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::Corpus;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 8] = b"RMCORPUS";
pub const CACHE_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 32;

/// SHA-256 over the file names and contents, in the order given.
pub fn input_checksum(files: &[PathBuf]) -> Result<[u8; 32]> {
    let mut h = Sha256::new();
    for f in files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        let bytes = fs::read(f).map_err(|e| Error::io(f, e))?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(h.finalize().into())
}

pub fn write_cache(path: &Path, corpus: &Corpus, checksum: &[u8; 32]) -> Result<()> {
    let payload = bincode::serialize(corpus).map_err(|e| Error::Cache(e.to_string()))?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::with_capacity(HEADER_LEN + payload.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(checksum);
    buf.extend_from_slice(&payload);
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Read a cache. Returns `Ok(None)` when the file is absent, from another
/// format version, or was built from different inputs.
pub fn read_cache(path: &Path, checksum: Option<&[u8; 32]>) -> Result<Option<Corpus>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    if bytes.len() < HEADER_LEN || &bytes[..8] != CACHE_MAGIC {
        return Err(Error::Cache(format!("{} is not a corpus cache", path.display())));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != CACHE_VERSION {
        return Ok(None);
    }
    if let Some(want) = checksum {
        if &bytes[12..44] != want {
            return Ok(None);
        }
    }
    bincode::deserialize(&bytes[HEADER_LEN..])
        .map(Some)
        .map_err(|e| Error::Cache(e.to_string()))
}

/// Checksum recorded in a cache header, if the file is a cache.
pub fn cached_checksum(path: &Path) -> Option<[u8; 32]> {
    let bytes = fs::read(path).ok()?;
    if bytes.len() < HEADER_LEN || &bytes[..8] != CACHE_MAGIC {
        return None;
    }
    bytes[12..44].try_into().ok()
}
