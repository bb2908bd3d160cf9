//! Content-addressed result cache.
//!
//! An entry file is `<key>.entry` holding one header line
//! `gorext-cache 1 <sha256 of payload>` followed by the payload bytes. An
//! entry whose header or digest does not check out is never served.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

const MAGIC: &str = "gorext-cache 1";

pub struct Cache {
    dir: PathBuf,
}

pub enum Lookup {
    Hit(Vec<u8>),
    Miss,
    /// Present but unreadable or failing its digest.
    Corrupt(String),
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key over length-prefixed parts, so part boundaries cannot collide.
pub fn key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.entry"))
    }

    pub fn get(&self, key: &str) -> Lookup {
        let bytes = match fs::read(self.path(key)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        let Some(nl) = bytes.iter().position(|&b| b == b'\n') else {
            return Lookup::Corrupt("missing header".into());
        };
        let header = String::from_utf8_lossy(&bytes[..nl]);
        let payload = &bytes[nl + 1..];
        match header.strip_prefix(MAGIC).map(str::trim) {
            Some(d) if d == digest(payload) => Lookup::Hit(payload.to_vec()),
            Some(_) => Lookup::Corrupt("digest mismatch".into()),
            None => Lookup::Corrupt("bad header".into()),
        }
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place, so readers never see a partial entry.
    pub fn put(&self, key: &str, payload: &[u8]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "{MAGIC} {}", digest(payload))?;
            f.write_all(payload)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    fn entries(&self) -> std::io::Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        match fs::read_dir(&self.dir) {
            Ok(rd) => {
                for e in rd {
                    let p = e?.path();
                    if p.extension().is_some_and(|x| x == "entry") {
                        out.push(p);
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        out.sort();
        Ok(out)
    }

    /// `(entry count, total bytes)`.
    pub fn stats(&self) -> std::io::Result<(usize, u64)> {
        let entries = self.entries()?;
        let bytes = entries.iter().map(|p| fs::metadata(p).map_or(0, |m| m.len())).sum();
        Ok((entries.len(), bytes))
    }

    pub fn purge(&self) -> std::io::Result<usize> {
        let entries = self.entries()?;
        for p in &entries {
            fs::remove_file(p)?;
        }
        Ok(entries.len())
    }
}
