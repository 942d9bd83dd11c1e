//! Run manifests: flat `key=value` text plus the FNV-1a content digest.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Streaming 64-bit FNV-1a.
#[derive(Debug, Clone, Copy)]
pub struct Fnv1a64(u64);

impl Default for Fnv1a64 {
    fn default() -> Self {
        Fnv1a64(FNV_OFFSET)
    }
}

impl Fnv1a64 {
    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = Fnv1a64::default();
    h.update(bytes);
    h.finish()
}

pub fn digest_file(path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Fnv1a64::default();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Ok(h.finish());
        }
        h.update(&buf[..n]);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub dataset: String,
    pub count: usize,
    pub seed: u64,
    pub augmentation: String,
    pub yona: String,
    pub digest: u64,
}

impl DatasetManifest {
    pub const KEYS: [&'static str; 6] = ["dataset", "count", "seed", "augmentation", "yona", "digest"];

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields: [Option<String>; 6] = Default::default();
        let mut offset = 0u64;
        for (i, line) in text.split_inclusive('\n').enumerate() {
            let start = offset;
            offset += line.len() as u64;
            let line = line.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                offset: start,
                message: format!("manifest line {} has no `=`", i + 1),
            })?;
            let slot = Self::KEYS
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| Error::Format {
                    offset: start,
                    message: format!("unknown manifest key `{key}`"),
                })?;
            fields[slot] = Some(value.to_string());
        }
        let take = |i: usize| {
            fields[i].clone().ok_or_else(|| Error::Format {
                offset: 0,
                message: format!("manifest missing `{}`", Self::KEYS[i]),
            })
        };
        let num = |i: usize, radix: u32| -> Result<u64> {
            let raw = take(i)?;
            u64::from_str_radix(&raw, radix).map_err(|_| Error::Format {
                offset: 0,
                message: format!("bad `{}` value `{raw}`", Self::KEYS[i]),
            })
        };
        Ok(DatasetManifest {
            dataset: take(0)?,
            count: num(1, 10)? as usize,
            seed: num(2, 10)?,
            augmentation: take(3)?,
            yona: take(4)?,
            digest: num(5, 16)?,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for DatasetManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dataset={}", self.dataset)?;
        writeln!(f, "count={}", self.count)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "augmentation={}", self.augmentation)?;
        writeln!(f, "yona={}", self.yona)?;
        writeln!(f, "digest={:016x}", self.digest)
    }
}
