//! Binary pair-spectrum cache ("WSPC1").
//!
//! Layout: the five magic bytes `WSPC1`, then little-endian u64 `k`, `P` and
//! length `L`, then `L` little-endian u32 counts, then a u64 sum-check equal
//! to the sum of the counts modulo 2^64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::reps::{pair_spectrum, PairSpectrum};

pub const MAGIC: &[u8; 5] = b"WSPC1";

/// Environment variable that overrides any configured cache directory.
pub const CACHE_ENV: &str = "CIRCLEFORGE_CACHE";

pub fn write_spectrum<W: Write>(mut w: W, s: &PairSpectrum) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(s.k as u64).to_le_bytes())?;
    w.write_all(&s.p.to_le_bytes())?;
    w.write_all(&(s.counts.len() as u64).to_le_bytes())?;
    let mut sum = 0u64;
    for &c in &s.counts {
        w.write_all(&c.to_le_bytes())?;
        sum = sum.wrapping_add(c as u64);
    }
    w.write_all(&sum.to_le_bytes())?;
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| Error::Cache(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_spectrum<R: Read>(mut r: R) -> Result<PairSpectrum> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(|e| Error::Cache(format!("missing magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("bad magic {magic:?}")));
    }
    let k = read_u64(&mut r)?;
    let p = read_u64(&mut r)?;
    let len = read_u64(&mut r)?;
    let expected = u32::try_from(k)
        .ok()
        .and_then(|k| crate::arith::pow_checked(p, k))
        .and_then(|v| v.checked_mul(2))
        .map(|v| v + 1);
    if expected != Some(len) || len > crate::reps::SPECTRUM_BUDGET {
        return Err(Error::Cache(format!("length {len} inconsistent with k={k}, P={p}")));
    }
    let mut bytes = vec![0u8; len as usize * 4];
    r.read_exact(&mut bytes).map_err(|e| Error::Cache(format!("truncated counts: {e}")))?;
    let counts: Vec<u32> =
        bytes.chunks_exact(4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    let stored = read_u64(&mut r)?;
    let sum = counts.iter().fold(0u64, |acc, &c| acc.wrapping_add(c as u64));
    if stored != sum {
        return Err(Error::Cache(format!("sum-check mismatch: stored {stored}, computed {sum}")));
    }
    Ok(PairSpectrum { k: k as u32, p, counts })
}

/// Resolves the cache directory: the environment variable wins over `configured`.
pub fn cache_dir(configured: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => configured.map(Path::to_path_buf),
    }
}

pub fn cache_path(dir: &Path, k: u32, p: u64) -> PathBuf {
    dir.join(format!("wspc_k{k}_p{p}.bin"))
}

/// Loads the spectrum from `dir` if present and valid, otherwise computes and
/// stores it.
pub fn cached_pair_spectrum(dir: &Path, k: u32, p: u64) -> Result<PairSpectrum> {
    let path = cache_path(dir, k, p);
    if let Ok(f) = File::open(&path) {
        if let Ok(s) = read_spectrum(BufReader::new(f)) {
            if s.k == k && s.p == p {
                return Ok(s);
            }
        }
    }
    let s = pair_spectrum(k, p)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    write_spectrum(BufWriter::new(File::create(&tmp)?), &s)?;
    std::fs::rename(tmp, &path)?;
    Ok(s)
}
