//! On-disk cache for sieved tables.
//!
//! Layout (little-endian): magic `GPAT`, format version `u32`, kind tag `u8`,
//! `X` as `u64`, then the `X + 1` values for `n = 0..=X`. Small kinds store
//! one `i8` per value; the custom kind stores `(re, im)` as two `f64`.

use super::{build_table, ArithTable, FunctionKind, Values};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

pub const CACHE_MAGIC: &[u8; 4] = b"GPAT";
pub const CACHE_VERSION: u32 = 1;

pub fn cache_path(dir: &Path, kind: FunctionKind, x: u64) -> PathBuf {
    dir.join(format!("{}-{x}.gpat", kind.name()))
}

pub fn write_cache(table: &ArithTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("gpat.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&[table.kind().tag()])?;
        w.write_all(&table.upper_bound().to_le_bytes())?;
        match table.values() {
            Values::Small(v) => {
                let bytes: Vec<u8> = v.iter().map(|&b| b as u8).collect();
                w.write_all(&bytes)?;
            }
            Values::Complex(v) => {
                for z in v {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        w.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<ArithTable> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache(format!("{}: bad magic", path.display())));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "{}: unsupported version {version}",
            path.display()
        )));
    }
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let kind = FunctionKind::from_tag(tag[0])
        .ok_or_else(|| Error::Cache(format!("{}: unknown kind tag {}", path.display(), tag[0])))?;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let x = u64::from_le_bytes(b8);
    let len = x as usize + 1;
    let values = match kind {
        FunctionKind::Mobius | FunctionKind::Liouville | FunctionKind::Unit => {
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)?;
            Values::Small(bytes.into_iter().map(|b| b as i8).collect())
        }
        FunctionKind::Custom => {
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                r.read_exact(&mut b8)?;
                let re = f64::from_le_bytes(b8);
                r.read_exact(&mut b8)?;
                let im = f64::from_le_bytes(b8);
                v.push(Complex64::new(re, im));
            }
            Values::Complex(v)
        }
    };
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Cache(format!("{}: trailing bytes", path.display())));
    }
    Ok(ArithTable::from_parts(kind, x, values))
}

/// Returns the cached table for `(kind, X)` if present, otherwise sieves it
/// and writes the cache. Without a cache directory this is just
/// [`build_table`].
pub fn load_or_build(kind: FunctionKind, x: u64, cache_dir: Option<&Path>) -> Result<ArithTable> {
    let Some(dir) = cache_dir else {
        return build_table(kind, x);
    };
    let path = cache_path(dir, kind, x);
    if path.exists() {
        let t = read_cache(&path)?;
        if t.kind() == kind && t.upper_bound() == x {
            return Ok(t);
        }
    }
    let t = build_table(kind, x)?;
    write_cache(&t, &path)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithfn::{sieve_mobius, table_from_multspec};
    use crate::ramare::MultSpec;

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve_mobius(10).unwrap();
        let p = dir.path().join("m.gpat");
        write_cache(&t, &p).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"GPAT");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(bytes[8], 0);
        assert_eq!(u64::from_le_bytes(bytes[9..17].try_into().unwrap()), 10);
        assert_eq!(bytes.len(), 17 + 11);
        assert_eq!(bytes[17 + 6] as i8, 1); // mu(6)
    }

    #[test]
    fn round_trip_and_cache_hit() {
        let dir = tempfile::tempdir().unwrap();
        let a = load_or_build(FunctionKind::Liouville, 5000, Some(dir.path())).unwrap();
        assert!(cache_path(dir.path(), FunctionKind::Liouville, 5000).exists());
        let b = load_or_build(FunctionKind::Liouville, 5000, Some(dir.path())).unwrap();
        assert_eq!(a.small_values(), b.small_values());

        let c = table_from_multspec(&MultSpec::random_unit_disc(3), 300).unwrap();
        let p = dir.path().join("c.gpat");
        write_cache(&c, &p).unwrap();
        let d = read_cache(&p).unwrap();
        assert_eq!(c.complex_values(), d.complex_values());
        assert_eq!(d.kind(), FunctionKind::Custom);
    }

    #[test]
    fn rejects_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.gpat");
        fs::write(&p, b"NOPE....").unwrap();
        assert!(matches!(read_cache(&p), Err(Error::Cache(_))));
    }
}
