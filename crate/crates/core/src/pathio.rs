//! Sample-path export and import.
//!
//! Two formats:
//! - CSV with header `index,time,value` (values printed shortest-roundtrip,
//!   so a read-back reproduces the same f64 bits);
//! - a self-describing little-endian binary layout:
//!   magic `LFSM`, u32 version, u64 sample count, f64 dt, f64 hurst,
//!   f64 alpha, u64 seed, then the raw f64 samples. Round-trips bit-exactly.

use crate::synth::{Provenance, SamplePath};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

const MAGIC: [u8; 4] = *b"LFSM";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PathIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic: not an lfsm binary path file")]
    BadMagic,
    #[error("unsupported binary version {0}")]
    BadVersion(u32),
    #[error("malformed csv at line {line}: {reason}")]
    BadCsv { line: usize, reason: String },
    #[error("path file holds no samples")]
    Empty,
}

fn header_fields(path: &SamplePath) -> (f64, f64, u64) {
    match &path.provenance {
        Provenance::Synthesized { spec, grid } => (spec.hurst(), spec.alpha(), grid.seed),
        Provenance::Imported { hurst, alpha, seed } => (*hurst, *alpha, *seed),
        Provenance::External => (f64::NAN, f64::NAN, 0),
    }
}

pub fn write_csv<W: Write>(path: &SamplePath, out: W) -> Result<(), PathIoError> {
    let mut w = BufWriter::new(out);
    writeln!(w, "index,time,value")?;
    for (i, v) in path.values.iter().enumerate() {
        writeln!(w, "{},{},{}", i, i as f64 * path.dt, v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<SamplePath, PathIoError> {
    let reader = BufReader::new(input);
    let mut values = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let bad = |reason: &str| PathIoError::BadCsv {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let _index = cols.next().ok_or_else(|| bad("missing index column"))?;
        let time: f64 = cols
            .next()
            .ok_or_else(|| bad("missing time column"))?
            .trim()
            .parse()
            .map_err(|_| bad("unparseable time"))?;
        let value: f64 = cols
            .next()
            .ok_or_else(|| bad("missing value column"))?
            .trim()
            .parse()
            .map_err(|_| bad("unparseable value"))?;
        times.push(time);
        values.push(value);
    }
    if values.is_empty() {
        return Err(PathIoError::Empty);
    }
    let dt = if times.len() >= 2 {
        times[1] - times[0]
    } else {
        1.0
    };
    Ok(SamplePath {
        dt: if dt > 0.0 { dt } else { 1.0 },
        values,
        provenance: Provenance::External,
    })
}

pub fn write_bin<W: Write>(path: &SamplePath, out: W) -> Result<(), PathIoError> {
    let mut w = BufWriter::new(out);
    let (hurst, alpha, seed) = header_fields(path);
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(path.values.len() as u64).to_le_bytes())?;
    w.write_all(&path.dt.to_le_bytes())?;
    w.write_all(&hurst.to_le_bytes())?;
    w.write_all(&alpha.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    for v in &path.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bin<R: Read>(input: R) -> Result<SamplePath, PathIoError> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(PathIoError::BadMagic);
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(PathIoError::BadVersion(version));
    }
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let dt = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let hurst = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let alpha = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let seed = u64::from_le_bytes(b8);
    if n == 0 {
        return Err(PathIoError::Empty);
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok(SamplePath {
        dt,
        values,
        provenance: Provenance::Imported { hurst, alpha, seed },
    })
}

/// Dispatch on extension: `.bin` binary, anything else CSV.
pub fn read_path_file(p: &Path) -> Result<SamplePath, PathIoError> {
    let f = std::fs::File::open(p)?;
    if p.extension().and_then(|e| e.to_str()) == Some("bin") {
        read_bin(f)
    } else {
        read_csv(f)
    }
}

pub fn write_path_file(path: &SamplePath, p: &Path) -> Result<(), PathIoError> {
    let f = std::fs::File::create(p)?;
    if p.extension().and_then(|e| e.to_str()) == Some("bin") {
        write_bin(path, f)
    } else {
        write_csv(path, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synthesize_lfsm, LfsmSpec, SynthesisGrid};

    fn sample() -> SamplePath {
        let spec = LfsmSpec::new(0.7, 1.5).unwrap();
        let grid = SynthesisGrid::new(64, 9).with_mesh(4, 8).with_dt(0.25);
        synthesize_lfsm(&spec, &grid).unwrap()
    }

    #[test]
    fn binary_roundtrip_is_bit_exact() {
        let path = sample();
        let mut buf = Vec::new();
        write_bin(&path, &mut buf).unwrap();
        let back = read_bin(&buf[..]).unwrap();
        assert_eq!(back.values.len(), path.values.len());
        for (a, b) in path.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.dt.to_bits(), path.dt.to_bits());
        match back.provenance {
            Provenance::Imported { hurst, alpha, seed } => {
                assert_eq!(hurst, 0.7);
                assert_eq!(alpha, 1.5);
                assert_eq!(seed, 9);
            }
            other => panic!("unexpected provenance {other:?}"),
        }
    }

    #[test]
    fn csv_roundtrip_preserves_values() {
        let path = sample();
        let mut buf = Vec::new();
        write_csv(&path, &mut buf).unwrap();
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.values.len(), path.values.len());
        // shortest-roundtrip printing makes this exact, not approximate
        for (a, b) in path.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.dt, 0.25);
    }

    #[test]
    fn rejects_foreign_binary() {
        let garbage = b"PNG\x0d123456789";
        assert!(matches!(
            read_bin(&garbage[..]),
            Err(PathIoError::BadMagic)
        ));
    }

    #[test]
    fn rejects_malformed_csv() {
        let text = "index,time,value\n0,abc,1.0\n";
        assert!(matches!(
            read_csv(text.as_bytes()),
            Err(PathIoError::BadCsv { line: 2, .. })
        ));
        assert!(matches!(
            read_csv("index,time,value\n".as_bytes()),
            Err(PathIoError::Empty)
        ));
    }
}
