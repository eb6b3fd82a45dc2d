//! Field snapshots: raw little-endian `(re, im)` f64 pairs plus a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GpeError, Result};
use crate::grid::{ComplexField, GridSpec, PhysicsParams};

pub const LAYOUT: &str = "z-fastest";
pub const DTYPE: &str = "c128";

/// Sidecar metadata of a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n: usize,
    pub extent: f64,
    pub t: f64,
    pub omega: f64,
    pub beta: f64,
    pub layout: String,
    pub dtype: String,
}

impl SnapshotMeta {
    pub fn new(grid: &GridSpec, t: f64, params: &PhysicsParams) -> Self {
        SnapshotMeta {
            n: grid.n(),
            extent: grid.extent(),
            t,
            omega: params.omega(),
            beta: params.beta(),
            layout: LAYOUT.into(),
            dtype: DTYPE.into(),
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.extent)
    }
}

/// Path of the JSON sidecar belonging to a `.bin` payload.
pub fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

pub fn encode(u: &ComplexField) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * u.data().len());
    for v in u.data() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], grid: GridSpec) -> Result<ComplexField> {
    if bytes.len() != 16 * grid.len() {
        return Err(GpeError::GridMismatch(format!(
            "payload of {} bytes does not hold {} c128 values",
            bytes.len(),
            grid.len()
        )));
    }
    let word = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let data = bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(word(&c[..8]), word(&c[8..])))
        .collect();
    ComplexField::from_vec(grid, data)
}

/// Writes `<bin>` and its sidecar.
pub fn write_snapshot(bin: &Path, u: &ComplexField, t: f64, params: &PhysicsParams) -> Result<()> {
    fs::write(bin, encode(u)).map_err(|e| GpeError::io(bin, e))?;
    let meta = SnapshotMeta::new(u.grid(), t, params);
    let side = sidecar_path(bin);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&side, text + "\n").map_err(|e| GpeError::io(&side, e))
}

/// Reads a snapshot back, checking the sidecar layout tags.
pub fn read_snapshot(bin: &Path) -> Result<(ComplexField, SnapshotMeta)> {
    let side = sidecar_path(bin);
    let text = fs::read_to_string(&side).map_err(|e| GpeError::io(&side, e))?;
    let meta: SnapshotMeta = serde_json::from_str(&text)
        .map_err(|e| GpeError::config(side.display().to_string(), e.to_string()))?;
    if meta.layout != LAYOUT || meta.dtype != DTYPE {
        return Err(GpeError::config(
            side.display().to_string(),
            format!("unsupported layout {}/{}", meta.layout, meta.dtype),
        ));
    }
    let bytes = fs::read(bin).map_err(|e| GpeError::io(bin, e))?;
    let field = decode(&bytes, meta.grid()?)?;
    if !field.is_finite() {
        return Err(GpeError::InvalidParams(format!("{} holds non-finite amplitudes", bin.display())));
    }
    Ok((field, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_little_endian_pairs() {
        let g = GridSpec::new(2, 1.0).unwrap();
        let mut u = ComplexField::zeros(g);
        u.data_mut()[0] = Complex64::new(1.0, -2.0);
        let b = encode(&u);
        assert_eq!(b.len(), 16 * 8);
        assert_eq!(&b[..8], &1.0f64.to_le_bytes());
        assert_eq!(&b[8..16], &(-2.0f64).to_le_bytes());
        assert_eq!(decode(&b, g).unwrap(), u);
        assert!(decode(&b[..16], g).is_err());
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(4, 2.0).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::new(x[0], x[1] * x[2]));
        let p = PhysicsParams::new(1.5, 0.25).unwrap();
        let bin = dir.path().join("snap.bin");
        write_snapshot(&bin, &u, 0.125, &p).unwrap();
        let (v, meta) = read_snapshot(&bin).unwrap();
        assert_eq!(v, u);
        assert_eq!(meta, SnapshotMeta::new(&g, 0.125, &p));
        assert_eq!(meta.layout, "z-fastest");
    }

    #[test]
    fn missing_sidecar_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("lonely.bin");
        fs::write(&bin, [0u8; 16]).unwrap();
        assert!(matches!(read_snapshot(&bin), Err(GpeError::Io { .. })));
    }
}
