//! Debug dump of a sampled path: versioned header (magic, dims, grid,
//! seed), then raw little-endian doubles for points, frames, and
//! increments. A diagnostic format, not load-bearing for any estimator.

use std::io::{Read, Write};

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::sde::{FramePath, TimeGrid};

use crate::LabError;

const MAGIC: &[u8; 8] = b"PSPATH01";

pub fn write_path(path: &FramePath, mut w: impl Write) -> Result<(), LabError> {
    let n = path.dim() as u32;
    let amb = path.model.ambient_dim() as u32;
    let m = path.steps() as u32;
    w.write_all(MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&amb.to_le_bytes())?;
    w.write_all(&m.to_le_bytes())?;
    w.write_all(&path.grid.horizon().to_le_bytes())?;
    w.write_all(&path.seed.to_le_bytes())?;
    for i in 0..=path.steps() {
        for x in path.point(i) {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    for i in 0..=path.steps() {
        for x in path.frame(i) {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    for i in 0..path.steps() {
        for x in path.increment(i) {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read a dump back; the increments are replayed through the model, so the
/// reconstructed states must reproduce the stored ones.
pub fn read_path(
    model: &ManifoldModel,
    base: &[f64],
    mut r: impl Read,
) -> Result<FramePath, LabError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::Config("path dump: bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let amb = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let m = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let horizon = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let _seed = u64::from_le_bytes(b8);
    if n != model.dim() || amb != model.ambient_dim() {
        return Err(LabError::Config(
            "path dump: model dimensions mismatch".into(),
        ));
    }
    let grid = TimeGrid::new(horizon, m).map_err(LabError::Core)?;
    let mut points = vec![0.0; (m + 1) * amb];
    for x in points.iter_mut() {
        r.read_exact(&mut b8)?;
        *x = f64::from_le_bytes(b8);
    }
    let mut frames = vec![0.0; (m + 1) * amb * n];
    for x in frames.iter_mut() {
        r.read_exact(&mut b8)?;
        *x = f64::from_le_bytes(b8);
    }
    let mut noise = vec![0.0; m * n];
    for x in noise.iter_mut() {
        r.read_exact(&mut b8)?;
        *x = f64::from_le_bytes(b8);
    }
    let path = FramePath::from_increments(model, base, grid, noise);
    // Replay must agree with the stored states.
    for i in 0..=m {
        for (a, b) in path.point(i).iter().zip(&points[i * amb..(i + 1) * amb]) {
            if (a - b).abs() > 1e-12 {
                return Err(LabError::Config("path dump: replay mismatch".into()));
            }
        }
    }
    Ok(path)
}
