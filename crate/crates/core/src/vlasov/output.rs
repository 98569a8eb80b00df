//! Diagnostics CSV and phase-space snapshots.
//!
//! Binary snapshots are raw little-endian `f64` in the in-memory order
//! (`v` slow, `x` fast) with a JSON sidecar next to them.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Diagnostics, PhaseSpace};
use crate::error::{Error, Result};
use crate::kernel::{Boundary, UniformGrid1D};

pub fn write_diagnostics_csv<W: Write>(out: W, series: &[Diagnostics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for d in series {
        w.serialize(d)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SnapshotRow {
    x: f64,
    v: f64,
    f: f64,
}

/// Long-format CSV with columns `x, v, f`.
pub fn write_snapshot_csv<W: Write>(out: W, ps: &PhaseSpace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for m in 0..ps.nv() {
        let v = ps.v_grid.center(m);
        for j in 0..ps.nx() {
            w.serialize(SnapshotRow { x: ps.x_grid.center(j), v, f: ps.at(j, m) })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisMeta {
    pub name: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub boundary: Boundary,
}

impl AxisMeta {
    fn new(name: &str, g: &UniformGrid1D) -> Self {
        Self { name: name.into(), n: g.n_cells, min: g.x_min, max: g.x_max, boundary: g.boundary }
    }

    fn grid(&self) -> Result<UniformGrid1D> {
        UniformGrid1D::new(self.n, self.min, self.max, self.boundary)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub time: f64,
    /// `[n_v, n_x]`, row-major.
    pub shape: [usize; 2],
    pub dtype: String,
    pub byte_order: String,
    /// Slow axis first.
    pub axes: [AxisMeta; 2],
    pub data_file: String,
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `path` (raw data) and `path` with a `.json` extension (metadata).
pub fn write_snapshot_bin(path: &Path, ps: &PhaseSpace, time: f64) -> Result<SnapshotMeta> {
    let mut bytes = Vec::with_capacity(ps.f.len() * 8);
    for v in &ps.f {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let meta = SnapshotMeta {
        time,
        shape: [ps.nv(), ps.nx()],
        dtype: "float64".into(),
        byte_order: "little".into(),
        axes: [AxisMeta::new("v", &ps.v_grid), AxisMeta::new("x", &ps.x_grid)],
        data_file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    fs::write(sidecar(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(meta)
}

pub fn read_snapshot_bin(path: &Path) -> Result<(PhaseSpace, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(sidecar(path))?)?;
    let bytes = fs::read(path)?;
    let len = meta.shape[0] * meta.shape[1];
    if bytes.len() != 8 * len || meta.dtype != "float64" || meta.byte_order != "little" {
        return Err(Error::Config(format!("snapshot {} does not match its sidecar", path.display())));
    }
    let f = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let ps = PhaseSpace { f, v_grid: meta.axes[0].grid()?, x_grid: meta.axes[1].grid()? };
    Ok((ps, meta))
}
