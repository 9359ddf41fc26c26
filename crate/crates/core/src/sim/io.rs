use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::DiagnosticsRow;
use crate::error::{Error, Result};
use crate::field_calculus::{Grid, Kind, TensorField};
use crate::generic::{State, ThermalRole};

pub const MAGIC: &[u8; 4] = b"EULG";
pub const FORMAT_VERSION: u32 = 1;
pub const CSV_HEADER: &str =
    "t,E_total,S_total,E_drift_rel,S_production_rate,power_residual,min_theta,min_detF,max_speed";

/// Writes one field: header, then each component's nodes in row-major order.
pub fn write_field(path: &Path, f: &TensorField<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let g = f.grid();
    let mut header = Vec::with_capacity(17);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    header.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    header.extend_from_slice(&(g.n() as u32).to_le_bytes());
    header.push(f.kind().tag());
    w.write_all(&header).map_err(|e| Error::io(path, e))?;
    for x in f.data() {
        w.write_all(&x.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a field written by [`write_field`]; the period is not stored in the
/// binary file and must be supplied.
pub fn read_field(path: &Path, length: f64) -> Result<TensorField<f64>> {
    let bad = |reason: String| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 17 || &bytes[..4] != MAGIC {
        return Err(bad("missing EULG header".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let (d, n) = (u32_at(8) as usize, u32_at(12) as usize);
    let kind = Kind::from_tag(bytes[16]).ok_or_else(|| bad(format!("unknown kind tag {}", bytes[16])))?;
    let grid = Grid::new(d, n, length).map_err(|e| bad(e.to_string()))?;
    let count = grid.len() * kind.components(d);
    let payload = &bytes[17..];
    if payload.len() != 8 * count {
        return Err(bad(format!("expected {} payload bytes, found {}", 8 * count, payload.len())));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    TensorField::from_data(grid, kind, data).map_err(|e| bad(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotField {
    pub name: String,
    pub file: String,
    pub kind: Kind,
}

/// JSON sidecar describing one snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub fields: Vec<SnapshotField>,
    pub time: f64,
    pub step: usize,
    pub config_hash: String,
    pub role: ThermalRole,
    pub length: f64,
}

const FIELD_NAMES: [&str; 4] = ["pi", "F", "Fp", "tau"];

/// Writes `snap_<step>_<field>.bin` for each state block plus `snap_<step>.json`;
/// returns the sidecar path.
pub fn write_snapshot(dir: &Path, step: usize, time: f64, q: &State<f64>, config_hash: &str) -> Result<PathBuf> {
    let mut fields = Vec::new();
    for (name, f) in FIELD_NAMES.iter().zip(q.blocks()) {
        let file = format!("snap_{step:06}_{name}.bin");
        write_field(&dir.join(&file), f)?;
        fields.push(SnapshotField {
            name: name.to_string(),
            file,
            kind: f.kind(),
        });
    }
    let meta = SnapshotMeta {
        fields,
        time,
        step,
        config_hash: config_hash.to_string(),
        role: q.role,
        length: q.grid().length(),
    };
    let path = dir.join(format!("snap_{step:06}.json"));
    let text = serde_json::to_string_pretty(&meta)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Reads a snapshot back from its sidecar.
pub fn read_snapshot(sidecar: &Path) -> Result<(SnapshotMeta, State<f64>)> {
    let text = std::fs::read_to_string(sidecar).map_err(|e| Error::io(sidecar, e))?;
    let meta: SnapshotMeta = serde_json::from_str(&text)?;
    let dir = sidecar.parent().unwrap_or(Path::new("."));
    let mut blocks = Vec::new();
    for name in FIELD_NAMES {
        let entry = meta.fields.iter().find(|f| f.name == name).ok_or_else(|| Error::Snapshot {
            path: sidecar.to_path_buf(),
            reason: format!("field {name} not listed"),
        })?;
        blocks.push(read_field(&dir.join(&entry.file), meta.length)?);
    }
    let mut it = blocks.into_iter();
    let (pi, f, fp, tau) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    let q = State::new(pi, f, fp, tau, meta.role).map_err(|e| Error::Snapshot {
        path: sidecar.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok((meta, q))
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
}
