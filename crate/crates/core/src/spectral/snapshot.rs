//! Field snapshots on disk: `<stem>.bin` holds little-endian `f64` samples,
//! component after component, each in row-major axis order; `<stem>.json`
//! holds `{d, n, L, component_names, time}`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::field::ScalarField;
use super::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub component_names: Vec<String>,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub names: Vec<String>,
    pub components: Vec<ScalarField>,
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("bin"), stem.with_extension("json"))
}

pub fn write_snapshot(stem: &Path, snapshot: &Snapshot) -> Result<()> {
    let first = snapshot
        .components
        .first()
        .ok_or_else(|| Error::InvalidParameter("snapshot without components".into()))?;
    let grid = *first.grid();
    if snapshot.names.len() != snapshot.components.len() {
        return Err(Error::InvalidParameter("one name per component required".into()));
    }
    let mut bytes = Vec::with_capacity(grid.len() * 8 * snapshot.components.len());
    for c in &snapshot.components {
        c.same_grid(first)?;
        for v in c.values() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let header = SnapshotHeader {
        d: grid.dim(),
        n: grid.n(),
        length: grid.length(),
        component_names: snapshot.names.clone(),
        time: snapshot.time,
    };
    let (bin, json) = paths(stem);
    fs::write(bin, bytes)?;
    fs::write(json, serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn read_snapshot(stem: &Path) -> Result<Snapshot> {
    let (bin, json) = paths(stem);
    let header: SnapshotHeader = serde_json::from_str(&fs::read_to_string(json)?)?;
    let grid = GridSpec::new(header.d, header.n, header.length)?;
    let bytes = fs::read(bin)?;
    let per = grid.len() * 8;
    if bytes.len() != per * header.component_names.len() {
        return Err(Error::InvalidParameter(format!(
            "snapshot payload has {} bytes, expected {}",
            bytes.len(),
            per * header.component_names.len()
        )));
    }
    let components = bytes
        .chunks_exact(per)
        .map(|chunk| {
            let values = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect();
            ScalarField::new(grid, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Snapshot { time: header.time, names: header.component_names, components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(2, 8, 3.0).unwrap();
        let a = ScalarField::from_fn(grid, |x| x[0] * 1.5 - x[1]);
        let b = ScalarField::from_fn(grid, |x| (x[0] * x[1]).sin());
        let snap = Snapshot { time: 0.25, names: vec!["u1".into(), "u2".into()], components: vec![a, b] };
        let stem = dir.path().join("snap_0000");
        write_snapshot(&stem, &snap).unwrap();
        assert_eq!(read_snapshot(&stem).unwrap(), snap);

        let raw = fs::read(stem.with_extension("bin")).unwrap();
        assert_eq!(raw.len(), 2 * 64 * 8);
        // first sample of u1 at (-1.5, -1.5)
        assert_eq!(f64::from_le_bytes(raw[..8].try_into().unwrap()), -1.5 * 1.5 + 1.5);
        let header: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
        assert_eq!(header["L"], 3.0);
        assert_eq!(header["component_names"][1], "u2");
    }

    #[test]
    fn truncated_payload_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(2, 8, 1.0).unwrap();
        let stem = dir.path().join("s");
        let snap = Snapshot { time: 0.0, names: vec!["p".into()], components: vec![ScalarField::zeros(grid)] };
        write_snapshot(&stem, &snap).unwrap();
        fs::write(stem.with_extension("bin"), [0u8; 16]).unwrap();
        assert!(read_snapshot(&stem).is_err());
    }
}
