//! Snapshot persistence: one JSON header plus raw little-endian `f64` arrays
//! per snapshot, and an `index.json` listing them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BalanceSample, Field, Geometry, Grid, Scheme, Snapshot, SnapshotSeries, StepStats};
use crate::error::{Error, Result};
use crate::model::NondimParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub index: usize,
    pub t: f64,
    pub rate: f64,
    pub params: NondimParams,
    pub grid: Grid,
    pub seed: u64,
    pub scheme: Scheme,
    pub u_file: String,
    pub v_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesIndex {
    pub params: NondimParams,
    pub grid: Grid,
    pub seed: u64,
    pub scheme: Scheme,
    pub settled: bool,
    pub stats: StepStats,
    pub snapshots: Vec<String>,
    pub times: Vec<f64>,
    pub balance: Vec<BalanceSample>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_f64(path: &Path, data: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 * data.len());
    for x in data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn read_f64(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(io_err(path, "length is not a multiple of 8"));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, s + "\n").map_err(|e| io_err(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&s).map_err(|e| io_err(path, e))
}

/// Writes `series` under `dir` (created if needed) and returns the files written.
pub fn write_series(dir: &Path, series: &SnapshotSeries) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    let mut names = Vec::new();
    for (k, s) in series.snapshots.iter().enumerate() {
        let stem = format!("snap_{k:05}");
        let header = SnapshotHeader {
            index: k,
            t: s.t,
            rate: s.rate,
            params: series.params,
            grid: series.grid,
            seed: series.seed,
            scheme: series.scheme,
            u_file: format!("{stem}_u.f64"),
            v_file: format!("{stem}_v.f64"),
        };
        let hp = dir.join(format!("{stem}.json"));
        write_json(&hp, &header)?;
        let up = dir.join(&header.u_file);
        let vp = dir.join(&header.v_file);
        write_f64(&up, &s.field.u)?;
        write_f64(&vp, &s.field.v)?;
        written.extend([hp, up, vp]);
        names.push(format!("{stem}.json"));
    }
    let index = SeriesIndex {
        params: series.params,
        grid: series.grid,
        seed: series.seed,
        scheme: series.scheme,
        settled: series.settled,
        stats: series.stats,
        snapshots: names,
        times: series.times(),
        balance: series.balance.clone(),
    };
    let ip = dir.join("index.json");
    write_json(&ip, &index)?;
    written.push(ip);
    Ok(written)
}

pub fn read_series(dir: &Path) -> Result<SnapshotSeries> {
    let index: SeriesIndex = read_json(&dir.join("index.json"))?;
    let mut snapshots = Vec::with_capacity(index.snapshots.len());
    for name in &index.snapshots {
        let h: SnapshotHeader = read_json(&dir.join(name))?;
        let u = read_f64(&dir.join(&h.u_file))?;
        let v = read_f64(&dir.join(&h.v_file))?;
        if u.len() != index.grid.len() || v.len() != index.grid.len() {
            return Err(Error::GridMismatch);
        }
        snapshots.push(Snapshot {
            t: h.t,
            field: Field { u, v },
            rate: h.rate,
        });
    }
    Ok(SnapshotSeries {
        params: index.params,
        grid: index.grid,
        scheme: index.scheme,
        seed: index.seed,
        snapshots,
        balance: index.balance,
        stats: index.stats,
        settled: index.settled,
    })
}

/// `x,u,v` (or `r,u,v`) for 1D and radial grids; the middle row `y = Ly/2` for rectangles.
pub fn profile_csv(grid: &Grid, field: &Field) -> String {
    let head = if grid.geometry == Geometry::Radial { "r,u,v\n" } else { "x,u,v\n" };
    let mut s = String::from(head);
    let row = grid.n[1] / 2;
    let nx = grid.n[0];
    for i in 0..nx {
        let k = row * nx + i;
        s.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", grid.x(i), field.u[k], field.v[k]));
    }
    s
}

/// Full 2D field as `x,y,u,v` rows.
pub fn field_csv(grid: &Grid, field: &Field) -> String {
    let mut s = String::from("x,y,u,v\n");
    let [nx, ny] = grid.n;
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            s.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                grid.x(i),
                if ny > 1 { grid.y(j) } else { 0.0 },
                field.u[k],
                field.v[k]
            ));
        }
    }
    s
}
