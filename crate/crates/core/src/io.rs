//! File formats: wide panel CSV, its JSON sidecar, and JSON configs.

use crate::error::{Error, Result};
use crate::model::{Panel, PanelConfig};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// Sidecar written next to a panel CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelMeta {
    pub config: PanelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_coeffs: Option<Vec<f64>>,
}

/// `p.csv` → `p.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Header `t,s1,...,sN`, then one row per time index `t = 1..=T`.
/// Floats use Rust's shortest round-trip formatting.
pub fn write_panel_csv<W: Write>(panel: &Panel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = panel.n_series();
    let mut header = Vec::with_capacity(n + 1);
    header.push("t".to_string());
    header.extend((1..=n).map(|i| format!("s{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(n + 1);
    for t in 0..panel.series_len() {
        row.clear();
        row.push((t + 1).to_string());
        row.extend((0..n).map(|i| panel.series(i)[t].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Series read back from a wide CSV, one vector per column `s1..sN`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelColumns {
    pub series: Vec<Vec<f64>>,
}

impl PanelColumns {
    pub fn n_series(&self) -> usize {
        self.series.len()
    }

    pub fn series_len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }
}

pub fn read_panel_csv<R: Read>(input: R) -> Result<PanelColumns> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(Error::Format(
            "panel CSV header must be `t,s1,...,sN`".into(),
        ));
    }
    for (j, h) in header.iter().skip(1).enumerate() {
        if h != format!("s{}", j + 1) {
            return Err(Error::Format(format!(
                "unexpected column `{h}`, expected `s{}`",
                j + 1
            )));
        }
    }
    let n = header.len() - 1;
    let mut series = vec![Vec::new(); n];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, col) in series.iter_mut().enumerate() {
            let field = rec.get(j + 1).unwrap_or("");
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Format(format!(
                    "row {}: bad value `{field}` in s{}",
                    line + 1,
                    j + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Format(format!(
                    "row {}: non-finite value in s{}",
                    line + 1,
                    j + 1
                )));
            }
            col.push(v);
        }
    }
    if series[0].len() < 2 {
        return Err(Error::Format("panel needs at least two time points".into()));
    }
    Ok(PanelColumns { series })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `panel` to `path` and its sidecar next to it.
pub fn save_panel(panel: &Panel, path: &Path) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    write_panel_csv(panel, f)?;
    let meta = PanelMeta {
        config: panel.config.clone(),
        true_coeffs: panel.true_coeffs.clone(),
    };
    write_json(&sidecar_path(path), &meta)
}

pub fn load_panel_columns(path: &Path) -> Result<PanelColumns> {
    read_panel_csv(BufReader::new(File::open(path)?))
}

pub fn load_sidecar(csv_path: &Path) -> Result<Option<PanelMeta>> {
    let p = sidecar_path(csv_path);
    if p.exists() {
        read_json(&p).map(Some)
    } else {
        Ok(None)
    }
}
