//! Loaders for the small CSV inputs: AP layouts, hourly counts, rate series.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::series::RateSeries;
use crate::error::{Error, Result};
use crate::spatial::{validate_aps, AccessPoint};

fn read_rows<T: DeserializeOwned, R: Read>(reader: R, name: &str, columns: &[&str]) -> Result<Vec<(u64, T)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(name, 1, e.to_string()))?.clone();
    if let Some(col) = columns.iter().find(|c| !headers.iter().any(|h| h == **c)) {
        return Err(Error::parse(name, 1, format!("missing column {col:?} (expected {})", columns.join(","))));
    }
    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                let row = record.deserialize(Some(&headers)).map_err(|e| Error::parse(name, line, e.to_string()))?;
                out.push((line, row));
            }
            Err(e) => return Err(Error::parse(name, e.position().map_or(0, |p| p.line()), e.to_string())),
        }
    }
    Ok(out)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// AP layout with header `ap_id,x,y`.
pub fn read_aps<R: Read>(reader: R, name: &str) -> Result<Vec<AccessPoint>> {
    let rows: Vec<(u64, AccessPoint)> = read_rows(reader, name, &["ap_id", "x", "y"])?;
    let aps: Vec<AccessPoint> = rows.into_iter().map(|(_, ap)| ap).collect();
    validate_aps(&aps)?;
    Ok(aps)
}

pub fn load_aps(path: &Path) -> Result<Vec<AccessPoint>> {
    read_aps(open(path)?, &path.display().to_string())
}

#[derive(Deserialize)]
struct HourRow {
    hour: u32,
    count: f64,
}

/// Hour-of-day counts with header `hour,count`; every hour 0..23 exactly once.
pub fn read_hourly_counts<R: Read>(reader: R, name: &str) -> Result<Vec<f64>> {
    let rows: Vec<(u64, HourRow)> = read_rows(reader, name, &["hour", "count"])?;
    let mut counts = [None; 24];
    for (line, row) in rows {
        let slot = counts.get_mut(row.hour as usize).ok_or_else(|| Error::parse(name, line, format!("hour {} outside 0..23", row.hour)))?;
        if slot.is_some() {
            return Err(Error::parse(name, line, format!("hour {} listed twice", row.hour)));
        }
        if !(row.count.is_finite() && row.count >= 0.0) {
            return Err(Error::parse(name, line, format!("invalid count {}", row.count)));
        }
        *slot = Some(row.count);
    }
    counts.iter().enumerate().map(|(h, c)| c.ok_or_else(|| Error::parse(name, 0, format!("hour {h} missing")))).collect()
}

pub fn load_hourly_counts(path: &Path) -> Result<Vec<f64>> {
    read_hourly_counts(open(path)?, &path.display().to_string())
}

#[derive(Deserialize)]
struct RateRow {
    bin_start_s: f64,
    mbps: f64,
}

/// Uniform rate series with header `bin_start_s,mbps`.
///
/// The bin width is the spacing of consecutive rows; a single-row series
/// needs `single_bin_seconds`.
pub fn read_rate_series<R: Read>(reader: R, name: &str, single_bin_seconds: Option<f64>) -> Result<RateSeries> {
    let rows: Vec<(u64, RateRow)> = read_rows(reader, name, &["bin_start_s", "mbps"])?;
    let Some((_, first)) = rows.first() else {
        return Err(Error::parse(name, 2, "rate series has no rows"));
    };
    let width = match rows.get(1) {
        Some((_, second)) => second.bin_start_s - first.bin_start_s,
        None => single_bin_seconds.ok_or_else(|| Error::parse(name, 2, "single-row rate series needs an explicit bin width"))?,
    };
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::parse(name, 3, format!("non-increasing bin starts (spacing {width})")));
    }
    let start = first.bin_start_s;
    let mut values = Vec::with_capacity(rows.len());
    for (i, (line, row)) in rows.iter().enumerate() {
        let expect = start + i as f64 * width;
        if (row.bin_start_s - expect).abs() > 1e-6 * width.max(expect.abs()) {
            return Err(Error::parse(name, *line, format!("bins are not uniform: expected start {expect}, got {}", row.bin_start_s)));
        }
        if !(row.mbps.is_finite() && row.mbps >= 0.0) {
            return Err(Error::parse(name, *line, format!("invalid rate {}", row.mbps)));
        }
        values.push(row.mbps);
    }
    let label = Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name).to_string();
    RateSeries::new(label, start, width, values)
}

pub fn load_rate_series(path: &Path, single_bin_seconds: Option<f64>) -> Result<RateSeries> {
    read_rate_series(open(path)?, &path.display().to_string(), single_bin_seconds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aps() {
        let aps = read_aps("ap_id,x,y\nn,0,10\ns,0,-10\n".as_bytes(), "aps.csv").unwrap();
        assert_eq!(aps, vec![AccessPoint::new("n", 0.0, 10.0), AccessPoint::new("s", 0.0, -10.0)]);
        assert!(read_aps("ap_id,x,y\n".as_bytes(), "aps.csv").is_err());
        assert!(matches!(read_aps("id,x,y\na,0,0\n".as_bytes(), "aps.csv"), Err(Error::Parse { .. })));
        assert!(matches!(read_aps("ap_id,x,y\na,0,zz\n".as_bytes(), "aps.csv"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn hourly_counts() {
        let mut text = String::from("hour,count\n");
        for h in (0..24).rev() {
            text.push_str(&format!("{h},{}\n", h * 2));
        }
        let c = read_hourly_counts(text.as_bytes(), "h.csv").unwrap();
        assert_eq!(c[5], 10.0);
        assert!(read_hourly_counts("hour,count\n0,1\n".as_bytes(), "h.csv").is_err());
        assert!(read_hourly_counts("hour,count\n24,1\n".as_bytes(), "h.csv").is_err());
        assert!(read_hourly_counts("hour,count\n0,1\n0,2\n".as_bytes(), "h.csv").is_err());
    }

    #[test]
    fn rate_series() {
        let s = read_rate_series("bin_start_s,mbps\n0,1.5\n3600,2\n7200,0\n".as_bytes(), "mawi.csv", None).unwrap();
        assert_eq!((s.start_s, s.bin_seconds, s.values.clone()), (0.0, 3600.0, vec![1.5, 2.0, 0.0]));
        assert_eq!(s.label, "mawi");
        assert!(read_rate_series("bin_start_s,mbps\n0,1\n10,1\n25,1\n".as_bytes(), "x", None).is_err());
        assert!(read_rate_series("bin_start_s,mbps\n0,1\n".as_bytes(), "x", None).is_err());
        assert!(read_rate_series("bin_start_s,mbps\n0,1\n".as_bytes(), "x", Some(60.0)).is_ok());
        assert!(read_rate_series("bin_start_s,mbps\n0,-1\n1,1\n".as_bytes(), "x", None).is_err());
    }
}
