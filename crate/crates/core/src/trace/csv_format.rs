use std::io::Read;

use serde::Deserialize;

use super::TraceSample;
use crate::error::{Error, Result};

/// Column header of the CSV trace format.
pub const CSV_HEADER: &str = "time_s,vehicle_id,x,y,speed_mps";

#[derive(Debug, Deserialize)]
struct Row {
    time_s: f64,
    vehicle_id: String,
    x: f64,
    y: f64,
    speed_mps: Option<f64>,
}

/// Streaming reader for the CSV trace format (`time_s,vehicle_id,x,y,speed_mps`,
/// empty `speed_mps` allowed). Extra columns are ignored.
pub struct CsvTraceReader<R> {
    reader: csv::Reader<R>,
    headers: csv::StringRecord,
    record: csv::StringRecord,
    source_name: String,
    header_error: Option<Error>,
    done: bool,
}

impl<R: Read> CsvTraceReader<R> {
    pub fn new(reader: R, source_name: impl Into<String>) -> Self {
        let source_name = source_name.into();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let (headers, header_error) = match rdr.headers() {
            Ok(h) => {
                let missing = ["time_s", "vehicle_id", "x", "y", "speed_mps"]
                    .iter()
                    .find(|col| !h.iter().any(|c| c == **col))
                    .map(|col| Error::parse(&source_name, 1, format!("missing column {col:?} (expected {CSV_HEADER})")));
                (h.clone(), missing)
            }
            Err(e) => (csv::StringRecord::new(), Some(Error::parse(&source_name, 1, e.to_string()))),
        };
        CsvTraceReader { reader: rdr, headers, record: csv::StringRecord::new(), source_name, header_error, done: false }
    }

    fn convert(&self, row: Row, line: u64) -> Result<TraceSample> {
        let bad = |what: &str, v: f64| Error::parse(&self.source_name, line, format!("invalid {what} {v}"));
        if !(row.time_s.is_finite() && row.time_s >= 0.0) {
            return Err(bad("time_s", row.time_s));
        }
        if !row.x.is_finite() {
            return Err(bad("x", row.x));
        }
        if !row.y.is_finite() {
            return Err(bad("y", row.y));
        }
        if row.vehicle_id.is_empty() {
            return Err(Error::parse(&self.source_name, line, "empty vehicle_id"));
        }
        Ok(TraceSample { vehicle_id: row.vehicle_id, time_s: row.time_s, x: row.x, y: row.y, speed_mps: row.speed_mps })
    }
}

impl<R: Read> Iterator for CsvTraceReader<R> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if let Some(e) = self.header_error.take() {
            self.done = true;
            return Some(Err(e));
        }
        let item = match self.reader.read_record(&mut self.record) {
            Ok(false) => return None,
            Ok(true) => {
                let line = self.record.position().map_or(0, |p| p.line());
                match self.record.deserialize::<Row>(Some(&self.headers)) {
                    Ok(row) => self.convert(row, line),
                    Err(e) => Err(Error::parse(&self.source_name, line, e.to_string())),
                }
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                Err(Error::parse(&self.source_name, line, e.to_string()))
            }
        };
        if item.is_err() {
            self.done = true;
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Vec<Result<TraceSample>> {
        CsvTraceReader::new(text.as_bytes(), "t.csv").collect()
    }

    #[test]
    fn parses_rows_with_optional_speed() {
        let got: Vec<_> = parse("time_s,vehicle_id,x,y,speed_mps\n0,v1,10,20,5\n1,v1,11,20,\n").into_iter().map(Result::unwrap).collect();
        assert_eq!(got, vec![TraceSample::new("v1", 0.0, 10.0, 20.0).with_speed(5.0), TraceSample::new("v1", 1.0, 11.0, 20.0),]);
    }

    #[test]
    fn header_and_row_errors() {
        assert!(matches!(parse("time,vehicle_id,x,y\n0,a,1,1\n")[0], Err(Error::Parse { line: 1, .. })));
        let got = parse("time_s,vehicle_id,x,y,speed_mps\n0,a,1,1,\n1,a,zz,1,\n2,a,1,1,\n");
        assert_eq!(got.len(), 2);
        match &got[1] {
            Err(Error::Parse { line, .. }) => assert_eq!(*line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse("time_s,vehicle_id,x,y,speed_mps\n-1,a,1,1,\n")[0].is_err());
    }
}
