use std::io::{self, BufRead};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::TraceSample;
use crate::error::{Error, Result};

/// Counts newlines as the XML reader consumes input.
struct LineCounter<R> {
    inner: R,
    line: u64,
}

impl<R: BufRead> io::Read for LineCounter<R> {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(out)?;
        self.line += out[..n].iter().filter(|&&b| b == b'\n').count() as u64;
        Ok(n)
    }
}

impl<R: BufRead> BufRead for LineCounter<R> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        if let Ok(buf) = self.inner.fill_buf() {
            let amt = amt.min(buf.len());
            self.line += buf[..amt].iter().filter(|&&b| b == b'\n').count() as u64;
        }
        self.inner.consume(amt);
    }
}

/// Streaming reader for `<timestep time=".."><vehicle id x y speed/></timestep>`
/// markup. Elements and attributes other than those are skipped.
pub struct FcdReader<R: BufRead> {
    reader: Reader<LineCounter<R>>,
    buf: Vec<u8>,
    source_name: String,
    timestep: Option<f64>,
    done: bool,
}

impl<R: BufRead> FcdReader<R> {
    pub fn new(inner: R, source_name: impl Into<String>) -> Self {
        let mut reader = Reader::from_reader(LineCounter { inner, line: 0 });
        reader.config_mut().trim_text(true);
        FcdReader { reader, buf: Vec::new(), source_name: source_name.into(), timestep: None, done: false }
    }

    fn location(&self) -> (u64, u64) {
        (self.reader.get_ref().line + 1, self.reader.buffer_position())
    }

    fn error(&self, message: impl std::fmt::Display) -> Error {
        let (line, offset) = self.location();
        Error::parse(&self.source_name, line, format!("{message} (byte offset {offset})"))
    }

    fn timestep_time(&self, e: &BytesStart<'_>) -> Result<f64> {
        let mut time = None;
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.error(err))?;
            if attr.key.as_ref() == b"time" {
                let v = attr.unescape_value().map_err(|err| self.error(err))?;
                time = Some(self.number(&v, "time")?);
            }
        }
        let t = time.ok_or_else(|| self.error("timestep without time attribute"))?;
        if t < 0.0 {
            return Err(self.error(format!("negative timestep time {t}")));
        }
        Ok(t)
    }

    fn vehicle(&self, e: &BytesStart<'_>, time_s: f64) -> Result<TraceSample> {
        let (mut id, mut x, mut y, mut speed) = (None, None, None, None);
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.error(err))?;
            let v = attr.unescape_value().map_err(|err| self.error(err))?;
            match attr.key.as_ref() {
                b"id" => id = Some(v.into_owned()),
                b"x" => x = Some(self.number(&v, "x")?),
                b"y" => y = Some(self.number(&v, "y")?),
                b"speed" => speed = Some(self.number(&v, "speed")?),
                _ => {}
            }
        }
        let vehicle_id = id.filter(|s| !s.is_empty()).ok_or_else(|| self.error("vehicle without id"))?;
        let x = x.ok_or_else(|| self.error(format!("vehicle {vehicle_id} without x")))?;
        let y = y.ok_or_else(|| self.error(format!("vehicle {vehicle_id} without y")))?;
        Ok(TraceSample { vehicle_id, time_s, x, y, speed_mps: speed })
    }

    fn number(&self, raw: &str, what: &str) -> Result<f64> {
        match raw.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(format!("invalid {what} value {raw:?}"))),
        }
    }

    fn next_sample(&mut self) -> Result<Option<TraceSample>> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev.into_owned(),
                Err(err) => return Err(self.error(err)),
            };
            match event {
                Event::Start(e) if e.name().as_ref() == b"timestep" => {
                    self.timestep = Some(self.timestep_time(&e)?);
                }
                Event::Empty(e) if e.name().as_ref() == b"timestep" => {
                    self.timestep_time(&e)?;
                }
                Event::End(e) if e.name().as_ref() == b"timestep" => {
                    self.timestep = None;
                }
                Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"vehicle" => {
                    let t = self.timestep.ok_or_else(|| self.error("vehicle element outside a timestep"))?;
                    return self.vehicle(&e, t).map(Some);
                }
                Event::Eof => {
                    if self.timestep.is_some() {
                        return Err(self.error("unterminated timestep element"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for FcdReader<R> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_sample() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
