//! Risk and collision probability over time, stored as CSV.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 3] = ["time_s", "risk", "poc"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub risk: f64,
    pub poc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RiskTimeSeries {
    pub rows: Vec<SeriesRow>,
}

impl RiskTimeSeries {
    pub fn push(&mut self, t: f64, risk: f64, poc: f64) {
        self.rows.push(SeriesRow { t, risk, poc });
    }

    /// Row with the largest risk; the earliest one on ties.
    pub fn peak(&self) -> Option<SeriesRow> {
        self.rows
            .iter()
            .copied()
            .reduce(|best, r| if r.risk > best.risk { r } else { best })
    }

    /// Row whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> Option<SeriesRow> {
        self.rows
            .iter()
            .copied()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(CliError::Validation(
                "times must be strictly increasing".into(),
            ));
        }
        if let Some(r) = self
            .rows
            .iter()
            .find(|r| !((0.0..=1.0).contains(&r.poc) && r.risk >= 0.0))
        {
            return Err(CliError::Validation(format!(
                "row at t = {} has risk {} and poc {}",
                r.t, r.risk, r.poc
            )));
        }
        Ok(())
    }

    /// Seventeen significant digits, so reading the file back is exact.
    pub fn write_to<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.write_record([
                format!("{:.16e}", r.t),
                format!("{:.16e}", r.risk),
                format!("{:.16e}", r.poc),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> CliResult<Self> {
        let mut r = csv::Reader::from_reader(input);
        let bad = |msg: String| CliError::Config(format!("time series: {msg}"));
        let header = r.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().ne(HEADER) {
            return Err(bad(format!("expected header {}", HEADER.join(","))));
        }
        let mut series = Self::default();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let v = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| bad(format!("'{f}': {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            match v[..] {
                [t, risk, poc] => series.push(t, risk, poc),
                _ => return Err(bad(format!("expected 3 fields, got {}", v.len()))),
            }
        }
        Ok(series)
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| CliError::io(path, e.into()))
    }

    pub fn read_csv(path: &Path) -> CliResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut s = RiskTimeSeries::default();
        s.push(-1.25, 0.0, 0.0);
        s.push(0.1 + 0.2, 3.3e5 / 7.0, 1.0 / 3.0);
        s.push(2.0, 5e-324, 1.0);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time_s,risk,poc\n"));
        let back = RiskTimeSeries::read_from(&buf[..]).unwrap();
        for (a, b) in s.rows.iter().zip(&back.rows) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.risk.to_bits(), b.risk.to_bits());
            assert_eq!(a.poc.to_bits(), b.poc.to_bits());
        }
    }

    #[test]
    fn peak_and_invariants() {
        let mut s = RiskTimeSeries::default();
        s.push(0.0, 1.0, 0.1);
        s.push(0.1, 3.0, 0.2);
        s.push(0.2, 3.0, 0.3);
        assert_eq!(s.peak().unwrap().t, 0.1);
        assert_eq!(s.nearest(0.17).unwrap().t, 0.2);
        assert!(s.validate().is_ok());
        s.push(0.2, 1.0, 0.5);
        assert!(s.validate().is_err());
    }

    #[test]
    fn rejects_wrong_header() {
        let err = RiskTimeSeries::read_from("t,risk,poc\n0,0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }
}
