//! Typed experiment reports. CSV is canonical; JSON mirrors it with metadata.

use super::HarnessError;
use serde::Serialize;
use std::path::Path;

/// Fixed six-decimal rendering; non-finite values print as `inf`, `-inf`, `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

/// Shared output behaviour of every report.
pub trait Report: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> String {
        csv_string(&self.header(), &self.rows())
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv()).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
    }

    fn write_json(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_json()).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
    }
}

/// One CSV for several reports of the same kind: first header, all rows.
pub fn combined_csv<R: Report>(reports: &[R]) -> String {
    let header = reports.first().map(Report::header).unwrap_or_default();
    let rows: Vec<Vec<String>> = reports.iter().flat_map(Report::rows).collect();
    csv_string(&header, &rows)
}

/// JSON array mirroring [`combined_csv`].
pub fn combined_json<R: Report>(reports: &[R]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

fn strs<const N: usize>(h: [&str; N]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageScore {
    pub image: String,
    pub trials: usize,
    pub successes: usize,
    /// Fraction of trials with every bit correct.
    pub accuracy: f64,
    pub bit_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub method: String,
    pub suite: Option<String>,
    pub capacity: usize,
    pub seed: u64,
    pub corpus: String,
    pub trials_per_image: usize,
    pub count: usize,
    pub accuracy: f64,
    pub bit_accuracy: f64,
    pub images: Vec<ImageScore>,
}

impl Report for AccuracyReport {
    fn header(&self) -> Vec<String> {
        strs(["method", "suite", "image", "trials", "successes", "accuracy", "bit_accuracy"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let suite = self.suite.clone().unwrap_or_else(|| "none".into());
        let mut rows: Vec<Vec<String>> = self
            .images
            .iter()
            .map(|s| {
                vec![
                    self.method.clone(),
                    suite.clone(),
                    s.image.clone(),
                    s.trials.to_string(),
                    s.successes.to_string(),
                    fmt_f64(s.accuracy),
                    fmt_f64(s.bit_accuracy),
                ]
            })
            .collect();
        rows.push(vec![
            self.method.clone(),
            suite,
            "ALL".into(),
            self.count.to_string(),
            self.images.iter().map(|s| s.successes).sum::<usize>().to_string(),
            fmt_f64(self.accuracy),
            fmt_f64(self.bit_accuracy),
        ]);
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoexCell {
    pub first: String,
    pub second: String,
    pub first_alone: f64,
    pub first_after_second: f64,
    pub second_with_first: f64,
    pub second_alone: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoexistenceMatrix {
    pub methods: Vec<String>,
    pub seed: u64,
    pub corpus: String,
    pub trials_per_image: usize,
    pub count: usize,
    /// Row-major over ordered `(first, second)` pairs, diagonal included.
    pub cells: Vec<CoexCell>,
}

impl CoexistenceMatrix {
    pub fn cell(&self, first: usize, second: usize) -> &CoexCell {
        &self.cells[first * self.methods.len() + second]
    }
}

impl Report for CoexistenceMatrix {
    fn header(&self) -> Vec<String> {
        strs([
            "first",
            "second",
            "first_alone",
            "first_after_second",
            "second_with_first",
            "second_alone",
            "count",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                vec![
                    c.first.clone(),
                    c.second.clone(),
                    fmt_f64(c.first_alone),
                    fmt_f64(c.first_after_second),
                    fmt_f64(c.second_with_first),
                    fmt_f64(c.second_alone),
                    self.count.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteScore {
    pub suite: String,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub mode: String,
    pub strength: f64,
    pub capacity: usize,
    pub accuracy: f64,
    pub mean_psnr: f64,
    pub robustness: Vec<SuiteScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffReport {
    pub ensemble: String,
    pub seed: u64,
    pub corpus: String,
    pub trials_per_image: usize,
    pub count: usize,
    pub suites: Vec<String>,
    pub rows: Vec<TradeoffRow>,
}

impl Report for TradeoffReport {
    fn header(&self) -> Vec<String> {
        let mut h = strs(["mode", "strength", "capacity", "accuracy", "mean_psnr"]);
        h.extend(self.suites.iter().map(|s| format!("robust_{s}")));
        h.push("count".into());
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![
                    r.mode.clone(),
                    fmt_f64(r.strength),
                    r.capacity.to_string(),
                    fmt_f64(r.accuracy),
                    fmt_f64(r.mean_psnr),
                ];
                v.extend(r.robustness.iter().map(|s| fmt_f64(s.accuracy)));
                v.push(self.count.to_string());
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsnrDistribution {
    pub ensemble: String,
    pub seed: u64,
    pub corpus: String,
    pub images: Vec<String>,
    pub series: Vec<f64>,
    pub parallel: Vec<f64>,
    pub mean_series: f64,
    pub mean_parallel: f64,
    pub threshold: f64,
    pub frac_series_above: f64,
    pub frac_parallel_above: f64,
}

impl Report for PsnrDistribution {
    fn header(&self) -> Vec<String> {
        strs(["image", "series_psnr", "parallel_psnr"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .images
            .iter()
            .zip(self.series.iter().zip(&self.parallel))
            .map(|(n, (s, p))| vec![n.clone(), fmt_f64(*s), fmt_f64(*p)])
            .collect();
        rows.push(vec!["MEAN".into(), fmt_f64(self.mean_series), fmt_f64(self.mean_parallel)]);
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_width() {
        assert_eq!(fmt_f64(0.5), "0.500000");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(-1.0 / 3.0), "-0.333333");
    }
}
