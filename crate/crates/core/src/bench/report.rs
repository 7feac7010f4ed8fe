use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::BenchError;

/// One resolution level of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub elements: usize,
    pub h: f64,
    pub l1_error: f64,
    pub eoc: Option<f64>,
    pub wall_seconds: f64,
}

/// Rows plus `key: value` metadata written as `#` comment lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
}

/// `log(e₀/e₁) / log(h₀/h₁)`.
pub fn eoc_pair(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

impl BenchReport {
    pub fn push(&mut self, elements: usize, h: f64, l1_error: f64, wall_seconds: f64) {
        self.rows.push(ReportRow { elements, h, l1_error, eoc: None, wall_seconds });
        self.annotate_eoc();
    }

    /// Fills in the EOC of every row after the first.
    pub fn annotate_eoc(&mut self) {
        for i in 0..self.rows.len() {
            self.rows[i].eoc = (i > 0).then(|| {
                let (a, b) = (&self.rows[i - 1], &self.rows[i]);
                eoc_pair(a.l1_error, b.l1_error, a.h, b.h)
            });
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_owned(), value.to_string()));
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), BenchError> {
        for (k, v) in &self.metadata {
            for line in v.lines() {
                writeln!(out, "# {k}: {line}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, BenchError> {
        let mut text = String::new();
        let mut metadata = Vec::new();
        for line in input.lines() {
            let line = line?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) = meta.split_once(": ").unwrap_or((meta, ""));
                    metadata.push((k.to_owned(), v.to_owned()));
                }
                None => {
                    text.push_str(&line);
                    text.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<Result<Vec<ReportRow>, _>>()?;
        Ok(Self { metadata, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_examples() {
        let q = eoc_pair(9.86e-3, 3.09e-3, 1.0, 0.5);
        assert!((q - 1.674).abs() < 1e-3, "{q}");
        let s = eoc_pair(4.05e-2, 2.57e-2, 3.48e-1, 2.13e-1);
        assert!((s - 0.93).abs() < 5e-3, "{s}");
        assert_eq!(eoc_pair(1e-3, 1e-3, 1.0, 0.5), 0.0);
    }

    #[test]
    fn first_row_has_no_eoc() {
        let mut r = BenchReport::default();
        r.push(123, 0.2, 1e-2, 0.1);
        assert_eq!(r.rows[0].eoc, None);
        r.push(492, 0.1, 2.5e-3, 0.4);
        assert!((r.rows[1].eoc.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(r.rows[0].eoc, None);
    }

    #[test]
    fn csv_round_trip() {
        let mut r = BenchReport::default();
        r.meta("problem", "manufactured_nonlinear");
        r.meta("wall_time", "solver loop only");
        r.push(123, 0.163_157_894_736_842_1, 9.861_234_567_890_12e-3, 0.012_345_678_901_234_5);
        r.push(492, 0.081_578_947_368_421_05, 3.091_111_111_111_111e-3, 0.1);
        let text = r.to_csv_string();
        assert!(text.contains("elements,h,l1_error,eoc,wall_seconds\n"));
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert!(lines[1].contains(",,"), "empty eoc on the first row: {}", lines[1]);
        let back = BenchReport::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, r);
    }
}
