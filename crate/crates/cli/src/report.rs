//! Run reports and their three renderings. JSON and CSV carry numbers at 12
//! significant digits and parse back into [`Report`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub key: String,
    /// One entry per report column; `None` marks an undefined value.
    pub values: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// True iff every asserted check passed.
    pub pass: bool,
    /// Header of the key column.
    pub key: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Diagnostic findings; never affect `pass`.
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Rounds to 12 significant digits; non-finite values become `None`.
pub fn round12(x: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    format!("{x:.11e}").parse().ok()
}

impl Report {
    pub fn new(command: &str, key: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            pass: true,
            key: key.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, values: &[f64], pass: Option<bool>) {
        debug_assert_eq!(values.len(), self.columns.len());
        if pass == Some(false) {
            self.pass = false;
        }
        self.rows.push(Row { key: key.into(), values: values.iter().map(|v| round12(*v)).collect(), pass });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn has_pass_column(&self) -> bool {
        self.rows.iter().any(|r| r.pass.is_some())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialise") + "\n",
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.key.clone()];
        header.extend(self.columns.iter().cloned());
        let with_pass = self.has_pass_column();
        if with_pass {
            header.push("pass".into());
        }
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec = vec![row.key.clone()];
            rec.extend(row.values.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            if with_pass {
                rec.push(row.pass.map(|p| p.to_string()).unwrap_or_default());
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Rebuilds the tabular part of a report from its CSV rendering.
    /// The command name, overall verdict and notes are not part of the CSV.
    pub fn from_csv(command: &str, text: &str) -> Result<Report, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
        let (key, rest) = header.split_first().ok_or("empty header")?;
        let with_pass = rest.last().map(|s| s == "pass").unwrap_or(false);
        let columns: Vec<String> = if with_pass { rest[..rest.len() - 1].to_vec() } else { rest.to_vec() };
        let mut report =
            Report { command: command.into(), pass: true, key: key.clone(), columns, rows: vec![], notes: vec![] };
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let field = |i: usize| rec.get(i).ok_or_else(|| format!("row {}: missing column {i}", line + 2));
            let mut values = Vec::with_capacity(report.columns.len());
            for i in 0..report.columns.len() {
                let s = field(i + 1)?;
                values.push(if s.is_empty() {
                    None
                } else {
                    Some(
                        s.parse::<f64>()
                            .map_err(|e| format!("row {}, column `{}`: {e}", line + 2, report.columns[i]))?,
                    )
                });
            }
            let pass = if with_pass {
                match field(report.columns.len() + 1)? {
                    "" => None,
                    s => Some(s.parse::<bool>().map_err(|e| format!("row {}, column `pass`: {e}", line + 2))?),
                }
            } else {
                None
            };
            if pass == Some(false) {
                report.pass = false;
            }
            report.rows.push(Row { key: rec[0].to_string(), values, pass });
        }
        Ok(report)
    }

    pub fn to_table(&self) -> String {
        let with_pass = self.has_pass_column();
        let mut cells: Vec<Vec<String>> = Vec::with_capacity(self.rows.len() + 1);
        let mut header = vec![self.key.clone()];
        header.extend(self.columns.iter().cloned());
        if with_pass {
            header.push("pass".into());
        }
        cells.push(header);
        for row in &self.rows {
            let mut line = vec![row.key.clone()];
            line.extend(row.values.iter().map(|v| match v {
                Some(x) => format!("{x:.6e}"),
                None => "-".into(),
            }));
            if with_pass {
                line.push(match row.pass {
                    Some(true) => "ok".into(),
                    Some(false) => "FAIL".into(),
                    None => "-".into(),
                });
            }
            cells.push(line);
        }
        let width: Vec<usize> =
            (0..cells[0].len()).map(|j| cells.iter().map(|l| l[j].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, if self.pass { "PASS" } else { "FAIL" });
        for line in &cells {
            let padded: Vec<String> = line.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "  {}", padded.join("  "));
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("check", "check", &["slack_min", "slack_max"]);
        r.push("young", &[1.0 / 3.0, f64::NAN], Some(true));
        r.push("jensen", &[-2.0, 1e-300], Some(false));
        r.note("diagnostic");
        r
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), Some(0.333333333333));
        assert_eq!(round12(f64::INFINITY), None);
        assert_eq!(round12(4.0 / 9.0), Some(0.444444444444));
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(back, r);
        assert!(!back.pass);
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let back = Report::from_csv("check", &r.to_csv()).unwrap();
        assert_eq!(back.rows, r.rows);
        assert_eq!(back.columns, r.columns);
        let mut trace = Report::new("demo halving", "iteration", &["modular", "functional_value", "bound"]);
        trace.push("0", &[1.0, 2.0, 1.0], None);
        assert_eq!(trace.to_csv().lines().next(), Some("iteration,modular,functional_value,bound"));
        assert_eq!(Report::from_csv("demo halving", &trace.to_csv()).unwrap().rows, trace.rows);
    }

    #[test]
    fn table_marks_failures() {
        let t = sample().to_table();
        assert!(t.starts_with("check: FAIL"));
        assert!(t.contains("FAIL") && t.contains("note: diagnostic"));
    }
}
