//! CSV reports: a header row, data rows, optional `#` notes and a trailing
//! comment with the tool version and the configuration hash.

use std::io::Write;

use crate::error::{CliError, CliResult};

/// Tool version written into every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A report assembled in memory and written in one go.
#[derive(Debug, Clone)]
pub struct Report {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

/// Shortest decimal that reads back to the same `f64`: integers bare,
/// exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Appends a row; the length must match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    /// A free-text line written as `# <text>` after the rows.
    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into().replace('\n', " "));
    }

    /// Renders the report with the trailing version line.
    pub fn render(&self, config_hash: &str) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Usage(format!("csv encoding failed: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let mut out = w
            .into_inner()
            .map_err(|e| CliError::Usage(format!("csv encoding failed: {e}")))?;
        for n in &self.notes {
            writeln!(out, "# {n}").expect("writing to a Vec cannot fail");
        }
        writeln!(out, "# maass {TOOL_VERSION} config={config_hash}")
            .expect("writing to a Vec cannot fail");
        Ok(String::from_utf8(out).expect("csv output is UTF-8"))
    }
}

/// `(header, rows, notes)` of a parsed report.
pub type Table = (Vec<String>, Vec<Vec<String>>, Vec<String>);

/// Reads a rendered report back: header, rows and notes, skipping the
/// version line.
pub fn parse(text: &str) -> CliResult<Table> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let notes = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| !l.starts_with("maass "))
        .map(str::to_string)
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r
        .headers()
        .map_err(|e| CliError::Usage(format!("bad csv: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(
            rec.map_err(|e| CliError::Usage(format!("bad csv: {e}")))?
                .iter()
                .map(str::to_string)
                .collect(),
        );
    }
    Ok((header, rows, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn any_finite_number_reads_back(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            prop_assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn render_and_parse() {
        let mut r = Report::new(&["a", "b"]);
        r.push(vec![num(0.1 + 0.2), "x, y".into()]);
        r.note("hello");
        let s = r.render("abc").unwrap();
        assert!(s.starts_with("a,b\n0.30000000000000004,\"x, y\"\n# hello\n"));
        assert!(s.ends_with(&format!("# maass {TOOL_VERSION} config=abc\n")));
        let (h, rows, notes) = parse(&s).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(
            rows,
            vec![vec!["0.30000000000000004".to_string(), "x, y".to_string()]]
        );
        assert_eq!(notes, vec!["hello"]);
    }

    #[test]
    fn numbers_read_back_exactly() {
        for x in [1.0 / 3.0, -2.5e-300, 13.779_751_351_890_738, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
