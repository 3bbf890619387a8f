//! CSV artifacts and summary rows.

use std::fmt;

/// Header shared by every `<subcommand>_summary.csv`.
pub const SUMMARY_HEADER: [&str; 6] = ["metric", "value", "expected", "lower", "upper", "pass"];

/// A named file produced by a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Renders a comma-separated table with a header row.
pub fn table<I>(name: &str, header: &[&str], rows: I) -> Artifact
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(&row).expect("in-memory write");
    }
    Artifact {
        name: name.to_string(),
        bytes: w.into_inner().expect("in-memory flush"),
    }
}

/// Shortest representation that parses back to the same value, switching
/// to exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// One line of a summary: a measured value, what it should be and whether
/// it lies in the accepted band. Informational rows always pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub value: String,
    pub expected: String,
    pub lower: String,
    pub upper: String,
    pub pass: bool,
}

impl SummaryRow {
    pub fn within(metric: &str, value: f64, expected: f64, lower: f64, upper: f64) -> Self {
        Self {
            metric: metric.into(),
            value: num(value),
            expected: num(expected),
            lower: num(lower),
            upper: num(upper),
            pass: value >= lower && value <= upper,
        }
    }

    pub fn near(metric: &str, value: f64, expected: f64, tol: f64) -> Self {
        Self::within(metric, value, expected, expected - tol, expected + tol)
    }

    pub fn below(metric: &str, value: f64, upper: f64) -> Self {
        Self {
            lower: String::new(),
            expected: String::new(),
            ..Self::within(metric, value, f64::NAN, f64::NEG_INFINITY, upper)
        }
    }

    pub fn above(metric: &str, value: f64, lower: f64) -> Self {
        Self {
            upper: String::new(),
            expected: String::new(),
            ..Self::within(metric, value, f64::NAN, lower, f64::INFINITY)
        }
    }

    pub fn flag(metric: &str, value: bool, expected: bool) -> Self {
        Self {
            metric: metric.into(),
            value: value.to_string(),
            expected: expected.to_string(),
            lower: String::new(),
            upper: String::new(),
            pass: value == expected,
        }
    }

    pub fn info(metric: &str, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value: num(value),
            expected: String::new(),
            lower: String::new(),
            upper: String::new(),
            pass: true,
        }
    }

    fn record(&self) -> Vec<String> {
        let pass = if self.pass { "true" } else { "false" };
        vec![
            self.metric.clone(),
            self.value.clone(),
            self.expected.clone(),
            self.lower.clone(),
            self.upper.clone(),
            pass.into(),
        ]
    }
}

impl fmt::Display for SummaryRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{verdict} {:<28} {}", self.metric, self.value)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected)?;
        }
        if !self.lower.is_empty() || !self.upper.is_empty() {
            let lo = if self.lower.is_empty() { "-inf" } else { &self.lower };
            let hi = if self.upper.is_empty() { "inf" } else { &self.upper };
            write!(f, " in [{lo}, {hi}]")?;
        }
        Ok(())
    }
}

pub fn summary_table(name: &str, rows: &[SummaryRow]) -> Artifact {
    table(name, &SUMMARY_HEADER, rows.iter().map(SummaryRow::record))
}
