use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How a row's value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    /// `|value - bound| <= 3 err`.
    Within3Sigma,
    /// Recorded without a check.
    Info,
}

impl Relation {
    pub fn holds(self, value: f64, err: Option<f64>, bound: Option<f64>) -> bool {
        let Some(b) = bound else {
            return self == Relation::Info;
        };
        match self {
            Relation::Lt => value < b,
            Relation::Le => value <= b,
            Relation::Gt => value > b,
            Relation::Ge => value >= b,
            Relation::Eq => value == b,
            Relation::Within3Sigma => (value - b).abs() <= 3.0 * err.unwrap_or(0.0),
            Relation::Info => true,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Relation::Lt => "lt",
            Relation::Le => "le",
            Relation::Gt => "gt",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
            Relation::Within3Sigma => "within_3_sigma",
            Relation::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub metric: String,
    pub value: f64,
    /// Standard error of a sampled value.
    pub err: Option<f64>,
    /// Exact value as a fraction, when known.
    pub exact: Option<String>,
    pub bound: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(n: usize, metric: impl Into<String>, value: f64, relation: Relation, bound: Option<f64>) -> Self {
        ReportRow {
            n,
            metric: metric.into(),
            value,
            err: None,
            exact: None,
            bound,
            relation,
            pass: relation.holds(value, None, bound),
        }
    }

    pub fn info(n: usize, metric: impl Into<String>, value: f64) -> Self {
        Self::new(n, metric, value, Relation::Info, None)
    }

    pub fn with_err(mut self, err: f64) -> Self {
        self.err = Some(err);
        self.pass = self.relation.holds(self.value, self.err, self.bound);
        self
    }

    pub fn with_exact(mut self, exact: impl ToString) -> Self {
        self.exact = Some(exact.to_string());
        self
    }

    /// Overrides the flag for checks decided outside floating point.
    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_secs: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            params: BTreeMap::new(),
            seed,
            rows: Vec::new(),
            timestamp: None,
            wall_clock_secs: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One line per row; numbers use the same shortest round-trip form as
    /// the JSON output.
    pub fn to_csv(&self) -> String {
        let num = |v: f64| serde_json::Value::from(v).to_string();
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let mut out = String::from("experiment,seed,N,metric,value,err,exact,bound,relation,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&self.experiment),
                self.seed,
                r.n,
                csv_field(&r.metric),
                num(r.value),
                opt(r.err),
                csv_field(r.exact.as_deref().unwrap_or("")),
                opt(r.bound),
                r.relation.as_str(),
                r.pass
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
