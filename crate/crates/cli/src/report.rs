use serde::Serialize;

use crate::config::SuiteConfig;
use sasaki_spectra::spectral::SpectralReport;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Degenerate,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

impl Comparison {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Self::AtMost => value <= threshold,
            Self::AtLeast => value >= threshold,
            Self::Equal => value == threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub anchor: &'static str,
    pub value: Option<f64>,
    pub comparison: Comparison,
    pub threshold: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    pub fn check(name: impl Into<String>, anchor: &'static str, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let status = if value.is_finite() && comparison.holds(value, threshold) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            anchor,
            value: Some(value),
            comparison,
            threshold,
            status,
            detail: None,
        }
    }

    pub fn at_most(name: impl Into<String>, anchor: &'static str, value: f64, threshold: f64) -> Self {
        Self::check(name, anchor, value, Comparison::AtMost, threshold)
    }

    pub fn degenerate(name: impl Into<String>, anchor: &'static str, threshold: f64, detail: &str) -> Self {
        Self {
            name: name.into(),
            anchor,
            value: Some(0.0),
            comparison: Comparison::AtMost,
            threshold,
            status: Status::Degenerate,
            detail: Some(detail.to_string()),
        }
    }

    pub fn inconclusive(name: impl Into<String>, anchor: &'static str, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            anchor,
            value: None,
            comparison: Comparison::AtMost,
            threshold,
            status: Status::Inconclusive,
            detail: Some(detail),
        }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Rows of a per-node field dump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDump {
    pub immersion: String,
    pub generator: String,
    /// `(node index, quadrature weight, value)`.
    pub rows: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub toolkit: &'static str,
    pub suite: &'static str,
    pub config: SuiteConfig,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectralReport>,
    #[serde(skip)]
    pub fields: Vec<FieldDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Report {
    pub fn new(config: SuiteConfig) -> Self {
        Self {
            schema: SCHEMA,
            toolkit: env!("CARGO_PKG_VERSION"),
            suite: config.suite.name(),
            config,
            records: Vec::new(),
            spectra: Vec::new(),
            fields: Vec::new(),
            wall_time_seconds: None,
        }
    }

    /// Worst status across records; `Pass` when empty.
    pub fn overall(&self) -> Status {
        self.records.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
    }

    pub fn exit_code(&self) -> i32 {
        match self.overall() {
            Status::Pass | Status::Degenerate => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Spectra as `immersion,resolution,index,eigenvalue`, per-node fields as
    /// `immersion,generator,node,weight,value`, otherwise the record table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.spectra.is_empty() {
            out.push_str("immersion,resolution,index,eigenvalue\n");
            for s in &self.spectra {
                for (i, e) in s.eigenvalues.iter().enumerate() {
                    out.push_str(&format!("{},{},{i},{e:.17e}\n", s.immersion, s.resolution));
                }
            }
        } else if !self.fields.is_empty() {
            out.push_str("immersion,generator,node,weight,value\n");
            for f in &self.fields {
                for (i, w, v) in &f.rows {
                    out.push_str(&format!("{},{},{i},{w:.17e},{v:.17e}\n", f.immersion, f.generator));
                }
            }
        } else {
            out.push_str("name,anchor,value,comparison,threshold,status\n");
            for r in &self.records {
                let value = r.value.map(|v| format!("{v:.6e}")).unwrap_or_default();
                let cmp = serde_json::to_value(r.comparison).expect("comparison serializes");
                let status = serde_json::to_value(r.status).expect("status serializes");
                out.push_str(&format!(
                    "{},{},{value},{},{:e},{}\n",
                    r.name,
                    r.anchor,
                    cmp.as_str().unwrap_or(""),
                    r.threshold,
                    status.as_str().unwrap_or("")
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    #[test]
    fn exit_codes_follow_worst_status() {
        let mut r = Report::new(SuiteConfig::new(Suite::All));
        assert_eq!(r.exit_code(), 0);
        r.records.push(Record::at_most("a", "x", 0.0, 1.0));
        r.records.push(Record::degenerate("b", "x", 1.0, "zero"));
        assert_eq!(r.exit_code(), 0);
        r.records.push(Record::inconclusive("c", "x", 1.0, "gap".into()));
        assert_eq!(r.exit_code(), 2);
        r.records.push(Record::at_most("d", "x", 2.0, 1.0));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn nan_values_fail() {
        assert_eq!(Record::at_most("a", "x", f64::NAN, 1.0).status, Status::Fail);
        assert_eq!(Record::check("a", "x", 5.0, Comparison::AtLeast, 5.0).status, Status::Pass);
    }

    #[test]
    fn json_has_schema_and_no_wall_time_by_default() {
        let r = Report::new(SuiteConfig::new(Suite::All));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v.get("wall_time_seconds").is_none());
        assert!(v["config"]["tolerances"]["legendrian"].is_number());
    }
}
