use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::{SuiteSpec, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// JSON has no infinities; non-finite values are written as strings.
mod num {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Finite(x)
        } else {
            Repr::Text(format!("{x}"))
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Finite(x) => Ok(x),
            Repr::Text(s) => s.parse().map_err(|_| E::custom(format!("not a number: {s}"))),
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            x.map(to_repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
        }
    }

    pub mod map {
        use std::collections::BTreeMap;

        use super::*;

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            m.iter().map(|(k, v)| (k, to_repr(*v))).collect::<BTreeMap<_, _>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            BTreeMap::<String, Repr>::deserialize(d)?
                .into_iter()
                .map(|(k, v)| Ok((k, from_repr(v)?)))
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// `lhs ≤ rhs`, up to the relative inequality tolerance.
    Inequality,
    /// `lhs` is a residual, `rhs` its threshold.
    Residual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case_id: String,
    pub groupoid_id: String,
    pub check: String,
    pub kind: RowKind,
    #[serde(with = "num::opt")]
    pub p: Option<f64>,
    #[serde(with = "num::opt")]
    pub q: Option<f64>,
    #[serde(with = "num")]
    pub lhs: f64,
    #[serde(with = "num")]
    pub rhs: f64,
    #[serde(with = "num")]
    pub margin: f64,
    #[serde(with = "num::map", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckCounts {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest `rhs − lhs` over inequality rows.
    #[serde(with = "num::opt")]
    pub min_margin: Option<f64>,
    /// Smallest `(rhs − lhs) / rhs` over inequality rows.
    #[serde(with = "num::opt")]
    pub min_relative_margin: Option<f64>,
    /// Largest residual over residual rows.
    #[serde(with = "num::opt")]
    pub max_residual: Option<f64>,
    pub by_check: BTreeMap<String, CheckCounts>,
}

impl Aggregates {
    pub fn from_rows(rows: &[Row]) -> Self {
        let mut a = Aggregates {
            rows: rows.len(),
            passed: 0,
            failed: 0,
            min_margin: None,
            min_relative_margin: None,
            max_residual: None,
            by_check: BTreeMap::new(),
        };
        let fmin = |o: Option<f64>, x: f64| Some(o.map_or(x, |y| y.min(x)));
        for r in rows {
            let c = a.by_check.entry(r.check.clone()).or_default();
            if r.pass {
                a.passed += 1;
                c.passed += 1;
            } else {
                a.failed += 1;
                c.failed += 1;
            }
            match r.kind {
                RowKind::Inequality => {
                    a.min_margin = fmin(a.min_margin, r.margin);
                    if r.rhs > 0.0 {
                        a.min_relative_margin = fmin(a.min_relative_margin, r.margin / r.rhs);
                    }
                }
                RowKind::Residual => a.max_residual = Some(a.max_residual.map_or(r.lhs, |y| y.max(r.lhs))),
            }
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: SuiteSpec,
    pub rows: Vec<Row>,
    pub aggregates: Aggregates,
}

impl VerificationReport {
    /// Sorts rows by `case_id` and recomputes the aggregates.
    pub fn new(config: SuiteSpec, mut rows: Vec<Row>) -> Self {
        rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let aggregates = Aggregates::from_rows(&rows);
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            rows,
            aggregates,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.case_id.clone(),
                r.groupoid_id.clone(),
                r.check.clone(),
                opt(r.p),
                opt(r.q),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.pass.to_string(),
                r.seed.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub const CSV_HEADER: [&str; 10] = ["case_id", "groupoid_id", "check", "p", "q", "lhs", "rhs", "margin", "pass", "seed"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_report(report: &VerificationReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report.to_csv()?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_report(path: impl AsRef<Path>) -> Result<VerificationReport> {
    VerificationReport::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, kind: RowKind, lhs: f64, rhs: f64, pass: bool) -> Row {
        Row {
            case_id: id.into(),
            groupoid_id: "z2".into(),
            check: "hy".into(),
            kind,
            p: Some(1.0),
            q: Some(f64::INFINITY),
            lhs,
            rhs,
            margin: rhs - lhs,
            residuals: BTreeMap::from([("x".to_string(), 0.1)]),
            pass,
            seed: 3,
            note: None,
        }
    }

    #[test]
    fn json_round_trip_and_csv() {
        let spec = SuiteSpec::parse(r#"{"groupoids":[]}"#).unwrap();
        let rep = VerificationReport::new(
            spec.clone(),
            vec![row("b", RowKind::Inequality, 1.0, 2.0, true), row("a", RowKind::Residual, 1e-12, 1e-8, false)],
        );
        assert_eq!(rep.rows[0].case_id, "a");
        assert_eq!((rep.aggregates.passed, rep.aggregates.failed), (1, 1));
        assert_eq!(rep.aggregates.min_relative_margin, Some(0.5));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&rep, ReportFormat::Json, &path).unwrap();
        assert_eq!(load_report(&path).unwrap(), rep);
        assert!(rep.to_json().unwrap().contains("\"inf\""));
        let csv = rep.to_csv().unwrap();
        assert_eq!(csv.lines().next().unwrap(), "case_id,groupoid_id,check,p,q,lhs,rhs,margin,pass,seed");
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("a,z2,hy,1,inf,"));

        let empty = VerificationReport::new(spec, vec![]);
        emit_report(&empty, ReportFormat::Csv, dir.path().join("e.csv")).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("e.csv")).unwrap().lines().count(), 1);
        assert_eq!(empty.aggregates.rows, 0);
        assert!(matches!(load_report(dir.path().join("missing.json")), Err(Error::Io(_))));
    }
}
