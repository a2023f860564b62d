use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::Outcome;
use crate::error::Result;

/// Column names of `results.csv`, in order.
pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "l",
    "method",
    "z_re",
    "z_im",
    "multiplicity",
    "error",
    "scaled_error",
    "K",
    "slabs",
    "wall_time",
];

/// One line of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub l: u32,
    pub method: String,
    pub z_re: f64,
    pub z_im: f64,
    pub multiplicity: Option<u32>,
    /// Distance to the reference of this method; NaN when there is none.
    pub error: f64,
    pub scaled_error: f64,
    #[serde(rename = "K")]
    pub k: u32,
    pub slabs: usize,
    pub wall_time: Option<f64>,
}

impl ResultRow {
    pub fn new(experiment: &str, l: u32, method: impl ToString, z: Complex64, k: u32, slabs: usize) -> Self {
        Self {
            experiment: experiment.to_string(),
            l,
            method: method.to_string(),
            z_re: z.re,
            z_im: z.im,
            multiplicity: None,
            error: f64::NAN,
            scaled_error: f64::NAN,
            k,
            slabs,
            wall_time: None,
        }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }

    pub fn multiplicity(mut self, m: u32) -> Self {
        self.multiplicity = Some(m);
        self
    }

    /// Error against a reference, scaled by `l^exponent`.
    pub fn error(mut self, err: f64, exponent: f64) -> Self {
        self.error = err;
        self.scaled_error = err * (self.l as f64).powf(exponent);
        self
    }

    pub fn wall_time(mut self, secs: Option<f64>) -> Self {
        self.wall_time = secs;
        self
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// Renders rows as RFC 4180 CSV with the fixed header.
pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.l.to_string(),
            r.method.clone(),
            fmt_f64(r.z_re),
            fmt_f64(r.z_im),
            r.multiplicity.map_or(String::new(), |m| m.to_string()),
            fmt_f64(r.error),
            fmt_f64(r.scaled_error),
            r.k.to_string(),
            r.slabs.to_string(),
            r.wall_time.map_or(String::new(), fmt_f64),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Serializable `f64` that keeps NaN and infinities as strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn summary_value(outcome: &Outcome) -> Value {
    let mut pass = Map::new();
    for c in &outcome.criteria {
        pass.insert(c.name.clone(), Value::Bool(c.pass));
    }
    let details: Map<String, Value> = outcome
        .criteria
        .iter()
        .map(|c| (c.name.clone(), Value::String(c.detail.clone())))
        .collect();
    json!({
        "schema": 1,
        "experiment": outcome.experiment.to_string(),
        "pass": pass,
        "all_pass": outcome.all_pass(),
        "partial": false,
        "details": details,
        "tables": outcome.tables,
    })
}

/// Summary written when a run aborts.
pub fn failure_summary(experiment: &str, message: &str) -> Value {
    json!({
        "schema": 1,
        "experiment": experiment,
        "pass": {},
        "all_pass": false,
        "partial": true,
        "error": message,
        "tables": Value::Null,
    })
}

pub fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), csv_string(&outcome.rows)?)?;
    write_summary(dir, &summary_value(outcome))
}

pub fn write_summary(dir: &Path, summary: &Value) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = fs::File::create(dir.join("summary.json"))?;
    f.write_all(serde_json::to_string_pretty(summary)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_nan() {
        let rows = vec![
            ResultRow::new("a,b", 8, "direct", Complex64::new(0.5, -1.0), 4, 256).multiplicity(2),
            ResultRow::new("x\"y", 16, "predicted-0th", Complex64::new(1e-20, 0.0), 4, 256).error(0.25, 2.0),
        ];
        let s = csv_string(&rows).unwrap();
        let lines: Vec<&str> = s.split("\r\n").collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "\"a,b\",8,direct,5e-1,-1e0,2,NaN,NaN,4,256,");
        assert_eq!(lines[2], "\"x\"\"y\",16,predicted-0th,1e-20,0e0,,2.5e-1,6.4e1,4,256,");
        let mut rd = csv::Reader::from_reader(s.as_bytes());
        let recs: Vec<csv::StringRecord> = rd.records().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(&recs[0][0], "a,b");
        assert_eq!(&recs[1][0], "x\"y");
        let v: f64 = recs[0][6].parse().unwrap();
        assert!(v.is_nan());
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -3.5e-300, 1.0 / 3.0, 6.02e23] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
