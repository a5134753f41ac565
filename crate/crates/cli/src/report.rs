//! Report records and their JSON / CSV rendering.
//!
//! Big integers are decimal strings; balls are `{mid, rad, bits}` with
//! decimal strings that together still enclose the value.

use expmeasure::BallReal;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub mid: String,
    pub rad: String,
    pub bits: u32,
}

impl Ball {
    pub fn new(x: &BallReal, digits: usize) -> Self {
        let (mid, rad) = x.to_decimal(digits);
        Ball { mid, rad, bits: x.prec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentRecord {
    pub n: u64,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "Cplus")]
    pub c_plus: String,
    #[serde(rename = "Cminus")]
    pub c_minus: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "J")]
    pub j: String,
    #[serde(rename = "H")]
    pub h: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsRecord {
    pub s: i64,
    pub t: i64,
    /// `p^k` factors of `|s|`, joined with `*`; `1` for `|s| = 1`.
    pub factors: String,
    pub alpha: Ball,
    pub beta: u32,
    pub gamma: String,
    pub sigma: Ball,
    pub rho: Ball,
    pub eta: Ball,
    pub gcd2: u32,
    pub log_s_over_alpha: Ball,
    pub log_n1: Ball,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsolveRecord {
    pub n: u32,
    pub z: Ball,
    pub z_n: Ball,
    /// Bound on `|z_n - z|`; only for `y > e`.
    pub error_bound: Option<Ball>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub s: i64,
    pub t: i64,
    pub log_n: Ball,
    pub zeta: Ball,
    pub big_z: Ball,
    pub log_big_z: Ball,
    pub mu: Ball,
    pub log_lower_bound: Ball,
    pub log_n1: Ball,
    pub threshold_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub s: i64,
    pub t: i64,
    pub log_n: Ball,
    pub mu: Ball,
    pub bundschuh: Ball,
    pub shiokawa: Ball,
    pub zheng: Ball,
    /// `(mu - 2) / (shiokawa - 2)`; absent when `|s| = 1`.
    pub excess_ratio: Option<Ball>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub s: i64,
    pub t: i64,
    pub bound: String,
    #[serde(rename = "N")]
    pub n: String,
    #[serde(rename = "M")]
    pub m: String,
    pub log_n: Ball,
    pub log_abs_lambda_over_n: Ball,
    pub log_lower_bound: Ball,
    pub margin: Ball,
    pub verdict: String,
    pub precision_used: u32,
    pub threshold_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub schema_version: String,
    pub command: String,
    pub params: Value,
    pub records: Vec<R>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: String,
    pub command: Option<String>,
    pub error: ErrorBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl<R: Serialize> Report<R> {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => to_csv(&self.records),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}_{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn flat_row<R: Serialize>(r: &R) -> Vec<(String, String)> {
    let mut row = Vec::new();
    flatten("", &serde_json::to_value(r).expect("record serializes"), &mut row);
    row
}

/// Header from the first record's field names; ball fields become
/// `name_mid,name_rad,name_bits`, and absent optional balls leave the
/// columns of a present one empty.
pub fn to_csv<R: Serialize>(records: &[R]) -> String {
    let rows: Vec<_> = records.iter().map(flat_row).collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    // an optional ball that is null in one row and present in another
    header.retain(|k| !rows.iter().any(|r| r.iter().any(|(rk, _)| rk.starts_with(&format!("{k}_")))));
    let mut out = header.join(",");
    out.push('\n');
    for row in &rows {
        let cells: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
