//! Deterministic CSV and JSON emission for every record type.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a given
//! sequence of values always produces the same bytes. JSON documents mirror
//! the CSV tables and carry a `schema_version` field; non-finite floats
//! become `null` there (JSON has no representation for them) and `inf` /
//! `nan` in CSV.

use serde_json::{json, Map, Value};

use crate::figures::{ClassicalCheckRow, FigureTable, SpectrumRow};
use crate::observables::OscillationReport;
use crate::propagation::TrajectoryRecord;
use crate::protocol::MeasurementRecord;

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest round-trip float formatting; `inf`/`nan` spelled out and the
/// negative zero folded into "0".
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn json_f(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn json_opt(x: Option<f64>) -> Value {
    x.map(json_f).unwrap_or(Value::Null)
}

fn document(command: &str, rows: Value) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".to_string(), json!(SCHEMA_VERSION));
    doc.insert("command".to_string(), json!(command));
    doc.insert("rows".to_string(), rows);
    Value::Object(doc)
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::from(
        "mu,e0_re,e0_im,eplus_re,eplus_im,eminus_re,eminus_im,is_ep,nilpotency_index,biorthogonal_product,defect\n",
    );
    for r in rows {
        let nil = r
            .nilpotency_index
            .map(|k| k.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.mu),
            fmt(r.eigenvalues[0].0),
            fmt(r.eigenvalues[0].1),
            fmt(r.eigenvalues[1].0),
            fmt(r.eigenvalues[1].1),
            fmt(r.eigenvalues[2].0),
            fmt(r.eigenvalues[2].1),
            r.is_ep,
            nil,
            fmt(r.biorthogonal_product),
            fmt(r.defect),
        ));
    }
    out
}

pub fn spectrum_json(rows: &[SpectrumRow]) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "mu": json_f(r.mu),
                "eigenvalues": r.eigenvalues.iter()
                    .map(|&(re, im)| json!({"re": json_f(re), "im": json_f(im)}))
                    .collect::<Vec<_>>(),
                "is_ep": r.is_ep,
                "nilpotency_index": r.nilpotency_index,
                "biorthogonal_product": json_f(r.biorthogonal_product),
                "defect": json_f(r.defect),
            })
        })
        .collect();
    pretty(document("spectrum", Value::Array(rows)))
}

pub fn trajectory_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::from("t,tau,omega,H,L,D,sigma_w,sigma_n,rho,x2_scaled,p2_scaled\n");
    for s in &record.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(s.t),
            fmt(s.tau),
            fmt(s.omega),
            fmt(s.h),
            fmt(s.l),
            fmt(s.d),
            fmt(s.sigma_w),
            fmt(s.sigma_n),
            fmt(s.rho),
            fmt(s.x2_scaled),
            fmt(s.p2_scaled),
        ));
    }
    out
}

pub fn trajectory_json(record: &TrajectoryRecord) -> String {
    let rows: Vec<Value> = record
        .samples
        .iter()
        .map(|s| {
            json!({
                "t": json_f(s.t),
                "tau": json_f(s.tau),
                "omega": json_f(s.omega),
                "H": json_f(s.h),
                "L": json_f(s.l),
                "D": json_f(s.d),
                "sigma_w": json_f(s.sigma_w),
                "sigma_n": json_f(s.sigma_n),
                "rho": json_f(s.rho),
                "x2_scaled": json_f(s.x2_scaled),
                "p2_scaled": json_f(s.p2_scaled),
            })
        })
        .collect();
    pretty(document("evolve", Value::Array(rows)))
}

pub fn sweep_csv(reports: &[OscillationReport]) -> String {
    let mut out =
        String::from("mu,regime,T_measured,T_analytic,V_measured,V_analytic,rho_max,rho_min\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(r.mu),
            r.regime,
            fmt_opt(r.measured_period_tau),
            fmt(r.analytic_period_tau),
            fmt_opt(r.measured_visibility),
            fmt(r.analytic_visibility),
            fmt(r.rho_max),
            fmt(r.rho_min),
        ));
    }
    out
}

pub fn sweep_json(reports: &[OscillationReport]) -> String {
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "mu": json_f(r.mu),
                "regime": r.regime.to_string(),
                "T_measured": json_opt(r.measured_period_tau),
                "T_analytic": json_f(r.analytic_period_tau),
                "V_measured": json_opt(r.measured_visibility),
                "V_analytic": json_f(r.analytic_visibility),
                "rho_max": json_f(r.rho_max),
                "rho_min": json_f(r.rho_min),
            })
        })
        .collect();
    pretty(document("sweep", Value::Array(rows)))
}

pub fn classical_check_csv(rows: &[ClassicalCheckRow]) -> String {
    let mut out = String::from("t,tau,omega,h_mc,h_exact,z_h,l_mc,l_exact,z_l,d_mc,d_exact,z_d\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.t),
            fmt(r.tau),
            fmt(r.omega),
            fmt(r.h_mc),
            fmt(r.h_exact),
            fmt(r.z_h),
            fmt(r.l_mc),
            fmt(r.l_exact),
            fmt(r.z_l),
            fmt(r.d_mc),
            fmt(r.d_exact),
            fmt(r.z_d),
        ));
    }
    out
}

pub fn classical_check_json(rows: &[ClassicalCheckRow]) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "t": json_f(r.t),
                "tau": json_f(r.tau),
                "omega": json_f(r.omega),
                "h_mc": json_f(r.h_mc),
                "h_exact": json_f(r.h_exact),
                "z_h": json_f(r.z_h),
                "l_mc": json_f(r.l_mc),
                "l_exact": json_f(r.l_exact),
                "z_l": json_f(r.z_l),
                "d_mc": json_f(r.d_mc),
                "d_exact": json_f(r.d_exact),
                "z_d": json_f(r.z_d),
            })
        })
        .collect();
    pretty(document("classical-check", Value::Array(rows)))
}

pub fn protocol_csv(records: &[MeasurementRecord]) -> String {
    let mut out =
        String::from("t_n,omega_n,compression_factor,x2_scaled,p2_scaled,sigma_n,sigma_w,rho\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(r.t_n),
            fmt(r.omega_n),
            fmt(r.compression_factor),
            fmt(r.x2_scaled),
            fmt(r.p2_scaled),
            fmt(r.sigma_n_hold),
            fmt(r.sigma_w_hold),
            fmt(r.rho()),
        ));
    }
    out
}

pub fn protocol_json(records: &[MeasurementRecord]) -> String {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "t_n": json_f(r.t_n),
                "omega_n": json_f(r.omega_n),
                "compression_factor": json_f(r.compression_factor),
                "x2_scaled": json_f(r.x2_scaled),
                "p2_scaled": json_f(r.p2_scaled),
                "sigma_n": json_f(r.sigma_n_hold),
                "sigma_w": json_f(r.sigma_w_hold),
                "rho": json_f(r.rho()),
            })
        })
        .collect();
    pretty(document("experiment", Value::Array(rows)))
}

pub fn figure_csv(table: &FigureTable) -> String {
    let mut out = String::from("compression_factor");
    for &mu in &table.mu_labels {
        out.push_str(&format!(",mu_{}", fmt(mu)));
    }
    out.push('\n');
    for (i, &c) in table.compressions.iter().enumerate() {
        out.push_str(&fmt(c));
        for column in &table.columns {
            out.push(',');
            out.push_str(&fmt(column[i]));
        }
        out.push('\n');
    }
    out
}

pub fn figure_json(command: &str, table: &FigureTable) -> String {
    let rows: Vec<Value> = table
        .compressions
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut row = Map::new();
            row.insert("compression_factor".to_string(), json_f(c));
            for (j, &mu) in table.mu_labels.iter().enumerate() {
                row.insert(format!("mu_{}", fmt(mu)), json_f(table.columns[j][i]));
            }
            Value::Object(row)
        })
        .collect();
    pretty(document(command, Value::Array(rows)))
}

fn pretty(doc: Value) -> String {
    let mut s = serde_json::to_string_pretty(&doc).expect("in-memory serialization cannot fail");
    s.push('\n');
    s
}
