//! Report assembly and rendering.
//!
//! Every command produces one [`Report`]: a schema tag, the command
//! name, a pass/fail verdict, and a body of command-specific fields.
//! JSON output is canonical — object keys are sorted, exact numbers
//! are rendered as `"p/q"` strings, floats with shortest round-trip
//! precision — so identical inputs (and seed) give byte-identical
//! bytes on stdout.

use frobenius_core::cmatrix::CMatrix;
use frobenius_core::dgbv::CheckReport;
use frobenius_core::qmatrix::QMatrix;
use frobenius_core::scalar::{rat_to_string, Rat, C64};
use frobenius_core::series::GradedSeries;
use serde::Serialize;
use serde_json::{Map, Value};

/// Version tag for the JSON report layout.
pub const SCHEMA: &str = "frobenius-report/1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub ok: bool,
    #[serde(flatten)]
    pub body: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, ok: bool, body: Map<String, Value>) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            ok,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Line-oriented rendering of the same data for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} ({})\n", self.command, self.schema));
        out.push_str(&format!("ok: {}\n", self.ok));
        for (k, v) in &self.body {
            render_value(&mut out, k, v, 0);
        }
        out
    }
}

fn render_value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, inner) in m {
                render_value(out, k, inner, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, inner) in items.iter().enumerate() {
                render_value(out, &format!("[{i}]"), inner, depth + 1);
            }
        }
        Value::Array(items) => {
            let flat: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", flat.join(", ")));
        }
        other => out.push_str(&format!("{pad}{key}: {}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let flat: Vec<String> = items.iter().map(scalar_text).collect();
            format!("[{}]", flat.join(", "))
        }
        other => other.to_string(),
    }
}

pub fn f64_value(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{x}")))
}

pub fn c64_value(z: C64) -> Value {
    // Normalize −0.0 so equal values always render identically.
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let s = if im < 0.0 {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    };
    Value::String(s)
}

pub fn c64_list(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| c64_value(z)).collect())
}

pub fn rat_value(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

pub fn rat_list(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat_value).collect())
}

pub fn count_value(n: u128) -> Value {
    u64::try_from(n)
        .map(Value::from)
        .unwrap_or_else(|_| Value::String(n.to_string()))
}

pub fn cmatrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| c64_value(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn qmatrix_value(m: &QMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| rat_value(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn check_value(rep: &CheckReport) -> Value {
    let mut m = Map::new();
    m.insert("checks".into(), Value::from(rep.checks as u64));
    m.insert("pass".into(), Value::Bool(rep.pass()));
    m.insert(
        "violations".into(),
        Value::Array(rep.violations.iter().map(|s| Value::from(s.clone())).collect()),
    );
    Value::Object(m)
}

/// A rational series as a list of `{coeff, monomial}` terms in
/// monomial order.
pub fn series_value(phi: &GradedSeries<Rat>) -> Value {
    let ring = phi.ring();
    let mut terms = Vec::new();
    for (e, c) in phi.terms() {
        let mut label = String::new();
        for (i, &k) in e.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !label.is_empty() {
                label.push(' ');
            }
            label.push_str(&ring.var(i).name);
            if k > 1 {
                label.push_str(&format!("^{k}"));
            }
        }
        if label.is_empty() {
            label.push('1');
        }
        let mut t = Map::new();
        t.insert("coeff".into(), rat_value(c));
        t.insert("monomial".into(), Value::from(label));
        terms.push(Value::Object(t));
    }
    Value::Array(terms)
}
