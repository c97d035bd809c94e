//! CSV and JSON rendering of bound reports.

use klsum_core::verify::BoundReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "kind,f,N,q,a,eps,C,bands,lhs,rhs_1,rhs_2,rhs_3,rhs_total,ratio,flags";

/// `printf("%.12g")`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Serialize)]
struct Row<'a> {
    kind: String,
    f: Option<&'a str>,
    #[serde(rename = "N")]
    n: Option<u64>,
    q: Option<u64>,
    a: Option<i64>,
    eps: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    bands: Option<&'a str>,
    lhs: f64,
    rhs_1: Option<f64>,
    rhs_2: Option<f64>,
    rhs_3: Option<f64>,
    rhs_total: f64,
    ratio: f64,
    flags: Vec<String>,
}

fn row(r: &BoundReport) -> Row<'_> {
    let term = |i: usize| r.rhs_terms.get(i).map(|t| t.1);
    Row {
        kind: r.kind.to_string(),
        f: r.inputs.f.as_deref(),
        n: r.inputs.n,
        q: r.inputs.q,
        a: r.inputs.a,
        eps: r.inputs.eps,
        c: r.inputs.c,
        bands: r.inputs.bands.as_deref(),
        lhs: r.lhs,
        rhs_1: term(0),
        rhs_2: term(1),
        rhs_3: term(2),
        rhs_total: r.rhs_total,
        ratio: r.ratio,
        flags: r.flags.iter().map(ToString::to_string).collect(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(reports: &[BoundReport], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in reports {
                let row = row(r);
                let real = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
                let int = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
                let fields = [
                    row.kind,
                    csv_field(row.f.unwrap_or("")),
                    int(row.n),
                    int(row.q),
                    row.a.map(|v| v.to_string()).unwrap_or_default(),
                    real(row.eps),
                    real(row.c),
                    csv_field(row.bands.unwrap_or("")),
                    fmt_real(row.lhs),
                    real(row.rhs_1),
                    real(row.rhs_2),
                    real(row.rhs_3),
                    fmt_real(row.rhs_total),
                    fmt_real(row.ratio),
                    row.flags.join(";"),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Row> = reports.iter().map(row).collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}
