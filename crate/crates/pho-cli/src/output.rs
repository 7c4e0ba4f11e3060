//! Report rendering: fixed decimal CSV cells (diffable, byte-stable) and
//! the JSON envelope with the config echo.

use crate::config::RunConfig;
use serde::Serialize;

/// CSV float cell: fixed ten decimal places inside a sane magnitude window,
/// scientific with ten significant digits outside it.
pub fn fmt_float(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.0000000000".to_string();
    }
    let mag = v.abs();
    if (1e-6..1e9).contains(&mag) {
        format!("{v:.10}")
    } else {
        format!("{v:.9e}")
    }
}

/// JSON envelope: `{ "meta": ..., "rows": ..., "footer": ... }`.
pub fn json_report<R: Serialize, F: Serialize>(
    meta: &RunConfig,
    rows: &[R],
    footer: Option<&F>,
) -> String {
    #[derive(Serialize)]
    struct Envelope<'a, R, F> {
        meta: &'a RunConfig,
        rows: &'a [R],
        #[serde(skip_serializing_if = "Option::is_none")]
        footer: Option<&'a F>,
    }
    let mut out = serde_json::to_string_pretty(&Envelope { meta, rows, footer })
        .expect("report serialization cannot fail");
    out.push('\n');
    out
}

pub fn csv_report(header: &str, rows: &[String], footer: Option<String>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    if let Some(f) = footer {
        out.push_str(&f);
        out.push('\n');
    }
    out
}
