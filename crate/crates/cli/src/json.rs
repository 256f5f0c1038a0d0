//! JSON rendering of library reports. Integers are always decimal strings.

use lincong::{CountReport, Detail, DivisorTable};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "1";

pub fn int(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn table(t: &DivisorTable) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!({
                "divisor": r.divisor,
                "values": ints(&r.values),
                "product": int(&r.product),
            })
        })
        .collect();
    json!({
        "columns": t.columns,
        "rows": rows,
        "total": int(&t.total()),
    })
}

pub fn detail(d: &Detail) -> Value {
    match d {
        Detail::Int(v) => int(v),
        Detail::Ints(v) => ints(v),
        Detail::Text(s) => Value::String(s.clone()),
        Detail::Texts(v) => json!(v),
        Detail::Flag(b) => Value::Bool(*b),
        Detail::Table(t) => table(t),
    }
}

/// `count`, `solvable`, `theorem` and `details` of a report.
pub fn report(r: &CountReport) -> Map<String, Value> {
    let details: Map<String, Value> = r.details.iter().map(|(k, d)| (k.clone(), detail(d))).collect();
    let mut out = Map::new();
    out.insert("count".into(), int(&r.count));
    out.insert("solvable".into(), Value::Bool(r.solvable));
    out.insert("theorem".into(), Value::String(r.method.tag().into()));
    out.insert("details".into(), Value::Object(details));
    out
}

/// Starts an output object with the schema version and command name.
pub fn envelope(command: &str) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("schema".into(), Value::String(SCHEMA.into()));
    out.insert("command".into(), Value::String(command.into()));
    out
}

/// Pretty-printed with a trailing newline. Keys come out sorted, so equal
/// inputs give byte-identical output.
pub fn render(v: &Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
