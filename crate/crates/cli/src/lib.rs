//! Batch front end: parse a web document, run pipeline stages and emit a
//! canonical JSON report.
//!
//! The report has two parts. `report` is deterministic (sorted keys, exact
//! rationals, no timings) and is what golden files compare; `meta` holds
//! timings and the precision ledger.

pub mod document;
pub mod json;
pub mod report;

use serde_json::{json, Map, Value};

pub use document::WebDocument;
pub use json::CliError;
pub use report::{Command, Options, Session};

/// Outcome of one invocation: the full output document and the exit code.
pub struct Outcome {
    pub output: Value,
    pub exit_code: u8,
}

pub fn run(command: Command, input: &str, opts: &Options) -> Outcome {
    let mut report = Map::new();
    let mut meta = json!({});
    let result = (|| -> Result<(), CliError> {
        let doc = WebDocument::parse(input)?;
        let order = opts.order.unwrap_or(doc.order);
        let mut session = Session::new(doc, order)?;
        report.insert("input".into(), session.echo());
        let sections = session.sections(command, opts);
        meta = session.meta();
        report.extend(sections?);
        Ok(())
    })();
    let exit_code = match result {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            report.insert("error".into(), e.to_json());
            e.exit_code()
        }
    };
    Outcome { output: json!({ "report": report, "meta": meta }), exit_code }
}

/// Canonical text form: indented like `to_string_pretty`, except that arrays
/// of scalars (series terms, rationals) stay on one line. Ends in a newline.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_array() && !i.is_object()),
        Value::Object(m) => m.is_empty(),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Array(items) if is_flat(v) => {
            let inline: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&inline.join(", "));
            out.push(']');
        }
        _ if is_flat(v) => out.push_str(&v.to_string()),
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        _ => unreachable!("scalars are flat"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_keeps_scalar_arrays_inline() {
        let v = json!({ "b": [[0, 1, "a,b", "2"]], "a": {}, "c": [] });
        let text = render(&v);
        assert_eq!(text, "{\n  \"a\": {},\n  \"b\": [\n    [0, 1, \"a,b\", \"2\"]\n  ],\n  \"c\": []\n}\n");
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), v);
    }
}
