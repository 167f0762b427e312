//! JSON projection of an event log, for `convert --to json` and debugging.
//!
//! The mapping is lossless and unambiguous: strings, ints, floats and
//! booleans map to their JSON counterparts; dates, ids, lists and containers
//! are wrapped in single-key objects so their XES type survives.

use serde_json::{json, Map, Value};

use super::{AttributeMap, AttributeValue, EventLog};

pub(super) fn value_to_json(value: &AttributeValue) -> Value {
    match value {
        AttributeValue::String(s) => Value::String(s.clone()),
        AttributeValue::Int(n) => json!(n),
        AttributeValue::Float(x) => json!(x),
        AttributeValue::Boolean(b) => Value::Bool(*b),
        AttributeValue::Date(d) => {
            json!({ "date": d.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true) })
        }
        AttributeValue::Id(s) => json!({ "id": s }),
        AttributeValue::List(items) => {
            let items: Vec<Value> = items
                .iter()
                .map(|(k, v)| json!({ "key": k, "value": value_to_json(v) }))
                .collect();
            json!({ "list": items })
        }
        AttributeValue::Container(map) => json!({ "container": map_to_json(map) }),
    }
}

fn map_to_json(map: &AttributeMap) -> Value {
    let mut out = Map::new();
    for (k, v) in map {
        out.insert(k.clone(), value_to_json(v));
    }
    Value::Object(out)
}

/// Convert a log to its JSON representation. Key order follows the log's
/// attribute order, so output is deterministic.
pub fn log_to_json(log: &EventLog) -> Value {
    let extensions: Vec<Value> = log
        .extensions
        .iter()
        .map(|e| json!({ "name": e.name, "prefix": e.prefix, "uri": e.uri }))
        .collect();
    let classifiers: Map<String, Value> = log
        .classifiers
        .iter()
        .map(|(name, keys)| (name.clone(), json!(keys)))
        .collect();
    let traces: Vec<Value> = log
        .traces
        .iter()
        .map(|t| {
            json!({
                "attributes": map_to_json(&t.attributes),
                "events": t.events.iter().map(|e| map_to_json(&e.attributes)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "attributes": map_to_json(&log.attributes),
        "extensions": extensions,
        "global_trace_attrs": map_to_json(&log.global_trace_attrs),
        "global_event_attrs": map_to_json(&log.global_event_attrs),
        "classifiers": classifiers,
        "traces": traces,
    })
}
