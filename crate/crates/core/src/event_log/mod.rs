//! Event log object model and XES / JSON serialization.
//!
//! The model follows the IEEE 1849 (XES) structure: a log holds traces,
//! a trace holds events, and all three carry ordered attribute maps with
//! typed values. Attribute order is preserved on parse and write so that
//! a parse → serialize round trip is stable.

mod json;
mod xes;

pub use json::log_to_json;
pub use xes::{
    parse_xes, parse_xes_bytes, parse_xes_file, write_xes, write_xes_gz, ParseMode, XesImport,
};

use crate::error::{Error, Result};
use indexmap::IndexMap;

/// Timestamps keep the offset they were written with; equality and ordering
/// compare the instant, so `2006-07-24T00:00:00Z` == `2006-07-24T02:00:00+02:00`.
pub type Timestamp = chrono::DateTime<chrono::FixedOffset>;

/// Ordered attribute map. Insertion order is the document order of the
/// source XES file.
pub type AttributeMap = IndexMap<String, AttributeValue>;

pub const CONCEPT_NAME: &str = "concept:name";
pub const CASE_CONCEPT_NAME: &str = "case:concept:name";

/// A typed XES attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    String(String),
    Int(i64),
    Float(f64),
    Date(Timestamp),
    Boolean(bool),
    Id(String),
    /// Ordered children; keys may repeat.
    List(Vec<(String, AttributeValue)>),
    /// Keyed children; keys are unique.
    Container(AttributeMap),
}

impl AttributeValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttributeValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            AttributeValue::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            AttributeValue::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<&Timestamp> {
        match self {
            AttributeValue::Date(d) => Some(d),
            _ => None,
        }
    }

    /// XES tag name for this value's type.
    pub fn type_name(&self) -> &'static str {
        match self {
            AttributeValue::String(_) => "string",
            AttributeValue::Int(_) => "int",
            AttributeValue::Float(_) => "float",
            AttributeValue::Date(_) => "date",
            AttributeValue::Boolean(_) => "boolean",
            AttributeValue::Id(_) => "id",
            AttributeValue::List(_) => "list",
            AttributeValue::Container(_) => "container",
        }
    }
}

/// A single observed event: just its attributes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Event {
    pub attributes: AttributeMap,
}

impl Event {
    pub fn new() -> Self {
        Self::default()
    }

    /// Event with only `concept:name` set.
    pub fn named(name: impl Into<String>) -> Self {
        let mut attributes = AttributeMap::new();
        attributes.insert(
            CONCEPT_NAME.to_owned(),
            AttributeValue::String(name.into()),
        );
        Event { attributes }
    }

    pub fn get(&self, key: &str) -> Option<&AttributeValue> {
        self.attributes.get(key)
    }

    pub fn set(&mut self, key: impl Into<String>, value: AttributeValue) {
        self.attributes.insert(key.into(), value);
    }

    /// The `concept:name` attribute, if present as a string.
    pub fn name(&self) -> Option<&str> {
        self.get(CONCEPT_NAME).and_then(AttributeValue::as_str)
    }
}

/// An ordered sequence of events belonging to one case.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub attributes: AttributeMap,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Trace with only `concept:name` set.
    pub fn named(name: impl Into<String>) -> Self {
        let mut attributes = AttributeMap::new();
        attributes.insert(
            CONCEPT_NAME.to_owned(),
            AttributeValue::String(name.into()),
        );
        Trace { attributes, events: Vec::new() }
    }

    /// The `concept:name` attribute (the case id), if present as a string.
    pub fn name(&self) -> Option<&str> {
        self.attributes.get(CONCEPT_NAME).and_then(AttributeValue::as_str)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// An XES extension declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub name: String,
    pub prefix: String,
    pub uri: String,
}

/// An event log: metadata plus an ordered list of traces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub attributes: AttributeMap,
    pub extensions: Vec<Extension>,
    /// Declared trace-level attributes with their default values.
    pub global_trace_attrs: AttributeMap,
    /// Declared event-level attributes with their default values.
    pub global_event_attrs: AttributeMap,
    /// Classifier name → attribute keys, in document order.
    pub classifiers: IndexMap<String, Vec<String>>,
    pub traces: Vec<Trace>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a minimal log from bare activity sequences. Traces are named
    /// "1", "2", ... and every event carries only `concept:name`. Handy for
    /// tests and for describing behaviour without a real XES file.
    pub fn from_activity_sequences<S, T>(sequences: S) -> Self
    where
        S: IntoIterator<Item = T>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        let mut log = EventLog::new();
        for (i, seq) in sequences.into_iter().enumerate() {
            let mut trace = Trace::named((i + 1).to_string());
            trace.events = seq.into_iter().map(|a| Event::named(a)).collect();
            log.traces.push(trace);
        }
        log
    }

    pub fn num_traces(&self) -> usize {
        self.traces.len()
    }

    pub fn num_events(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    /// Copy of this log's metadata (attributes, extensions, globals,
    /// classifiers) with an empty trace list. Used by filtering operations.
    pub fn metadata_shell(&self) -> EventLog {
        EventLog {
            attributes: self.attributes.clone(),
            extensions: self.extensions.clone(),
            global_trace_attrs: self.global_trace_attrs.clone(),
            global_event_attrs: self.global_event_attrs.clone(),
            classifiers: self.classifiers.clone(),
            traces: Vec::new(),
        }
    }
}

/// Maps events to activity labels by joining one or more attribute values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    keys: Vec<String>,
}

impl Default for Classifier {
    /// The event-name classifier: `concept:name` alone.
    fn default() -> Self {
        Classifier { keys: vec![CONCEPT_NAME.to_owned()] }
    }
}

impl Classifier {
    /// A classifier over the given attribute keys. Fails on an empty key list.
    pub fn new<I, S>(keys: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let keys: Vec<String> = keys.into_iter().map(Into::into).collect();
        if keys.is_empty() {
            return Err(Error::InvalidInput("classifier needs at least one key".into()));
        }
        Ok(Classifier { keys })
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    /// The activity label of `event`: the classifier's attribute values
    /// joined with `"+"` in key order. Non-string values are rendered the
    /// same way they would be written to XES. A missing key is an error.
    pub fn label(&self, event: &Event) -> Result<String> {
        let mut parts = Vec::with_capacity(self.keys.len());
        for key in &self.keys {
            let value = event
                .get(key)
                .ok_or_else(|| Error::MissingAttribute { key: key.clone() })?;
            parts.push(xes::value_to_text(value));
        }
        Ok(parts.join("+"))
    }
}

/// A flat sequence of events, each tagged with its case id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    pub events: Vec<Event>,
}

impl EventStream {
    /// Flatten a log trace by trace, tagging each event with its case id
    /// under `case:concept:name`. Traces must be named.
    pub fn from_log(log: &EventLog) -> Result<EventStream> {
        let mut events = Vec::with_capacity(log.num_events());
        for trace in &log.traces {
            let case = trace.name().ok_or_else(|| Error::MissingAttribute {
                key: CONCEPT_NAME.to_owned(),
            })?;
            for event in &trace.events {
                let mut event = event.clone();
                event.set(CASE_CONCEPT_NAME, AttributeValue::String(case.to_owned()));
                events.push(event);
            }
        }
        Ok(EventStream { events })
    }

    /// Regroup the stream into a log: one trace per distinct case id, cases
    /// ordered by first appearance, events in stream order. The case tag is
    /// removed from the events and becomes the trace name.
    pub fn into_log(self) -> Result<EventLog> {
        let mut by_case: IndexMap<String, Trace> = IndexMap::new();
        for mut event in self.events {
            let case = match event.attributes.shift_remove(CASE_CONCEPT_NAME) {
                Some(AttributeValue::String(s)) => s,
                Some(other) => xes::value_to_text(&other),
                None => {
                    return Err(Error::MissingAttribute { key: CASE_CONCEPT_NAME.to_owned() })
                }
            };
            by_case
                .entry(case.clone())
                .or_insert_with(|| Trace::named(case))
                .events
                .push(event);
        }
        let mut log = EventLog::new();
        log.traces = by_case.into_values().collect();
        Ok(log)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Activity sequence of a trace under a classifier.
pub fn activity_sequence(trace: &Trace, classifier: &Classifier) -> Result<Vec<String>> {
    trace.events.iter().map(|e| classifier.label(e)).collect()
}
