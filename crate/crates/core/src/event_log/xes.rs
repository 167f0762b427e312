//! Streaming XES (IEEE 1849) import and export on top of quick-xml.
//!
//! Import never materializes the XML document: events are pulled from a
//! buffered reader, so peak memory is dominated by the parsed log itself.
//! Gzip input is detected by the 1F 8B magic bytes, not the file name.
//!
//! Two parse modes:
//! * [`ParseMode::Strict`] rejects unknown elements, events without a
//!   `concept:name` string, and unparseable typed values.
//! * [`ParseMode::Lenient`] skips or keeps-as-text the offending pieces and
//!   records a warning for each.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use quick_xml::events::{BytesDecl, BytesStart, BytesText, Event as XmlEvent};
use quick_xml::{Reader, Writer, XmlVersion};

use super::{
    AttributeMap, AttributeValue, Event, EventLog, Extension, Timestamp, Trace,
    CONCEPT_NAME,
};
use crate::error::{Error, Result};
use crate::xml::attr as escaped_attr;

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Reject anything outside the XES schema.
    Strict,
    /// Recover from schema violations and collect warnings.
    #[default]
    Lenient,
}

/// Result of an XES import: the log plus any lenient-mode warnings.
#[derive(Debug)]
pub struct XesImport {
    pub log: EventLog,
    pub warnings: Vec<String>,
}

impl XesImport {
    pub fn into_log(self) -> EventLog {
        self.log
    }
}

/// Parse XES from an in-memory buffer (gzip-compressed or plain).
pub fn parse_xes_bytes(bytes: &[u8], mode: ParseMode) -> Result<XesImport> {
    if bytes.starts_with(&GZIP_MAGIC) {
        let mut plain = Vec::new();
        GzDecoder::new(bytes).read_to_end(&mut plain)?;
        return parse_plain_bytes(&plain, mode);
    }
    parse_plain_bytes(bytes, mode)
}

fn parse_plain_bytes(bytes: &[u8], mode: ParseMode) -> Result<XesImport> {
    parse_inner(bytes, mode).map_err(|raw| raw.into_error(|offset| line_col(bytes, offset)))
}

/// Parse XES from a file path, streaming. Gzip is sniffed from the content.
pub fn parse_xes_file(path: impl AsRef<Path>, mode: ParseMode) -> Result<XesImport> {
    let path = path.as_ref();
    let reader = open_sniffed(path)?;
    parse_inner(reader, mode).map_err(|raw| {
        raw.into_error(|offset| {
            // Re-open and scan the consumed prefix to turn the byte offset
            // into a line/column pair; offsets refer to the decompressed
            // stream, so the re-scan goes through the same decoding.
            match open_sniffed(path) {
                Ok(r) => line_col_from_reader(r, offset),
                Err(_) => (0, 0),
            }
        })
    })
}

/// Parse XES from an arbitrary reader. The stream is buffered in memory so
/// that syntax errors can still report line and column; prefer
/// [`parse_xes_file`] for large files.
pub fn parse_xes(mut reader: impl Read, mode: ParseMode) -> Result<XesImport> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    parse_xes_bytes(&bytes, mode)
}

fn open_sniffed(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = BufReader::new(File::open(path)?);
    let head = file.fill_buf()?;
    if head.starts_with(&GZIP_MAGIC) {
        Ok(Box::new(BufReader::new(GzDecoder::new(file))))
    } else {
        Ok(Box::new(file))
    }
}

fn line_col(bytes: &[u8], offset: u64) -> (u64, u64) {
    let prefix = &bytes[..(offset as usize).min(bytes.len())];
    scan_line_col(prefix)
}

fn line_col_from_reader(reader: impl BufRead, offset: u64) -> (u64, u64) {
    let mut taken = reader.take(offset);
    let mut prefix = Vec::new();
    if taken.read_to_end(&mut prefix).is_err() {
        return (0, 0);
    }
    scan_line_col(&prefix)
}

fn scan_line_col(prefix: &[u8]) -> (u64, u64) {
    let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count() as u64;
    let col = match prefix.iter().rposition(|&b| b == b'\n') {
        Some(pos) => prefix.len() - pos,
        None => prefix.len() + 1,
    };
    (line, col as u64)
}

/// Internal error that still carries the raw byte offset; entry points turn
/// it into [`Error::XesSyntax`] with a line/column looked up in the source.
enum RawError {
    Syntax { offset: u64, message: String },
    Other(Error),
}

impl RawError {
    fn into_error(self, locate: impl FnOnce(u64) -> (u64, u64)) -> Error {
        match self {
            RawError::Syntax { offset, message } => {
                let (line, column) = locate(offset);
                Error::XesSyntax { line, column, message }
            }
            RawError::Other(e) => e,
        }
    }
}

type RawResult<T> = std::result::Result<T, RawError>;

fn parse_inner(reader: impl BufRead, mode: ParseMode) -> RawResult<XesImport> {
    let mut xml = Reader::from_reader(reader);
    let config = xml.config_mut();
    config.trim_text(true);
    let mut parser = Parser {
        xml,
        mode,
        warnings: Vec::new(),
        buf: Vec::new(),
        skip_buf: Vec::new(),
    };
    let log = parser.parse_document()?;
    Ok(XesImport { log, warnings: parser.warnings })
}

struct Parser<R: BufRead> {
    xml: Reader<R>,
    mode: ParseMode,
    warnings: Vec<String>,
    buf: Vec<u8>,
    skip_buf: Vec<u8>,
}

/// What a single XML tag opened: either a typed XES attribute or a
/// structural element.
enum Tag {
    Attr(&'static str),
    Other(String),
}

impl<R: BufRead> Parser<R> {
    fn syntax(&self, message: impl Into<String>) -> RawError {
        RawError::Syntax { offset: self.xml.buffer_position(), message: message.into() }
    }

    fn schema(&mut self, message: String) -> RawResult<()> {
        match self.mode {
            ParseMode::Strict => Err(RawError::Other(Error::XesContent(message))),
            ParseMode::Lenient => {
                self.warnings.push(message);
                Ok(())
            }
        }
    }

    fn read(&mut self) -> RawResult<XmlEvent<'static>> {
        self.buf.clear();
        match self.xml.read_event_into(&mut self.buf) {
            Ok(event) => Ok(event.into_owned()),
            Err(quick_xml::Error::Io(e)) => Err(RawError::Other(Error::Io(
                std::io::Error::new(e.kind(), e.to_string()),
            ))),
            Err(e) => Err(self.syntax(e.to_string())),
        }
    }

    fn skip_subtree(&mut self, start: &BytesStart) -> RawResult<()> {
        self.skip_buf.clear();
        self.xml
            .read_to_end_into(start.name(), &mut self.skip_buf)
            .map_err(|e| self.syntax(e.to_string()))?;
        Ok(())
    }

    fn attr_text(&self, start: &BytesStart, name: &str) -> RawResult<Option<String>> {
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.syntax(e.to_string()))?;
            if attr.key.local_name().as_ref() == name.as_bytes() {
                let value = attr
                    .normalized_value(XmlVersion::default())
                    .map_err(|e| self.syntax(e.to_string()))?;
                return Ok(Some(value.into_owned()));
            }
        }
        Ok(None)
    }

    fn classify(start: &BytesStart) -> Tag {
        match start.local_name().as_ref() {
            b"string" => Tag::Attr("string"),
            b"date" => Tag::Attr("date"),
            b"int" => Tag::Attr("int"),
            b"float" => Tag::Attr("float"),
            b"boolean" => Tag::Attr("boolean"),
            b"id" => Tag::Attr("id"),
            b"list" => Tag::Attr("list"),
            b"container" => Tag::Attr("container"),
            other => Tag::Other(String::from_utf8_lossy(other).into_owned()),
        }
    }

    fn parse_document(&mut self) -> RawResult<EventLog> {
        loop {
            match self.read()? {
                XmlEvent::Start(start) if start.local_name().as_ref() == b"log" => {
                    return self.parse_log_body();
                }
                XmlEvent::Empty(start) if start.local_name().as_ref() == b"log" => {
                    return Ok(EventLog::new());
                }
                XmlEvent::Start(start) | XmlEvent::Empty(start) => {
                    let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
                    self.schema(format!("unexpected root element <{name}>, expected <log>"))?;
                    if matches!(self.mode, ParseMode::Lenient) {
                        self.skip_subtree(&start)?;
                    }
                }
                XmlEvent::Decl(_)
                | XmlEvent::Comment(_)
                | XmlEvent::DocType(_)
                | XmlEvent::PI(_) => {}
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema("unexpected text outside <log>".to_owned())?;
                }
                XmlEvent::End(_) => return Err(self.syntax("unexpected closing tag")),
                XmlEvent::Eof => return Err(self.syntax("no <log> element found")),
                XmlEvent::GeneralRef(_) => {
                    self.schema("unsupported general entity reference".to_owned())?;
                }
            }
        }
    }

    fn parse_log_body(&mut self) -> RawResult<EventLog> {
        let mut log = EventLog::new();
        let mut trace_index = 0usize;
        loop {
            match self.read()? {
                XmlEvent::Start(start) => match start.local_name().as_ref() {
                    b"trace" => {
                        let trace = self.parse_trace(trace_index)?;
                        log.traces.push(trace);
                        trace_index += 1;
                    }
                    b"global" => self.parse_global(&start, &mut log)?,
                    b"extension" => {
                        self.parse_extension(&start, &mut log)?;
                        self.skip_subtree(&start)?;
                    }
                    b"classifier" => {
                        self.parse_classifier(&start, &mut log)?;
                        self.skip_subtree(&start)?;
                    }
                    _ => match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some((key, value)) = self.parse_attribute(&start, kind, false)? {
                                insert_attr(&mut log.attributes, key, value, self, "log")?;
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <log>"))?;
                            if matches!(self.mode, ParseMode::Lenient) {
                                self.skip_subtree(&start)?;
                            }
                        }
                    },
                },
                XmlEvent::Empty(start) => match start.local_name().as_ref() {
                    b"trace" => {
                        log.traces.push(Trace::new());
                        trace_index += 1;
                    }
                    b"global" => {
                        // No children: declares an empty scope, nothing to record.
                    }
                    b"extension" => self.parse_extension(&start, &mut log)?,
                    b"classifier" => self.parse_classifier(&start, &mut log)?,
                    _ => match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some((key, value)) = self.parse_attribute(&start, kind, true)? {
                                insert_attr(&mut log.attributes, key, value, self, "log")?;
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <log>"))?;
                        }
                    },
                },
                XmlEvent::End(end) if end.local_name().as_ref() == b"log" => return Ok(log),
                XmlEvent::End(_) => return Err(self.syntax("mismatched closing tag in <log>")),
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema("unexpected text content in <log>".to_owned())?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) | XmlEvent::DocType(_)
                | XmlEvent::Decl(_) => {}
                XmlEvent::Eof => return Err(self.syntax("unexpected end of file inside <log>")),
                XmlEvent::GeneralRef(_) => {
                    self.schema("unsupported general entity reference".to_owned())?;
                }
            }
        }
    }

    fn parse_extension(&mut self, start: &BytesStart, log: &mut EventLog) -> RawResult<()> {
        let name = self.attr_text(start, "name")?.unwrap_or_default();
        let prefix = self.attr_text(start, "prefix")?.unwrap_or_default();
        let uri = self.attr_text(start, "uri")?.unwrap_or_default();
        log.extensions.push(Extension { name, prefix, uri });
        Ok(())
    }

    fn parse_classifier(&mut self, start: &BytesStart, log: &mut EventLog) -> RawResult<()> {
        let name = match self.attr_text(start, "name")? {
            Some(n) => n,
            None => {
                self.schema("classifier without a name".to_owned())?;
                return Ok(());
            }
        };
        let keys = self.attr_text(start, "keys")?.unwrap_or_default();
        let keys = split_classifier_keys(&keys);
        if keys.is_empty() {
            self.schema(format!("classifier {name:?} declares no keys"))?;
            return Ok(());
        }
        log.classifiers.insert(name, keys);
        Ok(())
    }

    fn parse_global(&mut self, start: &BytesStart, log: &mut EventLog) -> RawResult<()> {
        let scope = self.attr_text(start, "scope")?.unwrap_or_else(|| "event".to_owned());
        let mut attrs = AttributeMap::new();
        self.parse_attr_children("global", |_parser, key, value| {
            attrs.insert(key, value);
            Ok(())
        })?;
        match scope.as_str() {
            "trace" => log.global_trace_attrs.extend(attrs),
            "event" => log.global_event_attrs.extend(attrs),
            other => self.schema(format!("unknown global scope {other:?}"))?,
        }
        Ok(())
    }

    fn parse_trace(&mut self, trace_index: usize) -> RawResult<Trace> {
        let mut trace = Trace::new();
        let mut event_index = 0usize;
        loop {
            match self.read()? {
                XmlEvent::Start(start) => match start.local_name().as_ref() {
                    b"event" => {
                        if let Some(event) = self.parse_event(trace_index, event_index)? {
                            trace.events.push(event);
                        }
                        event_index += 1;
                    }
                    _ => match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some((key, value)) = self.parse_attribute(&start, kind, false)? {
                                insert_attr(&mut trace.attributes, key, value, self, "trace")?;
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <trace>"))?;
                            if matches!(self.mode, ParseMode::Lenient) {
                                self.skip_subtree(&start)?;
                            }
                        }
                    },
                },
                XmlEvent::Empty(start) => match start.local_name().as_ref() {
                    b"event" => {
                        self.check_event_name(&Event::new(), trace_index, event_index)?;
                        if matches!(self.mode, ParseMode::Lenient) {
                            trace.events.push(Event::new());
                        }
                        event_index += 1;
                    }
                    _ => match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some((key, value)) = self.parse_attribute(&start, kind, true)? {
                                insert_attr(&mut trace.attributes, key, value, self, "trace")?;
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <trace>"))?;
                        }
                    },
                },
                XmlEvent::End(end) if end.local_name().as_ref() == b"trace" => return Ok(trace),
                XmlEvent::End(_) => return Err(self.syntax("mismatched closing tag in <trace>")),
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema("unexpected text content in <trace>".to_owned())?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) => {}
                XmlEvent::Eof => return Err(self.syntax("unexpected end of file inside <trace>")),
                other => {
                    return Err(self.syntax(format!("unexpected XML event in <trace>: {other:?}")))
                }
            }
        }
    }

    /// Parse one `<event>`; returns `None` if lenient mode dropped it.
    fn parse_event(
        &mut self,
        trace_index: usize,
        event_index: usize,
    ) -> RawResult<Option<Event>> {
        let mut event = Event::new();
        loop {
            match self.read()? {
                XmlEvent::Start(start) => match Self::classify(&start) {
                    Tag::Attr(kind) => {
                        if let Some((key, value)) = self.parse_attribute(&start, kind, false)? {
                            insert_attr(&mut event.attributes, key, value, self, "event")?;
                        }
                    }
                    Tag::Other(name) => {
                        self.schema(format!("unknown element <{name}> in <event>"))?;
                        if matches!(self.mode, ParseMode::Lenient) {
                            self.skip_subtree(&start)?;
                        }
                    }
                },
                XmlEvent::Empty(start) => match Self::classify(&start) {
                    Tag::Attr(kind) => {
                        if let Some((key, value)) = self.parse_attribute(&start, kind, true)? {
                            insert_attr(&mut event.attributes, key, value, self, "event")?;
                        }
                    }
                    Tag::Other(name) => {
                        self.schema(format!("unknown element <{name}> in <event>"))?;
                    }
                },
                XmlEvent::End(end) if end.local_name().as_ref() == b"event" => {
                    self.check_event_name(&event, trace_index, event_index)?;
                    return Ok(Some(event));
                }
                XmlEvent::End(_) => return Err(self.syntax("mismatched closing tag in <event>")),
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema("unexpected text content in <event>".to_owned())?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) => {}
                XmlEvent::Eof => return Err(self.syntax("unexpected end of file inside <event>")),
                other => {
                    return Err(self.syntax(format!("unexpected XML event in <event>: {other:?}")))
                }
            }
        }
    }

    fn check_event_name(
        &mut self,
        event: &Event,
        trace_index: usize,
        event_index: usize,
    ) -> RawResult<()> {
        match event.get(CONCEPT_NAME) {
            Some(AttributeValue::String(_)) => Ok(()),
            Some(other) => self.schema(format!(
                "event {event_index} of trace {trace_index}: concept:name is a {} value, \
                 expected string",
                other.type_name()
            )),
            None => self.schema(format!(
                "event {event_index} of trace {trace_index} has no concept:name"
            )),
        }
    }

    /// Parse one attribute element. `kind` is the already-matched tag name,
    /// `empty` whether the tag was self-closing. Returns `None` if lenient
    /// mode dropped the attribute.
    fn parse_attribute(
        &mut self,
        start: &BytesStart,
        kind: &'static str,
        empty: bool,
    ) -> RawResult<Option<(String, AttributeValue)>> {
        let start = start.to_owned();
        let key = match self.attr_text(&start, "key")? {
            Some(k) => k,
            None => {
                self.schema(format!("<{kind}> element without a key"))?;
                if !empty {
                    self.skip_subtree(&start)?;
                }
                return Ok(None);
            }
        };

        if kind == "list" {
            let mut items = Vec::new();
            if !empty {
                self.parse_list_children(&mut items)?;
            }
            return Ok(Some((key, AttributeValue::List(items))));
        }
        if kind == "container" {
            let mut map = AttributeMap::new();
            if !empty {
                self.parse_attr_children("container", |_, k, v| {
                    map.insert(k, v);
                    Ok(())
                })?;
            }
            return Ok(Some((key, AttributeValue::Container(map))));
        }

        let text = match self.attr_text(&start, "value")? {
            Some(v) => v,
            None => {
                self.schema(format!("<{kind}> attribute {key:?} without a value"))?;
                if !empty {
                    self.skip_subtree(&start)?;
                }
                return Ok(None);
            }
        };
        let value = match self.parse_scalar(kind, &key, text)? {
            Some(v) => v,
            None => {
                if !empty {
                    self.skip_subtree(&start)?;
                }
                return Ok(None);
            }
        };
        if !empty {
            // Nested attributes under scalar values are not represented in
            // the model; treat them like unknown content.
            self.consume_scalar_children(kind, &key)?;
        }
        Ok(Some((key, value)))
    }

    fn parse_scalar(
        &mut self,
        kind: &'static str,
        key: &str,
        text: String,
    ) -> RawResult<Option<AttributeValue>> {
        let fallback = |parser: &mut Self, what: &str, text: String| {
            parser.schema(format!("attribute {key:?}: unparseable {what} {text:?}"))?;
            Ok(Some(AttributeValue::String(text)))
        };
        match kind {
            "string" => Ok(Some(AttributeValue::String(text))),
            "id" => Ok(Some(AttributeValue::Id(text))),
            "date" => match Timestamp::parse_from_rfc3339(&text) {
                Ok(d) => Ok(Some(AttributeValue::Date(d))),
                Err(_) => fallback(self, "timestamp", text),
            },
            "int" => match text.parse::<i64>() {
                Ok(n) => Ok(Some(AttributeValue::Int(n))),
                Err(_) => fallback(self, "integer", text),
            },
            "float" => match text.parse::<f64>() {
                Ok(x) => Ok(Some(AttributeValue::Float(x))),
                Err(_) => fallback(self, "float", text),
            },
            "boolean" => match text.as_str() {
                "true" => Ok(Some(AttributeValue::Boolean(true))),
                "false" => Ok(Some(AttributeValue::Boolean(false))),
                _ => fallback(self, "boolean", text),
            },
            other => Err(self.syntax(format!("internal: unhandled scalar kind {other}"))),
        }
    }

    /// Consume children of a non-self-closing scalar attribute up to its
    /// closing tag, reporting anything that is not ignorable.
    fn consume_scalar_children(&mut self, kind: &'static str, key: &str) -> RawResult<()> {
        loop {
            match self.read()? {
                XmlEvent::Start(start) => {
                    let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
                    self.schema(format!(
                        "attribute {key:?}: nested <{name}> under a scalar value is not kept"
                    ))?;
                    self.skip_subtree(&start)?;
                }
                XmlEvent::Empty(start) => {
                    let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
                    self.schema(format!(
                        "attribute {key:?}: nested <{name}> under a scalar value is not kept"
                    ))?;
                }
                XmlEvent::End(end) if end.local_name().as_ref() == kind.as_bytes() => {
                    return Ok(());
                }
                XmlEvent::End(_) => {
                    return Err(self.syntax(format!("mismatched closing tag in <{kind}>")))
                }
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema(format!("attribute {key:?}: unexpected text content"))?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) => {}
                XmlEvent::Eof => {
                    return Err(self.syntax(format!("unexpected end of file inside <{kind}>")))
                }
                other => {
                    return Err(self.syntax(format!("unexpected XML event: {other:?}")))
                }
            }
        }
    }

    /// Parse attribute children of `<list>`, transparently unwrapping the
    /// legacy `<values>` wrapper some writers emit.
    fn parse_list_children(&mut self, items: &mut Vec<(String, AttributeValue)>) -> RawResult<()> {
        let mut depth_in_values = false;
        loop {
            match self.read()? {
                XmlEvent::Start(start) => {
                    if start.local_name().as_ref() == b"values" {
                        depth_in_values = true;
                        continue;
                    }
                    match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some(kv) = self.parse_attribute(&start, kind, false)? {
                                items.push(kv);
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <list>"))?;
                            if matches!(self.mode, ParseMode::Lenient) {
                                self.skip_subtree(&start)?;
                            }
                        }
                    }
                }
                XmlEvent::Empty(start) => {
                    if start.local_name().as_ref() == b"values" {
                        continue;
                    }
                    match Self::classify(&start) {
                        Tag::Attr(kind) => {
                            if let Some(kv) = self.parse_attribute(&start, kind, true)? {
                                items.push(kv);
                            }
                        }
                        Tag::Other(name) => {
                            self.schema(format!("unknown element <{name}> in <list>"))?;
                        }
                    }
                }
                XmlEvent::End(end) if end.local_name().as_ref() == b"values" => {
                    if !depth_in_values {
                        return Err(self.syntax("mismatched </values>"));
                    }
                    depth_in_values = false;
                }
                XmlEvent::End(end) if end.local_name().as_ref() == b"list" => return Ok(()),
                XmlEvent::End(_) => return Err(self.syntax("mismatched closing tag in <list>")),
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema("unexpected text content in <list>".to_owned())?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) => {}
                XmlEvent::Eof => return Err(self.syntax("unexpected end of file inside <list>")),
                other => {
                    return Err(self.syntax(format!("unexpected XML event in <list>: {other:?}")))
                }
            }
        }
    }

    /// Parse attribute children of a container-like element (`<global>` or
    /// `<container>`) until its closing tag.
    fn parse_attr_children(
        &mut self,
        parent: &'static str,
        mut sink: impl FnMut(&mut Self, String, AttributeValue) -> RawResult<()>,
    ) -> RawResult<()> {
        loop {
            match self.read()? {
                XmlEvent::Start(start) => match Self::classify(&start) {
                    Tag::Attr(kind) => {
                        if let Some((key, value)) = self.parse_attribute(&start, kind, false)? {
                            sink(self, key, value)?;
                        }
                    }
                    Tag::Other(name) => {
                        self.schema(format!("unknown element <{name}> in <{parent}>"))?;
                        if matches!(self.mode, ParseMode::Lenient) {
                            self.skip_subtree(&start)?;
                        }
                    }
                },
                XmlEvent::Empty(start) => match Self::classify(&start) {
                    Tag::Attr(kind) => {
                        if let Some((key, value)) = self.parse_attribute(&start, kind, true)? {
                            sink(self, key, value)?;
                        }
                    }
                    Tag::Other(name) => {
                        self.schema(format!("unknown element <{name}> in <{parent}>"))?;
                    }
                },
                XmlEvent::End(end) if end.local_name().as_ref() == parent.as_bytes() => {
                    return Ok(());
                }
                XmlEvent::End(_) => {
                    return Err(self.syntax(format!("mismatched closing tag in <{parent}>")))
                }
                XmlEvent::Text(t) if is_blank(&t) => {}
                XmlEvent::Text(_) | XmlEvent::CData(_) => {
                    self.schema(format!("unexpected text content in <{parent}>"))?;
                }
                XmlEvent::Comment(_) | XmlEvent::PI(_) => {}
                XmlEvent::Eof => {
                    return Err(self.syntax(format!("unexpected end of file inside <{parent}>")))
                }
                other => {
                    return Err(self.syntax(format!("unexpected XML event: {other:?}")))
                }
            }
        }
    }
}

fn insert_attr<R: BufRead>(
    map: &mut AttributeMap,
    key: String,
    value: AttributeValue,
    parser: &mut Parser<R>,
    owner: &str,
) -> RawResult<()> {
    if map.contains_key(&key) {
        parser.schema(format!("duplicate attribute key {key:?} in <{owner}>; keeping the last"))?;
    }
    map.insert(key, value);
    Ok(())
}

fn is_blank(text: &BytesText) -> bool {
    text.as_ref().iter().all(|b| b.is_ascii_whitespace())
}

/// Split a classifier `keys` attribute into keys. Keys containing spaces are
/// wrapped in single quotes, per OpenXES convention.
fn split_classifier_keys(keys: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = keys.trim_start();
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('\'') {
            match stripped.find('\'') {
                Some(end) => {
                    out.push(stripped[..end].to_owned());
                    rest = stripped[end + 1..].trim_start();
                }
                None => {
                    // Unterminated quote: take the remainder verbatim.
                    out.push(stripped.to_owned());
                    break;
                }
            }
        } else {
            let end = rest.find(' ').unwrap_or(rest.len());
            out.push(rest[..end].to_owned());
            rest = rest[end..].trim_start();
        }
    }
    out.retain(|k| !k.is_empty());
    out
}

fn join_classifier_keys(keys: &[String]) -> String {
    keys.iter()
        .map(|k| {
            if k.contains(' ') {
                format!("'{k}'")
            } else {
                k.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Textual form of a scalar value, matching how it is written to XES.
/// Composite values render as their JSON form.
pub(super) fn value_to_text(value: &AttributeValue) -> String {
    match value {
        AttributeValue::String(s) | AttributeValue::Id(s) => s.clone(),
        AttributeValue::Int(n) => n.to_string(),
        AttributeValue::Float(x) => format!("{x:?}"),
        AttributeValue::Boolean(b) => b.to_string(),
        AttributeValue::Date(d) => d.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true),
        AttributeValue::List(_) | AttributeValue::Container(_) => {
            super::json::value_to_json(value).to_string()
        }
    }
}

/// Serialize a log as XES with two-space indentation. Output is
/// deterministic: same log, same bytes.
pub fn write_xes(log: &EventLog, writer: impl Write) -> Result<()> {
    let mut xml = Writer::new_with_indent(writer, b' ', 2);
    xml.write_event(XmlEvent::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;

    let mut root = BytesStart::new("log");
    root.push_attribute(("xes.version", "1849-2016"));
    root.push_attribute(("xes.features", "nested-attributes"));
    xml.write_event(XmlEvent::Start(root))?;

    for ext in &log.extensions {
        let mut e = BytesStart::new("extension");
        e.push_attribute(escaped_attr("name", &ext.name));
        e.push_attribute(escaped_attr("prefix", &ext.prefix));
        e.push_attribute(escaped_attr("uri", &ext.uri));
        xml.write_event(XmlEvent::Empty(e))?;
    }
    for (scope, attrs) in [("trace", &log.global_trace_attrs), ("event", &log.global_event_attrs)]
    {
        if attrs.is_empty() {
            continue;
        }
        let mut g = BytesStart::new("global");
        g.push_attribute(("scope", scope));
        xml.write_event(XmlEvent::Start(g))?;
        for (key, value) in attrs {
            write_attribute(&mut xml, key, value)?;
        }
        xml.write_event(XmlEvent::End(BytesStart::new("global").to_end()))?;
    }
    for (name, keys) in &log.classifiers {
        let mut c = BytesStart::new("classifier");
        c.push_attribute(escaped_attr("name", name));
        let keys_text = join_classifier_keys(keys);
        c.push_attribute(escaped_attr("keys", &keys_text));
        xml.write_event(XmlEvent::Empty(c))?;
    }
    for (key, value) in &log.attributes {
        write_attribute(&mut xml, key, value)?;
    }

    for trace in &log.traces {
        if trace.attributes.is_empty() && trace.events.is_empty() {
            xml.write_event(XmlEvent::Empty(BytesStart::new("trace")))?;
            continue;
        }
        xml.write_event(XmlEvent::Start(BytesStart::new("trace")))?;
        for (key, value) in &trace.attributes {
            write_attribute(&mut xml, key, value)?;
        }
        for event in &trace.events {
            if event.attributes.is_empty() {
                xml.write_event(XmlEvent::Empty(BytesStart::new("event")))?;
                continue;
            }
            xml.write_event(XmlEvent::Start(BytesStart::new("event")))?;
            for (key, value) in &event.attributes {
                write_attribute(&mut xml, key, value)?;
            }
            xml.write_event(XmlEvent::End(BytesStart::new("event").to_end()))?;
        }
        xml.write_event(XmlEvent::End(BytesStart::new("trace").to_end()))?;
    }

    xml.write_event(XmlEvent::End(BytesStart::new("log").to_end()))?;
    // Trailing newline so the document ends like a text file should.
    xml.get_mut().write_all(b"\n")?;
    Ok(())
}

/// Serialize a log as gzip-compressed XES.
pub fn write_xes_gz(log: &EventLog, writer: impl Write) -> Result<()> {
    let mut encoder = GzEncoder::new(writer, Compression::default());
    write_xes(log, &mut encoder)?;
    encoder.finish()?;
    Ok(())
}

fn write_attribute<W: Write>(
    xml: &mut Writer<W>,
    key: &str,
    value: &AttributeValue,
) -> Result<()> {
    match value {
        AttributeValue::List(items) => {
            let mut start = BytesStart::new("list");
            start.push_attribute(escaped_attr("key", key));
            if items.is_empty() {
                xml.write_event(XmlEvent::Empty(start))?;
            } else {
                xml.write_event(XmlEvent::Start(start))?;
                for (k, v) in items {
                    write_attribute(xml, k, v)?;
                }
                xml.write_event(XmlEvent::End(BytesStart::new("list").to_end()))?;
            }
        }
        AttributeValue::Container(map) => {
            let mut start = BytesStart::new("container");
            start.push_attribute(escaped_attr("key", key));
            if map.is_empty() {
                xml.write_event(XmlEvent::Empty(start))?;
            } else {
                xml.write_event(XmlEvent::Start(start))?;
                for (k, v) in map {
                    write_attribute(xml, k, v)?;
                }
                xml.write_event(XmlEvent::End(BytesStart::new("container").to_end()))?;
            }
        }
        scalar => {
            let mut start = BytesStart::new(scalar.type_name());
            start.push_attribute(escaped_attr("key", key));
            let text = value_to_text(scalar);
            start.push_attribute(escaped_attr("value", &text));
            xml.write_event(XmlEvent::Empty(start))?;
        }
    }
    Ok(())
}
