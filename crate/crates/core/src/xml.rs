//! Shared XML writing helpers.

use std::borrow::Cow;

use quick_xml::events::attributes::Attribute;
use quick_xml::name::QName;

/// Build an attribute with the value fully escaped, including tab, newline
/// and carriage return as character references. Conformant parsers normalize
/// literal whitespace in attribute values to spaces, so leaving it raw would
/// corrupt the value on the next parse; quick-xml's built-in escaping covers
/// only `<>&'"`.
pub(crate) fn attr<'a>(key: &'a str, value: &'a str) -> Attribute<'a> {
    let value = match escape_attr_value(value) {
        Cow::Borrowed(s) => Cow::Borrowed(s.as_bytes()),
        Cow::Owned(s) => Cow::Owned(s.into_bytes()),
    };
    Attribute { key: QName(key.as_bytes()), value }
}

fn escape_attr_value(raw: &str) -> Cow<'_, str> {
    fn replacement(c: char) -> Option<&'static str> {
        match c {
            '&' => Some("&amp;"),
            '<' => Some("&lt;"),
            '>' => Some("&gt;"),
            '"' => Some("&quot;"),
            '\'' => Some("&apos;"),
            '\t' => Some("&#9;"),
            '\n' => Some("&#10;"),
            '\r' => Some("&#13;"),
            _ => None,
        }
    }
    let Some(first) = raw.find(|c| replacement(c).is_some()) else {
        return Cow::Borrowed(raw);
    };
    let mut out = String::with_capacity(raw.len() + 8);
    out.push_str(&raw[..first]);
    for c in raw[first..].chars() {
        match replacement(c) {
            Some(text) => out.push_str(text),
            None => out.push(c),
        }
    }
    Cow::Owned(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values_borrow() {
        assert!(matches!(escape_attr_value("Create Fine"), Cow::Borrowed(_)));
    }

    #[test]
    fn markup_and_whitespace_escape() {
        assert_eq!(
            escape_attr_value("a<b> & \"c\"\t'd'\r\n"),
            "a&lt;b&gt; &amp; &quot;c&quot;&#9;&apos;d&apos;&#13;&#10;"
        );
    }

    #[test]
    fn attr_wraps_escaped_bytes() {
        let a = attr("key", "x\ny");
        assert_eq!(a.key.as_ref(), b"key");
        assert_eq!(a.value.as_ref(), b"x&#10;y");
    }
}
