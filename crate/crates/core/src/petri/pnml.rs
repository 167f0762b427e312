//! PNML import and export for accepting Petri nets.
//!
//! The dialect matches what the mainstream process-mining tools exchange:
//! `<initialMarking>` under places, a `<finalmarkings>` block under the net,
//! and silent transitions tagged with a ProM `toolspecific` element whose
//! activity is `$invisible$`.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use quick_xml::events::{BytesDecl, BytesStart, BytesText, Event as XmlEvent};
use quick_xml::{Reader, Writer, XmlVersion};

use super::{AcceptingPetriNet, Marking, PetriNet};
use crate::error::{Error, Result};
use crate::xml::attr as escaped_attr;

const NET_TYPE: &str = "http://www.pnml.org/version-2009/grammar/pnmlcoremodel";
const INVISIBLE: &str = "$invisible$";

/// Serialize deterministically: places, transitions and arcs each in sorted
/// order, two-space indentation.
pub fn write_pnml(apn: &AcceptingPetriNet, writer: impl Write) -> Result<()> {
    let mut xml = Writer::new_with_indent(writer, b' ', 2);
    xml.write_event(XmlEvent::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    xml.write_event(XmlEvent::Start(BytesStart::new("pnml")))?;

    let mut net_el = BytesStart::new("net");
    net_el.push_attribute(("id", "net1"));
    net_el.push_attribute(("type", NET_TYPE));
    xml.write_event(XmlEvent::Start(net_el))?;

    let mut page = BytesStart::new("page");
    page.push_attribute(("id", "page1"));
    xml.write_event(XmlEvent::Start(page))?;

    for place in apn.net.places() {
        let mut el = BytesStart::new("place");
        el.push_attribute(escaped_attr("id", place));
        xml.write_event(XmlEvent::Start(el))?;
        write_text_block(&mut xml, "name", place)?;
        let tokens = apn.initial_marking.tokens(place);
        if tokens > 0 {
            write_text_block(&mut xml, "initialMarking", &tokens.to_string())?;
        }
        xml.write_event(XmlEvent::End(BytesStart::new("place").to_end()))?;
    }

    for (id, label) in apn.net.transitions() {
        let mut el = BytesStart::new("transition");
        el.push_attribute(escaped_attr("id", id));
        xml.write_event(XmlEvent::Start(el))?;
        write_text_block(&mut xml, "name", label.as_deref().unwrap_or(id))?;
        if label.is_none() {
            let mut tool = BytesStart::new("toolspecific");
            tool.push_attribute(("tool", "ProM"));
            tool.push_attribute(("version", "6.4"));
            tool.push_attribute(("activity", INVISIBLE));
            xml.write_event(XmlEvent::Empty(tool))?;
        }
        xml.write_event(XmlEvent::End(BytesStart::new("transition").to_end()))?;
    }

    for (i, (source, target)) in apn.net.arcs().iter().enumerate() {
        let mut el = BytesStart::new("arc");
        el.push_attribute(("id", format!("arc{i}").as_str()));
        el.push_attribute(escaped_attr("source", source));
        el.push_attribute(escaped_attr("target", target));
        xml.write_event(XmlEvent::Empty(el))?;
    }

    xml.write_event(XmlEvent::End(BytesStart::new("page").to_end()))?;

    if !apn.final_marking.is_empty() {
        xml.write_event(XmlEvent::Start(BytesStart::new("finalmarkings")))?;
        xml.write_event(XmlEvent::Start(BytesStart::new("marking")))?;
        for (place, tokens) in apn.final_marking.iter() {
            let mut el = BytesStart::new("place");
            el.push_attribute(escaped_attr("idref", place));
            xml.write_event(XmlEvent::Start(el))?;
            write_text_el(&mut xml, &tokens.to_string())?;
            xml.write_event(XmlEvent::End(BytesStart::new("place").to_end()))?;
        }
        xml.write_event(XmlEvent::End(BytesStart::new("marking").to_end()))?;
        xml.write_event(XmlEvent::End(BytesStart::new("finalmarkings").to_end()))?;
    }

    xml.write_event(XmlEvent::End(BytesStart::new("net").to_end()))?;
    xml.write_event(XmlEvent::End(BytesStart::new("pnml").to_end()))?;
    xml.get_mut().write_all(b"\n")?;
    Ok(())
}

fn write_text_block<W: Write>(xml: &mut Writer<W>, element: &str, text: &str) -> Result<()> {
    xml.write_event(XmlEvent::Start(BytesStart::new(element)))?;
    write_text_el(xml, text)?;
    xml.write_event(XmlEvent::End(BytesStart::new(element).to_end()))?;
    Ok(())
}

fn write_text_el<W: Write>(xml: &mut Writer<W>, text: &str) -> Result<()> {
    xml.write_event(XmlEvent::Start(BytesStart::new("text")))?;
    xml.write_event(XmlEvent::Text(BytesText::new(text)))?;
    xml.write_event(XmlEvent::End(BytesStart::new("text").to_end()))?;
    Ok(())
}

pub fn parse_pnml_file(path: impl AsRef<Path>) -> Result<AcceptingPetriNet> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    parse_pnml_bytes(&bytes)
}

/// Parse the first `<net>` of a PNML document. Arc identifiers are ignored;
/// equality of a round-tripped net is structural.
pub fn parse_pnml_bytes(bytes: &[u8]) -> Result<AcceptingPetriNet> {
    let mut xml = Reader::from_reader(bytes);
    xml.config_mut().trim_text(true);

    let mut net = PetriNet::new();
    let mut initial = Marking::new();
    let mut final_marking = Marking::new();
    // (source, target) pairs are deferred so arcs written before their
    // endpoints still resolve.
    let mut arcs: Vec<(String, String)> = Vec::new();

    let mut buf = Vec::new();
    let mut in_net = false;
    let mut seen_net = false;
    loop {
        buf.clear();
        match xml.read_event_into(&mut buf).map_err(syntax)? {
            XmlEvent::Start(el) => match el.local_name().as_ref() {
                b"net" if !seen_net => {
                    in_net = true;
                    seen_net = true;
                }
                b"net" => skip(&mut xml, &el)?, // only the first net is read
                b"place" if in_net => {
                    let id = required_attr(&el, "id")?;
                    let body = read_node_body(&mut xml, "place")?;
                    net.add_place(&id)?;
                    if let Some(text) = body.initial_marking {
                        let tokens: u64 = text.trim().parse().map_err(|_| {
                            Error::Pnml(format!("place {id:?}: bad initialMarking {text:?}"))
                        })?;
                        initial.add(id, tokens);
                    }
                }
                b"transition" if in_net => {
                    let id = required_attr(&el, "id")?;
                    let body = read_node_body(&mut xml, "transition")?;
                    // A transition with no name at all stays visible, with
                    // its id as label, matching common exports.
                    let label = if body.invisible {
                        None
                    } else {
                        Some(body.name.unwrap_or_else(|| id.clone()))
                    };
                    net.add_transition(id, label.as_deref())?;
                }
                b"arc" if in_net => {
                    arcs.push((required_attr(&el, "source")?, required_attr(&el, "target")?));
                }
                b"finalmarkings" | b"finalMarkings" if in_net => {
                    parse_final_markings(&mut xml, &mut final_marking)?;
                }
                _ => {}
            },
            XmlEvent::Empty(el) => match el.local_name().as_ref() {
                b"net" if !seen_net => seen_net = true,
                b"place" if in_net => {
                    net.add_place(required_attr(&el, "id")?)?;
                }
                b"transition" if in_net => {
                    let id = required_attr(&el, "id")?;
                    let label = id.clone();
                    net.add_transition(id, Some(&label))?;
                }
                b"arc" if in_net => {
                    arcs.push((required_attr(&el, "source")?, required_attr(&el, "target")?));
                }
                _ => {}
            },
            XmlEvent::End(el) if el.local_name().as_ref() == b"net" => {
                in_net = false;
            }
            XmlEvent::Eof => break,
            _ => {}
        }
    }
    if !seen_net {
        return Err(Error::Pnml("document contains no <net> element".into()));
    }
    for (source, target) in arcs {
        net.add_arc(source, target)?;
    }
    for (place, _) in initial.iter() {
        if !net.is_place(place) {
            return Err(Error::Pnml(format!(
                "initial marking references unknown place {place:?}"
            )));
        }
    }
    AcceptingPetriNet::new(net, initial, final_marking)
}

fn syntax(e: quick_xml::Error) -> Error {
    Error::Pnml(format!("malformed XML: {e}"))
}

fn required_attr(el: &BytesStart, name: &str) -> Result<String> {
    for attr in el.attributes() {
        let attr = attr.map_err(|e| Error::Pnml(format!("bad attribute: {e}")))?;
        if attr.key.local_name().as_ref() == name.as_bytes() {
            return Ok(attr
                .normalized_value(XmlVersion::default())
                .map_err(|e| Error::Pnml(format!("bad attribute value: {e}")))?
                .into_owned());
        }
    }
    let el_name = String::from_utf8_lossy(el.name().as_ref()).into_owned();
    Err(Error::Pnml(format!("<{el_name}> is missing the {name:?} attribute")))
}

#[derive(Default)]
struct NodeBody {
    name: Option<String>,
    initial_marking: Option<String>,
    invisible: bool,
}

/// Read the children of a `<place>` or `<transition>` element up to its end
/// tag, collecting name text, initial marking text and the invisible flag.
fn read_node_body(xml: &mut Reader<&[u8]>, parent: &str) -> Result<NodeBody> {
    let mut body = NodeBody::default();
    let mut buf = Vec::new();
    // Which text-bearing child we are inside, if any.
    let mut capture: Option<&'static str> = None;
    let mut depth = 0u32;
    loop {
        buf.clear();
        match xml.read_event_into(&mut buf).map_err(syntax)? {
            XmlEvent::Start(el) => {
                depth += 1;
                match el.local_name().as_ref() {
                    b"name" => capture = Some("name"),
                    b"initialMarking" => capture = Some("initialMarking"),
                    b"toolspecific" => body.invisible |= is_invisible(&el)?,
                    _ => {}
                }
            }
            XmlEvent::Empty(el) => {
                if el.local_name().as_ref() == b"toolspecific" {
                    body.invisible |= is_invisible(&el)?;
                }
            }
            XmlEvent::Text(t) => {
                if let Some(kind) = capture {
                    let text = t
                        .decode()
                        .map_err(|e| Error::Pnml(format!("bad text content: {e}")))?
                        .into_owned();
                    match kind {
                        "name" => body.name = Some(text),
                        _ => body.initial_marking = Some(text),
                    }
                }
            }
            XmlEvent::End(el) => {
                if el.local_name().as_ref() == parent.as_bytes() && depth == 0 {
                    return Ok(body);
                }
                match el.local_name().as_ref() {
                    b"name" | b"initialMarking" => capture = None,
                    _ => {}
                }
                depth = depth.saturating_sub(1);
            }
            XmlEvent::Eof => {
                return Err(Error::Pnml(format!("unexpected end of file inside <{parent}>")))
            }
            _ => {}
        }
    }
}

fn is_invisible(el: &BytesStart) -> Result<bool> {
    Ok(optional_attr(el, "activity")?.as_deref() == Some(INVISIBLE))
}

fn optional_attr(el: &BytesStart, name: &str) -> Result<Option<String>> {
    for attr in el.attributes() {
        let attr = attr.map_err(|e| Error::Pnml(format!("bad attribute: {e}")))?;
        if attr.key.local_name().as_ref() == name.as_bytes() {
            return Ok(Some(
                attr.normalized_value(XmlVersion::default())
                    .map_err(|e| Error::Pnml(format!("bad attribute value: {e}")))?
                    .into_owned(),
            ));
        }
    }
    Ok(None)
}

fn parse_final_markings(xml: &mut Reader<&[u8]>, final_marking: &mut Marking) -> Result<()> {
    let mut buf = Vec::new();
    let mut current_place: Option<String> = None;
    loop {
        buf.clear();
        match xml.read_event_into(&mut buf).map_err(syntax)? {
            XmlEvent::Start(el) => {
                if el.local_name().as_ref() == b"place" {
                    current_place = Some(required_attr(&el, "idref")?);
                }
            }
            XmlEvent::Text(t) => {
                if let Some(place) = current_place.clone() {
                    let text = t
                        .decode()
                        .map_err(|e| Error::Pnml(format!("bad text content: {e}")))?;
                    let tokens: u64 = text.trim().parse().map_err(|_| {
                        Error::Pnml(format!("final marking of {place:?}: bad count {text:?}"))
                    })?;
                    final_marking.add(place, tokens);
                }
            }
            XmlEvent::End(el) => match el.local_name().as_ref() {
                b"place" => current_place = None,
                b"finalmarkings" | b"finalMarkings" => return Ok(()),
                _ => {}
            },
            XmlEvent::Eof => {
                return Err(Error::Pnml("unexpected end of file in <finalmarkings>".into()))
            }
            _ => {}
        }
    }
}

fn skip(xml: &mut Reader<&[u8]>, el: &BytesStart) -> Result<()> {
    let mut buf = Vec::new();
    xml.read_to_end_into(el.name(), &mut buf).map_err(syntax)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::tests::xor_net;
    use super::*;

    #[test]
    fn round_trip_preserves_structure_and_markings() {
        let apn = xor_net();
        let mut bytes = Vec::new();
        write_pnml(&apn, &mut bytes).unwrap();
        let parsed = parse_pnml_bytes(&bytes).unwrap();
        assert_eq!(parsed, apn);
    }

    #[test]
    fn output_is_byte_stable() {
        let apn = xor_net();
        let mut a = Vec::new();
        write_pnml(&apn, &mut a).unwrap();
        let mut b = Vec::new();
        write_pnml(&parse_pnml_bytes(&a).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn silent_transitions_survive_round_trip() {
        let mut net = PetriNet::new();
        net.add_place("p0").unwrap();
        net.add_place("p1").unwrap();
        net.add_transition("tau_1", None).unwrap();
        net.add_arc("p0", "tau_1").unwrap();
        net.add_arc("tau_1", "p1").unwrap();
        let apn =
            AcceptingPetriNet::new(net, Marking::single("p0"), Marking::single("p1")).unwrap();
        let mut bytes = Vec::new();
        write_pnml(&apn, &mut bytes).unwrap();
        let parsed = parse_pnml_bytes(&bytes).unwrap();
        assert!(parsed.net.is_silent("tau_1"));
        assert_eq!(parsed, apn);
    }

    #[test]
    fn foreign_pnml_without_final_markings() {
        let doc = r#"<?xml version="1.0"?>
<pnml><net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet"><page id="g">
  <place id="s"><initialMarking><text>2</text></initialMarking></place>
  <place id="e"/>
  <transition id="t"><name><text>work</text></name></transition>
  <arc id="a1" source="s" target="t"/>
  <arc id="a2" source="t" target="e"/>
</page></net></pnml>"#;
        let apn = parse_pnml_bytes(doc.as_bytes()).unwrap();
        assert_eq!(apn.initial_marking.tokens("s"), 2);
        assert!(apn.final_marking.is_empty());
        assert_eq!(apn.net.label("t"), Some("work"));
        assert_eq!(apn.net.num_arcs(), 2);
    }

    #[test]
    fn unnamed_transition_gets_its_id_as_label() {
        let doc = r#"<pnml><net id="n"><page id="g">
            <place id="p"/><transition id="t7"/>
            <arc id="a" source="p" target="t7"/>
        </page></net></pnml>"#;
        let apn = parse_pnml_bytes(doc.as_bytes()).unwrap();
        assert_eq!(apn.net.label("t7"), Some("t7"));
    }

    #[test]
    fn dangling_arc_is_rejected() {
        let doc = r#"<pnml><net id="n"><page id="g">
            <place id="p"/>
            <arc id="a" source="p" target="ghost"/>
        </page></net></pnml>"#;
        assert!(parse_pnml_bytes(doc.as_bytes()).is_err());
    }
}
