//! Graphviz DOT export for accepting Petri nets.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::AcceptingPetriNet;

/// Render the net in DOT, left to right. Places are circles (the initial
/// marking shows as a token count, final places get a double border),
/// transitions are boxes, silent transitions filled black. `annotations`
/// adds an extra label line to matching node ids — e.g. frequency counts.
///
/// Nodes and edges appear in sorted order, so output is deterministic.
pub fn export_dot(
    apn: &AcceptingPetriNet,
    annotations: Option<&BTreeMap<String, String>>,
) -> String {
    let annotation = |id: &str| -> String {
        match annotations.and_then(|a| a.get(id)) {
            Some(note) => format!("\\n{}", escape(note)),
            None => String::new(),
        }
    };

    let mut out = String::new();
    out.push_str("digraph petrinet {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontsize=12];\n");

    for place in apn.net.places() {
        let tokens = apn.initial_marking.tokens(place);
        let token_label = match tokens {
            0 => String::new(),
            1 => "\\n●".to_owned(),
            n => format!("\\n●×{n}"),
        };
        let peripheries = if apn.final_marking.tokens(place) > 0 { 2 } else { 1 };
        writeln!(
            out,
            "  \"{}\" [shape=circle, peripheries={}, label=\"{}{}{}\"];",
            escape(place),
            peripheries,
            escape(place),
            token_label,
            annotation(place)
        )
        .unwrap();
    }
    for (id, label) in apn.net.transitions() {
        match label {
            Some(label) => writeln!(
                out,
                "  \"{}\" [shape=box, label=\"{}{}\"];",
                escape(id),
                escape(label),
                annotation(id)
            )
            .unwrap(),
            None => writeln!(
                out,
                "  \"{}\" [shape=box, style=filled, fillcolor=black, label=\"{}\"];",
                escape(id),
                annotation(id).trim_start_matches("\\n")
            )
            .unwrap(),
        }
    }
    for (source, target) in apn.net.arcs() {
        writeln!(out, "  \"{}\" -> \"{}\";", escape(source), escape(target)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::super::tests::xor_net;
    use super::*;

    #[test]
    fn dot_lists_every_node_and_arc() {
        let apn = xor_net();
        let dot = export_dot(&apn, None);
        assert!(dot.starts_with("digraph petrinet {"));
        for node in ["\"source\"", "\"sink\"", "\"t_a\"", "\"t_d\""] {
            assert!(dot.contains(node), "missing {node} in:\n{dot}");
        }
        assert!(dot.contains("\"p1\" -> \"t_b\";"));
        assert!(dot.contains("●"), "initial marking should be drawn");
        assert!(dot.contains("peripheries=2"), "final place should be doubled");
        assert_eq!(dot, export_dot(&apn, None), "output must be deterministic");
    }

    #[test]
    fn annotations_are_appended_to_labels() {
        let apn = xor_net();
        let mut notes = BTreeMap::new();
        notes.insert("t_a".to_owned(), "57".to_owned());
        let dot = export_dot(&apn, Some(&notes));
        assert!(dot.contains("label=\"a\\n57\""));
    }

    #[test]
    fn quotes_in_labels_are_escaped() {
        let mut net = super::super::PetriNet::new();
        net.add_place("p \"x\"").unwrap();
        let apn = super::super::AcceptingPetriNet::new(
            net,
            super::super::Marking::new(),
            super::super::Marking::new(),
        )
        .unwrap();
        let dot = export_dot(&apn, None);
        assert!(dot.contains("\"p \\\"x\\\"\""));
    }
}
