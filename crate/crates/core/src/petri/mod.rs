//! Petri nets: places, labeled or silent transitions, arcs, markings and
//! firing semantics, plus the structural checks the miners and metrics rely
//! on. All arcs have weight one, which is all the discovery algorithms here
//! ever produce.

mod dot;
mod pnml;

pub use dot::export_dot;
pub use pnml::{parse_pnml_bytes, parse_pnml_file, write_pnml};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// A place/transition net. Node identifiers share one namespace so that an
/// arc's endpoints are unambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PetriNet {
    places: BTreeSet<String>,
    /// Transition id → label; `None` marks a silent (tau) transition.
    transitions: BTreeMap<String, Option<String>>,
    arcs: BTreeSet<(String, String)>,
}

impl PetriNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        if self.transitions.contains_key(&id) {
            return Err(Error::NetStructure(format!(
                "node id {id:?} already used by a transition"
            )));
        }
        if !self.places.insert(id.clone()) {
            return Err(Error::NetStructure(format!("duplicate place {id:?}")));
        }
        Ok(())
    }

    pub fn add_transition(&mut self, id: impl Into<String>, label: Option<&str>) -> Result<()> {
        let id = id.into();
        if self.places.contains(&id) {
            return Err(Error::NetStructure(format!(
                "node id {id:?} already used by a place"
            )));
        }
        if self.transitions.contains_key(&id) {
            return Err(Error::NetStructure(format!("duplicate transition {id:?}")));
        }
        self.transitions.insert(id, label.map(str::to_owned));
        Ok(())
    }

    /// Add an arc. Endpoints must exist and be of opposite kinds.
    pub fn add_arc(&mut self, source: impl Into<String>, target: impl Into<String>) -> Result<()> {
        let source = source.into();
        let target = target.into();
        let src_place = self.places.contains(&source);
        let tgt_place = self.places.contains(&target);
        let src_trans = self.transitions.contains_key(&source);
        let tgt_trans = self.transitions.contains_key(&target);
        if !src_place && !src_trans {
            return Err(Error::NetStructure(format!("arc source {source:?} does not exist")));
        }
        if !tgt_place && !tgt_trans {
            return Err(Error::NetStructure(format!("arc target {target:?} does not exist")));
        }
        if src_place == tgt_place {
            return Err(Error::NetStructure(format!(
                "arc {source:?} -> {target:?} connects two nodes of the same kind"
            )));
        }
        if !self.arcs.insert((source.clone(), target.clone())) {
            return Err(Error::NetStructure(format!(
                "duplicate arc {source:?} -> {target:?}"
            )));
        }
        Ok(())
    }

    pub fn places(&self) -> &BTreeSet<String> {
        &self.places
    }

    pub fn transitions(&self) -> &BTreeMap<String, Option<String>> {
        &self.transitions
    }

    pub fn arcs(&self) -> &BTreeSet<(String, String)> {
        &self.arcs
    }

    pub fn is_place(&self, id: &str) -> bool {
        self.places.contains(id)
    }

    pub fn is_transition(&self, id: &str) -> bool {
        self.transitions.contains_key(id)
    }

    /// Label of a transition; `None` if the transition is silent or unknown.
    pub fn label(&self, transition: &str) -> Option<&str> {
        self.transitions.get(transition).and_then(|l| l.as_deref())
    }

    pub fn is_silent(&self, transition: &str) -> bool {
        matches!(self.transitions.get(transition), Some(None))
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Sorted input nodes of `id`.
    pub fn preset(&self, id: &str) -> Vec<&str> {
        self.arcs
            .iter()
            .filter(|(_, t)| t == id)
            .map(|(s, _)| s.as_str())
            .collect()
    }

    /// Sorted output nodes of `id`.
    pub fn postset(&self, id: &str) -> Vec<&str> {
        // Arcs are ordered by (source, target), so a range scan stays sorted.
        self.arcs
            .range((id.to_owned(), String::new())..)
            .take_while(|(s, _)| s == id)
            .map(|(_, t)| t.as_str())
            .collect()
    }

    /// Transitions enabled under `marking`, in sorted id order.
    pub fn enabled(&self, marking: &Marking) -> Vec<&str> {
        self.transitions
            .keys()
            .filter(|t| self.is_enabled(marking, t))
            .map(String::as_str)
            .collect()
    }

    pub fn is_enabled(&self, marking: &Marking, transition: &str) -> bool {
        self.is_transition(transition)
            && self.preset(transition).iter().all(|p| marking.tokens(p) >= 1)
    }

    /// Fire `transition`, producing the successor marking. Errors if the
    /// transition does not exist or is not enabled.
    pub fn fire(&self, marking: &Marking, transition: &str) -> Result<Marking> {
        if !self.is_transition(transition) {
            return Err(Error::InvalidInput(format!("no transition {transition:?}")));
        }
        if !self.is_enabled(marking, transition) {
            return Err(Error::NotEnabled { transition: transition.to_owned() });
        }
        let mut next = marking.clone();
        for place in self.preset(transition) {
            next.take(place, 1);
        }
        for place in self.postset(transition) {
            next.add(place, 1);
        }
        Ok(next)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let nodes = self.num_places() + self.num_transitions();
        let mean_degree = if nodes == 0 {
            0.0
        } else {
            2.0 * self.num_arcs() as f64 / nodes as f64
        };
        DegreeStats {
            num_places: self.num_places(),
            num_transitions: self.num_transitions(),
            num_arcs: self.num_arcs(),
            mean_degree,
        }
    }
}

/// Node and arc counts plus the mean node degree (each arc contributes one
/// degree to each endpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub num_places: usize,
    pub num_transitions: usize,
    pub num_arcs: usize,
    pub mean_degree: f64,
}

/// A multiset of tokens over places. Zero-count entries are never stored,
/// so equality is semantic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Marking {
    tokens: BTreeMap<String, u64>,
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    /// One token on one place.
    pub fn single(place: impl Into<String>) -> Self {
        let mut m = Marking::new();
        m.add(place.into(), 1);
        m
    }

    pub fn tokens(&self, place: &str) -> u64 {
        self.tokens.get(place).copied().unwrap_or(0)
    }

    pub fn add(&mut self, place: impl Into<String>, count: u64) {
        if count == 0 {
            return;
        }
        *self.tokens.entry(place.into()).or_insert(0) += count;
    }

    /// Remove up to `count` tokens from `place`; returns how many were
    /// actually removed.
    pub fn take(&mut self, place: &str, count: u64) -> u64 {
        match self.tokens.get_mut(place) {
            Some(n) => {
                let taken = count.min(*n);
                *n -= taken;
                if *n == 0 {
                    self.tokens.remove(place);
                }
                taken
            }
            None => 0,
        }
    }

    pub fn set(&mut self, place: impl Into<String>, count: u64) {
        let place = place.into();
        if count == 0 {
            self.tokens.remove(&place);
        } else {
            self.tokens.insert(place, count);
        }
    }

    /// Total number of tokens.
    pub fn total(&self) -> u64 {
        self.tokens.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.tokens.iter().map(|(p, &n)| (p.as_str(), n))
    }
}

impl FromIterator<(String, u64)> for Marking {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        let mut m = Marking::new();
        for (place, count) in iter {
            m.add(place, count);
        }
        m
    }
}

/// A Petri net together with its initial and final markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptingPetriNet {
    pub net: PetriNet,
    pub initial_marking: Marking,
    pub final_marking: Marking,
}

impl AcceptingPetriNet {
    /// Checked constructor: both markings may only mention existing places.
    pub fn new(net: PetriNet, initial_marking: Marking, final_marking: Marking) -> Result<Self> {
        for (name, marking) in [("initial", &initial_marking), ("final", &final_marking)] {
            if let Some((place, _)) = marking.iter().find(|(p, _)| !net.is_place(p)) {
                return Err(Error::NetStructure(format!(
                    "{name} marking references unknown place {place:?}"
                )));
            }
        }
        Ok(AcceptingPetriNet { net, initial_marking, final_marking })
    }
}

/// Outcome of the workflow-net check: the verdict plus every violated
/// requirement, so callers can report what exactly is wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowNetReport {
    pub is_workflow_net: bool,
    /// The unique source place, if there is exactly one.
    pub source: Option<String>,
    /// The unique sink place, if there is exactly one.
    pub sink: Option<String>,
    pub issues: Vec<String>,
}

/// Check the three workflow-net conditions: a unique source place (empty
/// preset), a unique sink place (empty postset), and every node lying on a
/// path from source to sink.
pub fn is_workflow_net(net: &PetriNet) -> WorkflowNetReport {
    let mut issues = Vec::new();

    let mut has_incoming: BTreeSet<&str> = BTreeSet::new();
    let mut has_outgoing: BTreeSet<&str> = BTreeSet::new();
    for (s, t) in net.arcs() {
        has_outgoing.insert(s);
        has_incoming.insert(t);
    }
    let sources: Vec<&str> = net
        .places()
        .iter()
        .map(String::as_str)
        .filter(|p| !has_incoming.contains(p))
        .collect();
    let sinks: Vec<&str> = net
        .places()
        .iter()
        .map(String::as_str)
        .filter(|p| !has_outgoing.contains(p))
        .collect();

    if sources.len() != 1 {
        issues.push(format!(
            "expected exactly one source place, found {}: {sources:?}",
            sources.len()
        ));
    }
    if sinks.len() != 1 {
        issues.push(format!(
            "expected exactly one sink place, found {}: {sinks:?}",
            sinks.len()
        ));
    }

    let source = (sources.len() == 1).then(|| sources[0].to_owned());
    let sink = (sinks.len() == 1).then(|| sinks[0].to_owned());

    if let (Some(src), Some(snk)) = (&source, &sink) {
        let forward = reachable(net, src, false);
        let backward = reachable(net, snk, true);
        let stranded: Vec<&str> = net
            .places()
            .iter()
            .map(String::as_str)
            .chain(net.transitions().keys().map(String::as_str))
            .filter(|n| !(forward.contains(*n) && backward.contains(*n)))
            .collect();
        if !stranded.is_empty() {
            issues.push(format!(
                "nodes not on a path from source to sink: {stranded:?}"
            ));
        }
    }

    WorkflowNetReport { is_workflow_net: issues.is_empty(), source, sink, issues }
}

fn reachable<'a>(net: &'a PetriNet, from: &'a str, reverse: bool) -> BTreeSet<&'a str> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    seen.insert(from);
    let mut queue: VecDeque<&str> = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        let next = if reverse { net.preset(node) } else { net.postset(node) };
        for n in next {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// source -> a -> p1 -> (b|c) -> p2 -> d -> sink
    pub(crate) fn xor_net() -> AcceptingPetriNet {
        let mut net = PetriNet::new();
        for p in ["source", "p1", "p2", "sink"] {
            net.add_place(p).unwrap();
        }
        for t in ["a", "b", "c", "d"] {
            net.add_transition(format!("t_{t}"), Some(t)).unwrap();
        }
        for (s, t) in [
            ("source", "t_a"),
            ("t_a", "p1"),
            ("p1", "t_b"),
            ("p1", "t_c"),
            ("t_b", "p2"),
            ("t_c", "p2"),
            ("p2", "t_d"),
            ("t_d", "sink"),
        ] {
            net.add_arc(s, t).unwrap();
        }
        AcceptingPetriNet::new(net, Marking::single("source"), Marking::single("sink")).unwrap()
    }

    #[test]
    fn construction_rules_are_enforced() {
        let mut net = PetriNet::new();
        net.add_place("p").unwrap();
        net.add_transition("t", None).unwrap();
        assert!(net.add_place("p").is_err(), "duplicate place");
        assert!(net.add_transition("p", None).is_err(), "id collision across kinds");
        assert!(net.add_arc("p", "p").is_err(), "place to place");
        assert!(net.add_arc("t", "t").is_err(), "transition to transition");
        assert!(net.add_arc("p", "missing").is_err(), "dangling endpoint");
        net.add_arc("p", "t").unwrap();
        assert!(net.add_arc("p", "t").is_err(), "duplicate arc");
    }

    #[test]
    fn firing_moves_tokens() {
        let apn = xor_net();
        let net = &apn.net;
        let m0 = &apn.initial_marking;
        assert_eq!(net.enabled(m0), vec!["t_a"]);
        assert!(matches!(
            net.fire(m0, "t_b"),
            Err(Error::NotEnabled { transition }) if transition == "t_b"
        ));
        let m1 = net.fire(m0, "t_a").unwrap();
        assert_eq!(m1.tokens("source"), 0);
        assert_eq!(m1.tokens("p1"), 1);
        assert_eq!(net.enabled(&m1), vec!["t_b", "t_c"]);
        let m2 = net.fire(&m1, "t_c").unwrap();
        let m3 = net.fire(&m2, "t_d").unwrap();
        assert_eq!(m3, apn.final_marking);
        assert!(net.enabled(&m3).is_empty());
        assert!(matches!(net.fire(&m3, "nope"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn marking_is_semantic() {
        let mut a = Marking::new();
        a.add("p", 2);
        a.take("p", 2);
        assert_eq!(a, Marking::new(), "zero entries are not stored");
        assert_eq!(a.take("p", 1), 0);
        let b: Marking = [("x".to_owned(), 1), ("y".to_owned(), 3)].into_iter().collect();
        assert_eq!(b.total(), 4);
    }

    #[test]
    fn workflow_net_check() {
        let apn = xor_net();
        let report = is_workflow_net(&apn.net);
        assert!(report.is_workflow_net, "{:?}", report.issues);
        assert_eq!(report.source.as_deref(), Some("source"));
        assert_eq!(report.sink.as_deref(), Some("sink"));

        // Disconnect: add a transition nobody can reach.
        let mut net = apn.net.clone();
        net.add_transition("t_orphan", Some("orphan")).unwrap();
        let report = is_workflow_net(&net);
        assert!(!report.is_workflow_net);
        assert_eq!(report.issues.len(), 1);
        assert!(report.issues[0].contains("t_orphan"));

        // Two sinks.
        let mut net = apn.net.clone();
        net.add_place("sink2").unwrap();
        net.add_arc("t_d", "sink2").unwrap();
        let report = is_workflow_net(&net);
        assert!(!report.is_workflow_net);
        assert!(report.sink.is_none());
    }

    #[test]
    fn degree_stats_match_hand_count() {
        let apn = xor_net();
        let stats = apn.net.degree_stats();
        assert_eq!(stats.num_places, 4);
        assert_eq!(stats.num_transitions, 4);
        assert_eq!(stats.num_arcs, 8);
        assert!((stats.mean_degree - 2.0).abs() < 1e-12);
    }

    #[test]
    fn accepting_net_validates_markings() {
        let apn = xor_net();
        let err = AcceptingPetriNet::new(
            apn.net.clone(),
            Marking::single("nope"),
            Marking::new(),
        );
        assert!(err.is_err());
    }
}
